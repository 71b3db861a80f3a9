//! Graph spectral clustering for document embeddings whose cosine
//! similarities may be negative.
//!
//! The pipeline: vectorize documents ([`vectorize`]), compute and repair a
//! pairwise similarity matrix ([`similarity`]), build a graph Laplacian
//! ([`laplacian`]), embed into its smallest eigenvectors ([`spectral`]),
//! cluster with k-means ([`kmeans`]), and judge the result with graph-cut
//! criteria ([`criteria`]) and label-based F-scores ([`metrics`]). The
//! [`harness`] module drives full experiment grids and backs the `negspec`
//! command-line tool.

pub mod criteria;
pub mod error;
pub mod harness;
pub mod kmeans;
pub mod laplacian;
pub mod metrics;
pub mod similarity;
pub mod spectral;
pub mod vectorize;

pub use error::{Error, Result};
