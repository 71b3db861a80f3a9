//! Spectral embeddings: the k smallest eigenpairs of a Laplacian.
//!
//! Uses a full symmetric dense eigendecomposition and truncates, trading
//! speed for robustness and determinism at the matrix sizes this crate
//! targets. Eigenvector columns are unit norm with a canonical sign (the
//! entry of largest magnitude, earliest on ties, is made non-negative), so
//! repeated runs produce bit-identical embeddings.

use nalgebra::DMatrix;
use ndarray::Array2;

use crate::error::{Error, Result};
use crate::laplacian::{self, LaplacianKind};
use crate::similarity::SimilarityMatrix;

/// Maximum asymmetry accepted by [`eig_smallest`].
const SYMMETRY_TOLERANCE: f64 = 1e-8;

/// Rows of `coords` are documents, columns the k eigenvectors belonging to
/// the k smallest eigenvalues, in ascending eigenvalue order.
#[derive(Debug, Clone)]
pub struct SpectralEmbedding {
    pub coords: Array2<f64>,
    pub eigenvalues: Vec<f64>,
}

impl SpectralEmbedding {
    pub fn rows(&self) -> usize {
        self.coords.nrows()
    }

    pub fn k(&self) -> usize {
        self.coords.ncols()
    }
}

/// Eigenvectors of the k smallest eigenvalues of a symmetric matrix.
///
/// The input must be square and symmetric within 1e-8; the tiny asymmetry
/// left by floating-point construction is averaged away before
/// decomposition. k must lie in [1, n].
pub fn eig_smallest(m: &Array2<f64>, k: usize) -> Result<SpectralEmbedding> {
    let (rows, cols) = m.dim();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    let n = rows;
    if k < 1 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let delta = (m[[i, j]] - m[[j, i]]).abs();
            if delta > SYMMETRY_TOLERANCE {
                return Err(Error::Asymmetric { i, j, delta });
            }
        }
    }
    let sym = DMatrix::from_fn(n, n, |i, j| 0.5 * (m[[i, j]] + m[[j, i]]));
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    // stable sort keeps tied eigenvalues in the solver's deterministic order
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut coords = Array2::zeros((n, k));
    let mut eigenvalues = Vec::with_capacity(k);
    for (col, &idx) in order.iter().take(k).enumerate() {
        eigenvalues.push(eig.eigenvalues[idx]);
        let v = eig.eigenvectors.column(idx);
        let mut pivot = 0;
        for i in 1..n {
            if v[i].abs() > v[pivot].abs() {
                pivot = i;
            }
        }
        let flip = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        let norm = v.norm();
        for i in 0..n {
            coords[[i, col]] = flip * v[i] / norm;
        }
    }
    Ok(SpectralEmbedding {
        coords,
        eigenvalues,
    })
}

/// Build the requested Laplacian over S and embed into its k smallest
/// eigenvectors.
pub fn spectral_embed(
    s: &SimilarityMatrix,
    kind: LaplacianKind,
    k: usize,
) -> Result<SpectralEmbedding> {
    let lap = laplacian::build(s, kind)?;
    eig_smallest(&lap.values, k)
}
