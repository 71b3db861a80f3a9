//! Graph Laplacians over similarity matrices.
//!
//! Five constructions are supported. The combinatorial Laplacian D - S always
//! exists; the normalized one divides by degrees and therefore requires every
//! degree to be positive. The remaining three are ways of staying well-defined
//! when similarities (and hence degrees) go negative: unit-diagonal
//! reinforcement, absolute-value degrees, and a uniform diagonal perturbation.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::similarity::SimilarityMatrix;

/// The available Laplacian constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LaplacianKind {
    /// D - S.
    Combinatorial,
    /// I - D^{-1/2} S D^{-1/2}; requires positive degrees.
    Normalized,
    /// Normalized Laplacian of S + I with degrees d + 1: tolerates degrees
    /// down to (but not including) -1.
    Rationormalized,
    /// Degrees from absolute similarities: diag(sum |s|) - S. Always
    /// positive semidefinite.
    Signed,
    /// (D + alpha I) - S for a perturbation alpha > 0.
    Perturbed,
}

impl LaplacianKind {
    pub const ALL: [LaplacianKind; 5] = [
        LaplacianKind::Combinatorial,
        LaplacianKind::Normalized,
        LaplacianKind::Rationormalized,
        LaplacianKind::Signed,
        LaplacianKind::Perturbed,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            LaplacianKind::Combinatorial => "combinatorial",
            LaplacianKind::Normalized => "normalized",
            LaplacianKind::Rationormalized => "rationormalized",
            LaplacianKind::Signed => "signed",
            LaplacianKind::Perturbed => "perturbed",
        }
    }
}

impl fmt::Display for LaplacianKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LaplacianKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "combinatorial" => Ok(LaplacianKind::Combinatorial),
            "normalized" => Ok(LaplacianKind::Normalized),
            "rationormalized" => Ok(LaplacianKind::Rationormalized),
            "signed" => Ok(LaplacianKind::Signed),
            "perturbed" => Ok(LaplacianKind::Perturbed),
            other => Err(Error::Config(format!(
                "unknown laplacian {other:?} (expected combinatorial, normalized, \
                 rationormalized, signed or perturbed)"
            ))),
        }
    }
}

/// Diagonal perturbation used when the grid runner asks for the perturbed
/// Laplacian without an explicit constant. Any positive value leaves the
/// eigenvectors of the combinatorial Laplacian untouched and shifts all
/// eigenvalues equally, so the choice does not affect clustering results.
pub const DEFAULT_PERTURBATION: f64 = 1.0;

/// A symmetric Laplacian matrix tagged with its construction.
#[derive(Debug, Clone)]
pub struct Laplacian {
    pub kind: LaplacianKind,
    pub values: Array2<f64>,
    /// The constant used by the perturbed construction, if any.
    pub shift: Option<f64>,
}

impl Laplacian {
    pub fn n(&self) -> usize {
        self.values.nrows()
    }
}

/// Row sums of the similarity matrix: node degrees, possibly negative.
pub fn degree(s: &SimilarityMatrix) -> Array1<f64> {
    s.degrees()
}

/// Indices whose value fails a positivity requirement.
fn non_positive_indices(values: &Array1<f64>) -> Vec<usize> {
    values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v <= 0.0)
        .map(|(i, _)| i)
        .collect()
}

/// Combinatorial Laplacian D - S. Row sums are zero by construction.
pub fn combinatorial(s: &SimilarityMatrix) -> Laplacian {
    let d = s.degrees();
    let mut values = -s.values().clone();
    for i in 0..s.n() {
        values[[i, i]] = d[i];
    }
    Laplacian {
        kind: LaplacianKind::Combinatorial,
        values,
        shift: None,
    }
}

/// Normalized Laplacian I - D^{-1/2} S D^{-1/2}. Every degree must be
/// strictly positive; offenders are reported by index.
pub fn normalized(s: &SimilarityMatrix) -> Result<Laplacian> {
    let d = s.degrees();
    let offenders = non_positive_indices(&d);
    if !offenders.is_empty() {
        return Err(Error::NegativeDegree { indices: offenders });
    }
    let n = s.n();
    let inv_sqrt: Vec<f64> = d.iter().map(|&v| 1.0 / v.sqrt()).collect();
    let mut values = Array2::zeros((n, n));
    for i in 0..n {
        values[[i, i]] = 1.0;
        for j in (i + 1)..n {
            let v = -s.values()[[i, j]] * inv_sqrt[i] * inv_sqrt[j];
            values[[i, j]] = v;
            values[[j, i]] = v;
        }
    }
    Ok(Laplacian {
        kind: LaplacianKind::Normalized,
        values,
        shift: None,
    })
}

/// Normalized Laplacian of the self-reinforced graph S + I with degrees
/// d + 1: I - D'^{-1/2} (S + I) D'^{-1/2}. Requires every d_i + 1 > 0.
pub fn rationormalized(s: &SimilarityMatrix) -> Result<Laplacian> {
    let shifted: Array1<f64> = s.degrees() + 1.0;
    let offenders = non_positive_indices(&shifted);
    if !offenders.is_empty() {
        return Err(Error::NegativeDegree { indices: offenders });
    }
    let n = s.n();
    let inv_sqrt: Vec<f64> = shifted.iter().map(|&v| 1.0 / v.sqrt()).collect();
    let mut values = Array2::zeros((n, n));
    for i in 0..n {
        // diagonal of S + I is 1, so the diagonal entry is 1 - 1/(d_i + 1)
        values[[i, i]] = 1.0 - inv_sqrt[i] * inv_sqrt[i];
        for j in (i + 1)..n {
            let v = -s.values()[[i, j]] * inv_sqrt[i] * inv_sqrt[j];
            values[[i, j]] = v;
            values[[j, i]] = v;
        }
    }
    Ok(Laplacian {
        kind: LaplacianKind::Rationormalized,
        values,
        shift: None,
    })
}

/// Signed Laplacian diag(sum_k |s_ik|) - S. Positive semidefinite for any
/// symmetric S, negative entries included.
pub fn signed(s: &SimilarityMatrix) -> Laplacian {
    let n = s.n();
    let mut values = -s.values().clone();
    for i in 0..n {
        let abs_degree: f64 = (0..n).map(|j| s.values()[[i, j]].abs()).sum();
        values[[i, i]] = abs_degree;
    }
    Laplacian {
        kind: LaplacianKind::Signed,
        values,
        shift: None,
    }
}

/// Perturbed combinatorial Laplacian (D + alpha I) - S for alpha > 0.
///
/// Adding alpha I shifts every eigenvalue up by alpha and leaves the
/// eigenvectors exactly those of D - S.
pub fn perturbed(s: &SimilarityMatrix, alpha: f64) -> Result<Laplacian> {
    if alpha <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "perturbation alpha = {alpha} must be positive"
        )));
    }
    let mut lap = combinatorial(s);
    for i in 0..lap.n() {
        lap.values[[i, i]] += alpha;
    }
    Ok(Laplacian {
        kind: LaplacianKind::Perturbed,
        values: lap.values,
        shift: Some(alpha),
    })
}

/// Build a Laplacian by kind. The perturbed construction uses
/// [`DEFAULT_PERTURBATION`]; call [`perturbed`] directly for another value.
pub fn build(s: &SimilarityMatrix, kind: LaplacianKind) -> Result<Laplacian> {
    match kind {
        LaplacianKind::Combinatorial => Ok(combinatorial(s)),
        LaplacianKind::Normalized => normalized(s),
        LaplacianKind::Rationormalized => rationormalized(s),
        LaplacianKind::Signed => Ok(signed(s)),
        LaplacianKind::Perturbed => perturbed(s, DEFAULT_PERTURBATION),
    }
}

/// Degree-shifted cosine renormalization: s_ik / sqrt((d_ii + x)(d_kk + x))
/// off the diagonal, zero on it.
///
/// At x = 0 (and positive degrees) this reproduces the off-diagonal part of
/// D^{-1/2} S D^{-1/2}; as x grows all entries shrink toward zero while
/// preserving, for positive similarities, their relative order. Every
/// d_i + x must be strictly positive; the error reports the smallest shift
/// that would work.
pub fn diag_shift_similarity(s: &SimilarityMatrix, x: f64) -> Result<Array2<f64>> {
    let d = s.degrees();
    let min_degree = d.iter().cloned().fold(f64::INFINITY, f64::min);
    if d.iter().any(|&v| v + x <= 0.0) {
        return Err(Error::ShiftTooSmall { x, min_x: -min_degree });
    }
    let n = s.n();
    let inv_sqrt: Vec<f64> = d.iter().map(|&v| 1.0 / (v + x).sqrt()).collect();
    let mut values = Array2::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            let v = s.values()[[i, j]] * inv_sqrt[i] * inv_sqrt[j];
            values[[i, j]] = v;
            values[[j, i]] = v;
        }
    }
    Ok(values)
}
