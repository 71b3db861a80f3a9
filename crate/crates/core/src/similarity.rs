//! Cosine similarity matrices and repair transforms for negative entries.
//!
//! Cosine similarity between document embeddings ranges over [-1, 1], but
//! graph-cut clustering wants non-negative edge weights and degrees. The
//! transforms here repair a similarity matrix by zeroing, shifting,
//! shift-normalizing, angle rescaling, angle division, or exponentiation of
//! its off-diagonal entries. All of them keep the matrix symmetric with a
//! zero diagonal, and all except plain zeroing are monotone in the input
//! similarity.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use ndarray::{Array1, Array2, Axis};

use crate::error::{Error, Result};
use crate::vectorize::EmbeddingMatrix;

/// Maximum asymmetry accepted when constructing from raw values; anything
/// smaller is averaged away, anything larger is an error.
const ASYMMETRY_TOLERANCE: f64 = 1e-9;

/// The available repair transforms for negative similarities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Transform {
    /// Replace negative entries with 0.
    Zero,
    /// Add a constant c to every off-diagonal entry.
    Add,
    /// Add c, then divide by 1 + c, mapping [-1, 1] into [(c-1)/(c+1), 1].
    AddNorm,
    /// Rescale angles so the largest pairwise angle becomes a right angle.
    AngleMax,
    /// Divide angles by 1 + c.
    AngleDiv,
    /// Exponential of the shifted distance: exp(-(1 - (s + c)) / 2).
    Exp,
}

impl Transform {
    pub const ALL: [Transform; 6] = [
        Transform::Zero,
        Transform::Add,
        Transform::AddNorm,
        Transform::AngleMax,
        Transform::AngleDiv,
        Transform::Exp,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Transform::Zero => "zero",
            Transform::Add => "add",
            Transform::AddNorm => "add_norm",
            Transform::AngleMax => "angle_max",
            Transform::AngleDiv => "angle_div",
            Transform::Exp => "exp",
        }
    }

    /// Whether the transform takes the shift constant c into account.
    pub fn uses_c(&self) -> bool {
        !matches!(self, Transform::Zero | Transform::AngleMax)
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Transform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(Transform::Zero),
            "add" => Ok(Transform::Add),
            "add_norm" => Ok(Transform::AddNorm),
            "angle_max" => Ok(Transform::AngleMax),
            "angle_div" => Ok(Transform::AngleDiv),
            "exp" => Ok(Transform::Exp),
            other => Err(Error::Config(format!(
                "unknown transform {other:?} (expected zero, add, add_norm, angle_max, angle_div or exp)"
            ))),
        }
    }
}

/// A symmetric pairwise similarity matrix with zero diagonal.
///
/// `transform` and `c` record how the matrix was repaired, if it was.
#[derive(Debug, Clone)]
pub struct SimilarityMatrix {
    values: Array2<f64>,
    pub transform: Option<Transform>,
    pub c: Option<f64>,
}

impl SimilarityMatrix {
    /// Validate raw values: square, symmetric within 1e-9 (small asymmetry is
    /// averaged away), zero diagonal. Larger violations are errors.
    pub fn from_values(values: Array2<f64>) -> Result<Self> {
        let (rows, cols) = values.dim();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        for i in 0..rows {
            let value = values[[i, i]];
            if value.abs() > ASYMMETRY_TOLERANCE {
                return Err(Error::NonzeroDiagonal { index: i, value });
            }
            for j in (i + 1)..rows {
                let delta = (values[[i, j]] - values[[j, i]]).abs();
                if delta > ASYMMETRY_TOLERANCE {
                    return Err(Error::Asymmetric { i, j, delta });
                }
            }
        }
        let mut symmetrized = values;
        for i in 0..rows {
            symmetrized[[i, i]] = 0.0;
            for j in (i + 1)..rows {
                let mean = 0.5 * (symmetrized[[i, j]] + symmetrized[[j, i]]);
                symmetrized[[i, j]] = mean;
                symmetrized[[j, i]] = mean;
            }
        }
        Ok(SimilarityMatrix {
            values: symmetrized,
            transform: None,
            c: None,
        })
    }

    fn repaired(values: Array2<f64>, transform: Transform, c: Option<f64>) -> Self {
        SimilarityMatrix {
            values,
            transform: Some(transform),
            c,
        }
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    /// Row sums, the degree of each node in the similarity graph.
    pub fn degrees(&self) -> Array1<f64> {
        self.values.sum_axis(Axis(1))
    }

    /// Apply an off-diagonal map that is a function of the entry alone,
    /// preserving symmetry and the zero diagonal.
    fn map_off_diagonal(&self, f: impl Fn(f64) -> f64) -> Array2<f64> {
        let n = self.n();
        let mut out = Array2::zeros((n, n));
        for i in 0..n {
            for j in (i + 1)..n {
                let v = f(self.values[[i, j]]);
                out[[i, j]] = v;
                out[[j, i]] = v;
            }
        }
        out
    }

    /// Replace negative off-diagonal entries with 0.
    pub fn transform_zero(&self) -> SimilarityMatrix {
        let values = self.map_off_diagonal(|s| if s > 0.0 { s } else { 0.0 });
        SimilarityMatrix::repaired(values, Transform::Zero, None)
    }

    /// Add c >= 0 to every off-diagonal entry.
    pub fn transform_add(&self, c: f64) -> Result<SimilarityMatrix> {
        if c < 0.0 {
            return Err(Error::NegativeShift { c });
        }
        let values = self.map_off_diagonal(|s| s + c);
        Ok(SimilarityMatrix::repaired(values, Transform::Add, Some(c)))
    }

    /// Add c >= 0 and renormalize: (s + c) / (1 + c).
    pub fn transform_add_norm(&self, c: f64) -> Result<SimilarityMatrix> {
        if c < 0.0 {
            return Err(Error::NegativeShift { c });
        }
        let values = self.map_off_diagonal(|s| (s + c) / (1.0 + c));
        Ok(SimilarityMatrix::repaired(
            values,
            Transform::AddNorm,
            Some(c),
        ))
    }

    /// Rescale pairwise angles so the largest one becomes pi/2, then take
    /// cosines: cos(pi/2 * angle / max_angle). Undefined when every
    /// off-diagonal similarity is 1 (the maximum angle is then zero).
    pub fn transform_angle_max(&self) -> Result<SimilarityMatrix> {
        let n = self.n();
        let mut max_angle: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                max_angle = max_angle.max(self.values[[i, j]].clamp(-1.0, 1.0).acos());
            }
        }
        if max_angle <= 0.0 {
            return Err(Error::DegenerateAngleRange);
        }
        let values = self.map_off_diagonal(|s| {
            let angle = s.clamp(-1.0, 1.0).acos();
            (std::f64::consts::FRAC_PI_2 * angle / max_angle).cos()
        });
        Ok(SimilarityMatrix::repaired(values, Transform::AngleMax, None))
    }

    /// Shrink pairwise angles by 1 + c, then take cosines.
    pub fn transform_angle_div(&self, c: f64) -> Result<SimilarityMatrix> {
        if c < 0.0 {
            return Err(Error::NegativeShift { c });
        }
        let values = self.map_off_diagonal(|s| (s.clamp(-1.0, 1.0).acos() / (1.0 + c)).cos());
        Ok(SimilarityMatrix::repaired(
            values,
            Transform::AngleDiv,
            Some(c),
        ))
    }

    /// Exponential repair: exp(-(1 - (s + c)) / 2). Always positive; entries
    /// may exceed 1 for c > 0.
    pub fn transform_exp(&self, c: f64) -> Result<SimilarityMatrix> {
        if c < 0.0 {
            return Err(Error::NegativeShift { c });
        }
        let values = self.map_off_diagonal(|s| (-(1.0 - (s + c)) / 2.0).exp());
        Ok(SimilarityMatrix::repaired(values, Transform::Exp, Some(c)))
    }

    /// Dispatch on a transform tag. `c` is ignored by the transforms that do
    /// not take a constant.
    pub fn apply(&self, transform: Transform, c: f64) -> Result<SimilarityMatrix> {
        match transform {
            Transform::Zero => Ok(self.transform_zero()),
            Transform::Add => self.transform_add(c),
            Transform::AddNorm => self.transform_add_norm(c),
            Transform::AngleMax => self.transform_angle_max(),
            Transform::AngleDiv => self.transform_angle_div(c),
            Transform::Exp => self.transform_exp(c),
        }
    }
}

/// How much negativity a similarity matrix carries: entry counts, row-sum
/// counts, and the worst offenders.
#[derive(Debug, Clone, PartialEq)]
pub struct NegativityReport {
    /// Off-diagonal entries strictly below zero (ordered pairs).
    pub negative_entries: usize,
    /// Rows whose sum is strictly below zero.
    pub negative_degrees: usize,
    /// Smallest off-diagonal similarity (0 when there is none).
    pub min_similarity: f64,
    /// Smallest row sum.
    pub min_degree: f64,
}

/// Count negative entries and negative row sums of a similarity matrix.
pub fn negativity_stats(s: &SimilarityMatrix) -> NegativityReport {
    let n = s.n();
    let values = s.values();
    let mut negative_entries = 0;
    let mut min_similarity = f64::INFINITY;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let v = values[[i, j]];
            if v < 0.0 {
                negative_entries += 1;
            }
            min_similarity = min_similarity.min(v);
        }
    }
    if !min_similarity.is_finite() {
        min_similarity = 0.0;
    }
    let degrees = s.degrees();
    let negative_degrees = degrees.iter().filter(|&&d| d < 0.0).count();
    let min_degree = degrees.iter().cloned().fold(f64::INFINITY, f64::min);
    NegativityReport {
        negative_entries,
        negative_degrees,
        min_similarity,
        min_degree: if min_degree.is_finite() { min_degree } else { 0.0 },
    }
}

/// Pairwise cosine similarities between embedding rows, with zero diagonal.
pub fn cosine_similarity(embedding: &EmbeddingMatrix) -> Result<SimilarityMatrix> {
    let n = embedding.rows();
    let mut norms = Vec::with_capacity(n);
    for (index, row) in embedding.values.rows().into_iter().enumerate() {
        let norm = row.dot(&row).sqrt();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::ZeroRow { index });
        }
        norms.push(norm);
    }
    let mut values = Array2::zeros((n, n));
    for i in 0..n {
        let row_i = embedding.values.row(i);
        for j in (i + 1)..n {
            let s = row_i.dot(&embedding.values.row(j)) / (norms[i] * norms[j]);
            values[[i, j]] = s;
            values[[j, i]] = s;
        }
    }
    Ok(SimilarityMatrix {
        values,
        transform: None,
        c: None,
    })
}

/// Append a constant coordinate b >= 0 to every unit-norm row and renormalize.
///
/// Lifting shrinks every pairwise angle: the new cosine of rows i and k is
/// (s_ik + b^2) / (1 + b^2), which is exactly the add-and-normalize repair
/// with c = b^2.
pub fn lift_embedding(embedding: &EmbeddingMatrix, b: f64) -> Result<EmbeddingMatrix> {
    if b < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "lift offset b = {b} must be non-negative"
        )));
    }
    for (index, row) in embedding.values.rows().into_iter().enumerate() {
        let norm = row.dot(&row).sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "lift requires unit-norm rows: row {index} has norm {norm}"
            )));
        }
    }
    let n = embedding.rows();
    let m = embedding.dims();
    let scale = 1.0 / (1.0 + b * b).sqrt();
    let mut values = Array2::zeros((n, m + 1));
    for i in 0..n {
        for j in 0..m {
            values[[i, j]] = embedding.values[[i, j]] * scale;
        }
        values[[i, m]] = b * scale;
    }
    Ok(EmbeddingMatrix {
        ids: embedding.ids.clone(),
        values,
        normalized: true,
    })
}

/// Write a similarity matrix as a headerless n x n CSV.
pub fn write_similarity_csv(s: &SimilarityMatrix, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    for row in s.values().rows() {
        let record: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Read a headerless n x n similarity CSV, validating symmetry and the zero
/// diagonal.
pub fn load_similarity_csv(path: &Path) -> Result<SimilarityMatrix> {
    let display = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)?;
    let mut data = Vec::new();
    let mut rows = 0usize;
    let mut cols = None;
    for record in reader.records() {
        let record = record?;
        match cols {
            None => cols = Some(record.len()),
            Some(expected) if record.len() != expected => {
                return Err(Error::Malformed {
                    path: display,
                    msg: format!("row {rows} has {} fields, expected {expected}", record.len()),
                });
            }
            _ => {}
        }
        for value in record.iter() {
            data.push(value.trim().parse::<f64>().map_err(|_| Error::Malformed {
                path: display.clone(),
                msg: format!("bad float {value:?}"),
            })?);
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| Error::Malformed {
        path: display.clone(),
        msg: "empty file".into(),
    })?;
    let values = Array2::from_shape_vec((rows, cols), data).expect("row-major data matches shape");
    SimilarityMatrix::from_values(values)
}
