//! External clustering quality: F-scores against ground-truth labels.
//!
//! Two views of agreement: the pairwise F-score treats clustering as binary
//! classification of document pairs, and the matched F-score pairs clusters
//! with labels one-to-one (maximum-weight assignment) and macro-averages the
//! per-label F1. Both are label-permutation invariant and live in [0, 1].

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::kmeans::Partition;

/// A batch of per-run scores with their mean and sample standard deviation.
#[derive(Debug, Clone)]
pub struct RunScores {
    pub scores: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation (n - 1 divisor); 0 for a single score.
    pub sd: f64,
}

/// Map arbitrary labels to dense ids in order of first appearance.
pub fn label_ids<S: AsRef<str>>(labels: &[S]) -> Vec<usize> {
    let mut seen: Vec<&str> = Vec::new();
    labels
        .iter()
        .map(|label| {
            let label = label.as_ref();
            match seen.iter().position(|&s| s == label) {
                Some(pos) => pos,
                None => {
                    seen.push(label);
                    seen.len() - 1
                }
            }
        })
        .collect()
}

fn choose2(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// Contingency counts between predicted clusters and (densely remapped)
/// truth labels, plus the marginals.
struct Contingency {
    counts: Array2<u64>,
    pred_sizes: Vec<u64>,
    truth_sizes: Vec<u64>,
}

fn contingency(pred: &Partition, truth: &[usize]) -> Result<Contingency> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: pred.len(),
            right: truth.len(),
        });
    }
    if pred.is_empty() {
        return Err(Error::InvalidParameter(
            "cannot score an empty clustering".into(),
        ));
    }
    // remap truth labels densely by first appearance
    let mut remap: Vec<usize> = Vec::new();
    let dense: Vec<usize> = truth
        .iter()
        .map(|&t| match remap.iter().position(|&r| r == t) {
            Some(pos) => pos,
            None => {
                remap.push(t);
                remap.len() - 1
            }
        })
        .collect();
    let kp = pred.k();
    let kt = remap.len();
    let mut counts = Array2::zeros((kp, kt));
    for (&c, &t) in pred.assignment().iter().zip(&dense) {
        counts[[c, t]] += 1;
    }
    let pred_sizes = (0..kp).map(|c| counts.row(c).sum()).collect();
    let truth_sizes = (0..kt).map(|t| counts.column(t).sum()).collect();
    Ok(Contingency {
        counts,
        pred_sizes,
        truth_sizes,
    })
}

/// F-score over unordered document pairs: a pair is positive when both
/// documents share a cluster (prediction) or share a label (truth).
///
/// Precision or recall with a zero denominator counts as 0, so an
/// all-singletons clustering scores 0.
pub fn pairwise_f1(pred: &Partition, truth: &[usize]) -> Result<f64> {
    let table = contingency(pred, truth)?;
    let agreements: u64 = table.counts.iter().map(|&c| choose2(c)).sum();
    let pred_pairs: u64 = table.pred_sizes.iter().map(|&c| choose2(c)).sum();
    let truth_pairs: u64 = table.truth_sizes.iter().map(|&c| choose2(c)).sum();
    let precision = if pred_pairs > 0 {
        agreements as f64 / pred_pairs as f64
    } else {
        0.0
    };
    let recall = if truth_pairs > 0 {
        agreements as f64 / truth_pairs as f64
    } else {
        0.0
    };
    if precision + recall == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * precision * recall / (precision + recall))
}

/// Minimum-cost assignment on a square cost matrix (shortest augmenting
/// paths with potentials). Returns the column assigned to each row.
fn min_cost_assignment(cost: &Array2<f64>) -> Vec<usize> {
    let n = cost.nrows();
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut matched_row = vec![0usize; n + 1]; // per column, 1-based rows
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[[i0 - 1, j - 1]] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut result = vec![0usize; n];
    for j in 1..=n {
        if matched_row[j] > 0 {
            result[matched_row[j] - 1] = j - 1;
        }
    }
    result
}

/// Macro-averaged F-score under the best one-to-one pairing of clusters
/// with labels.
///
/// Each (cluster, label) pair gets the F1 of using that cluster as a
/// detector for that label; a maximum-weight assignment picks the pairing,
/// and the summed F1 is averaged over all truth labels, so unmatched labels
/// drag the score down.
pub fn matched_f1(pred: &Partition, truth: &[usize]) -> Result<f64> {
    let table = contingency(pred, truth)?;
    let kp = table.pred_sizes.len();
    let kt = table.truth_sizes.len();
    let size = kp.max(kt);
    // pad to square with zero-score pairs so the assignment always exists
    let mut score = Array2::zeros((size, size));
    for c in 0..kp {
        for t in 0..kt {
            let inter = table.counts[[c, t]] as f64;
            if inter == 0.0 {
                continue;
            }
            let precision = inter / table.pred_sizes[c] as f64;
            let recall = inter / table.truth_sizes[t] as f64;
            score[[c, t]] = 2.0 * precision * recall / (precision + recall);
        }
    }
    let cost = score.mapv(|v| -v);
    let assignment = min_cost_assignment(&cost);
    let total: f64 = assignment
        .iter()
        .enumerate()
        .filter(|&(row, &col)| row < kp && col < kt)
        .map(|(row, &col)| score[[row, col]])
        .sum();
    Ok(total / kt as f64)
}

/// Mean and sample standard deviation of a non-empty score list.
pub fn aggregate(scores: &[f64]) -> Result<RunScores> {
    if scores.is_empty() {
        return Err(Error::EmptyScores);
    }
    let n = scores.len() as f64;
    let mean = scores.iter().sum::<f64>() / n;
    let sd = if scores.len() == 1 {
        0.0
    } else {
        let ss: f64 = scores.iter().map(|s| (s - mean) * (s - mean)).sum();
        (ss / (n - 1.0)).sqrt()
    };
    Ok(RunScores {
        scores: scores.to_vec(),
        mean,
        sd,
    })
}
