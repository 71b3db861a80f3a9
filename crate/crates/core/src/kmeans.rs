//! Seeded k-means over spectral coordinates.
//!
//! k-means++ initialization followed by Lloyd iteration to a fixpoint (or an
//! iteration cap), with deterministic tie-breaking throughout: nearest
//! centroid ties go to the lowest index, repeated runs with the same seed
//! produce identical assignments. Restarts share one seeded RNG stream and
//! the lowest-inertia restart wins.

use ndarray::{Array2, ArrayView1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Lloyd iteration cap when the assignment does not reach a fixpoint first.
pub const MAX_ITERATIONS: usize = 300;

/// An assignment of n points to k clusters, every id strictly below k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    assignment: Vec<usize>,
    k: usize,
}

impl Partition {
    pub fn new(assignment: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidK {
                k,
                n: assignment.len(),
            });
        }
        if let Some(&bad) = assignment.iter().find(|&&c| c >= k) {
            return Err(Error::InvalidParameter(format!(
                "cluster id {bad} out of range for k = {k}"
            )));
        }
        Ok(Partition { assignment, k })
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Number of points in each cluster.
    pub fn cardinalities(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.k];
        for &c in &self.assignment {
            counts[c] += 1;
        }
        counts
    }
}

/// The winning partition of a k-means run and its inertia (total squared
/// distance of points to their centroids).
#[derive(Debug, Clone)]
pub struct KMeansResult {
    pub partition: Partition,
    pub inertia: f64,
}

fn sq_dist(a: ArrayView1<f64>, b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum()
}

/// k-means++ seeding: k distinct point indices, the first uniform, each
/// further one drawn with probability proportional to its squared distance
/// from the nearest already-chosen seed.
///
/// When every remaining point duplicates a chosen seed (all weights zero),
/// the next seed is drawn uniformly from the unchosen points.
pub fn kmeans_pp_init(points: &Array2<f64>, k: usize, rng: &mut impl Rng) -> Vec<usize> {
    let n = points.nrows();
    assert!(k >= 1 && k <= n, "k = {k} out of range for n = {n}");
    let mut chosen = Vec::with_capacity(k);
    let first = rng.gen_range(0..n);
    chosen.push(first);
    let mut last = points.row(first).to_vec();
    let mut weights: Vec<f64> = (0..n).map(|i| sq_dist(points.row(i), &last)).collect();
    while chosen.len() < k {
        let total: f64 = weights.iter().sum();
        let next = if total > 0.0 {
            let t = rng.gen::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &w) in weights.iter().enumerate() {
                acc += w;
                if acc > t {
                    pick = Some(i);
                    break;
                }
            }
            // guard against the tail being lost to rounding
            pick.unwrap_or_else(|| {
                weights
                    .iter()
                    .rposition(|&w| w > 0.0)
                    .expect("total > 0 implies a positive weight")
            })
        } else {
            let unchosen: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
            unchosen[rng.gen_range(0..unchosen.len())]
        };
        chosen.push(next);
        last = points.row(next).to_vec();
        for i in 0..n {
            let d = sq_dist(points.row(i), &last);
            if d < weights[i] {
                weights[i] = d;
            }
        }
    }
    chosen
}

/// Index of the nearest centroid; ties go to the lowest index.
fn nearest(point: ArrayView1<f64>, centroids: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_dist = sq_dist(point, &centroids[0]);
    for (j, centroid) in centroids.iter().enumerate().skip(1) {
        let d = sq_dist(point, centroid);
        if d < best_dist {
            best = j;
            best_dist = d;
        }
    }
    best
}

#[derive(Debug)]
struct LloydOutcome {
    assignment: Vec<usize>,
    inertia: f64,
    /// Inertia after each iteration, for convergence checks.
    #[cfg_attr(not(test), allow(dead_code))]
    history: Vec<f64>,
}

/// Reassign one point into every empty cluster: the point farthest from its
/// centroid among clusters that can spare one (ties to the lowest index).
fn repair_empty_clusters(
    assignment: &mut [usize],
    centroids: &[Vec<f64>],
    points: &Array2<f64>,
    k: usize,
) {
    loop {
        let mut counts = vec![0usize; k];
        for &c in assignment.iter() {
            counts[c] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            break;
        };
        let mut donor: Option<(usize, f64)> = None;
        for (i, &c) in assignment.iter().enumerate() {
            if counts[c] < 2 {
                continue;
            }
            let d = sq_dist(points.row(i), &centroids[c]);
            if donor.map_or(true, |(_, best)| d > best) {
                donor = Some((i, d));
            }
        }
        let (idx, _) = donor.expect("n >= k guarantees a cluster with two members");
        assignment[idx] = empty;
    }
}

fn lloyd(points: &Array2<f64>, mut centroids: Vec<Vec<f64>>, k: usize) -> LloydOutcome {
    let n = points.nrows();
    let dims = points.ncols();
    let mut assignment: Vec<usize> = vec![0; n];
    let mut history = Vec::new();
    for _ in 0..MAX_ITERATIONS {
        let mut next: Vec<usize> = (0..n).map(|i| nearest(points.row(i), &centroids)).collect();
        repair_empty_clusters(&mut next, &centroids, points, k);

        // update step: centroids become the means of their members
        let mut sums = vec![vec![0.0; dims]; k];
        let mut counts = vec![0usize; k];
        for (i, &c) in next.iter().enumerate() {
            counts[c] += 1;
            for (acc, v) in sums[c].iter_mut().zip(points.row(i)) {
                *acc += v;
            }
        }
        for (sum, &count) in sums.iter_mut().zip(&counts) {
            for v in sum.iter_mut() {
                *v /= count as f64;
            }
        }
        centroids = sums;

        let inertia: f64 = next
            .iter()
            .enumerate()
            .map(|(i, &c)| sq_dist(points.row(i), &centroids[c]))
            .sum();
        history.push(inertia);

        let converged = next == assignment;
        assignment = next;
        if converged {
            break;
        }
    }
    let inertia = *history.last().expect("at least one iteration ran");
    LloydOutcome {
        assignment,
        inertia,
        history,
    }
}

/// Cluster the rows of `points` into k groups.
///
/// Runs `restarts` k-means++ initializations off one RNG seeded with `seed`
/// and returns the lowest-inertia outcome (earliest restart on ties). All k
/// clusters of the result are non-empty.
pub fn kmeans(points: &Array2<f64>, k: usize, seed: u64, restarts: usize) -> Result<KMeansResult> {
    let n = points.nrows();
    if k < 1 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    if restarts < 1 {
        return Err(Error::InvalidParameter(format!(
            "restarts = {restarts} must be at least 1"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<LloydOutcome> = None;
    for _ in 0..restarts {
        let seeds = kmeans_pp_init(points, k, &mut rng);
        let centroids: Vec<Vec<f64>> = seeds.iter().map(|&i| points.row(i).to_vec()).collect();
        let outcome = lloyd(points, centroids, k);
        if best.as_ref().map_or(true, |b| outcome.inertia < b.inertia) {
            best = Some(outcome);
        }
    }
    let best = best.expect("restarts >= 1");
    Ok(KMeansResult {
        partition: Partition::new(best.assignment, k)?,
        inertia: best.inertia,
    })
}
