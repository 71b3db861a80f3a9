//! Graph-cut quality criteria for a clustered similarity matrix.
//!
//! Cut counts the similarity mass leaving each cluster; RCut divides by
//! cardinality, NCut by volume (summed member degrees), and NRCut by the
//! reinforced volume (volume plus cardinality, the volume of the graph with
//! unit self-loops). Volumes can go negative on graphs with negative
//! similarities, in which case the volume-normalized criteria refuse to
//! produce a number.

use crate::error::{Error, Result};
use crate::kmeans::Partition;
use crate::similarity::SimilarityMatrix;

/// Everything the criteria say about one partition of one graph.
#[derive(Debug, Clone)]
pub struct CutReport {
    /// Similarity mass crossing out of each cluster.
    pub per_cluster_cut: Vec<f64>,
    /// Summed member degrees per cluster.
    pub volumes: Vec<f64>,
    /// Volumes plus cardinalities.
    pub reinforced_volumes: Vec<f64>,
    pub rcut: f64,
    pub ncut: f64,
    pub nrcut: f64,
}

fn check_sizes(s: &SimilarityMatrix, partition: &Partition) -> Result<()> {
    if s.n() != partition.len() {
        return Err(Error::LengthMismatch {
            left: s.n(),
            right: partition.len(),
        });
    }
    Ok(())
}

/// Total similarity between cluster j and the rest of the graph.
pub fn cut(s: &SimilarityMatrix, partition: &Partition, j: usize) -> Result<f64> {
    check_sizes(s, partition)?;
    if j >= partition.k() {
        return Err(Error::InvalidParameter(format!(
            "cluster index {j} out of range for k = {}",
            partition.k()
        )));
    }
    let assignment = partition.assignment();
    let values = s.values();
    let mut total = 0.0;
    for i in 0..s.n() {
        if assignment[i] != j {
            continue;
        }
        for l in 0..s.n() {
            if assignment[l] != j {
                total += values[[i, l]];
            }
        }
    }
    Ok(total)
}

fn per_cluster_cuts(s: &SimilarityMatrix, partition: &Partition) -> Result<Vec<f64>> {
    check_sizes(s, partition)?;
    if let Some(empty) = partition.cardinalities().iter().position(|&c| c == 0) {
        return Err(Error::EmptyCluster { cluster: empty });
    }
    (0..partition.k()).map(|j| cut(s, partition, j)).collect()
}

/// Ratio cut: sum of per-cluster cuts divided by cluster cardinalities.
pub fn rcut(s: &SimilarityMatrix, partition: &Partition) -> Result<f64> {
    let cuts = per_cluster_cuts(s, partition)?;
    let counts = partition.cardinalities();
    Ok(cuts
        .iter()
        .zip(&counts)
        .map(|(cut, &card)| cut / card as f64)
        .sum())
}

fn cluster_volumes(s: &SimilarityMatrix, partition: &Partition) -> Vec<f64> {
    let degrees = s.degrees();
    let mut volumes = vec![0.0; partition.k()];
    for (i, &c) in partition.assignment().iter().enumerate() {
        volumes[c] += degrees[i];
    }
    volumes
}

fn checked_ratio_sum(cuts: &[f64], volumes: &[f64]) -> Result<f64> {
    for (cluster, &volume) in volumes.iter().enumerate() {
        if volume <= 0.0 {
            return Err(Error::NegativeVolume { cluster, volume });
        }
    }
    Ok(cuts
        .iter()
        .zip(volumes)
        .map(|(cut, volume)| cut / volume)
        .sum())
}

/// Normalized cut: per-cluster cuts divided by cluster volumes. Every
/// volume must be strictly positive.
pub fn ncut(s: &SimilarityMatrix, partition: &Partition) -> Result<f64> {
    let cuts = per_cluster_cuts(s, partition)?;
    let volumes = cluster_volumes(s, partition);
    checked_ratio_sum(&cuts, &volumes)
}

/// Reinforced normalized cut: like NCut but with cluster cardinality added
/// to each volume, the volume the cluster has once every node carries a unit
/// self-loop.
pub fn nrcut(s: &SimilarityMatrix, partition: &Partition) -> Result<f64> {
    let cuts = per_cluster_cuts(s, partition)?;
    let counts = partition.cardinalities();
    let volumes: Vec<f64> = cluster_volumes(s, partition)
        .iter()
        .zip(&counts)
        .map(|(v, &c)| v + c as f64)
        .collect();
    checked_ratio_sum(&cuts, &volumes)
}

/// All three criteria plus their ingredients in one pass. Fails if any
/// cluster is empty or any (reinforced) volume is non-positive.
pub fn evaluate(s: &SimilarityMatrix, partition: &Partition) -> Result<CutReport> {
    let per_cluster_cut = per_cluster_cuts(s, partition)?;
    let counts = partition.cardinalities();
    let volumes = cluster_volumes(s, partition);
    let reinforced_volumes: Vec<f64> = volumes
        .iter()
        .zip(&counts)
        .map(|(v, &c)| v + c as f64)
        .collect();
    let rcut = per_cluster_cut
        .iter()
        .zip(&counts)
        .map(|(cut, &card)| cut / card as f64)
        .sum();
    let ncut = checked_ratio_sum(&per_cluster_cut, &volumes)?;
    let nrcut = checked_ratio_sum(&per_cluster_cut, &reinforced_volumes)?;
    Ok(CutReport {
        per_cluster_cut,
        volumes,
        reinforced_volumes,
        rcut,
        ncut,
        nrcut,
    })
}
