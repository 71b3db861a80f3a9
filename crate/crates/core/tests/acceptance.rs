//! Acceptance suite: one test per release criterion, each printing a
//! `criterion NN PASS` line (visible with `--nocapture`).
//!
//! The checks pin the numeric guarantees the crate is built around:
//! uniform-shift spectral structure, shift-invariant repairs, the geometric
//! lift identity, cut-criterion correctness against brute-force oracles,
//! recovery on well-separated synthetic data, and end-to-end determinism.

use std::path::Path;
use std::time::Instant;

use nalgebra::DMatrix;
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use negspec::criteria;
use negspec::harness::{self, CellParams, CellStatus, GridCell, LoadedInput};
use negspec::kmeans::Partition;
use negspec::laplacian::{self, LaplacianKind};
use negspec::similarity::{self, SimilarityMatrix, Transform};
use negspec::spectral;
use negspec::vectorize::EmbeddingMatrix;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random symmetric zero-diagonal matrix with off-diagonal entries in
/// [lo, hi).
fn random_symmetric(n: usize, lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> SimilarityMatrix {
    let mut values = Array2::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            let v = rng.gen_range(lo..hi);
            values[[i, j]] = v;
            values[[j, i]] = v;
        }
    }
    SimilarityMatrix::from_values(values).unwrap()
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; reject u = 0 so the log stays finite
    loop {
        let u: f64 = rng.gen();
        if u > f64::MIN_POSITIVE {
            let v: f64 = rng.gen();
            return (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos();
        }
    }
}

fn random_unit_row(d: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let row: Vec<f64> = (0..d).map(|_| standard_normal(rng)).collect();
        let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return row.iter().map(|x| x / norm).collect();
        }
    }
}

fn embedding_from_rows(rows: &[Vec<f64>]) -> EmbeddingMatrix {
    let n = rows.len();
    let d = rows[0].len();
    let values = Array2::from_shape_fn((n, d), |(i, j)| rows[i][j]);
    let ids = (0..n).map(|i| format!("doc{i}")).collect();
    EmbeddingMatrix::new(ids, values).unwrap()
}

fn random_unit_embedding(n: usize, d: usize, rng: &mut ChaCha8Rng) -> EmbeddingMatrix {
    let rows: Vec<Vec<f64>> = (0..n).map(|_| random_unit_row(d, rng)).collect();
    embedding_from_rows(&rows)
}

fn to_dmatrix(a: &Array2<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

fn to_array(m: &DMatrix<f64>) -> Array2<f64> {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| m[(i, j)])
}

/// Orthonormal basis (n x (n-1)) of the subspace orthogonal to the all-ones
/// vector, taken from a QR factorization whose first column is all ones.
fn complement_of_ones(n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, 0)] = 1.0;
    }
    for j in 1..n {
        m[(j - 1, j)] = 1.0;
    }
    let q = m.qr().q();
    q.columns(1, n - 1).into_owned()
}

/// Largest principal angle between the column spans of two orthonormal
/// matrices of equal shape.
fn max_principal_angle(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let product = a.transpose() * b;
    let min_sigma = product
        .singular_values()
        .iter()
        .fold(f64::INFINITY, |acc, &s| acc.min(s));
    min_sigma.clamp(0.0, 1.0).acos()
}

/// Contiguous index groups of an ascending eigenvalue list, split where the
/// gap exceeds `tol`.
fn gap_groups(eigenvalues: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = vec![vec![0]];
    for i in 1..eigenvalues.len() {
        if eigenvalues[i] - eigenvalues[i - 1] <= tol {
            groups.last_mut().unwrap().push(i);
        } else {
            groups.push(vec![i]);
        }
    }
    groups
}

fn columns_of(coords: &Array2<f64>, indices: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(coords.nrows(), indices.len(), |i, j| coords[[i, indices[j]]])
}

/// Uniformly shifting all off-diagonal similarities by c moves every
/// non-constant eigenvalue of the combinatorial Laplacian up by c*n, keeps
/// the constant eigenvector at zero, and leaves eigenspaces unchanged.
#[test]
fn criterion_01_uniform_shift_moves_spectrum_by_cn() {
    let start = Instant::now();
    let mut rng = rng(0xAC01);
    let mut worst_eig: f64 = 0.0;
    let mut worst_angle: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.gen_range(5..=20);
        let s = random_symmetric(n, -1.0, 1.0, &mut rng);
        let l = to_dmatrix(&laplacian::combinatorial(&s).values);
        let q = complement_of_ones(n);
        let deflated = to_array(&(q.transpose() * &l * &q));
        let base = spectral::eig_smallest(&deflated, n - 1).unwrap();
        for &c in &[0.5, 1.0, 2.0] {
            let shifted = s.transform_add(c).unwrap();
            let lt = to_dmatrix(&laplacian::combinatorial(&shifted).values);
            // the all-ones vector stays an eigenvector with eigenvalue zero
            let ones = DMatrix::from_element(n, 1, 1.0);
            let residual = (&lt * &ones).norm();
            assert!(
                residual <= 1e-8 * lt.norm().max(1.0),
                "shifted Laplacian moved the constant eigenvector: residual {residual}"
            );
            // away from the constant vector the spectrum shifts by exactly c*n
            let deflated_shifted = to_array(&(q.transpose() * &lt * &q));
            let moved = spectral::eig_smallest(&deflated_shifted, n - 1).unwrap();
            let shift = c * n as f64;
            for i in 0..n - 1 {
                let diff = (moved.eigenvalues[i] - (base.eigenvalues[i] + shift)).abs();
                worst_eig = worst_eig.max(diff);
                assert!(
                    diff <= 1e-8,
                    "eigenvalue {i} off by {diff} (n = {n}, c = {c})"
                );
            }
            // eigenspaces, grouped by spectral gaps, stay aligned
            for group in gap_groups(&base.eigenvalues, 1e-5) {
                let va = columns_of(&base.coords, &group);
                let vb = columns_of(&moved.coords, &group);
                let angle = max_principal_angle(&va, &vb);
                worst_angle = worst_angle.max(angle);
                assert!(
                    angle <= 1e-6,
                    "eigenspace at indices {group:?} rotated by {angle} (n = {n}, c = {c})"
                );
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}, budget 10s");
    println!(
        "criterion 01 PASS: uniform shift moves the non-constant spectrum by c*n \
         (worst eigenvalue error {worst_eig:.2e}, worst principal angle {worst_angle:.2e}, {:.2}s)",
        elapsed.as_secs_f64()
    );
}

/// The exponential repair turns a shift by c into a constant factor, so the
/// normalized Laplacian it feeds is the same for every c.
#[test]
fn criterion_02_exp_repair_makes_normalized_laplacian_shift_free() {
    let start = Instant::now();
    let mut rng = rng(0xAC02);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.gen_range(4..=16);
        let s = random_symmetric(n, -1.0, 1.0, &mut rng);
        let reference = laplacian::normalized(&s.transform_exp(0.0).unwrap()).unwrap();
        for &c in &[1.0, 2.0, 3.0] {
            let lap = laplacian::normalized(&s.transform_exp(c).unwrap()).unwrap();
            for (a, b) in lap.values.iter().zip(reference.values.iter()) {
                let diff = (a - b).abs();
                worst = worst.max(diff);
                assert!(diff <= 1e-12, "entry moved by {diff} at c = {c}, n = {n}");
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}, budget 5s");
    println!(
        "criterion 02 PASS: exp repair's normalized Laplacian is identical across shifts \
         (worst entry difference {worst:.2e}, {:.2}s)",
        elapsed.as_secs_f64()
    );
}

/// Appending a constant coordinate b to unit vectors maps the cosine of any
/// pair to (cos + b^2) / (1 + b^2).
#[test]
fn criterion_03_lift_identity_on_random_unit_pairs() {
    let mut rng = rng(0xAC03);
    let mut worst: f64 = 0.0;
    for &d in &[2usize, 5, 50] {
        for _ in 0..1000 {
            let u = random_unit_row(d, &mut rng);
            let v = random_unit_row(d, &mut rng);
            let cos_raw: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
            let emb = embedding_from_rows(&[u.clone(), v.clone()]);
            for &b in &[0.0, 0.5, 1.0, 2.0] {
                let lifted = similarity::lift_embedding(&emb, b).unwrap();
                let s = similarity::cosine_similarity(&lifted).unwrap();
                let expected = (cos_raw + b * b) / (1.0 + b * b);
                let diff = (s.values()[[0, 1]] - expected).abs();
                worst = worst.max(diff);
                assert!(diff <= 1e-10, "lift identity off by {diff} (d = {d}, b = {b})");
            }
        }
    }
    println!(
        "criterion 03 PASS: lifted cosine equals (cos + b^2)/(1 + b^2) on 3000 random pairs \
         (worst error {worst:.2e})"
    );
}

/// Lifting an embedding by b and taking cosines equals the add-and-normalize
/// repair with c = b^2 applied to the original cosines.
#[test]
fn criterion_04_lift_equals_add_norm_repair() {
    let mut rng = rng(0xAC04);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let n = rng.gen_range(3..=8);
        let d = rng.gen_range(2..=6);
        let emb = random_unit_embedding(n, d, &mut rng);
        let s = similarity::cosine_similarity(&emb).unwrap();
        for &b in &[0.0, 0.5, 1.0, 2.0] {
            let lifted = similarity::lift_embedding(&emb, b).unwrap();
            let via_lift = similarity::cosine_similarity(&lifted).unwrap();
            let via_repair = s.transform_add_norm(b * b).unwrap();
            for (x, y) in via_lift.values().iter().zip(via_repair.values().iter()) {
                let diff = (x - y).abs();
                worst = worst.max(diff);
                assert!(diff <= 1e-10, "entry off by {diff} (n = {n}, b = {b})");
            }
        }
    }
    println!(
        "criterion 04 PASS: lifted cosines match the add-and-normalize repair with c = b^2 \
         (worst entry error {worst:.2e})"
    );
}

/// One-dimensional embeddings (p rows at +1, q at -1) give a similarity
/// total of exactly (p - q)^2 - n, with minimum -n at p = q.
#[test]
fn criterion_05_one_dimensional_worst_case_total() {
    let mut worst: f64 = 0.0;
    for n in 1..=12usize {
        let mut totals = Vec::new();
        for p in 0..=n {
            let q = n - p;
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|i| vec![if i < p { 1.0 } else { -1.0 }])
                .collect();
            let emb = embedding_from_rows(&rows);
            let s = similarity::cosine_similarity(&emb).unwrap();
            let total: f64 = s.values().sum();
            let expected = (p as f64 - q as f64).powi(2) - n as f64;
            let diff = (total - expected).abs();
            worst = worst.max(diff);
            assert!(diff <= 1e-9, "total off by {diff} at n = {n}, p = {p}");
            totals.push(total);
        }
        if n % 2 == 0 {
            let min = totals.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(
                (min - (-(n as f64))).abs() <= 1e-9,
                "minimum total at n = {n} is {min}, expected {}",
                -(n as f64)
            );
            assert!(
                (totals[n / 2] - min).abs() <= 1e-9,
                "minimum not attained at the balanced split for n = {n}"
            );
        }
    }
    println!(
        "criterion 05 PASS: one-dimensional similarity totals equal (p - q)^2 - n for all n <= 12 \
         (worst error {worst:.2e}), minimum -n at the balanced split"
    );
}

fn oracle_rcut_ncut(values: &Array2<f64>, assignment: &[usize], k: usize) -> (f64, f64) {
    let n = assignment.len();
    let mut rcut_total = 0.0;
    let mut ncut_total = 0.0;
    for j in 0..k {
        let mut cut = 0.0;
        let mut volume = 0.0;
        let mut cardinality = 0usize;
        for i in 0..n {
            if assignment[i] != j {
                continue;
            }
            cardinality += 1;
            for l in 0..n {
                volume += values[[i, l]];
                if assignment[l] != j {
                    cut += values[[i, l]];
                }
            }
        }
        rcut_total += cut / cardinality as f64;
        ncut_total += cut / volume;
    }
    (rcut_total, ncut_total)
}

/// RCut and NCut agree with an independent brute-force double sum, and the
/// 4-node worked example comes out at the hand-derived values.
#[test]
fn criterion_06_cut_criteria_match_brute_force_oracle() {
    let mut rng = rng(0xAC06);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.gen_range(2..=10);
        let s = random_symmetric(n, 0.05, 1.0, &mut rng);
        let k = rng.gen_range(1..=n.min(3));
        let mut assignment: Vec<usize> = (0..n).map(|i| {
            if i < k {
                i
            } else {
                rng.gen_range(0..k)
            }
        }).collect();
        // shuffle so the pinned prefix is not a structural giveaway
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            assignment.swap(i, j);
        }
        let partition = Partition::new(assignment.clone(), k).unwrap();
        let (oracle_rcut, oracle_ncut) = oracle_rcut_ncut(s.values(), &assignment, k);
        let rcut = criteria::rcut(&s, &partition).unwrap();
        let ncut = criteria::ncut(&s, &partition).unwrap();
        let rcut_diff = (rcut - oracle_rcut).abs();
        let ncut_diff = (ncut - oracle_ncut).abs();
        worst = worst.max(rcut_diff).max(ncut_diff);
        assert!(rcut_diff <= 1e-10, "rcut off by {rcut_diff} (n = {n}, k = {k})");
        assert!(ncut_diff <= 1e-10, "ncut off by {ncut_diff} (n = {n}, k = {k})");
    }

    // worked example: two tight pairs with weak cross links
    let mut values = Array2::zeros((4, 4));
    for (i, j, v) in [(0, 1, 1.0), (2, 3, 1.0), (0, 2, 0.1), (0, 3, 0.1), (1, 2, 0.1), (1, 3, 0.1)] {
        values[[i, j]] = v;
        values[[j, i]] = v;
    }
    let s = SimilarityMatrix::from_values(values).unwrap();
    let partition = Partition::new(vec![0, 0, 1, 1], 2).unwrap();
    let rcut = criteria::rcut(&s, &partition).unwrap();
    let ncut = criteria::ncut(&s, &partition).unwrap();
    assert!((rcut - 0.4).abs() <= 1e-12, "worked example RCut = {rcut}, expected 0.4");
    assert!(
        (ncut - 1.0 / 3.0).abs() <= 1e-12,
        "worked example NCut = {ncut}, expected 1/3"
    );
    println!(
        "criterion 06 PASS: rcut/ncut match the brute-force oracle on 200 instances \
         (worst error {worst:.2e}); worked example gives RCut 0.4 and NCut 1/3"
    );
}

fn balanced_two_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut partitions = Vec::new();
    for mask in 0u32..(1 << n) {
        // fixing document 0 in cluster 0 de-duplicates mirrored partitions
        if mask.count_ones() as usize != n / 2 || mask & 1 == 0 {
            continue;
        }
        let assignment = (0..n)
            .map(|i| if mask >> i & 1 == 1 { 0 } else { 1 })
            .collect();
        partitions.push(assignment);
    }
    partitions
}

/// Shifting all similarities by c changes every balanced 2-partition's RCut
/// by the same constant, so the argmin is untouched.
#[test]
fn criterion_07_rcut_argmin_survives_uniform_shift() {
    let mut rng = rng(0xAC07);
    for &n in &[4usize, 6, 8] {
        let partitions = balanced_two_partitions(n);
        for _ in 0..10 {
            let s = random_symmetric(n, -1.0, 1.0, &mut rng);
            let raw: Vec<f64> = partitions
                .iter()
                .map(|a| criteria::rcut(&s, &Partition::new(a.clone(), 2).unwrap()).unwrap())
                .collect();
            let argmin_raw = (0..raw.len())
                .min_by(|&a, &b| raw[a].total_cmp(&raw[b]))
                .unwrap();
            for &c in &[1.0, 2.0] {
                let shifted_s = s.transform_add(c).unwrap();
                let shifted: Vec<f64> = partitions
                    .iter()
                    .map(|a| {
                        criteria::rcut(&shifted_s, &Partition::new(a.clone(), 2).unwrap()).unwrap()
                    })
                    .collect();
                // every balanced partition moves by exactly c*n
                for (r, t) in raw.iter().zip(shifted.iter()) {
                    assert!(
                        (t - r - c * n as f64).abs() <= 1e-9,
                        "balanced RCut shift is not uniform (n = {n}, c = {c})"
                    );
                }
                let argmin_shifted = (0..shifted.len())
                    .min_by(|&a, &b| shifted[a].total_cmp(&shifted[b]))
                    .unwrap();
                assert_eq!(
                    argmin_raw, argmin_shifted,
                    "RCut argmin moved under shift (n = {n}, c = {c})"
                );
            }
        }
    }
    println!(
        "criterion 07 PASS: the RCut-minimizing balanced 2-partition is unchanged by uniform \
         shifts for n in {{4, 6, 8}}, c in {{1, 2}}"
    );
}

/// The signed Laplacian is positive semi-definite no matter how negative the
/// similarities are.
#[test]
fn criterion_08_signed_laplacian_is_positive_semidefinite() {
    let mut rng = rng(0xAC08);
    let mut smallest = f64::INFINITY;
    for _ in 0..200 {
        let n = rng.gen_range(2..=30);
        let s = random_symmetric(n, -1.0, 1.0, &mut rng);
        let lap = laplacian::signed(&s);
        let min_eig = spectral::eig_smallest(&lap.values, 1).unwrap().eigenvalues[0];
        smallest = smallest.min(min_eig);
        assert!(
            min_eig >= -1e-8,
            "signed Laplacian has eigenvalue {min_eig} at n = {n}"
        );
    }
    println!(
        "criterion 08 PASS: smallest signed-Laplacian eigenvalue over 200 instances is \
         {smallest:.2e} (>= -1e-8)"
    );
}

/// One document nearly opposing a tight group has a negative degree: the
/// normalized-Laplacian pipeline must report that as a status at c = 0 and
/// succeed once a repair neutralizes it.
#[test]
fn criterion_09_negative_degree_turns_into_status_not_crash() {
    let angle = 175f64.to_radians();
    let rows = vec![
        vec![1.0, 0.0],
        vec![angle.cos(), angle.sin()],
        vec![angle.cos(), angle.sin()],
        vec![angle.cos(), angle.sin()],
    ];
    let emb = embedding_from_rows(&rows);
    let s = similarity::cosine_similarity(&emb).unwrap();
    assert!(
        s.degrees()[0] < 0.0,
        "test data must have a negative degree, got {}",
        s.degrees()[0]
    );
    let input = LoadedInput {
        embedding_tag: "precomputed".into(),
        similarity: s,
        labels: None,
    };
    let run = |transform: Transform, c: f64| {
        let cell = GridCell {
            transform,
            c,
            laplacian: LaplacianKind::Normalized,
        };
        let params = CellParams {
            k: 2,
            runs: 3,
            base_seed: 0,
            restarts: 3,
            cell_index: 0,
        };
        harness::run_cell(&input, &cell, &params).unwrap().status
    };
    // unrepaired (c = 0) the degree stays negative and the cell fails as data
    assert_eq!(run(Transform::Add, 0.0), CellStatus::NegativeDegreeError);
    assert_eq!(run(Transform::AddNorm, 0.0), CellStatus::NegativeDegreeError);
    assert_eq!(run(Transform::AngleDiv, 0.0), CellStatus::NegativeDegreeError);
    // each repair fills the cell in
    assert_eq!(run(Transform::Add, 1.0), CellStatus::Ok);
    assert_eq!(run(Transform::AddNorm, 1.0), CellStatus::Ok);
    assert_eq!(run(Transform::AngleDiv, 1.0), CellStatus::Ok);
    assert_eq!(run(Transform::Exp, 0.0), CellStatus::Ok);
    assert_eq!(run(Transform::Exp, 1.0), CellStatus::Ok);

    // the same shows up in experiment rows
    let dir = tempfile::tempdir().unwrap();
    let emb_path = dir.path().join("emb.csv");
    let mut text = String::from("id,d0,d1\n");
    for (i, row) in rows.iter().enumerate() {
        text.push_str(&format!("doc{i},{},{}\n", row[0], row[1]));
    }
    std::fs::write(&emb_path, text).unwrap();
    let spec = harness::ExperimentSpec {
        input: emb_path,
        labels: None,
        word_vectors: None,
        vectorizer: harness::Vectorizer::default(),
        transforms: vec![
            Transform::Add,
            Transform::AddNorm,
            Transform::AngleDiv,
            Transform::Exp,
        ],
        c_values: vec![0.0, 1.0],
        laplacians: vec![LaplacianKind::Normalized],
        k: 2,
        runs: 3,
        base_seed: 0,
        restarts: 3,
        workers: None,
    };
    let results = harness::run_experiment(&spec).unwrap();
    for row in &results {
        let expected = if row.c == 0.0 && row.transform != Transform::Exp {
            CellStatus::NegativeDegreeError
        } else {
            CellStatus::Ok
        };
        assert_eq!(
            row.status, expected,
            "unexpected status for ({}, c = {})",
            row.transform, row.c
        );
        assert_eq!(row.criteria.is_some(), expected == CellStatus::Ok);
    }
    println!(
        "criterion 09 PASS: negative degree reports status=negative_degree_error at c = 0 and \
         status=ok under add/add_norm/angle_div(c=1)/exp"
    );
}

/// Three well-separated Gaussian blobs are recovered nearly perfectly by the
/// full pipeline with an add repair at c = 1.
#[test]
fn criterion_10_recovers_well_separated_gaussian_blobs() {
    let start = Instant::now();
    let mut rng = rng(0xAC10);
    let per_blob = 100;
    let dims = 5;
    let mut rows = Vec::with_capacity(3 * per_blob);
    let mut labels = Vec::with_capacity(3 * per_blob);
    for blob in 0..3usize {
        for _ in 0..per_blob {
            // centers 10 * e_blob, noise sigma 1: separation 10 * sqrt(2) > 6 sigma
            let row: Vec<f64> = (0..dims)
                .map(|j| if j == blob { 10.0 } else { 0.0 } + standard_normal(&mut rng))
                .collect();
            rows.push(row);
            labels.push(blob);
        }
    }
    let emb = embedding_from_rows(&rows);
    let input = LoadedInput {
        embedding_tag: "blobs".into(),
        similarity: similarity::cosine_similarity(&emb).unwrap(),
        labels: Some(labels),
    };
    let mut summary = Vec::new();
    for kind in [LaplacianKind::Combinatorial, LaplacianKind::Normalized] {
        let cell = GridCell {
            transform: Transform::Add,
            c: 1.0,
            laplacian: kind,
        };
        let params = CellParams {
            k: 3,
            runs: 30,
            base_seed: 0,
            restarts: 10,
            cell_index: 0,
        };
        let result = harness::run_cell(&input, &cell, &params).unwrap();
        assert_eq!(result.status, CellStatus::Ok);
        let scores = result.f_pairwise.unwrap();
        assert!(
            scores.mean >= 0.9,
            "{kind:?}: pairwise F mean {} below 0.9",
            scores.mean
        );
        assert!(
            scores.sd <= 0.05,
            "{kind:?}: pairwise F sd {} above 0.05",
            scores.sd
        );
        summary.push(format!("{}: mean {:.4} sd {:.4}", kind, scores.mean, scores.sd));
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}, budget 60s");
    println!(
        "criterion 10 PASS: 3 Gaussian blobs recovered over 30 runs ({}; {:.2}s)",
        summary.join("; "),
        elapsed.as_secs_f64()
    );
}

/// Diagonal-shift normalization preserves the similarity ordering whenever
/// the premises hold: s_ik > s_il, degree of k below (n-1) s_ik, degree of
/// l above (n-1) s_il.
#[test]
fn criterion_11_diagonal_shift_preserves_ordering() {
    let mut rng = rng(0xAC11);
    let x_values = [0.0, 0.5, 1.0, 5.0];
    let mut tested = 0usize;
    let mut violations = 0usize;
    'outer: for _ in 0..100_000 {
        let n = rng.gen_range(5..=12);
        let s = random_symmetric(n, 0.01, 1.0, &mut rng);
        let degrees = s.degrees();
        let repaired: Vec<Array2<f64>> = x_values
            .iter()
            .map(|&x| laplacian::diag_shift_similarity(&s, x).unwrap())
            .collect();
        let denom = (n - 1) as f64;
        for i in 0..n {
            for k in 0..n {
                for l in 0..n {
                    if i == k || i == l || k == l {
                        continue;
                    }
                    let sik = s.values()[[i, k]];
                    let sil = s.values()[[i, l]];
                    if !(sik > sil && degrees[k] / denom < sik && degrees[l] / denom > sil) {
                        continue;
                    }
                    tested += 1;
                    for r in &repaired {
                        if r[[i, k]] <= r[[i, l]] {
                            violations += 1;
                        }
                    }
                    if tested == 10_000 {
                        break 'outer;
                    }
                }
            }
        }
    }
    assert_eq!(tested, 10_000, "did not reach 10000 premise-satisfying triples");
    assert_eq!(violations, 0, "{violations} ordering violations");
    println!(
        "criterion 11 PASS: similarity ordering preserved on 10000 premise-satisfying triples \
         for x in {{0, 0.5, 1, 5}}, zero violations"
    );
}

/// Two executions of the experiment binary on the same config write
/// byte-identical CSVs.
#[test]
fn criterion_12_experiment_binary_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = rng(0xAC12);
    let mut emb = String::from("id,d0,d1,d2\n");
    let mut labels = String::from("id,label\n");
    for i in 0..20 {
        let group = i / 10;
        let mut row = vec![0.0; 3];
        for (j, value) in row.iter_mut().enumerate() {
            *value = if j == group { 5.0 } else { 0.0 } + standard_normal(&mut rng);
        }
        emb.push_str(&format!("doc{i},{},{},{}\n", row[0], row[1], row[2]));
        labels.push_str(&format!("doc{i},g{group}\n"));
    }
    std::fs::write(dir.path().join("emb.csv"), emb).unwrap();
    std::fs::write(dir.path().join("labels.csv"), labels).unwrap();
    std::fs::write(
        dir.path().join("exp.conf"),
        "input = emb.csv\n\
         labels = labels.csv\n\
         transforms = add, add_norm, exp\n\
         c_values = 0, 1\n\
         laplacians = combinatorial, normalized\n\
         k = 2\n\
         runs = 5\n\
         restarts = 3\n\
         base_seed = 42\n\
         workers = 2\n",
    )
    .unwrap();

    let run = |out: &Path| {
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_negspec"))
            .arg("experiment")
            .arg("--config")
            .arg(dir.path().join("exp.conf"))
            .arg("--out")
            .arg(out)
            .stdout(std::process::Stdio::null())
            .status()
            .unwrap();
        assert!(status.success(), "experiment run failed: {status}");
    };
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    run(&out_a);
    run(&out_b);
    let bytes_a = std::fs::read(&out_a).unwrap();
    let bytes_b = std::fs::read(&out_b).unwrap();
    assert_eq!(bytes_a, bytes_b, "reruns differ");
    let text = String::from_utf8(bytes_a).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        harness::RESULT_HEADER.join(","),
        "unexpected header"
    );
    assert_eq!(lines.count(), 12, "expected one row per grid cell");
    println!("criterion 12 PASS: two experiment executions wrote byte-identical CSVs");
}
