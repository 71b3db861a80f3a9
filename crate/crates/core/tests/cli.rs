//! End-to-end checks of the command-line interface: routing, output files,
//! and exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn negspec(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_negspec"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

/// Corpus whose two topics share no vocabulary at all, so cross-topic
/// cosines are exactly zero and clustering is unambiguous.
fn disjoint_corpus(dir: &Path) {
    std::fs::write(
        dir.join("corpus.csv"),
        "id,text,label\n\
         f1,apple banana cherry,fruit\n\
         f2,banana cherry apple apple,fruit\n\
         f3,cherry apple banana banana,fruit\n\
         m1,copper iron zinc,metal\n\
         m2,iron zinc copper copper,metal\n\
         m3,zinc copper iron iron,metal\n",
    )
    .unwrap();
}

#[test]
fn stats_reports_clean_corpus() {
    let dir = tempfile::tempdir().unwrap();
    disjoint_corpus(dir.path());
    let out = negspec(&["stats", "--input", "corpus.csv"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("documents: 6"), "{text}");
    // term-vector cosines are never negative
    assert!(text.contains("negative similarity entries: 0"), "{text}");
    assert!(text.contains("negative degrees: 0"), "{text}");
}

#[test]
fn stats_counts_negative_entries_of_embeddings() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("emb.csv"),
        "id,d0,d1\na,1.0,0.0\nb,-1.0,0.0\nc,0.0,1.0\n",
    )
    .unwrap();
    let out = negspec(&["stats", "--input", "emb.csv"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("negative similarity entries: 2"), "{text}");
    assert!(text.contains("min similarity: -1"), "{text}");
}

#[test]
fn cluster_recovers_disjoint_topics_from_corpus() {
    let dir = tempfile::tempdir().unwrap();
    disjoint_corpus(dir.path());
    let out = negspec(
        &[
            "cluster",
            "--input",
            "corpus.csv",
            "--transform",
            "zero",
            "--laplacian",
            "combinatorial",
            "--k",
            "2",
            "--runs",
            "3",
            "--restarts",
            "3",
            "--out",
            "row.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("status: ok"), "{text}");
    assert!(text.contains("f_pairwise: 1 (sd 0)"), "{text}");

    let csv = std::fs::read_to_string(dir.path().join("row.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "embedding,transform,c,laplacian,k,runs,f_pairwise_mean,f_pairwise_sd,\
         f_matched_mean,f_matched_sd,rcut,ncut,nrcut,status"
            .replace(" ", ""),
    );
    let row = lines.next().unwrap();
    assert!(row.starts_with("tfidf,zero,0,combinatorial,2,3,1,0,1,0,"), "{row}");
    assert!(row.ends_with(",ok"), "{row}");
    assert!(lines.next().is_none());
}

#[test]
fn cluster_embeds_corpus_through_word_vectors() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("corpus.csv"),
        "id,text,label\n\
         a1,hot warm,warm\n\
         a2,warm hot hot,warm\n\
         b1,cold chilly,cold\n\
         b2,chilly cold cold,cold\n",
    )
    .unwrap();
    std::fs::write(
        dir.path().join("vectors.txt"),
        "hot 1.0 0.1\nwarm 0.9 0.2\ncold -0.9 0.3\nchilly -1.0 0.2\n",
    )
    .unwrap();
    // opposite word directions make raw degrees negative: stats shows it,
    // and an add repair lets the normalized pipeline run anyway
    let out = negspec(
        &["stats", "--input", "corpus.csv", "--word-vectors", "vectors.txt"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("negative similarity entries: 8"), "{}", stdout(&out));

    let out = negspec(
        &[
            "cluster",
            "--input",
            "corpus.csv",
            "--word-vectors",
            "vectors.txt",
            "--transform",
            "add",
            "--c",
            "1",
            "--laplacian",
            "normalized",
            "--k",
            "2",
            "--runs",
            "3",
            "--restarts",
            "3",
            "--out",
            "row.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("row.csv")).unwrap();
    let row = csv.lines().nth(1).unwrap();
    assert!(row.starts_with("wordvec,add,1,normalized,2,3,1,0,1,0,"), "{row}");
}

#[test]
fn experiment_honors_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    disjoint_corpus(dir.path());
    std::fs::write(
        dir.path().join("exp.conf"),
        "input = corpus.csv\n\
         transforms = zero, add\n\
         c_values = 0, 1\n\
         laplacians = combinatorial\n\
         k = 2\n\
         runs = 9\n\
         restarts = 3\n",
    )
    .unwrap();
    let out = negspec(
        &[
            "experiment",
            "--config",
            "exp.conf",
            "--out",
            "grid.csv",
            "--runs",
            "2",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("grid.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    for row in rows {
        // the --runs 2 flag beats the runs = 9 in the file
        assert_eq!(row.split(',').nth(5).unwrap(), "2", "{row}");
    }
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    disjoint_corpus(dir.path());
    std::fs::write(dir.path().join("bad.conf"), "input = corpus.csv\nwarp = 1\n").unwrap();
    let out = negspec(
        &["experiment", "--config", "bad.conf", "--out", "grid.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("unknown config key"), "{}", stderr(&out));

    let out = negspec(
        &[
            "cluster",
            "--input",
            "corpus.csv",
            "--transform",
            "warp",
            "--laplacian",
            "combinatorial",
            "--k",
            "2",
            "--out",
            "row.csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("unknown transform"), "{}", stderr(&out));
}

#[test]
fn missing_input_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = negspec(&["stats", "--input", "nowhere.csv"], dir.path());
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}
