//! Experiment harness: run transform x c x laplacian grids over one input
//! and report per-cell scores as CSV rows.
//!
//! A cell fails as data, not as a crash: negative degrees or cluster volumes
//! produce a row with a status tag and empty score fields, and the run
//! carries on. Everything is deterministic for a fixed config: grid cells
//! are enumerated in config order, per-run seeds derive from the base seed,
//! the run index and the cell index, and rows are written in grid order no
//! matter how many workers computed them.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::criteria;
use crate::error::{Error, Result};
use crate::kmeans;
use crate::laplacian::{self, LaplacianKind};
use crate::metrics::{self, RunScores};
use crate::similarity::{self, NegativityReport, SimilarityMatrix, Transform};
use crate::spectral;
use crate::vectorize::{self, EmbeddingMatrix};

/// Column order of every result CSV this crate writes.
pub const RESULT_HEADER: [&str; 14] = [
    "embedding",
    "transform",
    "c",
    "laplacian",
    "k",
    "runs",
    "f_pairwise_mean",
    "f_pairwise_sd",
    "f_matched_mean",
    "f_matched_sd",
    "rcut",
    "ncut",
    "nrcut",
    "status",
];

/// How one grid cell ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellStatus {
    Ok,
    /// The chosen Laplacian needed positive degrees and did not get them.
    NegativeDegreeError,
    /// A cluster volume came out non-positive while scoring cut criteria.
    NegativeVolumeError,
}

impl CellStatus {
    pub fn name(&self) -> &'static str {
        match self {
            CellStatus::Ok => "ok",
            CellStatus::NegativeDegreeError => "negative_degree_error",
            CellStatus::NegativeVolumeError => "negative_volume_error",
        }
    }
}

impl fmt::Display for CellStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One row of an experiment: the cell coordinates plus its outcome.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub embedding: String,
    pub transform: Transform,
    pub c: f64,
    pub laplacian: LaplacianKind,
    pub k: usize,
    pub runs: usize,
    pub f_pairwise: Option<RunScores>,
    pub f_matched: Option<RunScores>,
    /// (rcut, ncut, nrcut) of the lowest-inertia run.
    pub criteria: Option<(f64, f64, f64)>,
    pub status: CellStatus,
}

/// Bag-of-words weighting used when the input is a raw corpus without word
/// vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Vectorizer {
    Count,
    Tf,
    #[default]
    Tfidf,
}

impl Vectorizer {
    pub fn name(&self) -> &'static str {
        match self {
            Vectorizer::Count => "count",
            Vectorizer::Tf => "tf",
            Vectorizer::Tfidf => "tfidf",
        }
    }
}

impl FromStr for Vectorizer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "count" => Ok(Vectorizer::Count),
            "tf" => Ok(Vectorizer::Tf),
            "tfidf" => Ok(Vectorizer::Tfidf),
            other => Err(Error::Config(format!(
                "unknown vectorizer {other:?} (expected count, tf or tfidf)"
            ))),
        }
    }
}

/// A fully resolved experiment description: inputs, grid axes, clustering
/// parameters.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub input: PathBuf,
    pub labels: Option<PathBuf>,
    pub word_vectors: Option<PathBuf>,
    pub vectorizer: Vectorizer,
    pub transforms: Vec<Transform>,
    pub c_values: Vec<f64>,
    pub laplacians: Vec<LaplacianKind>,
    pub k: usize,
    pub runs: usize,
    pub base_seed: u64,
    pub restarts: usize,
    /// Worker threads for grid cells; None uses the global thread pool.
    pub workers: Option<usize>,
}

/// One grid coordinate.
#[derive(Debug, Clone, Copy)]
pub struct GridCell {
    pub transform: Transform,
    pub c: f64,
    pub laplacian: LaplacianKind,
}

/// Clustering parameters shared by every run of one cell.
#[derive(Debug, Clone, Copy)]
pub struct CellParams {
    pub k: usize,
    pub runs: usize,
    pub base_seed: u64,
    pub restarts: usize,
    /// Position of the cell in grid enumeration order; folded into seeds.
    pub cell_index: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for run `run_index` of cell `cell_index`:
/// `(base_seed + run_index) XOR splitmix64(cell_index + 1)`.
///
/// The base seed plus the run index gives each run its own seed; mixing the
/// cell index through splitmix64 keeps the RNG streams of different cells
/// disjoint even though their run indices coincide.
pub fn derive_seed(base_seed: u64, cell_index: u64, run_index: u64) -> u64 {
    base_seed.wrapping_add(run_index) ^ splitmix64(cell_index.wrapping_add(1))
}

/// What kind of file an input path points at, judged by its first line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputKind {
    /// Header `id,text[,label]`.
    Corpus,
    /// Header `id,d0,d1,...`.
    Embedding,
    /// Headerless numeric grid.
    Similarity,
}

pub fn detect_input_kind(path: &Path) -> Result<InputKind> {
    let display = path.display().to_string();
    let content = std::fs::read_to_string(path)?;
    let first = content.lines().next().ok_or_else(|| Error::Malformed {
        path: display.clone(),
        msg: "empty file".into(),
    })?;
    let fields: Vec<&str> = first.split(',').map(str::trim).collect();
    if fields.first() == Some(&"id") {
        return match fields.get(1) {
            Some(&"text") => Ok(InputKind::Corpus),
            Some(&"d0") => Ok(InputKind::Embedding),
            _ => Err(Error::Malformed {
                path: display,
                msg: format!("unrecognized header: {first}"),
            }),
        };
    }
    if !fields.is_empty() && fields.iter().all(|f| f.parse::<f64>().is_ok()) {
        return Ok(InputKind::Similarity);
    }
    Err(Error::Malformed {
        path: display,
        msg: format!("unrecognized first line: {first}"),
    })
}

/// A loaded input reduced to what the grid needs: a tag for the embedding
/// route, the raw similarity matrix, and dense truth labels when available.
#[derive(Debug, Clone)]
pub struct LoadedInput {
    pub embedding_tag: String,
    pub similarity: SimilarityMatrix,
    pub labels: Option<Vec<usize>>,
}

/// Load a corpus, embedding or similarity input and reduce it to a raw
/// cosine similarity matrix plus labels.
///
/// Corpus inputs are vectorized with `vectorizer`, or embedded through
/// `word_vectors` when given. A separate labels file takes precedence over
/// a corpus label column. Similarity inputs carry no document ids, so they
/// cannot be combined with labels.
pub fn load_input(
    input: &Path,
    labels_path: Option<&Path>,
    word_vectors: Option<&Path>,
    vectorizer: Vectorizer,
) -> Result<LoadedInput> {
    let kind = detect_input_kind(input)?;
    let (tag, embedding, corpus_labels): (String, EmbeddingMatrix, Option<Vec<String>>) = match kind
    {
        InputKind::Similarity => {
            if labels_path.is_some() {
                return Err(Error::Config(
                    "labels cannot be joined to a similarity-matrix input (its rows carry no ids)"
                        .into(),
                ));
            }
            let similarity = similarity::load_similarity_csv(input)?;
            return Ok(LoadedInput {
                embedding_tag: "similarity".into(),
                similarity,
                labels: None,
            });
        }
        InputKind::Embedding => {
            let embedding = vectorize::load_embedding_csv(input)?;
            ("precomputed".into(), embedding, None)
        }
        InputKind::Corpus => {
            let corpus = vectorize::load_corpus_csv(input)?;
            let labels = corpus.labels();
            match word_vectors {
                Some(path) => {
                    let vectors = vectorize::load_word_vectors(path)?;
                    let embedding = vectorize::embed_documents(&corpus, &vectors)?;
                    ("wordvec".into(), embedding, labels)
                }
                None => {
                    let embedding = match vectorizer {
                        Vectorizer::Count => vectorize::count_matrix(&corpus)?,
                        Vectorizer::Tf => vectorize::tf_matrix(&corpus)?,
                        Vectorizer::Tfidf => vectorize::tfidf_matrix(&corpus)?,
                    };
                    (vectorizer.name().into(), embedding, labels)
                }
            }
        }
    };
    let labels = match labels_path {
        Some(path) => {
            let map = vectorize::load_labels_csv(path)?;
            let ordered: Vec<String> = embedding
                .ids
                .iter()
                .map(|id| {
                    map.get(id)
                        .cloned()
                        .ok_or_else(|| Error::MissingLabel(id.clone()))
                })
                .collect::<Result<_>>()?;
            Some(ordered)
        }
        None => corpus_labels,
    };
    let labels = labels.map(|l| metrics::label_ids(&l));
    let similarity = similarity::cosine_similarity(&embedding)?;
    Ok(LoadedInput {
        embedding_tag: tag,
        similarity,
        labels,
    })
}

fn failed_cell(
    tag: &str,
    cell: &GridCell,
    params: &CellParams,
    status: CellStatus,
) -> ExperimentResult {
    ExperimentResult {
        embedding: tag.to_string(),
        transform: cell.transform,
        c: cell.c,
        laplacian: cell.laplacian,
        k: params.k,
        runs: params.runs,
        f_pairwise: None,
        f_matched: None,
        criteria: None,
        status,
    }
}

/// Run one grid cell: repair, build the Laplacian, embed, cluster `runs`
/// times, score, and report the criteria of the lowest-inertia run.
///
/// Negative degrees and negative volumes come back as status rows; anything
/// else is a hard error.
pub fn run_cell(input: &LoadedInput, cell: &GridCell, params: &CellParams) -> Result<ExperimentResult> {
    if params.runs < 1 {
        return Err(Error::InvalidParameter(format!(
            "runs = {} must be at least 1",
            params.runs
        )));
    }
    let tag = &input.embedding_tag;
    let repaired = input.similarity.apply(cell.transform, cell.c)?;
    let lap = match laplacian::build(&repaired, cell.laplacian) {
        Ok(lap) => lap,
        Err(Error::NegativeDegree { .. }) => {
            return Ok(failed_cell(tag, cell, params, CellStatus::NegativeDegreeError));
        }
        Err(other) => return Err(other),
    };
    let embedding = spectral::eig_smallest(&lap.values, params.k)?;

    let mut best: Option<(usize, kmeans::KMeansResult)> = None;
    let mut pairwise = Vec::with_capacity(params.runs);
    let mut matched = Vec::with_capacity(params.runs);
    for run in 0..params.runs {
        let seed = derive_seed(params.base_seed, params.cell_index, run as u64);
        let result = kmeans::kmeans(&embedding.coords, params.k, seed, params.restarts)?;
        if let Some(labels) = &input.labels {
            pairwise.push(metrics::pairwise_f1(&result.partition, labels)?);
            matched.push(metrics::matched_f1(&result.partition, labels)?);
        }
        let better = best
            .as_ref()
            .map_or(true, |(_, b)| result.inertia < b.inertia);
        if better {
            best = Some((run, result));
        }
    }
    let (_, best) = best.expect("runs >= 1");

    let report = match criteria::evaluate(&repaired, &best.partition) {
        Ok(report) => report,
        Err(Error::NegativeVolume { .. }) => {
            return Ok(failed_cell(tag, cell, params, CellStatus::NegativeVolumeError));
        }
        Err(other) => return Err(other),
    };

    let (f_pairwise, f_matched) = if input.labels.is_some() {
        (
            Some(metrics::aggregate(&pairwise)?),
            Some(metrics::aggregate(&matched)?),
        )
    } else {
        (None, None)
    };
    Ok(ExperimentResult {
        embedding: tag.clone(),
        transform: cell.transform,
        c: cell.c,
        laplacian: cell.laplacian,
        k: params.k,
        runs: params.runs,
        f_pairwise,
        f_matched,
        criteria: Some((report.rcut, report.ncut, report.nrcut)),
        status: CellStatus::Ok,
    })
}

/// The grid in deterministic enumeration order: transforms outermost, then
/// c values, then Laplacians.
pub fn grid_cells(spec: &ExperimentSpec) -> Vec<GridCell> {
    let mut cells = Vec::new();
    for &transform in &spec.transforms {
        for &c in &spec.c_values {
            for &laplacian in &spec.laplacians {
                cells.push(GridCell {
                    transform,
                    c,
                    laplacian,
                });
            }
        }
    }
    cells
}

fn run_grid(input: &LoadedInput, spec: &ExperimentSpec) -> Result<Vec<ExperimentResult>> {
    let cells = grid_cells(spec);
    let compute = |(index, cell): (usize, &GridCell)| {
        let params = CellParams {
            k: spec.k,
            runs: spec.runs,
            base_seed: spec.base_seed,
            restarts: spec.restarts,
            cell_index: index as u64,
        };
        run_cell(input, cell, &params)
    };
    // cells run in parallel; collecting preserves grid order
    match spec.workers {
        Some(workers) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
            pool.install(|| cells.par_iter().enumerate().map(compute).collect())
        }
        None => cells.par_iter().enumerate().map(compute).collect(),
    }
}

/// Run a whole experiment: load the input once, run every grid cell.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ExperimentResult>> {
    validate_spec(spec)?;
    let input = load_input(
        &spec.input,
        spec.labels.as_deref(),
        spec.word_vectors.as_deref(),
        spec.vectorizer,
    )?;
    run_grid(&input, spec)
}

fn validate_spec(spec: &ExperimentSpec) -> Result<()> {
    if spec.transforms.is_empty() {
        return Err(Error::Config("transforms list is empty".into()));
    }
    if spec.c_values.is_empty() {
        return Err(Error::Config("c_values list is empty".into()));
    }
    if spec.laplacians.is_empty() {
        return Err(Error::Config("laplacians list is empty".into()));
    }
    if let Some(&bad) = spec.c_values.iter().find(|&&c| c < 0.0 || !c.is_finite()) {
        return Err(Error::Config(format!(
            "c value {bad} must be finite and non-negative"
        )));
    }
    if spec.k < 1 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    if spec.runs < 1 {
        return Err(Error::Config("runs must be at least 1".into()));
    }
    if spec.restarts < 1 {
        return Err(Error::Config("restarts must be at least 1".into()));
    }
    if spec.workers == Some(0) {
        return Err(Error::Config("workers must be at least 1".into()));
    }
    Ok(())
}

fn format_float(v: f64) -> String {
    v.to_string()
}

/// Write result rows as CSV with the fixed column order of
/// [`RESULT_HEADER`]. Missing scores become empty fields, never zeros.
pub fn write_results_csv(results: &[ExperimentResult], path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(RESULT_HEADER)?;
    for row in results {
        let scores = |s: &Option<RunScores>| match s {
            Some(s) => (format_float(s.mean), format_float(s.sd)),
            None => (String::new(), String::new()),
        };
        let (fp_mean, fp_sd) = scores(&row.f_pairwise);
        let (fm_mean, fm_sd) = scores(&row.f_matched);
        let (rcut, ncut, nrcut) = match row.criteria {
            Some((r, n, nr)) => (format_float(r), format_float(n), format_float(nr)),
            None => (String::new(), String::new(), String::new()),
        };
        writer.write_record([
            row.embedding.as_str(),
            row.transform.name(),
            &format_float(row.c),
            row.laplacian.name(),
            &row.k.to_string(),
            &row.runs.to_string(),
            &fp_mean,
            &fp_sd,
            &fm_mean,
            &fm_sd,
            &rcut,
            &ncut,
            &nrcut,
            row.status.name(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// Negativity statistics of an input, as reported by the `stats` command.
#[derive(Debug, Clone)]
pub struct StatsReport {
    pub docs: usize,
    pub negativity: NegativityReport,
}

impl fmt::Display for StatsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "documents: {}", self.docs)?;
        writeln!(
            f,
            "negative similarity entries: {}",
            self.negativity.negative_entries
        )?;
        writeln!(f, "negative degrees: {}", self.negativity.negative_degrees)?;
        writeln!(f, "min similarity: {}", self.negativity.min_similarity)?;
        write!(f, "min degree: {}", self.negativity.min_degree)
    }
}

/// Load an input and report how much negativity its similarity matrix has.
pub fn cmd_stats(
    input: &Path,
    word_vectors: Option<&Path>,
    vectorizer: Vectorizer,
) -> Result<StatsReport> {
    let loaded = load_input(input, None, word_vectors, vectorizer)?;
    Ok(StatsReport {
        docs: loaded.similarity.n(),
        negativity: similarity::negativity_stats(&loaded.similarity),
    })
}

/// Parse a flat `key=value` config file (blank lines and `#` comments
/// allowed), apply overrides, and resolve relative paths against `base_dir`.
pub fn parse_config(
    text: &str,
    base_dir: &Path,
    overrides: &[(String, String)],
) -> Result<ExperimentSpec> {
    let mut map: BTreeMap<String, String> = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "line {}: expected key=value, got {line:?}",
                lineno + 1
            )));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    for (key, value) in overrides {
        map.insert(key.clone(), value.clone());
    }
    build_spec(map, base_dir)
}

/// Read and parse a config file; flag overrides win over file values.
pub fn load_config(path: &Path, overrides: &[(String, String)]) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path)?;
    let base_dir = path.parent().unwrap_or_else(|| Path::new("."));
    parse_config(&text, base_dir, overrides)
}

fn build_spec(map: BTreeMap<String, String>, base_dir: &Path) -> Result<ExperimentSpec> {
    const KNOWN: [&str; 12] = [
        "input",
        "labels",
        "word_vectors",
        "vectorizer",
        "transforms",
        "c_values",
        "laplacians",
        "k",
        "runs",
        "base_seed",
        "restarts",
        "workers",
    ];
    for key in map.keys() {
        if !KNOWN.contains(&key.as_str()) {
            return Err(Error::Config(format!("unknown config key {key:?}")));
        }
    }
    let resolve = |value: &str| -> PathBuf {
        let path = PathBuf::from(value);
        if path.is_absolute() {
            path
        } else {
            base_dir.join(path)
        }
    };
    let required = |key: &str| -> Result<&String> {
        map.get(key)
            .ok_or_else(|| Error::Config(format!("missing required config key {key:?}")))
    };
    fn parse_scalar<T: FromStr>(key: &str, value: &str) -> Result<T> {
        value
            .parse::<T>()
            .map_err(|_| Error::Config(format!("bad value for {key}: {value:?}")))
    }
    fn parse_list<T>(key: &str, value: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
        value
            .split(',')
            .map(str::trim)
            .filter(|item| !item.is_empty())
            .map(|item| {
                parse(item).map_err(|e| Error::Config(format!("in {key}: {e}")))
            })
            .collect()
    }

    let input = resolve(required("input")?);
    let labels = map.get("labels").map(|v| resolve(v));
    let word_vectors = map.get("word_vectors").map(|v| resolve(v));
    let vectorizer = match map.get("vectorizer") {
        Some(v) => v.parse::<Vectorizer>()?,
        None => Vectorizer::default(),
    };
    let transforms = parse_list("transforms", required("transforms")?, |item| {
        item.parse::<Transform>()
    })?;
    let c_values = match map.get("c_values") {
        Some(v) => parse_list("c_values", v, |item| parse_scalar::<f64>("c_values", item))?,
        None => vec![0.0, 1.0, 2.0, 3.0],
    };
    let laplacians = parse_list("laplacians", required("laplacians")?, |item| {
        item.parse::<LaplacianKind>()
    })?;
    let k = parse_scalar::<usize>("k", required("k")?)?;
    let runs = match map.get("runs") {
        Some(v) => parse_scalar::<usize>("runs", v)?,
        None => 30,
    };
    let base_seed = match map.get("base_seed") {
        Some(v) => parse_scalar::<u64>("base_seed", v)?,
        None => 0,
    };
    let restarts = match map.get("restarts") {
        Some(v) => parse_scalar::<usize>("restarts", v)?,
        None => 10,
    };
    let workers = match map.get("workers") {
        Some(v) => Some(parse_scalar::<usize>("workers", v)?),
        None => None,
    };
    let spec = ExperimentSpec {
        input,
        labels,
        word_vectors,
        vectorizer,
        transforms,
        c_values,
        laplacians,
        k,
        runs,
        base_seed,
        restarts,
        workers,
    };
    validate_spec(&spec)?;
    Ok(spec)
}
