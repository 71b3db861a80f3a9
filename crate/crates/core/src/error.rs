//! Crate-wide error type.
//!
//! Every fallible operation in the library returns [`Result`]. Variants carry
//! enough data (indices, ids, offending values) for callers to report precise
//! diagnostics; the CLI maps them onto exit codes in `main`.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// No document in the corpus produced a single token.
    #[error("empty vocabulary: no document produced any tokens")]
    EmptyVocabulary,

    /// A matrix row that must have positive norm is all zeros.
    #[error("row {index} has zero norm and cannot be normalized")]
    ZeroRow { index: usize },

    /// A document contains no token covered by the word-vector table.
    #[error("document {doc_id:?} has no tokens covered by the word vectors")]
    NoCoveredTokens { doc_id: String },

    /// Averaged word vectors cancelled out to the zero vector.
    #[error("document {doc_id:?} averages to the zero vector")]
    ZeroMeanVector { doc_id: String },

    /// Word vectors in one table disagree on dimensionality.
    #[error("word vector for {token:?} has {got} dimensions, expected {expected}")]
    WordVectorDim {
        token: String,
        expected: usize,
        got: usize,
    },

    /// A shift constant that must be non-negative is negative.
    #[error("shift constant c = {c} must be non-negative")]
    NegativeShift { c: f64 },

    /// All off-diagonal similarities are 1, so the maximum angle is zero and
    /// the angle-rescaling transform is undefined.
    #[error("degenerate angle range: all off-diagonal similarities equal 1")]
    DegenerateAngleRange,

    /// Degree-normalized constructions require every degree to be positive.
    #[error("non-positive degree at indices {indices:?}")]
    NegativeDegree { indices: Vec<usize> },

    /// Volume-normalized cut criteria require every cluster volume to be positive.
    #[error("cluster {cluster} has non-positive volume {volume}")]
    NegativeVolume { cluster: usize, volume: f64 },

    /// A square matrix was expected.
    #[error("matrix is not square: {rows} x {cols}")]
    NotSquare { rows: usize, cols: usize },

    /// Symmetry violated beyond tolerance.
    #[error("matrix asymmetry |m[{i}][{j}] - m[{j}][{i}]| = {delta:e} exceeds tolerance")]
    Asymmetric { i: usize, j: usize, delta: f64 },

    /// Similarity matrices keep a zero diagonal by convention.
    #[error("similarity diagonal entry {index} is {value}, expected 0")]
    NonzeroDiagonal { index: usize, value: f64 },

    /// Requested number of eigenpairs or clusters is outside [1, n].
    #[error("k = {k} out of range for n = {n}")]
    InvalidK { k: usize, n: usize },

    /// A partition contains an empty cluster where one is not allowed.
    #[error("cluster {cluster} is empty")]
    EmptyCluster { cluster: usize },

    /// Two aligned sequences differ in length.
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// Aggregating an empty score list.
    #[error("cannot aggregate an empty score list")]
    EmptyScores,

    /// A parameter failed validation (value and constraint in the message).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Diagonal shift too small to keep all shifted degrees positive.
    #[error("diagonal shift x = {x} too small: requires x > {min_x}")]
    ShiftTooSmall { x: f64, min_x: f64 },

    /// Corpus ids must be unique.
    #[error("duplicate doc id {0:?}")]
    DuplicateDocId(String),

    /// Labels, when present, must cover every document.
    #[error("missing label for doc id {0:?}")]
    MissingLabel(String),

    /// Bad experiment configuration (unknown key, unparsable value, missing field).
    #[error("config error: {0}")]
    Config(String),

    /// Structurally invalid input file.
    #[error("malformed input {path}: {msg}")]
    Malformed { path: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code the CLI uses for this error: 2 for configuration
    /// problems, 3 for IO and data problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidParameter(_) | Error::InvalidK { .. } => 2,
            _ => 3,
        }
    }
}
