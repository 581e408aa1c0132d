use thiserror::Error;

/// Errors produced by complex construction, operator assembly, coarsening and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid simplex: {0}")]
    InvalidSimplex(String),

    #[error("invalid complex: {0}")]
    InvalidComplex(String),

    #[error("dimension {k} out of range for complex of dimension {dim}")]
    DimensionOutOfRange { k: usize, dim: usize },

    #[error("unknown vertex {0}")]
    UnknownVertex(usize),

    #[error("degenerate face {face:?}: area {area:.3e} below tolerance")]
    DegenerateFace { face: Vec<usize>, area: f64 },

    #[error("matrix is not symmetric: max asymmetry {0:.3e}")]
    NotSymmetric(f64),

    #[error("matrix is significantly indefinite: lambda_min {0:.3e}")]
    Indefinite(f64),

    #[error("matrix of size {0} exceeds dense eigensolver limit {1}; compute a band on a smaller complex instead")]
    TooLargeForDense(usize, usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("rank-deficient input: {0}")]
    RankDeficient(String),

    #[error("matrix has an all-zero row at index {0}")]
    ZeroRow(usize),

    #[error("matrix has an all-zero column at index {0}")]
    ZeroColumn(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no candidate families left to contract")]
    NoCandidates,

    #[error("rejection sampling failed: holes cover the domain")]
    SamplingExhausted,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unsupported format version {0}")]
    UnknownVersion(u32),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
