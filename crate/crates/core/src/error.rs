use std::path::PathBuf;

/// Everything that can go wrong while building spaces, evaluating loci,
/// issuing certificates or writing traces.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix is not square: {rows} rows but row {row} has {len} entries")]
    NotSquare { rows: usize, row: usize, len: usize },
    #[error("non-finite value at position {0}")]
    NonFinite(usize),
    #[error("gram matrix is not symmetric: |g[{i}][{j}] - g[{j}][{i}]| = {gap:e}")]
    NotSymmetric { i: usize, j: usize, gap: f64 },
    #[error("gram matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("zero vector: angle undefined")]
    ZeroVector,
    #[error("degenerate triangle: the two sides are parallel")]
    DegenerateTriangle,
    #[error("locus needs at least one focus")]
    EmptyFoci,
    #[error("{foci} foci but {alphas} coefficients")]
    CoefficientCount { foci: usize, alphas: usize },
    #[error("coefficient {0} is zero")]
    ZeroCoefficient(usize),
    #[error("ray direction is the zero vector")]
    ZeroDirection,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("point coincides with focus {0}")]
    FocusCoincidence(usize),
    #[error("point is not on the locus (residual {residual:e} exceeds {tol:e})")]
    NotAMember { residual: f64, tol: f64 },
    #[error("coefficient must be non-negative, got {0}")]
    NegativeCoefficient(f64),
    #[error("coefficient must be positive, got {0}")]
    NonPositiveCoefficient(f64),
    #[error("scaled offset {index} for focus {focus} has zero length")]
    ZeroTailVector { index: usize, focus: usize },
    #[error("polynomial has {len} coefficients but the space has dimension {dim}")]
    DegreeOverflow { len: usize, dim: usize },
    #[error("invalid basis oracle: {0}")]
    InvalidOracle(String),
    #[error("tracing needs a 2-dimensional space, got {0}")]
    DimensionNot2D(usize),
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("I/O error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid JSON in {path}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
