use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("hole {index} is not aligned with the grid spacing")]
    NonAlignedHole { index: usize },

    #[error("hole {index} touches or crosses the outer boundary")]
    HoleTouchesBoundary { index: usize },

    #[error("holes {first} and {second} overlap or are closer than one cell")]
    HolesTooClose { first: usize, second: usize },

    #[error("cannot place point ({x}, {y}): {reason}")]
    Placement { x: f64, y: f64, reason: String },

    #[error("field belongs to a different grid")]
    GridMismatch,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{solver} did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("requested {requested} modes but the divergence-free space has dimension {available}")]
    TooManyModes { requested: usize, available: usize },

    #[error("mode {0} has zero frequency: cohomological mode carries no oscillator")]
    ZeroFrequencyMode(usize),

    #[error("mode index {index} out of range ({count} modes)")]
    ModeIndex { index: usize, count: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("basis dimension {dim} exceeds the limit {limit}")]
    DimensionGuard { dim: usize, limit: usize },

    #[error("malformed array file: {0}")]
    Format(String),

    #[error("check {check} failed: {value:e} exceeds {tolerance:e}")]
    CheckFailed {
        check: String,
        value: f64,
        tolerance: f64,
    },

    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Solver failures are distinguished from input validation failures by
    /// the command-line driver (different exit codes).
    pub fn is_solver_failure(&self) -> bool {
        match self {
            Error::NotConverged { .. } | Error::NotPositiveDefinite { .. } | Error::CheckFailed { .. } => true,
            Error::Stage { source, .. } => source.is_solver_failure(),
            _ => false,
        }
    }
}
