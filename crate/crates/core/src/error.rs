use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("vectors and matrices must have at least one entry")]
    Empty,
    #[error("non-finite entry {value} at index {index}")]
    NonFinite { index: usize, value: f64 },
    #[error("negative entry {value} at index {index}")]
    Negative { index: usize, value: f64 },
    #[error("entry {value} at index {index} is not strictly positive")]
    NotPositive { index: usize, value: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("invalid network snapshot: {0}")]
    InvalidSnapshot(String),
    #[error("singular linear system")]
    Singular,
    #[error(
        "scaling limit did not settle within the t schedule (last relative change {last_change:e})"
    )]
    LimitNotConverged { last_change: f64 },
    #[error("asymptotic mapping vanishes at a start vector that is not strictly positive")]
    ZeroImage,
    #[error("normalized power iteration did not converge after {iterations} steps (oscillating: {oscillating})")]
    KrauseNotConverged {
        iterations: usize,
        oscillating: bool,
    },
    #[error("epsilon-perturbed iteration did not converge for p = {p} after {iterations} steps")]
    EpsilonNotConverged { p: f64, iterations: usize },
    #[error("eigenvector is not strictly positive (min/max entry ratio {min_ratio:e})")]
    EigenvectorNotPositive { min_ratio: f64 },
    #[error("operation requires a convex mapping")]
    RequiresConvex,
    #[error("operation requires a concave mapping")]
    RequiresConcave,
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    #[error("only {usable} usable error samples, need at least {required}")]
    InsufficientData { usable: usize, required: usize },
    #[error("spectral radius of the asymptotic mapping is zero")]
    ZeroSpectralRadius,
    #[error("station {station} has no users after {attempts} placement attempts")]
    EmptyStation { station: usize, attempts: usize },
}
