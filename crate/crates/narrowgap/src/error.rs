use crate::pde::BoundaryClass;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid vanishing orders: {0}")]
    InvalidOrders(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("epsilon {eps} outside (0, {max}] for preset {preset}")]
    EpsilonOutOfRange { preset: String, eps: f64, max: f64 },
    #[error("gap closed: g - f = {width:e} at x' = {at:?}")]
    GapViolation { at: Vec<f64>, width: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("RESOLUTION: {0}")]
    Resolution(String),
    #[error("active set has {found} components, expected {expected}")]
    Disconnected { found: usize, expected: usize },
    #[error("field belongs to a different grid")]
    GridMismatch,
    #[error("boundary class {0:?} absent from grid")]
    MissingBoundary(BoundaryClass),
    #[error("solver did not converge in {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("factorization failed: {0}")]
    Factorization(String),
    #[error("singular capacity system: det = {det:e}, a11 = {a11:e}")]
    Singular { det: f64, a11: f64 },
    #[error("quadrature node budget exhausted after {0} evaluations")]
    QuadratureBudget(usize),
    #[error("degenerate boundary data: {0}")]
    Degenerate(String),
    #[error("need >= 4 rows, got {0}")]
    InsufficientRows(usize),
    #[error("quantity {quantity} is not positive at epsilon {epsilon}")]
    NonPositive { quantity: String, epsilon: f64 },
    #[error("patch cover: {0}")]
    PatchCover(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors that mean a mathematical or structural invariant failed, as
    /// opposed to bad input or I/O.
    pub fn is_invariant_violation(&self) -> bool {
        matches!(
            self,
            Error::Resolution(_)
                | Error::Disconnected { .. }
                | Error::Singular { .. }
                | Error::GapViolation { .. }
                | Error::InvalidConfiguration(_)
                | Error::QuadratureBudget(_)
                | Error::Degenerate(_)
                | Error::PatchCover(_)
        )
    }
}
