use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular lattice basis: |det| = {det:e} is below 1e-12")]
    SingularBasis { det: f64 },

    #[error("point enumeration would produce {count} points, cap is {cap}")]
    RadiusTooLarge { count: usize, cap: usize },

    #[error("signals are sampled on different grids")]
    GridMismatch,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("quadrature failed to reach {tol:e} (error estimate {estimate:e})")]
    QuadratureFailure { tol: f64, estimate: f64 },

    #[error("elements live on different lattices or sides")]
    LatticeMismatch,

    #[error("right action requires an adjoint-side element")]
    WrongSide,

    #[error("element is not self-adjoint (residual {residual:e})")]
    NotSelfAdjoint { residual: f64 },

    #[error("element is not invertible (lower {lower:e}, upper {upper:e})")]
    NotInvertible { lower: f64, upper: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("not a frame (lower {lower:e}, upper {upper:e})")]
    NotAFrame { lower: f64, upper: f64 },

    #[error("insufficient support: {0}")]
    InsufficientSupport(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
