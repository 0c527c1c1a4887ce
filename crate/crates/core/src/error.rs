use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Incidence denominator is zero, so the forces of infection are undefined.
    #[error("total population is zero; force of infection undefined")]
    ZeroPopulation,

    #[error("invalid parameters: {}", .0.join("; "))]
    InvalidParameters(Vec<String>),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Step size fell below the lower bound. Carries the last accepted point.
    #[error("integration failed at t = {t}: {reason}")]
    IntegrationFailed { t: f64, state: Vec<f64>, reason: String },

    #[error("Newton iteration did not converge after {iterations} iterations (scaled residual {residual:e})")]
    NewtonFailed {
        iterations: usize,
        residual: f64,
        last: Vec<f64>,
    },

    #[error("singular matrix: {0}")]
    SingularMatrix(&'static str),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("eigenvalue iteration did not converge within {0} iterations")]
    EigenNoConvergence(usize),

    #[error("line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
