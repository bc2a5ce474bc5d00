use thiserror::Error;

/// Errors raised by the numerical pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid nonlinearity: {0}")]
    InvalidNonlinearity(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("shooting bracket failure: {0}")]
    Bracket(String),

    #[error("underflow: {0}")]
    Underflow(String),

    #[error("geometry: {0}")]
    Geometry(String),

    #[error("grid: {0}")]
    Grid(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(
        "Monte Carlo estimate {estimate} has relative standard error {rel_std_error:.3e} \
         after {samples} samples"
    )]
    MonteCarlo {
        estimate: f64,
        rel_std_error: f64,
        samples: u64,
    },

    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by bad user input rather than numerical failure.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::InvalidNonlinearity(_) | Error::Domain(_) | Error::Grid(_) | Error::Geometry(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
