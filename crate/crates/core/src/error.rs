use thiserror::Error;

/// Errors raised by fitting, variance estimation and the tests built on them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GofError {
    #[error("argument outside the function domain: {0}")]
    Domain(String),

    #[error("invalid dataset: {0}")]
    InvalidData(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown column `{0}`")]
    UnknownColumn(String),

    #[error("design matrix is rank deficient: rank {rank} of {columns} columns")]
    RankDeficient { rank: usize, columns: usize },

    #[error("insufficient data: {n} observations for {params} mean parameters")]
    InsufficientData { n: usize, params: usize },

    #[error("degenerate fit: residual variance {sigma2:e} is numerically zero")]
    DegenerateFit { sigma2: f64 },

    #[error("observed information matrix is singular (condition number {condition:e})")]
    SingularInformation { condition: f64 },

    #[error("bootstrap iteration {iteration} exceeded {limit} degenerate redraws")]
    RedrawLimitExceeded { iteration: usize, limit: usize },

    #[error("{failed} of {reps} Monte Carlo replicates failed to fit (limit is 0.1%)")]
    TooManyFailures { failed: usize, reps: usize },
}

pub type Result<T, E = GofError> = std::result::Result<T, E>;
