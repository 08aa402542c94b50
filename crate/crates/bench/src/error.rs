use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cannot parse configuration: {0}")]
    Parse(#[from] toml::de::Error),

    #[error("did not converge within {iterations} iterations (last increments {res_v:e}, {res_p:e})")]
    NotConverged { iterations: usize, res_v: f64, res_p: f64 },

    #[error(transparent)]
    Solver(#[from] darcyflow::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

impl BenchError {
    pub fn config(msg: impl Into<String>) -> Self {
        BenchError::Config(msg.into())
    }

    /// Process exit code: 2 for non-convergence, 3 for bad configuration,
    /// 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::NotConverged { .. } => 2,
            BenchError::Config(_) | BenchError::Parse(_) => 3,
            BenchError::Solver(darcyflow::Error::InvalidArgument(_))
            | BenchError::Solver(darcyflow::Error::MissingDatum)
            | BenchError::Solver(darcyflow::Error::ConstraintConflict { .. })
            | BenchError::Solver(darcyflow::Error::IncompatibleFlux { .. })
            | BenchError::Solver(darcyflow::Error::UnsupportedElement(_)) => 3,
            _ => 1,
        }
    }
}

pub type BenchResult<T> = Result<T, BenchError>;
