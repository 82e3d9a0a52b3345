use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Schema(String),

    #[error("zero-probability herald at mu = {mu}, l_A = {l_a}")]
    ZeroProbability { mu: f64, l_a: usize },

    #[error(transparent)]
    Core(#[from] splitspin::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) => 2,
            CliError::ZeroProbability { .. } => 3,
            _ => 1,
        }
    }
}

pub fn schema(msg: impl Into<String>) -> CliError {
    CliError::Schema(msg.into())
}

pub type Result<T> = std::result::Result<T, CliError>;
