use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },

    #[error("input error: {0}")]
    Input(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("resource limit exceeded in stage `{stage}` (limit {limit})")]
    Resource { stage: String, limit: usize },

    #[error("malformed witness: {0}")]
    MalformedWitness(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn resource(stage: impl Into<String>, limit: usize) -> Self {
        Error::Resource { stage: stage.into(), limit }
    }

    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Resource { .. } => 3,
            _ => 2,
        }
    }
}
