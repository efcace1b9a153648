use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid field `{field}`: {msg}")]
    Validation { field: String, msg: String },
    #[error("unknown builtin scenario `{0}`")]
    UnknownBuiltin(String),
    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: leafwise_core::Error,
    },
    #[error("i/o error on {path}: {msg}")]
    Io { path: String, msg: String },
}

impl HarnessError {
    pub fn validation(field: &str, msg: impl Into<String>) -> Self {
        Self::Validation {
            field: field.into(),
            msg: msg.into(),
        }
    }

    pub fn io(path: &std::path::Path, e: impl std::fmt::Display) -> Self {
        Self::Io {
            path: path.display().to_string(),
            msg: e.to_string(),
        }
    }
}

/// Attaches a stage name to a core error.
pub trait StageExt<T> {
    fn stage(self, stage: &'static str) -> std::result::Result<T, HarnessError>;
}

impl<T> StageExt<T> for leafwise_core::Result<T> {
    fn stage(self, stage: &'static str) -> std::result::Result<T, HarnessError> {
        self.map_err(|source| HarnessError::Stage { stage, source })
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
