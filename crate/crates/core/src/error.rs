use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Pipeline stage tag attached to errors raised by [`crate::reduction::full_pipeline`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Regularize,
    Group,
    Nonuniform,
    Uniform,
    Plain,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Regularize => "regularize",
            Stage::Group => "group",
            Stage::Nonuniform => "nonuniform",
            Stage::Uniform => "uniform",
            Stage::Plain => "plain",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("invalid mapping: {0}")]
    InvalidMapping(String),
    #[error("invalid coloring: {0}")]
    InvalidColoring(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("witness error: {0}")]
    Witness(String),
    #[error("evaluation error: {0}")]
    Evaluation(String),
    #[error("{stage} stage: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn params(msg: impl Into<String>) -> Self {
        Error::InvalidParameters(msg.into())
    }

    pub(crate) fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }

    pub(crate) fn at_stage(self, stage: Stage) -> Self {
        match self {
            e @ Error::Stage { .. } => e,
            other => Error::Stage {
                stage,
                source: Box::new(other),
            },
        }
    }

    /// Stage that produced this error, if it came out of the pipeline.
    pub fn stage(&self) -> Option<Stage> {
        match self {
            Error::Stage { stage, .. } => Some(*stage),
            _ => None,
        }
    }
}
