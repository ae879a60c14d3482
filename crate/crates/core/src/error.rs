use std::io;

use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("vertex {vertex} out of range (vertex count {count})")]
    Range { vertex: usize, count: usize },

    #[error("vertex {0} is not in this component")]
    Domain(usize),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("degenerate regime: {0}")]
    Degenerate(String),

    #[error("step cap of {cap} exceeded in trial {trial}")]
    StepCap { trial: u64, cap: u64 },

    #[error("linear solver did not converge: {0}")]
    Solver(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
