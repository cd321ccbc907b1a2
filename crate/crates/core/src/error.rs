use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(&'static str),

    #[error("Helmholtz solve did not converge after {iterations} iterations (relative residual {residual:e})")]
    HelmholtzNotConverged { iterations: usize, residual: f64 },

    #[error("Picard iteration did not converge after {iterations} sweeps (last change {residual:e})")]
    PicardNotConverged { iterations: usize, residual: f64 },

    #[error("non-finite value produced: {0}")]
    NonFinite(&'static str),

    #[error("step {step} failed: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("study row {row} ({label}) failed: {source}")]
    Row {
        row: usize,
        label: String,
        #[source]
        source: Box<Error>,
    },

    #[error("order fit: {0}")]
    OrderFit(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    ConfigFile {
        path: PathBuf,
        line: usize,
        msg: String,
    },
}

impl Error {
    /// True when the failure came from the numerics rather than from input or I/O.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::HelmholtzNotConverged { .. }
            | Error::PicardNotConverged { .. }
            | Error::NonFinite(_) => true,
            Error::Step { source, .. } | Error::Row { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    pub fn is_io(&self) -> bool {
        match self {
            Error::Io { .. } => true,
            Error::Step { source, .. } | Error::Row { source, .. } => source.is_io(),
            _ => false,
        }
    }
}
