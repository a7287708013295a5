use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the simulator, learner, baseline and harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not a proper rotation (deviation {deviation:.3e})")]
    NotRotation { deviation: f64 },

    #[error("waveplate decomposition did not converge (residual {residual:.3e})")]
    DecompositionFailed { residual: f64 },

    #[error("ill-conditioned input: {0}")]
    IllConditioned(String),

    #[error("photon budget {given} is below the minimum of {required}")]
    Budget { given: u64, required: u64 },

    #[error("tomography reconstruction failed: {0}")]
    Reconstruction(String),

    #[error("power-law fit domain error: {0}")]
    FitDomain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("trial {trial} failed: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed data in {path}: {msg}")]
    Parse { path: PathBuf, msg: String },

    #[error("plot rendering failed for {path}: {msg}")]
    Plot { path: PathBuf, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
