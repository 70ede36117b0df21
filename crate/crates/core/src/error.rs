use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: delta {delta} outside (-1/2, 1/2)")]
    DeltaOutOfRange { line: usize, delta: f64 },

    #[error("network failure fetching {url}: {message}")]
    Network { url: String, message: String },

    #[error("checksum mismatch: expected {expected}, got {actual}")]
    ChecksumMismatch { expected: String, actual: String },

    #[error("height {requested} exceeds table coverage (t_max = {available})")]
    Coverage { requested: f64, available: f64 },

    #[error("no zeros in range: {0}")]
    EmptyRange(String),

    #[error("Riemann-von Mangoldt check failed at t = {t}: N(t) = {count}, main term {estimate:.4}, allowed deviation {allowed:.4}")]
    RvmViolation {
        t: f64,
        count: u64,
        estimate: f64,
        allowed: f64,
    },

    #[error("invalid argument: {0}")]
    Domain(String),

    #[error("integrand not finite at {at}")]
    NonFinite { at: f64 },

    #[error("quadrature did not converge: error estimate {estimate:e} above tolerance {tol:e}")]
    NotConverged { estimate: f64, tol: f64 },

    #[error("degenerate kernel {0}: integral of j sech vanishes")]
    DegenerateKernel(String),

    #[error("invalid kernel table: {0}")]
    KernelTable(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
