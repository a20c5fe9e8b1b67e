use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("root finder did not converge after {sweeps} sweeps; stagnating indices {indices:?}")]
    RootsNotConverged { sweeps: usize, indices: Vec<usize> },

    #[error("series too short: {0}")]
    SeriesTooShort(String),

    #[error("invalid rotation number {input:?}: {reason}")]
    InvalidRotation { input: String, reason: String },

    #[error("parameter c = 0 is excluded from the family")]
    ZeroParameter,

    #[error("resonance at n = {n}: |λ^n − λ| = {gap:e}")]
    Resonance { n: usize, gap: f64 },

    #[error("linearization residual {residual:e} exceeds gate with {terms} terms")]
    LinearizationGate { residual: f64, terms: usize },

    #[error("outside linearization domain")]
    OutsideDomain,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("census failed at level {level}: {reason}")]
    Census { level: usize, reason: String },

    #[error("internal error: {0}")]
    Internal(String),

    #[error("orbit of {parameter} is not captured at level {level}")]
    NotCaptured { parameter: num_complex::Complex64, level: usize },

    #[error("ray continuation diverged after r = {last_r}")]
    RayDiverged { last_r: f64 },

    #[error("{failed} of {total} rays failed")]
    TraceFailed { failed: usize, total: usize },

    #[error("degenerate polyline: {0}")]
    DegeneratePolyline(String),

    #[error("I/O error at {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("PNG encoding failed at {}: {source}", path.display())]
    Png {
        path: PathBuf,
        #[source]
        source: png::EncodingError,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
