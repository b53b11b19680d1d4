use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("matrix is not unitary (defect {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("projected level is degenerate at tau = {tau} (gap {gap:.3e})")]
    Degenerate { tau: f64, gap: f64 },

    #[error("integration with {steps} steps left unitarity defect {defect:.3e}")]
    Accuracy { steps: usize, defect: f64 },

    #[error("control modification has imaginary residue {residue:.3e}")]
    ImaginaryResidue { residue: f64 },

    #[error("unsupported system: {0}")]
    Unsupported(String),

    #[error("noise realization has zero raw power after {attempts} attempts")]
    DegenerateRealization { attempts: u32 },

    #[error("spectrum never falls below the bandwidth threshold")]
    BandwidthUndefined,

    #[error("invalid configuration at `{path}`: {reason}")]
    Config { path: String, reason: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
