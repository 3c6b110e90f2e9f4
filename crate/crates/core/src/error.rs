use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: |H - H^dagger| = {asymmetry:.3e} at ({row}, {col}) exceeds {tolerance:.3e}")]
    NotHermitian {
        asymmetry: f64,
        row: usize,
        col: usize,
        tolerance: f64,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("numerical consistency violated: {0}")]
    NumericalConsistency(String),

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error(
        "frame step too large at t = {t}: overlap of column {column} with the previous frame is {overlap:.4} (<= 0.9); use a smaller frame step"
    )]
    FrameStepTooLarge { t: f64, column: usize, overlap: f64 },

    #[error("degenerate crossing at t = {t}: gap {gap:.3e} between levels {level} and {next} is below 1e-8; evaluate away from exact crossings")]
    DegenerateCrossing {
        t: f64,
        gap: f64,
        level: usize,
        next: usize,
    },

    #[error("gauge-inconsistent frame series: column {column} flips sign between frames {step} and {next}")]
    GaugeInconsistent {
        column: usize,
        step: usize,
        next: usize,
    },

    #[error("truncation: tail mass {tail_mass:.3e} near the edge of a {dim}-dimensional basis; increase the basis dimension")]
    Truncation { tail_mass: f64, dim: usize },

    #[error("norm drift {drift:.3e} at t = {t} exceeds the allowed {allowed:.3e}; reduce dt (currently {dt})")]
    NormDrift {
        t: f64,
        drift: f64,
        allowed: f64,
        dt: f64,
    },

    #[error("non-finite amplitudes at t = {t}")]
    NonFinite { t: f64 },

    #[error("invalid {field}: {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("probe time {t} is not among the output times")]
    ProbeTimeAbsent { t: f64 },

    #[error("no significant periodicity in series: {0}")]
    NoPeriod(String),

    #[error("too few points: need at least {needed}, found {found}")]
    TooFewPoints { needed: usize, found: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by the scenario description rather than by the numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(self, Error::InvalidConfig { .. } | Error::Json(_))
    }
}
