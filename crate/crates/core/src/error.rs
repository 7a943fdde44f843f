use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("time t = {t} μs outside protocol interval [0, {duration}] μs")]
    TimeOutOfRange { t: f64, duration: f64 },

    #[error("degenerate envelope at t = {t} μs: Ω_P² + Ω_S² vanishes")]
    DegenerateEnvelope { t: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("step {step} μs exceeds the phase-resolution limit {max} μs (0.02·2π/|Δ|)")]
    StepConstraint { step: f64, max: f64 },

    #[error("initial state not normalized: norm = {norm}")]
    NotNormalized { norm: f64 },

    #[error("non-finite amplitude after step {step} (t = {t} μs)")]
    NonFinite { step: usize, t: f64 },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("configuration: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl Error {
    /// Short machine-readable category, used on the CLI error line.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::TimeOutOfRange { .. } => "time_out_of_range",
            Error::DegenerateEnvelope { .. } => "degenerate_envelope",
            Error::InvalidParams(_) => "invalid_params",
            Error::StepConstraint { .. } => "step_constraint",
            Error::NotNormalized { .. } => "not_normalized",
            Error::NonFinite { .. } => "non_finite",
            Error::InvalidScenario(_) => "invalid_scenario",
            Error::Config(_) => "config",
            Error::Io { .. } => "io",
            Error::Format { .. } => "format",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
