use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain of the physical relation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("detector grid pitch {pitch:.3e} m cannot resolve fringe period {period:.3e} m")]
    Resolution { pitch: f64, period: f64 },

    #[error("fit impossible: {0}")]
    FitImpossible(String),

    /// The observed height lies on or above the straight source-grating line.
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("grids do not overlap: {0}")]
    NonOverlapping(String),

    #[error("malformed input {path}: {reason}")]
    Parse { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// True for failures caused by the user's inputs rather than the numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::Parse { .. } | Error::Io(_) | Error::DimensionMismatch(_)
        )
    }
}
