use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no critical points for a = {a} (map is monotone for a <= 4)")]
    NoCriticalPoints { a: f64 },
    #[error("not absorbed within {n_cap} steps")]
    NotAbsorbed { n_cap: usize },
    #[error("not expanded within {n_cap} steps")]
    NotExpanded { n_cap: usize },
    #[error("not found: {0}")]
    NotFound(String),
    #[error("precision exhausted at level {level}: {detail}")]
    PrecisionExhausted { level: usize, detail: String },
    #[error("tracking stalled at level {level}: {detail}")]
    NotTracked { level: usize, detail: String },
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::NoCriticalPoints { .. } => "no_critical_points",
            Error::NotAbsorbed { .. } => "not_absorbed",
            Error::NotExpanded { .. } => "not_expanded",
            Error::NotFound(_) => "not_found",
            Error::PrecisionExhausted { .. } => "precision_exhausted",
            Error::NotTracked { .. } => "not_tracked",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
