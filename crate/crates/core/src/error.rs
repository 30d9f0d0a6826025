use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("rank deficient: pivot {pivot:e} below tolerance relative to largest pivot {largest:e}")]
    RankDeficient { pivot: f64, largest: f64 },
    #[error("sampler failed to draw a full-rank matrix after {attempts} attempts")]
    SamplerFailure { attempts: usize },
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
