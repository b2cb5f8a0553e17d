use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("chain size {0} must be an even integer >= 4")]
    InvalidChainSize(usize),

    #[error("invalid momentum grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dressing drives the transverse coupling of sector ({m}, {n}) through zero (bracket = {bracket})")]
    NonPositiveDressing { m: usize, n: usize, bracket: f64 },

    #[error("sectors were built on different momentum grids or reference couplings")]
    SectorMismatch,

    #[error("bound undefined at exact dressed criticality (lambda_01 = 1)")]
    BoundUndefined,

    #[error("time grid is empty")]
    EmptyTimeGrid,

    #[error("time grid must be finite and strictly increasing")]
    NonMonotonicTimes,

    #[error("invalid field state: {0}")]
    InvalidFieldState(String),

    #[error("sector pair ({0:?}, {1:?}) missing from the sector table")]
    MissingSector((usize, usize), (usize, usize)),

    #[error("g2 denominator {0:e} is below the degeneracy threshold")]
    VanishingDenominator(f64),

    #[error("oracle dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
}
