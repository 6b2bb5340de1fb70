use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("configurations differ in alphabet or indexing")]
    IncompatibleConfigurations,

    #[error("valid radius {available} is too small, need {needed}")]
    InsufficientRadius { needed: usize, available: usize },

    #[error("alphabet mismatch: expected {expected} symbols, found {found}")]
    AlphabetMismatch { expected: usize, found: usize },

    #[error("conditioning cylinder has zero measure")]
    NullCylinder,

    #[error("ball has zero measure")]
    NullBall,

    #[error("enumeration of {required} words exceeds cap {cap}")]
    EnumerationTooLarge { required: u128, cap: u64 },

    #[error("operation not supported for {0}")]
    UnsupportedSystem(&'static str),

    #[error("orbit balls {first} and {second} overlap at horizon {horizon}")]
    OverlappingBalls {
        first: usize,
        second: usize,
        horizon: usize,
    },

    #[error("base point has no periodic certificate at resolution {m}, horizon {horizon}")]
    NotLocallyPeriodic { m: usize, horizon: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
