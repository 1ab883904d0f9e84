use thiserror::Error;

/// Errors produced anywhere in the waveform / channel / receiver / solver stack.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("feedback taps {taps:#x} are not primitive for degree {degree} (period {period})")]
    NonPrimitive {
        degree: u32,
        taps: u32,
        period: usize,
    },

    #[error("ratio undefined: {0}")]
    UndefinedRatio(String),

    #[error("sample rate mismatch: {0} Hz vs {1} Hz")]
    SampleRateMismatch(f64, f64),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("filter design failed: {0}")]
    Design(String),

    #[error("only {valid} valid beacons, at least {required} are required")]
    InsufficientBeacons { valid: usize, required: usize },

    #[error("normal equations are rank deficient: {0}")]
    RankDeficient(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("io error: {0}")]
    Io(String),

    #[error("config error: {0}")]
    Config(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}
