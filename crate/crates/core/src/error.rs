use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite neuron state at iteration {iteration}")]
    NumericOverflow { iteration: usize },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("too few spikes after burn-in: need at least 3, got {0}")]
    TooFewSpikes(usize),

    #[error("image too small: {0}")]
    ImageTooSmall(String),

    #[error("window out of range: {0}")]
    WindowOutOfRange(String),

    #[error("no zero crossing found in shaped pulse")]
    NoZeroCrossing,

    #[error("falling edge never reaches {0}% of peak")]
    FallingEdgeIncomplete(u32),

    #[error("fit failure: {0}")]
    FitFailure(String),
}

impl Error {
    /// True for failures that come from the numerics rather than from bad
    /// inputs or parameters.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NumericOverflow { .. }
                | Error::DegenerateInput(_)
                | Error::TooFewSpikes(_)
                | Error::NoZeroCrossing
                | Error::FallingEdgeIncomplete(_)
                | Error::FitFailure(_)
        )
    }
}
