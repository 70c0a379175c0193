use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("section {index} is degenerate (d_low = d_high = {value})")]
    DegenerateSection { index: usize, value: f64 },

    #[error("section grid is not contiguous between sections {index} and {next}")]
    NonContiguous { index: usize, next: usize },

    #[error("length mismatch for `{name}`: expected {expected}, got {actual}")]
    LengthMismatch {
        name: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("evaporation rates of sections {i} and {j} coincide ({value:e}); enable perturbation to proceed")]
    RateResonance { i: usize, j: usize, value: f64 },

    #[error("section {section} resonates with cosine mode {mode}; enable perturbation to proceed")]
    ModeResonance { section: usize, mode: usize },
}

pub type Result<T> = std::result::Result<T, ModelError>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> ModelError {
    ModelError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
