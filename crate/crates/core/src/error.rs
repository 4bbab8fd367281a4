use thiserror::Error;

pub type Result<T> = std::result::Result<T, MarcError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MarcError {
    #[error("{name} must be strictly positive (got {value})")]
    NonPositive { name: &'static str, value: f64 },

    #[error("{name} must be non-negative (got {value})")]
    Negative { name: &'static str, value: f64 },

    #[error("{0}")]
    Domain(String),

    #[error("gamma is undefined for alpha = 0; supply gamma explicitly")]
    GammaUndefined,

    #[error("no positive root on (0, {bracket_hi}]")]
    NoRoot { bracket_hi: f64 },

    #[error("margin has no sign change on [{lo}, {hi}]: condition {}", if *.holds_everywhere { "always holds" } else { "never holds" })]
    NoSignChange { lo: f64, hi: f64, holds_everywhere: bool },

    #[error("no allocation regime matched at budget {budget}")]
    Unclassified { budget: f64 },

    #[error("unsupported: {0}")]
    Unsupported(&'static str),
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(MarcError::NonPositive { name, value })
    }
}

pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value >= 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(MarcError::Negative { name, value })
    }
}
