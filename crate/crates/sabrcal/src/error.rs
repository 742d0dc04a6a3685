//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by the pricing, simulation and calibration layers.
#[derive(Debug, Error)]
pub enum SabrError {
    /// A model or configuration input violates its documented domain.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An option price passed to an implied-vol inversion lies outside the
    /// attainable range of the pricing formula.
    #[error("price out of bounds: {0}")]
    PriceOutOfBounds(String),

    /// Root bracketing succeeded but bisection failed to converge.
    #[error("implied-vol bisection did not converge after {steps} steps (interval [{lo}, {hi}])")]
    NonConvergence { steps: usize, lo: f64, hi: f64 },

    /// Both the caplet and floorlet at a surface point carry no time value,
    /// so no implied volatility exists.
    #[error("dead point: caplet and floorlet time values both below {threshold:e}")]
    DeadPoint { threshold: f64 },

    /// Training loss became non-finite.
    #[error("training diverged at epoch {epoch}: loss {loss}")]
    Divergence { epoch: usize, loss: f64 },

    /// Every calibration start failed; indicates a broken pricer rather than
    /// a hard smile.
    #[error("all {n_starts} calibration starts failed")]
    AllStartsFailed { n_starts: usize },

    /// A persisted artifact does not match the expected schema or shapes.
    #[error("format error: {0}")]
    Format(String),

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// CSV parse or write failure.
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    /// JSON (de)serialization failure.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Fails with [`SabrError::InvalidInput`] unless `value` is strictly positive.
pub fn validate_positive(name: &str, value: f64) -> crate::Result<()> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(SabrError::InvalidInput(format!(
            "{name} must be positive and finite, got {value}"
        )));
    }
    Ok(())
}

/// Fails with [`SabrError::InvalidInput`] unless `value` is finite and non-negative.
pub fn validate_non_negative(name: &str, value: f64) -> crate::Result<()> {
    if !(value >= 0.0) || !value.is_finite() {
        return Err(SabrError::InvalidInput(format!(
            "{name} must be non-negative and finite, got {value}"
        )));
    }
    Ok(())
}
