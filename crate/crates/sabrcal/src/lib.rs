//! Shifted-SABR toolkit.
//!
//! The crate covers the full workflow around a shifted-SABR model of forward
//! rates: closed-form shifted-Black / Bachelier analytics, the Hagan
//! asymptotic implied-vol approximation, an unbiased Monte Carlo pricer of the
//! scaled dynamics, Latin-hypercube dataset generation of implied-vol
//! surfaces, a small feed-forward network trained on those surfaces, smile
//! calibration against either pricer, and Cap/Floor market-data handling with
//! caplet volatility stripping.
//!
//! Everything is deterministic: random numbers come from a counter-based
//! generator keyed by (seed, path, step), so results are bit-identical
//! regardless of how work is split across threads.

pub mod analytics;
pub mod calib;
pub mod dataset;
pub mod error;
pub mod market;
pub mod math;
pub mod mc;
pub mod mlp;
pub mod model;

pub use error::SabrError;
pub use model::{OptionSpec, SabrParams, ScaledSabrParams};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, SabrError>;
