//! Shifted-SABR parameterization and the dimensional-reduction scaling.
//!
//! The model drives the shifted forward `Fbar = F + lambda` with CEV dynamics
//! `dFbar = sigma * Fbar^beta dW` under a lognormal stochastic volatility
//! `dsigma = nu * sigma dZ`, `dW dZ = rho dt`. Dividing the forward by its
//! initial value `Fbar0 = F0 + lambda` yields the scaled process
//! `X = Fbar / Fbar0` which starts at exactly 1 and follows the same dynamics
//! with `alpha` replaced by `alpha_hat = alpha * Fbar0^(beta-1)`. Scaled and
//! unscaled prices differ by the factor `Fbar0`; their shifted-lognormal
//! implied volatilities coincide.

use serde::{Deserialize, Serialize};

use crate::error::{validate_positive, SabrError};

/// Full shifted-SABR parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SabrParams {
    /// Initial forward rate (decimal, may be negative down to `-lambda`).
    pub f0: f64,
    /// Rate shift applied to forward and strikes (decimal, non-negative).
    pub lambda: f64,
    /// Initial volatility.
    pub alpha: f64,
    /// CEV elasticity, in `[0, 1]`.
    pub beta: f64,
    /// Rate-volatility correlation, in `[-1, 1]`.
    pub rho: f64,
    /// Volatility of volatility, non-negative.
    pub nu: f64,
}

impl SabrParams {
    /// Validates every invariant, returning `self` on success.
    pub fn validated(self) -> crate::Result<Self> {
        if !(self.f0 + self.lambda > 0.0) {
            return Err(SabrError::InvalidInput(format!(
                "shifted forward F0 + lambda must be positive, got {} + {}",
                self.f0, self.lambda
            )));
        }
        if !(self.lambda >= 0.0) {
            return Err(SabrError::InvalidInput(format!(
                "lambda must be non-negative, got {}",
                self.lambda
            )));
        }
        validate_positive("alpha", self.alpha)?;
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(SabrError::InvalidInput(format!(
                "beta must lie in [0, 1], got {}",
                self.beta
            )));
        }
        if !(-1.0..=1.0).contains(&self.rho) {
            return Err(SabrError::InvalidInput(format!(
                "rho must lie in [-1, 1], got {}",
                self.rho
            )));
        }
        if !(self.nu >= 0.0) || !self.nu.is_finite() {
            return Err(SabrError::InvalidInput(format!(
                "nu must be non-negative and finite, got {}",
                self.nu
            )));
        }
        Ok(self)
    }

    /// Shifted initial forward `F0 + lambda`.
    #[inline]
    pub fn fbar0(&self) -> f64 {
        self.f0 + self.lambda
    }

    /// Scaling transform: divides the forward by `Fbar0`.
    ///
    /// The scaled process starts at 1 and keeps `beta`, `rho`, `nu`; only the
    /// initial volatility changes, to `alpha * Fbar0^(beta-1)`.
    pub fn scale(&self) -> crate::Result<ScaledSabrParams> {
        let p = self.validated()?;
        Ok(ScaledSabrParams {
            alpha_hat: p.alpha * p.fbar0().powf(p.beta - 1.0),
            beta: p.beta,
            rho: p.rho,
            nu: p.nu,
        })
    }

    /// Scaled moneyness `(K + lambda) / (F0 + lambda)` of a strike.
    pub fn scale_strike(&self, strike: f64) -> crate::Result<f64> {
        let shifted = strike + self.lambda;
        if !(shifted > 0.0) {
            return Err(SabrError::InvalidInput(format!(
                "shifted strike K + lambda must be positive, got {} + {}",
                strike, self.lambda
            )));
        }
        Ok(shifted / self.fbar0())
    }
}

/// Parameter set of the scaled model, where the forward starts at 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledSabrParams {
    /// Scaled initial volatility `alpha * (F0+lambda)^(beta-1)`.
    pub alpha_hat: f64,
    /// CEV elasticity, in `[0, 1]`.
    pub beta: f64,
    /// Rate-volatility correlation, in `[-1, 1]`.
    pub rho: f64,
    /// Volatility of volatility, non-negative.
    pub nu: f64,
}

impl ScaledSabrParams {
    /// Validates every invariant, returning `self` on success.
    pub fn validated(self) -> crate::Result<Self> {
        validate_positive("alpha_hat", self.alpha_hat)?;
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(SabrError::InvalidInput(format!(
                "beta must lie in [0, 1], got {}",
                self.beta
            )));
        }
        if !(-1.0..=1.0).contains(&self.rho) {
            return Err(SabrError::InvalidInput(format!(
                "rho must lie in [-1, 1], got {}",
                self.rho
            )));
        }
        if !(self.nu >= 0.0) || !self.nu.is_finite() {
            return Err(SabrError::InvalidInput(format!(
                "nu must be non-negative and finite, got {}",
                self.nu
            )));
        }
        Ok(self)
    }
}

/// One Caplet (`omega = +1`) or Floorlet (`omega = -1`) contract.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptionSpec {
    /// Forward-rate fixing time, in year fractions.
    pub t: f64,
    /// Strike rate (decimal).
    pub k: f64,
    /// `+1` for a Caplet, `-1` for a Floorlet.
    pub omega: i8,
}

impl OptionSpec {
    /// Validates fixing time and payoff sign.
    pub fn validated(self) -> crate::Result<Self> {
        validate_positive("fixing time T", self.t)?;
        if self.omega != 1 && self.omega != -1 {
            return Err(SabrError::InvalidInput(format!(
                "omega must be +1 or -1, got {}",
                self.omega
            )));
        }
        Ok(self)
    }
}
