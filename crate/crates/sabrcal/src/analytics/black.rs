//! Shifted-Black and Bachelier pricing formulas with vega and the
//! closed-form variance of the discounted payoff.

use serde::{Deserialize, Serialize};

use crate::error::{validate_non_negative, validate_positive, SabrError};
use crate::math::{norm_cdf, norm_pdf};

/// Inputs of the shifted-Black formula.
///
/// Prices are undiscounted and carry no accrual factor; both are applied by
/// the market-data layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlackInputs {
    /// Shifted forward `Fbar > 0`.
    pub fwd_shifted: f64,
    /// Shifted strike `Kbar > 0`.
    pub strike_shifted: f64,
    /// Total lognormal variance `v = sigma^2 * tau >= 0`.
    pub variance: f64,
    /// `+1` Caplet, `-1` Floorlet.
    pub omega: i8,
}

impl BlackInputs {
    fn validated(&self) -> crate::Result<()> {
        validate_positive("fwd_shifted", self.fwd_shifted)?;
        validate_positive("strike_shifted", self.strike_shifted)?;
        validate_non_negative("variance", self.variance)?;
        if self.omega != 1 && self.omega != -1 {
            return Err(SabrError::InvalidInput(format!(
                "omega must be +1 or -1, got {}",
                self.omega
            )));
        }
        Ok(())
    }

    /// `d+` and `d-` of the Black formula.
    fn d_plus_minus(&self) -> (f64, f64) {
        let sq = self.variance.sqrt();
        let m = (self.fwd_shifted / self.strike_shifted).ln();
        ((m + 0.5 * self.variance) / sq, (m - 0.5 * self.variance) / sq)
    }
}

/// Undiscounted shifted-Black price of a Caplet or Floorlet.
///
/// Zero variance collapses to the intrinsic value `max(omega(Fbar-Kbar), 0)`.
pub fn black_price(inputs: BlackInputs) -> crate::Result<f64> {
    inputs.validated()?;
    let w = inputs.omega as f64;
    let intrinsic = (w * (inputs.fwd_shifted - inputs.strike_shifted)).max(0.0);
    if inputs.variance == 0.0 {
        return Ok(intrinsic);
    }
    let (dp, dm) = inputs.d_plus_minus();
    let price = w
        * (inputs.fwd_shifted * norm_cdf(w * dp) - inputs.strike_shifted * norm_cdf(w * dm));
    // Tail rounding can land a hair under intrinsic; never report less.
    Ok(price.max(intrinsic))
}

/// Undiscounted Bachelier (normal-model) price.
///
/// `normal_variance` is `sigma_n^2 * tau`. Zero variance collapses to the
/// intrinsic value.
pub fn bachelier_price(
    fwd_shifted: f64,
    strike_shifted: f64,
    normal_variance: f64,
    omega: i8,
) -> f64 {
    let w = omega as f64;
    let moneyness = fwd_shifted - strike_shifted;
    if normal_variance <= 0.0 {
        return (w * moneyness).max(0.0);
    }
    let sq = normal_variance.sqrt();
    let d = moneyness / sq;
    w * moneyness * norm_cdf(w * d) + sq * norm_pdf(d)
}

/// Black vega `Fbar * phi(d+) * sqrt(tau)`, identical for both payoff signs.
pub fn black_vega(fwd_shifted: f64, strike_shifted: f64, sigma: f64, tau: f64) -> f64 {
    let sq = sigma * tau.sqrt();
    let dp = ((fwd_shifted / strike_shifted).ln() + 0.5 * sq * sq) / sq;
    fwd_shifted * norm_pdf(dp) * tau.sqrt()
}

/// Variance of the undiscounted Black payoff `max(omega(Fbar(T)-Kbar), 0)`.
///
/// `Var = Fbar^2 e^v Phi(omega d0) - Fbar Kbar Phi(omega d+) - Kbar omega V - V^2`
/// with `V` the Black price and `d0 = d- + 2 sqrt(v)`. Dividing by the path
/// count and taking the square root gives the Monte Carlo standard error.
pub fn black_payoff_variance(inputs: BlackInputs) -> crate::Result<f64> {
    inputs.validated()?;
    if inputs.variance == 0.0 {
        return Ok(0.0);
    }
    let w = inputs.omega as f64;
    let (dp, dm) = inputs.d_plus_minus();
    let d0 = dm + 2.0 * inputs.variance.sqrt();
    let f = inputs.fwd_shifted;
    let k = inputs.strike_shifted;
    let price = black_price(inputs)?;
    let var = f * f * inputs.variance.exp() * norm_cdf(w * d0) - f * k * norm_cdf(w * dp)
        - k * w * price
        - price * price;
    Ok(var.max(0.0))
}
