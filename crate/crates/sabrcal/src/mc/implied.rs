//! Implied-vol extraction from simulated payoff moments.

use serde::{Deserialize, Serialize};

use super::McPriceResult;
use crate::analytics::{black_vega, implied_vol_from_floorlet, parity_convert, TIME_VALUE_FLOOR};
use crate::error::SabrError;

/// One implied-vol observation recovered from a Monte Carlo run, in scaled
/// units (forward 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McVolPoint {
    pub k_hat: f64,
    pub sigma: f64,
    /// Three-sigma price error of the chosen leg expressed in vol units.
    pub vol_err3: f64,
    /// True when the caplet leg was inverted (via parity).
    pub from_caplet: bool,
}

/// Invert one (date, strike) cell of a simulation result.
///
/// The leg with the smaller three-sigma price error is used (ties go to the
/// floorlet); a caplet estimate is first mapped to a floorlet with the
/// theoretical forward of 1, which keeps the put side's bounded payoff as
/// the inversion target everywhere. Cells where both legs' time value falls
/// below the dead-point threshold carry no vol information and are
/// reported as [`SabrError::DeadPoint`] so callers can drop them.
pub fn implied_vol_from_mc(r: &McPriceResult, tau: f64) -> crate::Result<McVolPoint> {
    let tv_floorlet = r.floorlet - (r.k_hat - 1.0).max(0.0);
    let tv_caplet = r.caplet - (1.0 - r.k_hat).max(0.0);
    if tv_floorlet < TIME_VALUE_FLOOR && tv_caplet < TIME_VALUE_FLOOR {
        return Err(SabrError::DeadPoint {
            threshold: TIME_VALUE_FLOOR,
        });
    }
    let from_caplet = r.caplet_err3 < r.floorlet_err3;
    let (price, err3) = if from_caplet {
        (parity_convert(r.caplet, 1.0, r.k_hat)?, r.caplet_err3)
    } else {
        (r.floorlet, r.floorlet_err3)
    };
    let iv = implied_vol_from_floorlet(price, 1.0, r.k_hat, tau)?;
    if iv.zero_time_value {
        // The chosen leg passed the threshold but the inversion still hit
        // its lower bound; treat it as dead rather than emit a floor vol.
        return Err(SabrError::DeadPoint {
            threshold: TIME_VALUE_FLOOR,
        });
    }
    let vega = black_vega(1.0, r.k_hat, iv.sigma, tau);
    Ok(McVolPoint {
        k_hat: r.k_hat,
        sigma: iv.sigma,
        vol_err3: err3 / vega,
        from_caplet,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::{black_price, BlackInputs};
    use approx::assert_relative_eq;

    fn exact_cell(k_hat: f64, sigma: f64, t: f64, flo_err3: f64, cap_err3: f64) -> McPriceResult {
        let price = |omega| {
            black_price(BlackInputs {
                fwd_shifted: 1.0,
                strike_shifted: k_hat,
                variance: sigma * sigma * t,
                omega,
            })
            .unwrap()
        };
        McPriceResult {
            t,
            k_hat,
            floorlet: price(-1),
            floorlet_err3: flo_err3,
            caplet: price(1),
            caplet_err3: cap_err3,
        }
    }

    #[test]
    fn recovers_vol_from_smaller_error_leg() {
        let t = 2.0;
        // OTM floorlet: floorlet leg has the smaller error.
        let r = exact_cell(0.8, 0.25, t, 1e-4, 4e-4);
        let pt = implied_vol_from_mc(&r, t).unwrap();
        assert!(!pt.from_caplet);
        assert_relative_eq!(pt.sigma, 0.25, max_relative = 1e-7);
        // ITM floorlet: caplet leg wins and is parity-converted.
        let r = exact_cell(1.3, 0.25, t, 4e-4, 1e-4);
        let pt = implied_vol_from_mc(&r, t).unwrap();
        assert!(pt.from_caplet);
        assert_relative_eq!(pt.sigma, 0.25, max_relative = 1e-7);
    }

    #[test]
    fn tie_goes_to_floorlet() {
        let r = exact_cell(1.0, 0.2, 1.0, 2e-4, 2e-4);
        let pt = implied_vol_from_mc(&r, 1.0).unwrap();
        assert!(!pt.from_caplet);
    }

    #[test]
    fn vol_error_scales_price_error_by_vega() {
        let t = 1.0;
        let r = exact_cell(1.0, 0.2, t, 2e-4, 9e-4);
        let pt = implied_vol_from_mc(&r, t).unwrap();
        let expected = 2e-4 / black_vega(1.0, 1.0, 0.2, t);
        assert_relative_eq!(pt.vol_err3, expected, max_relative = 1e-12);
    }

    #[test]
    fn dead_cell_is_an_error() {
        // Deep OTM floorlet with essentially zero time value on both legs.
        let r = McPriceResult {
            t: 0.5,
            k_hat: 0.2,
            floorlet: 0.0,
            floorlet_err3: 1e-9,
            caplet: 0.8,
            caplet_err3: 1e-6,
        };
        match implied_vol_from_mc(&r, 0.5) {
            Err(SabrError::DeadPoint { threshold }) => assert_eq!(threshold, 1e-13),
            other => panic!("expected dead point, got {other:?}"),
        }
    }

    #[test]
    fn below_intrinsic_noise_is_an_error() {
        // ITM floorlet whose caplet leg underprices parity so the implied
        // floorlet lands below intrinsic.
        let r = McPriceResult {
            t: 0.5,
            k_hat: 1.5,
            floorlet: 0.52,
            floorlet_err3: 2e-3,
            caplet: -1e-6,
            caplet_err3: 1e-3,
        };
        assert!(matches!(
            implied_vol_from_mc(&r, 0.5),
            Err(SabrError::PriceOutOfBounds(_))
        ));
    }
}
