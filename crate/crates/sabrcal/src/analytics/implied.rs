//! Implied-volatility inversion of the shifted-Black formula.
//!
//! Inversion always operates on the Floorlet price: its payoff is bounded by
//! the strike so the map price -> vol stays well conditioned at every strike.
//! Caplet prices are first converted through put-call parity.

use crate::analytics::black::{black_price, BlackInputs};
use crate::error::SabrError;

/// Prices below this time value are treated as numerically zero and mapped to
/// the vol floor instead of bisecting into noise.
pub const TIME_VALUE_FLOOR: f64 = 1e-13;

/// Lower bracket end; also the vol reported for prices without measurable
/// time value.
const SIGMA_FLOOR: f64 = 1e-8;

/// Bisection stops once the bracketing prices agree to this tolerance.
const PRICE_TOL: f64 = 1e-12;

const MAX_STEPS: usize = 200;

/// Result of an implied-vol inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpliedVol {
    pub sigma: f64,
    /// The price carried no resolvable time value; `sigma` is the floor
    /// boundary, not a solve.
    pub zero_time_value: bool,
}

/// Convert a Caplet price to the Floorlet price at the same strike,
/// `P = C - (Fbar - Kbar)`.
///
/// Slightly negative results from rounding (within `1e-12`) are clamped to
/// zero; anything lower is an arbitrage violation and rejected.
pub fn parity_convert(caplet_price: f64, fwd_shifted: f64, strike_shifted: f64) -> crate::Result<f64> {
    let floorlet = caplet_price - (fwd_shifted - strike_shifted);
    if floorlet < -1e-12 {
        return Err(SabrError::PriceOutOfBounds(format!(
            "caplet price {caplet_price} below intrinsic {}",
            fwd_shifted - strike_shifted
        )));
    }
    Ok(floorlet.max(0.0))
}

/// Invert a Floorlet price to a shifted-Black vol by bisection.
///
/// The initial bracket is `[1e-8, 1]`; the upper end doubles until it
/// contains the root. Iteration stops when the bracketing prices agree
/// within `1e-12`, so the reported vol resolves the price to that tolerance.
pub fn implied_vol_from_floorlet(
    price: f64,
    fwd_shifted: f64,
    strike_shifted: f64,
    tau: f64,
) -> crate::Result<ImpliedVol> {
    if !(fwd_shifted > 0.0) || !(strike_shifted > 0.0) || !(tau > 0.0) {
        return Err(SabrError::InvalidInput(format!(
            "implied vol needs positive fwd/strike/tau, got {fwd_shifted}/{strike_shifted}/{tau}"
        )));
    }
    if !price.is_finite() {
        return Err(SabrError::InvalidInput(format!("price {price} is not finite")));
    }
    let intrinsic = (strike_shifted - fwd_shifted).max(0.0);
    if price < intrinsic - 1e-12 {
        return Err(SabrError::PriceOutOfBounds(format!(
            "floorlet price {price} below intrinsic {intrinsic}"
        )));
    }
    // A floorlet is worth at most the (shifted) strike, reached only as
    // sigma -> infinity.
    if price >= strike_shifted {
        return Err(SabrError::PriceOutOfBounds(format!(
            "floorlet price {price} at or above strike bound {strike_shifted}"
        )));
    }
    if price - intrinsic < TIME_VALUE_FLOOR {
        return Ok(ImpliedVol {
            sigma: SIGMA_FLOOR,
            zero_time_value: true,
        });
    }

    let price_at = |sigma: f64| {
        black_price(BlackInputs {
            fwd_shifted,
            strike_shifted,
            variance: sigma * sigma * tau,
            omega: -1,
        })
        .expect("validated inputs")
    };

    let mut lo = SIGMA_FLOOR;
    let mut p_lo = price_at(lo);
    if p_lo >= price {
        // Root sits below the floor: the vol is indistinguishable from zero
        // at price resolution.
        return Ok(ImpliedVol {
            sigma: SIGMA_FLOOR,
            zero_time_value: true,
        });
    }
    let mut hi = 1.0;
    let mut p_hi = price_at(hi);
    while p_hi < price {
        lo = hi;
        p_lo = p_hi;
        hi *= 2.0;
        p_hi = price_at(hi);
    }

    for _ in 0..MAX_STEPS {
        if p_hi - p_lo < PRICE_TOL {
            return Ok(ImpliedVol {
                sigma: 0.5 * (lo + hi),
                zero_time_value: false,
            });
        }
        let mid = 0.5 * (lo + hi);
        let p_mid = price_at(mid);
        if p_mid < price {
            lo = mid;
            p_lo = p_mid;
        } else {
            hi = mid;
            p_hi = p_mid;
        }
    }
    Err(SabrError::NonConvergence {
        steps: MAX_STEPS,
        lo,
        hi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn price(f: f64, k: f64, sigma: f64, tau: f64, omega: i8) -> f64 {
        black_price(BlackInputs {
            fwd_shifted: f,
            strike_shifted: k,
            variance: sigma * sigma * tau,
            omega,
        })
        .unwrap()
    }

    #[test]
    fn round_trip_across_strikes_and_vols() {
        use crate::analytics::black::black_vega;
        let f = 1.03;
        let mut solved = 0;
        for k in [0.53, 0.73, 1.03, 1.23, 1.43] {
            for sigma in [0.05, 0.13, 0.3, 0.7, 1.5] {
                for tau in [0.5, 2.0, 10.0] {
                    // The solve resolves the price to 1e-12, so the vol
                    // error is 1e-12/vega; only assert where vega gives
                    // real resolution.
                    if black_vega(f, k, sigma, tau) < 1e-3 {
                        continue;
                    }
                    let p = price(f, k, sigma, tau, -1);
                    let iv = implied_vol_from_floorlet(p, f, k, tau).unwrap();
                    assert!(!iv.zero_time_value, "k={k} sigma={sigma} tau={tau}");
                    assert_relative_eq!(iv.sigma, sigma, epsilon = 1e-7);
                    solved += 1;
                }
            }
        }
        assert!(solved > 50, "only {solved} cells exercised");
    }

    #[test]
    fn atm_round_trip_tight() {
        let p = price(1.03, 1.03, 0.2, 2.0, -1);
        let iv = implied_vol_from_floorlet(p, 1.03, 1.03, 2.0).unwrap();
        assert_relative_eq!(iv.sigma, 0.2, epsilon = 1e-9);
    }

    #[test]
    fn caplet_round_trip_via_parity() {
        let (f, tau) = (1.03, 2.0);
        for k in [0.63, 1.03, 1.33] {
            for sigma in [0.1, 0.4] {
                let c = price(f, k, sigma, tau, 1);
                let p = parity_convert(c, f, k).unwrap();
                let iv = implied_vol_from_floorlet(p, f, k, tau).unwrap();
                assert_relative_eq!(iv.sigma, sigma, epsilon = 1e-7);
            }
        }
    }

    #[test]
    fn high_vol_reached_by_bracket_doubling() {
        let p = price(1.03, 1.03, 4.5, 2.0, -1);
        let iv = implied_vol_from_floorlet(p, 1.03, 1.03, 2.0).unwrap();
        assert_relative_eq!(iv.sigma, 4.5, epsilon = 1e-8);
    }

    #[test]
    fn zero_time_value_reports_floor() {
        // Deep ITM floorlet with tiny vol: time value below resolution.
        let iv = implied_vol_from_floorlet(0.5, 1.03, 1.53, 0.5).unwrap();
        assert!(iv.zero_time_value);
        assert_eq!(iv.sigma, 1e-8);
        // Exactly intrinsic.
        let iv = implied_vol_from_floorlet(0.0, 1.03, 0.53, 2.0).unwrap();
        assert!(iv.zero_time_value);
    }

    #[test]
    fn sub_floor_root_reports_floor() {
        // ATM price with time value above the dataset floor but below what
        // sigma = 1e-8 produces: root is under the bracket.
        let iv = implied_vol_from_floorlet(1e-10, 1.03, 1.03, 2.0).unwrap();
        assert!(iv.zero_time_value);
        assert_eq!(iv.sigma, 1e-8);
    }

    #[test]
    fn out_of_bounds_prices_rejected() {
        // Below intrinsic.
        assert!(matches!(
            implied_vol_from_floorlet(0.4, 1.03, 1.53, 0.5),
            Err(SabrError::PriceOutOfBounds(_))
        ));
        // At and above the strike bound.
        assert!(matches!(
            implied_vol_from_floorlet(1.53, 1.03, 1.53, 0.5),
            Err(SabrError::PriceOutOfBounds(_))
        ));
        assert!(matches!(
            implied_vol_from_floorlet(1.6, 1.03, 1.53, 0.5),
            Err(SabrError::PriceOutOfBounds(_))
        ));
        // Caplet below intrinsic through parity.
        assert!(matches!(
            parity_convert(0.3, 1.03, 0.53),
            Err(SabrError::PriceOutOfBounds(_))
        ));
    }

    #[test]
    fn parity_clamps_rounding_noise() {
        let p = parity_convert(0.5 - 5e-13, 1.03, 0.53).unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn bisection_is_deterministic() {
        let p = price(1.03, 0.93, 0.21731, 2.0, -1);
        let a = implied_vol_from_floorlet(p, 1.03, 0.93, 2.0).unwrap();
        let b = implied_vol_from_floorlet(p, 1.03, 0.93, 2.0).unwrap();
        assert_eq!(a.sigma.to_bits(), b.sigma.to_bits());
    }

    #[test]
    fn wing_round_trip_stays_tight() {
        // Far OTM floorlet: price tolerance 1e-12 over vega ~0.06 keeps the
        // vol within ~1e-10.
        let (f, k, tau, sigma) = (1.03, 0.35, 1.5, 0.5);
        let p = price(f, k, sigma, tau, -1);
        let iv = implied_vol_from_floorlet(p, f, k, tau).unwrap();
        assert_relative_eq!(iv.sigma, sigma, epsilon = 1e-9);
    }
}
