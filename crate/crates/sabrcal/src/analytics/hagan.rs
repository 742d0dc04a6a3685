//! Closed-form implied-vol approximation for the shifted-SABR model.
//!
//! Three entry points with one expansion underneath:
//! `hagan_normal_vol` is the normal (Bachelier) vol of the 2016-style
//! expansion; `hagan_lognormal_vol` maps it to shifted-Black vol with the
//! approximate conversion factor; `hagan_sln_vol_via_inversion` instead
//! prices under the normal vol and inverts the shifted-Black formula
//! numerically, which is the representation used for calibration.

use crate::analytics::black::bachelier_price;
use crate::analytics::implied::{implied_vol_from_floorlet, parity_convert};
use crate::model::SabrParams;

/// Strikes within this relative distance of the forward use the ATM branch.
const ATM_THRESHOLD: f64 = 1e-8;

/// Below this |z| the z-dependent ratios switch to Taylor series; the direct
/// expressions are 0/0 at z=0.
const Z_TAYLOR: f64 = 1e-6;

/// Intermediate scalars of the expansion, exposed for diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct HaganTerms {
    pub tau: f64,
    /// Effective vol parameter with the first-order drift correction.
    pub alpha_bar: f64,
    /// CEV curvature coefficient at the forward.
    pub delta0: f64,
    pub z: f64,
    /// `E(z) = sqrt(1 + 2 rho z + z^2)`.
    pub e: f64,
    /// `Y(z) = ln[(z + rho + E) / (1 + rho)]`; reported as `z / (z/Y)` on
    /// the Taylor path.
    pub y: f64,
    pub theta: f64,
    /// `Z(z)`: `1 + Theta tau` for `Theta >= 0`, else `1/(1 - Theta tau)`.
    pub z_factor: f64,
    pub normal_vol: f64,
}

fn z_factor(theta: f64, tau: f64) -> f64 {
    if theta >= 0.0 {
        1.0 + theta * tau
    } else {
        1.0 / (1.0 - theta * tau)
    }
}

/// Full term set behind [`hagan_normal_vol`].
///
/// `fwd_shifted`/`strike_shifted` must be positive and `expiry > t`; the
/// dynamics come from `p` (its forward fields are not read here, so the
/// same parameters can be evaluated against any pricing-time forward).
pub fn hagan_normal_terms(
    t: f64,
    expiry: f64,
    fwd_shifted: f64,
    strike_shifted: f64,
    p: &SabrParams,
) -> HaganTerms {
    let tau = expiry - t;
    debug_assert!(tau > 0.0 && fwd_shifted > 0.0 && strike_shifted > 0.0);
    let (fb, kb) = (fwd_shifted, strike_shifted);
    let (alpha, beta, nu) = (p.alpha, p.beta, p.nu);
    // The expansion is singular at |rho| = 1; back off by an invisible hair.
    let rho = p.rho.clamp(-1.0 + 1e-10, 1.0 - 1e-10);

    // Keeping the drift-corrected alpha positive keeps the objective finite
    // when an optimizer probes extreme box corners.
    let alpha_bar = alpha * (1.0 + 0.25 * alpha * beta * rho * nu * fb.powf(beta - 1.0) * tau).max(1e-6);
    let delta0 = -beta * (2.0 - beta) / (8.0 * fb.powf(2.0 - 2.0 * beta));

    if (kb - fb).abs() < ATM_THRESHOLD * fb {
        let theta = nu * nu / 24.0 * (2.0 - 3.0 * rho * rho) + alpha_bar * alpha_bar * delta0 / 3.0;
        let zf = z_factor(theta, tau);
        return HaganTerms {
            tau,
            alpha_bar,
            delta0,
            z: 0.0,
            e: 1.0,
            y: 0.0,
            theta,
            z_factor: zf,
            normal_vol: alpha_bar * fb.powf(beta) * zf,
        };
    }

    let l = ((kb - fb) / fb).ln_1p();
    let one_m_beta = 1.0 - beta;
    // z and the moneyness prefactor, written so that prefactor * (z/Y)
    // equals nu (Kb - Fb) / Y while staying finite for nu -> 0 and Kb -> Fb.
    let (z, prefactor) = if one_m_beta == 0.0 {
        (nu / alpha_bar * l, alpha_bar * (kb - fb) / l)
    } else {
        let w = (one_m_beta * l).exp_m1();
        (
            nu / alpha_bar * fb.powf(one_m_beta) * w / one_m_beta,
            alpha_bar * one_m_beta * (kb - fb) / (fb.powf(one_m_beta) * w),
        )
    };

    let e = (1.0 + 2.0 * rho * z + z * z).sqrt();
    let (z_over_y, a, b, y) = if z.abs() < Z_TAYLOR {
        let r2 = rho * rho;
        let zy = 1.0
            + rho * z / 2.0
            + (1.0 / 6.0 - r2 / 4.0) * z * z
            + (rho * r2 / 4.0 - 5.0 * rho / 24.0) * z * z * z
            + (-5.0 * r2 * r2 / 16.0 + r2 / 3.0 - 17.0 / 360.0) * z * z * z * z;
        let a = (1.0 - r2) * (1.0 - rho * z + (9.0 * r2 - 2.0) * z * z / 6.0);
        let b = 1.0 + r2 + 2.0 * rho * z + (2.0 - r2) * z * z / 3.0;
        (zy, a, b, z / zy)
    } else {
        let y = ((z + rho + e) / (1.0 + rho)).ln();
        (
            z / y,
            (z + rho - rho * e) / (y * e),
            ((z + rho) * e - rho) / y,
            y,
        )
    };
    let theta = nu * nu / 24.0 * (-1.0 + 3.0 * a)
        + alpha_bar * alpha_bar * delta0 / 6.0 * (1.0 - rho * rho + b);
    let zf = z_factor(theta, tau);
    HaganTerms {
        tau,
        alpha_bar,
        delta0,
        z,
        e,
        y,
        theta,
        z_factor: zf,
        normal_vol: prefactor * z_over_y * zf,
    }
}

/// Approximate normal (Bachelier) vol of shifted-SABR.
pub fn hagan_normal_vol(
    t: f64,
    expiry: f64,
    fwd_shifted: f64,
    strike_shifted: f64,
    p: &SabrParams,
) -> f64 {
    hagan_normal_terms(t, expiry, fwd_shifted, strike_shifted, p).normal_vol
}

/// Approximate shifted-Black vol: normal vol times the approximate
/// conversion factor off-ATM, closed-form expansion at ATM.
pub fn hagan_lognormal_vol(
    t: f64,
    expiry: f64,
    fwd_shifted: f64,
    strike_shifted: f64,
    p: &SabrParams,
) -> f64 {
    let tau = expiry - t;
    debug_assert!(tau > 0.0 && fwd_shifted > 0.0 && strike_shifted > 0.0);
    let (fb, kb) = (fwd_shifted, strike_shifted);
    let (alpha, beta, rho, nu) = (p.alpha, p.beta, p.rho, p.nu);

    if (kb - fb).abs() < ATM_THRESHOLD * fb {
        let fpow = fb.powf(1.0 - beta);
        let bracket = alpha * alpha * (1.0 - beta) * (1.0 - beta) / (24.0 * fpow * fpow)
            + alpha * beta * rho * nu / (4.0 * fpow)
            + nu * nu * (2.0 - 3.0 * rho * rho) / 24.0;
        return alpha / fpow * (1.0 + bracket * tau);
    }
    let sigma_n = hagan_normal_vol(t, expiry, fb, kb, p);
    let sigma_n_atm = hagan_normal_vol(t, expiry, fb, fb, p);
    let l = ((kb - fb) / fb).ln_1p();
    sigma_n * l / (kb - fb) * (1.0 + sigma_n_atm * sigma_n_atm * tau / (24.0 * fb * kb))
}

/// Shifted-Black vol obtained by pricing the OTM option under the normal vol
/// and inverting the shifted-Black formula by bisection.
pub fn hagan_sln_vol_via_inversion(
    t: f64,
    expiry: f64,
    fwd_shifted: f64,
    strike_shifted: f64,
    p: &SabrParams,
) -> crate::Result<f64> {
    let tau = expiry - t;
    let sigma_n = hagan_normal_vol(t, expiry, fwd_shifted, strike_shifted, p);
    let variance = sigma_n * sigma_n * tau;
    // Price the OTM side for precision, then move to the floorlet.
    let floorlet = if strike_shifted >= fwd_shifted {
        let caplet = bachelier_price(fwd_shifted, strike_shifted, variance, 1);
        parity_convert(caplet, fwd_shifted, strike_shifted)?
    } else {
        bachelier_price(fwd_shifted, strike_shifted, variance, -1)
    };
    Ok(implied_vol_from_floorlet(floorlet, fwd_shifted, strike_shifted, tau)?.sigma)
}
