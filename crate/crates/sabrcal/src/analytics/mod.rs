//! Closed-form pricing layer: shifted-Black and Bachelier formulas, vega,
//! payoff variance, implied-vol bisection and the Hagan asymptotic
//! approximation of the shifted-SABR smile.

mod black;
mod hagan;
mod implied;

pub use black::{
    bachelier_price, black_payoff_variance, black_price, black_vega, BlackInputs,
};
pub use hagan::{
    hagan_lognormal_vol, hagan_normal_vol, hagan_sln_vol_via_inversion, HaganTerms,
};
pub use implied::{implied_vol_from_floorlet, parity_convert, ImpliedVol, TIME_VALUE_FLOOR};
