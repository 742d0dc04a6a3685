//! Per-maturity smile calibration.
//!
//! The objective is the vega-weighted RMSE between model and market
//! shifted-Black vols; weights are fixed at the market vols so the problem
//! stays a weighted least squares. Minimization runs a bounded quasi-Newton
//! search (BFGS with box projection and central-difference gradients) from
//! Latin-hypercube starting points, keeping the best local minimum.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::analytics::{black_vega, hagan_sln_vol_via_inversion};
use crate::dataset::{lhs_sample, subset_for_maturity, subset_ranges};
use crate::error::SabrError;
use crate::mlp::Router;
use crate::model::SabrParams;

/// Objective value substituted when the pricer rejects a parameter point.
pub const PENALTY: f64 = 1e6;

/// One maturity's market smile in shifted-Black vols.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketSmile {
    /// Fixing time in years.
    pub t: f64,
    pub f0: f64,
    pub lambda: f64,
    pub strikes: Vec<f64>,
    pub vols_sln: Vec<f64>,
}

impl MarketSmile {
    pub fn validated(self) -> crate::Result<Self> {
        if self.strikes.is_empty() || self.strikes.len() != self.vols_sln.len() {
            return Err(SabrError::InvalidInput(format!(
                "smile needs matching strikes and vols, got {} / {}",
                self.strikes.len(),
                self.vols_sln.len()
            )));
        }
        if !(self.t > 0.0) || !(self.f0 + self.lambda > 0.0) {
            return Err(SabrError::InvalidInput(
                "fixing time and shifted forward must be positive".into(),
            ));
        }
        if self.strikes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SabrError::InvalidInput("strikes must be strictly increasing".into()));
        }
        if self.strikes.iter().any(|&k| k + self.lambda <= 0.0) {
            return Err(SabrError::InvalidInput("shifted strikes must be positive".into()));
        }
        if self.vols_sln.iter().any(|&v| !(v > 0.0)) {
            return Err(SabrError::InvalidInput("vols must be positive".into()));
        }
        Ok(self)
    }

    pub fn fbar0(&self) -> f64 {
        self.f0 + self.lambda
    }
}

/// Read market smiles from a long-format CSV with columns
/// `t, f0, lambda, strike, vol`; consecutive rows of equal `t` form one
/// smile. Smiles come back validated, in file order.
pub fn read_smiles_csv(path: &std::path::Path) -> crate::Result<Vec<MarketSmile>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut smiles: Vec<MarketSmile> = Vec::new();
    for rec in rdr.deserialize() {
        let (t, f0, lambda, strike, vol): (f64, f64, f64, f64, f64) = rec?;
        match smiles.last_mut() {
            Some(s) if s.t == t && s.f0 == f0 && s.lambda == lambda => {
                s.strikes.push(strike);
                s.vols_sln.push(vol);
            }
            _ => smiles.push(MarketSmile {
                t,
                f0,
                lambda,
                strikes: vec![strike],
                vols_sln: vec![vol],
            }),
        }
    }
    smiles.into_iter().map(MarketSmile::validated).collect()
}

/// Inverse of [`read_smiles_csv`].
pub fn write_smiles_csv(path: &std::path::Path, smiles: &[MarketSmile]) -> crate::Result<()> {
    let mut wtr = csv::Writer::from_path(path)?;
    wtr.write_record(["t", "f0", "lambda", "strike", "vol"])?;
    for s in smiles {
        for (&k, &v) in s.strikes.iter().zip(&s.vols_sln) {
            wtr.serialize((s.t, s.f0, s.lambda, k, v))?;
        }
    }
    wtr.flush().map_err(SabrError::Io)?;
    Ok(())
}

/// Model-vol source used by the calibrator.
pub trait SmilePricer: Sync {
    fn vol(&self, p: &SabrParams, expiry: f64, strike: f64) -> crate::Result<f64>;

    fn vols(&self, p: &SabrParams, expiry: f64, strikes: &[f64]) -> crate::Result<Vec<f64>> {
        strikes.iter().map(|&k| self.vol(p, expiry, k)).collect()
    }

    fn name(&self) -> &'static str;
}

/// Hagan approximation pricer (normal vol, priced and inverted to
/// shifted-Black).
#[derive(Debug, Clone, Copy, Default)]
pub struct HaganPricer;

impl SmilePricer for HaganPricer {
    fn vol(&self, p: &SabrParams, expiry: f64, strike: f64) -> crate::Result<f64> {
        hagan_sln_vol_via_inversion(0.0, expiry, p.fbar0(), strike + p.lambda, p)
    }

    fn name(&self) -> &'static str {
        "hagan"
    }
}

/// Neural-surrogate pricer: scales the parameters, routes by maturity and
/// evaluates the network; vols are scale-invariant so the prediction applies
/// to the unscaled smile directly.
pub struct DnnPricer<'a> {
    pub router: &'a Router,
}

impl SmilePricer for DnnPricer<'_> {
    fn vol(&self, p: &SabrParams, expiry: f64, strike: f64) -> crate::Result<f64> {
        let scaled = p.scale()?;
        let k_hat = (strike + p.lambda) / p.fbar0();
        self.router.vol(scaled.alpha_hat, scaled.beta, scaled.rho, scaled.nu, expiry, k_hat)
    }

    fn vols(&self, p: &SabrParams, expiry: f64, strikes: &[f64]) -> crate::Result<Vec<f64>> {
        let scaled = p.scale()?;
        let model = self.router.model_for(expiry)?;
        let fbar0 = p.fbar0();
        let x = Array2::from_shape_fn((strikes.len(), 6), |(i, j)| match j {
            0 => scaled.alpha_hat,
            1 => scaled.beta,
            2 => scaled.rho,
            3 => scaled.nu,
            4 => expiry,
            _ => (strikes[i] + p.lambda) / fbar0,
        });
        Ok(model.forward_batch(&x).to_vec())
    }

    fn name(&self) -> &'static str {
        "dnn"
    }
}

/// Normalized vega weights at the market vols: xi_j = vega_j / sum(vega).
pub fn vega_weights(smile: &MarketSmile) -> crate::Result<Vec<f64>> {
    let fbar0 = smile.fbar0();
    let vegas: Vec<f64> = smile
        .strikes
        .iter()
        .zip(&smile.vols_sln)
        .map(|(&k, &v)| black_vega(fbar0, k + smile.lambda, v, smile.t))
        .collect();
    let total: f64 = vegas.iter().sum();
    if !(total > 0.0) {
        return Err(SabrError::InvalidInput("total vega must be positive".into()));
    }
    Ok(vegas.into_iter().map(|v| v / total).collect())
}

/// Weighted squared error; the internal minimization target. The square
/// root (the reported RMSE) has a conical minimum at exact fits which stalls
/// quasi-Newton steps, so optimization happens on this smooth surface.
fn weighted_mse(
    p: &SabrParams,
    smile: &MarketSmile,
    pricer: &dyn SmilePricer,
    weights: &[f64],
) -> f64 {
    match pricer.vols(p, smile.t, &smile.strikes) {
        Ok(vols) if vols.iter().all(|v| v.is_finite()) => vols
            .iter()
            .zip(&smile.vols_sln)
            .zip(weights)
            .map(|((&m, &mkt), &w)| w * (m - mkt) * (m - mkt))
            .sum(),
        _ => PENALTY * PENALTY,
    }
}

fn objective_weighted(
    p: &SabrParams,
    smile: &MarketSmile,
    pricer: &dyn SmilePricer,
    weights: &[f64],
) -> f64 {
    weighted_mse(p, smile, pricer, weights).sqrt()
}

/// Vega-weighted RMSE of model vols against the smile.
pub fn objective(
    p: &SabrParams,
    smile: &MarketSmile,
    pricer: &dyn SmilePricer,
) -> crate::Result<f64> {
    Ok(objective_weighted(p, smile, pricer, &vega_weights(smile)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibConfig {
    pub n_starts: usize,
    pub seed: u64,
    pub max_iters: usize,
    /// Stop once an iteration improves the objective by less than this.
    pub f_tol: f64,
    /// Central-difference step as a fraction of each parameter's box width.
    pub grad_h: f64,
}

impl Default for CalibConfig {
    fn default() -> Self {
        CalibConfig {
            n_starts: 300,
            seed: 0,
            max_iters: 200,
            f_tol: 1e-10,
            grad_h: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub params: SabrParams,
    /// Vega-weighted RMSE at the optimum.
    pub objective: f64,
    /// Signed model-minus-market vol per strike.
    pub residuals: Vec<f64>,
    pub n_starts: usize,
    pub converged: bool,
    /// Fewer strikes than free parameters.
    pub underdetermined: bool,
}

/// Box-projected BFGS from one starting point over the weighted-MSE
/// surface. Returns the final point, its MSE and whether the tolerance stop
/// fired (as opposed to the iteration cap).
fn local_minimize(
    start: &[f64; 4],
    bounds: &[(f64, f64); 4],
    f: &impl Fn(&[f64; 4]) -> f64,
    cfg: &CalibConfig,
) -> ([f64; 4], f64, bool) {
    let clip = |x: &mut [f64; 4]| {
        for i in 0..4 {
            x[i] = x[i].clamp(bounds[i].0, bounds[i].1);
        }
    };
    let grad = |x: &[f64; 4], fx: f64| {
        let mut g = [0.0; 4];
        for i in 0..4 {
            let h = cfg.grad_h * (bounds[i].1 - bounds[i].0);
            let (mut xp, mut xm) = (*x, *x);
            xp[i] = (x[i] + h).min(bounds[i].1);
            xm[i] = (x[i] - h).max(bounds[i].0);
            let span = xp[i] - xm[i];
            g[i] = if span > 0.0 {
                (f(&xp) - f(&xm)) / span
            } else {
                let _ = fx;
                0.0
            };
        }
        g
    };

    let mut x = *start;
    clip(&mut x);
    let mut fx = f(&x);
    let mut g = grad(&x, fx);
    let mut h_inv = Array2::<f64>::eye(4);
    let mut converged = false;

    for _ in 0..cfg.max_iters {
        if fx >= PENALTY * PENALTY || fx < 1e-22 {
            converged = fx < 1e-22;
            break;
        }
        let g_arr = Array1::from_iter(g);
        let mut d = -h_inv.dot(&g_arr);
        if d.dot(&g_arr) >= 0.0 {
            // Not a descent direction; fall back to steepest descent.
            h_inv = Array2::eye(4);
            d = -g_arr.clone();
        }
        // Backtracking line search on the projected step.
        let mut step = 1.0;
        let mut x_new = x;
        let mut f_new = fx;
        let mut moved = false;
        for _ in 0..40 {
            let mut cand = x;
            for i in 0..4 {
                cand[i] += step * d[i];
            }
            clip(&mut cand);
            if cand != x {
                let fc = f(&cand);
                if fc < fx {
                    x_new = cand;
                    f_new = fc;
                    moved = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !moved {
            converged = true;
            break;
        }
        let g_new = grad(&x_new, f_new);
        let s = Array1::from_iter((0..4).map(|i| x_new[i] - x[i]));
        let y = Array1::from_iter((0..4).map(|i| g_new[i] - g[i]));
        let sy = s.dot(&y);
        if sy > 1e-12 * s.dot(&s).sqrt() * y.dot(&y).sqrt() {
            // Inverse-Hessian BFGS update.
            let rho = 1.0 / sy;
            let hy = h_inv.dot(&y);
            let yhy = y.dot(&hy);
            let s_col = s.clone().insert_axis(ndarray::Axis(1));
            let hy_col = hy.insert_axis(ndarray::Axis(1));
            h_inv = &h_inv + &(&s_col.dot(&s_col.t()) * (rho * (1.0 + rho * yhy)))
                - &(&s_col.dot(&hy_col.t()) + &hy_col.dot(&s_col.t())) * rho;
        } else {
            h_inv = Array2::eye(4);
        }
        // Tolerance applies on the RMSE scale the caller reports.
        let improvement = fx.sqrt() - f_new.sqrt();
        x = x_new;
        fx = f_new;
        g = g_new;
        if improvement < cfg.f_tol {
            converged = true;
            break;
        }
    }
    (x, fx, converged)
}

fn param_bounds(t: f64) -> crate::Result<[(f64, f64); 4]> {
    let id = subset_for_maturity(t).ok_or_else(|| {
        SabrError::InvalidInput(format!("no calibration box covers maturity {t}"))
    })?;
    let r = subset_ranges(id);
    Ok([r.alpha, r.beta, r.rho, r.nu])
}

/// Calibrate one smile: LHS-draw `n_starts` parameter points in the box of
/// the smile's maturity subset, locally minimize from each and keep the best
/// (ties broken by the lowest start index).
pub fn calibrate_smile(
    smile: &MarketSmile,
    pricer: &dyn SmilePricer,
    cfg: &CalibConfig,
) -> crate::Result<CalibrationResult> {
    let smile = smile.clone().validated()?;
    if cfg.n_starts == 0 {
        return Err(SabrError::InvalidInput("need at least one start".into()));
    }
    let bounds = param_bounds(smile.t)?;
    let weights = vega_weights(&smile)?;
    let f = |x: &[f64; 4]| {
        let p = SabrParams {
            f0: smile.f0,
            lambda: smile.lambda,
            alpha: x[0],
            beta: x[1],
            rho: x[2],
            nu: x[3],
        };
        weighted_mse(&p, &smile, pricer, &weights)
    };
    let starts = lhs_sample(&bounds, cfg.n_starts, cfg.seed);

    let run_start = |s: &Vec<f64>| {
        let start = [s[0], s[1], s[2], s[3]];
        local_minimize(&start, &bounds, &f, cfg)
    };
    #[cfg(feature = "parallel")]
    let outcomes: Vec<([f64; 4], f64, bool)> = {
        use rayon::prelude::*;
        starts.par_iter().map(run_start).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<([f64; 4], f64, bool)> = starts.iter().map(run_start).collect();

    let mut best: Option<(usize, &([f64; 4], f64, bool))> = None;
    for (i, o) in outcomes.iter().enumerate() {
        if best.map_or(true, |(_, b)| o.1 < b.1) {
            best = Some((i, o));
        }
    }
    let (_, &(x, fx, converged)) = best.expect("at least one start");
    if !(fx < PENALTY * PENALTY) {
        return Err(SabrError::AllStartsFailed { n_starts: cfg.n_starts });
    }
    let fx = fx.sqrt();
    let params = SabrParams {
        f0: smile.f0,
        lambda: smile.lambda,
        alpha: x[0],
        beta: x[1],
        rho: x[2],
        nu: x[3],
    };
    let model_vols = pricer.vols(&params, smile.t, &smile.strikes)?;
    let residuals = model_vols
        .iter()
        .zip(&smile.vols_sln)
        .map(|(&m, &mkt)| m - mkt)
        .collect();
    Ok(CalibrationResult {
        params,
        objective: fx,
        residuals,
        n_starts: cfg.n_starts,
        converged,
        underdetermined: smile.strikes.len() < 4,
    })
}

/// Independent per-maturity calibrations; failures are collected per smile
/// and do not stop the run.
pub fn term_structure_calibrate(
    smiles: &[MarketSmile],
    pricer: &dyn SmilePricer,
    cfg: &CalibConfig,
) -> Vec<crate::Result<CalibrationResult>> {
    smiles
        .iter()
        .map(|s| calibrate_smile(s, pricer, cfg))
        .collect()
}

/// Root mean square relative distance of model vols against MC vols.
pub fn rmsd(model_vols: &[f64], mc_vols: &[f64]) -> crate::Result<f64> {
    if model_vols.is_empty() || model_vols.len() != mc_vols.len() {
        return Err(SabrError::InvalidInput("need matching non-empty vol lists".into()));
    }
    let mut sum = 0.0;
    for (&m, &mc) in model_vols.iter().zip(mc_vols) {
        sum += relative_diff(m, mc)?.powi(2);
    }
    Ok((sum / model_vols.len() as f64).sqrt())
}

/// Absolute relative vol difference |model/mc - 1|.
pub fn ard(model_vol: f64, mc_vol: f64) -> crate::Result<f64> {
    Ok(relative_diff(model_vol, mc_vol)?.abs())
}

fn relative_diff(model: f64, mc: f64) -> crate::Result<f64> {
    if !(mc > 0.0) {
        return Err(SabrError::InvalidInput(format!(
            "reference vol must be positive, got {mc}"
        )));
    }
    Ok(model / mc - 1.0)
}
