//! Unbiased Monte Carlo engine for the scaled shifted-SABR terminal law.
//!
//! Log-Euler scheme on `ln X` and `ln sigma_hat` with one exponential per
//! path-step, an absorbing floor, and a counter-based normal generator, so
//! every path is a pure function of `(seed, path index)`. One path ensemble
//! is simulated to the last fixing time of a surface and payoffs are read
//! off at every requested date on the way. Paths are processed in fixed
//! blocks whose partial sums are reduced in block order with compensated
//! summation; results are bit-identical for any worker count.

mod implied;

pub use implied::{implied_vol_from_mc, McVolPoint};

use serde::{Deserialize, Serialize};

use crate::error::{validate_positive, SabrError};
use crate::math::rng::{path_step_counter, CounterRng};
use crate::math::KahanSum;
use crate::model::ScaledSabrParams;

/// Default forward floor: a path that falls to this level is frozen there
/// for the rest of its life.
pub const ABSORPTION_FLOOR: f64 = 1e-14;

/// Paths per reduction block. Fixing the block size fixes the summation
/// order, which is what makes the reduction independent of scheduling.
pub const BLOCK_PATHS: u64 = 4096;

/// Days per year of the simulation grid.
pub const DAYS_PER_YEAR: f64 = 365.0;

fn default_absorption_floor() -> f64 {
    ABSORPTION_FLOOR
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub n_paths: u64,
    /// Target step length in days; steps are shortened where needed to land
    /// exactly on each fixing date.
    pub dt_days: f64,
    pub seed: u64,
    #[serde(default = "default_absorption_floor")]
    pub absorption_floor: f64,
}

impl McConfig {
    pub fn new(n_paths: u64, dt_days: f64, seed: u64) -> Self {
        McConfig {
            n_paths,
            dt_days,
            seed,
            absorption_floor: ABSORPTION_FLOOR,
        }
    }

    pub fn validated(self) -> crate::Result<Self> {
        if self.n_paths < 2 {
            return Err(SabrError::InvalidInput(format!(
                "n_paths must be at least 2, got {}",
                self.n_paths
            )));
        }
        validate_positive("dt_days", self.dt_days)?;
        if !(self.absorption_floor > 0.0 && self.absorption_floor < 1.0) {
            return Err(SabrError::InvalidInput(format!(
                "absorption_floor must lie in (0,1), got {}",
                self.absorption_floor
            )));
        }
        Ok(self)
    }
}

/// Price estimate for one (fixing time, strike) cell in scaled units:
/// forward 1, strike `k_hat`, undiscounted, no year fraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McPriceResult {
    pub t: f64,
    pub k_hat: f64,
    pub floorlet: f64,
    /// Three standard errors of the floorlet mean.
    pub floorlet_err3: f64,
    pub caplet: f64,
    pub caplet_err3: f64,
}

impl McPriceResult {
    /// Population variance of the per-path payoff implied by the stored
    /// three-sigma error.
    pub fn payoff_variance(err3: f64, n_paths: u64) -> f64 {
        let se = err3 / 3.0;
        se * se * n_paths as f64
    }
}

/// Cross-sectional statistics at one fixing time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSlice {
    pub t: f64,
    /// Cumulative grid steps from 0 to this fixing time.
    pub n_steps: u32,
    /// Sample mean of X(t); 1 in expectation by the martingale property.
    pub mean_x: f64,
    pub var_x: f64,
    /// Paths absorbed at or before this fixing time.
    pub absorbed: u64,
    pub prices: Vec<McPriceResult>,
}

impl TimeSlice {
    pub fn mean_x_stderr(&self, n_paths: u64) -> f64 {
        (self.var_x / n_paths as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceResult {
    pub n_paths: u64,
    pub slices: Vec<TimeSlice>,
}

/// Simulation grid: uneven steps covering all fixing times.
///
/// Each inter-date segment takes `ceil(span * 365 / dt_days)` steps of the
/// target length with the last one shortened to land exactly on the date.
struct TimeGrid {
    dts: Vec<f64>,
    sqdts: Vec<f64>,
    /// One past the index of the step landing on each fixing time.
    fix_end: Vec<u32>,
}

impl TimeGrid {
    fn build(fixing_times: &[f64], dt_days: f64) -> crate::Result<TimeGrid> {
        if fixing_times.is_empty() {
            return Err(SabrError::InvalidInput("no fixing times".into()));
        }
        let step = dt_days / DAYS_PER_YEAR;
        let mut dts = Vec::new();
        let mut fix_end = Vec::with_capacity(fixing_times.len());
        let mut t_prev = 0.0_f64;
        for &t in fixing_times {
            if t <= t_prev {
                return Err(SabrError::InvalidInput(format!(
                    "fixing times must be positive and strictly ascending, got {t} after {t_prev}"
                )));
            }
            let span = t - t_prev;
            // Tolerate one-ulp overshoot of an exact division.
            let n = ((span / step) - 1e-9).ceil().max(1.0) as u64;
            for _ in 0..n - 1 {
                dts.push(step);
            }
            dts.push(span - (n - 1) as f64 * step);
            fix_end.push(dts.len() as u32);
            t_prev = t;
        }
        if dts.len() >= 1 << 16 {
            return Err(SabrError::InvalidInput(format!(
                "{} steps exceed the 2^16-1 grid limit",
                dts.len()
            )));
        }
        let sqdts = dts.iter().map(|d| d.sqrt()).collect();
        Ok(TimeGrid {
            dts,
            sqdts,
            fix_end,
        })
    }
}

/// Per-path ensemble state in level space, advanced one step at a time.
///
/// This is the slow reference form of the scheme, driven by externally
/// supplied normals; the production kernel below fuses the same updates in
/// log space. The two agree to rounding, which is asserted in tests.
#[derive(Debug, Clone)]
pub struct McState {
    pub x: Vec<f64>,
    pub sig: Vec<f64>,
    pub absorbed: Vec<bool>,
}

impl McState {
    pub fn new(n_paths: usize, p: &ScaledSabrParams) -> Self {
        Self::with_initial(n_paths, 1.0, p.alpha_hat)
    }

    /// Arbitrary starting point, e.g. the unscaled dynamics started at
    /// `(fbar0, alpha)`.
    pub fn with_initial(n_paths: usize, x0: f64, sig0: f64) -> Self {
        McState {
            x: vec![x0; n_paths],
            sig: vec![sig0; n_paths],
            absorbed: vec![false; n_paths],
        }
    }
}

/// One exponential-Euler step of the whole ensemble.
///
/// `normals[i]` carries the pair (orthogonal draw, vol driver) for path `i`;
/// the forward increment uses `rho * z_vol + sqrt(1-rho^2) * z_perp`. The
/// vol keeps evolving on absorbed paths, which is harmless as their forward
/// stays frozen at the floor.
pub fn advance_step(
    state: &mut McState,
    p: &ScaledSabrParams,
    dt_years: f64,
    normals: &[(f64, f64)],
    absorption_floor: f64,
) {
    debug_assert_eq!(state.x.len(), normals.len());
    let rho_perp = (1.0 - p.rho * p.rho).sqrt();
    let sqdt = dt_years.sqrt();
    let beta_m1 = p.beta - 1.0;
    for i in 0..state.x.len() {
        let (z_perp, z_vol) = normals[i];
        if !state.absorbed[i] {
            let g = state.sig[i] * state.x[i].powf(beta_m1);
            let dw = p.rho * z_vol + rho_perp * z_perp;
            let x = state.x[i] * (-0.5 * g * g * dt_years + g * sqdt * dw).exp();
            if x <= absorption_floor {
                state.x[i] = absorption_floor;
                state.absorbed[i] = true;
            } else {
                state.x[i] = x;
            }
        }
        state.sig[i] *= (-0.5 * p.nu * p.nu * dt_years + p.nu * sqdt * z_vol).exp();
    }
}

/// Immutable per-run scalars of the fused stepping kernel.
struct Kernel<'a> {
    ln_alpha_hat: f64,
    beta_m1: f64,
    rho: f64,
    rho_perp: f64,
    nu: f64,
    grid: &'a TimeGrid,
    ln_floor: f64,
}

impl<'a> Kernel<'a> {
    fn new(p: &ScaledSabrParams, grid: &'a TimeGrid, absorption_floor: f64) -> Self {
        Kernel {
            ln_alpha_hat: p.alpha_hat.ln(),
            beta_m1: p.beta - 1.0,
            rho: p.rho,
            rho_perp: (1.0 - p.rho * p.rho).sqrt(),
            nu: p.nu,
            grid,
            ln_floor: absorption_floor.ln(),
        }
    }

    /// Walk one path through the whole grid, invoking `record(slice_index,
    /// x)` at every fixing time. Absorbed paths stop stepping; later slices
    /// see the floor value. Skipped draws are harmless because every draw
    /// is addressed by (path, step), not by stream position.
    #[inline]
    fn run_path(&self, rng: &CounterRng, path: u64, floor: f64, mut record: impl FnMut(usize, f64)) {
        let mut ln_x = 0.0_f64;
        let mut ln_s = self.ln_alpha_hat;
        let mut fix = 0usize;
        let n_fix = self.grid.fix_end.len();
        for step in 0..self.grid.dts.len() {
            let dt = self.grid.dts[step];
            let sqdt = self.grid.sqdts[step];
            let z_perp = rng.normal(path_step_counter(path, step as u32, 0));
            let z_vol = rng.normal(path_step_counter(path, step as u32, 1));
            let g = (ln_s + self.beta_m1 * ln_x).exp();
            ln_x += -0.5 * g * g * dt + g * sqdt * (self.rho * z_vol + self.rho_perp * z_perp);
            if ln_x <= self.ln_floor {
                for i in fix..n_fix {
                    record(i, floor);
                }
                return;
            }
            ln_s += -0.5 * self.nu * self.nu * dt + self.nu * sqdt * z_vol;
            while fix < n_fix && self.grid.fix_end[fix] == (step + 1) as u32 {
                record(fix, ln_x.exp());
                fix += 1;
            }
        }
    }
}

/// Plain in-order partial sums of one block.
struct BlockAcc {
    /// Per slice: x sum, x^2 sum.
    x: Vec<[f64; 2]>,
    /// Per slice: paths absorbed at or before it.
    absorbed: Vec<u64>,
    /// Per slice, per strike: floorlet sum, floorlet square sum, caplet
    /// sum, caplet square sum.
    payoff: Vec<Vec<[f64; 4]>>,
}

fn run_block(
    kernel: &Kernel,
    rng: &CounterRng,
    paths: std::ops::Range<u64>,
    moneyness_per_time: &[Vec<f64>],
    floor: f64,
) -> BlockAcc {
    let n_fix = moneyness_per_time.len();
    let mut acc = BlockAcc {
        x: vec![[0.0; 2]; n_fix],
        absorbed: vec![0; n_fix],
        payoff: moneyness_per_time
            .iter()
            .map(|ks| vec![[0.0; 4]; ks.len()])
            .collect(),
    };
    for path in paths {
        kernel.run_path(rng, path, floor, |i, x| {
            acc.x[i][0] += x;
            acc.x[i][1] += x * x;
            acc.absorbed[i] += (x <= floor) as u64;
            for (slot, &k) in acc.payoff[i].iter_mut().zip(&moneyness_per_time[i]) {
                let d = x - k;
                if d > 0.0 {
                    slot[2] += d;
                    slot[3] += d * d;
                } else {
                    slot[0] -= d;
                    slot[1] += d * d;
                }
            }
        });
    }
    acc
}

/// Simulate one parameter set to the last fixing time and estimate both
/// caplet and floorlet prices at every (date, strike) of the surface.
///
/// Results are in scaled units (forward 1, undiscounted, no year fraction);
/// multiply by `fbar0` for prices in rate units. Implied vols can be read
/// off the scaled statistics directly since the Black vol is invariant
/// under the scaling.
pub fn price_surface(
    p: &ScaledSabrParams,
    fixing_times: &[f64],
    moneyness_per_time: &[Vec<f64>],
    cfg: &McConfig,
) -> crate::Result<SurfaceResult> {
    p.validated()?;
    let cfg = cfg.validated()?;
    if fixing_times.len() != moneyness_per_time.len() {
        return Err(SabrError::InvalidInput(format!(
            "{} fixing times vs {} strike lists",
            fixing_times.len(),
            moneyness_per_time.len()
        )));
    }
    for ks in moneyness_per_time {
        for &k in ks {
            validate_positive("k_hat", k)?;
        }
    }
    let grid = TimeGrid::build(fixing_times, cfg.dt_days)?;
    let kernel = Kernel::new(p, &grid, cfg.absorption_floor);
    let rng = CounterRng::new(cfg.seed);
    let floor = cfg.absorption_floor;

    let n_blocks = cfg.n_paths.div_ceil(BLOCK_PATHS);
    let block_range = |b: u64| {
        let lo = b * BLOCK_PATHS;
        lo..(lo + BLOCK_PATHS).min(cfg.n_paths)
    };

    #[cfg(feature = "parallel")]
    let blocks: Vec<BlockAcc> = {
        use rayon::prelude::*;
        (0..n_blocks)
            .into_par_iter()
            .map(|b| run_block(&kernel, &rng, block_range(b), moneyness_per_time, floor))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let blocks: Vec<BlockAcc> = (0..n_blocks)
        .map(|b| run_block(&kernel, &rng, block_range(b), moneyness_per_time, floor))
        .collect();

    // Fixed-order compensated reduction over blocks.
    let n = cfg.n_paths as f64;
    let n_fix = fixing_times.len();
    let mut x_tot = vec![[KahanSum::new(); 2]; n_fix];
    let mut absorbed = vec![0u64; n_fix];
    let mut payoff_tot: Vec<Vec<[KahanSum; 4]>> = moneyness_per_time
        .iter()
        .map(|ks| vec![[KahanSum::new(); 4]; ks.len()])
        .collect();
    for b in &blocks {
        for i in 0..n_fix {
            x_tot[i][0].add(b.x[i][0]);
            x_tot[i][1].add(b.x[i][1]);
            absorbed[i] += b.absorbed[i];
            for (acc, src) in payoff_tot[i].iter_mut().zip(&b.payoff[i]) {
                for (a, &s) in acc.iter_mut().zip(src) {
                    a.add(s);
                }
            }
        }
    }

    let moments = |sum: f64, sum2: f64| {
        let mean = sum / n;
        let var = (sum2 / n - mean * mean).max(0.0);
        (mean, var)
    };
    let err3 = |var: f64| 3.0 * (var / n).sqrt();
    let slices = (0..n_fix)
        .map(|i| {
            let (mean_x, var_x) = moments(x_tot[i][0].total(), x_tot[i][1].total());
            let prices = payoff_tot[i]
                .iter()
                .zip(&moneyness_per_time[i])
                .map(|(acc, &k_hat)| {
                    let (flo, flo_var) = moments(acc[0].total(), acc[1].total());
                    let (cap, cap_var) = moments(acc[2].total(), acc[3].total());
                    McPriceResult {
                        t: fixing_times[i],
                        k_hat,
                        floorlet: flo,
                        floorlet_err3: err3(flo_var),
                        caplet: cap,
                        caplet_err3: err3(cap_var),
                    }
                })
                .collect();
            TimeSlice {
                t: fixing_times[i],
                n_steps: grid.fix_end[i],
                mean_x,
                var_x,
                absorbed: absorbed[i],
                prices,
            }
        })
        .collect();
    Ok(SurfaceResult {
        n_paths: cfg.n_paths,
        slices,
    })
}

/// Single-maturity convenience wrapper around [`price_surface`].
pub fn simulate_terminal(
    p: &ScaledSabrParams,
    t: f64,
    k_hats: &[f64],
    cfg: &McConfig,
) -> crate::Result<TimeSlice> {
    let mut res = price_surface(p, &[t], &[k_hats.to_vec()], cfg)?;
    Ok(res.slices.pop().expect("one slice"))
}

/// Run `f` on a dedicated pool of `n_workers` threads (0 = the ambient
/// pool). Outputs do not depend on the choice.
#[cfg(feature = "parallel")]
pub fn with_worker_pool<R: Send>(n_workers: usize, f: impl FnOnce() -> R + Send) -> crate::Result<R> {
    if n_workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(n_workers)
        .build()
        .map_err(|e| SabrError::InvalidInput(format!("worker pool: {e}")))?;
    Ok(pool.install(f))
}

#[cfg(not(feature = "parallel"))]
pub fn with_worker_pool<R: Send>(n_workers: usize, f: impl FnOnce() -> R + Send) -> crate::Result<R> {
    let _ = n_workers;
    Ok(f())
}
