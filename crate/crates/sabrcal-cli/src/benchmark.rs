//! `benchmark`: Monte Carlo price tables for two shifted-SABR parameter
//! sets and the shifted-Black limit with analytic payoff variances.
//!
//! Rerunning with the same seed reproduces the CSV files byte for byte.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use sabrcal::analytics::{black_payoff_variance, black_price, BlackInputs};
use sabrcal::error::SabrError;
use sabrcal::mc::{price_surface, McConfig, McPriceResult};
use sabrcal::model::SabrParams;
use serde::{Deserialize, Serialize};

use crate::manifest;

const CASE_I: SabrParams = SabrParams {
    f0: 1.0,
    lambda: 0.03,
    alpha: 0.1178,
    beta: 0.8738,
    rho: -0.0702,
    nu: 0.5010,
};

const CASE_II: SabrParams = SabrParams {
    f0: 1.0,
    lambda: 0.03,
    alpha: 0.1822,
    beta: 0.3044,
    rho: 0.1243,
    nu: 0.3127,
};

const CASE_MATURITIES: [f64; 2] = [2.0, 10.0];
const BLACK_MATURITY: f64 = 2.0;
const BLACK_ALPHAS: [f64; 3] = [0.1, 0.3, 0.5];

fn case_strikes() -> Vec<f64> {
    (5..=14).map(|i| i as f64 / 10.0).collect()
}

fn black_strikes() -> Vec<f64> {
    (7..=13).map(|i| i as f64 / 10.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TableSel {
    Case1,
    Case2,
    Black,
    All,
}

#[derive(Args)]
pub struct BenchmarkArgs {
    /// Output directory for the CSV tables.
    #[arg(long)]
    out: PathBuf,
    /// Monte Carlo paths.
    #[arg(long)]
    paths: Option<u64>,
    /// Time step in days.
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value = "all")]
    table: TableSel,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkDefaults {
    pub paths: Option<u64>,
    pub dt: Option<f64>,
}

#[derive(Serialize)]
struct Resolved {
    out: PathBuf,
    paths: u64,
    dt_days: f64,
    seed: u64,
    table: TableSel,
}

/// Price one parameter set at the benchmark maturities and strikes; rows
/// come back in rate units.
fn case_table(p: &SabrParams, cfg: &McConfig, path: &Path) -> sabrcal::Result<()> {
    let scaled = p.scale()?;
    let fbar0 = p.fbar0();
    let strikes = case_strikes();
    let moneyness: Vec<f64> = strikes.iter().map(|&k| (k + p.lambda) / fbar0).collect();
    let res = price_surface(
        &scaled,
        &CASE_MATURITIES,
        &vec![moneyness; CASE_MATURITIES.len()],
        cfg,
    )?;
    let mut wtr = csv::Writer::from_path(path)?;
    wtr.write_record([
        "maturity", "strike", "floorlet", "floorlet_err3", "caplet", "caplet_err3",
    ])?;
    for (slice, &t) in res.slices.iter().zip(&CASE_MATURITIES) {
        for (r, &k) in slice.prices.iter().zip(&strikes) {
            wtr.serialize((
                t,
                k,
                fbar0 * r.floorlet,
                fbar0 * r.floorlet_err3,
                fbar0 * r.caplet,
                fbar0 * r.caplet_err3,
            ))?;
        }
    }
    wtr.flush().map_err(SabrError::Io)?;
    Ok(())
}

/// The nu = 0, beta = 1 limit: MC estimates against closed-form
/// shifted-Black prices and payoff variances.
fn black_table(cfg: &McConfig, path: &Path) -> sabrcal::Result<()> {
    let strikes = black_strikes();
    let mut wtr = csv::Writer::from_path(path)?;
    wtr.write_record([
        "alpha",
        "strike",
        "floorlet",
        "floorlet_err3",
        "caplet",
        "caplet_err3",
        "floorlet_analytic",
        "caplet_analytic",
        "floorlet_var_mc",
        "caplet_var_mc",
        "floorlet_var_analytic",
        "caplet_var_analytic",
    ])?;
    for &alpha in &BLACK_ALPHAS {
        let p = SabrParams {
            alpha,
            beta: 1.0,
            rho: 0.0,
            nu: 0.0,
            ..CASE_I
        };
        let scaled = p.scale()?;
        let fbar0 = p.fbar0();
        let moneyness: Vec<f64> = strikes.iter().map(|&k| (k + p.lambda) / fbar0).collect();
        let res = price_surface(&scaled, &[BLACK_MATURITY], &[moneyness], cfg)?;
        for (r, &k) in res.slices[0].prices.iter().zip(&strikes) {
            let inputs = |omega: i8| BlackInputs {
                fwd_shifted: fbar0,
                strike_shifted: k + p.lambda,
                variance: alpha * alpha * BLACK_MATURITY,
                omega,
            };
            wtr.serialize((
                alpha,
                k,
                fbar0 * r.floorlet,
                fbar0 * r.floorlet_err3,
                fbar0 * r.caplet,
                fbar0 * r.caplet_err3,
                black_price(inputs(-1))?,
                black_price(inputs(1))?,
                McPriceResult::payoff_variance(fbar0 * r.floorlet_err3, cfg.n_paths),
                McPriceResult::payoff_variance(fbar0 * r.caplet_err3, cfg.n_paths),
                black_payoff_variance(inputs(-1))?,
                black_payoff_variance(inputs(1))?,
            ))?;
        }
    }
    wtr.flush().map_err(SabrError::Io)?;
    Ok(())
}

pub fn run(args: BenchmarkArgs, defaults: &BenchmarkDefaults) -> sabrcal::Result<()> {
    let cfg = McConfig::new(
        args.paths.or(defaults.paths).unwrap_or(1 << 20),
        args.dt.or(defaults.dt).unwrap_or(0.5),
        args.seed,
    );
    std::fs::create_dir_all(&args.out)?;
    if matches!(args.table, TableSel::Case1 | TableSel::All) {
        let path = args.out.join("case1.csv");
        case_table(&CASE_I, &cfg, &path)?;
        println!("{}", path.display());
    }
    if matches!(args.table, TableSel::Case2 | TableSel::All) {
        let path = args.out.join("case2.csv");
        case_table(&CASE_II, &cfg, &path)?;
        println!("{}", path.display());
    }
    if matches!(args.table, TableSel::Black | TableSel::All) {
        let path = args.out.join("black_limit.csv");
        black_table(&cfg, &path)?;
        println!("{}", path.display());
    }
    let resolved = Resolved {
        out: args.out.clone(),
        paths: cfg.n_paths,
        dt_days: cfg.dt_days,
        seed: args.seed,
        table: args.table,
    };
    manifest::write(&manifest::in_dir(&args.out), "benchmark", &resolved)?;
    Ok(())
}
