//! `calibrate`: fit SABR parameters to market smiles, one maturity at a
//! time, with either the Hagan approximation or the DNN surrogate.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use sabrcal::calib::{
    read_smiles_csv, term_structure_calibrate, CalibConfig, CalibrationResult, DnnPricer,
    HaganPricer, SmilePricer,
};
use sabrcal::error::SabrError;
use sabrcal::mlp::{MlpModel, Router};
use serde::{Deserialize, Serialize};

use crate::manifest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PricerKind {
    Hagan,
    Dnn,
}

/// Load whichever `dnn_subset{1,2,3}.json` files exist in the directory.
pub fn load_router(dir: &Path) -> sabrcal::Result<Router> {
    let mut router = Router::default();
    let mut found = 0;
    for id in 1..=3u8 {
        let path = dir.join(format!("dnn_subset{id}.json"));
        if path.exists() {
            router.insert(id, MlpModel::load(&path)?)?;
            found += 1;
        }
    }
    if found == 0 {
        return Err(SabrError::InvalidInput(format!(
            "no dnn_subset*.json weight files in {}",
            dir.display()
        )));
    }
    Ok(router)
}

/// Run `f` with the selected pricer; the DNN variant borrows a router
/// loaded from `models`.
pub fn with_pricer<R>(
    kind: PricerKind,
    models: Option<&PathBuf>,
    f: impl FnOnce(&dyn SmilePricer) -> sabrcal::Result<R>,
) -> sabrcal::Result<R> {
    match kind {
        PricerKind::Hagan => f(&HaganPricer),
        PricerKind::Dnn => {
            let dir = models.ok_or_else(|| {
                SabrError::InvalidInput("--pricer dnn needs --models DIR".into())
            })?;
            let router = load_router(dir)?;
            f(&DnnPricer { router: &router })
        }
    }
}

#[derive(Args)]
pub struct CalibrateArgs {
    #[arg(long, value_enum)]
    pricer: PricerKind,
    /// Market smiles CSV (t, f0, lambda, strike, vol).
    #[arg(long)]
    surface: PathBuf,
    /// Directory of DNN weight files (dnn only).
    #[arg(long)]
    models: Option<PathBuf>,
    /// Output directory: per-smile JSON plus term_structure.csv.
    #[arg(long)]
    out: PathBuf,
    /// Multistart count.
    #[arg(long)]
    starts: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_iters: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrateDefaults {
    pub starts: Option<usize>,
    pub max_iters: Option<usize>,
}

#[derive(Serialize)]
struct Resolved {
    pricer: PricerKind,
    surface: PathBuf,
    models: Option<PathBuf>,
    out: PathBuf,
    calib: CalibConfig,
}

/// One line of `term_structure.csv`; extra columns after the parameters are
/// informational and ignored by readers.
pub fn write_term_structure(
    path: &Path,
    rows: &[(f64, f64, f64, &CalibrationResult)],
) -> sabrcal::Result<()> {
    let mut wtr = csv::Writer::from_path(path)?;
    wtr.write_record([
        "t", "f0", "lambda", "alpha", "beta", "rho", "nu", "objective", "converged",
    ])?;
    for &(t, f0, lambda, r) in rows {
        wtr.serialize((
            t,
            f0,
            lambda,
            r.params.alpha,
            r.params.beta,
            r.params.rho,
            r.params.nu,
            r.objective,
            r.converged,
        ))?;
    }
    wtr.flush().map_err(SabrError::Io)?;
    Ok(())
}

pub fn run(args: CalibrateArgs, defaults: &CalibrateDefaults) -> sabrcal::Result<()> {
    let smiles = read_smiles_csv(&args.surface)?;
    if smiles.is_empty() {
        return Err(SabrError::InvalidInput("surface file holds no smiles".into()));
    }
    let base = CalibConfig::default();
    let cfg = CalibConfig {
        n_starts: args.starts.or(defaults.starts).unwrap_or(base.n_starts),
        seed: args.seed.unwrap_or(base.seed),
        max_iters: args.max_iters.or(defaults.max_iters).unwrap_or(base.max_iters),
        ..base
    };
    let results = with_pricer(args.pricer, args.models.as_ref(), |pricer| {
        Ok(term_structure_calibrate(&smiles, pricer, &cfg))
    })?;

    std::fs::create_dir_all(&args.out)?;
    let mut ts_rows = Vec::new();
    let mut first_err: Option<SabrError> = None;
    for (i, (smile, res)) in smiles.iter().zip(results).enumerate() {
        let path = args.out.join(format!("smile_{i:02}.json"));
        match res {
            Ok(r) => {
                println!(
                    "t={} objective={:.3e} converged={}",
                    smile.t, r.objective, r.converged
                );
                std::fs::write(&path, serde_json::to_string_pretty(&r)? + "\n")?;
                ts_rows.push((smile.t, smile.f0, smile.lambda, r));
            }
            Err(e) => {
                println!("t={} failed: {e}", smile.t);
                std::fs::write(
                    &path,
                    serde_json::to_string_pretty(&serde_json::json!({
                        "t": smile.t,
                        "error": e.to_string(),
                    }))? + "\n",
                )?;
                first_err.get_or_insert(e);
            }
        }
    }
    let borrowed: Vec<(f64, f64, f64, &CalibrationResult)> = ts_rows
        .iter()
        .map(|(t, f0, l, r)| (*t, *f0, *l, r))
        .collect();
    write_term_structure(&args.out.join("term_structure.csv"), &borrowed)?;
    let resolved = Resolved {
        pricer: args.pricer,
        surface: args.surface,
        models: args.models,
        out: args.out.clone(),
        calib: cfg,
    };
    manifest::write(&manifest::in_dir(&args.out), "calibrate", &resolved)?;
    match first_err {
        Some(e) if borrowed.is_empty() => Err(e),
        _ => Ok(()),
    }
}
