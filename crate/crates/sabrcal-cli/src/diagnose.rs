//! `diagnose`: model-vs-MC distance grids and smile data for a calibrated
//! term structure, plus optional DNN scatter data.

use std::path::PathBuf;

use clap::Args;
use sabrcal::calib::{ard, rmsd, read_smiles_csv, MarketSmile};
use sabrcal::dataset::{subset_for_maturity, Dataset, SubsetSpec};
use sabrcal::error::SabrError;
use sabrcal::market::TermStructurePoint;
use sabrcal::mc::{implied_vol_from_mc, price_surface, McConfig};
use sabrcal::mlp::MlpModel;
use serde::Serialize;

use crate::calibrate::{with_pricer, PricerKind};
use crate::manifest;
use crate::marketcmd::read_term_structure;
use crate::train::write_scatter;

#[derive(Args)]
pub struct DiagnoseArgs {
    /// term_structure.csv from `calibrate`.
    #[arg(long)]
    term_structure: PathBuf,
    #[arg(long, value_enum)]
    pricer: PricerKind,
    #[arg(long)]
    models: Option<PathBuf>,
    /// Market smiles CSV; fixes the strike grid and adds smile CSVs.
    #[arg(long)]
    smiles: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Monte Carlo paths for the reference vols.
    #[arg(long, default_value_t = 1 << 16)]
    paths: u64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Weight file for scatter data (with --data).
    #[arg(long)]
    model: Option<PathBuf>,
    /// Corpus CSV for scatter data (with --model).
    #[arg(long, requires = "model")]
    data: Option<PathBuf>,
}

#[derive(Serialize)]
struct Resolved {
    term_structure: PathBuf,
    pricer: PricerKind,
    models: Option<PathBuf>,
    smiles: Option<PathBuf>,
    out: PathBuf,
    paths: u64,
    seed: u64,
    model: Option<PathBuf>,
    data: Option<PathBuf>,
}

/// Fallback strike grid when no smiles file pins one down: 13 moneyness
/// levels over the sampled span, mapped back to rate strikes.
fn default_strikes(pillar: &TermStructurePoint) -> Vec<f64> {
    let fbar0 = pillar.params.fbar0();
    (0..13)
        .map(|i| {
            let k_hat = 0.2 + i as f64 * 0.25;
            k_hat * fbar0 - pillar.params.lambda
        })
        .collect()
}

/// Simulation step per maturity follows the generation recipe of the
/// subset the maturity falls in.
fn dt_for(t: f64) -> f64 {
    subset_for_maturity(t)
        .and_then(|id| SubsetSpec::desk(id, 0).ok())
        .map(|s| s.mc.dt_days)
        .unwrap_or(3.0)
}

pub fn run(args: DiagnoseArgs) -> sabrcal::Result<()> {
    let pillars = read_term_structure(&args.term_structure)?;
    let smiles: Vec<MarketSmile> = match &args.smiles {
        Some(p) => read_smiles_csv(p)?,
        None => Vec::new(),
    };
    std::fs::create_dir_all(&args.out)?;

    let mut rmsd_wtr = csv::Writer::from_path(args.out.join("rmsd.csv"))?;
    rmsd_wtr.write_record(["t", "pricer", "rmsd", "ard_k_min", "ard_k_max"])?;
    let mut ard_wtr = csv::Writer::from_path(args.out.join("ard.csv"))?;
    ard_wtr.write_record(["t", "strike", "model_vol", "mc_vol", "ard"])?;

    for pillar in &pillars {
        let smile = smiles.iter().find(|s| (s.t - pillar.t).abs() < 1e-9);
        let strikes: Vec<f64> = match smile {
            Some(s) => s.strikes.clone(),
            None => default_strikes(pillar),
        };
        let (model_vols, name) = with_pricer(args.pricer, args.models.as_ref(), |pricer| {
            Ok((pricer.vols(&pillar.params, pillar.t, &strikes)?, pricer.name()))
        })?;

        // MC reference run of the calibrated parameters at this maturity.
        let scaled = pillar.params.scale()?;
        let fbar0 = pillar.params.fbar0();
        let moneyness: Vec<f64> = strikes
            .iter()
            .map(|&k| (k + pillar.params.lambda) / fbar0)
            .collect();
        let cfg = McConfig::new(args.paths, dt_for(pillar.t), args.seed);
        let res = price_surface(&scaled, &[pillar.t], &[moneyness], &cfg)?;
        let mut mc_vols = Vec::with_capacity(strikes.len());
        for r in &res.slices[0].prices {
            match implied_vol_from_mc(r, pillar.t) {
                Ok(p) => mc_vols.push(Some(p.sigma)),
                Err(SabrError::DeadPoint { .. }) => mc_vols.push(None),
                Err(e) => return Err(e),
            }
        }

        let mut live_model = Vec::new();
        let mut live_mc = Vec::new();
        for ((&k, &mv), mc) in strikes.iter().zip(&model_vols).zip(&mc_vols) {
            if let Some(mcv) = mc {
                live_model.push(mv);
                live_mc.push(*mcv);
                ard_wtr.serialize((pillar.t, k, mv, mcv, ard(mv, *mcv)?))?;
            }
        }
        if !live_model.is_empty() {
            rmsd_wtr.serialize((
                pillar.t,
                name,
                rmsd(&live_model, &live_mc)?,
                ard(live_model[0], live_mc[0])?,
                ard(
                    *live_model.last().expect("non-empty"),
                    *live_mc.last().expect("non-empty"),
                )?,
            ))?;
        }

        if let Some(s) = smile {
            let mut wtr =
                csv::Writer::from_path(args.out.join(format!("smile_t{}.csv", pillar.t)))?;
            wtr.write_record(["strike", "market_vol", "model_vol"])?;
            for ((&k, &mkt), &mv) in s.strikes.iter().zip(&s.vols_sln).zip(&model_vols) {
                wtr.serialize((k, mkt, mv))?;
            }
            wtr.flush().map_err(SabrError::Io)?;
        }
    }
    rmsd_wtr.flush().map_err(SabrError::Io)?;
    ard_wtr.flush().map_err(SabrError::Io)?;

    if let (Some(model_path), Some(data_path)) = (&args.model, &args.data) {
        let model = MlpModel::load(model_path)?;
        let ds = Dataset::read_csv(data_path)?;
        write_scatter(&model, &ds, &args.out.join("scatter.csv"))?;
    }

    let resolved = Resolved {
        term_structure: args.term_structure,
        pricer: args.pricer,
        models: args.models,
        smiles: args.smiles,
        out: args.out.clone(),
        paths: args.paths,
        seed: args.seed,
        model: args.model,
        data: args.data,
    };
    manifest::write(&manifest::in_dir(&args.out), "diagnose", &resolved)?;
    Ok(())
}
