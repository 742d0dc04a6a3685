//! `train` and `eval`: DNN fitting and assessment.

use std::path::PathBuf;

use clap::Args;
use sabrcal::dataset::{CorpusManifest, Dataset};
use sabrcal::error::SabrError;
use sabrcal::mlp::{self, MlpModel, TrainConfig};
use serde::{Deserialize, Serialize};

use crate::manifest;

#[derive(Args)]
pub struct TrainArgs {
    /// Subset the corpus belongs to; checked against its dataset manifest.
    #[arg(long)]
    subset: u8,
    /// Corpus CSV produced by `gen`.
    #[arg(long)]
    data: PathBuf,
    /// Output weight file (JSON).
    #[arg(long)]
    out: PathBuf,
    /// Seed for the validation split and weight init.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    patience: Option<usize>,
    #[arg(long)]
    batch: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    /// Fraction of rows held out for validation.
    #[arg(long)]
    val_frac: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainDefaults {
    pub epochs: Option<usize>,
    pub patience: Option<usize>,
    pub batch: Option<usize>,
    pub lr: Option<f64>,
    pub val_frac: Option<f64>,
}

#[derive(Serialize)]
struct Resolved {
    subset: u8,
    data: PathBuf,
    out: PathBuf,
    seed: u64,
    val_frac: f64,
    train: TrainConfig,
}

/// When the corpus has a dataset manifest next to it, its subset id must
/// match the one on the command line.
fn check_corpus_subset(data: &PathBuf, subset: u8) -> sabrcal::Result<()> {
    let sidecar = data.with_extension("json");
    if !sidecar.exists() {
        return Ok(());
    }
    let text = std::fs::read_to_string(&sidecar)?;
    let m: CorpusManifest = serde_json::from_str(&text)?;
    if m.spec.id != subset {
        return Err(SabrError::InvalidInput(format!(
            "corpus {} belongs to subset {}, not {subset}",
            data.display(),
            m.spec.id
        )));
    }
    Ok(())
}

pub fn run_train(args: TrainArgs, defaults: &TrainDefaults) -> sabrcal::Result<()> {
    let ds = Dataset::read_csv(&args.data)?;
    check_corpus_subset(&args.data, args.subset)?;
    let seed = args.seed.unwrap_or(0);
    let val_frac = args.val_frac.or(defaults.val_frac).unwrap_or(0.2);
    let base = TrainConfig::default();
    let max_epochs = args.epochs.or(defaults.epochs).unwrap_or(base.max_epochs);
    let cfg = TrainConfig {
        max_epochs,
        // The default patience shrinks with a short epoch budget; an
        // explicit inconsistent pair still fails validation downstream.
        patience: args
            .patience
            .or(defaults.patience)
            .unwrap_or(base.patience.min(max_epochs)),
        batch_size: args.batch.or(defaults.batch).unwrap_or(base.batch_size),
        learning_rate: args.lr.or(defaults.lr).unwrap_or(base.learning_rate),
        seed,
        ..base
    };
    let (train_set, val_set) = ds.split(val_frac, seed)?;
    let model = mlp::train(&train_set, &val_set, &cfg)?;
    model.save(&args.out)?;
    let resolved = Resolved {
        subset: args.subset,
        data: args.data,
        out: args.out.clone(),
        seed,
        val_frac,
        train: cfg,
    };
    manifest::write(&manifest::sibling(&args.out), "train", &resolved)?;
    let report = mlp::evaluate(&model, &val_set)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&serde_json::json!({
            "meta": model.meta,
            "validation": report,
        }))?
    );
    Ok(())
}

#[derive(Args)]
pub struct EvalArgs {
    /// Weight file from `train`.
    #[arg(long)]
    model: PathBuf,
    /// Corpus CSV to score.
    #[arg(long)]
    data: PathBuf,
    /// Optional per-point CSV (t, k_hat, target, prediction).
    #[arg(long)]
    scatter_out: Option<PathBuf>,
}

pub fn run_eval(args: EvalArgs) -> sabrcal::Result<()> {
    let model = MlpModel::load(&args.model)?;
    let ds = Dataset::read_csv(&args.data)?;
    let report = mlp::evaluate(&model, &ds)?;
    if let Some(out) = &args.scatter_out {
        write_scatter(&model, &ds, out)?;
        manifest::write(
            &manifest::sibling(out),
            "eval",
            &serde_json::json!({
                "model": args.model,
                "data": args.data,
                "scatter_out": out,
            }),
        )?;
    }
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

/// Data behind the training/test scatter plots.
pub fn write_scatter(model: &MlpModel, ds: &Dataset, out: &PathBuf) -> sabrcal::Result<()> {
    let (x, _) = mlp::design_matrix(ds);
    let pred = model.forward_batch(&x);
    let mut wtr = csv::Writer::from_path(out)?;
    wtr.write_record(["t", "k_hat", "target", "prediction"])?;
    for (row, &p) in ds.rows.iter().zip(pred.iter()) {
        wtr.serialize((row.t, row.k_hat, row.sigma, p))?;
    }
    wtr.flush().map_err(SabrError::Io)?;
    Ok(())
}
