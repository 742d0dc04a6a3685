//! Pipeline driver: dataset generation, DNN training and evaluation, smile
//! calibration, benchmark tables, caplet stripping and diagnostics.
//!
//! Exit codes by failure class: 0 success, 2 bad usage or invalid
//! parameters, 3 unreadable input, 4 malformed input file, 5 numerical
//! failure.
//!
//! Every file-producing run writes a JSON manifest next to its primary
//! output recording the resolved configuration, so any output can be
//! reproduced from the manifest alone. Outputs are independent of the
//! worker count (`--workers`, or the `SABRCAL_WORKERS` environment
//! variable), and no command mutates its inputs.

mod benchmark;
mod calibrate;
mod diagnose;
mod gen;
mod manifest;
mod marketcmd;
mod train;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sabrcal::error::SabrError;

#[derive(Parser)]
#[command(name = "sabrcal", version, about = "Shifted-SABR pricing, training and calibration pipeline")]
struct Cli {
    /// Worker threads (0 = all cores); overrides SABRCAL_WORKERS.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// TOML file supplying defaults for omitted flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an implied-vol corpus for one data subset.
    Gen(gen::GenArgs),
    /// Train a DNN on a corpus and save its weights.
    Train(train::TrainArgs),
    /// Evaluate saved weights against a corpus.
    Eval(train::EvalArgs),
    /// Calibrate SABR parameters to market smiles.
    Calibrate(calibrate::CalibrateArgs),
    /// Strip caplet vols from Cap/Floor premium quotes.
    Strip(marketcmd::StripArgs),
    /// Price a caplet/floorlet off a calibrated term structure.
    Price(marketcmd::PriceArgs),
    /// Emit RMSD/ARD grids and smile data for a calibrated term structure.
    Diagnose(diagnose::DiagnoseArgs),
    /// Reproduce the Monte Carlo benchmark price tables.
    Benchmark(benchmark::BenchmarkArgs),
}

/// Optional defaults from `--config`; explicit flags always win.
#[derive(Debug, Default, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    workers: Option<usize>,
    #[serde(default)]
    gen: gen::GenDefaults,
    #[serde(default)]
    train: train::TrainDefaults,
    #[serde(default)]
    calibrate: calibrate::CalibrateDefaults,
    #[serde(default)]
    benchmark: benchmark::BenchmarkDefaults,
}

fn load_config(path: Option<&PathBuf>) -> sabrcal::Result<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            toml::from_str(&text).map_err(|e| SabrError::Format(format!("config: {e}")))
        }
    }
}

fn resolve_workers(flag: Option<usize>, file: &FileConfig) -> usize {
    flag.or(file.workers)
        .or_else(|| {
            std::env::var("SABRCAL_WORKERS")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(0)
}

fn exit_code(e: &SabrError) -> u8 {
    match e {
        SabrError::InvalidInput(_) => 2,
        SabrError::Io(_) => 3,
        // An unreadable file reported through the csv layer is still an
        // input problem, not a format problem.
        SabrError::Csv(c) if matches!(c.kind(), csv::ErrorKind::Io(_)) => 3,
        SabrError::Csv(_) | SabrError::Json(_) | SabrError::Format(_) => 4,
        _ => 5,
    }
}

fn run(cli: Cli) -> sabrcal::Result<()> {
    let file = load_config(cli.config.as_ref())?;
    let workers = resolve_workers(cli.workers, &file);
    sabrcal::mc::with_worker_pool(workers, || match cli.command {
        Command::Gen(args) => gen::run(args, &file.gen),
        Command::Train(args) => train::run_train(args, &file.train),
        Command::Eval(args) => train::run_eval(args),
        Command::Calibrate(args) => calibrate::run(args, &file.calibrate),
        Command::Strip(args) => marketcmd::run_strip(args),
        Command::Price(args) => marketcmd::run_price(args),
        Command::Diagnose(args) => diagnose::run(args),
        Command::Benchmark(args) => benchmark::run(args, &file.benchmark),
    })?
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
