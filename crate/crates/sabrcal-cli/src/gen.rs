//! `gen`: implied-vol corpus generation.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use sabrcal::dataset::{generate_subset, generate_test_set, SubsetSpec};
use serde::{Deserialize, Serialize};

use crate::manifest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    /// 2^10 surfaces at 2^16 paths; tractable on one machine.
    Desk,
    /// Paper-scale surface counts at 2^18 paths.
    Full,
}

#[derive(Args)]
pub struct GenArgs {
    /// Data subset: 1 short, 2 medium, 3 long maturities.
    #[arg(long)]
    subset: u8,
    /// Output corpus CSV; a dataset manifest lands next to it.
    #[arg(long)]
    out: PathBuf,
    /// Surfaces to draw (default: the scale preset).
    #[arg(long)]
    surfaces: Option<u64>,
    /// Monte Carlo paths per surface (default: the scale preset).
    #[arg(long)]
    paths: Option<u64>,
    /// Base RNG seed (default: the subset id).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "desk")]
    scale: Scale,
    /// Sample axes from the held-out test distribution instead.
    #[arg(long)]
    test_set: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenDefaults {
    pub surfaces: Option<u64>,
    pub paths: Option<u64>,
}

#[derive(Serialize)]
struct Resolved {
    subset: u8,
    scale: Scale,
    surfaces: u64,
    paths: u64,
    seed: u64,
    test_set: bool,
    out: PathBuf,
}

pub fn run(args: GenArgs, defaults: &GenDefaults) -> sabrcal::Result<()> {
    let seed = args.seed.unwrap_or(args.subset as u64);
    let mut spec = match args.scale {
        Scale::Desk => SubsetSpec::desk(args.subset, seed)?,
        Scale::Full => SubsetSpec::full(args.subset, seed)?,
    };
    if let Some(n) = args.surfaces.or(defaults.surfaces) {
        spec.n_surfaces = n;
    }
    if let Some(n) = args.paths.or(defaults.paths) {
        spec.mc.n_paths = n;
    }
    let resolved = Resolved {
        subset: args.subset,
        scale: args.scale,
        surfaces: spec.n_surfaces,
        paths: spec.mc.n_paths,
        seed,
        test_set: args.test_set,
        out: args.out.clone(),
    };
    let stats = if args.test_set {
        generate_test_set(&spec, spec.n_surfaces, &args.out)?
    } else {
        generate_subset(&spec, &args.out)?
    };
    manifest::write(&manifest::sibling(&args.out), "gen", &resolved)?;
    println!("{}", serde_json::to_string_pretty(&stats)?);
    Ok(())
}
