//! `strip` and `price`: Cap/Floor quote handling.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use sabrcal::error::SabrError;
use sabrcal::market::{
    price_anything, strip_caplet_vols, CapFloorQuoteSurface, DiscountCurve, TermStructurePoint,
};
use sabrcal::model::SabrParams;
use serde::Serialize;

use crate::calibrate::{with_pricer, PricerKind};
use crate::manifest;

#[derive(Args)]
pub struct StripArgs {
    /// Cap/Floor premium quotes CSV.
    #[arg(long)]
    quotes: PathBuf,
    /// Discount curve CSV (time, df).
    #[arg(long)]
    curve: PathBuf,
    /// Output stripped-surface CSV; multi-tenor quote files get a
    /// `_<tenor>m` suffix per tenor.
    #[arg(long)]
    out: PathBuf,
    /// Vol shift (decimal).
    #[arg(long, default_value_t = 0.03)]
    lambda: f64,
    /// Constant forward override; by default forwards step through the
    /// quote rows' ATM strikes.
    #[arg(long)]
    forward: Option<f64>,
}

#[derive(Serialize)]
struct StripResolved {
    quotes: PathBuf,
    curve: PathBuf,
    out: PathBuf,
    lambda: f64,
    forward: Option<f64>,
}

/// Forward at a fixing time read off the quote surface: the ATM strike of
/// the earliest row whose maturity covers the fixing.
fn forward_from_quotes(quotes: &CapFloorQuoteSurface) -> impl Fn(f64) -> f64 + '_ {
    move |t: f64| {
        quotes
            .rows
            .iter()
            .find(|r| r.maturity >= t - 1e-9)
            .or_else(|| quotes.rows.last())
            .map(|r| r.atm_strike)
            .unwrap_or(0.0)
    }
}

pub fn run_strip(args: StripArgs) -> sabrcal::Result<()> {
    let quotes = CapFloorQuoteSurface::read_csv(&args.quotes)?;
    let curve = DiscountCurve::read_csv(&args.curve)?;
    let stripped = match args.forward {
        Some(f) => strip_caplet_vols(&quotes, &curve, &move |_| f, args.lambda)?,
        None => strip_caplet_vols(&quotes, &curve, &forward_from_quotes(&quotes), args.lambda)?,
    };
    let multi = stripped.len() > 1;
    for s in &stripped {
        let path = if multi {
            tenor_path(&args.out, s.tenor_months)
        } else {
            args.out.clone()
        };
        s.write_csv(&path)?;
        println!(
            "tenor {}m: {} fixings x {} strikes, {} flagged cells -> {}",
            s.tenor_months,
            s.fixings.len(),
            s.strikes.len(),
            s.flagged,
            path.display()
        );
    }
    let resolved = StripResolved {
        quotes: args.quotes,
        curve: args.curve,
        out: args.out.clone(),
        lambda: args.lambda,
        forward: args.forward,
    };
    manifest::write(&manifest::sibling(&args.out), "strip", &resolved)?;
    Ok(())
}

fn tenor_path(out: &Path, tenor_months: u32) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("stripped");
    let ext = out.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    out.with_file_name(format!("{stem}_{tenor_months}m.{ext}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Leg {
    Cap,
    Floor,
}

#[derive(Args)]
pub struct PriceArgs {
    /// Caplet fixing time in years.
    #[arg(long)]
    t: f64,
    #[arg(long)]
    strike: f64,
    #[arg(long, value_enum)]
    omega: Leg,
    /// term_structure.csv from `calibrate`.
    #[arg(long)]
    term_structure: PathBuf,
    #[arg(long, value_enum, default_value = "hagan")]
    pricer: PricerKind,
    #[arg(long)]
    models: Option<PathBuf>,
}

/// Read calibrated pillars back from a term-structure CSV; trailing
/// diagnostic columns are ignored.
pub fn read_term_structure(path: &Path) -> sabrcal::Result<Vec<TermStructurePoint>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut pillars = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let num = |i: usize| -> sabrcal::Result<f64> {
            rec.get(i)
                .ok_or_else(|| SabrError::Format("short term-structure row".into()))?
                .parse()
                .map_err(|_| SabrError::Format(format!("bad number in column {i}")))
        };
        pillars.push(TermStructurePoint {
            t: num(0)?,
            params: SabrParams {
                f0: num(1)?,
                lambda: num(2)?,
                alpha: num(3)?,
                beta: num(4)?,
                rho: num(5)?,
                nu: num(6)?,
            },
        });
    }
    if pillars.is_empty() {
        return Err(SabrError::InvalidInput("term structure holds no pillars".into()));
    }
    Ok(pillars)
}

pub fn run_price(args: PriceArgs) -> sabrcal::Result<()> {
    let pillars = read_term_structure(&args.term_structure)?;
    let omega = match args.omega {
        Leg::Cap => 1,
        Leg::Floor => -1,
    };
    let price = with_pricer(args.pricer, args.models.as_ref(), |pricer| {
        price_anything(args.t, args.strike, omega, &pillars, pricer)
    })?;
    println!(
        "{}",
        serde_json::to_string_pretty(&serde_json::json!({
            "t": args.t,
            "strike": args.strike,
            "omega": args.omega,
            "pricer": args.pricer,
            "price": price,
        }))?
    );
    Ok(())
}
