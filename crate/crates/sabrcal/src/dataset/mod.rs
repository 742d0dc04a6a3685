//! Corpus generation: implied-vol samples over stratified parameter draws.
//!
//! Three maturity subsets cover short, medium and long fixings. SABR
//! parameters are drawn by Latin hypercube over per-subset ranges; each
//! parameter set gets a full surface of dates (one uniform draw per date
//! bucket) times 13 moneyness draws (4+5+4 per bucket, fresh per date),
//! priced in one shared Monte Carlo ensemble and inverted to shifted-Black
//! vols. Output is a CSV corpus plus a JSON manifest that reproduces it
//! byte for byte.

use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::SabrError;
use crate::math::rng::{derive_seed, SeqRng};
use crate::mc::{implied_vol_from_mc, price_surface, McConfig};
use crate::model::SabrParams;

/// Emitted vols above this are discarded as corrupt (vols up to ~400%
/// legitimately occur in the far corners of the box and are retained).
pub const SIGMA_CEILING: f64 = 5.0;

/// Maturity routing spans in years: rows with T in span `i` belong to
/// subset `i+1` and are consumed by that subset's network.
pub const SUBSET_SPANS: [(f64, f64); 3] = [(0.25, 4.0), (4.0, 10.5), (10.5, 30.0)];

/// Subset id owning fixing time `t`, if any. The top span is closed at the
/// last generated fixing date (30y5m), slightly past the last quoted one.
pub fn subset_for_maturity(t: f64) -> Option<u8> {
    if (0.25..4.0).contains(&t) {
        Some(1)
    } else if (4.0..10.5).contains(&t) {
        Some(2)
    } else if (10.5..=365.0 / 12.0).contains(&t) {
        Some(3)
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamRanges {
    pub f0: (f64, f64),
    pub lambda: f64,
    pub alpha: (f64, f64),
    pub beta: (f64, f64),
    pub rho: (f64, f64),
    pub nu: (f64, f64),
}

/// Recipe for one corpus subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetSpec {
    pub id: u8,
    pub ranges: ParamRanges,
    /// Fixing-date buckets in years, ascending and disjoint; one date is
    /// drawn uniformly from each.
    pub date_buckets: Vec<(f64, f64)>,
    /// (low, high, draws) moneyness buckets shared by all subsets.
    pub moneyness_buckets: [(f64, f64, usize); 3],
    pub n_surfaces: u64,
    pub mc: McConfig,
}

const MONEYNESS_BUCKETS: [(f64, f64, usize); 3] =
    [(0.15, 0.70, 4), (0.70, 1.50, 5), (1.50, 3.50, 4)];

/// Month-denominated date buckets per subset.
fn date_buckets_months(id: u8) -> Vec<(u32, u32)> {
    match id {
        1 => vec![
            (2, 5),
            (5, 8),
            (8, 12),
            (12, 16),
            (16, 18),
            (18, 23),
            (23, 29),
            (29, 35),
            (35, 41),
            (41, 47),
        ],
        2 => vec![
            (46, 54),
            (54, 62),
            (62, 70),
            (70, 78),
            (78, 86),
            (86, 94),
            (94, 102),
            (102, 110),
            (110, 118),
            (118, 126),
        ],
        3 => (0..20).map(|i| (125 + 12 * i, 137 + 12 * i)).collect(),
        _ => Vec::new(),
    }
}

/// Sampling box of a subset; also the calibration parameter box for
/// maturities the subset covers.
pub fn subset_ranges(id: u8) -> ParamRanges {
    ParamRanges {
        f0: (0.01, 0.05),
        lambda: 0.03,
        alpha: (0.001, 0.2),
        beta: if id == 3 { (0.05, 0.9) } else { (0.1, 0.9) },
        rho: (-0.8, 0.6),
        nu: if id == 1 { (0.05, 1.6) } else { (0.05, 1.2) },
    }
}

impl SubsetSpec {
    fn with_scale(id: u8, n_surfaces: u64, n_paths: u64, seed: u64) -> crate::Result<Self> {
        let buckets = date_buckets_months(id);
        if buckets.is_empty() {
            return Err(SabrError::InvalidInput(format!("no subset {id}")));
        }
        let dt_days = match id {
            1 => 0.5,
            2 => 1.0,
            _ => 3.0,
        };
        Ok(SubsetSpec {
            id,
            ranges: subset_ranges(id),
            date_buckets: buckets
                .into_iter()
                .map(|(lo, hi)| (lo as f64 / 12.0, hi as f64 / 12.0))
                .collect(),
            moneyness_buckets: MONEYNESS_BUCKETS,
            n_surfaces,
            mc: McConfig::new(n_paths, dt_days, seed),
        })
    }

    /// Full production scale: 2^20 / 2^18 / 2^18 surfaces at 2^18 paths.
    pub fn full(id: u8, seed: u64) -> crate::Result<Self> {
        let n_surfaces = if id == 1 { 1 << 20 } else { 1 << 18 };
        Self::with_scale(id, n_surfaces, 1 << 18, seed)
    }

    /// Desk scale: 2^10 surfaces at 2^16 paths, tractable on one machine.
    pub fn desk(id: u8, seed: u64) -> crate::Result<Self> {
        Self::with_scale(id, 1 << 10, 1 << 16, seed)
    }

    pub fn n_dates(&self) -> usize {
        self.date_buckets.len()
    }

    pub fn n_strikes(&self) -> usize {
        self.moneyness_buckets.iter().map(|b| b.2).sum()
    }

    /// Generated fixing-date span (bucket union), wider than the routing
    /// span in `SUBSET_SPANS`.
    pub fn date_span(&self) -> (f64, f64) {
        (
            self.date_buckets.first().map_or(0.0, |b| b.0),
            self.date_buckets.last().map_or(0.0, |b| b.1),
        )
    }

    pub fn validated(&self) -> crate::Result<()> {
        if self.n_surfaces == 0 {
            return Err(SabrError::InvalidInput("n_surfaces must be positive".into()));
        }
        let mut prev = 0.0;
        for &(lo, hi) in &self.date_buckets {
            if lo < prev || hi < lo {
                return Err(SabrError::InvalidInput(format!(
                    "date buckets must be ascending and disjoint, got ({lo},{hi}) after {prev}"
                )));
            }
            prev = hi;
        }
        self.mc.validated()?;
        Ok(())
    }
}

/// One training/test row: scaled model inputs and the observed vol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolPoint {
    pub alpha_hat: f64,
    pub beta: f64,
    pub rho: f64,
    pub nu: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub k_hat: f64,
    pub sigma: f64,
    pub vol_err3: f64,
}

/// Latin hypercube plan: per dimension, one uniform draw inside each of `n`
/// equal strata, with the strata randomly permuted.
pub fn lhs_sample(ranges: &[(f64, f64)], n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = SeqRng::new(seed);
    let mut out = vec![vec![0.0; ranges.len()]; n];
    for (d, &(lo, hi)) in ranges.iter().enumerate() {
        let mut strata: Vec<usize> = (0..n).collect();
        rng.shuffle(&mut strata);
        for (i, &s) in strata.iter().enumerate() {
            let u = (s as f64 + rng.next_uniform()) / n as f64;
            out[i][d] = lo + u * (hi - lo);
        }
    }
    out
}

/// Dates and per-date strike sets of one surface.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceAxes {
    pub dates: Vec<f64>,
    /// One ascending 13-strike set per date.
    pub moneyness: Vec<Vec<f64>>,
}

/// Training-style axes: one date per bucket, fresh strikes per date.
pub fn sample_surface_axes(spec: &SubsetSpec, surface_seed: u64) -> SurfaceAxes {
    let mut rng = SeqRng::new(surface_seed);
    let dates = spec
        .date_buckets
        .iter()
        .map(|&(lo, hi)| lo + rng.next_uniform() * (hi - lo))
        .collect::<Vec<_>>();
    let moneyness = dates
        .iter()
        .map(|_| {
            let mut ks = Vec::with_capacity(spec.n_strikes());
            for &(lo, hi, count) in &spec.moneyness_buckets {
                for _ in 0..count {
                    ks.push(lo + rng.next_uniform() * (hi - lo));
                }
            }
            ks.sort_by(|a, b| a.partial_cmp(b).unwrap());
            ks
        })
        .collect();
    SurfaceAxes { dates, moneyness }
}

/// Test-style axes: dates uniform over the whole span (sorted), one strike
/// per date drawn from the bucket union with bucket-proportional weights.
pub fn sample_test_axes(spec: &SubsetSpec, surface_seed: u64) -> SurfaceAxes {
    let mut rng = SeqRng::new(surface_seed);
    let (lo, hi) = spec.date_span();
    let mut dates: Vec<f64> = (0..spec.n_dates())
        .map(|_| lo + rng.next_uniform() * (hi - lo))
        .collect();
    dates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let total: usize = spec.moneyness_buckets.iter().map(|b| b.2).sum();
    let moneyness = dates
        .iter()
        .map(|_| {
            let mut pick = rng.next_below(total as u64) as usize;
            for &(lo, hi, count) in &spec.moneyness_buckets {
                if pick < count {
                    return vec![lo + rng.next_uniform() * (hi - lo)];
                }
                pick -= count;
            }
            unreachable!("bucket weights exhausted");
        })
        .collect();
    SurfaceAxes { dates, moneyness }
}

/// Generation accounting for one corpus file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GenStats {
    pub n_surfaces: u64,
    pub n_rows: u64,
    /// Points below the time-value threshold.
    pub n_dropped: u64,
    /// Points above the vol sanity ceiling.
    pub n_sanity_dropped: u64,
    pub n_failed_surfaces: u64,
    /// First few failure messages, for the log.
    pub failures: Vec<String>,
    /// Wall-clock generation time; absent in older manifests.
    #[serde(default)]
    pub wall_seconds: f64,
}

impl GenStats {
    pub fn drop_fraction(&self) -> f64 {
        let total = self.n_rows + self.n_dropped + self.n_sanity_dropped;
        if total == 0 {
            0.0
        } else {
            (self.n_dropped + self.n_sanity_dropped) as f64 / total as f64
        }
    }
}

/// Manifest written next to each corpus; regenerating from it reproduces
/// the CSV byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub kind: String,
    pub spec: SubsetSpec,
    pub stats: GenStats,
}

struct SurfaceOutput {
    rows: Vec<VolPoint>,
    dropped: u64,
    sanity_dropped: u64,
}

/// Price one parameter set over its axes and invert every live cell.
fn build_surface(
    params: &SabrParams,
    axes: &SurfaceAxes,
    mc: &McConfig,
) -> crate::Result<SurfaceOutput> {
    let scaled = params.scale()?;
    let res = price_surface(&scaled, &axes.dates, &axes.moneyness, mc)?;
    let mut out = SurfaceOutput {
        rows: Vec::with_capacity(axes.moneyness.iter().map(Vec::len).sum()),
        dropped: 0,
        sanity_dropped: 0,
    };
    for slice in &res.slices {
        for cell in &slice.prices {
            match implied_vol_from_mc(cell, cell.t) {
                Ok(pt) if pt.sigma > SIGMA_CEILING => out.sanity_dropped += 1,
                Ok(pt) => out.rows.push(VolPoint {
                    alpha_hat: scaled.alpha_hat,
                    beta: scaled.beta,
                    rho: scaled.rho,
                    nu: scaled.nu,
                    t: cell.t,
                    k_hat: cell.k_hat,
                    sigma: pt.sigma,
                    vol_err3: pt.vol_err3,
                }),
                Err(SabrError::DeadPoint { .. }) => out.dropped += 1,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

fn parameter_sets(spec: &SubsetSpec) -> Vec<SabrParams> {
    let r = &spec.ranges;
    let dims = [r.f0, r.alpha, r.beta, r.rho, r.nu];
    lhs_sample(&dims, spec.n_surfaces as usize, derive_seed(spec.mc.seed, 0))
        .into_iter()
        .map(|v| SabrParams {
            f0: v[0],
            lambda: r.lambda,
            alpha: v[1],
            beta: v[2],
            rho: v[3],
            nu: v[4],
        })
        .collect()
}

/// Surfaces processed per reordering chunk; bounds memory at full scale
/// while keeping output order independent of worker scheduling.
const CHUNK_SURFACES: usize = 32;

fn generate(
    spec: &SubsetSpec,
    out_path: &Path,
    kind: &str,
    n_surfaces: u64,
) -> crate::Result<GenStats> {
    spec.validated()?;
    let started = std::time::Instant::now();
    let spec_run = SubsetSpec {
        n_surfaces,
        ..spec.clone()
    };
    let params = parameter_sets(&spec_run);
    let mut writer = csv::Writer::from_path(out_path)?;
    let mut stats = GenStats {
        n_surfaces,
        ..GenStats::default()
    };

    let one = |l: usize| -> crate::Result<SurfaceOutput> {
        let axes_seed = derive_seed(spec_run.mc.seed, 1 + 2 * l as u64);
        let axes = if kind == "test" {
            sample_test_axes(&spec_run, axes_seed)
        } else {
            sample_surface_axes(&spec_run, axes_seed)
        };
        let mc = McConfig {
            seed: derive_seed(spec_run.mc.seed, 2 + 2 * l as u64),
            ..spec_run.mc
        };
        build_surface(&params[l], &axes, &mc)
    };

    for chunk_start in (0..n_surfaces as usize).step_by(CHUNK_SURFACES) {
        let chunk: Vec<usize> =
            (chunk_start..(chunk_start + CHUNK_SURFACES).min(n_surfaces as usize)).collect();
        #[cfg(feature = "parallel")]
        let results: Vec<crate::Result<SurfaceOutput>> = {
            use rayon::prelude::*;
            chunk.par_iter().map(|&l| one(l)).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let results: Vec<crate::Result<SurfaceOutput>> = chunk.iter().map(|&l| one(l)).collect();
        for (l, res) in chunk.iter().zip(results) {
            match res {
                Ok(surface) => {
                    for row in &surface.rows {
                        writer.serialize(row)?;
                    }
                    stats.n_rows += surface.rows.len() as u64;
                    stats.n_dropped += surface.dropped;
                    stats.n_sanity_dropped += surface.sanity_dropped;
                }
                Err(e) => {
                    stats.n_failed_surfaces += 1;
                    if stats.failures.len() < 20 {
                        stats.failures.push(format!("surface {l}: {e}"));
                    }
                }
            }
        }
    }
    writer.flush()?;
    stats.wall_seconds = started.elapsed().as_secs_f64();

    let manifest = CorpusManifest {
        kind: kind.to_string(),
        spec: spec_run,
        stats: stats.clone(),
    };
    let mut f = std::fs::File::create(out_path.with_extension("json"))?;
    f.write_all(serde_json::to_string_pretty(&manifest)?.as_bytes())?;
    f.write_all(b"\n")?;
    Ok(stats)
}

/// Generate a training corpus for `spec` at `out_path` (CSV), with a JSON
/// manifest at the same path with extension `json`.
///
/// Surfaces whose simulation or inversion fails are skipped and reported in
/// the stats; dead points (time value below threshold) and vols above the
/// sanity ceiling are dropped per point.
pub fn generate_subset(spec: &SubsetSpec, out_path: &Path) -> crate::Result<GenStats> {
    generate(spec, out_path, "train", spec.n_surfaces)
}

/// Generate an out-of-sample test corpus: same parameter sampling, but
/// dates uniform over the whole span and a single strike per date.
pub fn generate_test_set(
    spec: &SubsetSpec,
    n_surfaces: u64,
    out_path: &Path,
) -> crate::Result<GenStats> {
    generate(spec, out_path, "test", n_surfaces)
}

/// In-memory corpus.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub rows: Vec<VolPoint>,
}

impl Dataset {
    pub fn read_csv(path: &Path) -> crate::Result<Dataset> {
        let mut reader = csv::Reader::from_path(path)?;
        let rows = reader
            .deserialize()
            .collect::<Result<Vec<VolPoint>, _>>()?;
        Ok(Dataset { rows })
    }

    pub fn write_csv(&self, path: &Path) -> crate::Result<()> {
        let mut writer = csv::Writer::from_path(path)?;
        for row in &self.rows {
            writer.serialize(row)?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Deterministic disjoint split; the second part holds `fraction` of
    /// the rows (rounded down), e.g. the 20% validation share.
    pub fn split(&self, fraction: f64, seed: u64) -> crate::Result<(Dataset, Dataset)> {
        if !(0.0..1.0).contains(&fraction) || fraction <= 0.0 {
            return Err(SabrError::InvalidInput(format!(
                "split fraction must lie in (0,1), got {fraction}"
            )));
        }
        let n = self.rows.len();
        let n_held = (fraction * n as f64).floor() as usize;
        let mut idx: Vec<usize> = (0..n).collect();
        SeqRng::new(seed).shuffle(&mut idx);
        let held: std::collections::HashSet<usize> = idx[..n_held].iter().copied().collect();
        let mut kept = Vec::with_capacity(n - n_held);
        let mut held_rows = Vec::with_capacity(n_held);
        for (i, row) in self.rows.iter().enumerate() {
            if held.contains(&i) {
                held_rows.push(*row);
            } else {
                kept.push(*row);
            }
        }
        Ok((Dataset { rows: kept }, Dataset { rows: held_rows }))
    }
}
