//! Cap/Floor market data: discount curve, cap schedules, quote surfaces,
//! caplet volatility stripping and two-dimensional pricing off a calibrated
//! term structure.
//!
//! Conventions: dates are year fractions from the valuation date on an
//! ACT/365 basis (also the vol time); accruals are ACT/360, i.e. the year
//! fraction times 365/360. Caplet prices are undiscounted and carry no
//! accrual; discounting and accrual are applied here when summing a cap.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analytics::{black_price, BlackInputs};
use crate::calib::SmilePricer;
use crate::error::SabrError;
use crate::model::SabrParams;

/// ACT/360 accrual per ACT/365 year.
pub const ACCRUAL_SCALE: f64 = 365.0 / 360.0;

/// Premium tolerance of one stripping bootstrap step.
const STRIP_TOL: f64 = 1e-14;

// ---------------------------------------------------------------------------
// Discount curve
// ---------------------------------------------------------------------------

/// Discount factors, log-linearly interpolated between pillars.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscountCurve {
    /// (time, discount factor), strictly increasing times > 0.
    pillars: Vec<(f64, f64)>,
}

impl DiscountCurve {
    pub fn new(pillars: Vec<(f64, f64)>) -> crate::Result<Self> {
        if pillars.is_empty() {
            return Err(SabrError::InvalidInput("curve needs at least one pillar".into()));
        }
        for w in pillars.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(SabrError::InvalidInput("pillar times must be increasing".into()));
            }
        }
        if pillars.iter().any(|&(t, df)| !(t > 0.0) || !(df > 0.0)) {
            return Err(SabrError::InvalidInput(
                "pillar times and discount factors must be positive".into(),
            ));
        }
        Ok(DiscountCurve { pillars })
    }

    /// Flat curve from a continuously compounded rate.
    pub fn flat(rate: f64, horizon: f64) -> crate::Result<Self> {
        Self::new(vec![(horizon, (-rate * horizon).exp())])
    }

    pub fn horizon(&self) -> f64 {
        self.pillars.last().expect("non-empty").0
    }

    /// Discount factor at `t`; log-linear between pillars, anchored at
    /// `P(0) = 1`, error beyond the last pillar.
    pub fn df(&self, t: f64) -> crate::Result<f64> {
        if !(t >= 0.0) {
            return Err(SabrError::InvalidInput(format!("time must be non-negative, got {t}")));
        }
        if t == 0.0 {
            return Ok(1.0);
        }
        if t > self.horizon() {
            return Err(SabrError::InvalidInput(format!(
                "time {t} beyond curve horizon {}",
                self.horizon()
            )));
        }
        // Interpolation nodes, including the implicit (0, 1).
        let (mut t0, mut ln0) = (0.0, 0.0);
        for &(tp, dfp) in &self.pillars {
            if t <= tp {
                let w = (t - t0) / (tp - t0);
                return Ok((ln0 + w * (dfp.ln() - ln0)).exp());
            }
            t0 = tp;
            ln0 = dfp.ln();
        }
        unreachable!("t <= horizon");
    }

    pub fn read_csv(path: &Path) -> crate::Result<Self> {
        let mut rdr = csv::Reader::from_path(path)?;
        let mut pillars = Vec::new();
        for rec in rdr.deserialize() {
            let (t, df): (f64, f64) = rec?;
            pillars.push((t, df));
        }
        Self::new(pillars)
    }

    pub fn write_csv(&self, path: &Path) -> crate::Result<()> {
        let mut wtr = csv::Writer::from_path(path)?;
        wtr.write_record(["time", "df"])?;
        for &(t, df) in &self.pillars {
            wtr.serialize((t, df))?;
        }
        wtr.flush().map_err(SabrError::Io)?;
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Schedules
// ---------------------------------------------------------------------------

/// One included caplet period of a cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapletPeriod {
    pub fixing: f64,
    pub payment: f64,
    /// ACT/360 accrual of the period.
    pub accrual: f64,
}

/// Cash-flow schedule of a cap: dates from one period through maturity.
#[derive(Debug, Clone, PartialEq)]
pub struct CapSchedule {
    pub dates: Vec<f64>,
    pub tenor_months: u32,
    /// The first period's caplet is skipped (its rate is already fixed).
    pub first_caplet_excluded: bool,
}

impl CapSchedule {
    /// Regular schedule: dates `p, 2p, ..., maturity` with period
    /// `p = tenor_months / 12` years; maturity must sit on the grid.
    pub fn standard(tenor_months: u32, maturity: f64) -> crate::Result<Self> {
        if tenor_months == 0 {
            return Err(SabrError::InvalidInput("tenor must be positive".into()));
        }
        let period = tenor_months as f64 / 12.0;
        let n = (maturity / period).round();
        if n < 2.0 || (maturity - n * period).abs() > 1e-9 {
            return Err(SabrError::InvalidInput(format!(
                "maturity {maturity} not a multiple of the {tenor_months}M period (or too short)"
            )));
        }
        let dates = (1..=n as usize).map(|i| i as f64 * period).collect();
        Ok(CapSchedule {
            dates,
            tenor_months,
            first_caplet_excluded: true,
        })
    }

    /// Included caplet periods in order.
    pub fn periods(&self) -> Vec<CapletPeriod> {
        let start = if self.first_caplet_excluded { 1 } else { 0 };
        (start..self.dates.len())
            .map(|i| {
                let fixing = if i == 0 { 0.0 } else { self.dates[i - 1] };
                let payment = self.dates[i];
                CapletPeriod {
                    fixing,
                    payment,
                    accrual: (payment - fixing) * ACCRUAL_SCALE,
                }
            })
            .collect()
    }

    pub fn maturity(&self) -> f64 {
        *self.dates.last().expect("non-empty")
    }
}

// ---------------------------------------------------------------------------
// Variance interpolation
// ---------------------------------------------------------------------------

/// Linear interpolation of total variances `v = sigma^2 T` between two
/// fixing times, returning the vol at `t_target`.
pub fn variance_interp(
    t_target: f64,
    t_prev: f64,
    t_next: f64,
    sigma_prev: f64,
    sigma_next: f64,
) -> crate::Result<f64> {
    if !(t_prev <= t_target && t_target <= t_next) {
        return Err(SabrError::InvalidInput(format!(
            "target {t_target} outside [{t_prev}, {t_next}]"
        )));
    }
    if t_target == t_next {
        return Ok(sigma_next);
    }
    if t_target == t_prev {
        return Ok(sigma_prev);
    }
    if t_prev == t_next {
        return Err(SabrError::InvalidInput("degenerate interpolation interval".into()));
    }
    let v_prev = sigma_prev * sigma_prev * t_prev;
    let v_next = sigma_next * sigma_next * t_next;
    let w = (t_target - t_prev) / (t_next - t_prev);
    let v = v_prev + w * (v_next - v_prev);
    if !(t_target > 0.0) {
        return Err(SabrError::InvalidInput("target time must be positive".into()));
    }
    Ok((v / t_target).max(0.0).sqrt())
}

// ---------------------------------------------------------------------------
// Cap pricing
// ---------------------------------------------------------------------------

/// Discounted cap/floor price per unit notional: the sum of discounted,
/// accrued caplet prices over the included periods. `caplet_vols` and
/// `forwards` align with `schedule.periods()`.
pub fn price_cap(
    schedule: &CapSchedule,
    strike: f64,
    caplet_vols: &[f64],
    forwards: &[f64],
    curve: &DiscountCurve,
    lambda: f64,
    omega: i8,
) -> crate::Result<f64> {
    let periods = schedule.periods();
    if caplet_vols.len() != periods.len() || forwards.len() != periods.len() {
        return Err(SabrError::InvalidInput(format!(
            "need one vol and forward per period: {} periods, {} vols, {} forwards",
            periods.len(),
            caplet_vols.len(),
            forwards.len()
        )));
    }
    let mut total = 0.0;
    for ((p, &sigma), &fwd) in periods.iter().zip(caplet_vols).zip(forwards) {
        let price = black_price(BlackInputs {
            fwd_shifted: fwd + lambda,
            strike_shifted: strike + lambda,
            variance: sigma * sigma * p.fixing,
            omega,
        })?;
        total += curve.df(p.payment)? * p.accrual * price;
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Quote surface
// ---------------------------------------------------------------------------

/// One maturity row of the quote surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapQuoteRow {
    pub maturity: f64,
    pub tenor_months: u32,
    pub atm_strike: f64,
    pub atm_premium: Option<f64>,
    /// Premium per strike column; `None` for cells too small to quote.
    pub premiums: Vec<Option<f64>>,
}

/// Cap/Floor premium quotes: strike columns quote the out-of-the-money leg
/// (floors below the ATM region, caps above), plus an ATM column quoting the
/// equilibrium strike and its premium.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapFloorQuoteSurface {
    pub strikes: Vec<f64>,
    /// `-1` floor column, `+1` cap column, aligned with `strikes`.
    pub omegas: Vec<i8>,
    pub rows: Vec<CapQuoteRow>,
}

impl CapFloorQuoteSurface {
    pub fn validated(self) -> crate::Result<Self> {
        if self.strikes.len() != self.omegas.len() {
            return Err(SabrError::InvalidInput("need one omega per strike".into()));
        }
        if self.strikes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SabrError::InvalidInput("strikes must be strictly increasing".into()));
        }
        if self.omegas.iter().any(|&o| o != 1 && o != -1) {
            return Err(SabrError::InvalidInput("omega must be +1 or -1".into()));
        }
        if self.rows.windows(2).any(|w| w[0].maturity >= w[1].maturity) {
            return Err(SabrError::InvalidInput("maturities must be increasing".into()));
        }
        for row in &self.rows {
            if row.premiums.len() != self.strikes.len() {
                return Err(SabrError::InvalidInput(format!(
                    "row {} has {} premiums for {} strikes",
                    row.maturity,
                    row.premiums.len(),
                    self.strikes.len()
                )));
            }
            if row
                .premiums
                .iter()
                .chain(std::iter::once(&row.atm_premium))
                .flatten()
                .any(|&p| !(p >= 0.0))
            {
                return Err(SabrError::InvalidInput("premiums must be non-negative".into()));
            }
        }
        Ok(self)
    }

    /// Rows of one tenor, in maturity order.
    pub fn tenor_rows(&self, tenor_months: u32) -> Vec<&CapQuoteRow> {
        self.rows.iter().filter(|r| r.tenor_months == tenor_months).collect()
    }

    pub fn tenors(&self) -> Vec<u32> {
        let mut t: Vec<u32> = self.rows.iter().map(|r| r.tenor_months).collect();
        t.sort_unstable();
        t.dedup();
        t
    }

    /// Layout: `maturity, tenor_months, atm_strike, atm_premium` followed by
    /// one column per strike named `flo_K` or `cap_K` by its quoted leg.
    pub fn write_csv(&self, path: &Path) -> crate::Result<()> {
        let mut wtr = csv::Writer::from_path(path)?;
        let mut header = vec![
            "maturity".to_string(),
            "tenor_months".to_string(),
            "atm_strike".to_string(),
            "atm_premium".to_string(),
        ];
        for (&k, &o) in self.strikes.iter().zip(&self.omegas) {
            let leg = if o > 0 { "cap" } else { "flo" };
            header.push(format!("{leg}_{k}"));
        }
        wtr.write_record(&header)?;
        for row in &self.rows {
            let mut rec = vec![
                row.maturity.to_string(),
                row.tenor_months.to_string(),
                row.atm_strike.to_string(),
                row.atm_premium.map(|p| p.to_string()).unwrap_or_default(),
            ];
            for p in &row.premiums {
                rec.push(p.map(|p| p.to_string()).unwrap_or_default());
            }
            wtr.write_record(&rec)?;
        }
        wtr.flush().map_err(SabrError::Io)?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> crate::Result<Self> {
        let mut rdr = csv::Reader::from_path(path)?;
        let header = rdr.headers()?.clone();
        if header.len() < 5 {
            return Err(SabrError::Format("quote file needs at least one strike column".into()));
        }
        let mut strikes = Vec::new();
        let mut omegas = Vec::new();
        for col in header.iter().skip(4) {
            let (leg, k) = col
                .split_once('_')
                .ok_or_else(|| SabrError::Format(format!("bad strike column name {col}")))?;
            let omega = match leg {
                "cap" => 1,
                "flo" => -1,
                _ => return Err(SabrError::Format(format!("bad leg prefix in {col}"))),
            };
            let strike: f64 = k
                .parse()
                .map_err(|_| SabrError::Format(format!("bad strike in column {col}")))?;
            strikes.push(strike);
            omegas.push(omega);
        }
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let field = |i: usize| -> crate::Result<&str> {
                rec.get(i)
                    .ok_or_else(|| SabrError::Format("short quote row".into()))
            };
            let parse_opt = |s: &str| -> crate::Result<Option<f64>> {
                if s.is_empty() {
                    Ok(None)
                } else {
                    s.parse()
                        .map(Some)
                        .map_err(|_| SabrError::Format(format!("bad premium {s}")))
                }
            };
            let maturity: f64 = field(0)?
                .parse()
                .map_err(|_| SabrError::Format("bad maturity".into()))?;
            let tenor_months: u32 = field(1)?
                .parse()
                .map_err(|_| SabrError::Format("bad tenor".into()))?;
            let atm_strike: f64 = field(2)?
                .parse()
                .map_err(|_| SabrError::Format("bad ATM strike".into()))?;
            let atm_premium = parse_opt(field(3)?)?;
            let mut premiums = Vec::with_capacity(strikes.len());
            for i in 4..header.len() {
                premiums.push(parse_opt(field(i)?)?);
            }
            rows.push(CapQuoteRow {
                maturity,
                tenor_months,
                atm_strike,
                atm_premium,
                premiums,
            });
        }
        CapFloorQuoteSurface {
            strikes,
            omegas,
            rows,
        }
        .validated()
    }
}

// ---------------------------------------------------------------------------
// Stripping
// ---------------------------------------------------------------------------

/// Stripped caplet vol surface of one tenor: fixings x strikes, `None` where
/// the bootstrap flagged a cell or the column had no quote coverage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrippedSurface {
    pub tenor_months: u32,
    pub fixings: Vec<f64>,
    pub strikes: Vec<f64>,
    /// `vols[fixing_index][strike_index]`.
    pub vols: Vec<Vec<Option<f64>>>,
    /// Count of cells flagged by a non-convergent bootstrap step.
    pub flagged: usize,
}

impl StrippedSurface {
    /// Long-format CSV: `fixing, strike, vol` (flagged cells omitted).
    pub fn write_csv(&self, path: &Path) -> crate::Result<()> {
        let mut wtr = csv::Writer::from_path(path)?;
        wtr.write_record(["fixing", "strike", "vol"])?;
        for (i, &f) in self.fixings.iter().enumerate() {
            for (j, &k) in self.strikes.iter().enumerate() {
                if let Some(v) = self.vols[i][j] {
                    wtr.serialize((f, k, v))?;
                }
            }
        }
        wtr.flush().map_err(SabrError::Io)?;
        Ok(())
    }
}

/// Per-strike bootstrap state: last resolved fixing and its variance.
struct ColumnState {
    anchor: Option<(f64, f64)>,
    prev_premium: f64,
    prev_maturity: f64,
}

/// Strip caplet vols of one tenor group. `forward_at` supplies the forward
/// of the caplet fixing at the given time; `lambda` is the vol shift.
///
/// Strike columns bootstrap independently, maturity by maturity: the premium
/// difference of consecutive quotes is matched by the newly covered
/// discounted caplets, whose in-gap variances interpolate linearly between
/// the previous anchor fixing and the unknown last fixing. The ATM column is
/// stripped the same way when its strike is constant across the group's rows
/// (synthetic surfaces; varying ATM strikes are left unquoted).
pub fn strip_caplet_vols(
    quotes: &CapFloorQuoteSurface,
    curve: &DiscountCurve,
    forward_at: &dyn Fn(f64) -> f64,
    lambda: f64,
) -> crate::Result<Vec<StrippedSurface>> {
    let mut out = Vec::new();
    for tenor in quotes.tenors() {
        let rows = quotes.tenor_rows(tenor);
        let last = rows.last().expect("tenor has rows");
        let full = CapSchedule::standard(tenor, last.maturity)?;
        let fixings: Vec<f64> = full.periods().iter().map(|p| p.fixing).collect();

        // Column set: quoted strikes plus the ATM column when well defined.
        let atm_constant = rows
            .iter()
            .all(|r| (r.atm_strike - rows[0].atm_strike).abs() < 1e-12);
        let mut columns: Vec<(f64, i8, Vec<Option<f64>>)> = quotes
            .strikes
            .iter()
            .zip(&quotes.omegas)
            .map(|(&k, &o)| (k, o, rows.iter().map(|r| r.premiums_at(quotes, k)).collect()))
            .collect();
        if atm_constant {
            columns.push((
                rows[0].atm_strike,
                1,
                rows.iter().map(|r| r.atm_premium).collect(),
            ));
        }

        let mut vols = vec![vec![None; columns.len()]; fixings.len()];
        let mut flagged = 0usize;
        for (j, (strike, omega, premiums)) in columns.iter().enumerate() {
            let mut state = ColumnState {
                anchor: None,
                prev_premium: 0.0,
                prev_maturity: 0.0,
            };
            for (row, premium) in rows.iter().zip(premiums) {
                let Some(premium) = premium else { continue };
                let sched = CapSchedule::standard(tenor, row.maturity)?;
                let new: Vec<CapletPeriod> = sched
                    .periods()
                    .into_iter()
                    .filter(|p| p.payment > state.prev_maturity + 1e-9)
                    .collect();
                let diff = premium - state.prev_premium;
                match solve_step(&new, *strike, *omega, diff, &state, curve, forward_at, lambda)? {
                    Some(v_last) => {
                        let t_last = new.last().expect("new periods").fixing;
                        for p in &new {
                            let v = gap_variance(p.fixing, state.anchor, t_last, v_last);
                            let idx = fixing_index(&fixings, p.fixing)?;
                            vols[idx][j] = Some((v / p.fixing).max(0.0).sqrt());
                        }
                        state.anchor = Some((t_last, v_last));
                    }
                    None => {
                        // Negative implied time value: flag the cells, keep
                        // a flat-vol variance extension so later steps can
                        // still interpolate.
                        flagged += new.len();
                        let t_last = new.last().expect("new periods").fixing;
                        if let Some((ta, va)) = state.anchor {
                            state.anchor = Some((t_last, va / ta * t_last));
                        }
                    }
                }
                state.prev_premium = *premium;
                state.prev_maturity = row.maturity;
            }
        }
        out.push(StrippedSurface {
            tenor_months: tenor,
            fixings,
            strikes: columns.iter().map(|c| c.0).collect(),
            vols,
            flagged,
        });
    }
    Ok(out)
}

impl CapQuoteRow {
    fn premiums_at(&self, surface: &CapFloorQuoteSurface, strike: f64) -> Option<f64> {
        surface
            .strikes
            .iter()
            .position(|&k| k == strike)
            .and_then(|i| self.premiums[i])
    }
}

fn fixing_index(fixings: &[f64], f: f64) -> crate::Result<usize> {
    fixings
        .iter()
        .position(|&x| (x - f).abs() < 1e-9)
        .ok_or_else(|| SabrError::InvalidInput(format!("fixing {f} off the tenor grid")))
}

/// Variance at `t` implied by the anchor and the unknown last fixing's
/// variance `v_last`: linear in-variance between anchor and `(t_last,
/// v_last)`; flat vol when no anchor exists yet.
fn gap_variance(t: f64, anchor: Option<(f64, f64)>, t_last: f64, v_last: f64) -> f64 {
    match anchor {
        None => v_last / t_last * t,
        Some((ta, va)) => {
            if t >= t_last {
                v_last
            } else {
                va + (v_last - va) * (t - ta) / (t_last - ta)
            }
        }
    }
}

/// Solve one bootstrap step: find the last new fixing's variance such that
/// the newly covered caplets sum to the premium difference. Returns `None`
/// when the difference is below the intrinsic floor (flagged cell).
#[allow(clippy::too_many_arguments)]
fn solve_step(
    new: &[CapletPeriod],
    strike: f64,
    omega: i8,
    diff: f64,
    state: &ColumnState,
    curve: &DiscountCurve,
    forward_at: &dyn Fn(f64) -> f64,
    lambda: f64,
) -> crate::Result<Option<f64>> {
    if new.is_empty() {
        return Err(SabrError::InvalidInput("quote adds no new caplet periods".into()));
    }
    let t_last = new.last().expect("non-empty").fixing;
    let price_at = |v_last: f64| -> crate::Result<f64> {
        let mut sum = 0.0;
        for p in new {
            let v = gap_variance(p.fixing, state.anchor, t_last, v_last);
            let price = black_price(BlackInputs {
                fwd_shifted: forward_at(p.fixing) + lambda,
                strike_shifted: strike + lambda,
                variance: v.max(0.0),
                omega,
            })?;
            sum += curve.df(p.payment)? * p.accrual * price;
        }
        Ok(sum)
    };
    // The price is monotone increasing in v_last; bracket then bisect.
    let mut lo = 0.0;
    if price_at(lo)? > diff + STRIP_TOL {
        return Ok(None);
    }
    let mut hi = state.anchor.map_or(0.04 * t_last, |(_, va)| va.max(1e-4) * 2.0);
    let mut expansions = 0;
    while price_at(hi)? < diff {
        hi *= 2.0;
        expansions += 1;
        if expansions > 60 {
            return Ok(None);
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if price_at(mid)? < diff {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 * t_last.max(1.0) {
            break;
        }
    }
    let v = 0.5 * (lo + hi);
    if (price_at(v)? - diff).abs() > 1e-8 {
        return Ok(None);
    }
    Ok(Some(v))
}

// ---------------------------------------------------------------------------
// Two-dimensional pricing
// ---------------------------------------------------------------------------

/// One calibrated maturity pillar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermStructurePoint {
    pub t: f64,
    pub params: SabrParams,
}

/// Undiscounted caplet/floorlet price at any (T, K) inside the calibrated
/// span: smiles are evaluated at the bracketing pillars with the SABR
/// pricer, blended by variance interpolation in maturity; the forward
/// interpolates linearly between the pillars' forwards.
pub fn price_anything(
    t: f64,
    strike: f64,
    omega: i8,
    pillars: &[TermStructurePoint],
    pricer: &dyn SmilePricer,
) -> crate::Result<f64> {
    if pillars.is_empty() {
        return Err(SabrError::InvalidInput("need at least one pillar".into()));
    }
    if pillars.windows(2).any(|w| w[0].t >= w[1].t) {
        return Err(SabrError::InvalidInput("pillars must be increasing in maturity".into()));
    }
    let (first, last) = (pillars.first().unwrap(), pillars.last().unwrap());
    if t < first.t || t > last.t {
        return Err(SabrError::InvalidInput(format!(
            "maturity {t} outside calibrated span [{}, {}]",
            first.t, last.t
        )));
    }
    let (sigma, fwd, lambda) = match pillars.iter().position(|p| p.t == t) {
        Some(i) => {
            let p = &pillars[i];
            (
                pricer.vol(&p.params, p.t, strike)?,
                p.params.f0,
                p.params.lambda,
            )
        }
        None => {
            let hi = pillars.iter().position(|p| p.t > t).expect("t < last");
            let (a, b) = (&pillars[hi - 1], &pillars[hi]);
            let sig_a = pricer.vol(&a.params, a.t, strike)?;
            let sig_b = pricer.vol(&b.params, b.t, strike)?;
            let sigma = variance_interp(t, a.t, b.t, sig_a, sig_b)?;
            let w = (t - a.t) / (b.t - a.t);
            let fwd = a.params.f0 + w * (b.params.f0 - a.params.f0);
            let lambda = a.params.lambda + w * (b.params.lambda - a.params.lambda);
            (sigma, fwd, lambda)
        }
    };
    black_price(BlackInputs {
        fwd_shifted: fwd + lambda,
        strike_shifted: strike + lambda,
        variance: sigma * sigma * t,
        omega,
    })
}
