//! Monte Carlo Epps-curve sweeps across clocks and estimators.
//!
//! One replication simulates the fine-to-coarse Hawkes pair, attaches volumes
//! and runs [`estimate_pair`]; the sweep aggregates replications into curves of
//! mean correlation with a t-quantile ribbon. Replications are independent and
//! seeded by index, so results do not depend on scheduling or worker count.

use std::io::Write;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::clocks::{
    calendar_grid_previous_tick, event_grid_previous_tick, interval_to_sample_count, raw_calendar,
    shared_event_clock, volume_clock, ClockKind, LeadingFill,
};
use crate::error::{Error, Result};
use crate::estimators::{
    downsample, hy_covariance, mm_nyquist, n_from_interval, rv_covariance, CovarianceEstimate, Estimator,
    FourierMethod, MmSpectra,
};
use crate::ingest::IngestConfig;
use crate::hawkes::{build_fine_to_coarse_spec, simulate, EventStream, HawkesSpec};
use crate::market::{build_price_paths, to_transactions, PriceOutput, TransactionSeries, VolumeDistSpec};
use crate::numeric::{mean, sample_sd, CompensatedSum};
use crate::rng::{derive_seed, Purpose};
use crate::theory::{theory_params_from_model, theory_rho, theory_rho_limit, TheoryParams, VarianceForm};

/// `(μ, α^(r), α^(c), β)` of the fine-to-coarse model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub mu: f64,
    pub alpha_r: f64,
    pub alpha_c: f64,
    pub beta: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            mu: 0.015,
            alpha_r: 0.023,
            alpha_c: 0.05,
            beta: 0.11,
        }
    }
}

impl ModelParams {
    pub fn hawkes(&self, horizon: f64) -> Result<HawkesSpec> {
        build_fine_to_coarse_spec(self.mu, self.alpha_r, self.alpha_c, self.beta, horizon)
    }

    pub fn theory(&self) -> Result<TheoryParams> {
        theory_params_from_model(self.mu, self.alpha_r, self.alpha_c, self.beta)
    }

    /// Same model with the cross-asset kernel switched off.
    pub fn decoupled(&self) -> Self {
        Self { alpha_c: 0.0, ..*self }
    }
}

/// Width of the band drawn around the mean curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RibbonKind {
    /// `mean ± t·sd`: where the individual estimates fall.
    #[default]
    Dispersion,
    /// `mean ± t·sd/√n`: confidence interval for the mean.
    StandardError,
}

/// Log- or linearly spaced `Δt` values for the theory curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DtGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub log_spaced: bool,
}

impl Default for DtGrid {
    fn default() -> Self {
        Self {
            min: 1.0,
            max: 100.0,
            points: 100,
            log_spaced: false,
        }
    }
}

impl DtGrid {
    pub fn validate(&self) -> Result<()> {
        let ok = self.points >= 1
            && self.min > 0.0
            && self.max.is_finite()
            && (self.max > self.min || (self.points == 1 && self.max >= self.min));
        if ok {
            Ok(())
        } else {
            Err(Error::BadParameters(format!("invalid dt grid {self:?}")))
        }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                let u = k as f64 / last;
                if k + 1 == self.points {
                    self.max
                } else if self.log_spaced {
                    self.min * (self.max / self.min).powf(u)
                } else {
                    self.min + (self.max - self.min) * u
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub replications: usize,
    /// Simulation horizon `T` in seconds.
    pub horizon: f64,
    /// Sampling intervals in clock units (seconds, ticks, or calendar-equivalent volume buckets).
    pub intervals: Vec<u64>,
    pub clocks: Vec<ClockKind>,
    pub estimators: Vec<Estimator>,
    pub volume: VolumeDistSpec,
    pub seed: u64,
    pub model: ModelParams,
    /// Starting log-price levels.
    pub x0: (f64, f64),
    pub ribbon: RibbonKind,
    pub theory_overlay: bool,
    pub variance_form: VarianceForm,
    pub fourier: FourierMethod,
    pub theory_grid: DtGrid,
    pub ingest: IngestConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            replications: 100,
            horizon: 72_000.0,
            intervals: (1..=100).collect(),
            clocks: ClockKind::ALL.to_vec(),
            estimators: Estimator::ALL.to_vec(),
            volume: VolumeDistSpec::default(),
            seed: 2020,
            model: ModelParams::default(),
            x0: (0.0, 0.0),
            ribbon: RibbonKind::default(),
            theory_overlay: true,
            variance_form: VarianceForm::default(),
            fourier: FourierMethod::default(),
            theory_grid: DtGrid::default(),
            ingest: IngestConfig::default(),
        }
    }
}

fn check_unique<T: PartialEq + std::fmt::Debug>(what: &str, xs: &[T]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::BadParameters(format!("no {what} selected")));
    }
    for (i, x) in xs.iter().enumerate() {
        if xs[..i].contains(x) {
            return Err(Error::BadParameters(format!("{what} {x:?} listed twice")));
        }
    }
    Ok(())
}

pub(crate) fn check_intervals(intervals: &[u64], horizon: f64) -> Result<()> {
    if intervals.is_empty() {
        return Err(Error::BadParameters("no sampling intervals".into()));
    }
    if intervals[0] == 0 || intervals.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::BadParameters("intervals must be positive and strictly increasing".into()));
    }
    let last = *intervals.last().expect("non-empty");
    if last as f64 > horizon {
        return Err(Error::BadParameters(format!("interval {last} exceeds the horizon {horizon}")));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications < 2 {
            return Err(Error::BadParameters(format!(
                "need at least 2 replications, got {}",
                self.replications
            )));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::BadParameters(format!("horizon {} must be positive", self.horizon)));
        }
        check_intervals(&self.intervals, self.horizon)?;
        check_unique("clock", &self.clocks)?;
        check_unique("estimator", &self.estimators)?;
        self.volume.validate()?;
        if !(self.x0.0.is_finite() && self.x0.1.is_finite()) {
            return Err(Error::BadParameters("x0 must be finite".into()));
        }
        self.model.hawkes(self.horizon)?;
        self.theory_grid.validate()?;
        self.ingest.session.bounds()?;
        if self.theory_overlay {
            self.model.theory()?;
        }
        Ok(())
    }

    fn plan(&self) -> EstimationPlan<'_> {
        EstimationPlan {
            horizon: self.horizon,
            intervals: &self.intervals,
            clocks: &self.clocks,
            estimators: &self.estimators,
            fill: LeadingFill::Known(self.x0.0, self.x0.1),
            fourier: self.fourier,
        }
    }
}

/// What to estimate on one pair of transaction series.
#[derive(Debug, Clone, Copy)]
pub struct EstimationPlan<'a> {
    /// Length of the observation window; times lie in `[0, horizon]`.
    pub horizon: f64,
    pub intervals: &'a [u64],
    pub clocks: &'a [ClockKind],
    pub estimators: &'a [Estimator],
    pub fill: LeadingFill,
    pub fourier: FourierMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    pub clock: ClockKind,
    pub estimator: Estimator,
    pub interval: u64,
    pub estimate: CovarianceEstimate,
}

/// Fourier estimates at the cut-offs implied by `intervals` over a window of `span` units.
fn mm_over_intervals(
    spectra_grid: &crate::clocks::SampledGrid,
    span: f64,
    intervals: &[u64],
    method: FourierMethod,
) -> Result<Vec<CovarianceEstimate>> {
    let modes = intervals
        .iter()
        .map(|&k| n_from_interval(span, k as f64))
        .collect::<Result<Vec<_>>>()?;
    let max = modes.iter().copied().max().unwrap_or(0);
    let spectra = MmSpectra::new(spectra_grid, max, method)?;
    modes.into_iter().map(|n| spectra.estimate(n)).collect()
}

fn calendar_estimates(
    a: &TransactionSeries,
    b: &TransactionSeries,
    plan: &EstimationPlan,
    est: Estimator,
) -> Result<Vec<CovarianceEstimate>> {
    match est {
        Estimator::Rv => {
            let base = calendar_grid_previous_tick(a, b, 1.0, plan.horizon, plan.fill)?;
            plan.intervals
                .iter()
                .map(|&k| rv_covariance(&downsample(&base, k as usize)?))
                .collect()
        }
        Estimator::Mm => {
            let raw = raw_calendar(a, b)?.with_domain(0.0, plan.horizon);
            mm_over_intervals(&raw, plan.horizon, plan.intervals, plan.fourier)
        }
        Estimator::Hy => {
            let e = hy_covariance(&raw_calendar(a, b)?)?;
            Ok(vec![e; plan.intervals.len()])
        }
    }
}

fn event_estimates(
    event: &crate::clocks::SampledGrid,
    plan: &EstimationPlan,
    est: Estimator,
) -> Result<Vec<CovarianceEstimate>> {
    match est {
        Estimator::Rv => plan
            .intervals
            .iter()
            .map(|&k| rv_covariance(&event_grid_previous_tick(event, k, plan.fill)?))
            .collect(),
        Estimator::Mm => {
            let (_, ticks) = event.domain.ok_or(Error::EmptySeries)?;
            mm_over_intervals(event, ticks, plan.intervals, plan.fourier)
        }
        Estimator::Hy => {
            let e = hy_covariance(event)?;
            Ok(vec![e; plan.intervals.len()])
        }
    }
}

/// Every requested `(clock, estimator, interval)` estimate, ordered by clock,
/// then estimator, then interval, as listed in the plan.
///
/// * calendar: RV on the 1-second previous-tick grid downsampled to each
///   interval; MM on the raw trades with `N` from the interval; HY on the raw
///   trades (one value, repeated);
/// * event: RV on the previous-tick event grid; MM on the shared event clock
///   with `N` from the interval and the tick count; HY on the shared clock;
/// * volume: one bucketed grid per interval with as many samples as the
///   calendar grid, every estimator on that grid (MM at its Nyquist cut-off).
pub fn estimate_pair(a: &TransactionSeries, b: &TransactionSeries, plan: &EstimationPlan) -> Result<Vec<EstimateRow>> {
    check_intervals(plan.intervals, plan.horizon)?;
    let mut rows = Vec::with_capacity(plan.clocks.len() * plan.estimators.len() * plan.intervals.len());
    let mut push = |clock, est, values: Vec<CovarianceEstimate>| {
        for (&interval, estimate) in plan.intervals.iter().zip(values) {
            rows.push(EstimateRow {
                clock,
                estimator: est,
                interval,
                estimate,
            });
        }
    };
    for &clock in plan.clocks {
        match clock {
            ClockKind::Calendar => {
                for &est in plan.estimators {
                    push(clock, est, calendar_estimates(a, b, plan, est)?);
                }
            }
            ClockKind::Event => {
                let event = shared_event_clock(a, b)?;
                for &est in plan.estimators {
                    push(clock, est, event_estimates(&event, plan, est)?);
                }
            }
            ClockKind::Volume => {
                let mut per_est = vec![Vec::with_capacity(plan.intervals.len()); plan.estimators.len()];
                for &k in plan.intervals {
                    let n = interval_to_sample_count(k as f64, plan.horizon)?;
                    let grid = volume_clock(a, b, n)?;
                    for (slot, &est) in per_est.iter_mut().zip(plan.estimators) {
                        slot.push(match est {
                            Estimator::Rv => rv_covariance(&grid)?,
                            Estimator::Mm => mm_nyquist(&grid)?,
                            Estimator::Hy => hy_covariance(&grid)?,
                        });
                    }
                }
                for (values, &est) in per_est.into_iter().zip(plan.estimators) {
                    push(clock, est, values);
                }
            }
        }
    }
    Ok(rows)
}

/// The transaction pair of replication `rep`.
pub fn simulate_pair(config: &ExperimentConfig, rep: u64) -> Result<(TransactionSeries, TransactionSeries)> {
    let (_, a, b) = simulate_replication(config, rep)?;
    Ok((a, b))
}

/// Replication `rep` with the underlying Hawkes event streams.
pub fn simulate_replication(
    config: &ExperimentConfig,
    rep: u64,
) -> Result<(Vec<EventStream>, TransactionSeries, TransactionSeries)> {
    let spec = config.model.hawkes(config.horizon)?;
    let streams = simulate(&spec, derive_seed(config.seed, rep, Purpose::Events));
    let (pa, pb) = build_price_paths(&streams, config.x0)?;
    let a = to_transactions(
        &pa,
        &config.volume,
        derive_seed(config.seed, rep, Purpose::VolumesAsset1),
        PriceOutput::LogLevel,
    )?;
    let b = to_transactions(
        &pb,
        &config.volume,
        derive_seed(config.seed, rep, Purpose::VolumesAsset2),
        PriceOutput::LogLevel,
    )?;
    Ok((streams, a, b))
}

pub fn run_replication(config: &ExperimentConfig, rep: u64) -> Result<Vec<EstimateRow>> {
    let (a, b) = simulate_pair(config, rep)?;
    estimate_pair(&a, &b, &config.plan())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ribbon {
    pub mean: f64,
    pub lo: f64,
    pub hi: f64,
    pub sd: f64,
    pub n: usize,
}

impl Ribbon {
    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    /// Standard error of the mean.
    pub fn standard_error(&self) -> f64 {
        self.sd / (self.n as f64).sqrt()
    }
}

/// `t_{0.975, df}`.
pub fn t_quantile_975(df: usize) -> f64 {
    StudentsT::new(0.0, 1.0, df as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.975)
}

/// `mean ± t_{0.975, n−1}·sd`, or `·sd/√n` for [`RibbonKind::StandardError`].
pub fn ribbon(values: &[f64], kind: RibbonKind) -> Result<Ribbon> {
    let n = values.len();
    if n < 2 {
        return Err(Error::TooFewValues { needed: 2, got: n });
    }
    let m = mean(values);
    let sd = sample_sd(values);
    let scale = match kind {
        RibbonKind::Dispersion => sd,
        RibbonKind::StandardError => sd / (n as f64).sqrt(),
    };
    let w = t_quantile_975(n - 1) * scale;
    Ok(Ribbon {
        mean: m,
        lo: m - w,
        hi: m + w,
        sd,
        n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub interval: u64,
    pub ribbon: Ribbon,
    /// Calendar-time model correlation at `Δt = interval` seconds.
    pub theory: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EppsCurve {
    pub clock: ClockKind,
    pub estimator: Estimator,
    pub points: Vec<CurvePoint>,
    pub rho_limit: Option<f64>,
}

impl EppsCurve {
    pub fn point(&self, interval: u64) -> Option<&CurvePoint> {
        self.points.iter().find(|p| p.interval == interval)
    }

    pub fn means(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.ribbon.mean).collect()
    }

    /// Overlays the calendar-time closed form on every point.
    pub fn with_theory(mut self, params: &TheoryParams) -> Result<Self> {
        for p in &mut self.points {
            p.theory = Some(theory_rho(params, p.interval as f64)?);
        }
        self.rho_limit = Some(theory_rho_limit(params.gamma12, params.gamma13)?);
        Ok(self)
    }
}

/// Collapses per-unit estimates (replications or days) into curves. Every unit
/// must have the same row layout. A single unit yields a zero-width band.
pub fn aggregate(units: &[Vec<EstimateRow>], kind: RibbonKind) -> Result<Vec<EppsCurve>> {
    let first = units.first().ok_or(Error::TooFewValues { needed: 1, got: 0 })?;
    for u in units {
        let same = u.len() == first.len()
            && u.iter()
                .zip(first)
                .all(|(x, y)| (x.clock, x.estimator, x.interval) == (y.clock, y.estimator, y.interval));
        if !same {
            return Err(Error::BadParameters("units have different estimate layouts".into()));
        }
    }
    let mut curves: Vec<EppsCurve> = Vec::new();
    for (i, row) in first.iter().enumerate() {
        let values: Vec<f64> = units.iter().map(|u| u[i].estimate.rho).collect();
        let band = if values.len() == 1 {
            Ribbon {
                mean: values[0],
                lo: values[0],
                hi: values[0],
                sd: 0.0,
                n: 1,
            }
        } else {
            ribbon(&values, kind)?
        };
        let point = CurvePoint {
            interval: row.interval,
            ribbon: band,
            theory: None,
        };
        match curves.last_mut() {
            Some(c) if c.clock == row.clock && c.estimator == row.estimator => c.points.push(point),
            _ => curves.push(EppsCurve {
                clock: row.clock,
                estimator: row.estimator,
                points: vec![point],
                rho_limit: None,
            }),
        }
    }
    Ok(curves)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutput {
    pub curves: Vec<EppsCurve>,
    /// Raw estimates, indexed by replication.
    pub replications: Vec<Vec<EstimateRow>>,
}

impl SweepOutput {
    pub fn curve(&self, clock: ClockKind, estimator: Estimator) -> Option<&EppsCurve> {
        self.curves
            .iter()
            .find(|c| c.clock == clock && c.estimator == estimator)
    }
}

pub fn run_epps_sweep(config: &ExperimentConfig) -> Result<SweepOutput> {
    config.validate()?;
    let run = |r: usize| run_replication(config, r as u64);
    #[cfg(feature = "parallel")]
    let results: Vec<Result<Vec<EstimateRow>>> = {
        use rayon::prelude::*;
        (0..config.replications).into_par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<Vec<EstimateRow>>> = (0..config.replications).map(run).collect();
    let replications = results.into_iter().collect::<Result<Vec<_>>>()?;

    let mut curves = aggregate(&replications, config.ribbon)?;
    if config.theory_overlay {
        let params = config.model.theory()?.with_form(config.variance_form);
        curves = curves
            .into_iter()
            .map(|c| c.with_theory(&params))
            .collect::<Result<_>>()?;
    }
    Ok(SweepOutput { curves, replications })
}

/// The sweep with the cross-asset kernel removed; every curve should straddle zero.
pub fn uncorrelated_scenario(config: &ExperimentConfig) -> Result<SweepOutput> {
    let mut cfg = config.clone();
    cfg.model = config.model.decoupled();
    run_epps_sweep(&cfg)
}

/// Power-law, uniform, normal and symmetric beta(2, 2) volumes.
pub fn comparison_volume_specs() -> [(&'static str, VolumeDistSpec); 4] {
    [
        ("power_law", VolumeDistSpec::power_law_default()),
        ("uniform", VolumeDistSpec::uniform_default()),
        ("normal", VolumeDistSpec::normal_default()),
        ("beta", VolumeDistSpec::beta_symmetric(2.0)),
    ]
}

/// Volume-time RV curve under each volume distribution.
pub fn volume_distribution_sweep(config: &ExperimentConfig) -> Result<Vec<(&'static str, EppsCurve)>> {
    comparison_volume_specs()
        .into_iter()
        .map(|(name, dist)| {
            let mut cfg = config.clone();
            cfg.clocks = vec![ClockKind::Volume];
            cfg.estimators = vec![Estimator::Rv];
            cfg.volume = dist;
            cfg.theory_overlay = false;
            let mut out = run_epps_sweep(&cfg)?;
            Ok((name, out.curves.remove(0)))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

pub const LINEARITY_MIN_INTERVAL: u64 = 10;

/// OLS of mean correlation on interval over intervals `≥ 10`. A perfectly
/// flat curve is a perfect fit (`R² = 1`).
pub fn linearity_diagnostic(curve: &EppsCurve) -> Result<LinearFit> {
    let pts: Vec<(f64, f64)> = curve
        .points
        .iter()
        .filter(|p| p.interval >= LINEARITY_MIN_INTERVAL)
        .map(|p| (p.interval as f64, p.ribbon.mean))
        .collect();
    if pts.len() < 10 {
        return Err(Error::TooFewValues {
            needed: 10,
            got: pts.len(),
        });
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let (mx, my) = (mean(&xs), mean(&ys));
    let sxx = xs.iter().map(|x| (x - mx) * (x - mx)).collect::<CompensatedSum>().value();
    let sxy = pts.iter().map(|(x, y)| (x - mx) * (y - my)).collect::<CompensatedSum>().value();
    let syy = ys.iter().map(|y| (y - my) * (y - my)).collect::<CompensatedSum>().value();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse = pts
        .iter()
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .collect::<CompensatedSum>()
        .value();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
        points: pts.len(),
    })
}

/// `clock,estimator,interval,mean_rho,ribbon_lo,ribbon_hi,n_reps`, plus
/// `rho_theory,rho_limit` when any curve carries the overlay.
pub fn write_curves_csv<W: Write>(writer: W, curves: &[EppsCurve]) -> Result<()> {
    let overlay = curves.iter().any(|c| c.rho_limit.is_some());
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["clock", "estimator", "interval", "mean_rho", "ribbon_lo", "ribbon_hi", "n_reps"];
    if overlay {
        header.extend(["rho_theory", "rho_limit"]);
    }
    w.write_record(&header)?;
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    for c in curves {
        for p in &c.points {
            let mut rec = vec![
                c.clock.to_string(),
                c.estimator.to_string(),
                p.interval.to_string(),
                p.ribbon.mean.to_string(),
                p.ribbon.lo.to_string(),
                p.ribbon.hi.to_string(),
                p.ribbon.n.to_string(),
            ];
            if overlay {
                rec.push(opt(p.theory));
                rec.push(opt(c.rho_limit));
            }
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `dt,rho_theory,variance_rate,covariance_rate`.
pub fn write_theory_csv<W: Write>(writer: W, params: &TheoryParams, dts: &[f64]) -> Result<()> {
    use crate::theory::{theory_covariance_rate, theory_variance_rate};
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["dt", "rho_theory", "variance_rate", "covariance_rate"])?;
    for &dt in dts {
        w.write_record([
            dt.to_string(),
            theory_rho(params, dt)?.to_string(),
            theory_variance_rate(params, dt)?.to_string(),
            theory_covariance_rate(params, dt)?.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
