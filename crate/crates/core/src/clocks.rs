//! Calendar, event and volume clocks.
//!
//! Each constructor turns a pair of [`TransactionSeries`] into a [`SampledGrid`]
//! that the estimators consume. Calendar and event grids for the realised
//! volatility estimator use previous-tick interpolation; the raw grids keep the
//! trade times as observed. Volume grids average prices over fixed-share buckets.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::TransactionSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClockKind {
    Calendar,
    Event,
    Volume,
}

impl ClockKind {
    pub const ALL: [ClockKind; 3] = [ClockKind::Calendar, ClockKind::Event, ClockKind::Volume];

    pub fn as_str(self) -> &'static str {
        match self {
            ClockKind::Calendar => "calendar",
            ClockKind::Event => "event",
            ClockKind::Volume => "volume",
        }
    }
}

impl std::fmt::Display for ClockKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ClockKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "calendar" => Ok(ClockKind::Calendar),
            "event" | "trade" => Ok(ClockKind::Event),
            "volume" => Ok(ClockKind::Volume),
            other => Err(Error::BadParameters(format!("unknown clock '{other}'"))),
        }
    }
}

/// Observations of one asset on some clock.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AssetSamples {
    pub times: Vec<f64>,
    pub log_prices: Vec<f64>,
}

impl AssetSamples {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn returns(&self) -> impl Iterator<Item = f64> + '_ {
        self.log_prices.windows(2).map(|w| w[1] - w[0])
    }
}

/// Bucket size chosen for one asset: `V = ⌊V_tot / n⌋`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VolumeBucketing {
    pub samples: usize,
    pub bucket: u64,
    pub total: u64,
}

impl VolumeBucketing {
    pub fn new(total: u64, samples: usize) -> Result<Self> {
        if samples == 0 {
            return Err(Error::BadParameters("volume clock needs at least one sample".into()));
        }
        let bucket = total / samples as u64;
        if bucket == 0 {
            return Err(Error::InsufficientVolume {
                asset: 0,
                total,
                requested: samples,
            });
        }
        Ok(Self {
            samples,
            bucket,
            total,
        })
    }

    /// Shares left over after the last full bucket; always discarded.
    pub fn discarded(&self) -> u64 {
        self.total - self.bucket * self.samples as u64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledGrid {
    pub clock: ClockKind,
    pub assets: [AssetSamples; 2],
    pub synchronous: bool,
    pub homogeneous: bool,
    /// Sampling interval in clock units, for interpolated grids.
    pub interval: Option<f64>,
    /// Spacing of an integer lattice containing every observation time.
    pub lattice_step: Option<f64>,
    /// Some grid points precede the asset's first trade and were filled.
    pub leading_fill: bool,
    /// Window mapped onto `[0, 2π]` by the Fourier estimator for asynchronous
    /// grids; the union of observation times when unset.
    pub domain: Option<(f64, f64)>,
    pub buckets: Option<[VolumeBucketing; 2]>,
}

impl SampledGrid {
    pub fn with_domain(mut self, lo: f64, hi: f64) -> Self {
        self.domain = Some((lo, hi));
        self
    }

    pub fn min_len(&self) -> usize {
        self.assets[0].len().min(self.assets[1].len())
    }

    /// First and last observation time across both assets.
    pub fn span(&self) -> Option<(f64, f64)> {
        let firsts = self.assets.iter().filter_map(|a| a.times.first().copied());
        let lasts = self.assets.iter().filter_map(|a| a.times.last().copied());
        let lo = firsts.fold(f64::INFINITY, f64::min);
        let hi = lasts.fold(f64::NEG_INFINITY, f64::max);
        (lo <= hi).then_some((lo, hi))
    }

    /// `asset,clock,interval,index_or_time,log_price`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["asset", "clock", "interval", "index_or_time", "log_price"])?;
        let interval = self.interval.map(|x| x.to_string()).unwrap_or_default();
        for (a, s) in self.assets.iter().enumerate() {
            for k in 0..s.len() {
                w.write_record([
                    (a + 1).to_string(),
                    self.clock.to_string(),
                    interval.clone(),
                    s.times[k].to_string(),
                    s.log_prices[k].to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Value assigned to grid points before an asset's first observation.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeadingFill {
    /// Carry the first observed price backwards (empirical data).
    #[default]
    FirstObserved,
    /// Use known starting levels (simulated paths).
    Known(f64, f64),
}

impl LeadingFill {
    fn value(self, asset: usize, first: Option<f64>) -> Result<f64> {
        match self {
            LeadingFill::Known(a, b) => Ok(if asset == 0 { a } else { b }),
            LeadingFill::FirstObserved => first.ok_or(Error::EmptySeries),
        }
    }
}

/// Previous-tick values of `(times, values)` at the sorted query points.
fn previous_tick(times: &[f64], values: &[f64], grid: &[f64], before_first: f64) -> (Vec<f64>, bool) {
    let mut out = Vec::with_capacity(grid.len());
    let mut k = 0;
    let mut filled = false;
    for &g in grid {
        while k < times.len() && times[k] <= g {
            k += 1;
        }
        if k == 0 {
            filled = true;
            out.push(before_first);
        } else {
            out.push(values[k - 1]);
        }
    }
    (out, filled)
}

/// Synchronous grid `{0, dt, 2dt, …} ∩ [0, T]` with previous-tick prices.
pub fn calendar_grid_previous_tick(
    a: &TransactionSeries,
    b: &TransactionSeries,
    dt: f64,
    horizon: f64,
    fill: LeadingFill,
) -> Result<SampledGrid> {
    if !(dt > 0.0) || !(horizon >= dt) {
        return Err(Error::Domain(format!(
            "calendar grid needs 0 < dt <= T, got dt = {dt}, T = {horizon}"
        )));
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySeries);
    }
    let steps = grid_steps(dt, horizon);
    let grid: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).collect();
    let mut leading_fill = false;
    let assets = [a, b];
    let samples: Vec<AssetSamples> = assets
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let before = fill.value(i, s.prices.first().copied())?;
            let (v, filled) = previous_tick(&s.times, &s.prices, &grid, before);
            leading_fill |= filled;
            Ok(AssetSamples {
                times: grid.clone(),
                log_prices: v,
            })
        })
        .collect::<Result<_>>()?;
    let [s0, s1]: [AssetSamples; 2] = samples.try_into().expect("two assets");
    Ok(SampledGrid {
        clock: ClockKind::Calendar,
        assets: [s0, s1],
        synchronous: true,
        homogeneous: true,
        interval: Some(dt),
        lattice_step: Some(dt),
        leading_fill,
        domain: None,
        buckets: None,
    })
}

/// `⌊T / dt⌋`, tolerant of representation error when `T` is a multiple of `dt`.
fn grid_steps(dt: f64, horizon: f64) -> usize {
    let r = horizon / dt;
    let n = r.round();
    if (r - n).abs() <= 1e-9 * r.max(1.0) {
        n as usize
    } else {
        r.floor() as usize
    }
}

/// Trades as observed, one grid per asset.
pub fn raw_calendar(a: &TransactionSeries, b: &TransactionSeries) -> Result<SampledGrid> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySeries);
    }
    let samples = |s: &TransactionSeries| AssetSamples {
        times: s.times.clone(),
        log_prices: s.prices.clone(),
    };
    Ok(SampledGrid {
        clock: ClockKind::Calendar,
        assets: [samples(a), samples(b)],
        synchronous: false,
        homogeneous: false,
        interval: None,
        lattice_step: None,
        leading_fill: false,
        domain: None,
        buckets: None,
    })
}

/// One clock tick per event in either asset. Trades with identical timestamps
/// in the two assets share a tick.
pub fn shared_event_clock(a: &TransactionSeries, b: &TransactionSeries) -> Result<SampledGrid> {
    if a.is_empty() && b.is_empty() {
        return Err(Error::EmptySeries);
    }
    for s in [a, b] {
        if !s.strictly_increasing() {
            return Err(Error::Domain(
                "event clock needs strictly increasing times per asset; aggregate duplicates first".into(),
            ));
        }
    }
    let mut ta = Vec::with_capacity(a.len());
    let mut tb = Vec::with_capacity(b.len());
    let (mut i, mut j) = (0, 0);
    let mut tick = 0u64;
    while i < a.len() || j < b.len() {
        tick += 1;
        let k = tick as f64;
        match (a.times.get(i), b.times.get(j)) {
            (Some(&x), Some(&y)) if x == y => {
                ta.push(k);
                tb.push(k);
                i += 1;
                j += 1;
            }
            (Some(&x), Some(&y)) if x < y => {
                ta.push(k);
                i += 1;
            }
            (Some(_), None) => {
                ta.push(k);
                i += 1;
            }
            _ => {
                tb.push(k);
                j += 1;
            }
        }
    }
    Ok(SampledGrid {
        clock: ClockKind::Event,
        assets: [
            AssetSamples {
                times: ta,
                log_prices: a.prices.clone(),
            },
            AssetSamples {
                times: tb,
                log_prices: b.prices.clone(),
            },
        ],
        synchronous: false,
        homogeneous: true,
        interval: None,
        lattice_step: Some(1.0),
        leading_fill: false,
        domain: Some((0.0, tick as f64)),
        buckets: None,
    })
}

/// Samples the shared event clock at ticks `1, 1 + dk, 1 + 2dk, …` with previous-tick fill.
pub fn event_grid_previous_tick(event: &SampledGrid, dk: u64, fill: LeadingFill) -> Result<SampledGrid> {
    if dk == 0 {
        return Err(Error::Domain("event interval must be at least 1".into()));
    }
    if event.clock != ClockKind::Event || event.synchronous {
        return Err(Error::BadParameters("expected a raw shared event-clock grid".into()));
    }
    let (_, last) = event.span().ok_or(Error::EmptySeries)?;
    let span = last as u64;
    let grid: Vec<f64> = (0..)
        .map(|k| 1 + k * dk)
        .take_while(|&t| t <= span)
        .map(|t| t as f64)
        .collect();
    let mut leading_fill = false;
    let mut out: [AssetSamples; 2] = Default::default();
    for (i, s) in event.assets.iter().enumerate() {
        let before = fill.value(i, s.log_prices.first().copied())?;
        let (v, filled) = previous_tick(&s.times, &s.log_prices, &grid, before);
        leading_fill |= filled;
        out[i] = AssetSamples {
            times: grid.clone(),
            log_prices: v,
        };
    }
    Ok(SampledGrid {
        clock: ClockKind::Event,
        assets: out,
        synchronous: true,
        homogeneous: true,
        interval: Some(dk as f64),
        lattice_step: Some(dk as f64),
        leading_fill,
        domain: None,
        buckets: None,
    })
}

/// Averages each asset's prices over consecutive runs of `V` shares, where the
/// asset's trades are conceptually expanded one entry per share. Exactly
/// `samples` buckets are produced; the incomplete remainder is dropped.
pub fn volume_bucket_means(series: &TransactionSeries, samples: usize) -> Result<(Vec<f64>, VolumeBucketing)> {
    let bk = VolumeBucketing::new(series.total_volume(), samples)?;
    let v = bk.bucket;
    let mut out = Vec::with_capacity(samples);
    let mut sum = 0.0;
    let mut filled = 0u64;
    'trades: for (&p, &vol) in series.prices.iter().zip(&series.volumes) {
        let mut left = vol;
        while left > 0 {
            let take = left.min(v - filled);
            sum += p * take as f64;
            filled += take;
            left -= take;
            if filled == v {
                out.push(sum / v as f64);
                if out.len() == samples {
                    break 'trades;
                }
                sum = 0.0;
                filled = 0;
            }
        }
    }
    debug_assert_eq!(out.len(), samples);
    Ok((out, bk))
}

/// Synchronous volume-time grid with `samples` buckets per asset, indexed `0..samples`.
pub fn volume_clock(a: &TransactionSeries, b: &TransactionSeries, samples: usize) -> Result<SampledGrid> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySeries);
    }
    let mut assets: [AssetSamples; 2] = Default::default();
    let mut buckets = Vec::with_capacity(2);
    for (i, s) in [a, b].into_iter().enumerate() {
        let (means, bk) = volume_bucket_means(s, samples).map_err(|e| match e {
            Error::InsufficientVolume { total, requested, .. } => Error::InsufficientVolume {
                asset: i + 1,
                total,
                requested,
            },
            other => other,
        })?;
        assets[i] = AssetSamples {
            times: (0..samples).map(|k| k as f64).collect(),
            log_prices: means,
        };
        buckets.push(bk);
    }
    Ok(SampledGrid {
        clock: ClockKind::Volume,
        assets,
        synchronous: true,
        homogeneous: true,
        interval: Some(1.0),
        lattice_step: Some(1.0),
        leading_fill: false,
        domain: None,
        buckets: Some([buckets[0], buckets[1]]),
    })
}

/// Number of whole `dt` intervals in `[0, T]`; the volume-clock sample count
/// equivalent to a calendar interval `dt`.
pub fn interval_to_sample_count(dt: f64, horizon: f64) -> Result<usize> {
    if !(dt > 0.0) || !(horizon >= 0.0) {
        return Err(Error::Domain(format!("dt = {dt}, T = {horizon}")));
    }
    Ok(grid_steps(dt, horizon))
}
