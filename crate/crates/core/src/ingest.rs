//! Empirical trade files: load, clip to the trading session, merge same-second
//! trades by VWAP, and estimate one Epps curve per day before averaging.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::clocks::{ClockKind, LeadingFill};
use crate::error::{Error, Result};
use crate::estimators::{Estimator, FourierMethod};
use crate::experiments::{aggregate, estimate_pair, EppsCurve, EstimateRow, EstimationPlan, RibbonKind};
use crate::market::TransactionSeries;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeRecord {
    pub date: String,
    /// Seconds since midnight, local exchange time.
    pub time: u32,
    pub symbol: String,
    pub price: f64,
    pub volume: u64,
}

/// Parses `HH:MM:SS` or `HH:MM`.
pub fn parse_clock(s: &str) -> Option<u32> {
    let parts: Vec<&str> = s.trim().split(':').collect();
    if !(2..=3).contains(&parts.len()) {
        return None;
    }
    let mut v = [0u32; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        if p.is_empty() || p.len() > 2 || !p.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        *slot = p.parse().ok()?;
    }
    let [h, m, sec] = v;
    (h < 24 && m < 60 && sec < 60).then_some(h * 3600 + m * 60 + sec)
}

pub fn format_clock(secs: u32) -> String {
    format!("{:02}:{:02}:{:02}", secs / 3600, secs / 60 % 60, secs % 60)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SessionSpec {
    pub start: String,
    pub end: String,
}

impl Default for SessionSpec {
    fn default() -> Self {
        Self {
            start: "09:00:00".into(),
            end: "16:50:00".into(),
        }
    }
}

impl SessionSpec {
    /// `(start, end)` in seconds since midnight.
    pub fn bounds(&self) -> Result<(u32, u32)> {
        let parse = |s: &str| {
            parse_clock(s).ok_or_else(|| Error::BadParameters(format!("session time {s:?} is not HH:MM[:SS]")))
        };
        let (a, b) = (parse(&self.start)?, parse(&self.end)?);
        if b <= a {
            return Err(Error::BadParameters(format!(
                "session end {} is not after start {}",
                self.end, self.start
            )));
        }
        Ok((a, b))
    }

    /// Session length `T` in seconds.
    pub fn length(&self) -> Result<f64> {
        let (a, b) = self.bounds()?;
        Ok((b - a) as f64)
    }
}

/// Header names of the five input columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TradeSchema {
    pub date: String,
    pub time: String,
    pub symbol: String,
    pub price: String,
    pub volume: String,
}

impl Default for TradeSchema {
    fn default() -> Self {
        Self {
            date: "date".into(),
            time: "time".into(),
            symbol: "symbol".into(),
            price: "price".into(),
            volume: "volume".into(),
        }
    }
}

impl TradeSchema {
    /// Applies overrides like `time=Timestamp,price=Px` on top of `self`.
    pub fn with_mapping(mut self, mapping: &str) -> Result<Self> {
        for item in mapping.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (field, column) = item
                .split_once('=')
                .ok_or_else(|| Error::BadParameters(format!("schema entry {item:?} is not field=column")))?;
            let slot = match field.trim() {
                "date" => &mut self.date,
                "time" => &mut self.time,
                "symbol" => &mut self.symbol,
                "price" => &mut self.price,
                "volume" => &mut self.volume,
                other => return Err(Error::BadParameters(format!("unknown schema field {other:?}"))),
            };
            *slot = column.trim().to_string();
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LoadedTrades {
    pub records: Vec<TradeRecord>,
    /// In-session records are kept; these were dropped.
    pub out_of_session: usize,
}

impl LoadedTrades {
    /// Records keyed by `(date, symbol)`, each group in time order (ties keep file order).
    pub fn grouped(&self) -> BTreeMap<(String, String), Vec<TradeRecord>> {
        let mut out: BTreeMap<(String, String), Vec<TradeRecord>> = BTreeMap::new();
        for r in &self.records {
            out.entry((r.date.clone(), r.symbol.clone())).or_default().push(r.clone());
        }
        for v in out.values_mut() {
            v.sort_by_key(|r| r.time);
        }
        out
    }

    pub fn symbols(&self) -> BTreeSet<String> {
        self.records.iter().map(|r| r.symbol.clone()).collect()
    }

    pub fn extend(&mut self, other: LoadedTrades) {
        self.records.extend(other.records);
        self.out_of_session += other.out_of_session;
    }
}

pub fn load_trades<R: Read>(reader: R, schema: &TradeSchema, session: &SessionSpec) -> Result<LoadedTrades> {
    let (open, close) = session.bounds()?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() {
        return Ok(LoadedTrades::default());
    }
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| Error::Parse {
            line: 1,
            message: format!("missing column {name:?}"),
        })
    };
    let (ci, ti, si, pi, vi) = (
        col(&schema.date)?,
        col(&schema.time)?,
        col(&schema.symbol)?,
        col(&schema.price)?,
        col(&schema.volume)?,
    );

    let mut out = LoadedTrades::default();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let field = |i: usize, what: &str| {
            rec.get(i).ok_or_else(|| Error::Parse {
                line,
                message: format!("missing {what}"),
            })
        };
        let bad = |what: &str, v: &str| Error::Parse {
            line,
            message: format!("invalid {what} {v:?}"),
        };
        let date = field(ci, "date")?;
        if date.is_empty() {
            return Err(bad("date", date));
        }
        let t = field(ti, "time")?;
        let time = parse_clock(t).ok_or_else(|| bad("time", t))?;
        let symbol = field(si, "symbol")?;
        if symbol.is_empty() {
            return Err(bad("symbol", symbol));
        }
        let p = field(pi, "price")?;
        let price: f64 = p.parse().map_err(|_| bad("price", p))?;
        if !(price > 0.0 && price.is_finite()) {
            return Err(bad("price", p));
        }
        let v = field(vi, "volume")?;
        let volume: u64 = v.parse().map_err(|_| bad("volume", v))?;
        if volume == 0 {
            return Err(bad("volume", v));
        }
        if time < open || time > close {
            out.out_of_session += 1;
            continue;
        }
        out.records.push(TradeRecord {
            date: date.to_string(),
            time,
            symbol: symbol.to_string(),
            price,
            volume,
        });
    }
    Ok(out)
}

/// `date,time,symbol,price,volume` with the default column names.
pub fn write_trades_csv<W: Write>(writer: W, records: &[TradeRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["date", "time", "symbol", "price", "volume"])?;
    for r in records {
        w.write_record([
            r.date.clone(),
            format_clock(r.time),
            r.symbol.clone(),
            r.price.to_string(),
            r.volume.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Merges trades sharing a timestamp: `price = Σpv / Σv`, `volume = Σv`.
/// Times are reported in seconds since `origin` (the session open).
pub fn vwap_aggregate(records: &[TradeRecord], origin: u32) -> Result<TransactionSeries> {
    let mut sorted: Vec<&TradeRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.time);
    let (mut times, mut prices, mut volumes) = (Vec::new(), Vec::new(), Vec::new());
    let mut i = 0;
    while i < sorted.len() {
        let t = sorted[i].time;
        let mut pv = 0.0;
        let mut v = 0u64;
        while i < sorted.len() && sorted[i].time == t {
            pv += sorted[i].price * sorted[i].volume as f64;
            v += sorted[i].volume;
            i += 1;
        }
        if t < origin {
            return Err(Error::Domain(format!("trade at {} precedes the session open", format_clock(t))));
        }
        times.push((t - origin) as f64);
        prices.push(pv / v as f64);
        volumes.push(v);
    }
    TransactionSeries::new(times, prices, volumes)
}

pub fn to_log_prices(mut series: TransactionSeries) -> TransactionSeries {
    for p in &mut series.prices {
        *p = p.ln();
    }
    series
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestConfig {
    /// Trade files; command-line paths take precedence.
    pub inputs: Vec<String>,
    pub schema: TradeSchema,
    pub session: SessionSpec,
    /// Symbol pairs to correlate; every pair of observed symbols when empty.
    pub pairs: Vec<[String; 2]>,
    /// Estimate on `ln(price)` rather than price.
    pub log_prices: bool,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            inputs: Vec::new(),
            schema: TradeSchema::default(),
            session: SessionSpec::default(),
            pairs: Vec::new(),
            log_prices: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDay {
    pub date: String,
    pub a: TransactionSeries,
    pub b: TransactionSeries,
}

/// VWAP-aggregated (and optionally log-converted) series for each date on
/// which both symbols traded. Dates missing either symbol are returned separately.
pub fn build_days(
    trades: &LoadedTrades,
    pair: &[String; 2],
    session: &SessionSpec,
    log_prices: bool,
) -> Result<(Vec<EmpiricalDay>, Vec<String>)> {
    let (open, _) = session.bounds()?;
    let groups = trades.grouped();
    let dates: BTreeSet<&String> = groups.keys().map(|(d, _)| d).collect();
    let mut days = Vec::new();
    let mut skipped = Vec::new();
    for date in dates {
        let get = |s: &String| groups.get(&(date.clone(), s.clone()));
        match (get(&pair[0]), get(&pair[1])) {
            (Some(ra), Some(rb)) => {
                let prep = |r: &[TradeRecord]| -> Result<TransactionSeries> {
                    let s = vwap_aggregate(r, open)?;
                    Ok(if log_prices { to_log_prices(s) } else { s })
                };
                days.push(EmpiricalDay {
                    date: date.clone(),
                    a: prep(ra)?,
                    b: prep(rb)?,
                });
            }
            _ => skipped.push(date.clone()),
        }
    }
    Ok((days, skipped))
}

/// Per-day estimates for one symbol pair.
pub fn per_day_estimates(
    days: &[EmpiricalDay],
    horizon: f64,
    intervals: &[u64],
    clocks: &[ClockKind],
    estimators: &[Estimator],
    fourier: FourierMethod,
) -> Result<Vec<Vec<EstimateRow>>> {
    if days.is_empty() {
        return Err(Error::TooFewValues { needed: 1, got: 0 });
    }
    let plan = EstimationPlan {
        horizon,
        intervals,
        clocks,
        estimators,
        fill: LeadingFill::FirstObserved,
        fourier,
    };
    let run = |d: &EmpiricalDay| estimate_pair(&d.a, &d.b, &plan);
    #[cfg(feature = "parallel")]
    let results: Vec<Result<Vec<EstimateRow>>> = {
        use rayon::prelude::*;
        days.par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<Vec<EstimateRow>>> = days.iter().map(run).collect();
    results.into_iter().collect()
}

/// Each day is estimated on its own session window, so no return ever spans
/// two days; the curve is the cross-day mean at each interval.
pub fn per_day_epps(
    days: &[EmpiricalDay],
    horizon: f64,
    intervals: &[u64],
    clocks: &[ClockKind],
    estimators: &[Estimator],
    fourier: FourierMethod,
    ribbon: RibbonKind,
) -> Result<Vec<EppsCurve>> {
    let rows = per_day_estimates(days, horizon, intervals, clocks, estimators, fourier)?;
    aggregate(&rows, ribbon)
}
