//! Fine-to-coarse bivariate prices and IID transaction volumes.
//!
//! Asset 1 moves up one tick on every `N₁` event and down one on every `N₂`
//! event; asset 2 does the same with `N₃` and `N₄`. Volumes never feed back into
//! the intensity and are drawn independently of the price path.

use std::io::Write;

use rand::Rng;
use rand_distr::{Beta, Distribution, Normal, Pareto};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hawkes::EventStream;
use crate::rng::rng_from_seed;

/// Log-price level of one asset at its event times.
#[derive(Debug, Clone, PartialEq)]
pub struct PricePath {
    pub initial: f64,
    pub times: Vec<f64>,
    pub log_prices: Vec<f64>,
}

impl PricePath {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `X_t`: the level after all events at or before `t`.
    pub fn value_at(&self, t: f64) -> f64 {
        match self.times.partition_point(|&s| s <= t) {
            0 => self.initial,
            k => self.log_prices[k - 1],
        }
    }
}

/// Trades of one asset: `(time, price, volume)` with times non-decreasing.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TransactionSeries {
    pub times: Vec<f64>,
    pub prices: Vec<f64>,
    pub volumes: Vec<u64>,
}

impl TransactionSeries {
    pub fn new(times: Vec<f64>, prices: Vec<f64>, volumes: Vec<u64>) -> Result<Self> {
        if times.len() != prices.len() || times.len() != volumes.len() {
            return Err(Error::BadParameters("column lengths differ".into()));
        }
        if times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Domain("transaction times must be non-decreasing".into()));
        }
        if volumes.contains(&0) {
            return Err(Error::Domain("volumes must be at least 1".into()));
        }
        Ok(Self {
            times,
            prices,
            volumes,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn total_volume(&self) -> u64 {
        self.volumes.iter().sum()
    }

    pub fn strictly_increasing(&self) -> bool {
        self.times.windows(2).all(|w| w[0] < w[1])
    }
}

/// Transaction-volume distribution. Draws are rounded to integers and floored at one share.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VolumeDistSpec {
    /// Pareto with density `α x_m^α / x^{α+1}` on `x ≥ x_m`.
    PowerLaw { x_m: f64, alpha: f64 },
    /// Integers `lo..=hi` with equal probability.
    Uniform { lo: u64, hi: u64 },
    /// Gaussian, redrawn until positive.
    Normal { mean: f64, sd: f64 },
    /// `Beta(a, b)` multiplied by `scale` before rounding.
    Beta { a: f64, b: f64, scale: f64 },
}

impl Default for VolumeDistSpec {
    fn default() -> Self {
        Self::power_law_default()
    }
}

impl VolumeDistSpec {
    /// `x_m = 20`, density exponent `1 + α = 2.7`.
    pub fn power_law_default() -> Self {
        Self::PowerLaw {
            x_m: 20.0,
            alpha: 1.7,
        }
    }

    pub fn uniform_default() -> Self {
        Self::Uniform { lo: 1, hi: 100 }
    }

    pub fn normal_default() -> Self {
        Self::Normal {
            mean: 50.0,
            sd: 5.0,
        }
    }

    pub fn beta_symmetric(shape: f64) -> Self {
        Self::Beta {
            a: shape,
            b: shape,
            scale: 100.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::PowerLaw { x_m, alpha } => x_m > 0.0 && alpha > 0.0 && x_m.is_finite(),
            Self::Uniform { lo, hi } => lo >= 1 && lo <= hi,
            Self::Normal { mean, sd } => mean.is_finite() && sd > 0.0 && sd.is_finite(),
            Self::Beta { a, b, scale } => a > 0.0 && b > 0.0 && scale > 0.0 && scale.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::BadParameters(format!("invalid volume distribution {self:?}")))
        }
    }

    fn draw_raw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::PowerLaw { x_m, alpha } => Pareto::new(x_m, alpha)
                .expect("validated")
                .sample(rng),
            Self::Uniform { lo, hi } => rng.random_range(lo..=hi) as f64,
            Self::Normal { mean, sd } => {
                let d = Normal::new(mean, sd).expect("validated");
                loop {
                    let x = d.sample(rng);
                    if x > 0.0 {
                        break x;
                    }
                }
            }
            Self::Beta { a, b, scale } => Beta::new(a, b).expect("validated").sample(rng) * scale,
        }
    }
}

fn round_volume(x: f64) -> u64 {
    (x.round() as u64).max(1)
}

pub fn sample_volumes(dist: &VolumeDistSpec, count: usize, seed: u64) -> Result<Vec<u64>> {
    let mut rng = rng_from_seed(seed);
    sample_volumes_with(dist, count, &mut rng)
}

pub fn sample_volumes_with<R: Rng + ?Sized>(
    dist: &VolumeDistSpec,
    count: usize,
    rng: &mut R,
) -> Result<Vec<u64>> {
    dist.validate()?;
    Ok((0..count).map(|_| round_volume(dist.draw_raw(rng))).collect())
}

fn build_path(up: &EventStream, down: &EventStream, x0: f64) -> PricePath {
    let mut times = Vec::with_capacity(up.len() + down.len());
    let mut log_prices = Vec::with_capacity(up.len() + down.len());
    let (mut i, mut j) = (0, 0);
    let mut x = x0;
    while i < up.len() || j < down.len() {
        let take_up = j == down.len() || (i < up.len() && up.times[i] <= down.times[j]);
        if take_up {
            x += 1.0;
            times.push(up.times[i]);
            i += 1;
        } else {
            x -= 1.0;
            times.push(down.times[j]);
            j += 1;
        }
        log_prices.push(x);
    }
    PricePath {
        initial: x0,
        times,
        log_prices,
    }
}

/// `X¹ = X¹₀ + N₁ − N₂`, `X² = X²₀ + N₃ − N₄`.
pub fn build_price_paths(streams: &[EventStream], x0: (f64, f64)) -> Result<(PricePath, PricePath)> {
    if streams.len() != 4 {
        return Err(Error::BadParameters(format!(
            "fine-to-coarse prices need 4 event streams, got {}",
            streams.len()
        )));
    }
    Ok((
        build_path(&streams[0], &streams[1], x0.0),
        build_path(&streams[2], &streams[3], x0.1),
    ))
}

/// How simulated log-price levels are written into the price column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriceOutput {
    /// Store `X` itself; estimators consume it directly.
    #[default]
    LogLevel,
    /// Store `exp(X)`.
    Exponentiated,
}

pub fn to_transactions(
    path: &PricePath,
    dist: &VolumeDistSpec,
    seed: u64,
    output: PriceOutput,
) -> Result<TransactionSeries> {
    let volumes = sample_volumes(dist, path.len(), seed)?;
    let prices = match output {
        PriceOutput::LogLevel => path.log_prices.clone(),
        PriceOutput::Exponentiated => path.log_prices.iter().map(|x| x.exp()).collect(),
    };
    Ok(TransactionSeries {
        times: path.times.clone(),
        prices,
        volumes,
    })
}

/// `asset,time_seconds,price,volume`, assets 1-based.
pub fn write_transactions_csv<W: Write>(writer: W, assets: &[&TransactionSeries]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["asset", "time_seconds", "price", "volume"])?;
    for (a, s) in assets.iter().enumerate() {
        for k in 0..s.len() {
            w.write_record([
                (a + 1).to_string(),
                s.times[k].to_string(),
                s.prices[k].to_string(),
                s.volumes[k].to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
