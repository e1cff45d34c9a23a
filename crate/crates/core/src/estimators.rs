//! Integrated covariance estimators: Malliavin–Mancino (Fourier),
//! Hayashi–Yoshida and realised volatility.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::clocks::{ClockKind, SampledGrid};
use crate::error::{Error, Result};
use crate::fourier::{self, FourierCoefficients};
use crate::numeric::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Mm,
    Rv,
    Hy,
}

impl Estimator {
    pub const ALL: [Estimator; 3] = [Estimator::Mm, Estimator::Rv, Estimator::Hy];

    pub fn as_str(self) -> &'static str {
        match self {
            Estimator::Mm => "mm",
            Estimator::Rv => "rv",
            Estimator::Hy => "hy",
        }
    }
}

impl std::fmt::Display for Estimator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mm" => Ok(Estimator::Mm),
            "rv" => Ok(Estimator::Rv),
            "hy" => Ok(Estimator::Hy),
            other => Err(Error::BadParameters(format!("unknown estimator '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EstimateFlags {
    /// Requested Fourier scale is finer than the smallest observation gap.
    pub aliasing: bool,
    /// `|ρ|` exceeded one and was clamped.
    pub clamped: bool,
    /// The grid contains values filled before an asset's first trade.
    pub leading_fill: bool,
}

impl std::fmt::Display for EstimateFlags {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let names: Vec<&str> = [
            (self.aliasing, "aliasing"),
            (self.clamped, "clamped"),
            (self.leading_fill, "leading_fill"),
        ]
        .iter()
        .filter(|(on, _)| *on)
        .map(|(_, n)| *n)
        .collect();
        f.write_str(&names.join("|"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceEstimate {
    pub estimator: Estimator,
    pub sigma: [[f64; 2]; 2],
    pub rho: f64,
    /// Fourier cut-off `N` for MM estimates.
    pub modes: Option<usize>,
    pub flags: EstimateFlags,
}

impl CovarianceEstimate {
    fn new(estimator: Estimator, s11: f64, s12: f64, s22: f64, modes: Option<usize>, mut flags: EstimateFlags) -> Self {
        let mut rho = s12 / (s11 * s22).sqrt();
        if rho.abs() > 1.0 {
            rho = rho.clamp(-1.0, 1.0);
            flags.clamped = true;
        }
        Self {
            estimator,
            sigma: [[s11, s12], [s12, s22]],
            rho,
            modes,
            flags,
        }
    }
}

/// Writes `estimator,clock,interval,sigma11,sigma12,sigma22,rho,flags`.
pub fn write_estimates_csv<W: Write>(
    writer: W,
    rows: &[(ClockKind, f64, CovarianceEstimate)],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["estimator", "clock", "interval", "sigma11", "sigma12", "sigma22", "rho", "flags"])?;
    for (clock, interval, e) in rows {
        w.write_record([
            e.estimator.to_string(),
            clock.to_string(),
            interval.to_string(),
            e.sigma[0][0].to_string(),
            e.sigma[0][1].to_string(),
            e.sigma[1][1].to_string(),
            e.rho.to_string(),
            e.flags.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `N = ⌊(T/Δt − 1) / 2⌋`.
pub fn n_from_interval(horizon: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && dt <= horizon) {
        return Err(Error::Domain(format!("need 0 < dt <= T, got dt = {dt}, T = {horizon}")));
    }
    let r = horizon / dt;
    let nearest = r.round();
    let r = if (r - nearest).abs() <= 1e-9 * r { nearest } else { r };
    Ok(((r - 1.0) / 2.0).floor() as usize)
}

/// Fourier cut-off at which MM on `r` synchronous returns reproduces RV.
pub fn nyquist_modes(returns: usize) -> usize {
    returns / 2
}

fn require_observations(grid: &SampledGrid) -> Result<()> {
    let got = grid.min_len();
    if got < 2 {
        return Err(Error::TooFewObservations { needed: 2, got });
    }
    Ok(())
}

fn require_synchronous(grid: &SampledGrid) -> Result<()> {
    let [a, b] = &grid.assets;
    if !grid.synchronous || a.times != b.times {
        return Err(Error::GridNotSynchronous);
    }
    Ok(())
}

fn leading(grid: &SampledGrid) -> EstimateFlags {
    EstimateFlags {
        leading_fill: grid.leading_fill,
        ..Default::default()
    }
}

pub fn rv_covariance(grid: &SampledGrid) -> Result<CovarianceEstimate> {
    require_synchronous(grid)?;
    require_observations(grid)?;
    let [a, b] = &grid.assets;
    let (mut s11, mut s12, mut s22) = Default::default();
    for (x, y) in a.returns().zip(b.returns()) {
        CompensatedSum::add(&mut s11, x * x);
        CompensatedSum::add(&mut s12, x * y);
        CompensatedSum::add(&mut s22, y * y);
    }
    Ok(CovarianceEstimate::new(
        Estimator::Rv,
        s11.value(),
        s12.value(),
        s22.value(),
        None,
        leading(grid),
    ))
}

fn realised_variance(prices: &[f64]) -> f64 {
    prices
        .windows(2)
        .map(|w| (w[1] - w[0]) * (w[1] - w[0]))
        .collect::<CompensatedSum>()
        .value()
}

/// Cross term of the HY estimator: products of returns whose half-open
/// intervals `(t_{h−1}, t_h]` and `(s_{ℓ−1}, s_ℓ]` intersect. Two-pointer sweep;
/// pairs are accumulated in `(h, ℓ)` lexicographic order.
pub fn hy_cross(tx: &[f64], px: &[f64], ty: &[f64], py: &[f64]) -> f64 {
    let mut sum = CompensatedSum::default();
    let (nx, ny) = (tx.len(), ty.len());
    let mut start = 1;
    for h in 1..nx {
        let (lo, hi) = (tx[h - 1], tx[h]);
        let dx = px[h] - px[h - 1];
        while start < ny && ty[start] <= lo {
            start += 1;
        }
        let mut l = start;
        while l < ny && ty[l - 1] < hi {
            sum.add(dx * (py[l] - py[l - 1]));
            l += 1;
        }
    }
    sum.value()
}

pub fn hy_covariance(grid: &SampledGrid) -> Result<CovarianceEstimate> {
    require_observations(grid)?;
    let [a, b] = &grid.assets;
    let s12 = hy_cross(&a.times, &a.log_prices, &b.times, &b.log_prices);
    Ok(CovarianceEstimate::new(
        Estimator::Hy,
        realised_variance(&a.log_prices),
        s12,
        realised_variance(&b.log_prices),
        None,
        leading(grid),
    ))
}

/// Keeps every `k`-th observation of a synchronous homogeneous grid.
pub fn downsample(grid: &SampledGrid, k: usize) -> Result<SampledGrid> {
    if k == 0 {
        return Err(Error::Domain("downsampling factor must be at least 1".into()));
    }
    require_synchronous(grid)?;
    if !grid.homogeneous {
        return Err(Error::GridNotSynchronous);
    }
    let mut out = grid.clone();
    for a in out.assets.iter_mut() {
        a.times = a.times.iter().copied().step_by(k).collect();
        a.log_prices = a.log_prices.iter().copied().step_by(k).collect();
    }
    out.interval = grid.interval.map(|d| d * k as f64);
    out.lattice_step = grid.lattice_step.map(|d| d * k as f64);
    Ok(out)
}

/// Which evaluation route computes the Fourier coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FourierMethod {
    /// Lattice FFT when the grid allows it, otherwise direct for small
    /// problems and NUFFT for large ones.
    #[default]
    Auto,
    Direct,
    Lattice,
    Nufft,
}

/// Above this many `(mode, observation)` pairs the NUFFT route is used.
const DIRECT_BUDGET: usize = 1 << 21;

/// `[origin, origin + period]` is mapped onto `[0, 2π]`.
///
/// Synchronous homogeneous grids with `r` returns span `M = 2⌊r/2⌋ + 1` steps,
/// so the Dirichlet kernel vanishes at every nonzero lag and MM at the Nyquist
/// cut-off equals RV. Other grids use their declared domain or the union of
/// observation times.
fn rescaling(grid: &SampledGrid) -> Result<(f64, f64)> {
    let (first, last) = grid.span().ok_or(Error::EmptySeries)?;
    if grid.synchronous && grid.homogeneous {
        if let Some(step) = grid.lattice_step {
            let r = grid.assets[0].len() - 1;
            let m = 2 * nyquist_modes(r) + 1;
            return Ok((first, m as f64 * step));
        }
    }
    let (lo, hi) = grid.domain.unwrap_or((first, last));
    if !(hi > lo) || first < lo || last > hi {
        return Err(Error::Domain(format!(
            "observations [{first}, {last}] do not fit the rescaling window [{lo}, {hi}]"
        )));
    }
    Ok((lo, hi - lo))
}

fn lattice_indices(times: &[f64], origin: f64, step: f64) -> Option<Vec<usize>> {
    times
        .iter()
        .map(|&t| {
            let x = (t - origin) / step;
            let k = x.round();
            ((x - k).abs() <= 1e-9 * k.max(1.0) && k >= 0.0).then_some(k as usize)
        })
        .collect()
}

/// Per-asset Fourier coefficients of a grid up to `max_modes`, with the
/// O(1)-per-query prefix sums needed to evaluate MM at any cut-off.
#[derive(Debug, Clone)]
pub struct MmSpectra {
    coeffs: [FourierCoefficients; 2],
    /// prefix sums of `Re(c_i(s) conj c_j(s))` for `(i, j)` = (1,1), (1,2), (2,2)
    prefix: [Vec<f64>; 3],
    period: f64,
    min_gap: f64,
    leading_fill: bool,
}

impl MmSpectra {
    pub fn new(grid: &SampledGrid, max_modes: usize, method: FourierMethod) -> Result<Self> {
        require_observations(grid)?;
        if max_modes == 0 {
            return Err(Error::Domain("MM needs a cut-off N >= 1".into()));
        }
        let (origin, period) = rescaling(grid)?;

        let lattice_period = grid.lattice_step.and_then(|step| {
            let l = (period / step).round();
            ((period / step - l).abs() <= 1e-9 * l && l >= 1.0).then_some((step, l as usize))
        });

        let mut coeffs = Vec::with_capacity(2);
        for asset in &grid.assets {
            let left = &asset.times[..asset.len() - 1];
            let inc: Vec<f64> = asset.returns().collect();
            let lattice = lattice_period.and_then(|(step, l)| lattice_indices(left, origin, step).map(|k| (k, l)));
            let route = match method {
                FourierMethod::Auto if lattice.is_some() => FourierMethod::Lattice,
                FourierMethod::Auto if left.len() * (max_modes + 1) <= DIRECT_BUDGET => FourierMethod::Direct,
                FourierMethod::Auto => FourierMethod::Nufft,
                m => m,
            };
            let rescaled = || -> Vec<f64> { left.iter().map(|&t| 2.0 * PI * (t - origin) / period).collect() };
            let c = match route {
                FourierMethod::Lattice => {
                    let (k, l) = lattice.ok_or_else(|| {
                        Error::BadParameters("grid times are not on an integer lattice".into())
                    })?;
                    fourier::lattice(&k, &inc, l, max_modes)
                }
                FourierMethod::Direct => fourier::direct(&rescaled(), &inc, max_modes),
                FourierMethod::Nufft => fourier::nufft(&rescaled(), &inc, max_modes),
                FourierMethod::Auto => unreachable!(),
            };
            coeffs.push(c);
        }
        let [c1, c2]: [FourierCoefficients; 2] = coeffs.try_into().expect("two assets");

        let pair = |a: &FourierCoefficients, b: &FourierCoefficients| -> Vec<f64> {
            let (a, b) = (a.nonnegative(), b.nonnegative());
            let mut acc = CompensatedSum::default();
            let mut out = Vec::with_capacity(a.len());
            out.push(0.0);
            for s in 1..a.len() {
                acc.add((a[s] * b[s].conj()).re);
                out.push(acc.value());
            }
            out
        };
        let prefix = [pair(&c1, &c1), pair(&c1, &c2), pair(&c2, &c2)];

        let min_gap = grid
            .assets
            .iter()
            .flat_map(|a| a.times.windows(2).map(|w| w[1] - w[0]))
            .filter(|&g| g > 0.0)
            .fold(f64::INFINITY, f64::min);

        Ok(Self {
            coeffs: [c1, c2],
            prefix,
            period,
            min_gap,
            leading_fill: grid.leading_fill,
        })
    }

    pub fn max_modes(&self) -> usize {
        self.coeffs[0].max_mode()
    }

    pub fn coefficients(&self, asset: usize) -> &FourierCoefficients {
        &self.coeffs[asset]
    }

    /// Rescaling period in clock units.
    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn estimate(&self, modes: usize) -> Result<CovarianceEstimate> {
        if modes == 0 || modes > self.max_modes() {
            return Err(Error::Domain(format!(
                "cut-off N = {modes} outside 1..={}",
                self.max_modes()
            )));
        }
        let z1 = self.coeffs[0].get(0).re;
        let z2 = self.coeffs[1].get(0).re;
        let norm = (2 * modes + 1) as f64;
        let s11 = (z1 * z1 + 2.0 * self.prefix[0][modes]) / norm;
        let s12 = (z1 * z2 + 2.0 * self.prefix[1][modes]) / norm;
        let s22 = (z2 * z2 + 2.0 * self.prefix[2][modes]) / norm;
        let implied_dt = self.period / norm;
        let flags = EstimateFlags {
            aliasing: implied_dt < self.min_gap * (1.0 - 1e-9),
            leading_fill: self.leading_fill,
            ..Default::default()
        };
        Ok(CovarianceEstimate::new(Estimator::Mm, s11, s12, s22, Some(modes), flags))
    }
}

/// Dirichlet-kernel Fourier covariance with cut-off `modes`.
pub fn mm_covariance(grid: &SampledGrid, modes: usize) -> Result<CovarianceEstimate> {
    MmSpectra::new(grid, modes, FourierMethod::Auto)?.estimate(modes)
}

/// MM at the grid's own Nyquist cut-off; requires a synchronous grid.
pub fn mm_nyquist(grid: &SampledGrid) -> Result<CovarianceEstimate> {
    require_synchronous(grid)?;
    require_observations(grid)?;
    mm_covariance(grid, nyquist_modes(grid.assets[0].len() - 1).max(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clocks::{calendar_grid_previous_tick, raw_calendar, AssetSamples, LeadingFill};
    use crate::market::TransactionSeries;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sync_grid(x: &[f64], y: &[f64]) -> SampledGrid {
        let t: Vec<f64> = (0..x.len()).map(|k| k as f64).collect();
        SampledGrid {
            clock: ClockKind::Calendar,
            assets: [
                AssetSamples {
                    times: t.clone(),
                    log_prices: x.to_vec(),
                },
                AssetSamples {
                    times: t,
                    log_prices: y.to_vec(),
                },
            ],
            synchronous: true,
            homogeneous: true,
            interval: Some(1.0),
            lattice_step: Some(1.0),
            leading_fill: false,
            domain: None,
            buckets: None,
        }
    }

    fn async_grid(tx: &[f64], px: &[f64], ty: &[f64], py: &[f64]) -> SampledGrid {
        let a = TransactionSeries::new(tx.to_vec(), px.to_vec(), vec![1; tx.len()]).unwrap();
        let b = TransactionSeries::new(ty.to_vec(), py.to_vec(), vec![1; ty.len()]).unwrap();
        raw_calendar(&a, &b).unwrap()
    }

    fn random_walk(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        let mut x = 0.0;
        (0..n)
            .map(|_| {
                x += rng.random::<f64>() - 0.5;
                x
            })
            .collect()
    }

    #[test]
    fn rv_two_term_sum() {
        let g = sync_grid(&[0.0, 0.01, -0.01], &[0.0, 0.03, 0.04]);
        let e = rv_covariance(&g).unwrap();
        assert!((e.sigma[0][1] - 0.0001).abs() < 1e-15);
    }

    #[test]
    fn rv_self_and_mirror() {
        let x = [0.0, 1.0, 0.5, 2.0, 1.0];
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((rv_covariance(&sync_grid(&x, &x)).unwrap().rho - 1.0).abs() < 1e-15);
        assert!((rv_covariance(&sync_grid(&x, &neg)).unwrap().rho + 1.0).abs() < 1e-15);
    }

    #[test]
    fn rv_rejects_async() {
        let g = async_grid(&[0.0, 1.0], &[0.0, 1.0], &[0.5, 2.0], &[0.0, 1.0]);
        assert!(matches!(rv_covariance(&g), Err(Error::GridNotSynchronous)));
    }

    #[test]
    fn too_few_observations() {
        let g = sync_grid(&[1.0], &[1.0]);
        assert!(matches!(rv_covariance(&g), Err(Error::TooFewObservations { .. })));
        assert!(matches!(hy_covariance(&g), Err(Error::TooFewObservations { .. })));
        assert!(matches!(mm_covariance(&g, 1), Err(Error::TooFewObservations { .. })));
    }

    #[test]
    fn hy_single_overlap() {
        let (a, b) = (0.3, -0.7);
        let g = async_grid(&[0.0, 2.0], &[0.0, a], &[0.0, 1.0], &[0.0, b]);
        assert_eq!(hy_covariance(&g).unwrap().sigma[0][1], a * b);
    }

    #[test]
    fn hy_touching_intervals_do_not_overlap() {
        let g = async_grid(&[0.0, 1.0], &[0.0, 1.0], &[1.0, 2.0], &[0.0, 1.0]);
        assert_eq!(hy_covariance(&g).unwrap().sigma[0][1], 0.0);
    }

    #[test]
    fn hy_equals_rv_on_sync_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = random_walk(&mut rng, 200);
        let y = random_walk(&mut rng, 200);
        let g = sync_grid(&x, &y);
        let hy = hy_covariance(&g).unwrap();
        let rv = rv_covariance(&g).unwrap();
        assert_eq!(hy.sigma, rv.sigma);
        assert_eq!(hy.rho, rv.rho);
    }

    #[test]
    fn n_from_interval_examples() {
        assert_eq!(n_from_interval(72_000.0, 1.0).unwrap(), 35_999);
        assert_eq!(n_from_interval(28_200.0, 1.0).unwrap(), 14_099);
        assert_eq!(n_from_interval(100.0, 100.0).unwrap(), 0);
        assert!(n_from_interval(100.0, 0.0).is_err());
        assert!(n_from_interval(100.0, 101.0).is_err());
    }

    #[test]
    fn mm_rejects_zero_cutoff() {
        let g = sync_grid(&[0.0, 1.0, 2.0], &[0.0, 1.0, 0.0]);
        assert!(matches!(mm_covariance(&g, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn mm_nyquist_equals_rv_for_odd_and_even_lengths() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in [2usize, 3, 10, 11, 64, 101, 1000] {
            let x = random_walk(&mut rng, n);
            let y = random_walk(&mut rng, n);
            let g = sync_grid(&x, &y);
            let rv = rv_covariance(&g).unwrap();
            let mm = mm_nyquist(&g).unwrap();
            for (i, j) in [(0, 0), (0, 1), (1, 1)] {
                let (a, b) = (mm.sigma[i][j], rv.sigma[i][j]);
                assert!((a - b).abs() <= 1e-8 * b.abs().max(rv.sigma[0][0].min(rv.sigma[1][1])), "n = {n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn mm_constant_prices_zero() {
        let g = async_grid(&[0.0, 1.0, 2.5], &[3.0; 3], &[0.5, 2.0], &[1.0; 2]);
        let e = mm_covariance(&g, 5).unwrap();
        assert_eq!(e.sigma, [[0.0; 2]; 2]);
    }

    #[test]
    fn mm_self_correlation() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut t: Vec<f64> = (0..50).map(|_| rng.random::<f64>() * 100.0).collect();
        t.sort_by(f64::total_cmp);
        let p = random_walk(&mut rng, 50);
        let g = async_grid(&t, &p, &t, &p);
        let e = mm_covariance(&g, 20).unwrap();
        assert!((e.rho - 1.0).abs() < 1e-12);
    }

    #[test]
    fn aliasing_flagged() {
        let g = async_grid(&[0.0, 1.0, 1.5, 10.0], &[0.0, 1.0, 2.0, 1.0], &[0.0, 5.0, 10.0], &[0.0, 1.0, 0.0]);
        // implied scale 10 / 21 < smallest gap 0.5
        assert!(mm_covariance(&g, 10).unwrap().flags.aliasing);
        assert!(!mm_covariance(&g, 3).unwrap().flags.aliasing);
    }

    #[test]
    fn routes_agree_on_calendar_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut t: Vec<f64> = (0..400).map(|_| rng.random::<f64>() * 1000.0).collect();
        t.sort_by(f64::total_cmp);
        let p = random_walk(&mut rng, 400);
        let s = TransactionSeries::new(t.clone(), p.clone(), vec![1; 400]).unwrap();
        let mut q = p.clone();
        q.reverse();
        let s2 = TransactionSeries::new(t, q, vec![1; 400]).unwrap();
        let g = raw_calendar(&s, &s2).unwrap();
        let a = MmSpectra::new(&g, 300, FourierMethod::Direct).unwrap().estimate(300).unwrap();
        let b = MmSpectra::new(&g, 300, FourierMethod::Nufft).unwrap().estimate(300).unwrap();
        for (i, j) in [(0, 0), (0, 1), (1, 1)] {
            assert!((a.sigma[i][j] - b.sigma[i][j]).abs() < 1e-9 * a.sigma[0][0]);
        }
        assert!(MmSpectra::new(&g, 10, FourierMethod::Lattice).is_err());

        let cg = calendar_grid_previous_tick(&s, &s2, 2.0, 1000.0, LeadingFill::FirstObserved).unwrap();
        let a = MmSpectra::new(&cg, 200, FourierMethod::Direct).unwrap().estimate(200).unwrap();
        let b = MmSpectra::new(&cg, 200, FourierMethod::Lattice).unwrap().estimate(200).unwrap();
        assert!((a.sigma[0][1] - b.sigma[0][1]).abs() < 1e-10 * a.sigma[0][0]);
    }

    #[test]
    fn downsample_examples() {
        let x: Vec<f64> = (0..10).map(|k| k as f64).collect();
        let g = sync_grid(&x, &x);
        assert_eq!(downsample(&g, 1).unwrap(), g);
        let d = downsample(&g, 3).unwrap();
        assert_eq!(d.assets[0].times, vec![0.0, 3.0, 6.0, 9.0]);
        assert_eq!(d.interval, Some(3.0));
        assert_eq!(downsample(&g, 50).unwrap().assets[1].len(), 1);
        assert!(downsample(&g, 0).is_err());
    }

    #[test]
    fn downsample_default_grid() {
        let x = vec![0.0; 28_200];
        let g = sync_grid(&x, &x);
        let d = downsample(&g, 2).unwrap();
        assert_eq!(d.assets[0].len(), 14_100);
        assert_eq!(d.assets[0].times[1] - d.assets[0].times[0], 2.0);
    }

    #[test]
    fn flags_display() {
        let f = EstimateFlags {
            aliasing: true,
            clamped: false,
            leading_fill: true,
        };
        assert_eq!(f.to_string(), "aliasing|leading_fill");
        assert_eq!(EstimateFlags::default().to_string(), "");
    }
}
