//! Multivariate Hawkes process with exponential kernels.
//!
//! The intensity of process `m` is
//!
//! ```text
//! λ^m(t) = μ^m + Σ_n Σ_{s ∈ N^n, s < t} α^{mn} e^{-β^{mn} (t - s)}
//! ```
//!
//! Simulation uses Ogata thinning. Each `(m, n)` kernel keeps a running
//! excitation value that is decayed lazily to the current time, so an accepted
//! event costs `O(M)` and every candidate costs `O(M²)` regardless of history.

use std::io::{Read, Write};

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Parameters of an `M`-variate exponential-kernel Hawkes process on `[0, horizon]`.
///
/// `alpha[m][n]` is the jump in `λ^m` caused by an event of process `n`,
/// `beta[m][n]` the decay rate of that contribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HawkesSpec {
    mu: Vec<f64>,
    alpha: Vec<Vec<f64>>,
    beta: Vec<Vec<f64>>,
    horizon: f64,
}

impl HawkesSpec {
    pub fn new(
        mu: Vec<f64>,
        alpha: Vec<Vec<f64>>,
        beta: Vec<Vec<f64>>,
        horizon: f64,
    ) -> Result<Self> {
        let m = mu.len();
        if m == 0 {
            return Err(Error::BadParameters("need at least one process".into()));
        }
        let square = |x: &Vec<Vec<f64>>| x.len() == m && x.iter().all(|row| row.len() == m);
        if !square(&alpha) || !square(&beta) {
            return Err(Error::BadParameters(format!(
                "alpha and beta must be {m}x{m}"
            )));
        }
        if mu.iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
            return Err(Error::BadParameters("baseline intensities must be finite and >= 0".into()));
        }
        for i in 0..m {
            for j in 0..m {
                let (a, b) = (alpha[i][j], beta[i][j]);
                if !(a >= 0.0 && a.is_finite()) {
                    return Err(Error::BadParameters(format!("alpha[{i}][{j}] = {a}")));
                }
                if a > 0.0 && !(b > 0.0 && b.is_finite()) {
                    return Err(Error::BadParameters(format!(
                        "beta[{i}][{j}] = {b} must be positive where alpha is"
                    )));
                }
            }
        }
        if !(horizon >= 0.0 && horizon.is_finite()) {
            return Err(Error::BadParameters(format!("horizon {horizon}")));
        }
        let spec = Self {
            mu,
            alpha,
            beta,
            horizon,
        };
        let radius = spectral_radius(&spec.branching_matrix());
        if radius >= 1.0 {
            return Err(Error::StabilityViolation { radius });
        }
        Ok(spec)
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn alpha(&self) -> &[Vec<f64>] {
        &self.alpha
    }

    pub fn beta(&self) -> &[Vec<f64>] {
        &self.beta
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Same kernels on a different observation window.
    pub fn with_horizon(&self, horizon: f64) -> Result<Self> {
        if !(horizon >= 0.0 && horizon.is_finite()) {
            return Err(Error::BadParameters(format!("horizon {horizon}")));
        }
        Ok(Self {
            horizon,
            ..self.clone()
        })
    }

    /// `Γ = {α^{mn} / β^{mn}}`, the expected number of direct offspring.
    pub fn branching_matrix(&self) -> DMatrix<f64> {
        let m = self.dim();
        DMatrix::from_fn(m, m, |i, j| {
            if self.alpha[i][j] > 0.0 {
                self.alpha[i][j] / self.beta[i][j]
            } else {
                0.0
            }
        })
    }
}

/// Four-process fine-to-coarse layout: `φ^(r)` links the up/down counters of
/// one asset, `φ^(c)` links like-signed counters across the two assets.
pub fn build_fine_to_coarse_spec(
    mu: f64,
    alpha_r: f64,
    alpha_c: f64,
    beta: f64,
    horizon: f64,
) -> Result<HawkesSpec> {
    if !(beta > 0.0) {
        return Err(Error::BadParameters(format!("beta = {beta} must be positive")));
    }
    let (r, c) = (alpha_r, alpha_c);
    let alpha = vec![
        vec![0.0, r, c, 0.0],
        vec![r, 0.0, 0.0, c],
        vec![c, 0.0, 0.0, r],
        vec![0.0, c, r, 0.0],
    ];
    HawkesSpec::new(vec![mu; 4], alpha, vec![vec![beta; 4]; 4], horizon)
}

/// Largest eigenvalue modulus of a square matrix.
pub fn spectral_radius(gamma: &DMatrix<f64>) -> f64 {
    assert!(gamma.is_square(), "spectral radius needs a square matrix");
    if gamma.nrows() == 0 {
        return 0.0;
    }
    gamma
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Event times of one counting process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventStream {
    pub process_index: usize,
    pub times: Vec<f64>,
}

impl EventStream {
    pub fn new(process_index: usize, times: Vec<f64>) -> Result<Self> {
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Domain(format!(
                "event times of process {process_index} are not strictly increasing"
            )));
        }
        Ok(Self {
            process_index,
            times,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

struct Kernel {
    target: usize,
    source: usize,
    alpha: f64,
    beta: f64,
}

/// Running intensity with one exponential state per nonzero kernel.
pub(crate) struct IntensityState<'a> {
    spec: &'a HawkesSpec,
    kernels: Vec<Kernel>,
    /// kernel indices keyed by source process
    by_source: Vec<Vec<usize>>,
    excitation: Vec<f64>,
    now: f64,
}

impl<'a> IntensityState<'a> {
    #[allow(clippy::needless_range_loop)]
    pub(crate) fn new(spec: &'a HawkesSpec) -> Self {
        let m = spec.dim();
        let mut kernels = Vec::new();
        let mut by_source = vec![Vec::new(); m];
        for target in 0..m {
            for source in 0..m {
                let alpha = spec.alpha[target][source];
                if alpha > 0.0 {
                    by_source[source].push(kernels.len());
                    kernels.push(Kernel {
                        target,
                        source,
                        alpha,
                        beta: spec.beta[target][source],
                    });
                }
            }
        }
        let excitation = vec![0.0; kernels.len()];
        Self {
            spec,
            kernels,
            by_source,
            excitation,
            now: 0.0,
        }
    }

    pub(crate) fn decay_to(&mut self, t: f64) {
        let dt = t - self.now;
        debug_assert!(dt >= 0.0);
        if dt > 0.0 {
            for (e, k) in self.excitation.iter_mut().zip(&self.kernels) {
                if *e != 0.0 {
                    *e *= (-k.beta * dt).exp();
                }
            }
        }
        self.now = t;
    }

    pub(crate) fn excite(&mut self, source: usize) {
        for &ki in &self.by_source[source] {
            debug_assert_eq!(self.kernels[ki].source, source);
            self.excitation[ki] += self.kernels[ki].alpha;
        }
    }

    pub(crate) fn intensities(&self, out: &mut [f64]) {
        out.copy_from_slice(&self.spec.mu);
        for (e, k) in self.excitation.iter().zip(&self.kernels) {
            out[k.target] += e;
        }
    }
}

/// Ogata thinning on `[0, horizon]`. Deterministic for a given seed.
pub fn simulate(spec: &HawkesSpec, seed: u64) -> Vec<EventStream> {
    let mut rng = rng_from_seed(seed);
    simulate_with(spec, &mut rng)
}

pub fn simulate_with<R: Rng + ?Sized>(spec: &HawkesSpec, rng: &mut R) -> Vec<EventStream> {
    let m = spec.dim();
    let mut times: Vec<Vec<f64>> = vec![Vec::new(); m];
    let mut state = IntensityState::new(spec);
    let mut lambda = vec![0.0; m];
    let mut t = 0.0;

    state.intensities(&mut lambda);
    let mut bound: f64 = lambda.iter().sum();
    while bound > 0.0 {
        let wait: f64 = rng.sample::<f64, _>(Exp1) / bound;
        t += wait;
        if t > spec.horizon {
            break;
        }
        state.decay_to(t);
        state.intensities(&mut lambda);
        let total: f64 = lambda.iter().sum();
        let u = rng.random::<f64>() * bound;
        if u < total {
            let mut acc = 0.0;
            let mut chosen = m - 1;
            for (i, &l) in lambda.iter().enumerate() {
                acc += l;
                if u < acc {
                    chosen = i;
                    break;
                }
            }
            times[chosen].push(t);
            state.excite(chosen);
            state.intensities(&mut lambda);
            bound = lambda.iter().sum();
        } else {
            // kernels only decay between events, so the current intensity bounds the future
            bound = total;
        }
    }

    times
        .into_iter()
        .enumerate()
        .map(|(process_index, times)| EventStream {
            process_index,
            times,
        })
        .collect()
}

/// Conditional intensity of process `m` at `t` given the history, computed by
/// replaying the history through the recursive kernel state.
pub fn intensity_at(spec: &HawkesSpec, history: &[EventStream], m: usize, t: f64) -> Result<f64> {
    if m >= spec.dim() {
        return Err(Error::Domain(format!("process index {m} out of range")));
    }
    let mut events: Vec<(f64, usize)> = Vec::new();
    for stream in history {
        if stream.process_index >= spec.dim() {
            return Err(Error::Domain(format!(
                "history references process {}",
                stream.process_index
            )));
        }
        for &s in &stream.times {
            if s > t {
                return Err(Error::Domain(format!(
                    "history event at {s} lies after query time {t}"
                )));
            }
            events.push((s, stream.process_index));
        }
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut state = IntensityState::new(spec);
    let start = events.first().map_or(0.0, |e| e.0.min(0.0));
    state.now = start;
    for &(s, n) in &events {
        state.decay_to(s);
        state.excite(n);
    }
    state.decay_to(t);
    let mut lambda = vec![0.0; spec.dim()];
    state.intensities(&mut lambda);
    Ok(lambda[m])
}

/// Writes `process_index,time_seconds` rows in chronological order, ties by index.
/// Process indices are 1-based in the file.
pub fn write_events_csv<W: Write>(writer: W, streams: &[EventStream]) -> Result<()> {
    let mut rows: Vec<(f64, usize)> = streams
        .iter()
        .flat_map(|s| s.times.iter().map(move |&t| (t, s.process_index)))
        .collect();
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["process_index", "time_seconds"])?;
    for (t, p) in rows {
        w.write_record([(p + 1).to_string(), t.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_events_csv<R: Read>(reader: R, dim: usize) -> Result<Vec<EventStream>> {
    let mut r = csv::Reader::from_reader(reader);
    let mut times: Vec<Vec<f64>> = vec![Vec::new(); dim];
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |what: &str| Error::Parse {
            line,
            message: format!("bad {what}"),
        };
        let p: usize = rec.get(0).and_then(|s| s.trim().parse().ok()).ok_or_else(|| bad("process_index"))?;
        let t: f64 = rec.get(1).and_then(|s| s.trim().parse().ok()).ok_or_else(|| bad("time_seconds"))?;
        if p == 0 || p > dim {
            return Err(bad("process_index"));
        }
        times[p - 1].push(t);
    }
    times
        .into_iter()
        .enumerate()
        .map(|(i, t)| EventStream::new(i, t))
        .collect()
}
