//! Fourier coefficients of price increments on `[0, 2π]`:
//!
//! ```text
//! c(s) = Σ_h e^{-i s t_h} δ(I_h),   s = 0..=N
//! ```
//!
//! Increments are real so `c(-s) = conj(c(s))` and only `s ≥ 0` is stored.
//! Three evaluation routes share this contract:
//!
//! * direct summation with a unit-modulus phasor recurrence (re-anchored every
//!   [`ANCHOR_EVERY`] modes), `O(n N)`;
//! * an FFT when every `t_h` sits on the lattice `2π k / L`, which covers all
//!   event-time and volume-time grids;
//! * a type-1 nonuniform FFT with Gaussian gridding for irregular calendar
//!   times, `O(n w + N log N)`.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::numeric::CompensatedSum;

/// Recompute phasors exactly after this many multiplicative steps.
pub const ANCHOR_EVERY: usize = 256;
/// Half-width of the Gaussian spreading stencil.
const NUFFT_SPREAD: i64 = 14;
const NUFFT_OVERSAMPLE: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoefficients {
    coeffs: Vec<Complex64>,
}

impl FourierCoefficients {
    pub fn from_nonnegative(coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty());
        Self { coeffs }
    }

    pub fn max_mode(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `c(s)` for `|s| ≤ max_mode`.
    pub fn get(&self, s: i64) -> Complex64 {
        let c = self.coeffs[s.unsigned_abs() as usize];
        if s < 0 {
            c.conj()
        } else {
            c
        }
    }

    pub fn nonnegative(&self) -> &[Complex64] {
        &self.coeffs
    }
}

/// Direct summation over `s = 0..=max_mode`.
pub fn direct(times: &[f64], increments: &[f64], max_mode: usize) -> FourierCoefficients {
    assert_eq!(times.len(), increments.len());
    let n = times.len();
    let step: Vec<Complex64> = times.iter().map(|&t| Complex64::from_polar(1.0, -t)).collect();
    let mut phase = vec![Complex64::new(0.0, 0.0); n];
    let mut out = Vec::with_capacity(max_mode + 1);
    for s in 0..=max_mode {
        if s % ANCHOR_EVERY == 0 {
            for (p, &t) in phase.iter_mut().zip(times) {
                *p = Complex64::from_polar(1.0, -(s as f64) * t);
            }
        }
        let mut re = CompensatedSum::default();
        let mut im = CompensatedSum::default();
        for (p, &d) in phase.iter().zip(increments) {
            re.add(p.re * d);
            im.add(p.im * d);
        }
        out.push(Complex64::new(re.value(), im.value()));
        for (p, z) in phase.iter_mut().zip(&step) {
            *p *= z;
        }
    }
    FourierCoefficients::from_nonnegative(out)
}

/// Exact DFT route for times `t_h = 2π k_h / period`.
pub fn lattice(indices: &[usize], increments: &[f64], period: usize, max_mode: usize) -> FourierCoefficients {
    assert_eq!(indices.len(), increments.len());
    assert!(period > 0);
    let mut bins = vec![Complex64::new(0.0, 0.0); period];
    for (&k, &d) in indices.iter().zip(increments) {
        bins[k % period].re += d;
    }
    FftPlanner::new().plan_fft_forward(period).process(&mut bins);
    let out = (0..=max_mode).map(|s| bins[s % period]).collect();
    FourierCoefficients::from_nonnegative(out)
}

/// Smallest `2^a 3^b 5^c` not below `n`.
fn smooth_size(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r.is_multiple_of(p) {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

/// Type-1 NUFFT with Gaussian gridding. Times must lie in `[0, 2π]`.
pub fn nufft(times: &[f64], increments: &[f64], max_mode: usize) -> FourierCoefficients {
    assert_eq!(times.len(), increments.len());
    let modes = 2 * max_mode + 2;
    let fine = smooth_size(NUFFT_OVERSAMPLE * modes);
    let ratio = fine as f64 / modes as f64;
    let tau = PI * NUFFT_SPREAD as f64 / ((modes * modes) as f64 * ratio * (ratio - 0.5));
    let h = 2.0 * PI / fine as f64;

    let mut grid = vec![0.0f64; fine];
    let inv4tau = 1.0 / (4.0 * tau);
    for (&t, &d) in times.iter().zip(increments) {
        if d == 0.0 {
            continue;
        }
        let m0 = (t / h).floor() as i64;
        for l in (1 - NUFFT_SPREAD)..=NUFFT_SPREAD {
            let m = m0 + l;
            let dist = t - m as f64 * h;
            let idx = m.rem_euclid(fine as i64) as usize;
            grid[idx] += d * (-dist * dist * inv4tau).exp();
        }
    }

    let mut spectrum: Vec<Complex64> = grid.into_iter().map(|x| Complex64::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(fine).process(&mut spectrum);

    let scale = (PI / tau).sqrt() / fine as f64;
    let out = (0..=max_mode)
        .map(|k| {
            let kf = k as f64;
            spectrum[k] * (scale * (kf * kf * tau).exp())
        })
        .collect();
    FourierCoefficients::from_nonnegative(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Literal sum with a fresh exponential per term.
    fn literal(times: &[f64], inc: &[f64], s: i64) -> Complex64 {
        times
            .iter()
            .zip(inc)
            .map(|(&t, &d)| Complex64::from_polar(d, -(s as f64) * t))
            .sum()
    }

    fn random_case(rng: &mut ChaCha8Rng, n: usize) -> (Vec<f64>, Vec<f64>) {
        let mut t: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 * PI).collect();
        t.sort_by(f64::total_cmp);
        let d = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        (t, d)
    }

    #[test]
    fn direct_matches_literal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (t, d) = random_case(&mut rng, 40);
        let c = direct(&t, &d, 600);
        for s in [0i64, 1, 7, 255, 256, 257, 599, 600] {
            let want = literal(&t, &d, s);
            assert!((c.get(s) - want).norm() < 1e-12 * (1.0 + want.norm()), "s = {s}");
            assert!((c.get(-s) - literal(&t, &d, -s)).norm() < 1e-12 * (1.0 + want.norm()));
        }
    }

    #[test]
    fn lattice_matches_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let period = 97;
        let idx: Vec<usize> = (0..60).map(|_| rng.random_range(0..period)).collect();
        let inc: Vec<f64> = (0..60).map(|_| rng.random::<f64>() - 0.5).collect();
        let times: Vec<f64> = idx.iter().map(|&k| 2.0 * PI * k as f64 / period as f64).collect();
        let a = lattice(&idx, &inc, period, 150);
        let b = direct(&times, &inc, 150);
        for s in 0..=150 {
            assert!((a.get(s) - b.get(s)).norm() < 1e-11, "s = {s}");
        }
    }

    #[test]
    fn nufft_matches_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (n, modes) in [(500, 300), (2000, 2500), (37, 10)] {
            let (t, d) = random_case(&mut rng, n);
            let a = nufft(&t, &d, modes);
            let b = direct(&t, &d, modes);
            let scale: f64 = d.iter().map(|x| x.abs()).sum();
            let worst = (0..=modes as i64)
                .map(|s| (a.get(s) - b.get(s)).norm() / scale)
                .fold(0.0, f64::max);
            assert!(worst < 1e-11, "n = {n}, modes = {modes}: {worst:e}");
        }
    }

    #[test]
    fn nufft_handles_interval_endpoints() {
        let t = vec![0.0, PI, 2.0 * PI];
        let d = vec![1.0, -2.0, 0.5];
        let a = nufft(&t, &d, 40);
        let b = direct(&t, &d, 40);
        for s in 0..=40 {
            assert!((a.get(s) - b.get(s)).norm() < 1e-11);
        }
    }

    #[test]
    fn smooth_sizes() {
        assert_eq!(smooth_size(1), 1);
        assert_eq!(smooth_size(7), 8);
        assert_eq!(smooth_size(97), 100);
        for n in [144_004, 28_201, 2 * 36_001 + 2, 1_000_003] {
            let m = smooth_size(n);
            assert!(m >= n && m < n + n / 20);
            let mut r = m;
            for p in [2, 3, 5] {
                while r.is_multiple_of(p) {
                    r /= p;
                }
            }
            assert_eq!(r, 1, "{m}");
        }
    }
}
