use std::f64::consts::PI;

use epps_core::clocks::{
    calendar_grid_previous_tick, raw_calendar, shared_event_clock, volume_bucket_means, LeadingFill,
};
use epps_core::estimators::{hy_covariance, hy_cross, mm_covariance, rv_covariance, FourierMethod, MmSpectra};
use epps_core::market::TransactionSeries;
use proptest::prelude::*;

fn sorted_times(max_len: usize, lattice: bool) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0u32..2000, 1..max_len).prop_map(move |v| {
        let mut v: Vec<u32> = v.into_iter().map(|k| if lattice { k / 20 } else { k }).collect();
        v.sort_unstable();
        v.dedup();
        let unit = if lattice { 1.0 } else { 0.05 };
        v.into_iter().map(|k| k as f64 * unit).collect::<Vec<_>>()
    })
}

fn with_walk(times: Vec<f64>, steps: &[i8]) -> (Vec<f64>, Vec<f64>) {
    let mut x = 0.0;
    let prices = times
        .iter()
        .enumerate()
        .map(|(i, _)| {
            x += steps[i % steps.len()] as f64 * 0.25;
            x
        })
        .collect();
    (times, prices)
}

/// `(times, log_prices)` for one asset.
type Series = (Vec<f64>, Vec<f64>);

fn series_pair(max_len: usize, lattice: bool) -> impl Strategy<Value = (Series, Series)> {
    (
        sorted_times(max_len, lattice),
        sorted_times(max_len, lattice),
        prop::collection::vec(-3i8..=3, 1..20),
        prop::collection::vec(-3i8..=3, 1..20),
    )
        .prop_map(|(ta, tb, sa, sb)| (with_walk(ta, &sa), with_walk(tb, &sb)))
}

fn hy_double_loop(ta: &[f64], pa: &[f64], tb: &[f64], pb: &[f64]) -> f64 {
    let mut sum = epps_core::numeric::CompensatedSum::default();
    for h in 1..ta.len() {
        for l in 1..tb.len() {
            if ta[h - 1] < tb[l] && tb[l - 1] < ta[h] {
                sum.add((pa[h] - pa[h - 1]) * (pb[l] - pb[l - 1]));
            }
        }
    }
    sum.value()
}

fn mm_triple_sum(ta: &[f64], pa: &[f64], tb: &[f64], pb: &[f64], lo: f64, len: f64, n: usize) -> f64 {
    let mut acc = 0.0;
    for s in -(n as i64)..=(n as i64) {
        for h in 1..ta.len() {
            for l in 1..tb.len() {
                let x = 2.0 * PI * (ta[h - 1] - lo) / len;
                let y = 2.0 * PI * (tb[l - 1] - lo) / len;
                acc += (s as f64 * (x - y)).cos() * (pa[h] - pa[h - 1]) * (pb[l] - pb[l - 1]);
            }
        }
    }
    acc / (2 * n + 1) as f64
}

fn ts(t: &[f64], p: &[f64]) -> TransactionSeries {
    TransactionSeries::new(t.to_vec(), p.to_vec(), vec![1; t.len()]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn hy_sweep_matches_double_loop(((ta, pa), (tb, pb)) in series_pair(60, true)) {
        prop_assert_eq!(hy_cross(&ta, &pa, &tb, &pb), hy_double_loop(&ta, &pa, &tb, &pb));
    }

    #[test]
    fn volume_streaming_matches_expansion(
        trades in prop::collection::vec((1u32..400, 1u64..25), 1..40),
        frac in 0.0f64..1.0,
    ) {
        let prices: Vec<f64> = trades.iter().map(|t| t.0 as f64 / 3.0).collect();
        let volumes: Vec<u64> = trades.iter().map(|t| t.1).collect();
        let total: u64 = volumes.iter().sum();
        let n = 1 + ((total.min(60) - 1) as f64 * frac) as usize;
        let s = TransactionSeries::new((0..prices.len()).map(|k| k as f64).collect(), prices.clone(), volumes.clone()).unwrap();
        let (got, bk) = volume_bucket_means(&s, n).unwrap();

        let expanded: Vec<(usize, f64)> = prices
            .iter()
            .zip(&volumes)
            .enumerate()
            .flat_map(|(i, (&p, &v))| std::iter::repeat_n((i, p), v as usize))
            .collect();
        let v = (total / n as u64) as usize;
        prop_assert_eq!(bk.bucket as usize, v);
        let want: Vec<f64> = expanded
            .chunks_exact(v)
            .take(n)
            .map(|c| c.chunk_by(|x, y| x.0 == y.0).map(|r| r[0].1 * r.len() as f64).sum::<f64>() / v as f64)
            .collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn scale_equivariance(((ta, pa), (tb, pb)) in series_pair(40, false), c in 0.1f64..10.0) {
        prop_assume!(ta.len() >= 2 && tb.len() >= 2);
        let a = ts(&ta, &pa);
        let b = ts(&tb, &pb);
        let scaled: Vec<f64> = pa.iter().map(|x| x * c).collect();
        let a2 = ts(&ta, &scaled);
        let fill = LeadingFill::FirstObserved;
        let g1 = calendar_grid_previous_tick(&a, &b, 0.5, 100.0, fill).unwrap();
        let g2 = calendar_grid_previous_tick(&a2, &b, 0.5, 100.0, fill).unwrap();
        let r1 = raw_calendar(&a, &b).unwrap().with_domain(0.0, 100.0);
        let r2 = raw_calendar(&a2, &b).unwrap().with_domain(0.0, 100.0);
        let pairs = [
            (rv_covariance(&g1).unwrap(), rv_covariance(&g2).unwrap()),
            (hy_covariance(&r1).unwrap(), hy_covariance(&r2).unwrap()),
        ];
        let mut all = pairs.to_vec();
        all.push((mm_covariance(&r1, 7).unwrap(), mm_covariance(&r2, 7).unwrap()));
        for (e1, e2) in all {
            let tol = 1e-9 * (e1.sigma[0][0] * e1.sigma[1][1]).sqrt().max(1e-300) * c;
            prop_assert!((e2.sigma[0][1] - c * e1.sigma[0][1]).abs() <= tol);
            if e1.rho.is_finite() {
                prop_assert!((e2.rho - e1.rho).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn previous_tick_takes_last_observation(((ta, pa), (tb, pb)) in series_pair(40, false)) {
        let a = ts(&ta, &pa);
        let b = ts(&tb, &pb);
        let g = calendar_grid_previous_tick(&a, &b, 0.7, 100.0, LeadingFill::FirstObserved).unwrap();
        for (k, &t) in g.assets[0].times.iter().enumerate() {
            let want = match ta.iter().rposition(|&x| x <= t) {
                Some(i) => pa[i],
                None => pa[0],
            };
            prop_assert_eq!(g.assets[0].log_prices[k], want);
        }
    }

    #[test]
    fn shared_clock_span(((ta, pa), (tb, pb)) in series_pair(60, true)) {
        let ev = shared_event_clock(&ts(&ta, &pa), &ts(&tb, &pb)).unwrap();
        let collisions = ta.iter().filter(|t| tb.contains(t)).count();
        let (_, k) = ev.domain.unwrap();
        prop_assert_eq!(k as usize, ta.len() + tb.len() - collisions);
        if ta.len() >= 2 && tb.len() >= 2 {
            prop_assert_eq!(hy_covariance(&ev).unwrap().sigma, hy_covariance(&raw_calendar(&ts(&ta, &pa), &ts(&tb, &pb)).unwrap()).unwrap().sigma);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn mm_matches_triple_sum(((ta, pa), (tb, pb)) in series_pair(50, false), n in 1usize..=20, event in any::<bool>()) {
        prop_assume!(ta.len() >= 2 && tb.len() >= 2);
        let (a, b) = (ts(&ta, &pa), ts(&tb, &pb));
        let grid = if event {
            shared_event_clock(&a, &b).unwrap()
        } else {
            raw_calendar(&a, &b).unwrap().with_domain(0.0, 100.0)
        };
        let (lo, hi) = grid.domain.unwrap();
        let [ga, gb] = &grid.assets;
        let abs_inc = |p: &[f64]| p.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>();
        let (ma, mb) = (abs_inc(&ga.log_prices), abs_inc(&gb.log_prices));
        let methods: &[FourierMethod] = if event {
            &[FourierMethod::Direct, FourierMethod::Lattice, FourierMethod::Nufft]
        } else {
            &[FourierMethod::Direct, FourierMethod::Nufft]
        };
        let want = [
            mm_triple_sum(&ga.times, &ga.log_prices, &ga.times, &ga.log_prices, lo, hi - lo, n),
            mm_triple_sum(&ga.times, &ga.log_prices, &gb.times, &gb.log_prices, lo, hi - lo, n),
            mm_triple_sum(&gb.times, &gb.log_prices, &gb.times, &gb.log_prices, lo, hi - lo, n),
        ];
        for &m in methods {
            let e = MmSpectra::new(&grid, n, m).unwrap().estimate(n).unwrap();
            let got = [e.sigma[0][0], e.sigma[0][1], e.sigma[1][1]];
            let scale = [ma * ma, ma * mb, mb * mb];
            // the gridded transform is accurate to ~1e-11 of the increment mass
            let tol = if m == FourierMethod::Nufft { 1e-10 } else { 1e-12 };
            for i in 0..3 {
                prop_assert!((got[i] - want[i]).abs() <= tol * scale[i].max(1e-300), "{:?} {} vs {}", m, got[i], want[i]);
            }
        }
    }
}
