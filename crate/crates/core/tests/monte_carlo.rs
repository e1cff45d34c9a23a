use epps_core::clocks::ClockKind;
use epps_core::estimators::Estimator;
use epps_core::experiments::{run_epps_sweep, simulate_pair, ExperimentConfig, ModelParams};
use epps_core::hawkes::simulate;
use epps_core::numeric::{mean, sample_sd};
use epps_core::rng::{derive_seed, Purpose};
use epps_core::theory::{theory_rho, theory_variance_rate};

#[test]
fn counts_match_stationary_rate() {
    let model = ModelParams::default();
    let spec = model.hawkes(20_000.0).unwrap();
    let lambda = model.theory().unwrap().lambda;
    let mut per_process = vec![Vec::new(); 4];
    let mut halves = (Vec::new(), Vec::new());
    for rep in 0..60 {
        let streams = simulate(&spec, derive_seed(11, rep, Purpose::Events));
        for s in &streams {
            per_process[s.process_index].push(s.len() as f64 / 20_000.0);
            let early = s.times.iter().filter(|&&t| t < 10_000.0).count() as f64;
            halves.0.push(early);
            halves.1.push(s.len() as f64 - early);
        }
    }
    for rates in &per_process {
        let m = mean(rates);
        let se = sample_sd(rates) / (rates.len() as f64).sqrt();
        assert!((m - lambda).abs() < 4.0 * se, "rate {m} vs {lambda} (se {se})");
    }
    let diff: Vec<f64> = halves.0.iter().zip(&halves.1).map(|(a, b)| a - b).collect();
    let se = sample_sd(&diff) / (diff.len() as f64).sqrt();
    assert!(mean(&diff).abs() < 4.0 * se, "first and second halves differ");
}

#[test]
fn rv_variance_rate_is_twice_the_closed_form() {
    // the closed-form rates refer to half of Var(ΔX): each asset has two
    // counting processes of intensity Λ, so its jump variance rate is 2Λ
    let cfg = ExperimentConfig {
        replications: 60,
        ..Default::default()
    };
    let params = cfg.model.theory().unwrap();
    for dt in [1.0, 100.0] {
        let samples: Vec<f64> = (0..cfg.replications as u64)
            .map(|rep| {
                let (a, _) = simulate_pair(&cfg, rep).unwrap();
                let grid: Vec<f64> = (0..=(cfg.horizon / dt) as usize)
                    .map(|k| {
                        let t = k as f64 * dt;
                        match a.times.iter().rposition(|&x| x <= t) {
                            Some(i) => a.prices[i],
                            None => cfg.x0.0,
                        }
                    })
                    .collect();
                grid.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum::<f64>() / cfg.horizon
            })
            .collect();
        let m = mean(&samples);
        let se = sample_sd(&samples) / (samples.len() as f64).sqrt();
        let want = 2.0 * theory_variance_rate(&params, dt).unwrap();
        assert!((m - want).abs() < 3.0 * se, "dt = {dt}: {m} vs {want} (se {se})");
    }
}

fn sweep_rv(threads: usize) -> epps_core::experiments::SweepOutput {
    let cfg = ExperimentConfig {
        replications: 60,
        intervals: vec![1, 10, 50, 100],
        clocks: vec![ClockKind::Calendar],
        estimators: vec![Estimator::Rv],
        ..Default::default()
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| run_epps_sweep(&cfg).unwrap())
}

#[test]
fn rv_correlation_tracks_closed_form_and_ignores_worker_count() {
    let one = sweep_rv(1);
    let many = sweep_rv(3);
    assert_eq!(one, many);
    let params = ModelParams::default().theory().unwrap();
    for p in &one.curves[0].points {
        let want = theory_rho(&params, p.interval as f64).unwrap();
        let z = (p.ribbon.mean - want) / p.ribbon.standard_error();
        assert!(z.abs() < 3.0, "interval {}: {} vs {want}", p.interval, p.ribbon.mean);
        assert_eq!(p.theory, Some(want));
    }
}
