//! Browser bindings. Each export takes plain numbers and returns a JSON string
//! the page plots directly; the `*_json` functions are the same operations for
//! native callers and tests.

use epps_core::clocks::ClockKind;
use epps_core::estimators::Estimator;
use epps_core::experiments::{run_epps_sweep, simulate_pair, DtGrid, ExperimentConfig, ModelParams};
use epps_core::theory::{theory_rho, theory_rho_limit};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Simulations larger than this would freeze the tab.
pub const MAX_EVENTS_HINT: f64 = 2.0e6;

fn model(mu: f64, alpha_r: f64, alpha_c: f64, beta: f64) -> ModelParams {
    ModelParams {
        mu,
        alpha_r,
        alpha_c,
        beta,
    }
}

fn expected_events(m: &ModelParams, horizon: f64) -> f64 {
    let load = (m.alpha_r + m.alpha_c) / m.beta;
    4.0 * m.mu / (1.0 - load) * horizon
}

fn check_size(m: &ModelParams, horizon: f64, reps: usize) -> Result<(), String> {
    let n = expected_events(m, horizon) * reps as f64;
    if n > MAX_EVENTS_HINT {
        return Err(format!("about {n:.0} events requested; keep it under {MAX_EVENTS_HINT:.0}"));
    }
    Ok(())
}

#[derive(Serialize)]
struct TheoryCurve {
    dt: Vec<f64>,
    rho: Vec<f64>,
    limit: f64,
}

pub fn theory_curve_json(mu: f64, alpha_r: f64, alpha_c: f64, beta: f64, dt_max: f64, points: usize) -> Result<String, String> {
    let params = model(mu, alpha_r, alpha_c, beta).theory().map_err(|e| e.to_string())?;
    let grid = DtGrid {
        min: 1.0,
        max: dt_max,
        points,
        log_spaced: true,
    };
    grid.validate().map_err(|e| e.to_string())?;
    let dt = grid.values();
    let rho = dt
        .iter()
        .map(|&d| theory_rho(&params, d))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let out = TheoryCurve {
        dt,
        rho,
        limit: theory_rho_limit(alpha_r / beta, alpha_c / beta).map_err(|e| e.to_string())?,
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Path {
    t: Vec<f64>,
    x: Vec<f64>,
}

#[derive(Serialize)]
struct Paths {
    a: Path,
    b: Path,
}

pub fn simulate_paths_json(mu: f64, alpha_r: f64, alpha_c: f64, beta: f64, horizon: f64, seed: u64) -> Result<String, String> {
    let m = model(mu, alpha_r, alpha_c, beta);
    let cfg = ExperimentConfig {
        horizon,
        seed,
        model: m,
        ..Default::default()
    };
    m.hawkes(horizon).map_err(|e| e.to_string())?;
    check_size(&m, horizon, 1)?;
    let (a, b) = simulate_pair(&cfg, 0).map_err(|e| e.to_string())?;
    let out = Paths {
        a: Path { t: a.times, x: a.prices },
        b: Path { t: b.times, x: b.prices },
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct SweepCurve {
    interval: Vec<u64>,
    mean: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    theory: Vec<Option<f64>>,
}

#[derive(Serialize)]
struct Sweep {
    clock: String,
    estimator: String,
    curve: SweepCurve,
}

#[allow(clippy::too_many_arguments)]
pub fn epps_sweep_json(
    mu: f64,
    alpha_r: f64,
    alpha_c: f64,
    beta: f64,
    horizon: f64,
    replications: usize,
    max_interval: u64,
    clock: &str,
    estimator: &str,
    seed: u64,
) -> Result<String, String> {
    let clock: ClockKind = clock.parse().map_err(|e: epps_core::Error| e.to_string())?;
    let estimator: Estimator = estimator.parse().map_err(|e: epps_core::Error| e.to_string())?;
    let m = model(mu, alpha_r, alpha_c, beta);
    let cfg = ExperimentConfig {
        replications,
        horizon,
        intervals: (1..=max_interval).collect(),
        clocks: vec![clock],
        estimators: vec![estimator],
        seed,
        model: m,
        theory_overlay: m.theory().is_ok(),
        ..Default::default()
    };
    cfg.validate().map_err(|e| e.to_string())?;
    check_size(&m, horizon, replications)?;
    let out = run_epps_sweep(&cfg).map_err(|e| e.to_string())?;
    let c = &out.curves[0];
    let curve = SweepCurve {
        interval: c.points.iter().map(|p| p.interval).collect(),
        mean: c.points.iter().map(|p| p.ribbon.mean).collect(),
        lo: c.points.iter().map(|p| p.ribbon.lo).collect(),
        hi: c.points.iter().map(|p| p.ribbon.hi).collect(),
        theory: c.points.iter().map(|p| p.theory).collect(),
    };
    let sweep = Sweep {
        clock: clock.to_string(),
        estimator: estimator.to_string(),
        curve,
    };
    serde_json::to_string(&sweep).map_err(|e| e.to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn theory_curve(mu: f64, alpha_r: f64, alpha_c: f64, beta: f64, dt_max: f64, points: usize) -> Result<String, JsError> {
    js(theory_curve_json(mu, alpha_r, alpha_c, beta, dt_max, points))
}

#[wasm_bindgen]
pub fn simulate_paths(mu: f64, alpha_r: f64, alpha_c: f64, beta: f64, horizon: f64, seed: u64) -> Result<String, JsError> {
    js(simulate_paths_json(mu, alpha_r, alpha_c, beta, horizon, seed))
}

#[allow(clippy::too_many_arguments)]
#[wasm_bindgen]
pub fn epps_sweep(
    mu: f64,
    alpha_r: f64,
    alpha_c: f64,
    beta: f64,
    horizon: f64,
    replications: usize,
    max_interval: u64,
    clock: &str,
    estimator: &str,
    seed: u64,
) -> Result<String, JsError> {
    js(epps_sweep_json(
        mu,
        alpha_r,
        alpha_c,
        beta,
        horizon,
        replications,
        max_interval,
        clock,
        estimator,
        seed,
    ))
}
