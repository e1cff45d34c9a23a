//! `epps` — simulate, sweep, evaluate theory and ingest trades from a JSON config.

mod output;

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use epps_core::clocks::{
    calendar_grid_previous_tick, event_grid_previous_tick, interval_to_sample_count, shared_event_clock,
    volume_clock, ClockKind, LeadingFill, SampledGrid,
};
use epps_core::estimators::Estimator;
use epps_core::experiments::{
    run_epps_sweep, simulate_replication, write_curves_csv, write_theory_csv, EppsCurve, EstimateRow,
    ExperimentConfig,
};
use epps_core::hawkes::write_events_csv;
use epps_core::ingest::{build_days, load_trades, per_day_estimates, LoadedTrades};
use epps_core::market::write_transactions_csv;
use serde_json::json;

use output::{now, OutDir, RunManifest};

#[derive(Debug)]
pub enum Failure {
    /// Bad config, flags or schema: exit code 2.
    Config(String),
    /// Anything that fails after the configuration was accepted: exit code 1.
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

fn config_err(e: impl fmt::Display) -> Failure {
    Failure::Config(e.to_string())
}

fn runtime_err(e: impl fmt::Display) -> Failure {
    Failure::Runtime(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "epps", version, about = "Epps-effect experiments on Hawkes-driven prices")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON experiment config; omitted fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,

    /// Worker threads; defaults to the available cores.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Clocks to use (comma separated), overriding the config.
    #[arg(long, global = true, value_delimiter = ',')]
    clock: Vec<ClockKind>,

    /// Estimators to use (comma separated), overriding the config.
    #[arg(long, global = true, value_delimiter = ',')]
    estimator: Vec<Estimator>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate replication 0: events, transactions and sampled grids.
    Simulate,
    /// Monte Carlo Epps curves for every selected clock and estimator.
    Epps,
    /// Closed-form correlation and rates over the config's dt grid.
    Theory,
    /// Per-day Epps curves from trade files.
    Ingest {
        /// Trade CSV files; replaces `ingest.inputs` from the config.
        inputs: Vec<PathBuf>,
        /// Column mapping such as `time=Timestamp,price=Px`.
        #[arg(long, env = "EPPS_TRADE_SCHEMA")]
        schema: Option<String>,
        /// Symbol pair `A:B`; repeatable.
        #[arg(long)]
        pair: Vec<String>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Epps => "epps",
            Command::Theory => "theory",
            Command::Ingest { .. } => "ingest",
        }
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if !cli.clock.is_empty() {
        cfg.clocks = cli.clock.clone();
    }
    if !cli.estimator.is_empty() {
        cfg.estimators = cli.estimator.clone();
    }
    cfg.validate().map_err(config_err)?;
    Ok(cfg)
}

struct Run<'a> {
    command: &'a str,
    cfg: ExperimentConfig,
    started_at: String,
    out: OutDir,
}

impl Run<'_> {
    fn finish(self, details: serde_json::Value) -> Result<(), Failure> {
        let manifest = RunManifest {
            tool: "epps",
            version: env!("CARGO_PKG_VERSION"),
            command: self.command.to_string(),
            seed: self.cfg.seed,
            config: serde_json::to_value(&self.cfg).map_err(runtime_err)?,
            started_at: self.started_at,
            finished_at: String::new(),
            outputs: Vec::new(),
            details,
        };
        self.out.finish(manifest)
    }
}

fn grid_for(clock: ClockKind, cfg: &ExperimentConfig, a: &epps_core::market::TransactionSeries, b: &epps_core::market::TransactionSeries) -> epps_core::Result<SampledGrid> {
    let k = cfg.intervals[0];
    let fill = LeadingFill::Known(cfg.x0.0, cfg.x0.1);
    match clock {
        ClockKind::Calendar => calendar_grid_previous_tick(a, b, k as f64, cfg.horizon, fill),
        ClockKind::Event => event_grid_previous_tick(&shared_event_clock(a, b)?, k, fill),
        ClockKind::Volume => volume_clock(a, b, interval_to_sample_count(k as f64, cfg.horizon)?),
    }
}

fn cmd_simulate(run: &mut Run) -> Result<serde_json::Value, Failure> {
    let cfg = &run.cfg;
    let (streams, a, b) = simulate_replication(cfg, 0).map_err(runtime_err)?;
    let events: usize = streams.iter().map(|s| s.len()).sum();
    run.out.write("events.csv", events, |w| write_events_csv(w, &streams))?;
    run.out
        .write("transactions.csv", a.len() + b.len(), |w| write_transactions_csv(w, &[&a, &b]))?;
    let mut grids = Vec::new();
    for &clock in &cfg.clocks {
        let g = grid_for(clock, cfg, &a, &b).map_err(runtime_err)?;
        let rows = g.assets[0].len() + g.assets[1].len();
        run.out.write(&format!("grid_{clock}.csv"), rows, |w| g.write_csv(w))?;
        grids.push(json!({ "clock": clock, "interval": cfg.intervals[0] }));
    }
    Ok(json!({
        "replication": 0,
        "transactions_per_asset": [a.len(), b.len()],
        "grids": grids,
    }))
}

/// Estimate rows with the replication (or day) each belongs to appended.
fn write_estimates<W: Write + ?Sized>(w: &mut W, units: &[(String, &[EstimateRow])], unit: &str) -> epps_core::Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record([
        "estimator", "clock", "interval", "sigma11", "sigma12", "sigma22", "rho", "flags", unit,
    ])?;
    for (label, rows) in units {
        for r in rows.iter() {
            let e = &r.estimate;
            csv.write_record([
                e.estimator.to_string(),
                r.clock.to_string(),
                r.interval.to_string(),
                e.sigma[0][0].to_string(),
                e.sigma[0][1].to_string(),
                e.sigma[1][1].to_string(),
                e.rho.to_string(),
                e.flags.to_string(),
                label.clone(),
            ])?;
        }
    }
    csv.flush()?;
    Ok(())
}

fn write_curve_set(out: &mut OutDir, prefix: &str, curves: &[EppsCurve]) -> Result<(), Failure> {
    for c in curves {
        let name = format!("{prefix}curve_{}_{}.csv", c.clock, c.estimator);
        out.write(&name, c.points.len(), |w| write_curves_csv(w, std::slice::from_ref(c)))?;
    }
    let rows = curves.iter().map(|c| c.points.len()).sum();
    out.write(&format!("{prefix}curves.csv"), rows, |w| write_curves_csv(w, curves))
}

fn cmd_epps(run: &mut Run) -> Result<serde_json::Value, Failure> {
    let sweep = run_epps_sweep(&run.cfg).map_err(runtime_err)?;
    write_curve_set(&mut run.out, "", &sweep.curves)?;
    let units: Vec<(String, &[EstimateRow])> = sweep
        .replications
        .iter()
        .enumerate()
        .map(|(i, r)| (i.to_string(), r.as_slice()))
        .collect();
    let rows = units.iter().map(|u| u.1.len()).sum();
    run.out
        .write("estimates.csv", rows, |w| write_estimates(w, &units, "replication"))?;
    Ok(json!({ "replications": run.cfg.replications }))
}

fn cmd_theory(run: &mut Run) -> Result<serde_json::Value, Failure> {
    let params = run
        .cfg
        .model
        .theory()
        .map_err(config_err)?
        .with_form(run.cfg.variance_form);
    let dts = run.cfg.theory_grid.values();
    run.out.write("theory.csv", dts.len(), |w| write_theory_csv(w, &params, &dts))?;
    Ok(json!({ "variance_form": run.cfg.variance_form }))
}

fn file_safe(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
        .collect()
}

fn parse_pairs(flags: &[String]) -> Result<Vec<[String; 2]>, Failure> {
    let pairs: Vec<[String; 2]> = flags
        .iter()
        .map(|p| match p.split_once(':') {
            Some((x, y)) if !x.is_empty() && !y.is_empty() => Ok([x.to_string(), y.to_string()]),
            _ => Err(Failure::Config(format!("pair {p:?} is not SYMBOL:SYMBOL"))),
        })
        .collect::<Result<_, _>>()?;
    if let Some(p) = pairs.iter().find(|p| p[0] == p[1]) {
        return Err(Failure::Config(format!("pair {}:{} repeats a symbol", p[0], p[1])));
    }
    Ok(pairs)
}

/// Every pair of observed symbols, in sorted order.
fn all_pairs(trades: &LoadedTrades) -> Vec<[String; 2]> {
    let symbols: Vec<String> = trades.symbols().into_iter().collect();
    let mut all = Vec::new();
    for i in 0..symbols.len() {
        for j in i + 1..symbols.len() {
            all.push([symbols[i].clone(), symbols[j].clone()]);
        }
    }
    all
}

fn cmd_ingest(run: &mut Run, inputs: &[PathBuf], schema: Option<&str>, pair_flags: &[String]) -> Result<serde_json::Value, Failure> {
    if !pair_flags.is_empty() {
        run.cfg.ingest.pairs = parse_pairs(pair_flags)?;
    } else {
        parse_pairs(&run.cfg.ingest.pairs.iter().map(|p| p.join(":")).collect::<Vec<_>>())?;
    }
    if !inputs.is_empty() {
        run.cfg.ingest.inputs = inputs.iter().map(|p| p.display().to_string()).collect();
    }
    if let Some(m) = schema {
        run.cfg.ingest.schema = run.cfg.ingest.schema.clone().with_mapping(m).map_err(config_err)?;
    }
    let cfg = &run.cfg;
    let ing = &cfg.ingest;
    if ing.inputs.is_empty() {
        return Err(Failure::Config("no trade files given".into()));
    }
    let horizon = ing.session.length().map_err(config_err)?;
    if let Some(&last) = cfg.intervals.last() {
        if last as f64 > horizon {
            return Err(Failure::Config(format!("interval {last} exceeds the {horizon} s session")));
        }
    }

    let mut trades = LoadedTrades::default();
    for path in &ing.inputs {
        let f = File::open(path).map_err(|e| Failure::Runtime(format!("{path}: {e}")))?;
        let loaded = load_trades(f, &ing.schema, &ing.session).map_err(|e| Failure::Runtime(format!("{path}: {e}")))?;
        trades.extend(loaded);
    }
    let pairs = if ing.pairs.is_empty() { all_pairs(&trades) } else { ing.pairs.clone() };
    if pairs.is_empty() {
        return Err(Failure::Runtime("fewer than two symbols in the input".into()));
    }

    let mut report = BTreeMap::new();
    for pair in &pairs {
        let (days, skipped) = build_days(&trades, pair, &ing.session, ing.log_prices).map_err(runtime_err)?;
        let key = format!("{}:{}", pair[0], pair[1]);
        if days.is_empty() {
            report.insert(key, json!({ "days": [], "skipped_dates": skipped }));
            continue;
        }
        let rows = per_day_estimates(&days, horizon, &cfg.intervals, &cfg.clocks, &cfg.estimators, cfg.fourier)
            .map_err(|e| Failure::Runtime(format!("{key}: {e}")))?;
        let curves = epps_core::experiments::aggregate(&rows, cfg.ribbon).map_err(runtime_err)?;
        let prefix = format!("{}_{}_", file_safe(&pair[0]), file_safe(&pair[1]));
        write_curve_set(&mut run.out, &prefix, &curves)?;
        let units: Vec<(String, &[EstimateRow])> = days.iter().zip(&rows).map(|(d, r)| (d.date.clone(), r.as_slice())).collect();
        let n = units.iter().map(|u| u.1.len()).sum();
        run.out
            .write(&format!("{prefix}estimates.csv"), n, |w| write_estimates(w, &units, "date"))?;
        let dates: Vec<&str> = days.iter().map(|d| d.date.as_str()).collect();
        report.insert(key, json!({ "days": dates, "skipped_dates": skipped }));
    }
    if run.out.outputs.is_empty() {
        return Err(Failure::Runtime("no date has trades in both symbols of any pair".into()));
    }
    Ok(json!({
        "records": trades.records.len(),
        "out_of_session": trades.out_of_session,
        "session_seconds": horizon,
        "pairs": report,
    }))
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    let cfg = load_config(cli)?;
    let mut run = Run {
        command: cli.command.name(),
        cfg,
        started_at: now(),
        out: OutDir::create(&cli.out_dir)?,
    };
    let body = |run: &mut Run| match &cli.command {
        Command::Simulate => cmd_simulate(run),
        Command::Epps => cmd_epps(run),
        Command::Theory => cmd_theory(run),
        Command::Ingest { inputs, schema, pair } => cmd_ingest(run, inputs, schema.as_deref(), pair),
    };
    let details = match cli.threads {
        Some(0) => return Err(Failure::Config("--threads must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(runtime_err)?;
            pool.install(|| body(&mut run))?
        }
        None => body(&mut run)?,
    };
    run.finish(details)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("epps: {f}");
            ExitCode::from(f.code())
        }
    }
}
