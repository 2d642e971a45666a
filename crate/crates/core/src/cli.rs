//! Command implementations behind the `tstlab` binary.
//!
//! Each command returns its JSON or CSV document together with the process
//! exit status, so the commands can be driven directly from tests.
//! Exit statuses: 0 success, 2 validation or hypothesis failure, 3 I/O
//! failure, 4 experiment invalidated by censoring.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::bounds::{
    best_n, bound_report, estimate_c0, estimate_c1, crossing_spread_bounds, lower_bound_brownian, lower_bound_discrete,
    regime_check, upper_bound_brownian, upper_bound_discrete, BoundReport, Hypotheses, LowerBoundVariant,
};
use crate::model::{Coefficient, TimeMode, WalkParams};
use crate::montecarlo::{
    log_checkpoints, simulate_trials, summarize, sweep, tail_exponent_estimate, ExperimentSummary, RunOptions,
    SweepPoint, SweepRow, Verdict,
};
use crate::path::TrialOutcome;
use crate::{Error, Result};

/// Version tag carried by every JSON document.
pub const FORMAT_VERSION: &str = "1.0";

/// Relative output paths are resolved against this directory when set.
pub const OUT_DIR_ENV: &str = "TSTLAB_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_CENSORED: i32 = 4;

/// Column order of the per-trial CSV.
pub const PER_TRIAL_HEADER: &str = "trial_index,tau,eta,abs_dev,overshoot_x,overshoot_xhat,censored_tau,censored_eta";

pub const SWEEP_HEADER: &str = "index,mode,l,s,eps,c,seed,n_trials,n_censored,mean_abs_dev,ci_halfwidth_abs_dev,\
mean_pos_dev,prob_eta_early,mean_tau,lower,lower_best_n,upper,main_term,ratio_to_main_term,verdict,error";

#[derive(Debug, Parser)]
#[command(
    name = "tstlab",
    version,
    about = "Bounds and Monte Carlo checks for tracking a random-walk crossing time"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the closed-form bounds for one parameter set.
    Bounds(BoundsArgs),
    /// Run one Monte Carlo experiment.
    Simulate(SimulateArgs),
    /// Run one experiment per point of a JSON grid and emit a CSV table.
    Sweep(SweepArgs),
    /// Check the driftless survival tail against the reflection law.
    Tailcheck(TailcheckArgs),
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub l: f64,
    #[arg(long)]
    pub s: f64,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value = "discrete")]
    pub mode: TimeMode,
    /// Regime exponent in (1/2, 1).
    #[arg(long)]
    pub q: Option<f64>,
    /// Lower-bound horizon; the best one is searched when omitted.
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long, default_value = "printed")]
    pub variant: LowerBoundVariant,
}

#[derive(Debug, Args, Default)]
pub struct SimulateArgs {
    /// JSON run configuration; inline flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub mode: Option<TimeMode>,
    #[arg(long)]
    pub l: Option<f64>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub t_max: Option<u64>,
    /// Disable the Brownian bridge correction.
    #[arg(long)]
    pub no_bridge: bool,
    /// Tracking coefficient: `auto` or a number.
    #[arg(long)]
    pub c: Option<Coefficient>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write per-trial records as CSV.
    #[arg(long)]
    pub per_trial: Option<PathBuf>,
    /// Write the summary JSON here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub variant: Option<LowerBoundVariant>,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub grid_file: PathBuf,
    #[arg(long)]
    pub trials: u64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "printed")]
    pub variant: LowerBoundVariant,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TailcheckArgs {
    #[arg(long)]
    pub h: f64,
    #[arg(long)]
    pub trials: u64,
    /// Comma-separated increasing times; ten per decade from 1 to 10^6 by default.
    #[arg(long, value_delimiter = ',')]
    pub checkpoints: Option<Vec<f64>>,
    #[arg(long)]
    pub seed: u64,
    /// Drift; the tail law only holds for 0.
    #[arg(long, default_value_t = 0.0)]
    pub s: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
}

/// A rendered command result.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    /// Text for standard output (empty when everything went to files).
    pub stdout: String,
    pub exit_code: i32,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) => EXIT_IO,
        _ => EXIT_VALIDATION,
    }
}

pub fn run(cli: Cli) -> Result<Output> {
    match cli.command {
        Command::Bounds(a) => cmd_bounds(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Tailcheck(a) => cmd_tailcheck(&a),
    }
}

fn resolve_out(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn emit(doc: String, out: Option<&Path>) -> Result<String> {
    match out {
        Some(path) => {
            fs::write(resolve_out(path), doc)?;
            Ok(String::new())
        }
        None => Ok(doc),
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct Document<'a, C: Serialize, R: Serialize> {
    spec_version: &'static str,
    command: &'a str,
    config: C,
    result: R,
}

#[derive(Serialize)]
struct BoundsConfig {
    l: f64,
    s: f64,
    eps: f64,
    mode: TimeMode,
    q: Option<f64>,
    n: Option<u64>,
    lower_bound_variant: LowerBoundVariant,
}

#[derive(Serialize)]
struct Diagnostics {
    /// Bound for the blind rule `c = 0`.
    estimate_c0: f64,
    /// Bound for the raw-observation rule `c = 1`.
    estimate_c1: f64,
    crossing_spread: crate::bounds::CrossingSpreadBounds,
}

#[derive(Serialize)]
struct BoundsResult {
    #[serde(flatten)]
    report: BoundReport,
    diagnostics: Diagnostics,
}

pub fn cmd_bounds(a: &BoundsArgs) -> Result<Output> {
    let params = WalkParams::new(a.s, a.eps, a.l, a.mode, 1.0)?;
    let upper = match a.mode {
        TimeMode::Discrete => upper_bound_discrete(&params)?,
        TimeMode::Brownian => upper_bound_brownian(&params)?,
    };
    let (n, lower) = match a.n {
        Some(n) => {
            let v = match a.mode {
                TimeMode::Discrete => lower_bound_discrete(&params, n, a.variant)?,
                TimeMode::Brownian => lower_bound_brownian(&params, n, a.variant)?,
            };
            (n, v)
        }
        None => best_n(&params, a.mode, a.variant)?,
    };
    let regime = a.q.map(|q| regime_check(&params, q)).transpose()?;
    let mut report = bound_report(&params, a.variant);
    report.upper = Some(upper);
    report.lower = Some(lower);
    report.lower_best_n = Some(n);
    report.hypotheses_ok = Hypotheses {
        upper: true,
        lower: true,
    };
    report.regime = regime;
    let result = BoundsResult {
        report,
        diagnostics: Diagnostics {
            estimate_c0: estimate_c0(a.s, a.l)?,
            estimate_c1: estimate_c1(a.s, a.eps, a.l)?,
            crossing_spread: crossing_spread_bounds(a.s, a.l)?,
        },
    };
    let doc = Document {
        spec_version: FORMAT_VERSION,
        command: "bounds",
        config: BoundsConfig {
            l: a.l,
            s: a.s,
            eps: a.eps,
            mode: a.mode,
            q: a.q,
            n: a.n,
            lower_bound_variant: a.variant,
        },
        result,
    };
    Ok(Output {
        stdout: to_json(&doc)?,
        exit_code: EXIT_OK,
    })
}

fn default_dt() -> f64 {
    0.01
}

/// Run configuration as read from a `--config` file.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Option<TimeMode>,
    pub s: Option<f64>,
    pub eps: Option<f64>,
    pub l: Option<f64>,
    pub dt: Option<f64>,
    pub t_max: Option<u64>,
    pub bridge_correction: Option<bool>,
    pub c: Option<Coefficient>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub per_trial: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub lower_bound_variant: Option<LowerBoundVariant>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("run configuration: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::from_json(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Inline flags take precedence over file fields.
    fn overlay(mut self, a: &SimulateArgs) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if a.$f.is_some() { self.$f = a.$f.clone(); } )* };
        }
        take!(mode, s, eps, l, dt, t_max, c, trials, seed, per_trial, out);
        if a.variant.is_some() {
            self.lower_bound_variant = a.variant;
        }
        if a.no_bridge {
            self.bridge_correction = Some(false);
        }
        self
    }
}

/// The fully resolved experiment, echoed into the summary document.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedRun {
    pub mode: TimeMode,
    pub s: f64,
    pub eps: f64,
    pub l: f64,
    pub dt: f64,
    pub t_max: u64,
    pub bridge_correction: bool,
    pub c: f64,
    pub c_bar: f64,
    pub trials: u64,
    pub seed: u64,
    pub lower_bound_variant: LowerBoundVariant,
}

fn required<T>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| Error::Config(format!("missing required setting `{name}`")))
}

fn resolve_run(cfg: &RunConfig) -> Result<(WalkParams, crate::EstimatorConfig, ResolvedRun)> {
    let mode = cfg.mode.unwrap_or(TimeMode::Discrete);
    let (s, eps, l) = (required(cfg.s, "s")?, required(cfg.eps, "eps")?, required(cfg.l, "l")?);
    let dt = cfg.dt.unwrap_or_else(default_dt);
    let seed = required(cfg.seed, "seed")?;
    let trials = required(cfg.trials, "trials")?;
    let mut params = WalkParams::new(s, eps, l, mode, dt)?;
    if let Some(t) = cfg.t_max {
        params = params.with_t_max(t)?;
    }
    if let Some(b) = cfg.bridge_correction {
        params = params.with_bridge_correction(b);
    }
    let est = cfg.c.unwrap_or_default().resolve(eps)?;
    let resolved = ResolvedRun {
        mode,
        s,
        eps,
        l,
        dt: params.dt,
        t_max: params.t_max,
        bridge_correction: params.bridge_correction && mode == TimeMode::Brownian,
        c: est.c,
        c_bar: est.c_bar,
        trials,
        seed,
        lower_bound_variant: cfg.lower_bound_variant.unwrap_or_default(),
    };
    Ok((params, est, resolved))
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

/// Per-trial records in trial order, under [`PER_TRIAL_HEADER`].
pub fn per_trial_csv(outcomes: &[TrialOutcome]) -> String {
    let mut s = String::with_capacity(64 * (outcomes.len() + 1));
    s.push_str(PER_TRIAL_HEADER);
    s.push('\n');
    for (i, o) in outcomes.iter().enumerate() {
        let _ = writeln!(
            s,
            "{i},{},{},{},{},{},{},{}",
            o.tau,
            o.eta,
            o.abs_dev(),
            o.overshoot_x,
            o.overshoot_xhat,
            flag(o.censored_tau),
            flag(o.censored_eta)
        );
    }
    s
}

pub fn cmd_simulate(a: &SimulateArgs) -> Result<Output> {
    let base = match &a.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let cfg = base.overlay(a);
    let (params, est, resolved) = resolve_run(&cfg)?;
    let opts = RunOptions {
        threads: a.threads,
        lower_bound_variant: resolved.lower_bound_variant,
    };
    if resolved.trials < crate::montecarlo::MIN_TRIALS {
        return Err(Error::domain(
            "trials",
            resolved.trials as f64,
            "an experiment needs at least 100 trials",
        ));
    }
    let outcomes = simulate_trials(&params, &est, resolved.trials, resolved.seed, &opts)?;
    let summary: ExperimentSummary = summarize(&params, &outcomes, opts.lower_bound_variant);
    if let Some(path) = &cfg.per_trial {
        fs::write(resolve_out(path), per_trial_csv(&outcomes))?;
    }
    let doc = Document {
        spec_version: FORMAT_VERSION,
        command: "simulate",
        config: &resolved,
        result: &summary,
    };
    let stdout = emit(to_json(&doc)?, cfg.out.as_deref())?;
    let exit_code = if summary.verdict == Verdict::InvalidCensoring {
        EXIT_CENSORED
    } else {
        EXIT_OK
    };
    Ok(Output { stdout, exit_code })
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GridFile {
    Points(Vec<SweepPoint>),
    Wrapped { points: Vec<SweepPoint> },
}

pub fn parse_grid(text: &str) -> Result<Vec<SweepPoint>> {
    let grid: GridFile = serde_json::from_str(text).map_err(|e| {
        Error::Config(format!(
            "grid file: {e}; expected a list of {{\"l\", \"s\", \"eps\", \"c\"?, \"mode\"?, \"dt\"?}} objects"
        ))
    })?;
    Ok(match grid {
        GridFile::Points(p) | GridFile::Wrapped { points: p } => p,
    })
}

fn opt_num<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::InsideBracket => "inside_bracket",
        Verdict::BelowLower => "below_lower",
        Verdict::AboveUpper => "above_upper",
        Verdict::InvalidCensoring => "invalid_censoring",
        Verdict::NoBracket => "no_bracket",
    }
}

/// One CSV table row per sweep point, under [`SWEEP_HEADER`].
pub fn sweep_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(SWEEP_HEADER.split(','))
        .map_err(|e| Error::Config(e.to_string()))?;
    for row in rows {
        let p = &row.point;
        let mut rec = vec![
            row.index.to_string(),
            p.mode.to_string(),
            p.l.to_string(),
            p.s.to_string(),
            p.eps.to_string(),
            opt_num(row.c),
            row.seed.to_string(),
        ];
        match &row.outcome {
            Ok(sum) => {
                let r = &sum.bound_report;
                rec.extend([
                    sum.n_trials.to_string(),
                    sum.n_censored.to_string(),
                    sum.mean_abs_dev.to_string(),
                    sum.ci_halfwidth_abs_dev.to_string(),
                    sum.mean_pos_dev.to_string(),
                    sum.prob_eta_early.to_string(),
                    sum.mean_tau.to_string(),
                    opt_num(r.lower),
                    opt_num(r.lower_best_n),
                    opt_num(r.upper),
                    opt_num(r.main_term),
                    opt_num(sum.ratio_to_main_term()),
                    verdict_name(sum.verdict).to_string(),
                    String::new(),
                ]);
            }
            Err(e) => {
                rec.extend(std::iter::repeat_n(String::new(), 13));
                rec.push(e.clone());
            }
        }
        w.write_record(&rec).map_err(|e| Error::Config(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("CSV of UTF-8 fields"))
}

pub fn cmd_sweep(a: &SweepArgs) -> Result<Output> {
    let points = parse_grid(&fs::read_to_string(&a.grid_file)?)?;
    let opts = RunOptions {
        threads: a.threads,
        lower_bound_variant: a.variant,
    };
    let rows = sweep(&points, a.trials, a.seed, &opts)?;
    let stdout = emit(sweep_csv(&rows)?, a.out.as_deref())?;
    Ok(Output {
        stdout,
        exit_code: EXIT_OK,
    })
}

#[derive(Serialize)]
struct TailConfig<'a> {
    h: f64,
    s: f64,
    trials: u64,
    seed: u64,
    checkpoints: &'a [f64],
}

pub fn cmd_tailcheck(a: &TailcheckArgs) -> Result<Output> {
    if a.s != 0.0 {
        return Err(Error::Hypothesis {
            bound: "driftless tail law",
            condition: "s = 0",
            detail: format!("s = {}", a.s),
        });
    }
    let checkpoints = a.checkpoints.clone().unwrap_or_else(|| log_checkpoints(1.0, 1e6, 10));
    let opts = RunOptions {
        threads: a.threads,
        ..RunOptions::default()
    };
    let result = tail_exponent_estimate(a.h, a.trials, &checkpoints, a.seed, &opts)?;
    let doc = Document {
        spec_version: FORMAT_VERSION,
        command: "tailcheck",
        config: TailConfig {
            h: a.h,
            s: a.s,
            trials: a.trials,
            seed: a.seed,
            checkpoints: &checkpoints,
        },
        result: &result,
    };
    let stdout = emit(to_json(&doc)?, a.out.as_deref())?;
    Ok(Output {
        stdout,
        exit_code: EXIT_OK,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_errors_name_the_location() {
        let err = RunConfig::from_json("{\n  \"s\": 1,\n  \"epsilon\": 2\n}").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("epsilon") && msg.contains("line 3"), "{msg}");
        let err = RunConfig::from_json("{\"s\": \"one\"}").unwrap_err();
        assert!(err.to_string().contains("line 1"));
    }

    #[test]
    fn missing_seed_is_an_error() {
        let cfg = RunConfig::from_json(r#"{"s": 1, "eps": 1, "l": 10, "trials": 100}"#).unwrap();
        let err = resolve_run(&cfg).unwrap_err();
        assert!(err.to_string().contains("seed"));
        assert_eq!(exit_code(&err), EXIT_VALIDATION);
    }

    #[test]
    fn overlay_prefers_flags() {
        let cfg = RunConfig::from_json(r#"{"s": 1, "eps": 1, "l": 10, "trials": 100, "seed": 1}"#).unwrap();
        let args = SimulateArgs {
            l: Some(20.0),
            c: Some(Coefficient::Value(0.0)),
            ..SimulateArgs::default()
        };
        let (params, est, resolved) = resolve_run(&cfg.overlay(&args)).unwrap();
        assert_eq!(params.l, 20.0);
        assert_eq!(est.c, 0.0);
        assert_eq!(resolved.seed, 1);
    }

    #[test]
    fn grid_accepts_both_layouts() {
        let a = parse_grid(r#"[{"l": 100, "s": 1, "eps": 1}]"#).unwrap();
        let b = parse_grid(r#"{"points": [{"l": 100, "s": 1, "eps": 1, "c": "auto"}]}"#).unwrap();
        assert_eq!(a, b);
        assert!(parse_grid(r#"[{"l": 100}]"#).is_err());
    }

    #[test]
    fn per_trial_layout() {
        let o = TrialOutcome {
            tau: 3.0,
            eta: 5.0,
            overshoot_x: 0.25,
            overshoot_xhat: 0.5,
            censored_tau: false,
            censored_eta: true,
        };
        let csv = per_trial_csv(&[o]);
        assert_eq!(csv, format!("{PER_TRIAL_HEADER}\n0,3,5,2,0.25,0.5,0,1\n"));
    }
}
