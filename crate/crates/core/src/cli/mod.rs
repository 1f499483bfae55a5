//! The `bft` command-line front end.

mod config;
mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::bounds::{
    cnot_failure_bound, default_eps_grid, default_n_range, flagged_bounds, guide_line, injection_bound,
    optimize_threshold, optimize_threshold_grid, sweep_effective_noise, BoundReport, CodeParams,
    ExternalConstants, FlaggedBounds, InjectionReport, SWEEP_HEADER,
};
use crate::error::{invalid, Error, Result};
use crate::gadgets::{GadgetKind, GadgetSpec};
use crate::noise::NoiseParams;
use crate::sim::{estimate_failure, InputErrors, SimResult};

pub use config::{parse_count, CommandKind, Format, RunConfig, SEED_ENV};
pub use verify::{run_verify, VerifyCheck, VerifyReport, SUITES};

const DEFAULT_N: usize = 11;
const DEFAULT_BIAS: f64 = 1e4;
const DEFAULT_TRIALS: u64 = 100_000;

#[derive(Debug, Parser)]
#[command(name = "bft", version, about = "Threshold bounds and simulation for repetition-code gadgets under biased noise")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Failure bounds of the CNOT gadget, Bell measurement and flagged preparation.
    Bounds(Opts),
    /// Largest ε whose effective noise stays under the target.
    Threshold(Opts),
    /// Effective noise versus ε, minimised over block length (CSV).
    Sweep(Opts),
    /// Monte Carlo failure rate of one gadget.
    Simulate(Opts),
    /// Cross-check exact enumeration, Monte Carlo and the bounds.
    Verify(Opts),
}

#[derive(Debug, Default, Args)]
pub struct Opts {
    /// meas_zl, error_correct, cnot, bell_prep or bell_meas.
    #[arg(long)]
    pub gadget: Option<GadgetKind>,
    /// Block length (odd).
    #[arg(long)]
    pub n: Option<usize>,
    /// Repetitions of the preceding gadget's measurements (defaults to n).
    #[arg(long)]
    pub r: Option<usize>,
    /// Repetitions of the two-block parity measurement (defaults to n).
    #[arg(long)]
    pub r1: Option<usize>,
    /// Repetitions of the three-block parity measurement (defaults to n).
    #[arg(long)]
    pub r2: Option<usize>,
    /// Repetitions of the postselected Bell-pair preparation.
    #[arg(long)]
    pub t: Option<usize>,
    /// Dephasing fault rate ε.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// ε/ε′ (default 1e4).
    #[arg(long)]
    pub bias: Option<f64>,
    /// Non-dephasing rate; overrides --bias.
    #[arg(long)]
    pub epsilon_prime: Option<f64>,
    /// Effective-noise ceiling for the threshold search (default 0.67e-3).
    #[arg(long)]
    pub target: Option<f64>,
    #[arg(long, value_parser = parse_count)]
    pub trials: Option<u64>,
    /// Falls back to $BFT_SEED, then 0.
    #[arg(long, value_parser = parse_count)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat key = value file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Simulate with inputs fed by noisy CNOT gadgets of this repetition count.
    #[arg(long)]
    pub preceding_r: Option<usize>,
    /// Comma-separated verification suites: small, large.
    #[arg(long)]
    pub suite: Option<String>,
    /// Sweep over this many log-spaced ε in [1e-4, 1e-2].
    #[arg(long)]
    pub points: Option<usize>,
    /// Threshold search over independent r1, r2 instead of r1 = r2 = r = n.
    #[arg(long)]
    pub full_grid: bool,
    /// Append the ε⁽¹⁾ = ε reference line to the sweep.
    #[arg(long)]
    pub guide: bool,
}

impl Cmd {
    fn split(self) -> (CommandKind, Opts) {
        match self {
            Cmd::Bounds(o) => (CommandKind::Bounds, o),
            Cmd::Threshold(o) => (CommandKind::Threshold, o),
            Cmd::Sweep(o) => (CommandKind::Sweep, o),
            Cmd::Simulate(o) => (CommandKind::Simulate, o),
            Cmd::Verify(o) => (CommandKind::Verify, o),
        }
    }
}

impl Opts {
    fn into_config(self, command: CommandKind) -> (RunConfig, Option<PathBuf>) {
        let cfg = RunConfig {
            command: Some(command),
            gadget: self.gadget,
            n: self.n,
            r: self.r,
            r1: self.r1,
            r2: self.r2,
            t: self.t,
            epsilon: self.epsilon,
            bias: self.bias,
            epsilon_prime: self.epsilon_prime,
            target: self.target,
            trials: self.trials,
            seed: self.seed,
            format: self.format,
            out: self.out,
            preceding_r: self.preceding_r,
            suite: self.suite,
            points: self.points,
            full_grid: self.full_grid.then_some(true),
            guide: self.guide.then_some(true),
        };
        (cfg, self.config)
    }
}

/// Text produced by a command plus the exit status it asks for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub status: i32,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, status: 0 }
    }
}

fn noise(cfg: &RunConfig) -> Result<NoiseParams> {
    let eps = cfg.epsilon.ok_or_else(|| invalid("--epsilon is required"))?;
    match cfg.epsilon_prime {
        Some(ep) => NoiseParams::new(eps, ep),
        None => NoiseParams::from_bias(eps, cfg.bias.unwrap_or(DEFAULT_BIAS)),
    }
}

fn code_params(cfg: &RunConfig) -> Result<CodeParams> {
    let n = cfg.n.unwrap_or(DEFAULT_N);
    let cp = CodeParams::new(n, cfg.r1.unwrap_or(n), cfg.r2.unwrap_or(n), cfg.r.unwrap_or(n))?;
    match cfg.t {
        Some(t) => cp.with_t(t),
        None => Ok(cp),
    }
}

fn gadget_spec(cfg: &RunConfig) -> Result<GadgetSpec> {
    let n = cfg.n.unwrap_or(DEFAULT_N);
    let r = cfg.r.unwrap_or(n);
    let r1 = cfg.r1.unwrap_or(n);
    let r2 = cfg.r2.unwrap_or(n);
    Ok(match cfg.gadget.unwrap_or(GadgetKind::Cnot) {
        GadgetKind::MeasZl => GadgetSpec::MeasZl { n, r },
        GadgetKind::ErrorCorrect => GadgetSpec::ErrorCorrect { n, r },
        GadgetKind::Cnot => GadgetSpec::Cnot { n, r1, r2, r },
        GadgetKind::BellPrep => GadgetSpec::BellPrep { n, t: cfg.t.unwrap_or(n) },
        GadgetKind::BellMeas => GadgetSpec::BellMeas { n, r1, r2 },
    })
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Debug, Serialize)]
struct BoundsOutput {
    params: CodeParams,
    noise: NoiseParams,
    cnot: BoundReport,
    injection: InjectionReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    flagged: Option<FlaggedBounds>,
}

fn cmd_bounds(cfg: &RunConfig) -> Result<Output> {
    let cp = code_params(cfg)?;
    let p = noise(cfg)?;
    let cnot = cnot_failure_bound(&cp, &p)?;
    let injection = injection_bound(&cp, &p, &ExternalConstants::default())?;
    let flagged = cp.t.map(|t| flagged_bounds(cp.n, cp.r1, t, &p)).transpose()?;
    let out = BoundsOutput { params: cp, noise: p, cnot, injection, flagged };
    let text = match cfg.format.unwrap_or_default() {
        Format::Json => json(&out)?,
        Format::Csv => {
            let mut header = vec![
                "n", "r1", "r2", "r", "epsilon", "epsilon_prime", "eps_nd", "eps_mzz", "eps_mzzz", "eps_mx1",
                "eps_mx2", "eps_d", "eps_total", "eps_bm", "eps_inject",
            ];
            let mut row: Vec<String> = [cp.n, cp.r1, cp.r2, cp.r].iter().map(ToString::to_string).collect();
            row.extend(
                [
                    p.epsilon, p.epsilon_prime, cnot.eps_nd, cnot.eps_mzz, cnot.eps_mzzz, cnot.eps_mx1, cnot.eps_mx2,
                    cnot.eps_d, cnot.eps_total, injection.eps_bm, injection.eps_inject,
                ]
                .iter()
                .map(ToString::to_string),
            );
            if let Some(f) = flagged {
                header.extend(["eps_flag", "eps_noflag", "eps_cond_accept"]);
                row.extend([f.eps_flag, f.eps_noflag, f.eps_cond_accept].iter().map(ToString::to_string));
            }
            csv_text(&header, [row])?
        }
    };
    Ok(Output::ok(text))
}

fn cmd_threshold(cfg: &RunConfig) -> Result<Output> {
    let bias = cfg.bias.unwrap_or(DEFAULT_BIAS);
    let target = cfg.target.unwrap_or(ExternalConstants::default().eps_th_css);
    let range = match cfg.n {
        Some(n) => vec![n],
        None => default_n_range(),
    };
    let res = if cfg.full_grid.unwrap_or(false) {
        optimize_threshold_grid(bias, target, &range)?
    } else {
        optimize_threshold(bias, target, &range)?
    };
    if let Some(d) = &res.diagnostic {
        eprintln!("bft: {d}");
    }
    let text = match cfg.format.unwrap_or_default() {
        Format::Json => json(&res)?,
        Format::Csv => csv_text(
            &["n", "eps_max", "bias", "target"],
            res.per_n
                .iter()
                .map(|(n, e)| vec![n.to_string(), e.to_string(), bias.to_string(), target.to_string()]),
        )?,
    };
    Ok(Output::ok(text))
}

fn log_grid(points: usize) -> Result<Vec<f64>> {
    match points {
        0 => Err(invalid("--points must be positive")),
        1 => Ok(vec![1e-3]),
        k => Ok((0..k).map(|i| 10f64.powf(-4.0 + 2.0 * i as f64 / (k - 1) as f64)).collect()),
    }
}

fn cmd_sweep(cfg: &RunConfig) -> Result<Output> {
    let biases = match (cfg.bias, cfg.epsilon_prime) {
        (_, Some(_)) => return Err(invalid("sweep takes --bias, not --epsilon-prime")),
        (Some(b), None) => vec![b],
        (None, None) => vec![1e3, 1e4],
    };
    let eps = match (cfg.epsilon, cfg.points) {
        (Some(e), _) => vec![e],
        (None, Some(k)) => log_grid(k)?,
        (None, None) => default_eps_grid(),
    };
    let range = match cfg.n {
        Some(n) => vec![n],
        None => default_n_range(),
    };
    let mut rows = sweep_effective_noise(&biases, &eps, &range)?;
    if cfg.guide.unwrap_or(false) {
        // bias 0 marks the reference line
        rows.extend(guide_line(&eps).into_iter().map(|(e, g)| crate::bounds::SweepRow {
            epsilon: e,
            bias: 0.0,
            n_opt: 0,
            eps1: g,
        }));
    }
    let text = match cfg.format.unwrap_or(Format::Csv) {
        Format::Json => json(&rows)?,
        Format::Csv => csv_text(
            &SWEEP_HEADER,
            rows.iter().map(|r| {
                vec![r.epsilon.to_string(), r.bias.to_string(), r.n_opt.to_string(), r.eps1.to_string()]
            }),
        )?,
    };
    Ok(Output::ok(text))
}

pub const SIM_CSV_HEADER: [&str; 12] = [
    "gadget",
    "n",
    "epsilon",
    "epsilon_prime",
    "trials",
    "failures",
    "failure_rate",
    "ci_lo",
    "ci_hi",
    "seed",
    "flag_raised",
    "accepted",
];

fn sim_csv(res: &SimResult) -> Result<String> {
    csv_text(
        &SIM_CSV_HEADER,
        [vec![
            res.gadget.clone(),
            res.params.n.to_string(),
            res.params.epsilon.to_string(),
            res.params.epsilon_prime.to_string(),
            res.trials.to_string(),
            res.failures.to_string(),
            res.failure_rate.to_string(),
            res.ci_lo.to_string(),
            res.ci_hi.to_string(),
            res.seed.to_string(),
            res.flag_raised.to_string(),
            res.accepted.to_string(),
        ]],
    )
}

fn cmd_simulate(cfg: &RunConfig) -> Result<Output> {
    let spec = gadget_spec(cfg)?;
    let p = noise(cfg)?;
    let trials = cfg.trials.unwrap_or(DEFAULT_TRIALS);
    let inputs = match cfg.preceding_r {
        Some(r) => InputErrors::PrecedingCnot { r },
        None => InputErrors::Clean,
    };
    let res = estimate_failure(&spec, &p, trials, cfg.seed.unwrap_or(0), &inputs)?;
    let text = match cfg.format.unwrap_or_default() {
        Format::Json => json(&res)?,
        Format::Csv => sim_csv(&res)?,
    };
    Ok(Output::ok(text))
}

/// Runs a resolved configuration.
pub fn execute(cfg: &RunConfig) -> Result<Output> {
    match cfg.command.ok_or_else(|| invalid("no command given"))? {
        CommandKind::Bounds => cmd_bounds(cfg),
        CommandKind::Threshold => cmd_threshold(cfg),
        CommandKind::Sweep => cmd_sweep(cfg),
        CommandKind::Simulate => cmd_simulate(cfg),
        CommandKind::Verify => {
            let report = run_verify(cfg)?;
            let status = if report.all_pass { 0 } else { 4 };
            Ok(Output { text: json(&report)?, status })
        }
    }
}

/// Parses flags, merges the config file and environment, and runs.
pub fn resolve(cli: Cli, env_seed: Option<String>) -> Result<RunConfig> {
    let (command, opts) = cli.command.split();
    let (flags, file) = opts.into_config(command);
    let base = match file {
        Some(path) => RunConfig::load(&path)?,
        None => RunConfig::default(),
    };
    let mut cfg = flags.over(base).with_env_seed(env_seed)?;
    cfg.command = Some(command);
    Ok(cfg)
}

fn write_output(cfg: &RunConfig, text: &str) -> Result<()> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Entry point used by the binary; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let run = || -> Result<i32> {
        let cfg = resolve(cli, std::env::var(SEED_ENV).ok())?;
        let out = execute(&cfg)?;
        write_output(&cfg, &out.text)?;
        Ok(out.status)
    };
    match run() {
        Ok(status) => status,
        Err(e) => {
            eprintln!("bft: {e}");
            e.exit_code()
        }
    }
}
