//! Command-line front end: `synth`, `simulate`, `verify` and `demo`.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 infeasible synthesis,
//! 3 verification failure.

mod config;
mod demo;
mod output;

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

pub use config::{CircuitConfig, LegConfig, RunConfig, ScheduleFile, TargetConfig, TransferConfig};
pub use demo::{DemoValues, Expected};

use crate::error::Error;
use crate::exec::Execution;
use crate::factor::Algorithm;
use crate::lie::CayleyKlein;
use crate::network::Network;
use crate::schedule::{Schedule, ScheduleMode};
use crate::sim::{run_schedule, verify_transfer, TransferReport, DEFAULT_TOLERANCE};
use crate::synth::{synthesize_fourth, synthesize_third};
use crate::target::{FourthMode, TransferRequest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn verification(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_VERIFY,
            message: message.into(),
        }
    }

    /// Infeasible synthesis maps to exit 2, anything else to exit 1.
    pub fn from_error(e: Error) -> Self {
        let code = if e.is_infeasible() { EXIT_INFEASIBLE } else { EXIT_USAGE };
        let message = if e.is_infeasible() {
            format!("infeasible: {e}")
        } else {
            e.to_string()
        };
        CliError { code, message }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::from_error(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn parse_algorithm(s: &str) -> std::result::Result<Algorithm, String> {
    Algorithm::parse(s).ok_or_else(|| format!("unknown algorithm `{s}` (piecewise, bangbang1, bangbang2, fourth)"))
}

fn parse_positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err(format!("expected a positive number, got `{s}`")),
    }
}

#[derive(Parser, Debug)]
#[command(name = "switchnet", version, about = "Switching-control synthesis for lossless third- and fourth-order networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize a schedule from a run configuration.
    Synth(SynthArgs),
    /// Simulate a schedule file, writing the trajectory and a transfer report.
    Simulate(SimulateArgs),
    /// Check that a schedule (or a freshly synthesized one) performs its transfer.
    Verify(VerifyArgs),
    /// Regenerate the worked examples and compare them with stored values.
    Demo(DemoArgs),
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_parser = parse_algorithm)]
    algorithm: Option<Algorithm>,
    /// Output directory (default: the config's `out`, else the current directory).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    schedule: PathBuf,
    /// Overrides the circuit and transfer stored in the schedule file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = parse_positive)]
    tolerance: Option<f64>,
    #[arg(long = "sample-dt", value_parser = parse_positive)]
    sample_dt: Option<f64>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, required_unless_present = "schedule")]
    config: Option<PathBuf>,
    #[arg(long)]
    schedule: Option<PathBuf>,
    #[arg(long, value_parser = parse_algorithm)]
    algorithm: Option<Algorithm>,
    #[arg(long, value_parser = parse_positive)]
    tolerance: Option<f64>,
    /// Also write `transfer_report.json` here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DemoArgs {
    /// Write schedules, trajectories and reports here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Compare against this file instead of the built-in expectations.
    #[arg(long)]
    expected: Option<PathBuf>,
    /// Write the computed values as a new expectations file and exit.
    #[arg(long)]
    record: Option<PathBuf>,
    #[arg(long = "sample-dt", value_parser = parse_positive)]
    sample_dt: Option<f64>,
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Synth(a) => synth(a),
        Command::Simulate(a) => simulate(a),
        Command::Verify(a) => verify(a),
        Command::Demo(a) => demo::run(a.out.as_deref(), a.expected.as_deref(), a.record.as_deref(), a.sample_dt),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PulseRow {
    pub index: usize,
    pub leg: usize,
    pub duration: f64,
    pub power: f64,
    pub control: f64,
}

/// `Σ √(a² + b²)` of the same transfer under each third-order algorithm.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlgorithmCosts {
    pub piecewise: Option<f64>,
    pub bangbang1: Option<f64>,
    pub bangbang2: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FourthDetails {
    pub mode: FourthMode,
    pub k: Option<u32>,
    pub p: CayleyKlein,
    pub q: CayleyKlein,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SynthReport {
    pub algorithm: Algorithm,
    pub dimension: usize,
    pub mode: ScheduleMode,
    pub pulses: Vec<PulseRow>,
    pub total_duration: f64,
    pub total_power: f64,
    pub cost: f64,
    pub bang_bang: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algorithm_costs: Option<AlgorithmCosts>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fourth: Option<FourthDetails>,
}

impl SynthReport {
    fn new(algorithm: Algorithm, schedule: &Schedule) -> Self {
        let mut pulses = Vec::with_capacity(schedule.pulses.len());
        for (leg, range) in schedule.leg_ranges().into_iter().enumerate() {
            for i in range {
                let p = schedule.pulses[i];
                pulses.push(PulseRow {
                    index: i + 1,
                    leg: leg + 1,
                    duration: p.duration,
                    power: p.power(),
                    control: p.control,
                });
            }
        }
        SynthReport {
            algorithm,
            dimension: schedule.dimension,
            mode: schedule.mode,
            pulses,
            total_duration: schedule.total_duration(),
            total_power: schedule.total_power(),
            cost: schedule.cost(),
            bang_bang: schedule.is_bang_bang(),
            algorithm_costs: None,
            fourth: None,
        }
    }

    pub fn table(&self) -> String {
        let mut s = format!(
            "algorithm {} ({}), {}-dimensional network\n{:>4} {:>4} {:>24} {:>24} {:>24}\n",
            self.algorithm.name(),
            match self.mode {
                ScheduleMode::Piecewise => "piecewise",
                ScheduleMode::Bangbang => "bang-bang",
            },
            self.dimension,
            "k",
            "leg",
            "a_k",
            "b_k",
            "u_k"
        );
        for r in &self.pulses {
            s += &format!(
                "{:>4} {:>4} {:>24.16e} {:>24.16e} {:>24.16e}\n",
                r.index, r.leg, r.duration, r.power, r.control
            );
        }
        s += &format!(
            "total duration {:.16e}\ntotal power    {:.16e}\ncost Σ√(a²+b²) {:.16e}\nbang-bang      {}\n",
            self.total_duration,
            self.total_power,
            self.cost,
            if self.bang_bang { "yes" } else { "no" }
        );
        if let Some(c) = &self.algorithm_costs {
            let show = |v: Option<f64>| v.map_or("infeasible".to_string(), |x| format!("{x:.16e}"));
            s += &format!(
                "cost by algorithm: piecewise {}, bangbang1 {}, bangbang2 {}\n",
                show(c.piecewise),
                show(c.bangbang1),
                show(c.bangbang2)
            );
        }
        if let Some(f) = &self.fourth {
            s += &format!(
                "construction {}{}: p = S({:.16e}, {:.16e}, {:.16e}), q = S({:.16e}, {:.16e}, {:.16e})\n",
                f.mode.name(),
                f.k.map(|k| format!(" (k = {k})")).unwrap_or_default(),
                f.p.alpha,
                f.p.zeta,
                f.p.mu,
                f.q.alpha,
                f.q.zeta,
                f.q.mu
            );
        }
        s
    }
}

/// Everything produced by one synthesis run.
#[derive(Clone, Debug)]
pub struct Synthesized {
    pub algorithm: Algorithm,
    pub network: Network,
    pub request: TransferRequest,
    pub schedule: Schedule,
    pub report: SynthReport,
}

/// Synthesize the transfer described by `cfg`.
pub fn synthesize(cfg: &RunConfig, algorithm: Algorithm) -> CliResult<Synthesized> {
    let network = cfg.network()?;
    if algorithm.dimension() != network.dimension() {
        return Err(Error::AlgorithmDimension {
            algorithm: algorithm.name(),
            dimension: network.dimension(),
        }
        .into());
    }
    let request = cfg.request()?;
    let (schedule, report) = match network {
        Network::Third(sys) => {
            let options = cfg.transfer.leg_options();
            let out = synthesize_third(&request, &sys, algorithm, &options)?;
            let cost = |alg| synthesize_third(&request, &sys, alg, &options).ok().map(|s| s.schedule.cost());
            let mut report = SynthReport::new(algorithm, &out.schedule);
            report.algorithm_costs = Some(AlgorithmCosts {
                piecewise: cost(Algorithm::Piecewise),
                bangbang1: cost(Algorithm::Bangbang1),
                bangbang2: cost(Algorithm::Bangbang2),
            });
            (out.schedule, report)
        }
        Network::Fourth(sys) => {
            let out = synthesize_fourth(&request, &sys)?;
            let mut report = SynthReport::new(algorithm, &out.schedule);
            report.fourth = Some(FourthDetails {
                mode: out.target.mode,
                k: out.target.k,
                p: out.target.p,
                q: out.target.q,
            });
            (out.schedule, report)
        }
    };
    Ok(Synthesized {
        algorithm,
        network,
        request,
        schedule,
        report,
    })
}

fn out_dir(flag: Option<PathBuf>, cfg: Option<&RunConfig>) -> PathBuf {
    flag.or_else(|| cfg.and_then(|c| c.out.clone())).unwrap_or_else(|| PathBuf::from("."))
}

fn synth(args: SynthArgs) -> CliResult<i32> {
    let cfg = RunConfig::load(&args.config)?;
    let algorithm = cfg.algorithm(args.algorithm);
    let out = synthesize(&cfg, algorithm)?;
    let dir = out_dir(args.out, Some(&cfg));
    let file = ScheduleFile::new(&out.schedule, cfg.circuit, algorithm, &cfg.transfer);
    output::write_json(&dir.join("schedule.json"), &file)?;
    output::write_json(&dir.join("synth_report.json"), &out.report)?;
    print!("{}", out.report.table());
    println!("wrote {}", dir.join("schedule.json").display());
    Ok(EXIT_OK)
}

/// Network, request and tolerance for a stored schedule, optionally overridden by a config.
fn schedule_context(
    file: &ScheduleFile,
    cfg: Option<&RunConfig>,
) -> CliResult<(Network, TransferRequest)> {
    let (network, request) = match cfg {
        Some(cfg) => (cfg.network()?, cfg.request()?),
        None => {
            let network = file.circuit.network().map_err(|e| CliError::usage(format!("schedule circuit: {e}")))?;
            let transfer = file
                .transfer
                .as_ref()
                .ok_or_else(|| CliError::usage("schedule has no `transfer` block; pass --config"))?;
            let request = transfer
                .request(network.dimension())
                .map_err(|e| CliError::usage(format!("schedule transfer: {e}")))?;
            (network, request)
        }
    };
    if file.dimension != network.dimension() {
        return Err(Error::DimensionMismatch {
            expected: network.dimension(),
            found: file.dimension,
        }
        .into());
    }
    Ok((network, request))
}

fn print_report(report: &TransferReport) {
    println!("endpoint error   {:.3e}", report.endpoint_error);
    for (i, e) in report.waypoint_errors.iter().enumerate() {
        println!("waypoint {} error {:.3e}", i + 1, e);
    }
    println!("max norm drift   {:.3e}", report.max_norm_drift);
    println!("total duration   {:.16e}", report.total_duration);
    println!("bang-bang        {}", if report.bang_bang { "yes" } else { "no" });
    println!(
        "verification     {} (tolerance {:e})",
        if report.passed { "passed" } else { "FAILED" },
        report.tolerance
    );
}

fn finish_report(report: &TransferReport) -> CliResult<i32> {
    print_report(report);
    if report.passed {
        Ok(EXIT_OK)
    } else {
        Err(CliError::verification(format!(
            "transfer not achieved within {:e} (endpoint error {:e})",
            report.tolerance, report.endpoint_error
        )))
    }
}

fn load_optional_config(path: Option<&Path>) -> CliResult<Option<RunConfig>> {
    path.map(RunConfig::load).transpose()
}

fn simulate(args: SimulateArgs) -> CliResult<i32> {
    let file = ScheduleFile::load(&args.schedule)?;
    let cfg = load_optional_config(args.config.as_deref())?;
    let (network, request) = schedule_context(&file, cfg.as_ref())?;
    let tolerance = args
        .tolerance
        .or(cfg.as_ref().and_then(|c| c.tolerance))
        .unwrap_or(DEFAULT_TOLERANCE);
    let sample_dt = args.sample_dt.or(cfg.as_ref().and_then(|c| c.sample_dt));
    let schedule = file.schedule();
    let run = run_schedule(&request.x0, &network, &schedule, sample_dt, Execution::default())?;
    let report = verify_transfer(&request, &network, &schedule, tolerance)?;
    let dir = out_dir(args.out, cfg.as_ref());
    output::write_trajectory(&dir.join("trajectory.csv"), &run.samples, network.dimension())?;
    output::write_json(&dir.join("transfer_report.json"), &report)?;
    println!("{} samples written to {}", run.samples.len(), dir.join("trajectory.csv").display());
    finish_report(&report)
}

fn verify(args: VerifyArgs) -> CliResult<i32> {
    let cfg = load_optional_config(args.config.as_deref())?;
    let (network, request, schedule) = match (&args.schedule, &cfg) {
        (Some(path), _) => {
            let file = ScheduleFile::load(path)?;
            let (network, request) = schedule_context(&file, cfg.as_ref())?;
            (network, request, file.schedule())
        }
        (None, Some(cfg)) => {
            let out = synthesize(cfg, cfg.algorithm(args.algorithm))?;
            (out.network, out.request, out.schedule)
        }
        (None, None) => return Err(CliError::usage("verify needs --config or --schedule")),
    };
    let tolerance = args
        .tolerance
        .or(cfg.as_ref().and_then(|c| c.tolerance))
        .unwrap_or(DEFAULT_TOLERANCE);
    let report = verify_transfer(&request, &network, &schedule, tolerance)?;
    if let Some(dir) = &args.out {
        output::write_json(&dir.join("transfer_report.json"), &report)?;
    }
    finish_report(&report)
}
