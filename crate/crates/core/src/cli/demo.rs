//! Worked examples: the three-leg third-order transfer under every algorithm,
//! the three fourth-order constructions, and the pulse-cost comparison.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{output, synthesize, CliError, RunConfig, ScheduleFile, Synthesized, EXIT_OK};
use crate::exec::Execution;
use crate::factor::Algorithm;
use crate::network::Network;
use crate::sim::{run_schedule, verify_transfer, DEFAULT_TOLERANCE};
use crate::synth::compare_costs;

const DEMO_THIRD: &str = include_str!("../../configs/demo_third.json");
const FOURTH_CC1: &str = include_str!("../../configs/fourth_cc1.json");
const FOURTH_FREE: &str = include_str!("../../configs/fourth_free.json");
const FOURTH_CC2: &str = include_str!("../../configs/fourth_cc2.json");
const EXPECTED: &str = include_str!("../../data/demo_expected.json");

pub const COST_SAMPLES: usize = 100;
pub const COST_SEED: u64 = 2024;

/// Stored reference values, keyed like `third.bangbang2.pulse3.duration`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    pub tolerance: f64,
    pub values: BTreeMap<String, f64>,
}

impl Expected {
    pub fn builtin() -> Expected {
        serde_json::from_str(EXPECTED).expect("embedded expectations are valid")
    }

    /// One line per missing, extra or mismatched key.
    pub fn diff(&self, computed: &BTreeMap<String, f64>) -> Vec<String> {
        let mut out = Vec::new();
        for (key, want) in &self.values {
            match computed.get(key) {
                None => out.push(format!("missing value `{key}`")),
                Some(got) => {
                    let err = (got - want).abs();
                    if !(err <= self.tolerance * want.abs().max(1.0)) {
                        out.push(format!("`{key}`: expected {want:.16e}, got {got:.16e} (difference {err:.3e})"));
                    }
                }
            }
        }
        for key in computed.keys().filter(|k| !self.values.contains_key(*k)) {
            out.push(format!("unexpected value `{key}`"));
        }
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DemoValues {
    pub values: BTreeMap<String, f64>,
    /// Transfers whose simulation missed the tolerance.
    pub failed: Vec<String>,
}

impl DemoValues {
    fn record(&mut self, key: String, value: f64) {
        self.values.insert(key, value);
    }
}

fn parse_builtin(text: &str, name: &str) -> Result<RunConfig, CliError> {
    RunConfig::parse(text, name)
}

fn run_case(
    name: &str,
    cfg: &RunConfig,
    algorithm: Algorithm,
    sample_dt: Option<f64>,
    out: Option<&Path>,
    values: &mut DemoValues,
) -> Result<Synthesized, CliError> {
    let syn = synthesize(cfg, algorithm)?;
    let tolerance = cfg.tolerance.unwrap_or(DEFAULT_TOLERANCE);
    let report = verify_transfer(&syn.request, &syn.network, &syn.schedule, tolerance)?;

    println!("\n== {name} ==");
    print!("{}", syn.report.table());
    println!(
        "endpoint error {:.3e}, waypoint errors [{}], norm drift {:.3e}: {}",
        report.endpoint_error,
        report.waypoint_errors.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>().join(", "),
        report.max_norm_drift,
        if report.passed { "passed" } else { "FAILED" }
    );
    if !report.passed {
        values.failed.push(format!("{name}: endpoint error {:e}", report.endpoint_error));
    }

    for row in &syn.report.pulses {
        values.record(format!("{name}.pulse{}.duration", row.index), row.duration);
        values.record(format!("{name}.pulse{}.power", row.index), row.power);
    }
    values.record(format!("{name}.total_duration"), syn.report.total_duration);
    values.record(format!("{name}.cost"), syn.report.cost);
    for (i, x) in report.final_state.iter().enumerate() {
        values.record(format!("{name}.final.x{}", i + 1), *x);
    }

    if let Some(dir) = out {
        let stem = name.replace('.', "_");
        let file = ScheduleFile::new(&syn.schedule, cfg.circuit, algorithm, &cfg.transfer);
        output::write_json(&dir.join(format!("{stem}_schedule.json")), &file)?;
        output::write_json(&dir.join(format!("{stem}_report.json")), &report)?;
        let run = run_schedule(&syn.request.x0, &syn.network, &syn.schedule, sample_dt, Execution::default())?;
        output::write_trajectory(&dir.join(format!("{stem}_trajectory.csv")), &run.samples, syn.network.dimension())?;
    }
    Ok(syn)
}

/// Recompute every demo value, optionally writing artifacts to `out`.
pub fn compute(out: Option<&Path>, sample_dt: Option<f64>) -> Result<DemoValues, CliError> {
    let mut values = DemoValues::default();

    let third = parse_builtin(DEMO_THIRD, "demo_third.json")?;
    let mut network = None;
    for alg in [Algorithm::Piecewise, Algorithm::Bangbang1, Algorithm::Bangbang2] {
        let syn = run_case(&format!("third.{}", alg.name()), &third, alg, sample_dt, out, &mut values)?;
        network = Some(syn.network);
    }

    for (mode, text) in [("cc1", FOURTH_CC1), ("free", FOURTH_FREE), ("cc2", FOURTH_CC2)] {
        let cfg = parse_builtin(text, &format!("fourth_{mode}.json"))?;
        run_case(&format!("fourth.{mode}"), &cfg, Algorithm::Fourth, sample_dt, out, &mut values)?;
    }

    let Some(Network::Third(sys)) = network else {
        unreachable!("third-order demo network")
    };
    let costs = compare_costs(&sys, COST_SAMPLES, COST_SEED, Execution::default())?;
    println!("\n== pulse cost over {COST_SAMPLES} random targets (seed {COST_SEED}) ==");
    println!(
        "mean Σ√(a²+b²): piecewise {:.6}, euler bang-bang {:.6}; euler cheaper for {} of {}",
        costs.piecewise_mean, costs.euler_mean, costs.euler_cheaper, costs.samples
    );
    values.record("costs.piecewise_mean".into(), costs.piecewise_mean);
    values.record("costs.euler_mean".into(), costs.euler_mean);
    values.record("costs.euler_cheaper".into(), costs.euler_cheaper as f64);
    if let Some(dir) = out {
        output::write_json(&dir.join("costs.json"), &costs)?;
    }
    Ok(values)
}

pub fn run(out: Option<&Path>, expected: Option<&Path>, record: Option<&Path>, sample_dt: Option<f64>) -> Result<i32, CliError> {
    let expected = match expected {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("cannot read expectations {}: {e}", path.display())))?;
            serde_json::from_str::<Expected>(&text)
                .map_err(|e| CliError::usage(format!("expectations {}: {e}", path.display())))?
        }
        None => Expected::builtin(),
    };
    let computed = compute(out, sample_dt)?;

    if let Some(path) = record {
        let file = Expected {
            tolerance: expected.tolerance,
            values: computed.values,
        };
        output::write_json(path, &file)?;
        println!("\nrecorded {} values to {}", file.values.len(), path.display());
        return Ok(EXIT_OK);
    }

    let mut problems = computed.failed.clone();
    problems.extend(expected.diff(&computed.values));
    println!();
    if problems.is_empty() {
        println!(
            "demo: all {} values match the stored expectations (tolerance {:e})",
            computed.values.len(),
            expected.tolerance
        );
        Ok(EXIT_OK)
    } else {
        for p in &problems {
            println!("discrepancy: {p}");
        }
        Err(CliError::verification(format!("demo: {} discrepancies", problems.len())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expected(values: &[(&str, f64)]) -> Expected {
        Expected {
            tolerance: 1e-9,
            values: values.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    #[test]
    fn diff_reports_every_kind_of_discrepancy() {
        let e = expected(&[("a", 1.0), ("b", 2.0), ("c", 1e6)]);
        let got: BTreeMap<String, f64> = [("a", 1.0 + 1e-12), ("b", 2.1), ("c", 1e6 + 1e-4), ("d", 0.0)]
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect();
        let d = e.diff(&got);
        assert_eq!(d.len(), 2, "{d:?}");
        assert!(d[0].contains("`b`"));
        assert!(d[1].contains("unexpected value `d`"));
        let d = e.diff(&BTreeMap::new());
        assert_eq!(d.len(), 3);
        let nan: BTreeMap<String, f64> = [("a".to_string(), f64::NAN)].into_iter().collect();
        assert!(expected(&[("a", 1.0)]).diff(&nan).len() == 1);
    }

    #[test]
    fn builtin_expectations_parse() {
        let e = Expected::builtin();
        assert_eq!(e.tolerance, 1e-9);
    }
}
