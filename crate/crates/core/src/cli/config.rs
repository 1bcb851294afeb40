//! JSON run configuration and schedule files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::error::Result;
use crate::factor::{Algorithm, EulerAngles, LegOptions, ThetaPolicy};
use crate::lie::Su2Vector;
use crate::network::{build_fourth, build_third, FourthOrderCircuit, Network, ThirdOrderCircuit};
use crate::schedule::{Pulse, Schedule, ScheduleMode};
use crate::target::{TargetPolicy, TransferRequest};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CircuitConfig {
    Third(ThirdOrderCircuit),
    Fourth(FourthOrderCircuit),
}

impl CircuitConfig {
    pub fn dimension(&self) -> usize {
        match self {
            CircuitConfig::Third(_) => 3,
            CircuitConfig::Fourth(_) => 4,
        }
    }

    pub fn network(&self) -> Result<Network> {
        match self {
            CircuitConfig::Third(c) => build_third(c).map(Network::Third),
            CircuitConfig::Fourth(c) => build_fourth(c).map(Network::Fourth),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetConfig {
    #[default]
    Geodesic,
    Explicit([f64; 3]),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LegConfig {
    #[serde(default)]
    pub target: TargetConfig,
    /// Phase of the first V factor in piecewise z-rotation splits.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta1: Option<f64>,
    /// Explicit `[D, E, F]` for the Euler algorithm.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler: Option<[f64; 3]>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransferConfig {
    pub x0: Vec<f64>,
    pub xf: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub waypoints: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub legs: Vec<LegConfig>,
}

impl TransferConfig {
    pub fn request(&self, dimension: usize) -> Result<TransferRequest> {
        let policies = self
            .legs
            .iter()
            .map(|leg| match leg.target {
                TargetConfig::Geodesic => TargetPolicy::Geodesic,
                TargetConfig::Explicit(v) => TargetPolicy::Explicit(Su2Vector::from_array(v)),
            })
            .collect();
        TransferRequest::new(dimension, self.x0.clone(), self.xf.clone(), self.waypoints.clone(), policies)
    }

    pub fn leg_options(&self) -> Vec<LegOptions> {
        self.legs
            .iter()
            .map(|leg| LegOptions {
                theta: leg.theta1.map_or(ThetaPolicy::Centered, ThetaPolicy::Explicit),
                euler: leg.euler.map(|[d, e, f]| EulerAngles::new(d, e, f)),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub circuit: CircuitConfig,
    pub transfer: TransferConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algorithm: Option<Algorithm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> std::result::Result<RunConfig, CliError> {
        load_json(path, "config")
    }

    pub fn parse(text: &str, what: &str) -> std::result::Result<RunConfig, CliError> {
        parse_json(text, what)
    }

    /// Algorithm from the command line, else the config, else the dimension's default.
    pub fn algorithm(&self, flag: Option<Algorithm>) -> Algorithm {
        flag.or(self.algorithm).unwrap_or(match self.circuit {
            CircuitConfig::Third(_) => Algorithm::Bangbang2,
            CircuitConfig::Fourth(_) => Algorithm::Fourth,
        })
    }

    pub fn network(&self) -> std::result::Result<Network, CliError> {
        self.circuit.network().map_err(|e| CliError::usage(format!("circuit: {e}")))
    }

    pub fn request(&self) -> std::result::Result<TransferRequest, CliError> {
        self.transfer
            .request(self.circuit.dimension())
            .map_err(|e| CliError::usage(format!("transfer: {e}")))
    }
}

/// A schedule together with the circuit (and optionally the transfer) it was built for.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleFile {
    pub dimension: usize,
    pub pulses: Vec<Pulse>,
    pub mode: ScheduleMode,
    pub circuit: CircuitConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algorithm: Option<Algorithm>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub legs: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transfer: Option<TransferConfig>,
}

impl ScheduleFile {
    pub fn new(schedule: &Schedule, circuit: CircuitConfig, algorithm: Algorithm, transfer: &TransferConfig) -> Self {
        ScheduleFile {
            dimension: schedule.dimension,
            pulses: schedule.pulses.clone(),
            mode: schedule.mode,
            circuit,
            algorithm: Some(algorithm),
            legs: schedule.legs.clone(),
            transfer: Some(transfer.clone()),
        }
    }

    pub fn load(path: &Path) -> std::result::Result<ScheduleFile, CliError> {
        let file: ScheduleFile = load_json(path, "schedule")?;
        if file.dimension != file.circuit.dimension() {
            return Err(CliError::usage(format!(
                "schedule {}: dimension {} does not match the {}-dimensional circuit",
                path.display(),
                file.dimension,
                file.circuit.dimension()
            )));
        }
        file.schedule()
            .validate()
            .map_err(|e| CliError::usage(format!("schedule {}: {e}", path.display())))?;
        Ok(file)
    }

    pub fn schedule(&self) -> Schedule {
        Schedule {
            dimension: self.dimension,
            pulses: self.pulses.clone(),
            mode: self.mode,
            legs: self.legs.clone(),
        }
    }
}

fn parse_json<T: DeserializeOwned>(text: &str, what: &str) -> std::result::Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." || path.is_empty() {
            CliError::usage(format!("{what}: {inner}"))
        } else {
            CliError::usage(format!("{what}: field `{path}`: {inner}"))
        }
    })
}

fn load_json<T: DeserializeOwned>(path: &Path, what: &str) -> std::result::Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {what} {}: {e}", path.display())))?;
    parse_json(&text, &format!("{what} {}", path.display()))
}
