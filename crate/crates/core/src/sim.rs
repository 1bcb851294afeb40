//! Exact piecewise propagation, trajectory sampling and transfer verification.

use nalgebra::{Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::lie::{exp_so4, rodrigues, So3Matrix, So4Matrix};
use crate::network::Network;
use crate::schedule::{Pulse, Schedule};
use crate::target::TransferRequest;

/// Default pass threshold for endpoint, waypoint and norm checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Upper bound on the number of trajectory samples in one run.
pub const MAX_SAMPLES: usize = 10_000_000;

/// `e^{(Ã + B̃u)t}` for one constant control.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Propagator {
    So3(So3Matrix),
    So4(So4Matrix),
}

impl Propagator {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Propagator::So3(r) => r.apply(&Vector3::from_column_slice(x)).as_slice().to_vec(),
            Propagator::So4(r) => r.apply(&Vector4::from_column_slice(x)).as_slice().to_vec(),
        }
    }
}

/// Closed-form propagator for duration `t` at control `u`.
pub fn propagator(net: &Network, t: f64, u: f64) -> Propagator {
    let b = u * t;
    match net {
        Network::Third(sys) => Propagator::So3(rodrigues(sys.su2_generator(t, b))),
        Network::Fourth(sys) => Propagator::So4(exp_so4(&sys.drift.scale(t).add(&sys.control.scale(b)))),
    }
}

fn check_dimension(net: &Network, found: usize) -> Result<()> {
    if found != net.dimension() {
        return Err(Error::DimensionMismatch {
            expected: net.dimension(),
            found,
        });
    }
    Ok(())
}

pub fn propagate_pulse(x: &[f64], net: &Network, pulse: &Pulse) -> Result<Vec<f64>> {
    check_dimension(net, x.len())?;
    Ok(propagator(net, pulse.duration, pulse.control).apply(x))
}

/// `x0` followed by the state after each pulse.
pub fn boundary_states(x0: &[f64], net: &Network, schedule: &Schedule) -> Result<Vec<Vec<f64>>> {
    check_dimension(net, x0.len())?;
    check_dimension(net, schedule.dimension)?;
    let mut states = Vec::with_capacity(schedule.pulses.len() + 1);
    states.push(x0.to_vec());
    for pulse in &schedule.pulses {
        let next = propagator(net, pulse.duration, pulse.control).apply(states.last().expect("non-empty"));
        states.push(next);
    }
    Ok(states)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub x: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Run {
    pub final_state: Vec<f64>,
    /// `x0` and the state after every pulse.
    pub boundaries: Vec<Vec<f64>>,
    pub samples: Vec<Sample>,
}

/// Propagate `x0` through `schedule`, sampling each pulse every `sample_dt`
/// seconds (default: total duration / 1000). Pulse ends are always sampled.
pub fn run_schedule(
    x0: &[f64],
    net: &Network,
    schedule: &Schedule,
    sample_dt: Option<f64>,
    exec: Execution,
) -> Result<Run> {
    let boundaries = boundary_states(x0, net, schedule)?;
    let total = schedule.total_duration();
    let dt = sample_dt.unwrap_or(total / 1000.0);
    if sample_dt.is_some() && !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidDuration(dt));
    }

    let mut jobs = Vec::new();
    let mut start = 0.0;
    for (k, pulse) in schedule.pulses.iter().enumerate() {
        let steps = if dt > 0.0 { (pulse.duration / dt).ceil().max(1.0) } else { 1.0 };
        if jobs.len() as f64 + steps > MAX_SAMPLES as f64 {
            return Err(Error::InvalidDuration(dt));
        }
        let steps = steps as usize;
        jobs.extend((1..=steps).map(|i| (k, start, pulse.duration * i as f64 / steps as f64, i == steps)));
        start += pulse.duration;
    }

    let mut samples = Vec::with_capacity(jobs.len() + 1);
    samples.push(Sample { t: 0.0, x: x0.to_vec() });
    samples.extend(exec.map(jobs.len(), |j| {
        let (k, t0, offset, last) = jobs[j];
        let x = if last {
            boundaries[k + 1].clone()
        } else {
            let pulse = &schedule.pulses[k];
            propagator(net, offset, pulse.control).apply(&boundaries[k])
        };
        Sample { t: t0 + offset, x }
    }));
    Ok(Run {
        final_state: boundaries.last().expect("non-empty").clone(),
        boundaries,
        samples,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    pub endpoint_error: f64,
    pub waypoint_errors: Vec<f64>,
    pub max_norm_drift: f64,
    pub bang_bang: bool,
    pub total_duration: f64,
    pub final_state: Vec<f64>,
    pub tolerance: f64,
    pub passed: bool,
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Simulate `schedule` and compare its leg boundaries with the request.
pub fn verify_transfer(req: &TransferRequest, net: &Network, schedule: &Schedule, tolerance: f64) -> Result<TransferReport> {
    if req.dimension != net.dimension() || schedule.dimension != net.dimension() {
        return Err(Error::DimensionMismatch {
            expected: net.dimension(),
            found: if req.dimension != net.dimension() {
                req.dimension
            } else {
                schedule.dimension
            },
        });
    }
    let ranges = schedule.leg_ranges();
    if req.legs() > 1 && ranges.len() != req.legs() {
        return Err(Error::DimensionMismatch {
            expected: req.legs(),
            found: ranges.len(),
        });
    }
    let states = boundary_states(&req.x0, net, schedule)?;
    let x0_norm = norm(&req.x0);
    let max_norm_drift = states.iter().map(|x| (norm(x) - x0_norm).abs()).fold(0.0, f64::max);
    let final_state = states.last().expect("non-empty").clone();
    let endpoint_error = distance(&final_state, &req.xf);
    let waypoint_errors: Vec<f64> = req
        .waypoints
        .iter()
        .zip(&ranges)
        .map(|(w, r)| distance(&states[r.end], w))
        .collect();
    let passed = endpoint_error < tolerance
        && max_norm_drift < tolerance
        && waypoint_errors.iter().all(|e| *e < tolerance);
    Ok(TransferReport {
        endpoint_error,
        waypoint_errors,
        max_norm_drift,
        bang_bang: schedule.is_bang_bang(),
        total_duration: schedule.total_duration(),
        final_state,
        tolerance,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{build_third, ThirdOrderCircuit};
    use crate::schedule::ScheduleMode;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn demo() -> Network {
        Network::Third(build_third(&ThirdOrderCircuit::new(0.1, 0.2, 0.5).unwrap()).unwrap())
    }

    #[test]
    fn free_evolution_reaches_first_waypoint() {
        let pulse = Pulse::new(PI / (8.0 * 5f64.sqrt()), 0.0).unwrap();
        let x = propagate_pulse(&[1.0, 0.0, 0.0], &demo(), &pulse).unwrap();
        let want = [FRAC_1_SQRT_2, 0.0, -FRAC_1_SQRT_2];
        assert!(distance(&x, &want) < 1e-15);
    }

    #[test]
    fn zero_duration_is_identity() {
        let x = [0.6, 0.0, 0.8];
        let y = propagator(&demo(), 0.0, 1.0).apply(&x);
        assert_eq!(y, x.to_vec());
    }

    #[test]
    fn empty_schedule_stays_put() {
        let s = Schedule::empty(3, ScheduleMode::Bangbang);
        let run = run_schedule(&[0.0, 1.0, 0.0], &demo(), &s, None, Execution::default()).unwrap();
        assert_eq!(run.final_state, vec![0.0, 1.0, 0.0]);
        assert_eq!(run.samples.len(), 1);
    }

    #[test]
    fn samples_end_on_pulse_boundaries() {
        let s = Schedule {
            dimension: 3,
            pulses: vec![Pulse::new(0.3, 0.0).unwrap(), Pulse::new(0.25, 1.0).unwrap()],
            mode: ScheduleMode::Bangbang,
            legs: vec![],
        };
        let run = run_schedule(&[1.0, 0.0, 0.0], &demo(), &s, Some(0.1), Execution::Sequential).unwrap();
        assert_eq!(run.samples.len(), 1 + 3 + 3);
        assert_eq!(run.samples[3].x, run.boundaries[1]);
        assert!((run.samples.last().unwrap().t - 0.55).abs() < 1e-15);
        let par = run_schedule(&[1.0, 0.0, 0.0], &demo(), &s, Some(0.1), Execution::Parallel).unwrap();
        assert_eq!(run, par);
        assert!(run_schedule(&[1.0, 0.0, 0.0], &demo(), &s, Some(0.0), Execution::Sequential).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let s = Schedule::empty(3, ScheduleMode::Bangbang);
        assert!(matches!(
            boundary_states(&[1.0, 0.0, 0.0, 0.0], &demo(), &s),
            Err(Error::DimensionMismatch { expected: 3, found: 4 })
        ));
    }

    #[test]
    fn tampered_duration_fails_verification() {
        let req = TransferRequest::new(3, vec![1.0, 0.0, 0.0], vec![FRAC_1_SQRT_2, 0.0, -FRAC_1_SQRT_2], vec![], vec![]).unwrap();
        let mut s = Schedule {
            dimension: 3,
            pulses: vec![Pulse::new(PI / (8.0 * 5f64.sqrt()), 0.0).unwrap()],
            mode: ScheduleMode::Bangbang,
            legs: vec![],
        };
        let report = verify_transfer(&req, &demo(), &s, DEFAULT_TOLERANCE).unwrap();
        assert!(report.passed && report.bang_bang);
        s.pulses[0].duration *= 1.001;
        let report = verify_transfer(&req, &demo(), &s, DEFAULT_TOLERANCE).unwrap();
        assert!(!report.passed);
        assert!(report.endpoint_error > DEFAULT_TOLERANCE);
    }
}
