//! Factor lists → time-ordered pulse schedules.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::{check_coefficients, Factor, FactorList, ANGLE_EPS};
use crate::network::{ThirdOrderSystem, RESONANCE_RTOL};

/// One constant-control segment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    pub duration: f64,
    pub control: f64,
}

impl Pulse {
    pub fn new(duration: f64, control: f64) -> Result<Self> {
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::InvalidDuration(duration));
        }
        if !control.is_finite() {
            return Err(Error::NonFinite { what: "pulse control" });
        }
        Ok(Pulse { duration, control })
    }

    /// `b = u·a`
    pub fn power(&self) -> f64 {
        self.control * self.duration
    }

    pub fn is_switch_position(&self) -> bool {
        self.control == 0.0 || self.control == 1.0
    }

    /// `√(a² + b²)`
    pub fn cost(&self) -> f64 {
        self.duration.hypot(self.power())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleMode {
    Piecewise,
    Bangbang,
}

/// Pulses in execution order: `pulses[0]` acts first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub dimension: usize,
    pub pulses: Vec<Pulse>,
    pub mode: ScheduleMode,
    /// Number of pulses in each leg of the transfer.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub legs: Vec<usize>,
}

impl Schedule {
    pub fn empty(dimension: usize, mode: ScheduleMode) -> Self {
        Schedule {
            dimension,
            pulses: Vec::new(),
            mode,
            legs: Vec::new(),
        }
    }

    pub fn total_duration(&self) -> f64 {
        self.pulses.iter().map(|p| p.duration).sum()
    }

    pub fn total_power(&self) -> f64 {
        self.pulses.iter().map(Pulse::power).sum()
    }

    /// Cumulative `Σ √(a_k² + b_k²)`.
    pub fn cost(&self) -> f64 {
        self.pulses.iter().map(Pulse::cost).sum()
    }

    pub fn is_bang_bang(&self) -> bool {
        self.pulses.iter().all(Pulse::is_switch_position)
    }

    /// Check durations and, in bang-bang mode, that every control is 0 or 1.
    pub fn validate(&self) -> Result<()> {
        for (index, p) in self.pulses.iter().enumerate() {
            Pulse::new(p.duration, p.control)?;
            if self.mode == ScheduleMode::Bangbang && !p.is_switch_position() {
                return Err(Error::NotBangBang {
                    index,
                    control: p.control,
                });
            }
        }
        if !self.legs.is_empty() && self.legs.iter().sum::<usize>() != self.pulses.len() {
            return Err(Error::DimensionMismatch {
                expected: self.pulses.len(),
                found: self.legs.iter().sum(),
            });
        }
        Ok(())
    }

    /// Pulse index ranges of each leg; a single leg when none are recorded.
    pub fn leg_ranges(&self) -> Vec<std::ops::Range<usize>> {
        if self.legs.is_empty() {
            return vec![0..self.pulses.len()];
        }
        let mut start = 0;
        self.legs
            .iter()
            .map(|n| {
                let r = start..start + n;
                start += n;
                r
            })
            .collect()
    }
}

/// `V(γ) = e^{aA + bB}` with `b = 2 Re γ / ω2`, `a = b + 2 Im γ / ω1`.
pub fn pulse_from_gamma(gamma: Complex64, sys: &ThirdOrderSystem) -> Result<Pulse> {
    if !(gamma.re.is_finite() && gamma.im.is_finite()) {
        return Err(Error::NonFinite { what: "γ" });
    }
    let power = 2.0 * gamma.re / sys.omega2;
    let duration = power + 2.0 * gamma.im / sys.omega1;
    if !(duration > 0.0) {
        return Err(Error::HalfPlane {
            gamma,
            slope: sys.omega1 / sys.omega2,
            duration,
        });
    }
    Ok(Pulse {
        duration,
        control: power / duration,
    })
}

/// Realize an axis rotation as a single pulse after whole-turn shifts.
///
/// `e^{θiσy}` is free evolution for `θ ∈ (−2π, 0]`; `e^{θiσx}` is a full-on
/// pulse for `θ ∈ [0, 2π)`. Angles that reduce to zero produce no pulse.
pub fn canonicalize_angle(factor: &Factor, sys: &ThirdOrderSystem) -> Result<Option<Pulse>> {
    let reduce = |theta: f64| -> Option<f64> {
        let r = theta.rem_euclid(TAU);
        (r >= ANGLE_EPS && TAU - r >= ANGLE_EPS).then_some(r)
    };
    match *factor {
        Factor::YRotation(theta) => Ok(reduce(-theta).map(|r| Pulse {
            duration: 2.0 * r / sys.omega1,
            control: 0.0,
        })),
        Factor::XRotation(theta) => Ok(reduce(theta).map(|r| Pulse {
            duration: 2.0 * r / sys.omega2,
            control: 1.0,
        })),
        _ => Err(Error::Unrealizable {
            index: 0,
            kind: factor.kind(),
        }),
    }
}

fn third_order_pulse(factor: &Factor, sys: &ThirdOrderSystem) -> Result<Option<Pulse>> {
    match *factor {
        Factor::VFactor(g) => pulse_from_gamma(g, sys).map(Some),
        Factor::XRotation(_) | Factor::YRotation(_) => canonicalize_angle(factor, sys),
        Factor::Mixed { drift, control, .. } => mixed_pulse(drift, control),
        Factor::ZRotation(_) => Err(Error::Unrealizable {
            index: 0,
            kind: factor.kind(),
        }),
    }
}

fn mixed_pulse(drift: f64, control: f64) -> Result<Option<Pulse>> {
    if drift == 0.0 && control == 0.0 {
        return Ok(None);
    }
    Pulse::new(drift, control / drift).map(Some)
}

fn finish(mut schedule: Schedule) -> Result<Schedule> {
    schedule.validate()?;
    if schedule.legs.len() == 1 {
        schedule.legs.clear();
    }
    Ok(schedule)
}

/// Compile one factor list per leg (legs in time order) into a third-order schedule.
pub fn compile_schedule(segments: &[FactorList], sys: &ThirdOrderSystem, mode: ScheduleMode) -> Result<Schedule> {
    let mut schedule = Schedule::empty(3, mode);
    let mut index = 0;
    for segment in segments {
        let before = schedule.pulses.len();
        for (k, factor) in segment.time_order().enumerate() {
            let pulse = third_order_pulse(factor, sys).map_err(|e| match e {
                Error::Unrealizable { kind, .. } => Error::Unrealizable { index: index + k, kind },
                other => other,
            })?;
            schedule.pulses.extend(pulse);
        }
        index += segment.len();
        schedule.legs.push(schedule.pulses.len() - before);
    }
    finish(schedule)
}

/// Compile matched fourth-order factor lists into a bang-bang schedule.
///
/// Controls within the resonance tolerance of 0 or 1 are snapped onto the switch positions.
pub fn compile_fourth(p: &FactorList, q: &FactorList) -> Result<Schedule> {
    check_coefficients(p, q)?;
    let mut schedule = Schedule::empty(4, ScheduleMode::Bangbang);
    for (index, factor) in p.time_order().enumerate() {
        let Factor::Mixed { drift, control, .. } = *factor else {
            return Err(Error::Unrealizable {
                index,
                kind: factor.kind(),
            });
        };
        if let Some(mut pulse) = mixed_pulse(drift, control)? {
            for target in [0.0, 1.0] {
                if (pulse.control - target).abs() <= RESONANCE_RTOL {
                    pulse.control = target;
                }
            }
            if !pulse.is_switch_position() {
                return Err(Error::NotBangBang {
                    index,
                    control: pulse.control,
                });
            }
            schedule.pulses.push(pulse);
        }
    }
    finish(schedule)
}
