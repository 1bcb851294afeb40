//! End-to-end synthesis of transfers, and the pulse-cost comparison.

use std::f64::consts::TAU;

use nalgebra::Vector4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::factor::{factorize_leg, fourth_order_factorize, Algorithm, FactorList, LegOptions};
use crate::lie::{log_su2, su2_of_quaternion, Su2Matrix, Su2Vector};
use crate::network::{FourthOrderSystem, ThirdOrderSystem};
use crate::schedule::{compile_fourth, compile_schedule, Schedule, ScheduleMode};
use crate::target::{fourth_order_targets, leg_targets, FourthOrderTarget, TransferRequest};

#[derive(Clone, Debug, PartialEq)]
pub struct ThirdSynthesis {
    /// Rotation parameters of each leg.
    pub targets: Vec<Su2Vector>,
    pub factors: Vec<FactorList>,
    pub schedule: Schedule,
}

/// Factor every leg with `algorithm` and compile the legs into one schedule.
///
/// `options` holds per-leg choices; missing entries use the defaults.
pub fn synthesize_third(
    req: &TransferRequest,
    sys: &ThirdOrderSystem,
    algorithm: Algorithm,
    options: &[LegOptions],
) -> Result<ThirdSynthesis> {
    if algorithm.dimension() != 3 {
        return Err(Error::AlgorithmDimension {
            algorithm: algorithm.name(),
            dimension: 3,
        });
    }
    let targets = leg_targets(req)?;
    let factors = targets
        .iter()
        .enumerate()
        .map(|(leg, v)| factorize_leg(*v, sys, algorithm, &options.get(leg).copied().unwrap_or_default()))
        .collect::<Result<Vec<_>>>()?;
    let mode = if algorithm.is_bang_bang() {
        ScheduleMode::Bangbang
    } else {
        ScheduleMode::Piecewise
    };
    let schedule = compile_schedule(&factors, sys, mode)?;
    Ok(ThirdSynthesis {
        targets,
        factors,
        schedule,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FourthSynthesis {
    pub target: FourthOrderTarget,
    pub p: FactorList,
    pub q: FactorList,
    pub schedule: Schedule,
}

/// Fourth-order transfers start at `(1,0,0,0)` and have no waypoints.
pub fn synthesize_fourth(req: &TransferRequest, sys: &FourthOrderSystem) -> Result<FourthSynthesis> {
    if req.dimension != 4 {
        return Err(Error::AlgorithmDimension {
            algorithm: Algorithm::Fourth.name(),
            dimension: req.dimension,
        });
    }
    let from_origin = req
        .x0
        .iter()
        .enumerate()
        .all(|(i, x)| (x - if i == 0 { 1.0 } else { 0.0 }).abs() < 1e-10);
    if !from_origin || !req.waypoints.is_empty() {
        let mut target = req.x0.clone();
        target.extend(req.waypoints.iter().flatten());
        target.extend(&req.xf);
        return Err(Error::UnsupportedTarget { target });
    }
    let target = fourth_order_targets(&req.xf, sys)?;
    let (p, q) = fourth_order_factorize(&target, sys)?;
    let schedule = compile_fourth(&p, &q)?;
    Ok(FourthSynthesis { target, p, q, schedule })
}

/// A Haar-random SU(2) element.
pub fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> Su2Matrix {
    let (u1, u2, u3): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
    let (r1, r2) = ((1.0 - u1).sqrt(), u1.sqrt());
    let q = Vector4::new(
        r1 * (TAU * u2).sin(),
        r1 * (TAU * u2).cos(),
        r2 * (TAU * u3).sin(),
        r2 * (TAU * u3).cos(),
    );
    su2_of_quaternion(&q).expect("unit quaternion")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostComparison {
    pub samples: usize,
    pub seed: u64,
    /// Σ √(a² + b²) per target under the piecewise algorithm.
    pub piecewise: Vec<f64>,
    /// Σ √(a² + b²) per target under the Euler bang-bang algorithm.
    pub euler: Vec<f64>,
    pub piecewise_mean: f64,
    pub euler_mean: f64,
    /// Targets where the Euler schedule is cheaper.
    pub euler_cheaper: usize,
}

/// Cumulative pulse cost of one target under both algorithms.
pub fn target_costs(target: &Su2Matrix, sys: &ThirdOrderSystem) -> Result<(f64, f64)> {
    let v = log_su2(target);
    let cost = |algorithm| -> Result<f64> {
        let list = factorize_leg(v, sys, algorithm, &LegOptions::default())?;
        let mode = if algorithm.is_bang_bang() {
            ScheduleMode::Bangbang
        } else {
            ScheduleMode::Piecewise
        };
        Ok(compile_schedule(&[list], sys, mode)?.cost())
    };
    Ok((cost(Algorithm::Piecewise)?, cost(Algorithm::Bangbang2)?))
}

/// Compare cumulative pulse cost over `samples` seeded random targets.
pub fn compare_costs(sys: &ThirdOrderSystem, samples: usize, seed: u64, exec: Execution) -> Result<CostComparison> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let targets: Vec<Su2Matrix> = (0..samples).map(|_| random_su2(&mut rng)).collect();
    let costs = exec
        .map(samples, |i| target_costs(&targets[i], sys))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let (piecewise, euler): (Vec<f64>, Vec<f64>) = costs.into_iter().unzip();
    let mean = |v: &[f64]| if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 };
    Ok(CostComparison {
        samples,
        seed,
        piecewise_mean: mean(&piecewise),
        euler_mean: mean(&euler),
        euler_cheaper: piecewise.iter().zip(&euler).filter(|(p, e)| e < p).count(),
        piecewise,
        euler,
    })
}
