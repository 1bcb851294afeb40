//! State transfers → group-element targets.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{
    ck_to_matrix, exp_su2, phi_tilde, rodrigues, so3_log, su2_of_quaternion, CayleyKlein, So3Matrix,
    Su2Matrix, Su2Vector,
};
use crate::network::{resonance_k, FourthOrderSystem, ResonanceMode};

/// Unit-norm tolerance for requested states.
pub const UNIT_TOL: f64 = 1e-10;

/// Accepted residual of a target's action on its start point.
pub const MAPPING_TOL: f64 = 1e-10;

/// How the rotation for one leg is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetPolicy {
    /// Minimal-angle rotation about `x0 × xf`.
    #[default]
    Geodesic,
    /// A user-supplied `(a, b, c)`, checked against the leg's endpoints.
    Explicit(Su2Vector),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransferRequest {
    pub dimension: usize,
    pub x0: Vec<f64>,
    pub xf: Vec<f64>,
    pub waypoints: Vec<Vec<f64>>,
    /// One policy per leg, or empty for geodesic everywhere.
    pub policies: Vec<TargetPolicy>,
}

impl TransferRequest {
    pub fn new(
        dimension: usize,
        x0: Vec<f64>,
        xf: Vec<f64>,
        waypoints: Vec<Vec<f64>>,
        policies: Vec<TargetPolicy>,
    ) -> Result<Self> {
        let req = TransferRequest {
            dimension,
            x0,
            xf,
            waypoints,
            policies,
        };
        req.validate()?;
        Ok(req)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension != 3 && self.dimension != 4 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                found: self.dimension,
            });
        }
        let points = self.points();
        for (i, p) in points.iter().enumerate() {
            if p.len() != self.dimension {
                return Err(Error::DimensionMismatch {
                    expected: self.dimension,
                    found: p.len(),
                });
            }
            if !p.iter().all(|x| x.is_finite()) {
                return Err(Error::NonFinite { what: "transfer point" });
            }
            let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > UNIT_TOL {
                return Err(Error::NotUnit {
                    what: point_name(i, points.len()),
                    norm,
                });
            }
        }
        if points.len() > 2 {
            for i in 1..points.len() {
                let gap = points[i]
                    .iter()
                    .zip(points[i - 1])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                if gap <= UNIT_TOL {
                    return Err(Error::RepeatedWaypoint { index: i });
                }
            }
        }
        if !self.policies.is_empty() && self.policies.len() != self.legs() {
            return Err(Error::DimensionMismatch {
                expected: self.legs(),
                found: self.policies.len(),
            });
        }
        Ok(())
    }

    /// `x0`, the waypoints, then `xf`.
    pub fn points(&self) -> Vec<&[f64]> {
        let mut pts = Vec::with_capacity(self.waypoints.len() + 2);
        pts.push(self.x0.as_slice());
        pts.extend(self.waypoints.iter().map(Vec::as_slice));
        pts.push(self.xf.as_slice());
        pts
    }

    pub fn legs(&self) -> usize {
        self.waypoints.len() + 1
    }

    pub fn policy(&self, leg: usize) -> TargetPolicy {
        self.policies.get(leg).copied().unwrap_or_default()
    }
}

fn point_name(i: usize, n: usize) -> String {
    if i == 0 {
        "x0".into()
    } else if i + 1 == n {
        "xf".into()
    } else {
        format!("waypoint {i}")
    }
}

fn vec3(x: &[f64]) -> Result<Vector3<f64>> {
    match x {
        [a, b, c] => Ok(Vector3::new(*a, *b, *c)),
        _ => Err(Error::DimensionMismatch {
            expected: 3,
            found: x.len(),
        }),
    }
}

/// An axis orthogonal to `x0`, used for half-turns.
fn antipodal_axis(x0: &Vector3<f64>) -> Vector3<f64> {
    if let Some(i) = (0..3).find(|&i| x0[i].abs() < 1e-12) {
        return Vector3::ith(i, 1.0);
    }
    let i = (0..3).min_by(|&a, &b| x0[a].abs().total_cmp(&x0[b].abs())).unwrap_or(0);
    x0.cross(&Vector3::ith(i, 1.0)).normalize()
}

/// Rotation parameters `(a, b, c)` and matrix carrying `x0` to `xf`.
///
/// An explicit target that misses `xf` is reported as [`Error::TargetMismatch`] with `leg = 0`.
pub fn so3_target(x0: &[f64], xf: &[f64], policy: TargetPolicy) -> Result<(Su2Vector, So3Matrix)> {
    let (p, q) = (vec3(x0)?, vec3(xf)?);
    let v = match policy {
        TargetPolicy::Explicit(v) => {
            if !v.is_finite() {
                return Err(Error::NonFinite { what: "explicit target" });
            }
            v
        }
        TargetPolicy::Geodesic => {
            let cross = p.cross(&q);
            let sin = cross.norm();
            let cos = p.dot(&q);
            if sin < 1e-12 && cos > 0.0 {
                Su2Vector::ZERO
            } else if sin < 1e-12 {
                let axis = antipodal_axis(&p) * PI;
                Su2Vector::new(axis.x, axis.y, axis.z)
            } else {
                let axis = cross / sin * sin.atan2(cos);
                Su2Vector::new(axis.x, axis.y, axis.z)
            }
        }
    };
    let r = rodrigues(v);
    let residual = (r.apply(&p) - q).amax();
    if residual >= MAPPING_TOL {
        return Err(Error::TargetMismatch { leg: 0, residual });
    }
    Ok((v, r))
}

/// Per-leg rotation parameters for a third-order request, in time order.
pub fn leg_targets(req: &TransferRequest) -> Result<Vec<Su2Vector>> {
    if req.dimension != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: req.dimension,
        });
    }
    let points = req.points();
    points
        .windows(2)
        .enumerate()
        .map(|(leg, w)| match so3_target(w[0], w[1], req.policy(leg)) {
            Err(Error::TargetMismatch { residual, .. }) => Err(Error::TargetMismatch { leg, residual }),
            other => other.map(|(v, _)| v),
        })
        .collect()
}

/// The two SU(2) elements over a rotation.
pub fn su2_preimages(s: &So3Matrix) -> (Su2Matrix, Su2Matrix) {
    let t = exp_su2(so3_log(s));
    (t, -t)
}

/// Which printed fourth-order construction a target uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FourthMode {
    Cc1,
    Cc2,
    Free,
}

impl FourthMode {
    pub fn name(self) -> &'static str {
        match self {
            FourthMode::Cc1 => "cc1",
            FourthMode::Cc2 => "cc2",
            FourthMode::Free => "free",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourthOrderTarget {
    pub p: CayleyKlein,
    pub q: CayleyKlein,
    pub mode: FourthMode,
    pub k: Option<u32>,
    pub y: [f64; 4],
}

impl FourthOrderTarget {
    pub fn p_matrix(&self) -> Su2Matrix {
        ck_to_matrix(&self.p)
    }

    pub fn q_matrix(&self) -> Su2Matrix {
        ck_to_matrix(&self.q)
    }

    /// `‖φ̃(p, q)·e1 − y‖∞`.
    pub fn residual(&self) -> f64 {
        let image = phi_tilde(&self.p_matrix(), &self.q_matrix()).apply(&Vector4::x());
        (image - Vector4::from(self.y)).amax()
    }
}

fn is_axis(y: &[f64], i: usize) -> bool {
    y.iter()
        .enumerate()
        .all(|(j, v)| (v - if i == j { 1.0 } else { 0.0 }).abs() < UNIT_TOL)
}

fn require(sys: &FourthOrderSystem, mode: ResonanceMode) -> Result<u32> {
    let res = resonance_k(&sys.circuit, mode);
    res.k().ok_or_else(|| Error::ResonanceUnmet {
        condition: mode.name(),
        detail: res.describe(mode),
    })
}

/// The `(p, q)` pair steering `(1,0,0,0)` to `y` for the three supported `y`.
pub fn fourth_order_targets(y: &[f64], sys: &FourthOrderSystem) -> Result<FourthOrderTarget> {
    if y.len() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: y.len(),
        });
    }
    let target = if is_axis(y, 2) {
        let k = require(sys, ResonanceMode::Cc1)?;
        let kf = k as f64;
        let d = 4.0 * kf * (kf + 1.0);
        let odd = 2.0 * kf + 1.0;
        let p = CayleyKlein::new(PI / 4.0, odd * odd * PI / d, -odd * PI / d);
        FourthOrderTarget {
            p,
            q: CayleyKlein::new(p.alpha - FRAC_PI_2, -p.mu, -p.zeta),
            mode: FourthMode::Cc1,
            k: Some(k),
            y: [0.0, 0.0, 1.0, 0.0],
        }
    } else if is_axis(y, 3) {
        let k = require(sys, ResonanceMode::Cc2)?;
        let kf = k as f64;
        let d = 4.0 * kf * (kf + 1.0);
        let odd = 2.0 * kf + 1.0;
        let p = CayleyKlein::new(PI / 4.0, odd * (5.0 * kf + 2.0) * PI / d, odd * (kf - 2.0) * PI / d);
        FourthOrderTarget {
            p,
            q: CayleyKlein::new(p.alpha - FRAC_PI_2, FRAC_PI_2 - p.mu, 2.5 * PI - p.zeta),
            mode: FourthMode::Cc2,
            k: Some(k),
            y: [0.0, 0.0, 0.0, 1.0],
        }
    } else if is_axis(y, 1) {
        // L/(ν+β) = (L − π/2)/(β − ν)
        let l = PI * (sys.nu + sys.beta) / (4.0 * sys.nu);
        FourthOrderTarget {
            p: CayleyKlein::new(0.0, l, 0.0),
            q: CayleyKlein::new(0.0, l - FRAC_PI_2, 0.0),
            mode: FourthMode::Free,
            k: None,
            y: [0.0, 1.0, 0.0, 0.0],
        }
    } else {
        return Err(Error::UnsupportedTarget { target: y.to_vec() });
    };
    let residual = target.residual();
    if residual >= MAPPING_TOL {
        return Err(Error::Reconstruction { residual });
    }
    Ok(target)
}

/// The SU(2) element standing for the unit quaternion `y`.
pub fn quaternion_target(y: &[f64]) -> Result<Su2Matrix> {
    match y {
        [a, b, c, d] => su2_of_quaternion(&Vector4::new(*a, *b, *c, *d)),
        _ => Err(Error::DimensionMismatch {
            expected: 4,
            found: y.len(),
        }),
    }
}
