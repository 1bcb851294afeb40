//! SU(2) targets → ordered lists of realizable factors.
//!
//! A [`FactorList`] is a written matrix product `M1 M2 ⋯ MQ`; acting on a
//! state, `MQ` is applied first.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{cayley_klein_of, ck_to_matrix, exp_su2, wrap_two_pi, CayleyKlein, Su2Matrix, Su2Vector};
use crate::network::{FourthOrderSystem, ThirdOrderSystem};
use crate::target::{FourthMode, FourthOrderTarget};

/// Reconstruction tolerance for every factorization.
pub const RECONSTRUCTION_TOL: f64 = 1e-10;

/// Rotation angles (and α) below this are treated as zero.
pub const ANGLE_EPS: f64 = 1e-14;

/// Relative tolerance when matching the two fourth-order factor lists.
pub const COEFFICIENT_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Factor {
    /// `e^{iLσz}`
    ZRotation(f64),
    /// `V(γ) = exp[(−Im γ) iσy + (Re γ) iσx]`
    VFactor(Complex64),
    /// `e^{iθσx}`
    XRotation(f64),
    /// `e^{iθσy}`
    YRotation(f64),
    /// `exp(drift·A + control·B)` for a fixed pair of generators.
    Mixed { drift: f64, control: f64, generator: Su2Vector },
}

impl Factor {
    pub fn generator(&self) -> Su2Vector {
        match *self {
            Factor::ZRotation(l) => Su2Vector::new(0.0, 0.0, -2.0 * l),
            Factor::VFactor(g) => Su2Vector::new(-2.0 * g.re, 2.0 * g.im, 0.0),
            Factor::XRotation(t) => Su2Vector::new(-2.0 * t, 0.0, 0.0),
            Factor::YRotation(t) => Su2Vector::new(0.0, -2.0 * t, 0.0),
            Factor::Mixed { generator, .. } => generator,
        }
    }

    pub fn matrix(&self) -> Su2Matrix {
        exp_su2(self.generator())
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Factor::ZRotation(_) => "z-rotation",
            Factor::VFactor(_) => "V factor",
            Factor::XRotation(_) => "x-rotation",
            Factor::YRotation(_) => "y-rotation",
            Factor::Mixed { .. } => "mixed",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FactorList {
    pub factors: Vec<Factor>,
}

impl FactorList {
    pub fn new(factors: Vec<Factor>) -> Self {
        FactorList { factors }
    }

    /// The written product, left to right.
    pub fn matrix(&self) -> Su2Matrix {
        self.factors
            .iter()
            .fold(Su2Matrix::identity(), |acc, f| acc * f.matrix())
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Factors in the order they act on a state.
    pub fn time_order(&self) -> impl Iterator<Item = &Factor> {
        self.factors.iter().rev()
    }
}

fn check(list: FactorList, target: &Su2Matrix) -> Result<FactorList> {
    let residual = list.matrix().distance(target);
    if residual >= RECONSTRUCTION_TOL {
        return Err(Error::Reconstruction { residual });
    }
    Ok(list)
}

/// `T = e^{ipσz} V(γ) e^{i(ζ−p)σz}` with `p = (ζ+μ−π)/2`, making `V(γ) = V(iα)` a free evolution.
pub fn zvz_split(ck: &CayleyKlein) -> [Factor; 3] {
    let p = 0.5 * (ck.zeta + ck.mu - PI);
    [
        Factor::ZRotation(p),
        Factor::VFactor(Complex64::new(0.0, ck.alpha)),
        Factor::ZRotation(ck.zeta - p),
    ]
}

/// Choice of θ1 in the two-factor split of a z-rotation.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum ThetaPolicy {
    /// Centre `(θ1+θ2)/2` on the middle of the admissible arc.
    #[default]
    Centered,
    Explicit(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoV {
    pub theta1: f64,
    pub theta2: f64,
    pub gamma1: Complex64,
    pub gamma2: Complex64,
}

impl TwoV {
    pub fn factors(&self) -> [Factor; 2] {
        [Factor::VFactor(self.gamma1), Factor::VFactor(self.gamma2)]
    }
}

/// The open arc `(−δ, π−δ)`, `δ = arctan(ω1/ω2)`, of phases whose V factors have positive duration.
pub fn admissible_arc(sys: &ThirdOrderSystem) -> (f64, f64) {
    let delta = sys.omega1.atan2(sys.omega2);
    (-delta, PI - delta)
}

/// `e^{iLσz} = V(γ1) V(γ2)` with `γk = (π/2) e^{iθk}` and `θ1 − θ2 = L − π`.
pub fn two_v_decomposition(l: f64, sys: &ThirdOrderSystem, policy: ThetaPolicy) -> Result<TwoV> {
    let reduced = wrap_two_pi(l);
    if !l.is_finite() || reduced < ANGLE_EPS || TAU - reduced < ANGLE_EPS {
        return Err(Error::ZeroAngle);
    }
    let diff = reduced - PI;
    let (lo, hi) = admissible_arc(sys);
    let into_arc = |t: f64| lo + (t - lo).rem_euclid(TAU);
    let (theta1, theta2) = match policy {
        ThetaPolicy::Centered => {
            let centre = 0.5 * (lo + hi);
            (centre + 0.5 * diff, centre - 0.5 * diff)
        }
        ThetaPolicy::Explicit(t1) => {
            if !t1.is_finite() {
                return Err(Error::NonFinite { what: "θ1" });
            }
            let t1 = into_arc(t1);
            (t1, into_arc(t1 - diff))
        }
    };
    for theta in [theta1, theta2] {
        if !(lo < theta && theta < hi) {
            return Err(Error::PhaseOutsideArc { theta, lo, hi });
        }
    }
    Ok(TwoV {
        theta1,
        theta2,
        gamma1: Complex64::from_polar(FRAC_PI_2, theta1),
        gamma2: Complex64::from_polar(FRAC_PI_2, theta2),
    })
}

/// `e^{iLσz} = e^{−i(7π/4)σy} e^{iLσx} e^{−i(π/4)σy}`.
pub fn bangbang_z(l: f64) -> [Factor; 3] {
    [
        Factor::YRotation(-7.0 * FRAC_PI_4),
        Factor::XRotation(l),
        Factor::YRotation(-FRAC_PI_4),
    ]
}

/// Angles of `T = e^{iDσx} e^{iEσy} e^{iFσx}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EulerAngles {
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

impl EulerAngles {
    pub fn new(d: f64, e: f64, f: f64) -> Self {
        EulerAngles { d, e, f }
    }

    pub fn factors(&self) -> [Factor; 3] {
        [
            Factor::XRotation(self.d),
            Factor::YRotation(self.e),
            Factor::XRotation(self.f),
        ]
    }

    pub fn matrix(&self) -> Su2Matrix {
        FactorList::new(self.factors().to_vec()).matrix()
    }
}

/// Which element of `{+T, −T}` an Euler triple reproduces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelSign {
    Plus,
    Minus,
}

/// Solve for `(D, E, F)` by enumerating the sign choices, first match wins.
pub fn euler_xyx(ck: &CayleyKlein) -> Result<EulerAngles> {
    let target = ck_to_matrix(ck);
    // T = w I + i(x σx + y σy + z σz)
    let u11 = target.entry(0, 0);
    let u12 = target.entry(0, 1);
    let (w, z, y, x) = (u11.re, u11.im, u12.re, u12.im);
    // cos E cos(D+F) = w, cos E sin(D+F) = x, sin E cos(D−F) = y, −sin E sin(D−F) = z
    let r = (w * w + x * x).sqrt().min(1.0);
    let base = r.acos();
    let mut best = f64::INFINITY;
    for e in [base, -base, PI - base, base - PI] {
        let (se, ce) = e.sin_cos();
        let sum = if ce.abs() < 1e-15 { 0.0 } else { (x / ce).atan2(w / ce) };
        let diff = if se.abs() < 1e-15 { 0.0 } else { (-z / se).atan2(y / se) };
        let angles = EulerAngles::new(0.5 * (sum + diff), e, 0.5 * (sum - diff));
        let residual = angles.matrix().distance(&target);
        if residual < RECONSTRUCTION_TOL {
            return Ok(angles);
        }
        best = best.min(residual);
    }
    Err(Error::Reconstruction { residual: best })
}

/// Accept a user-supplied Euler triple if it reproduces `±target`.
pub fn check_euler(angles: &EulerAngles, target: &Su2Matrix) -> Result<KernelSign> {
    let m = angles.matrix();
    let plus = m.distance(target);
    if plus < RECONSTRUCTION_TOL {
        return Ok(KernelSign::Plus);
    }
    let minus = m.distance(&-*target);
    if minus < RECONSTRUCTION_TOL {
        return Ok(KernelSign::Minus);
    }
    Err(Error::Reconstruction {
        residual: plus.min(minus),
    })
}

/// Third-order synthesis algorithms, and the fourth-order construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Piecewise-constant controls from `V(γ)` factors.
    Piecewise,
    /// Bang-bang controls from the z-V-z split with each z-rotation as y-x-y.
    Bangbang1,
    /// Bang-bang controls from the x-y-x Euler factorization.
    Bangbang2,
    Fourth,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Piecewise,
        Algorithm::Bangbang1,
        Algorithm::Bangbang2,
        Algorithm::Fourth,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Piecewise => "piecewise",
            Algorithm::Bangbang1 => "bangbang1",
            Algorithm::Bangbang2 => "bangbang2",
            Algorithm::Fourth => "fourth",
        }
    }

    pub fn parse(name: &str) -> Option<Algorithm> {
        Algorithm::ALL.into_iter().find(|a| a.name() == name)
    }

    pub fn dimension(self) -> usize {
        if self == Algorithm::Fourth {
            4
        } else {
            3
        }
    }

    pub fn is_bang_bang(self) -> bool {
        self != Algorithm::Piecewise
    }
}

/// Per-leg free choices of the third-order algorithms.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LegOptions {
    pub theta: ThetaPolicy,
    /// Explicit Euler triple for [`Algorithm::Bangbang2`], accepted up to sign.
    pub euler: Option<EulerAngles>,
}

fn negligible(x: f64, scale: f64) -> bool {
    x.abs() <= ANGLE_EPS * scale.max(1.0)
}

/// Duration a V factor would take on this system.
fn v_duration(g: Complex64, sys: &ThirdOrderSystem) -> f64 {
    2.0 * g.re / sys.omega2 + 2.0 * g.im / sys.omega1
}

fn split_z(l: f64, sys: &ThirdOrderSystem, algorithm: Algorithm, opts: &LegOptions, out: &mut Vec<Factor>) -> Result<()> {
    let reduced = wrap_two_pi(l);
    if reduced < ANGLE_EPS || TAU - reduced < ANGLE_EPS {
        return Ok(());
    }
    match algorithm {
        Algorithm::Piecewise => out.extend(two_v_decomposition(l, sys, opts.theta)?.factors()),
        _ => out.extend(bangbang_z(l)),
    }
    Ok(())
}

/// Factor the SU(2) element `exp_su2(v)` of one third-order leg.
///
/// Pure y- and x-axis targets become a single free-evolution or full-on
/// factor under every algorithm; under [`Algorithm::Piecewise`] any target
/// in the x-y plane is a single V factor.
pub fn factorize_leg(v: Su2Vector, sys: &ThirdOrderSystem, algorithm: Algorithm, opts: &LegOptions) -> Result<FactorList> {
    if !v.is_finite() {
        return Err(Error::NonFinite { what: "leg target" });
    }
    if algorithm == Algorithm::Fourth {
        return Err(Error::AlgorithmDimension {
            algorithm: algorithm.name(),
            dimension: 3,
        });
    }
    let target = exp_su2(v);
    let scale = v.norm();
    if scale == 0.0 {
        return Ok(FactorList::default());
    }

    if algorithm == Algorithm::Bangbang2 {
        if let Some(angles) = opts.euler {
            check_euler(&angles, &target)?;
            return Ok(FactorList::new(angles.factors().to_vec()));
        }
    }
    if negligible(v.a, scale) && negligible(v.c, scale) {
        return check(FactorList::new(vec![Factor::YRotation(-0.5 * v.b)]), &target);
    }
    if negligible(v.b, scale) && negligible(v.c, scale) {
        return check(FactorList::new(vec![Factor::XRotation(-0.5 * v.a)]), &target);
    }
    if algorithm == Algorithm::Piecewise && negligible(v.c, scale) {
        let g = Complex64::new(-0.5 * v.a, 0.5 * v.b);
        if v_duration(g, sys) > 0.0 {
            return check(FactorList::new(vec![Factor::VFactor(g)]), &target);
        }
        let flipped = g * ((g.norm() - TAU) / g.norm());
        if v_duration(flipped, sys) > 0.0 {
            return check(FactorList::new(vec![Factor::VFactor(flipped)]), &target);
        }
    }

    let ck = cayley_klein_of(&target);
    let mut factors = Vec::new();
    match algorithm {
        Algorithm::Bangbang2 => factors.extend(euler_xyx(&ck)?.factors()),
        _ if ck.alpha < ANGLE_EPS => split_z(ck.zeta, sys, algorithm, opts, &mut factors)?,
        _ => {
            let [z1, v_mid, z2] = zvz_split(&ck);
            let (Factor::ZRotation(p), Factor::ZRotation(rest)) = (z1, z2) else {
                unreachable!("zvz_split returns z-rotations at both ends")
            };
            split_z(p, sys, algorithm, opts, &mut factors)?;
            if algorithm == Algorithm::Piecewise {
                factors.push(v_mid);
            } else {
                factors.push(Factor::YRotation(-ck.alpha));
            }
            split_z(rest, sys, algorithm, opts, &mut factors)?;
        }
    }
    check(FactorList::new(factors), &target)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= COEFFICIENT_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Gate requiring both fourth-order lists to share durations and powers factor by factor.
pub fn check_coefficients(p: &FactorList, q: &FactorList) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            found: q.len(),
        });
    }
    for (index, (fp, fq)) in p.factors.iter().zip(&q.factors).enumerate() {
        let (
            Factor::Mixed {
                drift: pd,
                control: pc,
                ..
            },
            Factor::Mixed {
                drift: qd,
                control: qc,
                ..
            },
        ) = (*fp, *fq)
        else {
            return Err(Error::Unrealizable {
                index,
                kind: if matches!(fp, Factor::Mixed { .. }) { fq.kind() } else { fp.kind() },
            });
        };
        if !close(pd, qd) || !close(pc, qc) {
            return Err(Error::CoefficientMismatch {
                index,
                p_drift: pd,
                p_control: pc,
                q_drift: qd,
                q_control: qc,
            });
        }
    }
    Ok(())
}

fn mixed(drift: f64, control: f64, a: Su2Vector, b: Su2Vector) -> Factor {
    Factor::Mixed {
        drift,
        control,
        generator: a * drift + b * control,
    }
}

/// Three-factor lists `exp(d1 A) exp(d2 A + c2 B) exp(d3 A)` for both subsystems,
/// or a single drift factor for the free-evolution target.
pub fn fourth_order_factorize(target: &FourthOrderTarget, sys: &FourthOrderSystem) -> Result<(FactorList, FactorList)> {
    let (s, t) = (sys.nu + sys.beta, sys.beta - sys.nu);
    let (g, h) = (sys.delta + sys.gamma, sys.delta - sys.gamma);
    let root2 = std::f64::consts::SQRT_2;
    let three = |a: Su2Vector, b: Su2Vector, d: [f64; 3], c: f64| {
        FactorList::new(vec![mixed(d[0], 0.0, a, b), mixed(d[1], c, a, b), mixed(d[2], 0.0, a, b)])
    };
    let (p, q) = match (target.mode, target.k) {
        (FourthMode::Free, _) => {
            let d = PI / (2.0 * sys.nu);
            (
                FactorList::new(vec![mixed(d, 0.0, sys.a1, sys.b1)]),
                FactorList::new(vec![mixed(d, 0.0, sys.a2, sys.b2)]),
            )
        }
        (FourthMode::Cc1, Some(k)) => {
            let kf = k as f64;
            let odd = 2.0 * kf + 1.0;
            let p = three(
                sys.a1,
                sys.b1,
                [
                    odd * PI / (2.0 * (kf + 1.0) * s),
                    odd * PI / (root2 * s),
                    odd * (6.0 * kf + 1.0) * PI / (2.0 * kf * s),
                ],
                odd * PI / (root2 * g),
            );
            let q = three(
                sys.a2,
                sys.b2,
                [
                    PI / (2.0 * (kf + 1.0) * t),
                    PI / (root2 * t),
                    (6.0 * kf + 1.0) * PI / (2.0 * kf * t),
                ],
                PI / (root2 * h),
            );
            (p, q)
        }
        (FourthMode::Cc2, Some(k)) => {
            let kf = k as f64;
            let odd = 2.0 * kf + 1.0;
            let p = three(
                sys.a1,
                sys.b1,
                [
                    odd * 3.0 * PI / (2.0 * (kf + 1.0) * s),
                    odd * PI / (root2 * s),
                    odd * (10.0 * kf + 2.0) * PI / (2.0 * kf * s),
                ],
                odd * PI / (root2 * g),
            );
            let q = three(
                sys.a2,
                sys.b2,
                [
                    3.0 * PI / (2.0 * (kf + 1.0) * t),
                    PI / (root2 * t),
                    (10.0 * kf + 2.0) * PI / (2.0 * kf * t),
                ],
                PI / (root2 * -h),
            );
            (p, q)
        }
        (mode, None) => {
            return Err(Error::ResonanceUnmet {
                condition: mode.name(),
                detail: "target carries no resonance index k".into(),
            })
        }
    };
    check_coefficients(&p, &q)?;

    // A common sign on (p, q) is the kernel of the double cover and leaves the transfer unchanged.
    let (pm, qm) = (p.matrix(), q.matrix());
    let (pt, qt) = (target.p_matrix(), target.q_matrix());
    let plus = pm.distance(&pt).max(qm.distance(&qt));
    let minus = pm.distance(&-pt).max(qm.distance(&-qt));
    let residual = plus.min(minus);
    if residual >= RECONSTRUCTION_TOL {
        return Err(Error::Reconstruction { residual });
    }
    Ok((p, q))
}
