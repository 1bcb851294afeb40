//! Circuit parameters → drift/control generators on SO(3)/SO(4) and the
//! associated SU(2) systems.

use std::fmt;

use nalgebra::{Matrix3, Matrix4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{psi, So3Algebra, So4Algebra, Su2Vector};

/// Relative tolerance for the integer resonance conditions.
pub const RESONANCE_RTOL: f64 = 1e-9;

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveParameter { name, value })
    }
}

/// Two capacitors joined through a switch and an inductor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThirdOrderCircuit {
    pub c1: f64,
    pub c2: f64,
    pub l3: f64,
}

impl ThirdOrderCircuit {
    pub fn new(c1: f64, c2: f64, l3: f64) -> Result<Self> {
        let circ = ThirdOrderCircuit { c1, c2, l3 };
        circ.validate()?;
        Ok(circ)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("C1", self.c1)?;
        check_positive("C2", self.c2)?;
        check_positive("L3", self.l3)
    }

    /// ω1 = 1/√(C1 L3)
    pub fn omega1(&self) -> f64 {
        1.0 / (self.c1 * self.l3).sqrt()
    }

    /// ω2 = 1/√(C2 L3)
    pub fn omega2(&self) -> f64 {
        1.0 / (self.c2 * self.l3).sqrt()
    }

    /// The state matrix `Ã + B̃u` for a constant switch value `u`.
    pub fn state_matrix(&self, u: f64) -> Matrix3<f64> {
        let (w1, w2) = (self.omega1(), self.omega2());
        let off = 1.0 - u;
        Matrix3::new(
            0.0, 0.0, w1 * off, //
            0.0, 0.0, w2 * u, //
            -w1 * off, -w2 * u, 0.0,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThirdOrderSystem {
    pub circuit: ThirdOrderCircuit,
    pub drift: So3Algebra,
    pub control: So3Algebra,
    /// `A = −(i/2) ω1 σy`, stored as `(0, ω1, 0)`.
    pub drift_su2: Su2Vector,
    /// `B = (i/2)(ω1 σy + ω2 σx)`, stored as `(−ω2, −ω1, 0)`.
    pub control_su2: Su2Vector,
    pub omega1: f64,
    pub omega2: f64,
}

impl ThirdOrderSystem {
    /// `a·A + b·B` for a pulse of duration `a` and power `b`.
    pub fn su2_generator(&self, duration: f64, power: f64) -> Su2Vector {
        self.drift_su2 * duration + self.control_su2 * power
    }
}

pub fn build_third(circ: &ThirdOrderCircuit) -> Result<ThirdOrderSystem> {
    circ.validate()?;
    let drift = So3Algebra::new(circ.state_matrix(0.0))?;
    let control = So3Algebra::new(circ.state_matrix(1.0) - drift.matrix())?;
    let (omega1, omega2) = (circ.omega1(), circ.omega2());
    Ok(ThirdOrderSystem {
        circuit: *circ,
        drift,
        control,
        drift_su2: Su2Vector::new(0.0, omega1, 0.0),
        control_su2: Su2Vector::new(-omega2, -omega1, 0.0),
        omega1,
        omega2,
    })
}

/// The fourth-order network of two inductors and two capacitors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourthOrderCircuit {
    pub l1: f64,
    pub c2: f64,
    pub l3: f64,
    pub c4: f64,
}

impl FourthOrderCircuit {
    pub fn new(l1: f64, c2: f64, l3: f64, c4: f64) -> Result<Self> {
        let circ = FourthOrderCircuit { l1, c2, l3, c4 };
        circ.validate()?;
        Ok(circ)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("L1", self.l1)?;
        check_positive("C2", self.c2)?;
        check_positive("L3", self.l3)?;
        check_positive("C4", self.c4)
    }

    pub fn nu(&self) -> f64 {
        1.0 / (self.l1 * self.c2).sqrt()
    }

    pub fn beta(&self) -> f64 {
        1.0 / (self.l3 * self.c4).sqrt()
    }

    pub fn gamma(&self) -> f64 {
        1.0 / (self.l1 * self.c4).sqrt()
    }

    pub fn delta(&self) -> f64 {
        1.0 / (self.l3 * self.c2).sqrt()
    }

    pub fn drift_matrix(&self) -> Matrix4<f64> {
        let (nu, beta) = (self.nu(), self.beta());
        Matrix4::new(
            0.0, -nu, 0.0, 0.0, //
            nu, 0.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, -beta, //
            0.0, 0.0, beta, 0.0,
        )
    }

    pub fn control_matrix(&self) -> Matrix4<f64> {
        let (gamma, delta) = (self.gamma(), self.delta());
        Matrix4::new(
            0.0, 0.0, 0.0, gamma, //
            0.0, 0.0, delta, 0.0, //
            0.0, -delta, 0.0, 0.0, //
            -gamma, 0.0, 0.0, 0.0,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourthOrderSystem {
    pub circuit: FourthOrderCircuit,
    pub drift: So4Algebra,
    pub control: So4Algebra,
    /// `A1 = i((ν+β)/2) σz`
    pub a1: Su2Vector,
    /// `B1 = −i((γ+δ)/2) σx`
    pub b1: Su2Vector,
    /// `A2 = i((β−ν)/2) σz`
    pub a2: Su2Vector,
    /// `B2 = i((γ−δ)/2) σx`
    pub b2: Su2Vector,
    pub nu: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

pub fn build_fourth(circ: &FourthOrderCircuit) -> Result<FourthOrderSystem> {
    circ.validate()?;
    let (nu, beta, gamma, delta) = (circ.nu(), circ.beta(), circ.gamma(), circ.delta());
    Ok(FourthOrderSystem {
        circuit: *circ,
        drift: So4Algebra::from_matrix(&circ.drift_matrix())?,
        control: So4Algebra::from_matrix(&circ.control_matrix())?,
        a1: Su2Vector::new(0.0, 0.0, -(nu + beta)),
        b1: Su2Vector::new(gamma + delta, 0.0, 0.0),
        a2: Su2Vector::new(0.0, 0.0, nu - beta),
        b2: Su2Vector::new(delta - gamma, 0.0, 0.0),
        nu,
        beta,
        gamma,
        delta,
    })
}

/// Either network, as consumed by the simulator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Network {
    Third(ThirdOrderSystem),
    Fourth(FourthOrderSystem),
}

impl Network {
    pub fn dimension(&self) -> usize {
        match self {
            Network::Third(_) => 3,
            Network::Fourth(_) => 4,
        }
    }
}

/// Which of the two integer resonance conditions to test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResonanceMode {
    /// `(ν+β)/(β−ν) = 2k+1 = (γ+δ)/(δ−γ)`
    Cc1,
    /// `(ν+β)/(β−ν) = 2k+1 = −(γ+δ)/(δ−γ)`
    Cc2,
}

impl ResonanceMode {
    pub fn name(self) -> &'static str {
        match self {
            ResonanceMode::Cc1 => "cc1",
            ResonanceMode::Cc2 => "cc2",
        }
    }
}

impl fmt::Display for ResonanceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Resonance {
    Satisfied { k: u32 },
    Unsatisfied { drift_ratio: f64, control_ratio: f64 },
    Degenerate { reason: &'static str },
}

impl Resonance {
    pub fn k(&self) -> Option<u32> {
        match self {
            Resonance::Satisfied { k } => Some(*k),
            _ => None,
        }
    }

    pub fn describe(&self, mode: ResonanceMode) -> String {
        match self {
            Resonance::Satisfied { k } => format!("{mode} holds with k = {k}"),
            Resonance::Unsatisfied {
                drift_ratio,
                control_ratio,
            } => match mode {
                ResonanceMode::Cc1 => format!(
                    "(ν+β)/(β−ν) = {drift_ratio} and (γ+δ)/(δ−γ) = {control_ratio} are not both 2k+1 for an integer k ≥ 1"
                ),
                ResonanceMode::Cc2 => format!(
                    "(ν+β)/(β−ν) = {drift_ratio} and −(γ+δ)/(δ−γ) = {} are not both 2k+1 for an integer k ≥ 1",
                    -control_ratio
                ),
            },
            Resonance::Degenerate { reason } => format!("{mode} is undefined: {reason}"),
        }
    }
}

/// Test a resonance condition, returning the integer `k ≥ 1` when it holds
/// to relative tolerance [`RESONANCE_RTOL`].
pub fn resonance_k(circ: &FourthOrderCircuit, mode: ResonanceMode) -> Resonance {
    let (nu, beta, gamma, delta) = (circ.nu(), circ.beta(), circ.gamma(), circ.delta());
    if (beta - nu).abs() <= 1e-12 * (beta + nu) {
        return Resonance::Degenerate { reason: "β = ν" };
    }
    if (delta - gamma).abs() <= 1e-12 * (delta + gamma) {
        return Resonance::Degenerate { reason: "δ = γ" };
    }
    let drift_ratio = (nu + beta) / (beta - nu);
    let control_ratio = (gamma + delta) / (delta - gamma);
    let unsatisfied = Resonance::Unsatisfied {
        drift_ratio,
        control_ratio,
    };
    let k = ((drift_ratio - 1.0) / 2.0).round();
    if !(k >= 1.0) || k > u32::MAX as f64 {
        return unsatisfied;
    }
    let odd = 2.0 * k + 1.0;
    let wanted = match mode {
        ResonanceMode::Cc1 => odd,
        ResonanceMode::Cc2 => -odd,
    };
    let tol = RESONANCE_RTOL * odd;
    if (drift_ratio - odd).abs() <= tol && (control_ratio - wanted).abs() <= tol {
        Resonance::Satisfied { k: k as u32 }
    } else {
        unsatisfied
    }
}

/// The so(3) image of the third-order SU(2) generators, for cross-checks.
pub fn third_order_images(sys: &ThirdOrderSystem) -> (So3Algebra, So3Algebra) {
    (psi(sys.drift_su2), psi(sys.control_su2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{psi_tilde, Su2AlgebraPair};

    fn demo_third() -> ThirdOrderSystem {
        build_third(&ThirdOrderCircuit::new(0.1, 0.2, 0.5).unwrap()).unwrap()
    }

    #[test]
    fn demo_third_order_generators() {
        let sys = demo_third();
        let s5 = 5f64.sqrt();
        let s10 = 10f64.sqrt();
        assert!((sys.omega1 - 2.0 * s5).abs() < 1e-14);
        assert!((sys.omega2 - s10).abs() < 1e-14);
        // A = −√5 iσy = −(i/2)(2√5)σy
        assert!((sys.drift_su2 - Su2Vector::new(0.0, 2.0 * s5, 0.0)).norm() < 1e-14);
        // B = (i/2)(2√5 σy + √10 σx)
        assert!((sys.control_su2 - Su2Vector::new(-s10, -2.0 * s5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn symmetric_circuit_has_unit_frequencies() {
        let sys = build_third(&ThirdOrderCircuit::new(1.0, 1.0, 1.0).unwrap()).unwrap();
        assert_eq!((sys.omega1, sys.omega2), (1.0, 1.0));
    }

    #[test]
    fn psi_images_match_state_matrix() {
        let sys = demo_third();
        let (a, b) = third_order_images(&sys);
        assert!((a.matrix() - sys.drift.matrix()).amax() < 1e-14);
        assert!((b.matrix() - sys.control.matrix()).amax() < 1e-14);
        let on = sys.circuit.state_matrix(1.0);
        assert!((sys.drift.matrix() + sys.control.matrix() - on).amax() < 1e-14);
    }

    #[test]
    fn rejects_non_positive_parameters() {
        assert_eq!(
            ThirdOrderCircuit::new(0.1, 0.0, 0.5),
            Err(Error::NonPositiveParameter { name: "C2", value: 0.0 })
        );
        assert!(matches!(
            FourthOrderCircuit::new(1.0, 1.0, -1.0, 1.0),
            Err(Error::NonPositiveParameter { name: "L3", .. })
        ));
        assert!(ThirdOrderCircuit::new(f64::NAN, 1.0, 1.0).is_err());
    }

    #[test]
    fn fourth_order_k1_instance() {
        let circ = FourthOrderCircuit::new(4.0, 1.0, 1.0, 1.0).unwrap();
        let sys = build_fourth(&circ).unwrap();
        assert_eq!((sys.nu, sys.beta, sys.gamma, sys.delta), (0.5, 1.0, 0.5, 1.0));
        assert_eq!(sys.a1, Su2Vector::new(0.0, 0.0, -1.5));
        assert_eq!(sys.b1, Su2Vector::new(1.5, 0.0, 0.0));
        assert_eq!(sys.a2, Su2Vector::new(0.0, 0.0, -0.5));
        assert_eq!(sys.b2, Su2Vector::new(0.5, 0.0, 0.0));
        assert!((sys.nu * sys.beta - sys.gamma * sys.delta).abs() < 1e-12);

        let drift = psi_tilde(&Su2AlgebraPair::new(sys.a1, sys.a2));
        let control = psi_tilde(&Su2AlgebraPair::new(sys.b1, sys.b2));
        assert!((drift.matrix() - circ.drift_matrix()).amax() < 1e-14);
        assert!((control.matrix() - circ.control_matrix()).amax() < 1e-14);
    }

    #[test]
    fn equal_drift_frequencies_cancel_second_drift() {
        let sys = build_fourth(&FourthOrderCircuit::new(1.0, 1.0, 1.0, 1.0).unwrap()).unwrap();
        assert_eq!(sys.a2, Su2Vector::ZERO);
        assert!(matches!(
            resonance_k(&sys.circuit, ResonanceMode::Cc1),
            Resonance::Degenerate { reason: "β = ν" }
        ));
    }

    #[test]
    fn resonance_modes_on_k1_circuit() {
        let circ = FourthOrderCircuit::new(4.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(resonance_k(&circ, ResonanceMode::Cc1).k(), Some(1));
        assert_eq!(resonance_k(&circ, ResonanceMode::Cc2).k(), None);

        let cc2 = FourthOrderCircuit::new(1.0, 4.0, 1.0, 1.0).unwrap();
        assert_eq!(resonance_k(&cc2, ResonanceMode::Cc2).k(), Some(1));
        assert_eq!(resonance_k(&cc2, ResonanceMode::Cc1).k(), None);
    }

    #[test]
    fn k_zero_is_rejected() {
        // ν+β / β−ν = 1 would need ν = 0; a ratio near 1 rounds to k = 0.
        let circ = FourthOrderCircuit::new(1e6, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(resonance_k(&circ, ResonanceMode::Cc1).k(), None);
    }

    #[test]
    fn cc1_forces_equal_capacitors() {
        for k in 1..6u32 {
            let kf = k as f64;
            let ratio = (2.0 * kf + 2.0) / (2.0 * kf);
            let circ = FourthOrderCircuit::new(ratio * ratio, 0.7, 1.0, 0.7).unwrap();
            assert_eq!(resonance_k(&circ, ResonanceMode::Cc1).k(), Some(k));
            assert!((circ.c2 - circ.c4).abs() / circ.c2 < 1e-9);
            assert!(((circ.l1 / circ.l3).sqrt() - (kf + 1.0) / kf).abs() < 1e-9);
        }
    }
}
