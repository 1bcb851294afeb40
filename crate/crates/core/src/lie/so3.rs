//! so(3)/SO(3) and the covering map from SU(2).

use std::ops::Mul;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use super::su2::{sigma_x, sigma_y, sigma_z, sinc, Su2Matrix, Su2Vector, GROUP_TOL};
use crate::error::{Error, Result};

/// A 3×3 skew-symmetric matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct So3Algebra(Matrix3<f64>);

impl So3Algebra {
    /// Accepts only matrices with `Wᵀ = −W` exactly.
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        let residual = (m + m.transpose()).amax();
        if residual != 0.0 || !m.iter().all(|x| x.is_finite()) {
            return Err(Error::NotInGroup {
                what: "so(3) matrix",
                residual,
            });
        }
        Ok(So3Algebra(m))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn scale(&self, s: f64) -> So3Algebra {
        So3Algebra(self.0 * s)
    }

    pub fn bracket(&self, other: &So3Algebra) -> So3Algebra {
        So3Algebra(self.0 * other.0 - other.0 * self.0)
    }
}

impl std::ops::Add for So3Algebra {
    type Output = So3Algebra;
    fn add(self, o: So3Algebra) -> So3Algebra {
        So3Algebra(self.0 + o.0)
    }
}

impl std::ops::Sub for So3Algebra {
    type Output = So3Algebra;
    fn sub(self, o: So3Algebra) -> So3Algebra {
        So3Algebra(self.0 - o.0)
    }
}

/// A 3×3 rotation matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct So3Matrix(Matrix3<f64>);

impl So3Matrix {
    pub fn identity() -> Self {
        So3Matrix(Matrix3::identity())
    }

    /// Validate `RᵀR = I` and `det R = 1` to within 1e-12.
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        if !m.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite { what: "SO(3) matrix" });
        }
        let residual = (m.transpose() * m - Matrix3::identity())
            .amax()
            .max((m.determinant() - 1.0).abs());
        if residual >= GROUP_TOL {
            return Err(Error::NotInGroup {
                what: "SO(3) matrix",
                residual,
            });
        }
        Ok(So3Matrix(m))
    }

    pub fn from_matrix_unchecked(m: Matrix3<f64>) -> Self {
        So3Matrix(m)
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn apply(&self, x: &Vector3<f64>) -> Vector3<f64> {
        self.0 * x
    }

    pub fn distance(&self, other: &So3Matrix) -> f64 {
        (self.0 - other.0).amax()
    }
}

impl Mul for So3Matrix {
    type Output = So3Matrix;
    fn mul(self, o: So3Matrix) -> So3Matrix {
        So3Matrix(self.0 * o.0)
    }
}

/// The isomorphism su(2) → so(3): `(a, b, c)` ↦ `[[0, −c, b], [c, 0, −a], [−b, a, 0]]`.
pub fn psi(v: Su2Vector) -> So3Algebra {
    So3Algebra(Matrix3::new(
        0.0, -v.c, v.b, //
        v.c, 0.0, -v.a, //
        -v.b, v.a, 0.0,
    ))
}

pub fn psi_inv(w: &So3Algebra) -> Su2Vector {
    let m = w.matrix();
    Su2Vector::new(m[(2, 1)], m[(0, 2)], m[(1, 0)])
}

/// The covering homomorphism SU(2) → SO(3), `U ↦ (A ↦ U A U†)` in the
/// `-(i/2)σ` basis of su(2). Entries are `½ tr(σⱼ U σₖ U†)`.
pub fn phi(u: &Su2Matrix) -> So3Matrix {
    let m = u.matrix();
    let adj = m.adjoint();
    let sigmas = [sigma_x(), sigma_y(), sigma_z()];
    let conj: Vec<_> = sigmas.iter().map(|s| m * s * adj).collect();
    let r = Matrix3::from_fn(|j, k| {
        let t: Complex64 = (sigmas[j] * conj[k]).trace();
        0.5 * t.re
    });
    So3Matrix(r)
}

/// `exp(ψ(v))` by Rodrigues' formula:
/// `I cos 2λ + (sin 2λ / 2λ) ψ(v) + ((1 − cos 2λ) / 4λ²) p pᵀ`.
pub fn rodrigues(v: Su2Vector) -> So3Matrix {
    let theta = v.norm(); // 2λ
    let p = Vector3::new(v.a, v.b, v.c);
    // (1 − cos θ)/θ² = ½ (sin(θ/2)/(θ/2))²
    let half = sinc(0.5 * theta);
    let outer = 0.5 * half * half;
    let m = Matrix3::identity() * theta.cos() + psi(v).matrix() * sinc(theta) + p * p.transpose() * outer;
    So3Matrix(m)
}

/// Rotation vector of `r`: the `v` with angle |v| ∈ [0, π] and `rodrigues(v) = r`.
pub fn so3_log(r: &So3Matrix) -> Su2Vector {
    let m = r.matrix();
    let skew = Vector3::new(m[(2, 1)] - m[(1, 2)], m[(0, 2)] - m[(2, 0)], m[(1, 0)] - m[(0, 1)]) * 0.5;
    let sin = skew.norm();
    let cos = 0.5 * (m.trace() - 1.0);
    let theta = sin.atan2(cos);
    if theta < 1e-6 {
        // θ/sin θ ≈ 1 + θ²/6
        let s = 1.0 + theta * theta / 6.0;
        return Su2Vector::new(skew.x * s, skew.y * s, skew.z * s);
    }
    if cos > -0.5 {
        let s = theta / sin;
        return Su2Vector::new(skew.x * s, skew.y * s, skew.z * s);
    }
    // Near θ = π the skew part vanishes; read the axis from n nᵀ instead.
    let sym = (m + m.transpose()) * 0.5 - Matrix3::identity() * cos;
    let nnt = sym / (1.0 - cos);
    let i = (0..3)
        .max_by(|&a, &b| nnt[(a, a)].total_cmp(&nnt[(b, b)]))
        .unwrap_or(0);
    let mut axis = nnt.column(i).into_owned() / nnt[(i, i)].max(0.0).sqrt();
    axis /= axis.norm();
    if axis.dot(&skew) < 0.0 {
        axis = -axis;
    }
    let v = axis * theta;
    Su2Vector::new(v.x, v.y, v.z)
}

#[cfg(test)]
mod tests {
    use super::super::su2::exp_su2;
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn psi_reads_off_skew_entries() {
        let w = psi(Su2Vector::new(1.0, 2.0, 3.0));
        let want = Matrix3::new(0.0, -3.0, 2.0, 3.0, 0.0, -1.0, -2.0, 1.0, 0.0);
        assert_eq!(*w.matrix(), want);
        assert_eq!(psi_inv(&w), Su2Vector::new(1.0, 2.0, 3.0));
        assert_eq!(*psi(Su2Vector::ZERO).matrix(), Matrix3::zeros());
    }

    #[test]
    fn phi_kernel() {
        assert!(phi(&Su2Matrix::identity()).distance(&So3Matrix::identity()) < 1e-15);
        assert!(phi(&-Su2Matrix::identity()).distance(&So3Matrix::identity()) < 1e-15);
    }

    #[test]
    fn phi_of_demo_legs() {
        let s = FRAC_1_SQRT_2;
        let t1 = exp_su2(Su2Vector::new(0.0, FRAC_PI_4, 0.0));
        let want = Matrix3::new(s, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, s);
        assert!((phi(&t1).matrix() - want).amax() < 1e-15);
        assert!((rodrigues(Su2Vector::new(0.0, FRAC_PI_4, 0.0)).matrix() - want).amax() < 1e-15);

        let t2 = exp_su2(Su2Vector::new(0.0, 0.0, -FRAC_PI_2));
        let want = Matrix3::new(0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 1.0);
        assert!((phi(&t2).matrix() - want).amax() < 1e-15);
    }

    #[test]
    fn rodrigues_zero_is_identity() {
        assert_eq!(rodrigues(Su2Vector::ZERO), So3Matrix::identity());
    }

    #[test]
    fn rodrigues_small_angle_is_smooth() {
        let v = Su2Vector::new(1e-9, -2e-9, 3e-9);
        let r = rodrigues(v);
        assert!(r.distance(&phi(&exp_su2(v))) < 1e-16);
        assert!(So3Matrix::new(*r.matrix()).is_ok());
    }

    #[test]
    fn log_handles_half_turn() {
        for v in [
            Su2Vector::new(PI, 0.0, 0.0),
            Su2Vector::new(0.0, -PI, 0.0),
            Su2Vector::new(1.0, 2.0, -2.0) * (PI / 3.0),
            Su2Vector::new(0.6, 0.0, 0.8) * (PI - 1e-9),
        ] {
            let r = rodrigues(v);
            let back = so3_log(&r);
            assert!(rodrigues(back).distance(&r) < 1e-12, "{v:?} -> {back:?}");
        }
    }

    #[test]
    fn log_small_and_generic() {
        for v in [Su2Vector::ZERO, Su2Vector::new(1e-8, 0.0, 0.0), Su2Vector::new(0.3, -1.1, 0.9)] {
            let back = so3_log(&rodrigues(v));
            assert!((back - v).norm() < 1e-12);
        }
    }

    #[test]
    fn so3_algebra_requires_exact_skew() {
        let mut m = *psi(Su2Vector::new(1.0, 2.0, 3.0)).matrix();
        assert!(So3Algebra::new(m).is_ok());
        m[(0, 1)] += 1e-13;
        assert!(So3Algebra::new(m).is_err());
    }
}
