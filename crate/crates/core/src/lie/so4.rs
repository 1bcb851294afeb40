//! so(4) ≅ su(2) × su(2) and the double cover SU(2) × SU(2) → SO(4).
//!
//! Points of R⁴ are identified with quaternions `x1 + x2 i + x3 j + x4 k`,
//! and quaternions with SU(2) through
//! `1 ↦ I`, `i ↦ iσz`, `j ↦ iσy`, `k ↦ iσx`.
//! Under this identification `(0,0,1,0)` is `e^{i(π/2)σy}` and the exponential
//! property `φ̃(e^{K1}, e^{K2}) = e^{ψ̃(K1×K2)}` holds.

use std::ops::Mul;

use nalgebra::{Matrix2, Matrix4, Quaternion, Vector4};
use num_complex::Complex64;

use super::su2::{exp_su2, Su2Matrix, Su2Vector, GROUP_TOL};
use crate::error::{Error, Result};

/// Parameters `(a1, a2, a3, b1, b2, b3)` of the skew matrix
/// ```text
/// [ 0   -a1  -a2  -a3 ]
/// [ a1   0   -b3   b2 ]
/// [ a2   b3   0   -b1 ]
/// [ a3  -b2   b1   0  ]
/// ```
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct So4Algebra {
    pub a: [f64; 3],
    pub b: [f64; 3],
}

impl So4Algebra {
    pub fn matrix(&self) -> Matrix4<f64> {
        let [a1, a2, a3] = self.a;
        let [b1, b2, b3] = self.b;
        Matrix4::new(
            0.0, -a1, -a2, -a3, //
            a1, 0.0, -b3, b2, //
            a2, b3, 0.0, -b1, //
            a3, -b2, b1, 0.0,
        )
    }

    /// Read the six parameters from an exactly skew-symmetric matrix.
    pub fn from_matrix(m: &Matrix4<f64>) -> Result<Self> {
        let residual = (m + m.transpose()).amax();
        if residual != 0.0 || !m.iter().all(|x| x.is_finite()) {
            return Err(Error::NotInGroup {
                what: "so(4) matrix",
                residual,
            });
        }
        Ok(So4Algebra {
            a: [m[(1, 0)], m[(2, 0)], m[(3, 0)]],
            b: [m[(3, 2)], m[(1, 3)], m[(2, 1)]],
        })
    }

    pub fn scale(&self, s: f64) -> So4Algebra {
        So4Algebra {
            a: self.a.map(|x| x * s),
            b: self.b.map(|x| x * s),
        }
    }

    pub fn add(&self, o: &So4Algebra) -> So4Algebra {
        So4Algebra {
            a: [self.a[0] + o.a[0], self.a[1] + o.a[1], self.a[2] + o.a[2]],
            b: [self.b[0] + o.b[0], self.b[1] + o.b[1], self.b[2] + o.b[2]],
        }
    }
}

/// An element `K1 × K2` of su(2) × su(2).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Su2AlgebraPair {
    pub k1: Su2Vector,
    pub k2: Su2Vector,
}

impl Su2AlgebraPair {
    pub fn new(k1: Su2Vector, k2: Su2Vector) -> Self {
        Su2AlgebraPair { k1, k2 }
    }
}

/// K1 carries `a + b`, K2 carries `b − a`, each as `(i/2)(x3 σx + x2 σy + x1 σz)`.
pub fn psi_tilde(pair: &Su2AlgebraPair) -> So4Algebra {
    let sum = [-pair.k1.c, -pair.k1.b, -pair.k1.a];
    let diff = [-pair.k2.c, -pair.k2.b, -pair.k2.a];
    So4Algebra {
        a: std::array::from_fn(|i| 0.5 * (sum[i] - diff[i])),
        b: std::array::from_fn(|i| 0.5 * (sum[i] + diff[i])),
    }
}

pub fn psi_tilde_inv(w: &So4Algebra) -> Su2AlgebraPair {
    let sum: [f64; 3] = std::array::from_fn(|i| w.a[i] + w.b[i]);
    let diff: [f64; 3] = std::array::from_fn(|i| w.b[i] - w.a[i]);
    Su2AlgebraPair {
        k1: Su2Vector::new(-sum[2], -sum[1], -sum[0]),
        k2: Su2Vector::new(-diff[2], -diff[1], -diff[0]),
    }
}

/// A 4×4 rotation matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct So4Matrix(Matrix4<f64>);

impl So4Matrix {
    pub fn identity() -> Self {
        So4Matrix(Matrix4::identity())
    }

    pub fn new(m: Matrix4<f64>) -> Result<Self> {
        if !m.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite { what: "SO(4) matrix" });
        }
        let residual = (m.transpose() * m - Matrix4::identity())
            .amax()
            .max((m.determinant() - 1.0).abs());
        if residual >= GROUP_TOL {
            return Err(Error::NotInGroup {
                what: "SO(4) matrix",
                residual,
            });
        }
        Ok(So4Matrix(m))
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn apply(&self, x: &Vector4<f64>) -> Vector4<f64> {
        self.0 * x
    }

    pub fn distance(&self, other: &So4Matrix) -> f64 {
        (self.0 - other.0).amax()
    }
}

impl Mul for So4Matrix {
    type Output = So4Matrix;
    fn mul(self, o: So4Matrix) -> So4Matrix {
        So4Matrix(self.0 * o.0)
    }
}

/// Quaternion coordinates `(x1, x2, x3, x4)` of an SU(2) matrix.
pub fn quaternion_of(u: &Su2Matrix) -> Vector4<f64> {
    // x1 I + x2 iσz + x3 iσy + x4 iσx = [[x1 + i x2, x3 + i x4], [−x3 + i x4, x1 − i x2]]
    let u11 = u.entry(0, 0);
    let u12 = u.entry(0, 1);
    Vector4::new(u11.re, u11.im, u12.re, u12.im)
}

/// SU(2) matrix of a unit quaternion.
pub fn su2_of_quaternion(x: &Vector4<f64>) -> Result<Su2Matrix> {
    let norm = x.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotUnit {
            what: "quaternion".into(),
            norm,
        });
    }
    let x = x / norm;
    Ok(Su2Matrix::from_matrix_unchecked(Matrix2::new(
        Complex64::new(x[0], x[1]),
        Complex64::new(x[2], x[3]),
        Complex64::new(-x[2], x[3]),
        Complex64::new(x[0], -x[1]),
    )))
}

fn to_quat(v: &Vector4<f64>) -> Quaternion<f64> {
    Quaternion::new(v[0], v[1], v[2], v[3])
}

/// `φ̃(U1, U2)`: the matrix of `x ↦ p x q⁻¹`, with `p`, `q` the quaternions of `U1`, `U2`.
pub fn phi_tilde(u1: &Su2Matrix, u2: &Su2Matrix) -> So4Matrix {
    let p = to_quat(&quaternion_of(u1));
    let q_inv = to_quat(&quaternion_of(u2)).conjugate();
    let mut m = Matrix4::zeros();
    for j in 0..4 {
        let mut e = Vector4::zeros();
        e[j] = 1.0;
        let img = p * to_quat(&e) * q_inv;
        m.set_column(j, &Vector4::new(img.w, img.i, img.j, img.k));
    }
    So4Matrix(m)
}

/// `exp(W)` for `W ∈ so(4)`, computed as `φ̃(e^{K1}, e^{K2})` with `K1 × K2 = ψ̃⁻¹(W)`.
pub fn exp_so4(w: &So4Algebra) -> So4Matrix {
    let pair = psi_tilde_inv(w);
    phi_tilde(&exp_su2(pair.k1), &exp_su2(pair.k2))
}
