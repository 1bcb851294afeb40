//! su(2) coefficient vectors, SU(2) matrices and the Cayley-Klein chart.
//!
//! An [`Su2Vector`] `(a, b, c)` always denotes the anti-Hermitian matrix
//! `-(i/2)(a σx + b σy + c σz)`; every other module uses this one convention.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when checking unitarity and unit determinant.
pub const GROUP_TOL: f64 = 1e-12;

/// Below this modulus an entry is treated as zero when reading polar coordinates.
const POLAR_EPS: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn sigma_x() -> Matrix2<Complex64> {
    Matrix2::new(ZERO, ONE, ONE, ZERO)
}

pub fn sigma_y() -> Matrix2<Complex64> {
    Matrix2::new(ZERO, -I, I, ZERO)
}

pub fn sigma_z() -> Matrix2<Complex64> {
    Matrix2::new(ONE, ZERO, ZERO, -ONE)
}

/// `sin(x)/x`, accurate near zero.
pub(crate) fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Map an angle into `[0, 2π)`.
pub(crate) fn wrap_two_pi(theta: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let r = theta.rem_euclid(tau);
    if r >= tau {
        0.0
    } else {
        r
    }
}

/// Real coefficients `(a, b, c)` of `-(i/2)(a σx + b σy + c σz)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Su2Vector {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Su2Vector {
    pub const ZERO: Su2Vector = Su2Vector { a: 0.0, b: 0.0, c: 0.0 };

    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        Su2Vector { a, b, c }
    }

    pub fn from_array(v: [f64; 3]) -> Self {
        Su2Vector::new(v[0], v[1], v[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn norm(&self) -> f64 {
        (self.a * self.a + self.b * self.b + self.c * self.c).sqrt()
    }

    /// λ = ½‖(a, b, c)‖, the SU(2) rotation half-angle.
    pub fn lambda(&self) -> f64 {
        0.5 * self.norm()
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite()
    }

    pub fn dot(&self, other: &Su2Vector) -> f64 {
        self.a * other.a + self.b * other.b + self.c * other.c
    }

    /// Lie bracket in these coordinates: `[X, Y]` has coefficients `x × y`.
    pub fn bracket(&self, other: &Su2Vector) -> Su2Vector {
        Su2Vector::new(
            self.b * other.c - self.c * other.b,
            self.c * other.a - self.a * other.c,
            self.a * other.b - self.b * other.a,
        )
    }

    /// The anti-Hermitian 2×2 matrix this vector stands for.
    pub fn matrix(&self) -> Matrix2<Complex64> {
        let m = sigma_x() * Complex64::from(self.a)
            + sigma_y() * Complex64::from(self.b)
            + sigma_z() * Complex64::from(self.c);
        m * Complex64::new(0.0, -0.5)
    }

    /// Read coefficients back from a traceless anti-Hermitian matrix.
    pub fn from_matrix(m: &Matrix2<Complex64>) -> Su2Vector {
        // -(i/2)(a σx + b σy + c σz) = [[-ic/2, (-b - ia)/2], [(b - ia)/2, ic/2]]
        let c = -2.0 * m[(0, 0)].im;
        let a = -(m[(0, 1)].im + m[(1, 0)].im);
        let b = m[(1, 0)].re - m[(0, 1)].re;
        Su2Vector::new(a, b, c)
    }
}

impl Add for Su2Vector {
    type Output = Su2Vector;
    fn add(self, o: Su2Vector) -> Su2Vector {
        Su2Vector::new(self.a + o.a, self.b + o.b, self.c + o.c)
    }
}

impl Sub for Su2Vector {
    type Output = Su2Vector;
    fn sub(self, o: Su2Vector) -> Su2Vector {
        Su2Vector::new(self.a - o.a, self.b - o.b, self.c - o.c)
    }
}

impl Mul<f64> for Su2Vector {
    type Output = Su2Vector;
    fn mul(self, s: f64) -> Su2Vector {
        Su2Vector::new(self.a * s, self.b * s, self.c * s)
    }
}

impl Neg for Su2Vector {
    type Output = Su2Vector;
    fn neg(self) -> Su2Vector {
        Su2Vector::new(-self.a, -self.b, -self.c)
    }
}

/// A 2×2 special unitary matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Su2Matrix(Matrix2<Complex64>);

impl Su2Matrix {
    pub fn identity() -> Self {
        Su2Matrix(Matrix2::identity())
    }

    /// Validate `m` against `‖U†U − I‖ < 1e-12` and `|det U − 1| < 1e-12`.
    pub fn new(m: Matrix2<Complex64>) -> Result<Self> {
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { what: "SU(2) matrix" });
        }
        let residual = group_residual(&m);
        if residual >= GROUP_TOL {
            return Err(Error::NotInGroup {
                what: "SU(2) matrix",
                residual,
            });
        }
        Ok(Su2Matrix(m))
    }

    /// Wrap a matrix that is special unitary by construction.
    pub fn from_matrix_unchecked(m: Matrix2<Complex64>) -> Self {
        Su2Matrix(m)
    }

    pub fn from_rows(rows: [[Complex64; 2]; 2]) -> Result<Self> {
        Su2Matrix::new(Matrix2::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1]))
    }

    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.0
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn adjoint(&self) -> Su2Matrix {
        Su2Matrix(self.0.adjoint())
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn distance(&self, other: &Su2Matrix) -> f64 {
        max_abs(&(self.0 - other.0))
    }

    /// Distance to `other` modulo the kernel `{±I}` of the covering map.
    pub fn distance_up_to_sign(&self, other: &Su2Matrix) -> f64 {
        self.distance(other).min(self.distance(&-*other))
    }

    pub fn residual(&self) -> f64 {
        group_residual(&self.0)
    }
}

impl Mul for Su2Matrix {
    type Output = Su2Matrix;
    fn mul(self, o: Su2Matrix) -> Su2Matrix {
        Su2Matrix(self.0 * o.0)
    }
}

impl Neg for Su2Matrix {
    type Output = Su2Matrix;
    fn neg(self) -> Su2Matrix {
        Su2Matrix(-self.0)
    }
}

pub(crate) fn max_abs(m: &Matrix2<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn group_residual(m: &Matrix2<Complex64>) -> f64 {
    let unitary = max_abs(&(m.adjoint() * m - Matrix2::identity()));
    let det = (m.determinant() - ONE).norm();
    unitary.max(det)
}

/// Closed-form exponential `cos λ I − i (sin λ / 2λ)(a σx + b σy + c σz)`.
pub fn exp_su2(v: Su2Vector) -> Su2Matrix {
    let lambda = v.lambda();
    let cos = lambda.cos();
    // sin λ / (2λ) = sinc(λ)/2
    let s = 0.5 * sinc(lambda);
    let (x, y, z) = (s * v.a, s * v.b, s * v.c);
    // cos I − i (x σx + y σy + z σz)
    Su2Matrix(Matrix2::new(
        Complex64::new(cos, -z),
        Complex64::new(-y, -x),
        Complex64::new(y, -x),
        Complex64::new(cos, z),
    ))
}

/// Principal logarithm with λ ∈ [0, π]. `−I` maps to `(2π, 0, 0)`.
pub fn log_su2(u: &Su2Matrix) -> Su2Vector {
    // U = w I − i (x σx + y σy + z σz)
    let m = u.matrix();
    let w = 0.5 * (m[(0, 0)].re + m[(1, 1)].re);
    let z = 0.5 * (m[(1, 1)].im - m[(0, 0)].im);
    let x = -0.5 * (m[(0, 1)].im + m[(1, 0)].im);
    let y = 0.5 * (m[(1, 0)].re - m[(0, 1)].re);
    let s = (x * x + y * y + z * z).sqrt();
    if s == 0.0 {
        return if w < 0.0 {
            Su2Vector::new(2.0 * std::f64::consts::PI, 0.0, 0.0)
        } else {
            Su2Vector::ZERO
        };
    }
    let lambda = s.atan2(w);
    // p = 2λ n with n = (x, y, z)/sin λ and sin λ = s
    let scale = 2.0 * lambda / s;
    Su2Vector::new(scale * x, scale * y, scale * z)
}

/// Cayley-Klein parameters of an SU(2) matrix:
/// `[[e^{iζ} cos α, e^{iμ} sin α], [e^{i(π−μ)} sin α, e^{−iζ} cos α]]`.
///
/// The chart is canonical when α ∈ [0, π/2] and ζ, μ ∈ [0, 2π), but
/// [`ck_to_matrix`] accepts any real values, which the fourth-order
/// constructions rely on.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CayleyKlein {
    pub alpha: f64,
    pub zeta: f64,
    pub mu: f64,
}

impl CayleyKlein {
    pub const fn new(alpha: f64, zeta: f64, mu: f64) -> Self {
        CayleyKlein { alpha, zeta, mu }
    }

    pub fn matrix(&self) -> Su2Matrix {
        ck_to_matrix(self)
    }
}

pub fn ck_to_matrix(ck: &CayleyKlein) -> Su2Matrix {
    let (sa, ca) = ck.alpha.sin_cos();
    let pi = std::f64::consts::PI;
    Su2Matrix(Matrix2::new(
        Complex64::from_polar(ca, ck.zeta),
        Complex64::from_polar(sa, ck.mu),
        Complex64::from_polar(sa, pi - ck.mu),
        Complex64::from_polar(ca, -ck.zeta),
    ))
}

/// Read canonical Cayley-Klein coordinates off an SU(2) matrix.
///
/// When cos α vanishes ζ is fixed to 0, and when sin α vanishes μ is fixed to 0.
pub fn cayley_klein_of(u: &Su2Matrix) -> CayleyKlein {
    let u11 = u.entry(0, 0);
    let u12 = u.entry(0, 1);
    let (r11, r12) = (u11.norm(), u12.norm());
    let alpha = r12.atan2(r11);
    let zeta = if r11 > POLAR_EPS { wrap_two_pi(u11.arg()) } else { 0.0 };
    let mu = if r12 > POLAR_EPS { wrap_two_pi(u12.arg()) } else { 0.0 };
    CayleyKlein { alpha, zeta, mu }
}
