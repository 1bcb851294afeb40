//! Reference implementations and random generators shared by the test targets.
#![allow(dead_code)]

use nalgebra::{DMatrix, Matrix2, Matrix3, Matrix4};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use switchnet::lie::{CayleyKlein, Su2Vector};
use switchnet::network::{build_fourth, build_third, FourthOrderCircuit, FourthOrderSystem, ThirdOrderCircuit, ThirdOrderSystem};

const TAYLOR_TERMS: usize = 30;

/// Matrix exponential by scaling and squaring around a truncated Taylor series.
pub fn expm(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let norm = m.iter().map(|x| x.abs()).fold(0.0, f64::max) * n as f64;
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = m / 2f64.powi(squarings as i32);
    let mut term = DMatrix::identity(n, n);
    let mut sum = DMatrix::identity(n, n);
    for k in 1..=TAYLOR_TERMS {
        term = &term * &scaled / k as f64;
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

pub fn expm3(m: &Matrix3<f64>) -> Matrix3<f64> {
    let e = expm(&DMatrix::from_column_slice(3, 3, m.as_slice()));
    Matrix3::from_column_slice(e.as_slice())
}

pub fn expm4(m: &Matrix4<f64>) -> Matrix4<f64> {
    let e = expm(&DMatrix::from_column_slice(4, 4, m.as_slice()));
    Matrix4::from_column_slice(e.as_slice())
}

/// Complex 2×2 exponential by the same series.
pub fn expm_c2(m: &Matrix2<Complex64>) -> Matrix2<Complex64> {
    let norm = m.iter().map(|x| x.norm()).fold(0.0, f64::max) * 2.0;
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = m.map(|x| x / 2f64.powi(squarings as i32));
    let mut term: Matrix2<Complex64> = Matrix2::identity();
    let mut sum: Matrix2<Complex64> = Matrix2::identity();
    for k in 1..=TAYLOR_TERMS {
        term = (term * scaled).map(|x| x / k as f64);
        sum += term;
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

pub fn su2_exp_oracle(v: Su2Vector) -> Matrix2<Complex64> {
    expm_c2(&v.matrix())
}

pub fn max_abs_c(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> f64 {
    (a - b).iter().map(|x| x.norm()).fold(0.0, f64::max)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// An su(2) element with components uniform in `[−scale, scale]`.
pub fn random_vector<R: Rng>(rng: &mut R, scale: f64) -> Su2Vector {
    Su2Vector::new(
        rng.random_range(-scale..=scale),
        rng.random_range(-scale..=scale),
        rng.random_range(-scale..=scale),
    )
}

/// Arbitrary (non-canonical) Cayley-Klein parameters.
pub fn random_ck<R: Rng>(rng: &mut R) -> CayleyKlein {
    use std::f64::consts::TAU;
    CayleyKlein::new(
        rng.random_range(-TAU..TAU),
        rng.random_range(-TAU..TAU),
        rng.random_range(-TAU..TAU),
    )
}

pub fn random_third<R: Rng>(rng: &mut R) -> ThirdOrderSystem {
    let mut p = || 10f64.powf(rng.random_range(-1.5..1.5));
    build_third(&ThirdOrderCircuit::new(p(), p(), p()).unwrap()).unwrap()
}

pub fn random_fourth<R: Rng>(rng: &mut R) -> FourthOrderSystem {
    let mut p = || 10f64.powf(rng.random_range(-1.0..1.0));
    build_fourth(&FourthOrderCircuit::new(p(), p(), p(), p()).unwrap()).unwrap()
}

pub fn demo_third() -> ThirdOrderSystem {
    build_third(&ThirdOrderCircuit::new(0.1, 0.2, 0.5).unwrap()).unwrap()
}

pub fn random_unit<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.1 && norm <= 1.0 {
            return v.iter().map(|x| x / norm).collect();
        }
    }
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
