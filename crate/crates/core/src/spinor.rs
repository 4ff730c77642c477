//! 2x2 complex spinor-matrix algebra.
//!
//! A single matrix type carries every entity of the formalism: spinors,
//! Minkowski vectors (hermitian subset), Lorentz transformations (unimodular
//! subset), quaternions and field tensors. The characteristic operation is
//! the adjunct `bar`: M -> (d, -b; -c, a), which satisfies
//! `M * bar(M) = det(M) * I` and acts as a spatial inversion on hermitian
//! matrices.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

pub type C64 = Complex64;

/// General 2x2 complex matrix, row-major entries (a b; c d).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinorMatrix {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl SpinorMatrix {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Self { a, b, c, d }
    }

    pub fn from_reals(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new(C64::new(a, 0.0), C64::new(b, 0.0), C64::new(c, 0.0), C64::new(d, 0.0))
    }

    pub fn zero() -> Self {
        Self::from_reals(0.0, 0.0, 0.0, 0.0)
    }

    pub fn identity() -> Self {
        Self::from_reals(1.0, 0.0, 0.0, 1.0)
    }

    /// Pauli matrix sigma_1 = (0 1; 1 0).
    pub fn sigma1() -> Self {
        Self::from_reals(0.0, 1.0, 1.0, 0.0)
    }

    /// Pauli matrix sigma_2 = (0 -i; i 0).
    pub fn sigma2() -> Self {
        Self::new(
            C64::new(0.0, 0.0),
            C64::new(0.0, -1.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, 0.0),
        )
    }

    /// Pauli matrix sigma_3 = (1 0; 0 -1).
    pub fn sigma3() -> Self {
        Self::from_reals(1.0, 0.0, 0.0, -1.0)
    }

    /// The adjunct (d, -b; -c, a). `M * bar(M) = det(M) * I`.
    pub fn bar(&self) -> Self {
        Self::new(self.d, -self.b, -self.c, self.a)
    }

    /// Hermitian conjugate (conjugate transpose).
    pub fn dagger(&self) -> Self {
        Self::new(self.a.conj(), self.c.conj(), self.b.conj(), self.d.conj())
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self::new(self.a.conj(), self.b.conj(), self.c.conj(), self.d.conj())
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.a, self.c, self.b, self.d)
    }

    pub fn trace(&self) -> C64 {
        self.a + self.d
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    /// bar(dagger(M)); order of the two operations does not matter.
    pub fn bar_dagger(&self) -> Self {
        self.dagger().bar()
    }

    /// Largest entry magnitude.
    pub fn norm_max(&self) -> f64 {
        self.a
            .norm()
            .max(self.b.norm())
            .max(self.c.norm())
            .max(self.d.norm())
    }

    pub fn norm_fro(&self) -> f64 {
        (self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr() + self.d.norm_sqr()).sqrt()
    }

    /// max-norm of M - dagger(M).
    pub fn hermitian_residual(&self) -> f64 {
        (*self - self.dagger()).norm_max()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_residual() <= tol
    }

    /// (M + dagger(M)) / 2.
    pub fn hermitian_part(&self) -> Self {
        (*self + self.dagger()) * 0.5
    }

    /// (M - dagger(M)) / 2i.
    pub fn antihermitian_part(&self) -> Self {
        (*self - self.dagger()) * C64::new(0.0, -0.5)
    }

    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        let scale = self.norm_max();
        if det.norm() <= 1e-14 * (scale * scale).max(f64::MIN_POSITIVE) {
            return Err(Error::Singular { det_abs: det.norm() });
        }
        Ok(self.bar() * (C64::new(1.0, 0.0) / det))
    }

    /// First-order inverse of X + delta: (I - X^-1 delta) X^-1.
    /// The residual of (X + delta) * result - I is quadratic in |delta|.
    pub fn perturbed_inverse(&self, delta: &Self) -> Result<Self> {
        let xinv = self.inverse()?;
        Ok((Self::identity() - xinv * *delta) * xinv)
    }

    /// Principal square root of a hermitian positive-definite matrix.
    pub fn sqrt_positive(&self) -> Result<Self> {
        let res = self.hermitian_residual();
        if res > 1e-9 * self.norm_max().max(1.0) {
            return Err(Error::NotHermitian { residual: res });
        }
        let det = self.det().re;
        let tr = self.trace().re;
        if det <= 0.0 || tr <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "matrix is not positive definite (trace {tr:.3e}, det {det:.3e})"
            )));
        }
        let s = det.sqrt();
        let t = (tr + 2.0 * s).sqrt();
        Ok((*self + Self::identity() * s) * (1.0 / t))
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (*self - *other).norm_max() <= tol
    }
}

impl Add for SpinorMatrix {
    type Output = SpinorMatrix;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.a + rhs.a, self.b + rhs.b, self.c + rhs.c, self.d + rhs.d)
    }
}

impl Sub for SpinorMatrix {
    type Output = SpinorMatrix;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.a - rhs.a, self.b - rhs.b, self.c - rhs.c, self.d - rhs.d)
    }
}

impl Neg for SpinorMatrix {
    type Output = SpinorMatrix;
    fn neg(self) -> Self {
        Self::new(-self.a, -self.b, -self.c, -self.d)
    }
}

impl Mul for SpinorMatrix {
    type Output = SpinorMatrix;
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.a * rhs.a + self.b * rhs.c,
            self.a * rhs.b + self.b * rhs.d,
            self.c * rhs.a + self.d * rhs.c,
            self.c * rhs.b + self.d * rhs.d,
        )
    }
}

impl Mul<C64> for SpinorMatrix {
    type Output = SpinorMatrix;
    fn mul(self, rhs: C64) -> Self {
        Self::new(self.a * rhs, self.b * rhs, self.c * rhs, self.d * rhs)
    }
}

impl Mul<f64> for SpinorMatrix {
    type Output = SpinorMatrix;
    fn mul(self, rhs: f64) -> Self {
        self * C64::new(rhs, 0.0)
    }
}
