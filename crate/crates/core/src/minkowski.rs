//! Minkowski 4-vectors as hermitian spinor matrices.
//!
//! (t,x,y,z) maps to t*I + x*s1 + y*s2 + z*s3. The determinant of the image
//! is the invariant interval t^2 - x^2 - y^2 - z^2; the trace is 2t; the
//! adjunct is a space inversion.

use crate::error::{Error, Result};
use crate::spinor::{SpinorMatrix, C64};
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

/// Hermiticity tolerance used when decoding solver output back to a 4-vector.
pub const HERMITICITY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinkowskiVector {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl MinkowskiVector {
    pub const fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        Self { t, x, y, z }
    }

    pub const fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0)
    }

    /// Pure time unit vector (the identity matrix).
    pub const fn time_unit() -> Self {
        Self::new(1.0, 0.0, 0.0, 0.0)
    }

    pub const fn spatial(x: f64, y: f64, z: f64) -> Self {
        Self::new(0.0, x, y, z)
    }

    /// The hermitian matrix image (t+z, x-iy; x+iy, t-z).
    pub fn matrix(&self) -> SpinorMatrix {
        SpinorMatrix::new(
            C64::new(self.t + self.z, 0.0),
            C64::new(self.x, -self.y),
            C64::new(self.x, self.y),
            C64::new(self.t - self.z, 0.0),
        )
    }

    /// Invariant interval t^2 - x^2 - y^2 - z^2 (the determinant of the image).
    pub fn interval(&self) -> f64 {
        self.t * self.t - self.x * self.x - self.y * self.y - self.z * self.z
    }

    /// Euclidean length of the space part.
    pub fn spatial_norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn norm_max(&self) -> f64 {
        self.t.abs().max(self.x.abs()).max(self.y.abs()).max(self.z.abs())
    }

    pub fn is_timelike_forward(&self) -> bool {
        self.interval() > 0.0 && self.t > 0.0
    }

    pub fn is_spacelike(&self) -> bool {
        self.interval() < 0.0
    }
}

/// Encodes (t,x,y,z) as a hermitian spinor matrix.
pub fn mink_encode(t: f64, x: f64, y: f64, z: f64) -> SpinorMatrix {
    MinkowskiVector::new(t, x, y, z).matrix()
}

/// Decodes a hermitian matrix back to (t,x,y,z).
///
/// Fails when the matrix is farther than [`HERMITICITY_TOL`] from hermitian,
/// which signals that the input is not a valid Minkowski carrier.
pub fn mink_decode(m: &SpinorMatrix) -> Result<MinkowskiVector> {
    mink_decode_tol(m, HERMITICITY_TOL)
}

pub fn mink_decode_tol(m: &SpinorMatrix, tol: f64) -> Result<MinkowskiVector> {
    let residual = m.hermitian_residual();
    if residual > tol {
        return Err(Error::NotHermitian { residual });
    }
    Ok(decode_hermitian_part(m))
}

/// Decodes the hermitian part without checking; used where hermiticity holds
/// by construction up to rounding.
pub fn decode_hermitian_part(m: &SpinorMatrix) -> MinkowskiVector {
    let t = 0.5 * (m.a.re + m.d.re);
    let z = 0.5 * (m.a.re - m.d.re);
    let x = 0.5 * (m.b.re + m.c.re);
    let y = 0.5 * (m.c.im - m.b.im);
    MinkowskiVector::new(t, x, y, z)
}

/// Scalar product trace(A * bar(B)) = 2 (tA tB - xA xB - yA yB - zA zB).
pub fn scalar_product(a: &MinkowskiVector, b: &MinkowskiVector) -> f64 {
    (a.matrix() * b.matrix().bar()).trace().re
}

impl Add for MinkowskiVector {
    type Output = MinkowskiVector;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.t + rhs.t, self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for MinkowskiVector {
    type Output = MinkowskiVector;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.t - rhs.t, self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Neg for MinkowskiVector {
    type Output = MinkowskiVector;
    fn neg(self) -> Self {
        Self::new(-self.t, -self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for MinkowskiVector {
    type Output = MinkowskiVector;
    fn mul(self, rhs: f64) -> Self {
        Self::new(self.t * rhs, self.x * rhs, self.y * rhs, self.z * rhs)
    }
}
