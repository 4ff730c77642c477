//! Lorentz transformations as unimodular spinor matrices.
//!
//! A vector transforms with M -> T M dagger(T), a spinor with P -> T P.
//! Rotations satisfy dagger(T) = bar(T) (unit quaternions), boosts
//! dagger(T) = T.

use crate::error::{Error, Result};
use crate::minkowski::{decode_hermitian_part, MinkowskiVector};
use crate::spinor::{SpinorMatrix, C64};

pub const UNIMODULAR_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug)]
pub struct LorentzTransform {
    t: SpinorMatrix,
}

impl LorentzTransform {
    pub fn new(t: SpinorMatrix) -> Result<Self> {
        let residual = (t.det() - C64::new(1.0, 0.0)).norm();
        if residual > UNIMODULAR_TOL {
            return Err(Error::NotUnimodular { residual });
        }
        Ok(Self { t })
    }

    pub fn identity() -> Self {
        Self { t: SpinorMatrix::identity() }
    }

    /// Rotation by `angle` around the given space axis (need not be normalized).
    pub fn rotation(axis: [f64; 3], angle: f64) -> Result<Self> {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if n == 0.0 {
            return Err(Error::InvalidParameter("rotation axis must be nonzero".into()));
        }
        // generator i * (n . sigma), a pure-vectorial unit quaternion
        let gen = (SpinorMatrix::sigma1() * (axis[0] / n)
            + SpinorMatrix::sigma2() * (axis[1] / n)
            + SpinorMatrix::sigma3() * (axis[2] / n))
            * C64::new(0.0, 1.0);
        let half = 0.5 * angle;
        Self::new(SpinorMatrix::identity() * half.cos() + gen * half.sin())
    }

    /// Boost with rapidity `phi` along the given space axis.
    pub fn boost(axis: [f64; 3], phi: f64) -> Result<Self> {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if n == 0.0 {
            return Err(Error::InvalidParameter("boost axis must be nonzero".into()));
        }
        let dir = SpinorMatrix::sigma1() * (axis[0] / n)
            + SpinorMatrix::sigma2() * (axis[1] / n)
            + SpinorMatrix::sigma3() * (axis[2] / n);
        let half = 0.5 * phi;
        Self::new(SpinorMatrix::identity() * half.cosh() + dir * half.sinh())
    }

    /// (t,z)-boost written as diag(beta, 1/beta) with real beta > 0.
    pub fn boost_z_scale(beta: f64) -> Result<Self> {
        if beta <= 0.0 {
            return Err(Error::InvalidParameter("beta must be positive".into()));
        }
        Self::new(SpinorMatrix::from_reals(beta, 0.0, 0.0, 1.0 / beta))
    }

    pub fn matrix(&self) -> SpinorMatrix {
        self.t
    }

    /// Vector action T M dagger(T); hermiticity and determinant are preserved.
    pub fn apply_vector(&self, m: &MinkowskiVector) -> MinkowskiVector {
        decode_hermitian_part(&(self.t * m.matrix() * self.t.dagger()))
    }

    /// Spinor action T P.
    pub fn apply_spinor(&self, p: &SpinorMatrix) -> SpinorMatrix {
        self.t * *p
    }

    pub fn inverse(&self) -> Self {
        // det = 1, so the inverse is the adjunct
        Self { t: self.t.bar() }
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self { t: self.t * other.t }
    }
}
