//! Quaternions as the spinor-matrix subalgebra with dagger(Q) = bar(Q).
//!
//! Their determinant is s^2 + x^2 + y^2 + z^2 >= 0, so unit quaternions are
//! exactly the SU(2) rotations. A pure-vectorial unit quaternion U (with
//! dagger(U) = bar(U) = -U and det 1) generates the one-parameter family
//! exp(lambda U) = cos(lambda) I + sin(lambda) U.

use crate::error::{Error, Result};
use crate::spinor::{SpinorMatrix, C64};

pub const QUATERNION_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug)]
pub struct Quaternion {
    m: SpinorMatrix,
}

impl Quaternion {
    pub fn new(m: SpinorMatrix) -> Result<Self> {
        let residual = (m.dagger() - m.bar()).norm_max();
        if residual > QUATERNION_TOL * m.norm_max().max(1.0) {
            return Err(Error::NotQuaternion { residual });
        }
        Ok(Self { m })
    }

    /// s + x i + y j + z k with units (i,j,k) = (i s1, i s2, i s3).
    pub fn from_components(s: f64, x: f64, y: f64, z: f64) -> Self {
        let i = C64::new(0.0, 1.0);
        let m = SpinorMatrix::identity() * s
            + SpinorMatrix::sigma1() * (i * x)
            + SpinorMatrix::sigma2() * (i * y)
            + SpinorMatrix::sigma3() * (i * z);
        Self { m }
    }

    pub fn identity() -> Self {
        Self { m: SpinorMatrix::identity() }
    }

    pub fn matrix(&self) -> SpinorMatrix {
        self.m
    }

    /// Norm as the matrix determinant; always a non-negative real.
    pub fn norm_det(&self) -> f64 {
        self.m.det().re
    }

    pub fn product(&self, other: &Self) -> Self {
        // closed under multiplication
        Self { m: self.m * other.m }
    }

    pub fn is_pure_unit(&self, tol: f64) -> bool {
        (self.m.dagger() + self.m).norm_max() <= tol
            && (self.m.det() - C64::new(1.0, 0.0)).norm() <= tol
    }
}

/// The fixed time-dependency gauge factor S = diag(i, -i).
///
/// S is a pure-vectorial unit quaternion (dagger(S) = -S, det(S) = 1,
/// S^2 = -I); any other choice related by conjugation gives the same sums.
pub fn gauge_s() -> SpinorMatrix {
    SpinorMatrix::new(
        C64::new(0.0, 1.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, -1.0),
    )
}

/// exp(lambda U) = cos(lambda) I + sin(lambda) U for pure-vectorial unit U.
pub fn quat_exp(u: &Quaternion, lambda: f64) -> Result<Quaternion> {
    let m = u.matrix();
    let residual = (m.dagger() + m)
        .norm_max()
        .max((m.det() - C64::new(1.0, 0.0)).norm());
    if residual > QUATERNION_TOL {
        return Err(Error::NotPureUnit { residual });
    }
    Ok(Quaternion {
        m: SpinorMatrix::identity() * lambda.cos() + m * lambda.sin(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauge_factor_is_pure_unit() {
        let s = Quaternion::new(gauge_s()).unwrap();
        assert!(s.is_pure_unit(1e-15));
        assert!((gauge_s() * gauge_s()).approx_eq(&-SpinorMatrix::identity(), 0.0));
    }

    #[test]
    fn exp_at_zero_is_identity() {
        let u = Quaternion::new(gauge_s()).unwrap();
        let q = quat_exp(&u, 0.0).unwrap();
        assert!(q.matrix().approx_eq(&SpinorMatrix::identity(), 0.0));
    }

    #[test]
    fn exp_at_half_pi_reproduces_generator() {
        let u = Quaternion::new(gauge_s()).unwrap();
        let q = quat_exp(&u, std::f64::consts::FRAC_PI_2).unwrap();
        assert!(q.matrix().approx_eq(&gauge_s(), 1e-16));
    }

    #[test]
    fn exp_group_law() {
        let u = Quaternion::from_components(0.0, 0.6, -0.48, 0.64);
        let u = Quaternion::new(u.matrix() * (1.0 / u.norm_det().sqrt())).unwrap();
        let (a, b) = (0.37, -1.21);
        let lhs = quat_exp(&u, a).unwrap().product(&quat_exp(&u, b).unwrap());
        let rhs = quat_exp(&u, a + b).unwrap();
        assert!(lhs.matrix().approx_eq(&rhs.matrix(), 1e-14));
    }

    #[test]
    fn exp_rejects_non_pure_unit() {
        let q = Quaternion::from_components(0.5, 0.5, 0.5, 0.5);
        assert!(matches!(quat_exp(&q, 1.0), Err(Error::NotPureUnit { .. })));
    }

    #[test]
    fn determinant_is_component_norm() {
        let q = Quaternion::from_components(1.0, -2.0, 0.5, 0.25);
        assert!((q.norm_det() - (1.0 + 4.0 + 0.25 + 0.0625)).abs() < 1e-14);
        assert!(q.matrix().det().im.abs() < 1e-15);
    }
}
