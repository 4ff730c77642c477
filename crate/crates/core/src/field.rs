//! Differential calculus for matrix fields and the electromagnetic potential.
//!
//! The gradient of a scalar field is carried as the formal Minkowski matrix
//! of its four partials, so that the total differential reads
//! dU = (1/2) trace(dx * bar(grad)). Fields supply analytic partials through
//! callbacks; central finite differences serve as fallback and as the test
//! oracle.

use crate::minkowski::{decode_hermitian_part, MinkowskiVector};
use crate::spinor::SpinorMatrix;
use std::sync::Arc;

/// Four partial derivatives, ordered (d/dt, d/dx, d/dy, d/dz).
pub type Partials<T> = [T; 4];

/// Encodes the gradient of a real scalar field as a Minkowski matrix with
/// contravariant components (g_t, -g_x, -g_y, -g_z).
pub fn gradient_matrix(g: &Partials<f64>) -> SpinorMatrix {
    MinkowskiVector::new(g[0], -g[1], -g[2], -g[3]).matrix()
}

/// bar of the gradient matrix, (g_t, +g_x, +g_y, +g_z).
pub fn bar_gradient_matrix(g: &Partials<f64>) -> SpinorMatrix {
    MinkowskiVector::new(g[0], g[1], g[2], g[3]).matrix()
}

/// Total differential (1/2) trace(dx * bar(grad)) = dt g_t + dx g_x + dy g_y + dz g_z.
pub fn directional_derivative(g: &Partials<f64>, dx: &MinkowskiVector) -> f64 {
    0.5 * (dx.matrix() * gradient_matrix(g).bar()).trace().re
}

/// Central finite-difference gradient of a scalar field, step 1e-6 * scale.
pub fn fd_scalar_gradient<F>(f: F, x: &MinkowskiVector, scale: f64) -> Partials<f64>
where
    F: Fn(&MinkowskiVector) -> f64,
{
    let h = 1e-6 * scale.abs().max(1.0);
    let mut out = [0.0; 4];
    for (idx, slot) in out.iter_mut().enumerate() {
        let mut fwd = *x;
        let mut bck = *x;
        match idx {
            0 => {
                fwd.t += h;
                bck.t -= h;
            }
            1 => {
                fwd.x += h;
                bck.x -= h;
            }
            2 => {
                fwd.y += h;
                bck.y -= h;
            }
            _ => {
                fwd.z += h;
                bck.z -= h;
            }
        }
        *slot = (f(&fwd) - f(&bck)) / (2.0 * h);
    }
    out
}

/// Central finite-difference partials of a vector field.
pub fn fd_vector_partials<F>(f: F, x: &MinkowskiVector, scale: f64) -> Partials<MinkowskiVector>
where
    F: Fn(&MinkowskiVector) -> MinkowskiVector,
{
    let h = 1e-6 * scale.abs().max(1.0);
    let mut out = [MinkowskiVector::zero(); 4];
    for (idx, slot) in out.iter_mut().enumerate() {
        let mut fwd = *x;
        let mut bck = *x;
        match idx {
            0 => {
                fwd.t += h;
                bck.t -= h;
            }
            1 => {
                fwd.x += h;
                bck.x -= h;
            }
            2 => {
                fwd.y += h;
                bck.y -= h;
            }
            _ => {
                fwd.z += h;
                bck.z -= h;
            }
        }
        *slot = (f(&fwd) - f(&bck)) * (0.5 / h);
    }
    out
}

type VectorFieldFn = Arc<dyn Fn(&MinkowskiVector) -> MinkowskiVector + Send + Sync>;
type VectorPartialsFn = Arc<dyn Fn(&MinkowskiVector) -> Partials<MinkowskiVector> + Send + Sync>;

/// Electromagnetic vector potential with analytic first partials and charge.
#[derive(Clone)]
pub struct PotentialField {
    pub charge: f64,
    a: VectorFieldFn,
    da: VectorPartialsFn,
}

impl PotentialField {
    pub fn new(
        charge: f64,
        a: impl Fn(&MinkowskiVector) -> MinkowskiVector + Send + Sync + 'static,
        da: impl Fn(&MinkowskiVector) -> Partials<MinkowskiVector> + Send + Sync + 'static,
    ) -> Self {
        Self {
            charge,
            a: Arc::new(a),
            da: Arc::new(da),
        }
    }

    pub fn zero() -> Self {
        Self::new(1.0, |_| MinkowskiVector::zero(), |_| [MinkowskiVector::zero(); 4])
    }

    pub fn constant(a0: MinkowskiVector) -> Self {
        Self::new(1.0, move |_| a0, |_| [MinkowskiVector::zero(); 4])
    }

    /// Static scalar potential A = (V(x), 0, 0, 0) from analytic V and grad V.
    pub fn scalar_static(
        charge: f64,
        v: impl Fn(&MinkowskiVector) -> f64 + Send + Sync + 'static,
        grad_v: impl Fn(&MinkowskiVector) -> [f64; 3] + Send + Sync + 'static,
    ) -> Self {
        Self::new(
            charge,
            move |x| MinkowskiVector::new(v(x), 0.0, 0.0, 0.0),
            move |x| {
                let g = grad_v(x);
                [
                    MinkowskiVector::zero(),
                    MinkowskiVector::new(g[0], 0.0, 0.0, 0.0),
                    MinkowskiVector::new(g[1], 0.0, 0.0, 0.0),
                    MinkowskiVector::new(g[2], 0.0, 0.0, 0.0),
                ]
            },
        )
    }

    /// Uniform electric field of strength e0 along +z: V = -e0 z.
    pub fn uniform_electric_z(charge: f64, e0: f64) -> Self {
        Self::scalar_static(charge, move |x| -e0 * x.z, move |_| [0.0, 0.0, -e0])
    }

    /// Attractive Coulomb potential e*A = alpha / r with unit charge folded in.
    pub fn coulomb(alpha: f64) -> Self {
        Self::scalar_static(
            1.0,
            move |x| {
                let r = x.spatial_norm();
                alpha / r
            },
            move |x| {
                let r = x.spatial_norm();
                let s = -alpha / (r * r * r);
                [s * x.x, s * x.y, s * x.z]
            },
        )
    }

    pub fn a(&self, x: &MinkowskiVector) -> MinkowskiVector {
        (self.a)(x)
    }

    pub fn partials(&self, x: &MinkowskiVector) -> Partials<MinkowskiVector> {
        (self.da)(x)
    }

    /// Gradient of the scalar field x -> trace(bar(A(x)) * C) for constant C.
    pub fn bilinear_trace_gradient(&self, x: &MinkowskiVector, c: &SpinorMatrix) -> Partials<f64> {
        let da = self.partials(x);
        let mut out = [0.0; 4];
        for (slot, d) in out.iter_mut().zip(da.iter()) {
            *slot = (d.matrix().bar() * *c).trace().re;
        }
        out
    }

    /// Potential transformed by a Lorentz map: A'(x) = T A(T^-1 x dagger(T)^-1) dagger(T),
    /// with exact chain-rule partials. Used to verify covariance of trajectories.
    pub fn lorentz_transformed(&self, t: &crate::lorentz::LorentzTransform) -> Self {
        let tm = t.matrix();
        let tinv = tm.bar(); // det = 1
        let field = self.clone();
        let field2 = self.clone();
        let charge = self.charge;

        let pull_back = move |xp: &MinkowskiVector| {
            decode_hermitian_part(&(tinv * xp.matrix() * tinv.dagger()))
        };
        let pull_back2 = pull_back;

        let a = move |xp: &MinkowskiVector| {
            let x = pull_back(xp);
            decode_hermitian_part(&(tm * field.a(&x).matrix() * tm.dagger()))
        };
        let da = move |xp: &MinkowskiVector| {
            let x = pull_back2(xp);
            let dax = field2.partials(&x);
            // jacobian of x = T^-1 x' dagger(T)^-1 applied to unit directions of x'
            let units = [
                MinkowskiVector::new(1.0, 0.0, 0.0, 0.0),
                MinkowskiVector::new(0.0, 1.0, 0.0, 0.0),
                MinkowskiVector::new(0.0, 0.0, 1.0, 0.0),
                MinkowskiVector::new(0.0, 0.0, 0.0, 1.0),
            ];
            let mut out = [MinkowskiVector::zero(); 4];
            for (slot, unit) in out.iter_mut().zip(units.iter()) {
                let dx = decode_hermitian_part(&(tinv * unit.matrix() * tinv.dagger()));
                let da_dir = dax[0] * dx.t + dax[1] * dx.x + dax[2] * dx.y + dax[3] * dx.z;
                *slot = decode_hermitian_part(&(tm * da_dir.matrix() * tm.dagger()));
            }
            out
        };
        Self::new(charge, a, da)
    }
}

/// Traceless electromagnetic field tensor F with decomposition F = E + iB.
#[derive(Clone, Copy, Debug)]
pub struct FieldTensor {
    pub f: SpinorMatrix,
}

impl FieldTensor {
    /// Electric part: the hermitian component, a traceless space vector.
    pub fn electric(&self) -> MinkowskiVector {
        decode_hermitian_part(&self.f.hermitian_part())
    }

    /// Magnetic part: the anti-hermitian component divided by i.
    pub fn magnetic(&self) -> MinkowskiVector {
        decode_hermitian_part(&self.f.antihermitian_part())
    }
}

/// Field tensor F = (1/2)(bar(d) A - bar(A) d) assembled from the potential's
/// analytic partials. The differential operator carries contravariant
/// components, so bar(d) = dt + sigma_k dk acting right and
/// d = dt - sigma_k dk acting left.
pub fn field_tensor(field: &PotentialField, x: &MinkowskiVector) -> FieldTensor {
    let da = field.partials(x);
    let d0 = da[0].matrix();
    let sigma = [SpinorMatrix::sigma1(), SpinorMatrix::sigma2(), SpinorMatrix::sigma3()];

    // bar(d) acting on A: dt A + sum_k sigma_k (dk A)
    let mut left = d0;
    for k in 0..3 {
        left = left + sigma[k] * da[k + 1].matrix();
    }
    // bar(A) acted on by d from the right: dt bar(A) - sum_k (dk bar(A)) sigma_k
    let mut right = d0.bar();
    for k in 0..3 {
        right = right - da[k + 1].matrix().bar() * sigma[k];
    }
    FieldTensor { f: (left - right) * 0.5 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directional_derivative_matches_finite_difference() {
        // analytic scalar field t^2 x - y z + sin(z)
        let f = |v: &MinkowskiVector| v.t * v.t * v.x - v.y * v.z + v.z.sin();
        let x = MinkowskiVector::new(0.7, -1.2, 0.4, 0.9);
        let grad = [
            2.0 * x.t * x.x,
            x.t * x.t,
            -x.z,
            -x.y + x.z.cos(),
        ];
        let fd = fd_scalar_gradient(f, &x, 1.0);
        for k in 0..4 {
            assert!((grad[k] - fd[k]).abs() < 1e-9, "component {k}");
        }
        // total differential against direct evaluation, quadratic in |dx|
        let dx = MinkowskiVector::new(1e-4, -2e-4, 0.5e-4, 1.5e-4);
        let lin = directional_derivative(&grad, &dx);
        let exact = f(&(x + dx)) - f(&x);
        assert!((lin - exact).abs() < 1e-7 * 1.0);
        let dx2 = dx * 0.5;
        let lin2 = directional_derivative(&grad, &dx2);
        let exact2 = f(&(x + dx2)) - f(&x);
        // halving dx quarters the linearization error
        let r = (lin - exact).abs() / (lin2 - exact2).abs();
        assert!(r > 3.0 && r < 5.0, "ratio {r}");
    }

    #[test]
    fn constant_potential_gives_zero_tensor() {
        let field = PotentialField::constant(MinkowskiVector::new(0.3, 0.1, -0.2, 0.5));
        let f = field_tensor(&field, &MinkowskiVector::new(0.0, 1.0, 2.0, 3.0));
        assert!(f.f.norm_max() < 1e-15);
    }

    #[test]
    fn coulomb_potential_has_radial_electric_field() {
        let alpha = 1.0 / 137.0;
        let field = PotentialField::coulomb(alpha);
        let x = MinkowskiVector::new(0.0, 1.0, 2.0, -2.0);
        let r = x.spatial_norm();
        let f = field_tensor(&field, &x);
        assert!(f.f.trace().norm() < 1e-15);
        let e = f.electric();
        let scale = alpha / (r * r);
        // E = grad(alpha/r): radial, magnitude alpha/r^2, pointing inward,
        // so the force on the particle is attractive
        assert!((e.x + scale * x.x / r).abs() < 1e-12);
        assert!((e.y + scale * x.y / r).abs() < 1e-12);
        assert!((e.z + scale * x.z / r).abs() < 1e-12);
        let norm = (e.x * e.x + e.y * e.y + e.z * e.z).sqrt();
        assert!((norm - scale).abs() < 1e-12);
        assert!(f.magnetic().norm_max() < 1e-13);
        // analytic partials agree with the finite-difference oracle
        let da = field.partials(&x);
        let fd = fd_vector_partials(|y| field.a(y), &x, r);
        for k in 0..4 {
            assert!((da[k] - fd[k]).norm_max() < 1e-7, "partial {k}");
        }
    }

    #[test]
    fn linear_potential_gives_constant_tensor() {
        let field = PotentialField::uniform_electric_z(1.0, 0.01);
        let f1 = field_tensor(&field, &MinkowskiVector::new(0.0, 0.0, 0.0, 1.0));
        let f2 = field_tensor(&field, &MinkowskiVector::new(5.0, -2.0, 1.0, -4.0));
        assert!((f1.f - f2.f).norm_max() < 1e-16);
        let e = f1.electric();
        assert!((e.z + 0.01).abs() < 1e-15);
        assert!(e.x.abs() < 1e-15 && e.y.abs() < 1e-15 && e.t.abs() < 1e-15);
    }
}
