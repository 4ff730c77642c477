//! Shared test utilities: independent numeric oracles and seeded random
//! generators. Everything here stays independent of the implementation paths
//! it is used to check.

#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use stgraph::lorentz::LorentzTransform;
use stgraph::minkowski::MinkowskiVector;
use stgraph::orthopoly::OdeSpec;
use stgraph::spinor::{SpinorMatrix, C64};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn rand_complex(rng: &mut StdRng, scale: f64) -> C64 {
    C64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
}

pub fn rand_spinor(rng: &mut StdRng) -> SpinorMatrix {
    SpinorMatrix::new(
        rand_complex(rng, 1.0),
        rand_complex(rng, 1.0),
        rand_complex(rng, 1.0),
        rand_complex(rng, 1.0),
    )
}

pub fn rand_minkowski(rng: &mut StdRng, scale: f64) -> MinkowskiVector {
    MinkowskiVector::new(
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
    )
}

/// Random unit quaternion as a spinor matrix.
pub fn rand_unit_quaternion(rng: &mut StdRng) -> SpinorMatrix {
    loop {
        let q: [f64; 4] = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let n = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt();
        if n > 0.1 {
            let i = C64::new(0.0, 1.0);
            return SpinorMatrix::identity() * (q[0] / n)
                + SpinorMatrix::sigma1() * (i * (q[1] / n))
                + SpinorMatrix::sigma2() * (i * (q[2] / n))
                + SpinorMatrix::sigma3() * (i * (q[3] / n));
        }
    }
}

pub fn rand_rotation(rng: &mut StdRng) -> LorentzTransform {
    LorentzTransform::new(rand_unit_quaternion(rng)).unwrap()
}

/// Random unimodular transformation: rotation composed with a boost of
/// moderate rapidity.
pub fn rand_unimodular(rng: &mut StdRng) -> LorentzTransform {
    let rot = rand_rotation(rng);
    let axis = [
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0f64),
    ];
    let axis = if axis.iter().all(|a| a.abs() < 0.05) { [1.0, 0.0, 0.0] } else { axis };
    let boost = LorentzTransform::boost(axis, rng.gen_range(-0.8..0.8)).unwrap();
    boost.compose(&rot)
}

/// Composite Simpson quadrature with panel doubling until two successive
/// refinements agree to the relative tolerance. Terminates by construction.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    let composite = |panels: usize| -> f64 {
        let h = (b - a) / panels as f64;
        let mut acc = f(a) + f(b);
        for i in 1..panels {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(a + h * i as f64);
        }
        acc * h / 3.0
    };
    let mut panels = 256usize;
    let mut prev = composite(panels);
    loop {
        panels *= 2;
        let next = composite(panels);
        let scale = next.abs().max(prev.abs()).max(1e-300);
        if (next - prev).abs() <= rel_tol * scale || panels >= (1 << 22) {
            // one Richardson step on the final pair
            return next + (next - prev) / 15.0;
        }
        prev = next;
    }
}

/// Oracle integral of w(x) g(x) over the family's interval; infinite ends are
/// truncated where the weight (times the polynomial growth allowance) decays
/// below 1e-18 of the peak.
pub fn oracle_weighted_integral(spec: &OdeSpec, degree_hint: usize, g: &dyn Fn(f64) -> f64) -> f64 {
    let integrand = move |x: f64| spec.weight(x) * g(x);
    let (a, b) = spec.interval;
    if a.is_finite() && b.is_finite() {
        return adaptive_simpson(&integrand, a, b, 1e-13);
    }
    match spec.family {
        stgraph::orthopoly::Family::Hermite => {
            // exp(-x^2) x^d < 1e-18 * peak for |x| beyond this cut
            let cut = (degree_hint as f64 + 50.0).sqrt() + 6.0;
            adaptive_simpson(&integrand, -cut, cut, 1e-13)
        }
        stgraph::orthopoly::Family::Laguerre { gamma, lambda } => {
            let power = 2.0 * gamma - 1.0 + degree_hint as f64;
            // solve 2 lambda r = power ln(r) + 60 crudely by doubling
            let mut cut = (power + 60.0) / (2.0 * lambda);
            while -2.0 * lambda * cut + power * cut.ln() > -60.0 {
                cut *= 2.0;
            }
            adaptive_simpson(&integrand, 1e-12, cut, 1e-13)
        }
        _ => panic!("custom families need explicit bounds"),
    }
}

/// Monic polynomial with the given roots, evaluated at x.
pub fn poly_from_roots(roots: &[f64], x: f64) -> f64 {
    roots.iter().map(|r| x - r).product()
}

/// Independent Hermite-zero oracle: eigenvalues of the symmetric Jacobi
/// matrix of the monic recurrence (off-diagonals sqrt(k/2)).
pub fn hermite_zeros_jacobi(n: usize) -> Vec<f64> {
    let mut m = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = (k as f64 / 2.0).sqrt();
        m[(k - 1, k)] = b;
        m[(k, k - 1)] = b;
    }
    let mut eigs: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eigs
}
