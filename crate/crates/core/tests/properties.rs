//! Property suites for the algebra, the polynomial machinery and the sphere
//! grids, checked against independent numeric oracles.

mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use stgraph::minkowski::{mink_decode, scalar_product, MinkowskiVector};
use stgraph::orthopoly::{self, OdeSpec};
use stgraph::quaternion::Quaternion;
use stgraph::sphere::{self, Branch};
use stgraph::spinor::{SpinorMatrix, C64};

#[test]
fn hermitian_determinant_equals_interval_on_1000_samples() {
    let mut r = rng(11);
    for _ in 0..1000 {
        let v = rand_minkowski(&mut r, 2.0);
        let det = v.matrix().det();
        assert!((det.re - v.interval()).abs() < 1e-12);
        assert!(det.im.abs() < 1e-12);
    }
}

#[test]
fn lorentz_action_preserves_determinant_and_hermiticity() {
    let mut r = rng(12);
    for _ in 0..200 {
        let t = rand_unimodular(&mut r);
        let v = rand_minkowski(&mut r, 2.0);
        let image = t.matrix() * v.matrix() * t.matrix().dagger();
        assert!(image.hermitian_residual() < 1e-12);
        assert!((image.det().re - v.interval()).abs() < 1e-10);
        let w = t.apply_vector(&v);
        assert!((w.interval() - v.interval()).abs() < 1e-10);
    }
}

#[test]
fn trace_circularity_on_random_triples() {
    let mut r = rng(13);
    for _ in 0..300 {
        let (a, b, c) = (rand_spinor(&mut r), rand_spinor(&mut r), rand_spinor(&mut r));
        let abc = (a * b * c).trace();
        let bca = (b * c * a).trace();
        let cab = (c * a * b).trace();
        assert!((abc - bca).norm() < 1e-12);
        assert!((abc - cab).norm() < 1e-12);
    }
}

#[test]
fn quaternion_product_closure() {
    let mut r = rng(14);
    for _ in 0..300 {
        let q1 = Quaternion::new(rand_unit_quaternion(&mut r)).unwrap();
        let scale = r.gen_range(0.1..3.0);
        let q2m = rand_unit_quaternion(&mut r) * scale;
        let q2 = Quaternion::new(q2m).unwrap();
        let p = q1.product(&q2).matrix();
        assert!((p.dagger() - p.bar()).norm_max() < 1e-12);
        assert!(p.det().im.abs() < 1e-12);
        assert!(p.det().re >= -1e-12);
    }
}

#[test]
fn scalar_product_is_symmetric_and_real() {
    let mut r = rng(15);
    for _ in 0..200 {
        let a = rand_minkowski(&mut r, 3.0);
        let b = rand_minkowski(&mut r, 3.0);
        let ab = (a.matrix() * b.matrix().bar()).trace();
        assert!(ab.im.abs() < 1e-12);
        assert!((scalar_product(&a, &b) - scalar_product(&b, &a)).abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn mink_round_trip(t in -10.0..10.0f64, x in -10.0..10.0f64, y in -10.0..10.0f64, z in -10.0..10.0f64) {
        let v = MinkowskiVector::new(t, x, y, z);
        let back = mink_decode(&v.matrix()).unwrap();
        // encode stores t+z and t-z, so recovery is exact to one rounding
        let tol = 1e-15 * (1.0 + v.norm_max());
        prop_assert!((back - v).norm_max() <= tol);
    }

    #[test]
    fn adjunct_involution_and_det_identity(
        re in proptest::array::uniform8(-5.0..5.0f64)
    ) {
        let m = SpinorMatrix::new(
            C64::new(re[0], re[1]),
            C64::new(re[2], re[3]),
            C64::new(re[4], re[5]),
            C64::new(re[6], re[7]),
        );
        prop_assert!(m.bar().bar().approx_eq(&m, 0.0));
        let prod = m * m.bar();
        let expect = SpinorMatrix::identity() * m.det();
        prop_assert!(prod.approx_eq(&expect, 1e-10 * m.norm_max().powi(2).max(1.0)));
    }
}

// ---- orthogonal polynomials against the quadrature oracle ----

#[test]
fn hermite_zeros_match_jacobi_matrix_oracle() {
    let spec = OdeSpec::hermite();
    for n in [2usize, 4, 7, 12] {
        let zeros = orthopoly::solve_zeros(&spec, n).unwrap();
        let oracle = hermite_zeros_jacobi(n);
        for (a, b) in zeros.xs.iter().zip(oracle.iter()) {
            assert!((a - b).abs() < 1e-10, "n {n}: {a} vs oracle {b}");
        }
    }
}

#[test]
fn weighting_constants_match_oracle_integrals() {
    // rho_i = int w P_i^2 computed independently by adaptive quadrature
    let cases: Vec<OdeSpec> = vec![
        OdeSpec::hermite(),
        OdeSpec::laguerre(1.2, 0.4).unwrap(),
        OdeSpec::legendre_like(1).unwrap(),
        OdeSpec::legendre_like(2).unwrap(),
    ];
    for spec in &cases {
        for n in [1usize, 2, 4] {
            let zeros = orthopoly::solve_zeros(spec, n).unwrap();
            let ws =
                orthopoly::weight_constants(spec, &zeros, spec.master_integral(n).unwrap()).unwrap();
            for k in 0..n {
                let xs = zeros.xs.clone();
                let pk = move |x: f64| {
                    xs.iter()
                        .enumerate()
                        .filter(|(i, _)| *i != k)
                        .map(|(_, xi)| x - xi)
                        .product::<f64>()
                        .powi(2)
                };
                let oracle = oracle_weighted_integral(spec, 2 * n - 2, &pk);
                assert!(
                    (ws.rhos[k] - oracle).abs() < 1e-9 * oracle.abs(),
                    "family {:?} n {n} k {k}: {} vs oracle {}",
                    spec.family,
                    ws.rhos[k],
                    oracle
                );
                assert!(ws.rhos[k] > 0.0);
            }
        }
    }
}

#[test]
fn master_integral_closed_forms_match_oracle() {
    let cases: Vec<OdeSpec> = vec![
        OdeSpec::hermite(),
        OdeSpec::laguerre(0.99997, 0.0073).unwrap(),
        OdeSpec::legendre_like(3).unwrap(),
    ];
    for spec in &cases {
        for n in [1usize, 3, 5] {
            let zeros = orthopoly::solve_zeros(spec, n).unwrap();
            let xs = zeros.xs.clone();
            let p2 = move |x: f64| poly_from_roots(&xs, x).powi(2);
            let oracle = oracle_weighted_integral(spec, 2 * n, &p2);
            let closed = spec.master_integral(n).unwrap();
            assert!(
                (closed - oracle).abs() < 1e-9 * oracle.abs(),
                "family {:?} n {n}: closed {closed} oracle {oracle}",
                spec.family
            );
        }
    }
}

#[test]
fn master_integral_is_minimal_at_the_zeros() {
    let spec = OdeSpec::hermite();
    let n = 3;
    let zeros = orthopoly::solve_zeros(&spec, n).unwrap();
    let master = |roots: &[f64]| {
        let rs = roots.to_vec();
        oracle_weighted_integral(&spec, 2 * n, &move |x| poly_from_roots(&rs, x).powi(2))
    };
    let base = master(&zeros.xs);
    for k in 0..n {
        for delta in [-1e-3, 1e-3] {
            let mut perturbed = zeros.xs.clone();
            perturbed[k] += delta;
            let value = master(&perturbed);
            assert!(value > base, "perturbing zero {k} by {delta} must increase the integral");
        }
    }
    // cross second derivatives vanish
    let h = 1e-3;
    for i in 0..n {
        for j in (i + 1)..n {
            let mut pp = zeros.xs.clone();
            pp[i] += h;
            pp[j] += h;
            let fpp = master(&pp);
            pp[j] -= 2.0 * h;
            let fpm = master(&pp);
            pp[i] -= 2.0 * h;
            let fmm = master(&pp);
            pp[j] += 2.0 * h;
            let fmp = master(&pp);
            let cross = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            // diagonal curvature 2 rho_i sets the scale
            assert!(cross.abs() < 1e-5 * base.abs().max(1.0), "cross ({i},{j}) = {cross}");
        }
    }
}

#[test]
fn quadrature_exact_to_degree_frontier() {
    let cases: Vec<OdeSpec> = vec![
        OdeSpec::hermite(),
        OdeSpec::laguerre(1.1, 0.5).unwrap(),
        OdeSpec::legendre_like(1).unwrap(),
    ];
    for spec in &cases {
        for n in [2usize, 3, 5] {
            let zeros = orthopoly::solve_zeros(spec, n).unwrap();
            let ws =
                orthopoly::weight_constants(spec, &zeros, spec.master_integral(n).unwrap()).unwrap();
            // exact for monomials up to 2n-1
            for d in 0..=(2 * n - 1) {
                let got = orthopoly::gauss_integrate_values(&zeros, &ws, |x| x.powi(d as i32));
                let oracle = oracle_weighted_integral(spec, d, &move |x| x.powi(d as i32));
                let scale = oracle.abs().max(ws.k_const.abs());
                assert!(
                    (got - oracle).abs() < 1e-10 * scale,
                    "family {:?} n {n} degree {d}: {got} vs {oracle}",
                    spec.family
                );
            }
            // detectably inexact at 2n: the defect equals the master integral
            let d = 2 * n;
            let got = orthopoly::gauss_integrate_values(&zeros, &ws, |x| x.powi(d as i32));
            let oracle = oracle_weighted_integral(spec, d, &move |x| x.powi(d as i32));
            let defect = (got - oracle).abs();
            let master = spec.master_integral(n).unwrap();
            assert!(defect > 0.5 * master, "degree 2n must not be exact");
            assert!((defect - master).abs() < 1e-8 * master.max(1.0) + 1e-9 * oracle.abs());
        }
    }
}

// ---- sphere grids ----

#[test]
fn rotations_preserve_grid_stationarity_and_kappa() {
    let mut r = rng(21);
    for (m, h) in [(1usize, 1usize), (1, 2), (2, 2)] {
        let grid = sphere::build_grid(m, h).unwrap();
        for _ in 0..25 {
            let t = rand_unit_quaternion(&mut r);
            let chis: Vec<C64> = grid.chis.iter().map(|c| sphere::moebius_apply(&t, *c)).collect();
            let residuals = sphere::node_stationarity_residuals(&chis, &grid.edges);
            for res in &residuals {
                assert!(res.norm() < 1e-10, "grid ({m},{h}) rotation residual {}", res.norm());
            }
            for branch in [Branch::Plus, Branch::Minus] {
                let kappa = grid.kappa(branch) as f64;
                let coeffs: Vec<(C64, C64)> = chis
                    .iter()
                    .map(|chi| match branch {
                        Branch::Plus => (C64::new(1.0, 0.0), chi.conj()),
                        Branch::Minus => (*chi, C64::new(1.0, 0.0)),
                    })
                    .collect();
                let res = sphere::ansatz_residual_max(&chis, &coeffs, &grid.edges, kappa);
                assert!(res < 1e-10, "grid ({m},{h}) branch {branch:?} residual {res}");
            }
        }
    }
}

#[test]
fn separation_constant_matches_the_bilinear_edge_sum() {
    // 2 kappa sum |A_i| equals the directed edge sum of
    // trace(bar(A_i) p_i (p_i - p_j)^{-1} A_j)
    for (m, h) in [(1usize, 1usize), (1, 2), (2, 1), (2, 2)] {
        let grid = sphere::build_grid(m, h).unwrap();
        for branch in [Branch::Plus, Branch::Minus] {
            let kappa = grid.kappa(branch) as f64;
            let mats = grid.node_matrices(branch);
            let mut lhs = 0.0;
            for a in &mats {
                lhs += a.det().re;
            }
            lhs *= 2.0 * kappa;
            let mut rhs = C64::new(0.0, 0.0);
            for &(i, j, mult) in &grid.edges {
                let mlt = mult as f64;
                for (k, l) in [(i, j), (j, i)] {
                    let pk = grid.points[k].p.matrix();
                    let pl = grid.points[l].p.matrix();
                    let inv = (pk - pl).inverse().unwrap();
                    rhs += (mats[k].bar() * pk * inv * mats[l]).trace() * mlt;
                }
            }
            assert!(rhs.im.abs() < 1e-10);
            assert!(
                (lhs - rhs.re).abs() < 1e-10 * lhs.abs().max(1.0),
                "grid ({m},{h}) {branch:?}: 2 kappa sum = {lhs}, edge sum = {}",
                rhs.re
            );
        }
    }
}

#[test]
fn angular_lagrangian_is_real_and_gradient_free_at_the_ansatz() {
    for (m, h) in [(1usize, 1usize), (2, 1), (1, 2), (2, 2)] {
        let grid = sphere::build_grid(m, h).unwrap();
        let kappa = grid.kappa(Branch::Plus) as f64;
        let coeffs = grid.coefficients(Branch::Plus);
        let lag = sphere::angular_lagrangian(&grid.chis, &coeffs, &grid.edges, kappa);
        assert!(lag.im.abs() < 1e-12);

        // pack (mu, nu, chi) into reals and check the numeric gradient
        let n = grid.n_nodes();
        let mut params = Vec::with_capacity(6 * n);
        for ((mu, nu), chi) in coeffs.iter().zip(grid.chis.iter()) {
            params.extend_from_slice(&[mu.re, mu.im, nu.re, nu.im, chi.re, chi.im]);
        }
        let edges = grid.edges.clone();
        let f = |p: &[f64]| {
            let mut chis = Vec::with_capacity(n);
            let mut cf = Vec::with_capacity(n);
            for k in 0..n {
                cf.push((
                    C64::new(p[6 * k], p[6 * k + 1]),
                    C64::new(p[6 * k + 2], p[6 * k + 3]),
                ));
                chis.push(C64::new(p[6 * k + 4], p[6 * k + 5]));
            }
            sphere::angular_lagrangian(&chis, &cf, &edges, kappa).re
        };
        let grad = stgraph::graph::numeric_gradient(f, &params);
        let gmax = grad.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        assert!(gmax < 1e-8, "grid ({m},{h}) gradient {gmax}");
    }
}

#[test]
fn edge_handshake_counts() {
    for (m, h) in [(1usize, 1usize), (1, 2), (2, 1), (2, 2), (3, 2)] {
        let grid = sphere::build_grid(m, h).unwrap();
        let l = 2 * (m + h - 1);
        assert_eq!(grid.edges_per_node, l);
        let total: usize = grid.edges.iter().map(|e| e.2 as usize).sum();
        assert_eq!(2 * total, grid.n_nodes() * l, "handshake sum");
    }
}
