//! Variational bound-state solvers.
//!
//! The radial problem couples 2n linear spinor-amplitude equations with n
//! nonlinear node equations and one normalization; damped Newton over the
//! 3n+1 unknowns (f_i, g_i, r_i, eps) solves it, seeded from the
//! nonrelativistic energy guess and Laguerre-type zeros so nothing about the
//! closed-form spectrum enters the iteration.

use crate::error::{Error, Result};
use crate::field::PotentialField;
use crate::graph::{join_spinor, numeric_gradient, StationaryGraph};
use crate::minkowski::MinkowskiVector;
use crate::newton::{self, NewtonOptions};
use crate::orthopoly::{self, OdeSpec};
use crate::sphere::{Branch, SphereGrid};
use crate::spinor::SpinorMatrix;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Fine-structure constant default used throughout the command-line surface.
pub const FINE_STRUCTURE: f64 = 1.0 / 137.035999;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct AtomParams {
    pub mass: f64,
    pub alpha: f64,
    /// Angular separation eigenvalue, nonzero integer.
    pub kappa: i32,
    /// Number of spheres; the radial quantum number is n_spheres - 1.
    pub n_spheres: usize,
}

impl AtomParams {
    pub fn new(mass: f64, alpha: f64, kappa: i32, n_spheres: usize) -> Result<Self> {
        let p = Self { mass, alpha, kappa, n_spheres };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.mass <= 0.0 {
            return Err(Error::InvalidParameter("mass must be positive".into()));
        }
        if self.kappa == 0 {
            return Err(Error::InvalidParameter("kappa must be a nonzero integer".into()));
        }
        if (self.kappa * self.kappa) as f64 <= self.alpha * self.alpha {
            return Err(Error::InvalidParameter(
                "kappa^2 must exceed alpha^2 for a bound state".into(),
            ));
        }
        if self.n_spheres == 0 || self.n_spheres > 8 {
            return Err(Error::InvalidParameter(
                "n_spheres must lie between 1 and 8 (desk scale)".into(),
            ));
        }
        Ok(())
    }

    pub fn gamma(&self) -> f64 {
        ((self.kappa * self.kappa) as f64 - self.alpha * self.alpha).sqrt()
    }

    pub fn n_radial(&self) -> usize {
        self.n_spheres - 1
    }
}

/// Closed-form energy level eps = m / sqrt(1 + (alpha/(gamma + n_r))^2).
pub fn sommerfeld_energy(params: &AtomParams) -> f64 {
    let ratio = params.alpha / (params.gamma() + params.n_radial() as f64);
    params.mass / (1.0 + ratio * ratio).sqrt()
}

/// Bound radial state: radii, amplitude pairs, energy and the decay
/// exponents of the associated weight.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RadialState {
    pub radii: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub epsilon: f64,
    pub gamma: f64,
    pub lambda_exp: f64,
    pub field_residual: f64,
    pub node_residual: f64,
}

/// Residuals of the coupled radial system at (f, g, r, eps):
/// 2n amplitude equations, n node equations, then the normalization.
fn radial_residuals(params: &AtomParams, z: &[f64]) -> Vec<f64> {
    let n = params.n_spheres;
    let (fs, rest) = z.split_at(n);
    let (gs, rest) = rest.split_at(n);
    let (rs, eps_slice) = rest.split_at(n);
    let eps = eps_slice[0];
    let kappa = params.kappa as f64;
    let m = params.mass;
    let alpha = params.alpha;

    let mut out = Vec::with_capacity(3 * n + 1);
    for i in 0..n {
        let eps_i = eps + alpha / rs[i];
        let mut sum_g = 0.0;
        let mut sum_f = 0.0;
        for j in 0..n {
            if j != i {
                sum_g += gs[j] / (rs[i] - rs[j]);
                sum_f += fs[j] / (rs[i] - rs[j]);
            }
        }
        out.push((eps_i - m) * fs[i] - kappa / rs[i] * gs[i] + sum_g);
        out.push((eps_i + m) * gs[i] - kappa / rs[i] * fs[i] - sum_f);
    }
    for i in 0..n {
        let mut cross = 0.0;
        for j in 0..n {
            if j != i {
                let d = rs[i] - rs[j];
                cross += (fs[i] * gs[j] - gs[i] * fs[j]) / (d * d);
            }
        }
        out.push(
            -alpha / (rs[i] * rs[i]) * (fs[i] * fs[i] + gs[i] * gs[i])
                + 2.0 * kappa * fs[i] * gs[i] / (rs[i] * rs[i])
                - 2.0 * cross,
        );
    }
    let norm: f64 = fs.iter().zip(gs.iter()).map(|(f, g)| f * f + g * g).sum();
    out.push(norm - 1.0);
    out
}

/// Amplitude equations as an eigenvalue problem at fixed radii: M y = -eps y
/// over y = (f_1..f_n, g_1..g_n).
fn radial_matrix(params: &AtomParams, rs: &[f64]) -> DMatrix<f64> {
    let n = params.n_spheres;
    let kappa = params.kappa as f64;
    let mut m = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(i, i)] = params.alpha / rs[i] - params.mass;
        m[(i, n + i)] = -kappa / rs[i];
        m[(n + i, n + i)] = params.alpha / rs[i] + params.mass;
        m[(n + i, i)] = -kappa / rs[i];
        for j in 0..n {
            if j != i {
                m[(i, n + j)] += 1.0 / (rs[i] - rs[j]);
                m[(n + i, j)] -= 1.0 / (rs[i] - rs[j]);
            }
        }
    }
    m
}

/// Solves the coupled radial system by damped Newton.
///
/// Initialization deliberately avoids the closed-form level: the energy seed
/// is the nonrelativistic value m - m alpha^2 / (2 N^2), the radii seed the
/// zeros of the Laguerre-type system at that energy, and the amplitude seed
/// an inverse-iteration eigenvector of the amplitude equations.
pub fn radial_solve(params: &AtomParams) -> Result<RadialState> {
    radial_solve_opts(params, &NewtonOptions::default())
}

pub fn radial_solve_opts(params: &AtomParams, opts: &NewtonOptions) -> Result<RadialState> {
    params.validate()?;
    let n = params.n_spheres;
    let m = params.mass;
    let gamma = params.gamma();
    let principal = params.n_radial() as f64 + params.kappa.unsigned_abs() as f64;
    let eps0 = m - m * params.alpha * params.alpha / (2.0 * principal * principal);
    let lambda0 = (m * m - eps0 * eps0).sqrt();

    let spec = OdeSpec::laguerre(gamma, lambda0)?;
    let zeros = orthopoly::solve_zeros(&spec, n)?;
    let rs0 = zeros.xs;

    // amplitude seed: eigenvector of the fixed-radii amplitude equations
    // nearest the energy seed
    let mat = radial_matrix(params, &rs0);
    let v0: Vec<f64> = (0..2 * n).map(|k| 1.0 + 0.1 * k as f64).collect();
    let y = newton::inverse_iteration(&mat, -eps0, &v0, 12)
        .ok_or(Error::NewtonDiverged { iterations: 0, residual: f64::INFINITY })?;
    let norm: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let sign = if y[0] >= 0.0 { 1.0 } else { -1.0 };

    let mut z = Vec::with_capacity(3 * n + 1);
    z.extend(y[..n].iter().map(|v| sign * v / norm));
    z.extend(y[n..].iter().map(|v| sign * v / norm));
    z.extend(rs0.iter());
    z.push(eps0);

    let sol = newton::solve(|zz| radial_residuals(params, zz), &z, opts)?;
    let sol = newton::polish(|zz| radial_residuals(params, zz), &sol.x, 4, opts.fd_step);
    let z = sol.x;
    let (fs, rest) = z.split_at(n);
    let (gs, rest) = rest.split_at(n);
    let (rs, eps_slice) = rest.split_at(n);
    let epsilon = eps_slice[0];

    let res = radial_residuals(params, &z);
    let field_residual = res[..2 * n].iter().fold(0.0f64, |a, r| a.max(r.abs()));
    let node_residual = res[2 * n..3 * n].iter().fold(0.0f64, |a, r| a.max(r.abs()));

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| rs[a].partial_cmp(&rs[b]).unwrap());

    Ok(RadialState {
        radii: order.iter().map(|&i| rs[i]).collect(),
        f: order.iter().map(|&i| fs[i]).collect(),
        g: order.iter().map(|&i| gs[i]).collect(),
        epsilon,
        gamma,
        lambda_exp: (m * m - epsilon * epsilon).sqrt(),
        field_residual,
        node_residual,
    })
}

/// Exact two-node ground state.
#[derive(Clone, Debug)]
pub struct DiracGround {
    pub epsilon: f64,
    pub radius: f64,
    pub height: f64,
    /// Spinors of the two nodes at +-radius along z.
    pub p1: SpinorMatrix,
    pub p2: SpinorMatrix,
    /// Split parts (plus, minus) per node, solving the coupled pair system.
    pub split1: (SpinorMatrix, SpinorMatrix),
    pub split2: (SpinorMatrix, SpinorMatrix),
    pub class: ExtremumClass,
}

/// Energy of the two-node state as a function of (r, h) on the + branch.
pub fn ground_state_energy_surface(mass: f64, alpha: f64, r: f64, h: f64) -> f64 {
    -alpha / r + (mass * mass + 1.0 / (r * r - h * h)).sqrt()
}

/// Stationarity of the + branch surface in well-scaled form:
/// d eps/dr = 0 becomes alpha S (r^2-h^2)^2 / r^3 = 1 with
/// S = sqrt(m^2 + 1/(r^2-h^2)), and d eps/dh = 0 becomes h = 0 (the
/// h-gradient is h times a positive factor).
fn ground_state_stationarity(mass: f64, alpha: f64, r: f64, h: f64) -> [f64; 2] {
    let q = r * r - h * h;
    let root = (mass * mass + 1.0 / q).sqrt();
    [alpha * root * q * q / (r * r * r) - 1.0, h * mass]
}

/// Extremizes the two-node energy surface and reconstructs the spinor pair.
pub fn ground_state_dirac(mass: f64, alpha: f64) -> Result<DiracGround> {
    ground_state_dirac_from(mass, alpha, None)
}

pub fn ground_state_dirac_from(
    mass: f64,
    alpha: f64,
    init: Option<(f64, f64)>,
) -> Result<DiracGround> {
    if alpha <= 0.0 || alpha >= 1.0 {
        return Err(Error::NoBoundState {
            reason: format!("alpha = {alpha} outside (0, 1)"),
        });
    }
    if mass <= 0.0 {
        return Err(Error::InvalidParameter("mass must be positive".into()));
    }
    let (r0, h0) = init.unwrap_or((1.0 / (alpha * mass), 0.0));
    let grad = move |p: &[f64]| ground_state_stationarity(mass, alpha, p[0], p[1]).to_vec();
    let opts = NewtonOptions { tol: 1e-13, ..Default::default() };
    let sol = newton::solve(grad, &[r0, h0.min(0.9 * r0)], &opts)?;
    let (r, h) = (sol.x[0], sol.x[1]);
    let epsilon = ground_state_energy_surface(mass, alpha, r, h);
    let class = classify_surface(|p| ground_state_energy_surface(mass, alpha, p[0], p[1]), &[r, h]);

    // amplitude split from the single-sphere relations with kappa = +1
    let gamma = (1.0 - alpha * alpha).sqrt();
    let t = (1.0 + gamma) / alpha;
    let g_amp = 1.0 / (1.0 + t * t).sqrt();
    let f_amp = t * g_amp;
    let p_hat = SpinorMatrix::sigma3();
    let plus1 = SpinorMatrix::identity() * f_amp;
    let minus1 = p_hat * g_amp;
    let plus2 = SpinorMatrix::identity() * f_amp;
    let minus2 = p_hat * (-g_amp);

    Ok(DiracGround {
        epsilon,
        radius: r,
        height: h.abs(),
        p1: join_spinor(&plus1, &minus1),
        p2: join_spinor(&plus2, &minus2),
        split1: (plus1, minus1),
        split2: (plus2, minus2),
        class,
    })
}

/// Assembles the two-node stationary graph of the ground state.
pub fn ground_state_graph(mass: f64, alpha: f64) -> Result<StationaryGraph> {
    let gs = ground_state_dirac(mass, alpha)?;
    let r = gs.radius;
    Ok(StationaryGraph {
        nodes: vec![
            MinkowskiVector::spatial(0.0, 0.0, r),
            MinkowskiVector::spatial(0.0, 0.0, -r),
        ],
        spinors: vec![gs.p1, gs.p2],
        edges: vec![(0, 1, 2)],
        epsilon: gs.epsilon,
        mass,
        potential: Some(PotentialField::coulomb(alpha)),
    })
}

/// Assembles the full stationary graph of a separable bound state from its
/// radial solution and a sphere grid carrying the matching kappa.
pub fn assemble_atom_graph(
    params: &AtomParams,
    radial: &RadialState,
    grid: &SphereGrid,
) -> Result<StationaryGraph> {
    let branch = if params.kappa > 0 { Branch::Plus } else { Branch::Minus };
    if grid.kappa(branch) != params.kappa {
        return Err(Error::InvalidParameter(format!(
            "grid kappa {} does not match atom kappa {}",
            grid.kappa(branch),
            params.kappa
        )));
    }
    let n_ang = grid.n_nodes();
    let a_mats = grid.node_matrices(branch);

    let mut nodes = Vec::with_capacity(params.n_spheres * n_ang);
    let mut spinors = Vec::with_capacity(params.n_spheres * n_ang);
    for (a, r) in radial.radii.iter().enumerate() {
        for (k, pt) in grid.points.iter().enumerate() {
            nodes.push(pt.p * *r);
            let plus = a_mats[k] * radial.f[a];
            let minus = pt.p.matrix() * a_mats[k] * radial.g[a];
            spinors.push(join_spinor(&plus, &minus));
            debug_assert!(a * n_ang + k == nodes.len() - 1);
        }
    }

    let mut edges = Vec::new();
    // radial edges between every sphere pair at the same angular node
    for a in 0..params.n_spheres {
        for b in (a + 1)..params.n_spheres {
            for k in 0..n_ang {
                edges.push((a * n_ang + k, b * n_ang + k, 1u32));
            }
        }
    }
    // angular edges within every sphere
    for a in 0..params.n_spheres {
        for &(i, j, mult) in &grid.edges {
            edges.push((a * n_ang + i, a * n_ang + j, mult));
        }
    }

    Ok(StationaryGraph {
        nodes,
        spinors,
        edges,
        epsilon: radial.epsilon,
        mass: params.mass,
        potential: Some(PotentialField::coulomb(params.alpha)),
    })
}

/// Nonrelativistic two-node ground state for the attractive 1/r potential.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SchroedingerGround {
    pub energy: f64,
    pub radius: f64,
    pub height: f64,
}

/// Two-node energy surface E(r, h) = -alpha/r + 1/(2m (r^2 - h^2)).
pub fn schroedinger_energy_surface(mass: f64, alpha: f64, r: f64, h: f64) -> f64 {
    -alpha / r + 1.0 / (2.0 * mass * (r * r - h * h))
}

/// Minimizes the two-node surface; the optimum is h = 0, r = 1/(alpha m),
/// E = -m alpha^2 / 2.
pub fn schroedinger_ground_coulomb(mass: f64, alpha: f64) -> Result<SchroedingerGround> {
    schroedinger_ground_coulomb_from(mass, alpha, None)
}

pub fn schroedinger_ground_coulomb_from(
    mass: f64,
    alpha: f64,
    init: Option<(f64, f64)>,
) -> Result<SchroedingerGround> {
    if alpha <= 0.0 || mass <= 0.0 {
        return Err(Error::DivergingOptimum(
            "attractive potential and positive mass required".into(),
        ));
    }
    let (r0, h0) = init.unwrap_or((1.2 / (alpha * mass), 0.0));
    // dE/dr = 0 in the scaled form alpha m (r^2-h^2)^2 / r^3 = 1; dE/dh = 0
    // reduces to h = 0
    let f = move |p: &[f64]| {
        let (r, h) = (p[0], p[1]);
        let q = r * r - h * h;
        vec![alpha * mass * q * q / (r * r * r) - 1.0, h * mass]
    };
    let opts = NewtonOptions { tol: 1e-13, ..Default::default() };
    let sol = newton::solve(f, &[r0, h0], &opts).map_err(|e| match e {
        Error::NewtonDiverged { .. } => {
            Error::DivergingOptimum("no interior stationary point found".into())
        }
        other => other,
    })?;
    let (r, h) = (sol.x[0], sol.x[1]);
    if !(r.is_finite() && r > 0.0 && h.abs() < r) {
        return Err(Error::DivergingOptimum(format!("optimizer left the domain: r={r}, h={h}")));
    }
    Ok(SchroedingerGround {
        energy: schroedinger_energy_surface(mass, alpha, r, h),
        radius: r,
        height: h.abs(),
    })
}

/// Single-node pathology: a potential with an interior stationary point
/// admits an edgeless one-node state with E = -V(x0).
pub fn schroedinger_single_node(
    potential: impl Fn(&MinkowskiVector) -> f64,
    x_init: &MinkowskiVector,
) -> Result<(f64, MinkowskiVector)> {
    let f = |p: &[f64]| {
        numeric_gradient(
            |q| potential(&MinkowskiVector::spatial(q[0], q[1], q[2])),
            p,
        )
    };
    let sol = newton::solve(f, &[x_init.x, x_init.y, x_init.z], &NewtonOptions {
        tol: 1e-10,
        ..Default::default()
    })?;
    let node = MinkowskiVector::spatial(sol.x[0], sol.x[1], sol.x[2]);
    Ok((-potential(&node), node))
}

/// Harmonic-oscillator stationary point on n collinear nodes (m = omega = 1).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OscillatorState {
    pub n: usize,
    pub xs: Vec<f64>,
    pub psi: f64,
    pub energy: f64,
    /// Odd node counts have no standard counterpart but solve the system.
    pub nonstandard: bool,
    pub field_residual: f64,
    pub node_residual: f64,
}

/// Residual of the amplitude equations:
/// 2 (E - x_m^2/2) psi_m + sum over edge pairs psi_k / ((x_m-x_j)(x_j-x_k)).
pub fn oscillator_field_residuals(xs: &[f64], psis: &[f64], energy: f64) -> Vec<f64> {
    let n = xs.len();
    let mut out = Vec::with_capacity(n);
    for m in 0..n {
        let mut acc = 0.0;
        for j in 0..n {
            if j == m {
                continue;
            }
            for k in 0..n {
                if k == j {
                    continue;
                }
                acc += psis[k] / ((xs[m] - xs[j]) * (xs[j] - xs[k]));
            }
        }
        out.push(2.0 * (energy - 0.5 * xs[m] * xs[m]) * psis[m] + acc);
    }
    out
}

/// Residual of the node equations:
/// -x_m psi_m^2 - sum psi_m psi_k / ((x_m-x_j)^2 (x_j-x_k))
/// + sum psi_j psi_k / ((x_j-x_m)^2 (x_m-x_k)).
pub fn oscillator_node_residuals(xs: &[f64], psis: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut out = Vec::with_capacity(n);
    for m in 0..n {
        let mut first = 0.0;
        for j in 0..n {
            if j == m {
                continue;
            }
            let dmj = xs[m] - xs[j];
            for k in 0..n {
                if k == j {
                    continue;
                }
                first += psis[m] * psis[k] / (dmj * dmj * (xs[j] - xs[k]));
            }
        }
        let mut second = 0.0;
        for j in 0..n {
            if j == m {
                continue;
            }
            let djm = xs[j] - xs[m];
            for k in 0..n {
                if k == m {
                    continue;
                }
                second += psis[j] * psis[k] / (djm * djm * (xs[m] - xs[k]));
            }
        }
        out.push(-xs[m] * psis[m] * psis[m] - first + second);
    }
    out
}

/// Constant-amplitude solution on the Hermite zeros with E = (n-1)/2.
pub fn oscillator_solve(n: usize) -> Result<OscillatorState> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one node".into()));
    }
    let zeros = orthopoly::solve_zeros(&OdeSpec::hermite(), n)?;
    let xs = zeros.xs;
    let psis = vec![1.0; n];
    let energy = (n as f64 - 1.0) / 2.0;
    let field = oscillator_field_residuals(&xs, &psis, energy);
    let node = oscillator_node_residuals(&xs, &psis);
    Ok(OscillatorState {
        n,
        field_residual: field.iter().fold(0.0f64, |a, r| a.max(r.abs())),
        node_residual: node.iter().fold(0.0f64, |a, r| a.max(r.abs())),
        xs,
        psi: 1.0,
        energy,
        nonstandard: n % 2 == 1,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ExtremumClass {
    Minimum,
    Maximum,
    Saddle,
}

/// Classifies a stationary point of an explicit surface by the eigenvalue
/// signs of its finite-difference hessian.
pub fn classify_surface(f: impl Fn(&[f64]) -> f64, params: &[f64]) -> ExtremumClass {
    let np = params.len();
    let mut hess = DMatrix::<f64>::zeros(np, np);
    let base = f(params);
    // steps follow the overall length scale so that flat directions are
    // probed above rounding noise
    let global = params.iter().fold(1.0f64, |a, p| a.max(p.abs()));
    let hstep: Vec<f64> = params.iter().map(|p| 2e-4 * p.abs().max(global)).collect();
    for i in 0..np {
        for j in i..np {
            let mut pp = params.to_vec();
            let val = if i == j {
                pp[i] = params[i] + hstep[i];
                let fp = f(&pp);
                pp[i] = params[i] - hstep[i];
                let fm = f(&pp);
                (fp - 2.0 * base + fm) / (hstep[i] * hstep[i])
            } else {
                pp[i] = params[i] + hstep[i];
                pp[j] = params[j] + hstep[j];
                let fpp = f(&pp);
                pp[j] = params[j] - hstep[j];
                let fpm = f(&pp);
                pp[i] = params[i] - hstep[i];
                let fmm = f(&pp);
                pp[j] = params[j] + hstep[j];
                let fmp = f(&pp);
                (fpp - fpm - fmp + fmm) / (4.0 * hstep[i] * hstep[j])
            };
            hess[(i, j)] = val;
            hess[(j, i)] = val;
        }
    }
    let eigs = hess.symmetric_eigenvalues();
    let scale = eigs.iter().fold(0.0f64, |a, e| a.max(e.abs())).max(1e-30);
    let pos = eigs.iter().filter(|e| **e > 1e-6 * scale).count();
    let neg = eigs.iter().filter(|e| **e < -1e-6 * scale).count();
    if pos == np {
        ExtremumClass::Minimum
    } else if neg == np {
        ExtremumClass::Maximum
    } else {
        ExtremumClass::Saddle
    }
}

#[derive(Clone, Debug)]
pub struct ImplicitExtremum {
    pub epsilon: f64,
    pub params: Vec<f64>,
    pub class: ExtremumClass,
}

/// Finds a stationary energy on the constraint manifold L(eps, p) = 0 by
/// Newton on the joint system dL/dp_i = 0, L = 0, and classifies the
/// stationary point through the implicit hessian of eps(p).
///
/// A saddle is reported as such, never silently accepted as a bound state.
pub fn implicit_energy_extremize(
    lagr: impl Fn(f64, &[f64]) -> f64 + Copy,
    eps0: f64,
    params0: &[f64],
    opts: &NewtonOptions,
) -> Result<ImplicitExtremum> {
    let np = params0.len();
    let global = params0.iter().fold(1.0f64, |a, p| a.max(p.abs()));
    // five-point gradient: the joint system is differentiated once more by
    // the newton loop, so the inner derivatives must be much cleaner than
    // plain central differences
    let gradient5 = move |f: &dyn Fn(&[f64]) -> f64, p: &[f64]| -> Vec<f64> {
        let mut out = Vec::with_capacity(p.len());
        let mut work = p.to_vec();
        for i in 0..p.len() {
            let h = 1e-4 * p[i].abs().max(global);
            let orig = work[i];
            let mut sample = |delta: f64| {
                work[i] = orig + delta;
                f(&work)
            };
            let fm2 = sample(-2.0 * h);
            let fm1 = sample(-h);
            let fp1 = sample(h);
            let fp2 = sample(2.0 * h);
            work[i] = orig;
            out.push((fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h));
        }
        out
    };
    let system = move |z: &[f64]| {
        let eps = z[np];
        let p = &z[..np];
        let mut out = gradient5(&|q: &[f64]| lagr(eps, q), p);
        out.push(lagr(eps, p));
        out
    };
    let mut z0: Vec<f64> = params0.to_vec();
    z0.push(eps0);

    // equilibrate: rows of the joint system carry very different natural
    // scales, so freeze per-row scales from a probe around the start point
    let mut row_scale = vec![0.0f64; np + 1];
    {
        let base = system(&z0);
        for (s, r) in row_scale.iter_mut().zip(base.iter()) {
            *s = r.abs();
        }
        for j in 0..=np {
            let h = 1e-4 * z0[j].abs().max(1.0);
            let mut zp = z0.clone();
            zp[j] += h;
            let rp = system(&zp);
            for (s, (r, b)) in row_scale.iter_mut().zip(rp.iter().zip(base.iter())) {
                *s = s.max((r - b).abs());
            }
        }
        let overall = row_scale.iter().fold(0.0f64, |a, s| a.max(*s)).max(1e-300);
        for s in row_scale.iter_mut() {
            *s = s.max(1e-9 * overall);
        }
    }
    let scaled = |z: &[f64]| -> Vec<f64> {
        system(z)
            .iter()
            .zip(row_scale.iter())
            .map(|(r, s)| r / s)
            .collect()
    };
    let sol = newton::solve(scaled, &z0, opts)?;
    let params: Vec<f64> = sol.x[..np].to_vec();
    let epsilon = sol.x[np];

    // implicit eps(p): 1d Newton on the constraint, seeded at the optimum
    let eps_of = |p: &[f64]| -> f64 {
        let mut e = epsilon;
        for _ in 0..60 {
            let val = lagr(e, p);
            let h = 1e-7 * e.abs().max(1.0);
            let d = (lagr(e + h, p) - lagr(e - h, p)) / (2.0 * h);
            if d == 0.0 {
                break;
            }
            let step = val / d;
            e -= step;
            if step.abs() < 1e-14 * e.abs().max(1.0) {
                break;
            }
        }
        e
    };

    let class = classify_surface(|p| eps_of(p), &params);
    Ok(ImplicitExtremum { epsilon, params, class })
}
