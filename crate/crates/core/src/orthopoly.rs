//! Orthogonal-polynomial zero systems and exact quadrature.
//!
//! A polynomial family is described by the coefficients of its generating
//! second-order equation u y'' + v y' + lambda y = 0 (u quadratic, v linear).
//! The zeros of the degree-n member solve the coupled reciprocal-sum system
//!
//!   2 sum_{i != k} 1/(x_k - x_i) + v(x_k)/u(x_k) = 0,
//!
//! which is solved here by damped Newton. Weighting constants for quadrature
//! follow from the constancy of u(x_i) * rho_i across zeros, with
//! rho_i = int w P_i^2 and P_i the partial polynomial omitting the i-th root.

use crate::error::{Error, Result};
use crate::newton::{self, NewtonOptions};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

/// Supported polynomial families.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Family {
    /// u = 1, v = -2x, weight exp(-x^2) on (-inf, inf).
    Hermite,
    /// u = r, v = 2 gamma - 2 lambda r, weight exp(-2 lambda r) r^(2 gamma - 1) on (0, inf).
    Laguerre { gamma: f64, lambda: f64 },
    /// u = 1 - z^2, v = -2 m z, weight (1 - z^2)^(m-1) on (-1, 1).
    LegendreLike { order: u32 },
    Custom,
}

/// Coefficients of the generating equation and the integration interval.
#[derive(Clone, Copy, Debug)]
pub struct OdeSpec {
    /// u(x) = u0 + u1 x + u2 x^2.
    pub u: [f64; 3],
    /// v(x) = v0 + v1 x.
    pub v: [f64; 2],
    pub interval: (f64, f64),
    pub family: Family,
}

impl OdeSpec {
    pub fn hermite() -> Self {
        Self {
            u: [1.0, 0.0, 0.0],
            v: [0.0, -2.0],
            interval: (f64::NEG_INFINITY, f64::INFINITY),
            family: Family::Hermite,
        }
    }

    /// Laguerre-type family for the radial bound-state problem.
    pub fn laguerre(gamma_exp: f64, lambda_exp: f64) -> Result<Self> {
        if gamma_exp <= 0.0 || lambda_exp <= 0.0 {
            return Err(Error::InvalidParameter(
                "laguerre family needs positive gamma and lambda".into(),
            ));
        }
        Ok(Self {
            u: [0.0, 1.0, 0.0],
            v: [2.0 * gamma_exp, -2.0 * lambda_exp],
            interval: (0.0, f64::INFINITY),
            family: Family::Laguerre { gamma: gamma_exp, lambda: lambda_exp },
        })
    }

    /// Legendre-like family of the given order (order 1 is plain Legendre).
    pub fn legendre_like(order: u32) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidParameter("legendre-like order must be >= 1".into()));
        }
        Ok(Self {
            u: [1.0, 0.0, -1.0],
            v: [0.0, -2.0 * order as f64],
            interval: (-1.0, 1.0),
            family: Family::LegendreLike { order },
        })
    }

    /// Custom family. When the interval is finite, u is sampled and must not
    /// vanish strictly inside.
    pub fn custom(u: [f64; 3], v: [f64; 2], interval: (f64, f64)) -> Result<Self> {
        let spec = Self { u, v, interval, family: Family::Custom };
        if interval.0.is_finite() && interval.1.is_finite() {
            let (a, b) = interval;
            for k in 1..256 {
                let x = a + (b - a) * k as f64 / 256.0;
                if spec.u_at(x).abs() < 1e-12 {
                    return Err(Error::InvalidParameter(format!(
                        "u(x) vanishes inside the interval near x = {x}"
                    )));
                }
            }
        }
        Ok(spec)
    }

    pub fn u_at(&self, x: f64) -> f64 {
        self.u[0] + self.u[1] * x + self.u[2] * x * x
    }

    pub fn v_at(&self, x: f64) -> f64 {
        self.v[0] + self.v[1] * x
    }

    /// Weight function of the family (closed form per family).
    pub fn weight(&self, x: f64) -> f64 {
        match self.family {
            Family::Hermite => (-x * x).exp(),
            Family::Laguerre { gamma, lambda } => {
                if x <= 0.0 {
                    0.0
                } else {
                    (-2.0 * lambda * x).exp() * x.powf(2.0 * gamma - 1.0)
                }
            }
            Family::LegendreLike { order } => {
                let s = 1.0 - x * x;
                if s < 0.0 {
                    0.0
                } else {
                    s.powi(order as i32 - 1)
                }
            }
            Family::Custom => f64::NAN,
        }
    }

    /// Eigenvalue of the degree-n member: -n(n-1) u2 - n v1.
    pub fn op_eigenvalue(&self, n: usize) -> f64 {
        let nf = n as f64;
        -nf * (nf - 1.0) * self.u[2] - nf * self.v[1]
    }

    /// Master integral int w P^2 for the monic degree-n member, in closed form.
    pub fn master_integral(&self, n: usize) -> Result<f64> {
        let nf = n as f64;
        let sqrt_pi = std::f64::consts::PI.sqrt();
        match self.family {
            Family::Hermite => Ok(factorial(n) * sqrt_pi / 2f64.powi(n as i32)),
            Family::Laguerre { gamma: g, lambda } => {
                Ok(factorial(n) * gamma(nf + 2.0 * g) * (2.0 * lambda).powf(-(2.0 * nf + 2.0 * g)))
            }
            Family::LegendreLike { order } => {
                let mu = (order - 1) as f64;
                let num = 2f64.powf(2.0 * nf + 2.0 * mu + 1.0)
                    * factorial(n)
                    * gamma(nf + mu + 1.0).powi(2)
                    * gamma(nf + 2.0 * mu + 1.0);
                let den = (2.0 * nf + 2.0 * mu + 1.0) * gamma(2.0 * nf + 2.0 * mu + 1.0).powi(2);
                Ok(num / den)
            }
            Family::Custom => Err(Error::InvalidParameter(
                "no closed-form master integral for custom families; supply one from quadrature"
                    .into(),
            )),
        }
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Zeros of the degree-n family member, sorted ascending.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZeroSet {
    pub xs: Vec<f64>,
    pub family: Family,
}

impl ZeroSet {
    pub fn n(&self) -> usize {
        self.xs.len()
    }
}

/// Residuals of the reciprocal-sum zero system at the given points.
pub fn zero_system_residual(spec: &OdeSpec, xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut s = 0.0;
        for i in 0..n {
            if i != k {
                s += 1.0 / (xs[k] - xs[i]);
            }
        }
        out.push(2.0 * s + spec.v_at(xs[k]) / spec.u_at(xs[k]));
    }
    out
}

fn initial_guess(spec: &OdeSpec, n: usize) -> Vec<f64> {
    let nf = n as f64;
    match spec.family {
        Family::Hermite | Family::Custom => {
            // equally spaced with the bulk density of the zero distribution
            let s = std::f64::consts::PI / (2.0 * nf).sqrt();
            (1..=n).map(|k| s * (k as f64 - 0.5 * (nf + 1.0))).collect()
        }
        Family::Laguerre { gamma, lambda } => {
            // harmonic points i (i + gamma) / lambda scaled so the last one
            // lands near the support edge (2n + 2 gamma) / lambda
            let scale = (2.0 * nf + 2.0 * gamma) / (nf * (nf + gamma));
            (1..=n)
                .map(|k| {
                    let kf = k as f64;
                    kf * (kf + gamma) / lambda * scale
                })
                .collect()
        }
        Family::LegendreLike { .. } => (1..=n)
            .map(|k| -0.95 * (std::f64::consts::PI * (k as f64 - 0.5) / nf).cos())
            .collect(),
    }
}

/// Solves the zero system by damped Newton from a family-specific guess.
pub fn solve_zeros(spec: &OdeSpec, n: usize) -> Result<ZeroSet> {
    solve_zeros_opts(spec, n, &NewtonOptions { tol: 1e-13, ..Default::default() })
}

pub fn solve_zeros_opts(spec: &OdeSpec, n: usize, opts: &NewtonOptions) -> Result<ZeroSet> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one zero".into()));
    }
    if n == 1 {
        // empty interaction sum: solve v(x)/u(x) = 0 directly
        if spec.v[1] == 0.0 {
            return Err(Error::InvalidParameter("degenerate family: v must have slope".into()));
        }
        let x = -spec.v[0] / spec.v[1];
        return Ok(ZeroSet { xs: vec![x], family: spec.family });
    }

    let mut last_err = None;
    for retry_scale in [1.0, 0.5, 2.0] {
        let x0: Vec<f64> = initial_guess(spec, n).iter().map(|x| x * retry_scale).collect();
        match newton::solve(|xs| zero_system_residual(spec, xs), &x0, opts) {
            Ok(sol) => {
                // polish to the residual floor so downstream comparisons see
                // machine-level zeros
                let polished =
                    newton::polish(|xs| zero_system_residual(spec, xs), &sol.x, 4, opts.fd_step);
                let mut xs = polished.x;
                xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
                for w in xs.windows(2) {
                    if w[0] >= w[1] {
                        return Err(Error::NewtonDiverged {
                            iterations: sol.iterations,
                            residual: sol.residual,
                        });
                    }
                }
                return Ok(ZeroSet { xs, family: spec.family });
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap())
}

/// Sum of the zeros and the per-zero residuals of
/// sum_{i != k} x_i / (x_k - x_i) = x_k^2 - (n - 1), both valid for the
/// Hermite family.
pub fn hermite_zero_identities(zs: &ZeroSet) -> (f64, Vec<f64>) {
    let xs = &zs.xs;
    let n = xs.len();
    let sum: f64 = xs.iter().sum();
    let mut residuals = Vec::with_capacity(n);
    for k in 0..n {
        let mut s = 0.0;
        for i in 0..n {
            if i != k {
                s += xs[i] / (xs[k] - xs[i]);
            }
        }
        residuals.push(s - (xs[k] * xs[k] - (n as f64 - 1.0)));
    }
    (sum, residuals)
}

/// Partial polynomial P_k(x) = prod_{i != k} (x - x_i).
pub fn partial_poly_eval(zs: &ZeroSet, k: usize, x: f64) -> f64 {
    zs.xs
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != k)
        .map(|(_, xi)| x - xi)
        .product()
}

/// Second-order partial polynomial P_kl; P_kk = 0 by definition.
pub fn partial_poly2_eval(zs: &ZeroSet, k: usize, l: usize, x: f64) -> f64 {
    if k == l {
        return 0.0;
    }
    zs.xs
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != k && *i != l)
        .map(|(_, xi)| x - xi)
        .product()
}

/// P_k evaluated at its own node, pi_k = prod_{i != k} (x_k - x_i).
pub fn partial_poly_at_node(zs: &ZeroSet, k: usize) -> f64 {
    partial_poly_eval(zs, k, zs.xs[k])
}

/// Weighting constants rho_i = k / u(x_i) with
/// k = -(v1 + (2n - 1) u2) * master, master = int w P^2.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeightSet {
    pub rhos: Vec<f64>,
    pub k_const: f64,
}

pub fn weight_constants(spec: &OdeSpec, zs: &ZeroSet, master: f64) -> Result<WeightSet> {
    let n = zs.n();
    let k_const = -(spec.v[1] + (2.0 * n as f64 - 1.0) * spec.u[2]) * master;
    let mut rhos = Vec::with_capacity(n);
    for &x in &zs.xs {
        let u = spec.u_at(x);
        if u == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "u vanishes at a zero (x = {x}); family violates its interval condition"
            )));
        }
        let rho = k_const / u;
        if rho <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "non-positive weighting constant rho = {rho} at x = {x}"
            )));
        }
        rhos.push(rho);
    }
    Ok(WeightSet { rhos, k_const })
}

/// Exact integral of w * mu * f * g where f, g are given by coefficients in
/// the partial-polynomial basis and mu = mu0 + mu1 x is linear:
/// sum_i rho_i mu(x_i) f_i g_i.
pub fn gauss_integrate(
    zs: &ZeroSet,
    ws: &WeightSet,
    f_coeffs: &[f64],
    g_coeffs: &[f64],
    mu: (f64, f64),
) -> f64 {
    zs.xs
        .iter()
        .zip(ws.rhos.iter())
        .zip(f_coeffs.iter().zip(g_coeffs.iter()))
        .map(|((x, rho), (f, g))| rho * (mu.0 + mu.1 * x) * f * g)
        .sum()
}

/// Classical node weights rho_i / P_i(x_i)^2 for integrating a function by
/// its values at the zeros.
pub fn gauss_node_weights(zs: &ZeroSet, ws: &WeightSet) -> Vec<f64> {
    (0..zs.n())
        .map(|k| {
            let pi = partial_poly_at_node(zs, k);
            ws.rhos[k] / (pi * pi)
        })
        .collect()
}

/// Integrates w * h by values at the zeros; exact for polynomial h of degree
/// at most 2n - 1.
pub fn gauss_integrate_values(zs: &ZeroSet, ws: &WeightSet, h: impl Fn(f64) -> f64) -> f64 {
    gauss_node_weights(zs, ws)
        .iter()
        .zip(zs.xs.iter())
        .map(|(w, x)| w * h(*x))
        .sum()
}

/// Expansion coefficients of a polynomial given by values at the zeros:
/// f = sum f_i P_i has f_i = f(x_i) / P_i(x_i).
pub fn coeffs_from_values(zs: &ZeroSet, values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .enumerate()
        .map(|(k, v)| v / partial_poly_at_node(zs, k))
        .collect()
}
