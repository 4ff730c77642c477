//! Damped Newton iteration for small dense square systems.
//!
//! Jacobians come from central finite differences; the step is halved while
//! the residual norm fails to decrease. All solvers in this crate share this
//! loop.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

#[derive(Clone, Copy, Debug)]
pub struct NewtonOptions {
    /// Convergence threshold on the residual max-norm.
    pub tol: f64,
    pub max_iterations: usize,
    pub max_damping_halvings: usize,
    /// Relative step used for finite-difference Jacobians.
    pub fd_step: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: default_tolerance(),
            max_iterations: 200,
            max_damping_halvings: 30,
            fd_step: 1e-7,
        }
    }
}

/// Default Newton tolerance, overridable through the STGRAPH_TOL environment
/// variable.
pub fn default_tolerance() -> f64 {
    std::env::var("STGRAPH_TOL")
        .ok()
        .and_then(|s| s.parse::<f64>().ok())
        .filter(|t| *t > 0.0)
        .unwrap_or(1e-12)
}

fn residual_norm(r: &[f64]) -> f64 {
    r.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

fn fd_jacobian<F>(f: &F, x: &[f64], r0: &[f64], step: f64) -> DMatrix<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n = x.len();
    let m = r0.len();
    let mut jac = DMatrix::zeros(m, n);
    let mut xp = x.to_vec();
    let mut xm = x.to_vec();
    for j in 0..n {
        let h = step * x[j].abs().max(1.0);
        xp[j] = x[j] + h;
        xm[j] = x[j] - h;
        let rp = f(&xp);
        let rm = f(&xm);
        for i in 0..m {
            jac[(i, j)] = (rp[i] - rm[i]) / (2.0 * h);
        }
        xp[j] = x[j];
        xm[j] = x[j];
    }
    jac
}

#[derive(Clone, Debug)]
pub struct NewtonSolution {
    pub x: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Solves f(x) = 0 for square systems with damped Newton steps.
pub fn solve<F>(f: F, x0: &[f64], opts: &NewtonOptions) -> Result<NewtonSolution>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let mut x = x0.to_vec();
    let mut r = f(&x);
    if r.len() != x.len() {
        return Err(Error::InvalidParameter(format!(
            "newton system is not square: {} equations, {} unknowns",
            r.len(),
            x.len()
        )));
    }
    let mut rnorm = residual_norm(&r);

    for iter in 0..opts.max_iterations {
        if rnorm <= opts.tol {
            return Ok(NewtonSolution { x, residual: rnorm, iterations: iter });
        }
        let jac = fd_jacobian(&f, &x, &r, opts.fd_step);
        let rhs = DVector::from_iterator(r.len(), r.iter().map(|v| -v));
        let Some(delta) = jac.lu().solve(&rhs) else {
            return Err(Error::NewtonDiverged { iterations: iter, residual: rnorm });
        };

        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..=opts.max_damping_halvings {
            let trial: Vec<f64> = x
                .iter()
                .zip(delta.iter())
                .map(|(xi, di)| xi + lambda * di)
                .collect();
            let rt = f(&trial);
            let tnorm = residual_norm(&rt);
            if tnorm.is_finite() && tnorm < rnorm {
                x = trial;
                r = rt;
                rnorm = tnorm;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            // full step as a last resort; near machine precision the
            // residual may not decrease monotonically
            let trial: Vec<f64> = x.iter().zip(delta.iter()).map(|(xi, di)| xi + di).collect();
            let rt = f(&trial);
            let tnorm = residual_norm(&rt);
            if tnorm.is_finite() && tnorm <= opts.tol {
                return Ok(NewtonSolution { x: trial, residual: tnorm, iterations: opts.max_iterations });
            }
            return Err(Error::NewtonDiverged { iterations: opts.max_iterations, residual: rnorm });
        }
    }
    if rnorm <= opts.tol {
        return Ok(NewtonSolution { x, residual: rnorm, iterations: opts.max_iterations });
    }
    Err(Error::NewtonDiverged { iterations: opts.max_iterations, residual: rnorm })
}

/// Plain full-step Newton polish toward the residual floor: keeps the
/// iterate with the smallest residual max-norm. Used after a converged solve
/// to push parameters to machine-level consistency.
pub fn polish<F>(f: F, x0: &[f64], sweeps: usize, fd_step: f64) -> NewtonSolution
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let mut best = x0.to_vec();
    let mut best_norm = residual_norm(&f(&best));
    let mut x = best.clone();
    for iter in 0..sweeps {
        let r = f(&x);
        let jac = fd_jacobian(&f, &x, &r, fd_step);
        let rhs = DVector::from_iterator(r.len(), r.iter().map(|v| -v));
        let Some(delta) = jac.lu().solve(&rhs) else {
            break;
        };
        for (xi, di) in x.iter_mut().zip(delta.iter()) {
            *xi += di;
        }
        let norm = residual_norm(&f(&x));
        if norm.is_finite() && norm < best_norm {
            best_norm = norm;
            best = x.clone();
        } else if iter > 0 {
            break;
        }
    }
    NewtonSolution { x: best, residual: best_norm, iterations: sweeps }
}

/// One inverse-iteration pass: solves (M - shift I) y = v and normalizes.
pub fn inverse_iteration(m: &DMatrix<f64>, shift: f64, v0: &[f64], sweeps: usize) -> Option<Vec<f64>> {
    let n = m.nrows();
    let mut shifted = m.clone();
    for i in 0..n {
        shifted[(i, i)] -= shift;
    }
    let lu = shifted.lu();
    let mut v = DVector::from_column_slice(v0);
    for _ in 0..sweeps {
        let w = lu.solve(&v)?;
        let norm = w.norm();
        if !norm.is_finite() || norm == 0.0 {
            return None;
        }
        v = w / norm;
    }
    Some(v.iter().copied().collect())
}
