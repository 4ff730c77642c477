//! Nonstationary propagation: free jumps, the implicit stepper under an
//! electromagnetic potential, conservation checks and the classical
//! Lorentz-force oracle.
//!
//! The stepper works in gauge-invariant variables. The spinor equation
//! W P = m bar(dagger(P)) with W = v + (e/2)(bar A_next + bar A_curr) fixes
//! the bilinear B = P dagger(P) to m s W^{-1} with a free positive scale
//! s = det(P), and forces det(W) = m^2. Together with the node equation this
//! gives five real unknowns (x_next, s) and five residuals per step; the
//! spinor is recovered afterwards as the positive hermitian square root of B.

use crate::error::{Error, Result};
use crate::field::{bar_gradient_matrix, field_tensor, PotentialField};
use crate::minkowski::{decode_hermitian_part, MinkowskiVector};
use crate::newton::{self, NewtonOptions};
use crate::spinor::SpinorMatrix;

/// Warn threshold for |e A| / |v|; beyond it the weak-field reduction to the
/// classical force law degrades.
pub const WEAK_FIELD_RATIO: f64 = 0.1;

#[derive(Clone, Copy, Debug)]
pub struct TrajectoryState {
    pub x_prev: MinkowskiVector,
    pub x_curr: MinkowskiVector,
    /// Spinor on the edge x_prev -> x_curr.
    pub p_prev: SpinorMatrix,
    pub k: usize,
}

impl TrajectoryState {
    pub fn validate(&self) -> Result<()> {
        let d = self.x_curr - self.x_prev;
        if d.interval() <= 0.0 {
            return Err(Error::InvalidGraph("trajectory edge is not time-like".into()));
        }
        if d.t <= 0.0 {
            return Err(Error::TimeArrow { dt: d.t });
        }
        Ok(())
    }

    /// Inverse edge vector of the stored edge.
    pub fn edge_inverse(&self) -> Result<SpinorMatrix> {
        let dx = (self.x_curr - self.x_prev).matrix();
        let det_abs = dx.det().norm();
        dx.inverse().map_err(|_| Error::DegenerateEdge { det_abs })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct StepOutcome {
    pub state: TrajectoryState,
    /// |det(W) - m^2| at the accepted step.
    pub conservation_residual: f64,
    /// |e A| / |v| seen by the step; compare against [`WEAK_FIELD_RATIO`].
    pub field_ratio: f64,
    /// Scale det(P) of the new edge spinor.
    pub det_scale: f64,
    pub newton_iterations: usize,
}

/// Free motion: the spinor fixes a constant jump through
/// v P = m bar(dagger(P)), so x advances by v^{-1} with det(v) = m^2.
pub struct FreeTrajectory {
    pub nodes: Vec<MinkowskiVector>,
    pub velocity: MinkowskiVector,
    pub spinor: SpinorMatrix,
}

pub fn free_propagate(
    mass: f64,
    x0: &MinkowskiVector,
    p0: &SpinorMatrix,
    steps: usize,
) -> Result<FreeTrajectory> {
    let det = p0.det();
    if det.im.abs() > 1e-12 * det.norm().max(1e-300) {
        return Err(Error::InvalidParameter(format!(
            "spinor determinant must be real for free motion (im = {:.3e})",
            det.im
        )));
    }
    if det.re <= 0.0 {
        return Err(Error::InvalidParameter(
            "spinor determinant must be positive for forward motion".into(),
        ));
    }
    let v = p0.bar_dagger() * p0.inverse()? * mass;
    let v_dec = decode_hermitian_part(&v);
    if v_dec.t <= 0.0 {
        return Err(Error::TimeArrow { dt: v_dec.t });
    }
    let jump = decode_hermitian_part(&v.inverse()?);
    let mut nodes = Vec::with_capacity(steps + 1);
    let mut x = *x0;
    nodes.push(x);
    for _ in 0..steps {
        x = x + jump;
        nodes.push(x);
    }
    Ok(FreeTrajectory { nodes, velocity: v_dec, spinor: *p0 })
}

/// Conservation quantity of the stored edge:
/// |det(v + (e/2)(bar A_curr + bar A_prev)) - m^2|.
pub fn conservation_check(field: &PotentialField, state: &TrajectoryState, mass: f64) -> Result<f64> {
    let v = state.edge_inverse()?;
    let w = v + (field.a(&state.x_curr).matrix().bar() + field.a(&state.x_prev).matrix().bar())
        * (0.5 * field.charge);
    Ok((w.det().re - mass * mass).abs())
}

/// One implicit step: solves the five-unknown system for (x_next, s) and
/// recovers the new edge spinor as the positive root of its bilinear.
pub fn discrete_step(
    field: &PotentialField,
    state: &TrajectoryState,
    mass: f64,
    opts: &NewtonOptions,
) -> Result<StepOutcome> {
    state.validate()?;
    let e = field.charge;
    let v_prev = state.edge_inverse()?;
    let b_prev = state.p_prev * state.p_prev.dagger();
    let s_prev = state.p_prev.det().re;
    let bar_a_curr = field.a(&state.x_curr).matrix().bar();

    let residuals = |z: &[f64]| -> Vec<f64> {
        let x_next = MinkowskiVector::new(z[0], z[1], z[2], z[3]);
        let s = z[4];
        let dx = (x_next - state.x_curr).matrix();
        let Ok(v) = dx.inverse() else {
            return vec![f64::INFINITY; 5];
        };
        let w = v + (field.a(&x_next).matrix().bar() + bar_a_curr) * (0.5 * e);
        let Ok(w_inv) = w.inverse() else {
            return vec![f64::INFINITY; 5];
        };
        let b_k = w_inv * (mass * s);
        // node equation including the potential gradient at the inner node
        let c = b_k + b_prev;
        let grad = field.bilinear_trace_gradient(&state.x_curr, &c);
        let g = v * b_k * v - v_prev * b_prev * v_prev
            + bar_gradient_matrix(&grad) * (0.25 * e);
        let gd = decode_hermitian_part(&g);
        vec![gd.t, gd.x, gd.y, gd.z, w.det().re - mass * mass]
    };

    let free_guess = state.x_curr + (state.x_curr - state.x_prev);
    let z0 = [free_guess.t, free_guess.x, free_guess.y, free_guess.z, s_prev];
    let sol = newton::solve(residuals, &z0, opts)?;

    let x_next = MinkowskiVector::new(sol.x[0], sol.x[1], sol.x[2], sol.x[3]);
    let s = sol.x[4];
    let d = x_next - state.x_curr;
    if d.t <= 0.0 || d.interval() <= 0.0 {
        return Err(Error::TimeArrow { dt: d.t });
    }
    if s <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "step produced a non-positive spinor scale {s:.3e}"
        )));
    }

    let v = d.matrix().inverse()?;
    let w = v + (field.a(&x_next).matrix().bar() + bar_a_curr) * (0.5 * e);
    let b_k = w.inverse()? * (mass * s);
    let p_curr = b_k.sqrt_positive()?;

    let field_ratio =
        e.abs() * field.a(&state.x_curr).matrix().norm_max() / v_prev.norm_max().max(1e-300);

    Ok(StepOutcome {
        state: TrajectoryState {
            x_prev: state.x_curr,
            x_curr: x_next,
            p_prev: p_curr,
            k: state.k + 1,
        },
        conservation_residual: (w.det().re - mass * mass).abs(),
        field_ratio,
        det_scale: s,
    newton_iterations: sol.iterations,
    })
}

/// Marches `steps` implicit steps from the initial edge.
pub fn discrete_propagate(
    field: &PotentialField,
    init: TrajectoryState,
    mass: f64,
    steps: usize,
    opts: &NewtonOptions,
) -> Result<Vec<StepOutcome>> {
    let mut out = Vec::with_capacity(steps);
    let mut state = init;
    for _ in 0..steps {
        let step = discrete_step(field, &state, mass, opts)?;
        state = step.state;
        out.push(step);
    }
    Ok(out)
}

/// Builds a consistent initial edge from x0 along the unit 4-velocity u:
/// scales the jump so the conservation law holds on the first edge and
/// attaches the positive-root spinor with det(P) = 1.
pub fn initial_edge(
    field: &PotentialField,
    x0: &MinkowskiVector,
    u: &MinkowskiVector,
    mass: f64,
) -> Result<TrajectoryState> {
    if (u.interval() - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameter("u must be a unit time-like vector".into()));
    }
    let e = field.charge;
    let w_of = |c: f64| -> Result<SpinorMatrix> {
        let x1 = *x0 + *u * (c / mass);
        let v = (*u * (c / mass)).matrix().inverse()?;
        Ok(v + (field.a(&x1).matrix().bar() + field.a(x0).matrix().bar()) * (0.5 * e))
    };
    let mut c = 1.0;
    for _ in 0..60 {
        let f = w_of(c)?.det().re - mass * mass;
        let h = 1e-7;
        let df = (w_of(c + h)?.det().re - w_of(c - h)?.det().re) / (2.0 * h);
        if df == 0.0 {
            break;
        }
        let step = f / df;
        c -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    let w = w_of(c)?;
    if (w.det().re - mass * mass).abs() > 1e-10 {
        return Err(Error::NewtonDiverged {
            iterations: 60,
            residual: (w.det().re - mass * mass).abs(),
        });
    }
    let b = w.inverse()? * mass;
    let state = TrajectoryState {
        x_prev: *x0,
        x_curr: *x0 + *u * (c / mass),
        p_prev: b.sqrt_positive()?,
        k: 0,
    };
    state.validate()?;
    Ok(state)
}

/// Determinant asymmetry of two consecutive inverse edge vectors:
/// lambda = (tr(B^-1) - tr(B)) / (4 + tr(B^-1) + tr(B)) with
/// B = bar(v_k) bar(v_{k-1})^{-1}.
pub fn lambda_asymmetry(v_k: &MinkowskiVector, v_km1: &MinkowskiVector) -> Result<f64> {
    let b = v_k.matrix().bar() * v_km1.matrix().bar().inverse()?;
    let tr_b = b.trace().re;
    let tr_binv = b.inverse()?.trace().re;
    Ok((tr_binv - tr_b) / (4.0 + tr_binv + tr_b))
}

/// Second-order approximation of the asymmetry from the determinants alone.
pub fn lambda_asymmetry_approx(v_k: &MinkowskiVector, v_km1: &MinkowskiVector) -> f64 {
    (v_km1.interval() - v_k.interval()) / (4.0 * v_k.interval())
}

/// Residual of the classical force-law reduction over three consecutive
/// nodes: a - (e/2m)(u F + dagger(F) u) + 2 (lambda/m) u with the centered
/// discretizations a = bar(v_k) - bar(v_{k-1}) and u = q / ||q||,
/// q = x_next - x_prev. Shrinks quadratically with the field strength.
pub fn lorentz_reduction_residual(
    field: &PotentialField,
    mass: f64,
    x_prev: &MinkowskiVector,
    x_curr: &MinkowskiVector,
    x_next: &MinkowskiVector,
) -> Result<f64> {
    let v_k = (*x_next - *x_curr).matrix().inverse()?;
    let v_km1 = (*x_curr - *x_prev).matrix().inverse()?;
    let a = v_k.bar() - v_km1.bar();
    let q = *x_next - *x_prev;
    let u = q.matrix() * (1.0 / q.interval().sqrt());
    let lambda = lambda_asymmetry(
        &decode_hermitian_part(&v_k),
        &decode_hermitian_part(&v_km1),
    )?;
    let f = field_tensor(field, x_curr).f;
    let force = (u * f + f.dagger() * u) * (field.charge / (2.0 * mass));
    let res = a - force + u * (2.0 * lambda / mass);
    Ok(res.norm_max())
}

/// Classical relativistic acceleration a = (e/2m)(u F + dagger(F) u).
pub fn lorentz_acceleration(
    field: &PotentialField,
    x: &MinkowskiVector,
    u: &MinkowskiVector,
    mass: f64,
) -> MinkowskiVector {
    let f = field_tensor(field, x).f;
    let um = u.matrix();
    decode_hermitian_part(&((um * f + f.dagger() * um) * (field.charge / (2.0 * mass))))
}

/// Fixed-step RK4 integration of the classical force law; returns
/// (x, u) at every step including the initial state.
pub fn classical_lorentz_rk4(
    field: &PotentialField,
    x0: &MinkowskiVector,
    u0: &MinkowskiVector,
    mass: f64,
    dtau: f64,
    steps: usize,
) -> Vec<(MinkowskiVector, MinkowskiVector)> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut x = *x0;
    let mut u = *u0;
    out.push((x, u));
    for _ in 0..steps {
        let (nx, nu) = rk4_step(field, &x, &u, mass, dtau);
        x = nx;
        u = nu;
        out.push((x, u));
    }
    out
}

fn rk4_step(
    field: &PotentialField,
    x: &MinkowskiVector,
    u: &MinkowskiVector,
    mass: f64,
    dtau: f64,
) -> (MinkowskiVector, MinkowskiVector) {
    let acc = |x: &MinkowskiVector, u: &MinkowskiVector| lorentz_acceleration(field, x, u, mass);
    let k1x = *u;
    let k1u = acc(x, u);
    let k2x = *u + k1u * (dtau / 2.0);
    let k2u = acc(&(*x + k1x * (dtau / 2.0)), &(*u + k1u * (dtau / 2.0)));
    let k3x = *u + k2u * (dtau / 2.0);
    let k3u = acc(&(*x + k2x * (dtau / 2.0)), &(*u + k2u * (dtau / 2.0)));
    let k4x = *u + k3u * dtau;
    let k4u = acc(&(*x + k3x * dtau), &(*u + k3u * dtau));
    (
        *x + (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (dtau / 6.0),
        *u + (k1u + k2u * 2.0 + k3u * 2.0 + k4u) * (dtau / 6.0),
    )
}

/// Integrates the classical law to each requested eigentime exactly,
/// sub-stepping with at most `dtau_max`.
pub fn classical_states_at(
    field: &PotentialField,
    x0: &MinkowskiVector,
    u0: &MinkowskiVector,
    mass: f64,
    taus: &[f64],
    dtau_max: f64,
) -> Vec<(MinkowskiVector, MinkowskiVector)> {
    let mut out = Vec::with_capacity(taus.len());
    let mut x = *x0;
    let mut u = *u0;
    let mut tau = 0.0;
    for &target in taus {
        let span = target - tau;
        if span > 0.0 {
            let n = (span / dtau_max).ceil().max(1.0) as usize;
            let dt = span / n as f64;
            for _ in 0..n {
                let (nx, nu) = rk4_step(field, &x, &u, mass, dt);
                x = nx;
                u = nu;
            }
            tau = target;
        }
        out.push((x, u));
    }
    out
}
