//! Space-time graphs and their Lagrangian and Hamiltonian sums.
//!
//! A regular graph is a set of n spatial chains with spinors attached to the
//! time-like edges and space-like edges only inside a time slice. For
//! time-invariant states the time sum collapses and a stationary graph
//! remains: traceless space nodes, one spinor per node, undirected edges with
//! explicit multiplicity, energy eps = 1/tau and the fixed gauge factor
//! S = diag(i, -i).

use crate::error::{Error, Result};
use crate::field::PotentialField;
use crate::minkowski::MinkowskiVector;
use crate::quaternion::gauge_s;
use crate::spinor::{SpinorMatrix, C64};

/// Node-indexed regular graph: node (i, k) = chain i at time slice k.
pub struct RegularGraph {
    pub n_space: usize,
    pub n_time: usize,
    /// Row-major by time slice: index = k * n_space + i.
    pub nodes: Vec<MinkowskiVector>,
    /// Spinor on the time edge (i, k) -> (i, k+1): index = k * n_space + i,
    /// for k in 0..n_time-1.
    pub time_spinors: Vec<SpinorMatrix>,
    /// Space edges within every time slice, as (i, j) chain pairs.
    pub space_edges: Vec<(usize, usize)>,
    /// Electromagnetic potential sampled at the nodes, if present.
    pub potential: Option<PotentialField>,
    pub mass: f64,
}

impl RegularGraph {
    pub fn node(&self, i: usize, k: usize) -> &MinkowskiVector {
        &self.nodes[k * self.n_space + i]
    }

    pub fn time_spinor(&self, i: usize, k: usize) -> &SpinorMatrix {
        &self.time_spinors[k * self.n_space + i]
    }

    /// Checks time-like forward time edges and space-like space edges.
    pub fn validate(&self) -> Result<()> {
        if self.nodes.len() != self.n_space * self.n_time {
            return Err(Error::InvalidGraph("node count does not match dimensions".into()));
        }
        if self.time_spinors.len() != self.n_space * (self.n_time - 1) {
            return Err(Error::InvalidGraph("time spinor count does not match edges".into()));
        }
        for k in 0..self.n_time - 1 {
            for i in 0..self.n_space {
                let d = *self.node(i, k + 1) - *self.node(i, k);
                if d.interval() <= 0.0 {
                    return Err(Error::InvalidGraph(format!(
                        "time edge ({i},{k}) is not time-like"
                    )));
                }
                if d.t <= 0.0 {
                    return Err(Error::InvalidGraph(format!(
                        "time edge ({i},{k}) runs against the time arrow"
                    )));
                }
            }
        }
        for k in 0..self.n_time {
            for &(i, j) in &self.space_edges {
                if i == j || i >= self.n_space || j >= self.n_space {
                    return Err(Error::InvalidGraph("bad space edge indices".into()));
                }
                let d = *self.node(i, k) - *self.node(j, k);
                if d.interval() >= 0.0 {
                    return Err(Error::InvalidGraph(format!(
                        "space edge ({i},{j}) at slice {k} is not space-like"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Free single-chain sum: sum_k trace(v_k P_k dagger(P_k)) - 2m sum Re det(P_k),
    /// with v_k the inverse time edge.
    pub fn lagrangian_free_raw(&self) -> Result<C64> {
        if self.n_space != 1 {
            return Err(Error::InvalidGraph("free sum needs a single chain".into()));
        }
        if self.potential.is_some() {
            return Err(Error::InvalidGraph("free sum must not carry a potential".into()));
        }
        let mut total = C64::new(0.0, 0.0);
        for k in 0..self.n_time - 1 {
            let dx = (*self.node(0, k + 1) - *self.node(0, k)).matrix();
            let det_abs = dx.det().norm();
            let v = dx.inverse().map_err(|_| Error::DegenerateEdge { det_abs })?;
            let p = *self.time_spinor(0, k);
            total += (v * p * p.dagger()).trace();
            total -= 2.0 * self.mass * p.det().re;
        }
        Ok(total)
    }

    pub fn lagrangian_free(&self) -> Result<f64> {
        Ok(self.lagrangian_free_raw()?.re)
    }

    /// Full three-term regular sum: time-edge kinematics, space-edge circle
    /// products pairing consecutive time spinors, and the potential term
    /// averaged over each time edge's endpoints.
    pub fn lagrangian_regular_raw(&self) -> Result<C64> {
        let mut total = C64::new(0.0, 0.0);
        let e = self.potential.as_ref().map(|f| f.charge).unwrap_or(0.0);

        for k in 0..self.n_time - 1 {
            for i in 0..self.n_space {
                let dx = (*self.node(i, k + 1) - *self.node(i, k)).matrix();
                let det_abs = dx.det().norm();
                let v = dx.inverse().map_err(|_| Error::DegenerateEdge { det_abs })?;
                let p = *self.time_spinor(i, k);
                let bilinear = p * p.dagger();
                total += (v * bilinear).trace();
                total -= 2.0 * self.mass * p.det().re;
                if let Some(field) = &self.potential {
                    let a_avg = (field.a(self.node(i, k + 1)).matrix().bar()
                        + field.a(self.node(i, k)).matrix().bar())
                        * 0.5;
                    total += (a_avg * bilinear).trace() * e;
                }
            }
        }

        // space edges pair the spinor below node i with the spinor above node j,
        // in both orderings
        for k in 1..self.n_time - 1 {
            for &(i, j) in &self.space_edges {
                let dx = (*self.node(i, k) - *self.node(j, k)).matrix();
                let det_abs = dx.det().norm();
                let u = dx.inverse().map_err(|_| Error::DegenerateEdge { det_abs })?;
                let pi_prev = *self.time_spinor(i, k - 1);
                let pj = *self.time_spinor(j, k);
                let pj_prev = *self.time_spinor(j, k - 1);
                let pi = *self.time_spinor(i, k);
                let circle_ij = (pi_prev * pj.dagger() + pj * pi_prev.dagger()) * 0.5;
                let circle_ji = (pj_prev * pi.dagger() + pi * pj_prev.dagger()) * 0.5;
                total += (u * circle_ij).trace();
                total -= (u * circle_ji).trace();
            }
        }
        Ok(total)
    }

    pub fn lagrangian_regular(&self) -> Result<f64> {
        Ok(self.lagrangian_regular_raw()?.re)
    }
}

/// Stationary graph: traceless space nodes, one spinor each, undirected edges
/// with multiplicity, energy eps and mass.
pub struct StationaryGraph {
    pub nodes: Vec<MinkowskiVector>,
    pub spinors: Vec<SpinorMatrix>,
    /// (i, j, multiplicity) with i < j.
    pub edges: Vec<(usize, usize, u32)>,
    pub epsilon: f64,
    pub mass: f64,
    /// e*A as a matrix-valued potential of the node position; None means free.
    pub potential: Option<PotentialField>,
}

impl StationaryGraph {
    pub fn validate(&self) -> Result<()> {
        if self.nodes.len() != self.spinors.len() {
            return Err(Error::InvalidGraph("need one spinor per node".into()));
        }
        if self.epsilon <= 0.0 {
            return Err(Error::InvalidGraph("energy must be positive".into()));
        }
        for (idx, n) in self.nodes.iter().enumerate() {
            if n.t.abs() > 1e-12 * n.norm_max().max(1.0) {
                return Err(Error::InvalidGraph(format!("node {idx} is not a pure space vector")));
            }
        }
        for &(i, j, mult) in &self.edges {
            if i >= j || j >= self.nodes.len() || mult == 0 {
                return Err(Error::InvalidGraph("bad edge".into()));
            }
        }
        Ok(())
    }

    /// Inverse difference vector u_ij = (x_i - x_j)^-1; hermitian and
    /// antisymmetric in the indices.
    pub fn edge_inverse(&self, i: usize, j: usize) -> Result<SpinorMatrix> {
        let dx = (self.nodes[i] - self.nodes[j]).matrix();
        let det_abs = dx.det().norm();
        dx.inverse().map_err(|_| Error::DegenerateEdge { det_abs })
    }

    /// e * bar(A) at node i, zero without a potential.
    fn potential_bar_at(&self, i: usize) -> SpinorMatrix {
        match &self.potential {
            Some(f) => f.a(&self.nodes[i]).matrix().bar() * f.charge,
            None => SpinorMatrix::zero(),
        }
    }

    /// Stationary sum
    /// sum_i trace((eps + e bar A_i) P_i dagger(P_i))
    /// + sum over directed edges of trace(u_ij P_j S dagger(P_i))
    /// - 2m sum Re det(P_i).
    pub fn lagrangian_raw(&self) -> Result<C64> {
        let s = gauge_s();
        let mut total = C64::new(0.0, 0.0);
        for (i, p) in self.spinors.iter().enumerate() {
            let head = SpinorMatrix::identity() * self.epsilon + self.potential_bar_at(i);
            total += (head * *p * p.dagger()).trace();
            total -= 2.0 * self.mass * p.det().re;
        }
        for &(i, j, mult) in &self.edges {
            let u = self.edge_inverse(i, j)?;
            let pi = self.spinors[i];
            let pj = self.spinors[j];
            let m = mult as f64;
            total += (u * pj * s * pi.dagger()).trace() * m;
            total -= (u * pi * s * pj.dagger()).trace() * m;
        }
        Ok(total)
    }

    pub fn lagrangian(&self) -> Result<f64> {
        Ok(self.lagrangian_raw()?.re)
    }

    /// The same sum written in the split variables:
    /// sum_i ((eps_i - m)|P_i^+| - (eps_i + m)|P_i^-|) plus the directed edge
    /// sum of trace(bar(P_i^-) u_ij P_j^+), valid for scalar potentials.
    /// Agrees with `lagrangian_raw` exactly.
    pub fn lagrangian_split_raw(&self) -> Result<C64> {
        let mut total = C64::new(0.0, 0.0);
        for (i, p) in self.spinors.iter().enumerate() {
            let (plus, minus) = split_spinor(p);
            let head = self.potential_bar_at(i);
            let tr = head.trace().re;
            if (head - SpinorMatrix::identity() * (tr * 0.5)).norm_max() > 1e-12 * tr.abs().max(1.0) {
                return Err(Error::InvalidGraph(
                    "split form requires a scalar potential".into(),
                ));
            }
            let eps_i = self.epsilon + 0.5 * tr;
            total += C64::new(eps_i - self.mass, 0.0) * plus.det();
            total -= C64::new(eps_i + self.mass, 0.0) * minus.det();
        }
        for &(i, j, mult) in &self.edges {
            let u = self.edge_inverse(i, j)?;
            let m = mult as f64;
            let (pj_plus, pj_minus) = split_spinor(&self.spinors[j]);
            let (pi_plus, pi_minus) = split_spinor(&self.spinors[i]);
            total += (pi_minus.bar() * u * pj_plus).trace() * m;
            total -= (pj_minus.bar() * u * pi_plus).trace() * m;
        }
        Ok(total)
    }

    /// Per-node residual of the spinor stationarity condition
    /// (eps + e bar A_i) P_i + sum_j u_ij P_j S - m bar(dagger(P_i)).
    pub fn field_residuals(&self) -> Result<Vec<SpinorMatrix>> {
        let s = gauge_s();
        let n = self.nodes.len();
        let mut res: Vec<SpinorMatrix> = (0..n)
            .map(|i| {
                let head = SpinorMatrix::identity() * self.epsilon + self.potential_bar_at(i);
                head * self.spinors[i] - self.spinors[i].bar_dagger() * self.mass
            })
            .collect();
        for &(i, j, mult) in &self.edges {
            let u = self.edge_inverse(i, j)?;
            let m = mult as f64;
            res[i] = res[i] + u * self.spinors[j] * s * m;
            res[j] = res[j] - u * self.spinors[i] * s * m;
        }
        Ok(res)
    }

    /// Per-node residual of the node stationarity condition
    /// (e/2) bar(grad) trace(bar A_i P_i dagger(P_i))
    /// + sum_j u_ji (H_ij + dagger(H_ij)) u_ji with H_ij = P_i S dagger(P_j).
    pub fn node_residuals(&self) -> Result<Vec<SpinorMatrix>> {
        let s = gauge_s();
        let n = self.nodes.len();
        let mut res = vec![SpinorMatrix::zero(); n];
        if let Some(field) = &self.potential {
            for ((slot, node), spinor) in res.iter_mut().zip(&self.nodes).zip(&self.spinors) {
                let bilinear = *spinor * spinor.dagger();
                let grad = field.bilinear_trace_gradient(node, &bilinear);
                *slot = crate::field::bar_gradient_matrix(&grad) * (0.5 * field.charge);
            }
        }
        for &(i, j, mult) in &self.edges {
            let u_ij = self.edge_inverse(i, j)?;
            let m = mult as f64;
            let h_ij = self.spinors[i] * s * self.spinors[j].dagger();
            let sym = h_ij + h_ij.dagger();
            // the node-j variation flips the sign of delta(u), and the
            // symmetrized term for the reversed pair is -sym
            res[i] = res[i] + u_ij * sym * u_ij * m;
            res[j] = res[j] - u_ij * sym * u_ij * m;
        }
        Ok(res)
    }
}

/// Quaternionic split of a spinor: plus = (P + bar(dagger P))/sqrt(2),
/// minus = (P - bar(dagger P)) S / sqrt(2). The symmetric scaling makes the
/// split form of the stationary sum agree with the direct form exactly.
pub fn split_spinor(p: &SpinorMatrix) -> (SpinorMatrix, SpinorMatrix) {
    let q = p.bar_dagger();
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let plus = (*p + q) * inv_sqrt2;
    let minus = (*p - q) * gauge_s() * inv_sqrt2;
    (plus, minus)
}

/// Inverse of [`split_spinor`]: P = (P^+ - P^- S)/sqrt(2).
pub fn join_spinor(plus: &SpinorMatrix, minus: &SpinorMatrix) -> SpinorMatrix {
    (*plus - *minus * gauge_s()) * std::f64::consts::FRAC_1_SQRT_2
}

/// Hamiltonian sum for real scalar amplitudes:
/// sum_i (E + V_i) psi_i^2 + (1/2m) sum over edge pairs of
/// psi_i psi_k (1/2) trace(u_ij u_jk). The trace halves reduce to plain
/// scalar products whenever the edge inverses commute (collinear nodes).
pub fn hamiltonian_sum(
    nodes: &[MinkowskiVector],
    edges: &[(usize, usize, u32)],
    psis: &[f64],
    e_energy: f64,
    mass: f64,
    potential: impl Fn(&MinkowskiVector) -> f64,
) -> Result<f64> {
    if nodes.len() != psis.len() {
        return Err(Error::InvalidGraph("need one amplitude per node".into()));
    }
    let mut total = 0.0;
    for (node, psi) in nodes.iter().zip(psis.iter()) {
        total += (e_energy + potential(node)) * psi * psi;
    }

    // directed adjacency with multiplicity
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nodes.len()];
    for &(i, j, mult) in edges {
        adj[i].push((j, mult as f64));
        adj[j].push((i, mult as f64));
    }
    let inv = |i: usize, j: usize| -> Result<SpinorMatrix> {
        let dx = (nodes[i] - nodes[j]).matrix();
        let det_abs = dx.det().norm();
        dx.inverse().map_err(|_| Error::DegenerateEdge { det_abs })
    };

    let mut kinetic = 0.0;
    for i in 0..nodes.len() {
        for &(j, mij) in &adj[i] {
            let u_ij = inv(i, j)?;
            for &(k, mjk) in &adj[j] {
                let u_jk = inv(j, k)?;
                kinetic += mij * mjk * psis[i] * psis[k] * 0.5 * (u_ij * u_jk).trace().re;
            }
        }
    }
    total += kinetic / (2.0 * mass);
    Ok(total)
}

/// Central finite-difference gradient with step 1e-6 * max(1, |p|).
/// Validates every analytic variation equation in the test suites.
pub fn numeric_gradient(sum_fn: impl Fn(&[f64]) -> f64, params: &[f64]) -> Vec<f64> {
    let mut grad = Vec::with_capacity(params.len());
    let mut work = params.to_vec();
    for idx in 0..params.len() {
        let h = 1e-6 * params[idx].abs().max(1.0);
        let orig = work[idx];
        work[idx] = orig + h;
        let fp = sum_fn(&work);
        work[idx] = orig - h;
        let fm = sum_fn(&work);
        work[idx] = orig;
        grad.push((fp - fm) / (2.0 * h));
    }
    grad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quaternion::gauge_s;

    fn rest_chain(n_time: usize, mass: f64) -> RegularGraph {
        let nodes = (0..n_time)
            .map(|k| MinkowskiVector::new(k as f64 / mass, 0.0, 0.0, 0.0))
            .collect();
        RegularGraph {
            n_space: 1,
            n_time,
            nodes,
            time_spinors: vec![SpinorMatrix::identity(); n_time - 1],
            space_edges: vec![],
            potential: None,
            mass,
        }
    }

    #[test]
    fn rest_chain_has_zero_lagrangian() {
        let g = rest_chain(6, 1.0);
        g.validate().unwrap();
        assert!(g.lagrangian_free().unwrap().abs() < 1e-14);
    }

    #[test]
    fn free_sum_is_gauge_invariant_per_edge() {
        let mut g = rest_chain(5, 1.0);
        // arbitrary spinors, arbitrary per-edge unit quaternions
        g.time_spinors = vec![
            SpinorMatrix::new(C64::new(0.9, 0.2), C64::new(-0.3, 0.4), C64::new(0.1, -0.2), C64::new(1.1, 0.3)),
            SpinorMatrix::from_reals(1.0, 0.2, -0.1, 0.8),
            SpinorMatrix::new(C64::new(0.5, -0.6), C64::new(0.7, 0.1), C64::new(-0.4, 0.2), C64::new(0.9, 0.5)),
            SpinorMatrix::identity(),
        ];
        let before = g.lagrangian_free().unwrap();
        let gauges = [
            crate::quaternion::Quaternion::from_components(0.6, 0.0, 0.8, 0.0),
            crate::quaternion::Quaternion::from_components(0.36, 0.48, 0.6, 0.528),
            crate::quaternion::Quaternion::from_components(1.0, 0.0, 0.0, 0.0),
            crate::quaternion::Quaternion::from_components(0.0, 0.0, 0.0, 1.0),
        ];
        for (p, s) in g.time_spinors.iter_mut().zip(gauges.iter()) {
            let norm = s.norm_det().sqrt();
            *p = *p * (s.matrix() * (1.0 / norm));
        }
        let after = g.lagrangian_free().unwrap();
        assert!((before - after).abs() < 1e-12, "before {before} after {after}");
    }

    #[test]
    fn regular_sum_reduces_to_free_sum_for_single_chain() {
        let mut g = rest_chain(5, 1.0);
        g.time_spinors[1] = SpinorMatrix::from_reals(0.9, 0.1, -0.2, 1.05);
        assert!(
            (g.lagrangian_free().unwrap() - g.lagrangian_regular().unwrap()).abs() < 1e-14
        );
    }

    #[test]
    fn two_chain_topology_evaluates() {
        // two chains a space-like distance apart, four slices
        let n_space = 2;
        let n_time = 4;
        let mut nodes = Vec::new();
        for k in 0..n_time {
            nodes.push(MinkowskiVector::new(k as f64, 0.0, 0.0, 1.0));
            nodes.push(MinkowskiVector::new(k as f64, 0.0, 0.0, -1.0));
        }
        let g = RegularGraph {
            n_space,
            n_time,
            nodes,
            time_spinors: vec![SpinorMatrix::identity(); n_space * (n_time - 1)],
            space_edges: vec![(0, 1)],
            potential: None,
            mass: 1.0,
        };
        g.validate().unwrap();
        let raw = g.lagrangian_regular_raw().unwrap();
        assert!(raw.im.abs() < 1e-14);
    }

    #[test]
    fn split_round_trips_and_has_the_right_types() {
        let p = SpinorMatrix::new(
            C64::new(0.3, 0.7),
            C64::new(-0.2, 0.5),
            C64::new(0.9, -0.4),
            C64::new(0.6, 0.1),
        );
        let (plus, minus) = split_spinor(&p);
        // plus is a quaternion-type matrix, minus an anti-type
        assert!((plus.bar_dagger() - plus).norm_max() < 1e-14);
        assert!((minus.bar_dagger() + minus).norm_max() < 1e-14);
        assert!(join_spinor(&plus, &minus).approx_eq(&p, 1e-14));
    }

    #[test]
    fn hamiltonian_zero_amplitudes_vanish() {
        let nodes = vec![
            MinkowskiVector::spatial(1.0, 0.0, 0.0),
            MinkowskiVector::spatial(-1.0, 0.0, 0.0),
        ];
        let h = hamiltonian_sum(&nodes, &[(0, 1, 1)], &[0.0, 0.0], 0.3, 1.0, |_| 0.0).unwrap();
        assert_eq!(h, 0.0);
    }

    #[test]
    fn hamiltonian_collinear_nodes_reduce_to_scalars() {
        // for collinear nodes the edge inverses commute and the kinetic term
        // is a plain sum of products 1/((x_i-x_j)(x_j-x_k))
        let xs = [-1.3, -0.25, 0.8];
        let nodes: Vec<MinkowskiVector> =
            xs.iter().map(|x| MinkowskiVector::spatial(*x, 0.0, 0.0)).collect();
        let edges = vec![(0, 1, 1), (0, 2, 1), (1, 2, 1)];
        let psis = [0.7, -0.4, 1.1];
        let h = hamiltonian_sum(&nodes, &edges, &psis, 0.0, 1.0, |_| 0.0).unwrap();
        let mut expected = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                if j == i {
                    continue;
                }
                for k in 0..3 {
                    if k == j {
                        continue;
                    }
                    expected += psis[i] * psis[k] / ((xs[i] - xs[j]) * (xs[j] - xs[k]));
                }
            }
        }
        expected /= 2.0;
        assert!((h - expected).abs() < 1e-12, "h {h} expected {expected}");
    }

    #[test]
    fn numeric_gradient_is_exact_on_quadratics() {
        let f = |p: &[f64]| 3.0 * p[0] * p[0] - 2.0 * p[0] * p[1] + p[1] * p[1];
        let g = numeric_gradient(f, &[0.7, -1.2]);
        assert!((g[0] - (6.0 * 0.7 - 2.0 * -1.2)).abs() < 1e-9);
        assert!((g[1] - (-2.0 * 0.7 + 2.0 * -1.2)).abs() < 1e-9);
    }

    #[test]
    fn gauge_factor_is_fixed_choice() {
        let s = gauge_s();
        assert!((s * s.dagger()).approx_eq(&SpinorMatrix::identity(), 0.0));
        assert!((s.dagger() + s).norm_max() == 0.0);
        assert!((s.det() - C64::new(1.0, 0.0)).norm() == 0.0);
    }
}
