//! JSON and CSV serialization of graphs, grids and solver results.
//!
//! CSV numbers carry 12 significant digits; JSON uses the shortest
//! round-tripping float form, so identical inputs always serialize to
//! byte-identical output.

use crate::error::{Error, Result};
use crate::graph::StationaryGraph;
use crate::minkowski::MinkowskiVector;
use crate::sphere::SphereGrid;
use crate::spinor::{SpinorMatrix, C64};
use serde::{Deserialize, Serialize};

/// 12-significant-digit CSV float.
pub fn csv_float(x: f64) -> String {
    format!("{x:.11e}")
}

/// Spinor as 8 reals, row-major, re before im.
pub fn spinor_to_reals(p: &SpinorMatrix) -> [f64; 8] {
    [p.a.re, p.a.im, p.b.re, p.b.im, p.c.re, p.c.im, p.d.re, p.d.im]
}

pub fn spinor_from_reals(v: &[f64; 8]) -> SpinorMatrix {
    SpinorMatrix::new(
        C64::new(v[0], v[1]),
        C64::new(v[2], v[3]),
        C64::new(v[4], v[5]),
        C64::new(v[6], v[7]),
    )
}

#[derive(Serialize, Deserialize)]
pub struct StationaryGraphRecord {
    pub nodes: Vec<[f64; 4]>,
    pub spinors: Vec<[f64; 8]>,
    pub edges: Vec<(usize, usize, u32)>,
    pub epsilon: f64,
    pub mass: f64,
}

impl StationaryGraphRecord {
    pub fn from_graph(g: &StationaryGraph) -> Self {
        Self {
            nodes: g.nodes.iter().map(|n| [n.t, n.x, n.y, n.z]).collect(),
            spinors: g.spinors.iter().map(spinor_to_reals).collect(),
            edges: g.edges.clone(),
            epsilon: g.epsilon,
            mass: g.mass,
        }
    }

    /// Rebuilds the graph; the potential is not serialized and must be
    /// re-attached by the caller.
    pub fn into_graph(self) -> StationaryGraph {
        StationaryGraph {
            nodes: self
                .nodes
                .iter()
                .map(|n| MinkowskiVector::new(n[0], n[1], n[2], n[3]))
                .collect(),
            spinors: self.spinors.iter().map(spinor_from_reals).collect(),
            edges: self.edges,
            epsilon: self.epsilon,
            mass: self.mass,
            potential: None,
        }
    }
}

#[derive(Serialize, Deserialize)]
pub struct SphereGridRecord {
    pub m: usize,
    pub h: usize,
    pub kappa_plus: i32,
    pub kappa_minus: i32,
    pub edges_per_node: usize,
    pub max_stationarity_residual: f64,
    /// Per node: theta, phi, re(chi), im(chi).
    pub nodes: Vec<[f64; 4]>,
    pub edges: Vec<(usize, usize, u32)>,
}

impl SphereGridRecord {
    pub fn from_grid(g: &SphereGrid) -> Self {
        let nodes = g
            .points
            .iter()
            .zip(g.chis.iter())
            .map(|(pt, chi)| {
                let theta = pt.p.z.clamp(-1.0, 1.0).acos();
                let phi = pt.p.y.atan2(pt.p.x);
                [theta, phi, chi.re, chi.im]
            })
            .collect();
        Self {
            m: g.m_half,
            h: g.h,
            kappa_plus: g.kappa(crate::sphere::Branch::Plus),
            kappa_minus: g.kappa(crate::sphere::Branch::Minus),
            edges_per_node: g.edges_per_node,
            max_stationarity_residual: g.max_stationarity_residual(),
            nodes,
            edges: g.edges.clone(),
        }
    }

    /// Two-column plot data (theta, phi) per node.
    pub fn plot_csv(&self) -> String {
        let mut out = String::from("theta,phi\n");
        for n in &self.nodes {
            out.push_str(&csv_float(n[0]));
            out.push(',');
            out.push_str(&csv_float(n[1]));
            out.push('\n');
        }
        out
    }
}

/// Trajectory row set with the conservation residual per accepted step.
pub struct TrajectoryTable {
    pub rows: Vec<TrajectoryRow>,
}

#[derive(Serialize, Deserialize, Clone, Copy)]
pub struct TrajectoryRow {
    pub k: usize,
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub det_v: f64,
    pub conservation_residual: f64,
}

impl TrajectoryTable {
    /// Columns: k, t, x, y, z, det(v), conservation_residual.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,t,x,y,z,det_v,conservation_residual\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.k,
                csv_float(r.t),
                csv_float(r.x),
                csv_float(r.y),
                csv_float(r.z),
                csv_float(r.det_v),
                csv_float(r.conservation_residual),
            ));
        }
        out
    }
}

/// Spectrum table rows (n_r, kappa, epsilon).
pub fn spectrum_csv(rows: &[(usize, i32, f64)]) -> String {
    let mut out = String::from("n_r,kappa,epsilon\n");
    for (nr, kappa, eps) in rows {
        out.push_str(&format!("{nr},{kappa},{}\n", csv_float(*eps)));
    }
    out
}

/// Zero/weight table for the polynomial families.
pub fn opzeros_csv(xs: &[f64], rhos: Option<&[f64]>, node_weights: Option<&[f64]>) -> String {
    let mut out = String::from("i,x,rho,node_weight\n");
    for (i, x) in xs.iter().enumerate() {
        let rho = rhos.map(|r| csv_float(r[i])).unwrap_or_default();
        let w = node_weights.map(|w| csv_float(w[i])).unwrap_or_default();
        out.push_str(&format!("{},{},{},{}\n", i + 1, csv_float(*x), rho, w));
    }
    out
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidParameter(format!("serialization failed: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers;

    #[test]
    fn graph_round_trips_through_json() {
        let g = solvers::ground_state_graph(1.0, solvers::FINE_STRUCTURE).unwrap();
        let record = StationaryGraphRecord::from_graph(&g);
        let json = to_json_pretty(&record).unwrap();
        let back: StationaryGraphRecord = serde_json::from_str(&json).unwrap();
        let g2 = back.into_graph();
        assert_eq!(g.nodes.len(), g2.nodes.len());
        for (a, b) in g.nodes.iter().zip(g2.nodes.iter()) {
            assert_eq!(a, b);
        }
        for (a, b) in g.spinors.iter().zip(g2.spinors.iter()) {
            assert!(a.approx_eq(b, 0.0));
        }
        assert_eq!(g.edges, g2.edges);
        assert_eq!(g.epsilon, g2.epsilon);
    }

    #[test]
    fn csv_has_twelve_significant_digits() {
        assert_eq!(csv_float(std::f64::consts::PI), "3.14159265359e0");
        assert_eq!(csv_float(-0.5), "-5.00000000000e-1");
    }

    #[test]
    fn deterministic_serialization() {
        let g = crate::sphere::build_grid(2, 1).unwrap();
        let a = to_json_pretty(&SphereGridRecord::from_grid(&g)).unwrap();
        let b = to_json_pretty(&SphereGridRecord::from_grid(&crate::sphere::build_grid(2, 1).unwrap())).unwrap();
        assert_eq!(a, b);
    }
}
