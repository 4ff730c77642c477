//! Unit-sphere grids from a conformal plane mapping.
//!
//! A sphere point (theta, phi) maps to chi = tan(theta/2) e^{i phi} in the
//! complex plane (north pole at the origin, equator on the unit circle, south
//! pole at infinity). Grids of 2m nodes on each of h latitude circles, with
//! edges along latitude and longitude circles and the opposite point counted
//! twice, are stationary points of the angular Lagrangian with separation
//! eigenvalue kappa = +-(m + h - 1).

use crate::error::{Error, Result};
use crate::minkowski::MinkowskiVector;
use crate::orthopoly::{self, OdeSpec};
use crate::spinor::{SpinorMatrix, C64};
use serde::{Deserialize, Serialize};

/// Plane image of a sphere point; the south pole has no finite image.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChiCoord {
    Finite(C64),
    Pole,
}

#[derive(Clone, Copy, Debug)]
pub struct SpherePoint {
    pub chi: ChiCoord,
    /// Traceless hermitian unit vector, p^2 = I.
    pub p: MinkowskiVector,
}

/// chi = tan(theta/2) e^{i phi}.
pub fn chi_map(theta: f64, phi: f64) -> ChiCoord {
    let half = 0.5 * theta;
    if (half - std::f64::consts::FRAC_PI_2).abs() < 1e-15 {
        return ChiCoord::Pole;
    }
    let t = half.tan();
    ChiCoord::Finite(C64::new(t * phi.cos(), t * phi.sin()))
}

/// Inverse map: z = (1-|chi|^2)/(1+|chi|^2), x+iy = 2 chi / (1+|chi|^2).
pub fn sphere_from_chi(chi: ChiCoord) -> SpherePoint {
    match chi {
        ChiCoord::Pole => SpherePoint { chi, p: MinkowskiVector::spatial(0.0, 0.0, -1.0) },
        ChiCoord::Finite(c) => {
            let n = 1.0 + c.norm_sqr();
            let z = (1.0 - c.norm_sqr()) / n;
            let x = 2.0 * c.re / n;
            let y = 2.0 * c.im / n;
            SpherePoint { chi, p: MinkowskiVector::spatial(x, y, z) }
        }
    }
}

/// Spinor factor Q(chi) = (1, conj(chi); chi, -1) with
/// det Q = -(1+|chi|^2) and Q^2 = (1+|chi|^2) I.
pub fn q_factor(chi: C64) -> SpinorMatrix {
    SpinorMatrix::new(C64::new(1.0, 0.0), chi.conj(), chi, C64::new(-1.0, 0.0))
}

/// Decomposition p = Q U Q^{-1} with U = diag(1, -1).
pub fn decompose_p(chi: C64) -> (SpinorMatrix, SpinorMatrix) {
    (q_factor(chi), SpinorMatrix::sigma3())
}

/// Closed form for p_1 (p_1 - p_2)^{-1} =
/// (1/2) Q_1 (0, 1/(chi_2-chi_1); -1/(conj chi_2 - conj chi_1), 0) Q_2.
pub fn difference_inverse(chi1: C64, chi2: C64) -> Result<SpinorMatrix> {
    let d = chi2 - chi1;
    if d.norm() < 1e-300 {
        return Err(Error::DegenerateEdge { det_abs: 0.0 });
    }
    let mid = SpinorMatrix::new(
        C64::new(0.0, 0.0),
        C64::new(1.0, 0.0) / d,
        -C64::new(1.0, 0.0) / d.conj(),
        C64::new(0.0, 0.0),
    );
    Ok(q_factor(chi1) * mid * q_factor(chi2) * 0.5)
}

/// Which branch of the stationary coefficient ansatz is attached to a grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Branch {
    /// mu_i = 1, nu_i = conj(chi_i); kappa = +l/2 (A_i = I).
    Plus,
    /// mu_i = chi_i, nu_i = 1; kappa = -l/2.
    Minus,
}

#[derive(Clone, Debug)]
pub struct SphereGrid {
    pub m_half: usize,
    pub h: usize,
    /// Latitude z-values solving the zero system, ascending.
    pub zs: Vec<f64>,
    /// Latitude circle radii t_k = sqrt((1-z)/(1+z)).
    pub ts: Vec<f64>,
    /// Node plane images, indexed latitude-major: idx = k * 2m + j.
    pub chis: Vec<C64>,
    pub points: Vec<SpherePoint>,
    /// Undirected edges (i, j, multiplicity), i < j.
    pub edges: Vec<(usize, usize, u32)>,
    /// Edge count per node, antipodal partner counted twice: l = 2(m + h - 1).
    pub edges_per_node: usize,
}

impl SphereGrid {
    pub fn n_nodes(&self) -> usize {
        self.chis.len()
    }

    pub fn kappa(&self, branch: Branch) -> i32 {
        let half_l = (self.m_half + self.h - 1) as i32;
        match branch {
            Branch::Plus => half_l,
            Branch::Minus => -half_l,
        }
    }

    /// Coefficients (mu_i, nu_i) of the stationary ansatz for the branch.
    pub fn coefficients(&self, branch: Branch) -> Vec<(C64, C64)> {
        self.chis
            .iter()
            .map(|chi| match branch {
                Branch::Plus => (C64::new(1.0, 0.0), chi.conj()),
                Branch::Minus => (*chi, C64::new(1.0, 0.0)),
            })
            .collect()
    }

    /// Quaternionic node matrices A_i = Q_i^{-1} (conj mu_i, nu_i; conj nu_i, -mu_i).
    pub fn node_matrices(&self, branch: Branch) -> Vec<SpinorMatrix> {
        self.chis
            .iter()
            .zip(self.coefficients(branch))
            .map(|(chi, (mu, nu))| {
                let n = SpinorMatrix::new(mu.conj(), nu, nu.conj(), -mu);
                let q = q_factor(*chi);
                q * n * (C64::new(1.0, 0.0) / (1.0 + chi.norm_sqr()))
            })
            .collect()
    }

    /// Per-node residual of the grid stationarity sum
    /// sum_i (1 + chi_i conj(chi_k)) / (chi_k - chi_i) over the edges of k.
    pub fn stationarity_residuals(&self) -> Vec<C64> {
        node_stationarity_residuals(&self.chis, &self.edges)
    }

    pub fn max_stationarity_residual(&self) -> f64 {
        self.stationarity_residuals()
            .iter()
            .fold(0.0, |a, r| a.max(r.norm()))
    }
}

/// Grid stationarity residuals for an arbitrary node set with edges.
pub fn node_stationarity_residuals(chis: &[C64], edges: &[(usize, usize, u32)]) -> Vec<C64> {
    let mut acc = vec![C64::new(0.0, 0.0); chis.len()];
    for &(i, j, mult) in edges {
        let m = mult as f64;
        let ci = chis[i];
        let cj = chis[j];
        acc[i] += (C64::new(1.0, 0.0) + cj * ci.conj()) / (ci - cj) * m;
        acc[j] += (C64::new(1.0, 0.0) + ci * cj.conj()) / (cj - ci) * m;
    }
    acc
}

/// Fractional-linear action of a unit-quaternion rotation on plane images:
/// chi -> (a chi + b) / (c chi + d) with (a b; c d) the rotation matrix.
pub fn moebius_apply(t: &SpinorMatrix, chi: C64) -> C64 {
    (t.a * chi + t.b) / (t.c * chi + t.d)
}

/// Stationarity residual set of the angular Lagrangian for arbitrary nodes,
/// coefficients and separation constant; returns the maximum magnitude.
pub fn ansatz_residual_max(
    chis: &[C64],
    coeffs: &[(C64, C64)],
    edges: &[(usize, usize, u32)],
    kappa: f64,
) -> f64 {
    let n = chis.len();
    let mut mu_sum = vec![C64::new(0.0, 0.0); n];
    let mut nu_sum = vec![C64::new(0.0, 0.0); n];
    let mut chi_sum = vec![C64::new(0.0, 0.0); n];
    for &(i, j, mult) in edges {
        let m = mult as f64;
        for (k, l) in [(i, j), (j, i)] {
            let d = chis[k] - chis[l];
            let (mu_l, nu_l) = coeffs[l];
            let (mu_k, nu_k) = coeffs[k];
            mu_sum[k] += mu_l / d * m;
            nu_sum[k] += nu_l / d.conj() * m;
            chi_sum[k] += (nu_k.conj() * mu_l - nu_l.conj() * mu_k) / (d * d) * m;
        }
    }
    let mut max_res = 0.0f64;
    for k in 0..n {
        let (mu_k, nu_k) = coeffs[k];
        let denom = 1.0 + chis[k].norm_sqr();
        let r1 = mu_sum[k] - nu_k * (2.0 * kappa / denom);
        let r2 = nu_sum[k] + mu_k * (2.0 * kappa / denom);
        let r3 = -chi_sum[k]
            + chis[k].conj() * (2.0 * kappa * (mu_k.norm_sqr() + nu_k.norm_sqr()) / (denom * denom));
        max_res = max_res.max(r1.norm()).max(r2.norm()).max(r3.norm());
    }
    max_res
}

/// Builds the 2m x h node grid. Latitude parameters come from the
/// Legendre-like zero system sum_i 1/(z_k - z_i) = m z_k / (1 - z_k^2).
pub fn build_grid(m_half: usize, h: usize) -> Result<SphereGrid> {
    if m_half == 0 || h == 0 {
        return Err(Error::InvalidParameter("need m >= 1 latitude nodes and h >= 1 circles".into()));
    }
    let spec = OdeSpec::legendre_like(m_half as u32)?;
    let zeros = orthopoly::solve_zeros(&spec, h)?;
    let zs = zeros.xs.clone();
    let ts: Vec<f64> = zs.iter().map(|z| ((1.0 - z) / (1.0 + z)).sqrt()).collect();

    let two_m = 2 * m_half;
    let mut chis = Vec::with_capacity(two_m * h);
    for t in &ts {
        for j in 0..two_m {
            let angle = std::f64::consts::PI * (j as f64 + 1.0) / m_half as f64;
            chis.push(C64::new(t * angle.cos(), t * angle.sin()));
        }
    }

    // multiplicity 1 per shared circle; the opposite point (k, j+m) shares
    // both its latitude and its longitude circle, hence counts twice
    let n = chis.len();
    let mut edges = Vec::new();
    let idx = |k: usize, j: usize| k * two_m + j;
    for a in 0..n {
        for b in (a + 1)..n {
            let (ka, ja) = (a / two_m, a % two_m);
            let (kb, jb) = (b / two_m, b % two_m);
            let mut mult = 0u32;
            if ka == kb {
                mult += 1;
            }
            if ja == jb || ja == (jb + m_half) % two_m || jb == (ja + m_half) % two_m {
                mult += 1;
            }
            if mult > 0 {
                edges.push((a, b, mult));
            }
        }
    }
    debug_assert_eq!(idx(0, 0), 0);

    let points = chis.iter().map(|c| sphere_from_chi(ChiCoord::Finite(*c))).collect();
    let grid = SphereGrid {
        m_half,
        h,
        zs,
        ts,
        chis,
        points,
        edges,
        edges_per_node: 2 * (m_half + h - 1),
    };

    // structural checks: per-node edge count and stationarity
    let mut counts = vec![0usize; n];
    for &(i, j, mult) in &grid.edges {
        counts[i] += mult as usize;
        counts[j] += mult as usize;
    }
    if counts.iter().any(|c| *c != grid.edges_per_node) {
        return Err(Error::InvalidGraph("per-node edge count is not uniform".into()));
    }
    let residual = grid.max_stationarity_residual();
    if residual > 1e-10 {
        return Err(Error::GridInvalid { residual, tolerance: 1e-10 });
    }
    Ok(grid)
}

/// Angular Lagrangian over the grid edges:
/// sum over directed edges of conj(nu_j) mu_i / (chi_j - chi_i) + conjugate
/// pairing, minus 2 kappa sum_i (|mu_i|^2 + |nu_i|^2) / (1 + |chi_i|^2).
pub fn angular_lagrangian(
    chis: &[C64],
    coeffs: &[(C64, C64)],
    edges: &[(usize, usize, u32)],
    kappa: f64,
) -> C64 {
    let mut total = C64::new(0.0, 0.0);
    for &(i, j, mult) in edges {
        let m = mult as f64;
        let (mu_i, nu_i) = coeffs[i];
        let (mu_j, nu_j) = coeffs[j];
        let dij = chis[j] - chis[i];
        // directed pair (i, j)
        total += (nu_j.conj() * mu_i / dij + nu_j * mu_i.conj() / dij.conj()) * m;
        // directed pair (j, i)
        total += (nu_i.conj() * mu_j / -dij + nu_i * mu_j.conj() / -dij.conj()) * m;
    }
    for (chi, (mu, nu)) in chis.iter().zip(coeffs.iter()) {
        total -= C64::new(2.0 * kappa * (mu.norm_sqr() + nu.norm_sqr()) / (1.0 + chi.norm_sqr()), 0.0);
    }
    total
}

/// Verifies the full set of stationarity conditions of the angular
/// Lagrangian at the branch ansatz and returns (kappa, max residual).
pub fn angular_stationarity(grid: &SphereGrid, branch: Branch) -> Result<(i32, f64)> {
    let kappa = grid.kappa(branch) as f64;
    let coeffs = grid.coefficients(branch);
    let max_res = ansatz_residual_max(&grid.chis, &coeffs, &grid.edges, kappa);
    if max_res > 1e-10 {
        return Err(Error::GridInvalid { residual: max_res, tolerance: 1e-10 });
    }
    Ok((grid.kappa(branch), max_res))
}
