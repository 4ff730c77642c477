//! Discrete space-time graph mechanics for relativistic spin-1/2 particles.
//!
//! States are directed space-time graphs with constant spinor matrices on
//! their time-like edges; one real Lagrangian sum over the graph supplies
//! both the spinor equations and, through node variation, the graph geometry
//! itself. The crate provides
//!
//! - exact 2x2 spinor-matrix algebra with Minkowski encoding, Lorentz
//!   transformations and quaternions ([`spinor`], [`minkowski`], [`lorentz`],
//!   [`quaternion`]),
//! - orthogonal-polynomial zero systems, weighting constants and exact
//!   quadrature ([`orthopoly`]),
//! - graph Lagrangian and Hamiltonian sums with variational checks
//!   ([`graph`]),
//! - bound-state solvers: the two-node ground state, the coupled radial
//!   system with its closed-form spectrum, the nonrelativistic limit and the
//!   harmonic oscillator ([`solvers`]),
//! - trajectory propagation under electromagnetic potentials with the
//!   classical force-law oracle ([`dynamics`], [`field`]),
//! - unit-sphere grids with stationary angular structure ([`sphere`]),
//! - serialization of results to JSON and CSV ([`export`]).
//!
//! Natural units are used throughout (hbar = c = 1).

pub mod dynamics;
pub mod error;
pub mod export;
pub mod field;
pub mod graph;
pub mod lorentz;
pub mod minkowski;
pub mod newton;
pub mod orthopoly;
pub mod quaternion;
pub mod solvers;
pub mod sphere;
pub mod spinor;

pub use error::{Error, Result};
pub use minkowski::MinkowskiVector;
pub use spinor::SpinorMatrix;
