//! Simulation and exact-verification toolkit for the boundary-driven
//! multispecies stirring process.
//!
//! Particles of `N - 1` species plus holes live on a finite connected graph
//! with at most `nu` units per vertex. Neighbouring vertices swap their
//! contents at rate `omega * n_A^x * n_B^y`; reservoirs attached to vertices
//! inject, replace and remove particles at rate `gamma * alpha_A * n_B^x`.
//!
//! The crate provides four layers:
//!
//! * [`lattice`] — model definitions (graphs, reservoirs, occupancy
//!   configurations, reversible product measures, JSON spec files);
//! * [`generator`] / [`dualsim`] — event-driven continuous-time Monte Carlo
//!   for the forward process and for its absorbing dual;
//! * [`exact`] — finite state-space machinery: gl(N) matrices, sparse
//!   generators and Hamiltonians, exact-rational stationary vectors, the
//!   duality matrix and intertwining checks, similarity transforms;
//! * [`integrable`] / [`extensions`] — closed-form steady-state results for
//!   the two-reservoir chain at unit occupancy, and the thermalized and
//!   reaction-diffusion variants with their duals.
//!
//! Exact statements are computed in arbitrary-precision rational arithmetic
//! ([`ratio::Ratio`]); Monte Carlo and large instances use `f64`.

pub mod dualsim;
pub mod error;
pub mod exact;
pub mod extensions;
pub mod generator;
pub mod integrable;
pub mod lattice;
pub mod ratio;

pub use error::{Error, Result};
pub use ratio::Ratio;
