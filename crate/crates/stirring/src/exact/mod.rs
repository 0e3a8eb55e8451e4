//! Exact finite-dimensional machinery: state-space enumeration, gl(N)
//! matrices, sparse operators, linear solvers, Hamiltonian and generator
//! assembly, duality matrices and similarity transforms.

pub mod lie;
pub mod operators;
pub mod solve;
pub mod space;
pub mod sparse;

pub use lie::{exp_nilpotent, LieBasis};
pub use operators::{
    build_dual_generator, build_duality_matrix, build_generator, build_hamiltonian, build_s1,
    build_s2, edge_hamiltonian, embed_one, embed_two, generator_from_moves, intertwining_residual,
    kron, moment, site_hamiltonian, stationary_f64, stationary_rational, transform,
};
pub use solve::{closed_classes, expm_f64, lu_solve_rational, null_vector_f64, solve_rational};
pub use space::{site_dimension, DualSpace, StateSpace};
pub use sparse::SparseOperator;
