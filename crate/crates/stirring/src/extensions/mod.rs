//! Beyond the integrable chain: the instantaneous-thermalization process,
//! the reaction-diffusion process with mutations, and the one-point
//! steady-state formula for general occupancy, each with its dual.

pub mod onepoint;
pub mod reaction;
pub mod thermal;

pub use onepoint::{one_point_closed, one_point_via_ruin};
pub use reaction::{
    h_map, rd_boundary_params, rd_closure_residual, rd_densities_from_params,
    rd_density_evolution, rd_duality_residual, rd_generator, rd_moves_exact, rd_reversible_weight,
    RdSpec,
};
pub use thermal::{
    mu_th, simulate_thermal_to_time, thermal_dual_generator, thermal_duality_residual,
    thermal_generator, thermal_moves_exact,
};
