//! Scalar monitors: Lorentz norms, energy, vorticity structure, geometry
//! residuals and Lipschitz-type quantities.

mod energy;
mod geometry;
mod lipschitz;
mod lorentz;
mod norms;
mod vorticity;

pub use energy::{
    energy, energy_constant, energy_ineq_check, EnergyCheck, EnergySample, DIV_FREE_TOL,
};
pub use geometry::{
    block_geometry, geometry_residuals, index_rotation_residual, omega_cross_etheta,
    random_rotation_residual, rotate_quarter, swirl, GeometryResiduals,
};
pub use lipschitz::{b0_inf1, gradient_sups, lipschitz_sample, LipschitzSample, TimeIntegral};
pub use lorentz::{lorentz_norm, Rearrangement};
pub use norms::{norm_table, REPORT_PSI};
pub use vorticity::{radial_over_r_sup, Zeta};
