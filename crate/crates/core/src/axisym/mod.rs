//! Axisymmetric data without swirl and cylindrical-coordinate helpers.

mod cyl;
mod recipe;

pub use cyl::{
    cyl_components, riesz_identity_check, rotate_scalar_quarter, scalar_rotation_residual,
};
pub(crate) use cyl::{sample_cylinder, to_physical};
pub use recipe::{
    gradient_part, make_ill_prepared, make_initial_data, make_velocity, solenoidal_part,
    sound_part, zeta_exact, AxisymRecipe, InitialData, Preparation, Profile,
};
