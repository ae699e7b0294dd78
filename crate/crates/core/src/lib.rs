pub mod axisym;
pub mod diagnostics;
mod error;
pub mod harness;
pub mod littlewood_paley;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
