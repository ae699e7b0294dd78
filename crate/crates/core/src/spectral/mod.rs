//! Periodic-grid spectral calculus.

pub mod checkpoint;
mod fft;
mod field;
mod grid;
mod ops;

pub use fft::{Direction, Fft3};
pub use field::{linf_oversampled_all, lp_of, PointEvaluator, SpectralField, VecField};
pub use grid::Grid;
pub use ops::{
    curl, div, grad, helmholtz, inv_abs_d, inv_laplacian, laplacian, leray, partial, partial2,
    riesz,
};
