//! Dyadic frequency decomposition and the norms built on it.

mod bank;
mod besov;
mod bony;
mod checks;
mod psi;

pub use bank::{chi, phi, theta, DyadicFilterBank};
pub use besov::{besov_norm, besov_terms, block_lp_norms, lr_sum, BesovSpec, NormRow, Psi};
pub use bony::{bony, BonyParts};
pub use checks::{
    advect, bernstein_family, bernstein_lower, bernstein_report, commutator, commutator_report,
    dilate_check, dilate_x1, dilation_field, BernsteinReport, CommutatorReport, CommutatorRow,
    DilationReport, DilationRow, LevelConstant,
};
pub use psi::{construct_psi, PsiConstruction, PsiReport};
