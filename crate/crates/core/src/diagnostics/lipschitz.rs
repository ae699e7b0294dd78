use serde::Serialize;

use crate::error::Result;
use crate::littlewood_paley::{block_lp_norms, DyadicFilterBank};
use crate::spectral::{curl, div, grad, SpectralField, VecField};

/// Pointwise maxima of `|∇v|` (Frobenius) and `|∇c|`, on the grid or on
/// the oversampled grid.
pub fn gradient_sups(v: &VecField, c: &SpectralField, oversampled: bool) -> (f64, f64) {
    let mut dv: Vec<SpectralField> = Vec::with_capacity(9);
    for comp in v.comps() {
        dv.extend(grad(comp).into_comps());
    }
    let dc = grad(c).into_comps();
    let grid = v.grid().clone();
    let values = |fields: &[SpectralField]| -> Vec<Vec<f64>> {
        if !oversampled {
            return fields.iter().map(|f| f.values().to_vec()).collect();
        }
        let big = grid.padded();
        let mut out = Vec::with_capacity(fields.len());
        for pair in fields.chunks(2) {
            match pair {
                [a, b] => {
                    let (x, y) = big.inverse_real_pair(
                        &grid.pad_coeffs(a.coeffs()),
                        &grid.pad_coeffs(b.coeffs()),
                    );
                    out.push(x);
                    out.push(y);
                }
                [a] => out.push(a.oversampled_values()),
                _ => unreachable!(),
            }
        }
        out
    };
    let frob_max = |vals: &[Vec<f64>]| -> f64 {
        (0..vals[0].len())
            .map(|i| vals.iter().map(|f| f[i] * f[i]).sum::<f64>())
            .fold(0.0, f64::max)
            .sqrt()
    };
    (frob_max(&values(&dv)), frob_max(&values(&dc)))
}

/// `Σ_q ‖Δ_q f‖_{L^∞}`.
pub fn b0_inf1(bank: &DyadicFilterBank, f: &SpectralField) -> Result<f64> {
    Ok(block_lp_norms(bank, f, f64::INFINITY)?.iter().sum())
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct LipschitzSample {
    pub grad_v_inf: f64,
    pub grad_c_inf: f64,
    pub div_inf: f64,
    pub div_b0: f64,
    pub omega_inf: f64,
    pub omega_b0: f64,
    pub v_l2: f64,
    /// `‖∇v‖_{L^∞} / (‖v‖_{L²} + ‖div v‖_{B⁰_{∞,1}} + ‖Ω‖_{B⁰_{∞,1}})`.
    pub log_ratio: f64,
}

/// Lipschitz-type quantities at one instant, all maxima oversampled. The
/// `B⁰_{∞,1}` norm of `Ω` is the sum over components.
pub fn lipschitz_sample(
    bank: &DyadicFilterBank,
    v: &VecField,
    c: &SpectralField,
) -> Result<LipschitzSample> {
    let (grad_v_inf, grad_c_inf) = gradient_sups(v, c, true);
    let d = div(v);
    let omega = curl(v);
    let div_b0 = b0_inf1(bank, &d)?;
    let mut omega_b0 = 0.0;
    for comp in omega.comps() {
        omega_b0 += b0_inf1(bank, comp)?;
    }
    let v_l2 = v.l2_norm();
    let denom = v_l2 + div_b0 + omega_b0;
    Ok(LipschitzSample {
        grad_v_inf,
        grad_c_inf,
        div_inf: d.linf_oversampled(),
        div_b0,
        omega_inf: omega.linf_oversampled(),
        omega_b0,
        v_l2,
        log_ratio: if denom > 0.0 { grad_v_inf / denom } else { 0.0 },
    })
}

/// Trapezoid-rule accumulator for `∫ f(t) dt` over accepted steps.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct TimeIntegral {
    last: Option<(f64, f64)>,
    total: f64,
}

impl TimeIntegral {
    pub fn push(&mut self, t: f64, value: f64) {
        if let Some((t0, v0)) = self.last {
            self.total += 0.5 * (t - t0) * (v0 + value);
        }
        self.last = Some((t, value));
    }

    pub fn total(&self) -> f64 {
        self.total
    }
}
