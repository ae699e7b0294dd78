use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::{khat, FilteredState};

/// Time-averaged acoustic amplitude of the free evolution over `[0, T]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearDecay {
    pub eps: f64,
    pub t_final: f64,
    /// `‖∫₀^T Γ(t) dt‖_{L^∞}` on the oversampled grid.
    pub measured: f64,
    /// `Σ_k |Γ̂₀(k)| · 2ε|sin(T|k|/2ε)|/|k|`, an upper bound for `measured`.
    pub bound: f64,
}

/// `|∫₀^T e^{-iωt} dt|` and the integral itself.
fn phase_integral(omega: f64, t: f64) -> Complex64 {
    if omega == 0.0 {
        return Complex64::new(t, 0.0);
    }
    // (1 - e^{-iωT}) / (iω)
    (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -omega * t)) / Complex64::new(0.0, omega)
}

/// `‖∫₀^T Γ(t) dt‖_{L^∞}` for the free evolution from `fs`, where
/// `Γ̂(k, t) = k̂ w₊(k) e^{-it|k|/ε}`. Each mode is integrated in closed form.
pub fn gamma_time_average(fs: &FilteredState, t_final: f64) -> f64 {
    let grid = fs.grid();
    let n = grid.len();
    let mut comps = [
        vec![Complex64::default(); n],
        vec![Complex64::default(); n],
        vec![Complex64::default(); n],
    ];
    for idx in 0..n {
        let (e, m) = khat(grid, idx);
        if m == 0.0 {
            continue;
        }
        let a = fs.w_plus[idx] * phase_integral(m / fs.eps, t_final);
        for d in 0..3 {
            comps[d][idx] = a * e[d];
        }
    }
    let big = grid.padded();
    let mut modulus = vec![0.0; big.len()];
    for c in &comps {
        let vals = big.inverse_complex(&grid.pad_coeffs(c));
        for (m, z) in modulus.iter_mut().zip(&vals) {
            *m += z.norm_sqr();
        }
    }
    modulus.iter().fold(0.0_f64, |m, &x| m.max(x)).sqrt()
}

/// Mode-sum bound `Σ_k |w₊(k)| · 2ε|sin(T|k|/2ε)|/|k|`.
pub fn gamma_time_average_bound(fs: &FilteredState, t_final: f64) -> f64 {
    let grid = fs.grid();
    (0..grid.len())
        .map(|idx| {
            let (_, m) = khat(grid, idx);
            if m == 0.0 {
                0.0
            } else {
                fs.w_plus[idx].norm() * 2.0 * fs.eps * (t_final * m / (2.0 * fs.eps)).sin().abs()
                    / m
            }
        })
        .sum()
}

impl LinearDecay {
    pub fn measure(fs: &FilteredState, t_final: f64) -> Self {
        Self {
            eps: fs.eps,
            t_final,
            measured: gamma_time_average(fs, t_final),
            bound: gamma_time_average_bound(fs, t_final),
        }
    }
}
