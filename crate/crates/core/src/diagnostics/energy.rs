use serde::Serialize;

use crate::spectral::{SpectralField, VecField};

/// `‖v‖²_{L²} + ‖c‖²_{L²}` with `c` the full sound-speed field, mean included.
pub fn energy(v: &VecField, c: &SpectralField) -> f64 {
    let v2 = v.l2_norm().powi(2);
    let c2 = c.l2_norm().powi(2);
    v2 + c2
}

/// The constant in `d/dt E ≤ C_e ‖div v‖_{L^∞} E`.
pub fn energy_constant(gamma_bar: f64) -> f64 {
    2.0 * 1f64.max((1.0 - gamma_bar).abs())
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EnergySample {
    pub t: f64,
    pub energy: f64,
    pub div_inf: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EnergyCheck {
    pub c_e: f64,
    /// Largest `(ΔE/Δt) / mean(‖div v‖_{L^∞} E)` over intervals where the
    /// divergence exceeds [`DIV_FREE_TOL`]; `None` if there were none.
    pub worst_ratio: Option<f64>,
    /// Largest relative energy growth over intervals with no divergence.
    pub worst_free_growth: f64,
    pub margin: f64,
    pub pass: bool,
}

/// Divergence below which an interval counts as incompressible.
pub const DIV_FREE_TOL: f64 = 1e-10;

/// Checks the discrete form of the energy inequality on consecutive samples.
pub fn energy_ineq_check(history: &[EnergySample], gamma_bar: f64, margin: f64) -> EnergyCheck {
    let c_e = energy_constant(gamma_bar);
    let mut worst_ratio: Option<f64> = None;
    let mut worst_free_growth = 0.0_f64;
    for w in history.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let dt = b.t - a.t;
        if dt <= 0.0 {
            continue;
        }
        let rate = (b.energy - a.energy) / dt;
        let scale = 0.5 * (a.div_inf * a.energy + b.div_inf * b.energy);
        let e = a.energy.max(b.energy);
        if a.div_inf.max(b.div_inf) > DIV_FREE_TOL && scale > 0.0 {
            let r = rate / scale;
            worst_ratio = Some(worst_ratio.map_or(r, |w| w.max(r)));
        } else if e > 0.0 {
            worst_free_growth = worst_free_growth.max(rate * dt / e);
        }
    }
    let ratio_ok = worst_ratio.map_or(true, |w| w <= c_e * (1.0 + margin));
    EnergyCheck {
        c_e,
        worst_ratio,
        worst_free_growth,
        margin,
        pass: ratio_ok && worst_free_growth <= 1e-8,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    #[test]
    fn zero_state() {
        let g = Grid::new(8).unwrap();
        assert_eq!(energy(&VecField::zeros(&g), &SpectralField::zeros(&g)), 0.0);
    }

    #[test]
    fn constant_fields() {
        let g = Grid::new(8).unwrap();
        let c = SpectralField::constant(&g, 2.0);
        let e = energy(&VecField::zeros(&g), &c);
        assert!((e - 4.0 * g.volume()).abs() < 1e-10);
    }

    #[test]
    fn flags_growth_beyond_constant() {
        let ok = [
            EnergySample {
                t: 0.0,
                energy: 1.0,
                div_inf: 0.5,
            },
            EnergySample {
                t: 0.1,
                energy: 1.05,
                div_inf: 0.5,
            },
        ];
        assert!(energy_ineq_check(&ok, 0.5, 0.1).pass);
        let bad = [
            EnergySample {
                t: 0.0,
                energy: 1.0,
                div_inf: 0.1,
            },
            EnergySample {
                t: 0.1,
                energy: 1.1,
                div_inf: 0.1,
            },
        ];
        assert!(!energy_ineq_check(&bad, 0.5, 0.1).pass);
        let free = [
            EnergySample {
                t: 0.0,
                energy: 1.0,
                div_inf: 0.0,
            },
            EnergySample {
                t: 1.0,
                energy: 1.0 + 1e-12,
                div_inf: 0.0,
            },
        ];
        assert!(energy_ineq_check(&free, 0.5, 0.1).pass);
    }
}
