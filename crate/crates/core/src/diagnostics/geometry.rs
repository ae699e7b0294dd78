use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::axisym::{sample_cylinder, to_physical};
use crate::error::Result;
use crate::littlewood_paley::DyadicFilterBank;
use crate::spectral::{curl, PointEvaluator, SpectralField, VecField};

/// Index rotation `R_{-α} v(R_α x)` for `α = k π/2`, exact on the grid
/// because the axis passes through grid index `n/2`.
pub fn rotate_quarter(v: &VecField, k: u32) -> VecField {
    let g = v.grid().clone();
    let n = g.n();
    let flip = |i: usize| (n - i) % n;
    let [a, b, c] = v.comps();
    let (a, b, c) = (a.values(), b.values(), c.values());
    let mut out = [vec![0.0; g.len()], vec![0.0; g.len()], vec![0.0; g.len()]];
    for idx in 0..g.len() {
        let [i1, i2, i3] = g.unindex(idx);
        let (j, rot): (usize, fn(f64, f64) -> (f64, f64)) = match k % 4 {
            0 => (idx, |x, y| (x, y)),
            1 => (g.index(flip(i2), i1, i3), |x, y| (y, -x)),
            2 => (g.index(flip(i1), flip(i2), i3), |x, y| (-x, -y)),
            _ => (g.index(i2, flip(i1), i3), |x, y| (-y, x)),
        };
        let (x, y) = rot(a[j], b[j]);
        out[0][idx] = x;
        out[1][idx] = y;
        out[2][idx] = c[j];
    }
    let [x, y, z] = out;
    VecField::new(
        SpectralField::from_values(&g, x),
        SpectralField::from_values(&g, y),
        SpectralField::from_values(&g, z),
    )
    .expect("same grid")
}

fn rel_l2(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// `‖v·e_θ‖_{L²} / ‖v‖_{L²}`.
pub fn swirl(v: &VecField) -> f64 {
    let g = v.grid();
    let (a, b) = (v.comp(0).values(), v.comp(1).values());
    let mut s = 0.0;
    for idx in 0..g.len() {
        let [x, y, _] = g.centered_point(idx);
        let r = x.hypot(y);
        if r > 0.0 {
            s += ((x * b[idx] - y * a[idx]) / r).powi(2);
        }
    }
    rel_l2((s * g.cell_volume()).sqrt(), v.l2_norm())
}

/// `‖Ω × e_θ‖_{L²} / ‖Ω‖_{L²}`.
pub fn omega_cross_etheta(omega: &VecField) -> f64 {
    let g = omega.grid();
    let [a, b, c] = omega.comps();
    let (a, b, c) = (a.values(), b.values(), c.values());
    let mut s = 0.0;
    for idx in 0..g.len() {
        let [x, y, _] = g.centered_point(idx);
        let r = x.hypot(y);
        if r > 0.0 {
            // Ω × e_θ = (-Ω₃ x/r, -Ω₃ y/r, (xΩ₁ + yΩ₂)/r)
            s += c[idx].powi(2) + ((x * a[idx] + y * b[idx]) / r).powi(2);
        } else {
            s += a[idx].powi(2) + b[idx].powi(2) + c[idx].powi(2);
        }
    }
    rel_l2((s * g.cell_volume()).sqrt(), omega.l2_norm())
}

/// Largest relative difference under the three exact quarter turns.
pub fn index_rotation_residual(v: &VecField) -> f64 {
    let norm = v.l2_norm();
    (1..4)
        .map(|k| {
            let w = rotate_quarter(v, k);
            let d = w.axpy(-1.0, v).expect("same grid");
            rel_l2(d.l2_norm(), norm)
        })
        .fold(0.0, f64::max)
}

/// Rotation residual at generic angles by direct Fourier evaluation at
/// `points` random points per angle.
pub fn random_rotation_residual(v: &VecField, angles: usize, points: usize, seed: u64) -> f64 {
    let g = v.grid().clone();
    let [a, b, c] = v.comps();
    let ev = PointEvaluator::new(&g, &[a, b, c]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..angles {
        let alpha = rng.gen::<f64>() * 2.0 * PI;
        let (s, co) = alpha.sin_cos();
        let (mut num, mut den) = (0.0, 0.0);
        for _ in 0..points {
            let p = sample_cylinder(&mut rng, 0.8 * PI);
            let q = [co * p[0] - s * p[1], s * p[0] + co * p[1], p[2]];
            let vp = ev.eval(&to_physical(p));
            let vq = ev.eval(&to_physical(q));
            // R_{-α} v(R_α x)
            let w = [co * vq[0] + s * vq[1], -s * vq[0] + co * vq[1], vq[2]];
            for d in 0..3 {
                num += (w[d] - vp[d]).powi(2);
                den += vp[d] * vp[d];
            }
        }
        worst = worst.max(rel_l2(num.sqrt(), den.sqrt()));
    }
    worst
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct GeometryResiduals {
    pub swirl: f64,
    pub axisym_index: f64,
    /// Generic-angle residual; absent when only the cheap checks ran.
    pub axisym_random: Option<f64>,
    pub omega_cross_etheta: f64,
}

impl GeometryResiduals {
    pub fn axisym(&self) -> f64 {
        self.axisym_index.max(self.axisym_random.unwrap_or(0.0))
    }

    pub fn max(&self) -> f64 {
        self.swirl.max(self.axisym()).max(self.omega_cross_etheta)
    }
}

/// All geometry residuals; the generic-angle test uses four angles and 1000
/// points each when `full` is set.
pub fn geometry_residuals(v: &VecField, full: bool, seed: u64) -> GeometryResiduals {
    let omega = curl(v);
    GeometryResiduals {
        swirl: swirl(v),
        axisym_index: index_rotation_residual(v),
        axisym_random: full.then(|| random_rotation_residual(v, 4, 1000, seed)),
        omega_cross_etheta: omega_cross_etheta(&omega),
    }
}

/// `‖Δ_qΩ × e_θ‖_{L²} / ‖Δ_qΩ‖_{L²}` for every block, with the block's share
/// of `‖Ω‖_{L²}` alongside.
pub fn block_geometry(bank: &DyadicFilterBank, omega: &VecField) -> Result<Vec<(i32, f64, f64)>> {
    let total = omega.l2_norm();
    bank.levels()
        .map(|q| {
            let b = VecField::new(
                bank.block(q, omega.comp(0))?,
                bank.block(q, omega.comp(1))?,
                bank.block(q, omega.comp(2))?,
            )?;
            Ok((q, omega_cross_etheta(&b), rel_l2(b.l2_norm(), total)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    #[test]
    fn quarter_turns_compose() {
        let g = Grid::new(8).unwrap();
        let v = VecField::from_centered_fn(&g, |[x, y, z]| [x + 2.0 * y * z, y * y - x, z * x]);
        let once = rotate_quarter(&v, 1);
        let twice = rotate_quarter(&once, 1);
        let half = rotate_quarter(&v, 2);
        assert!(twice.max_coeff_diff(&half) < 1e-13);
        let back = rotate_quarter(&rotate_quarter(&v, 3), 1);
        assert!(back.max_coeff_diff(&v) < 1e-13);
    }

    #[test]
    fn swirl_detects_rotation() {
        let g = Grid::new(16).unwrap();
        // narrow enough to be periodic to rounding at the box faces
        let v = VecField::from_centered_fn(&g, |[x, y, z]| {
            let f = (-(x * x + y * y + z * z) / 0.3).exp();
            [-y * f, x * f, 0.0]
        });
        assert!((swirl(&v) - 1.0).abs() < 1e-12);
        let r = index_rotation_residual(&v);
        assert!(r < 1e-13, "{r}");
    }
}
