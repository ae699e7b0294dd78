use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::spectral::{
    inv_laplacian, partial, riesz, Grid, PointEvaluator, SpectralField, VecField,
};

/// Cylindrical components `(v^r, v^θ, v^z)` about the box axis. `v^r` and
/// `v^θ` are set to zero where `r < r_min`.
pub fn cyl_components(v: &VecField, r_min: f64) -> [SpectralField; 3] {
    let g = v.grid().clone();
    let [a, b, c] = v.comps();
    let (a, b) = (a.values(), b.values());
    let mut vr = vec![0.0; g.len()];
    let mut vt = vec![0.0; g.len()];
    for idx in 0..g.len() {
        let [x, y, _] = g.centered_point(idx);
        let r = x.hypot(y);
        if r >= r_min && r > 0.0 {
            vr[idx] = (x * a[idx] + y * b[idx]) / r;
            vt[idx] = (x * b[idx] - y * a[idx]) / r;
        }
    }
    [
        SpectralField::from_values(&g, vr),
        SpectralField::from_values(&g, vt),
        c.clone(),
    ]
}

/// Samples a scalar field at points rotated about the axis and compares
/// with the original: the relative root-mean-square difference over points
/// drawn uniformly in the cylinder `r ≤ radius`, `|z| ≤ radius`.
pub fn scalar_rotation_residual(
    f: &SpectralField,
    angles: &[f64],
    points: usize,
    radius: f64,
    seed: u64,
) -> f64 {
    let g = f.grid().clone();
    let ev = PointEvaluator::new(&g, &[f]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut num, mut den) = (0.0, 0.0);
    for &alpha in angles {
        let (s, c) = alpha.sin_cos();
        for _ in 0..points {
            let p = sample_cylinder(&mut rng, radius);
            let q = [c * p[0] - s * p[1], s * p[0] + c * p[1], p[2]];
            let fp = ev.eval(&to_physical(p))[0];
            let fq = ev.eval(&to_physical(q))[0];
            num += (fq - fp).powi(2);
            den += fp * fp;
        }
    }
    if den == 0.0 {
        0.0
    } else {
        (num / den).sqrt()
    }
}

pub(crate) fn sample_cylinder(rng: &mut ChaCha8Rng, radius: f64) -> [f64; 3] {
    let r = radius * rng.gen::<f64>().sqrt();
    let th = rng.gen::<f64>() * std::f64::consts::TAU;
    let z = radius * (2.0 * rng.gen::<f64>() - 1.0);
    [r * th.cos(), r * th.sin(), z]
}

pub(crate) fn to_physical(p: [f64; 3]) -> [f64; 3] {
    p.map(|c| c + std::f64::consts::PI)
}

/// Quarter-turn index rotation of a scalar, `f(R_{π/2} x)`.
pub fn rotate_scalar_quarter(f: &SpectralField) -> SpectralField {
    let g = f.grid().clone();
    let n = g.n();
    let vals = f.values();
    let out = (0..g.len())
        .map(|idx| {
            let [i1, i2, i3] = g.unindex(idx);
            vals[g.index((n - i2) % n, i1, i3)]
        })
        .collect();
    SpectralField::from_values(&g, out)
}

/// Compares the two sides of
/// `(∂_r/r) Δ^{-1}u = (x₂²/r²) ∂₁₁Δ^{-1}u + (x₁²/r²) ∂₂₂Δ^{-1}u − 2 (x₁x₂/r²) ∂₁₂Δ^{-1}u`
/// on `r ≥ r_min` and returns the largest difference relative to the largest
/// value of the left side.
pub fn riesz_identity_check(u: &SpectralField, r_min: f64) -> Result<f64> {
    let g: Arc<Grid> = u.grid().clone();
    let scale = u.linf_norm();
    if scale == 0.0 {
        return Err(Error::Precondition("zero input".into()));
    }
    if u.mean().abs() > 1e-9 * scale {
        return Err(Error::Precondition(format!(
            "input has nonzero mean {:.3e}",
            u.mean()
        )));
    }
    let quarter = &rotate_scalar_quarter(u) - u;
    let generic = scalar_rotation_residual(u, &[0.7, 2.1], 100, 0.8 * std::f64::consts::PI, 11);
    let res = (quarter.linf_norm() / scale).max(generic);
    if res > 1e-8 {
        return Err(Error::Precondition(format!(
            "input is not axisymmetric (residual {res:.2e})"
        )));
    }
    let f = inv_laplacian(u);
    let (f1, f2) = (partial(&f, 0), partial(&f, 1));
    // ∂_ij Δ^{-1} is minus the composed Riesz transform
    let r11 = riesz(0, 0, u);
    let r22 = riesz(1, 1, u);
    let r12 = riesz(0, 1, u);
    let (mut worst, mut peak) = (0.0_f64, 0.0_f64);
    for idx in 0..g.len() {
        let [x, y, _] = g.centered_point(idx);
        let r2 = x * x + y * y;
        if r2.sqrt() < r_min {
            continue;
        }
        let lhs = (x * f1.values()[idx] + y * f2.values()[idx]) / r2;
        let rhs = -(y * y * r11.values()[idx] + x * x * r22.values()[idx]
            - 2.0 * x * y * r12.values()[idx])
            / r2;
        worst = worst.max((lhs - rhs).abs());
        peak = peak.max(lhs.abs());
    }
    if peak == 0.0 {
        return Err(Error::Domain(
            "mask is empty or the left side vanishes".into(),
        ));
    }
    Ok(worst / peak)
}
