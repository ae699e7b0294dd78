//! Fourier-multiplier calculus: derivatives, inverse Laplacian, Riesz
//! transforms and the Leray/gradient splitting.

use num_complex::Complex64;

use super::field::{SpectralField, VecField};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// ∂_axis f.
pub fn partial(f: &SpectralField, axis: usize) -> SpectralField {
    let g = f.grid().clone();
    f.map_coeffs(|idx, c| {
        let k = g.deriv_wavevector(idx)[axis];
        c * I * k
    })
}

/// ∂_a ∂_b f. Diagonal entries use the true wavenumber so that the trace is
/// the Laplacian.
pub fn partial2(f: &SpectralField, a: usize, b: usize) -> SpectralField {
    let g = f.grid().clone();
    f.map_coeffs(|idx, c| {
        let m = if a == b {
            let k = g.wavevector(idx)[a];
            -k * k
        } else {
            let k = g.deriv_wavevector(idx);
            -k[a] * k[b]
        };
        c * m
    })
}

pub fn grad(f: &SpectralField) -> VecField {
    VecField::new(partial(f, 0), partial(f, 1), partial(f, 2)).expect("components share a grid")
}

pub fn div(v: &VecField) -> SpectralField {
    let g = v.grid().clone();
    let [a, b, c] = v.comps();
    let (a, b, c) = (a.coeffs(), b.coeffs(), c.coeffs());
    let coeffs = (0..g.len())
        .map(|idx| {
            let k = g.deriv_wavevector(idx);
            I * (a[idx] * k[0] + b[idx] * k[1] + c[idx] * k[2])
        })
        .collect();
    SpectralField::from_coeffs(&g, coeffs)
}

pub fn curl(v: &VecField) -> VecField {
    let g = v.grid().clone();
    let [a, b, c] = v.comps();
    let (a, b, c) = (a.coeffs(), b.coeffs(), c.coeffs());
    let n = g.len();
    let mut out = [
        vec![Complex64::default(); n],
        vec![Complex64::default(); n],
        vec![Complex64::default(); n],
    ];
    for idx in 0..n {
        let k = g.deriv_wavevector(idx);
        out[0][idx] = I * (c[idx] * k[1] - b[idx] * k[2]);
        out[1][idx] = I * (a[idx] * k[2] - c[idx] * k[0]);
        out[2][idx] = I * (b[idx] * k[0] - a[idx] * k[1]);
    }
    let [x, y, z] = out;
    VecField::new(
        SpectralField::from_coeffs(&g, x),
        SpectralField::from_coeffs(&g, y),
        SpectralField::from_coeffs(&g, z),
    )
    .expect("components share a grid")
}

pub fn laplacian(f: &SpectralField) -> SpectralField {
    let k2 = f.grid().k_squared().to_vec();
    f.multiplier(|idx| -k2[idx])
}

/// Δ⁻¹ with the zero mode sent to zero, so `Δ Δ⁻¹ f = f - mean(f)`.
pub fn inv_laplacian(f: &SpectralField) -> SpectralField {
    let k2 = f.grid().k_squared().to_vec();
    f.multiplier(|idx| if idx == 0 { 0.0 } else { -1.0 / k2[idx] })
}

/// |D|⁻¹ with the zero mode sent to zero.
pub fn inv_abs_d(f: &SpectralField) -> SpectralField {
    let k2 = f.grid().k_squared().to_vec();
    f.multiplier(|idx| if idx == 0 { 0.0 } else { 1.0 / k2[idx].sqrt() })
}

/// Composed Riesz transform `R_i R_j` with multiplier `-k_i k_j / |k|²`.
///
/// Note that `∂_i ∂_j Δ⁻¹ = -R_i R_j`.
pub fn riesz(i: usize, j: usize, f: &SpectralField) -> SpectralField {
    let g = f.grid().clone();
    let k2 = g.k_squared();
    f.multiplier(|idx| {
        if idx == 0 {
            return 0.0;
        }
        let num = if i == j {
            let k = g.wavevector(idx)[i];
            k * k
        } else {
            let k = g.deriv_wavevector(idx);
            k[i] * k[j]
        };
        -num / k2[idx]
    })
}

/// Splits `v = Pv + Qv` with `div Pv = 0`, `curl Qv = 0`. The mean flow and
/// modes invisible to first derivatives belong to `Pv`.
pub fn helmholtz(v: &VecField) -> (VecField, VecField) {
    let g = v.grid().clone();
    let n = g.len();
    let [a, b, c] = v.comps();
    let (a, b, c) = (a.coeffs(), b.coeffs(), c.coeffs());
    let mut p = [
        vec![Complex64::default(); n],
        vec![Complex64::default(); n],
        vec![Complex64::default(); n],
    ];
    let mut q = p.clone();
    for idx in 0..n {
        let k = g.deriv_wavevector(idx);
        let kk = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        let vk = [a[idx], b[idx], c[idx]];
        if kk == 0.0 {
            for d in 0..3 {
                p[d][idx] = vk[d];
            }
            continue;
        }
        let proj = (vk[0] * k[0] + vk[1] * k[1] + vk[2] * k[2]) / kk;
        for d in 0..3 {
            let qd = proj * k[d];
            q[d][idx] = qd;
            p[d][idx] = vk[d] - qd;
        }
    }
    let build = |arr: [Vec<Complex64>; 3]| {
        let [x, y, z] = arr;
        VecField::new(
            SpectralField::from_coeffs(&g, x),
            SpectralField::from_coeffs(&g, y),
            SpectralField::from_coeffs(&g, z),
        )
        .expect("components share a grid")
    };
    (build(p), build(q))
}

/// Leray projection alone.
pub fn leray(v: &VecField) -> VecField {
    helmholtz(v).0
}
