use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::{khat, State};
use crate::spectral::{Grid, SpectralField, VecField};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Scalars read off the grid values that the nonlinear terms already need.
/// Maxima are grid maxima.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Monitors {
    pub t: f64,
    pub energy: f64,
    pub v_inf: f64,
    pub c_inf: f64,
    pub c_fluct_inf: f64,
    pub grad_v_inf: f64,
    pub grad_c_inf: f64,
    pub div_inf: f64,
    pub qv_inf: f64,
}

pub(crate) type Coeffs3 = [Vec<Complex64>; 3];

pub(crate) fn inverse_many(grid: &Grid, fields: &[&[Complex64]]) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(fields.len());
    for pair in fields.chunks(2) {
        match pair {
            [a, b] => {
                let (x, y) = grid.inverse_real_pair(a, b);
                out.push(x);
                out.push(y);
            }
            [a] => out.push(grid.inverse_real(a)),
            _ => unreachable!(),
        }
    }
    out
}

pub(crate) fn forward_many(grid: &Grid, fields: &[&[f64]]) -> Vec<Vec<Complex64>> {
    let mut out = Vec::with_capacity(fields.len());
    for pair in fields.chunks(2) {
        match pair {
            [a, b] => {
                let (x, y) = grid.forward_real_pair(a, b);
                out.push(x);
                out.push(y);
            }
            [a] => out.push(grid.forward_real(a)),
            _ => unreachable!(),
        }
    }
    for c in &mut out {
        grid.dealias(c);
    }
    out
}

fn partial_coeffs(grid: &Grid, a: &[Complex64], axis: usize) -> Vec<Complex64> {
    a.iter()
        .enumerate()
        .map(|(idx, &z)| z * I * grid.deriv_wavevector(idx)[axis])
        .collect()
}

/// Compressible tendency and monitors from coefficient arrays; `c` carries
/// its mean at index 0. With `nonlinear = false` only the monitors are
/// produced.
pub(crate) fn compressible_terms(
    grid: &Grid,
    v: &Coeffs3,
    c: &[Complex64],
    gamma_bar: f64,
    nonlinear: bool,
) -> (Option<(Coeffs3, Vec<Complex64>)>, Monitors) {
    let mut spectral: Vec<Vec<Complex64>> = Vec::with_capacity(16);
    for comp in v {
        for j in 0..3 {
            spectral.push(partial_coeffs(grid, comp, j));
        }
    }
    for j in 0..3 {
        spectral.push(partial_coeffs(grid, c, j));
    }
    let mut refs: Vec<&[Complex64]> = vec![&v[0], &v[1], &v[2], c];
    refs.extend(spectral.iter().map(|a| a.as_slice()));
    let vals = inverse_many(grid, &refs);
    drop(spectral);
    let (vv, cv) = (&vals[0..3], &vals[3]);
    let dv = &vals[4..13];
    let dc = &vals[13..16];

    let mean = c[0].re;
    let mut mon = Monitors::default();
    let n = grid.len();
    let mut out = if nonlinear {
        Some([vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]])
    } else {
        None
    };
    for x in 0..n {
        let u = [vv[0][x], vv[1][x], vv[2][x]];
        let cc = cv[x];
        let g = |i: usize, j: usize| dv[3 * i + j][x];
        let gc = [dc[0][x], dc[1][x], dc[2][x]];
        let divv = g(0, 0) + g(1, 1) + g(2, 2);
        let frob: f64 = dv.iter().map(|f| f[x] * f[x]).sum();
        let gc2 = gc[0] * gc[0] + gc[1] * gc[1] + gc[2] * gc[2];
        mon.v_inf = mon
            .v_inf
            .max((u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt());
        mon.c_inf = mon.c_inf.max(cc.abs());
        mon.c_fluct_inf = mon.c_fluct_inf.max((cc - mean).abs());
        mon.grad_v_inf = mon.grad_v_inf.max(frob);
        mon.grad_c_inf = mon.grad_c_inf.max(gc2);
        mon.div_inf = mon.div_inf.max(divv.abs());
        if let Some(o) = out.as_mut() {
            for i in 0..3 {
                let adv = u[0] * g(i, 0) + u[1] * g(i, 1) + u[2] * g(i, 2);
                o[i][x] = -adv - gamma_bar * cc * gc[i];
            }
            o[3][x] = -(u[0] * gc[0] + u[1] * gc[1] + u[2] * gc[2]) - gamma_bar * cc * divv;
        }
    }
    mon.grad_v_inf = mon.grad_v_inf.sqrt();
    mon.grad_c_inf = mon.grad_c_inf.sqrt();
    let vol = grid.volume();
    mon.energy = vol
        * (v.iter()
            .map(|a| a.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            + c.iter().map(|z| z.norm_sqr()).sum::<f64>());
    let tendency = out.map(|o| {
        let mut t = forward_many(grid, &[&o[0], &o[1], &o[2], &o[3]]);
        let dcc = t.pop().expect("four tendencies");
        let d2 = t.pop().expect("four tendencies");
        let d1 = t.pop().expect("four tendencies");
        let d0 = t.pop().expect("four tendencies");
        ([d0, d1, d2], dcc)
    });
    (tendency, mon)
}

/// `dv = -(v·∇)v - γ̄ c∇c`, `dc = -v·∇c - γ̄ c div v`, with `c` including
/// its mean and every product truncated by the 2/3 rule.
pub fn nonlinear_rhs(state: &State) -> (VecField, SpectralField) {
    let grid = state.grid();
    let v = [
        state.v.comp(0).coeffs().to_vec(),
        state.v.comp(1).coeffs().to_vec(),
        state.v.comp(2).coeffs().to_vec(),
    ];
    let c = state.c_total();
    let (t, _) = compressible_terms(grid, &v, c.coeffs(), state.gamma_bar, true);
    let ([a, b, d], dc) = t.expect("nonlinear terms requested");
    (
        VecField::new(
            SpectralField::from_coeffs(grid, a),
            SpectralField::from_coeffs(grid, b),
            SpectralField::from_coeffs(grid, d),
        )
        .expect("components share a grid"),
        SpectralField::from_coeffs(grid, dc),
    )
}

/// In-place Leray projection of coefficient arrays.
pub(crate) fn project(grid: &Grid, v: &mut Coeffs3) {
    for idx in 0..grid.len() {
        let (e, _) = khat(grid, idx);
        let vq = v[0][idx] * e[0] + v[1][idx] * e[1] + v[2][idx] * e[2];
        for d in 0..3 {
            v[d][idx] -= vq * e[d];
        }
    }
}

/// `-P[(v·∇)v]` for a divergence-free `v`, plus monitors.
pub(crate) fn incompressible_terms(grid: &Grid, v: &Coeffs3) -> (Coeffs3, Monitors) {
    let mut spectral: Vec<Vec<Complex64>> = Vec::with_capacity(9);
    for comp in v {
        for j in 0..3 {
            spectral.push(partial_coeffs(grid, comp, j));
        }
    }
    let mut refs: Vec<&[Complex64]> = vec![&v[0], &v[1], &v[2]];
    refs.extend(spectral.iter().map(|a| a.as_slice()));
    let vals = inverse_many(grid, &refs);
    drop(spectral);
    let n = grid.len();
    let mut o = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let mut mon = Monitors::default();
    for x in 0..n {
        let u = [vals[0][x], vals[1][x], vals[2][x]];
        let g = |i: usize, j: usize| vals[3 + 3 * i + j][x];
        let mut frob = 0.0;
        for i in 0..3 {
            o[i][x] = -(u[0] * g(i, 0) + u[1] * g(i, 1) + u[2] * g(i, 2));
            for j in 0..3 {
                frob += g(i, j) * g(i, j);
            }
        }
        mon.v_inf = mon
            .v_inf
            .max((u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt());
        mon.grad_v_inf = mon.grad_v_inf.max(frob);
        mon.div_inf = mon.div_inf.max((g(0, 0) + g(1, 1) + g(2, 2)).abs());
    }
    mon.grad_v_inf = mon.grad_v_inf.sqrt();
    mon.energy = grid.volume()
        * v.iter()
            .map(|a| a.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum::<f64>();
    let mut t = forward_many(grid, &[&o[0], &o[1], &o[2]]);
    let d2 = t.pop().expect("three components");
    let d1 = t.pop().expect("three components");
    let d0 = t.pop().expect("three components");
    let mut d = [d0, d1, d2];
    project(grid, &mut d);
    (d, mon)
}
