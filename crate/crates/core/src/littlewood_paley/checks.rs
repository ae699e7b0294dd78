//! Measured counterparts of the Bernstein inequalities, the anisotropic
//! dilation bound and the transport commutator estimate.

use std::ops::RangeInclusive;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{besov_norm, BesovSpec, DyadicFilterBank, Psi};
use crate::error::{Error, Result};
use crate::spectral::{grad, linf_oversampled_all, partial, Grid, SpectralField, VecField};
use std::sync::Arc;

fn lp(f: &SpectralField, p: f64) -> f64 {
    if p.is_infinite() {
        f.linf_oversampled()
    } else {
        f.lp_norm(p)
    }
}

fn multi_indices(k: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for a in 0..=k {
        for b in 0..=k - a {
            out.push([a, b, k - a - b]);
        }
    }
    out
}

fn derivative(f: &SpectralField, alpha: [u32; 3]) -> SpectralField {
    let mut g = f.clone();
    for (axis, &m) in alpha.iter().enumerate() {
        for _ in 0..m {
            g = partial(&g, axis);
        }
    }
    g
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelConstant {
    pub q: i32,
    pub constant: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BernsteinReport {
    pub k: u32,
    pub a: f64,
    pub b: f64,
    pub rows: Vec<LevelConstant>,
    /// Largest over smallest measured constant.
    pub spread: f64,
}

fn spread(rows: &[LevelConstant]) -> f64 {
    let max = rows.iter().map(|r| r.constant).fold(0.0, f64::max);
    let min = rows
        .iter()
        .map(|r| r.constant)
        .fold(f64::INFINITY, f64::min);
    max / min
}

/// For each `q`, the largest ratio
/// `‖∂^α Δ_q f‖_{L^b} / (2^{q(k + 3(1/a - 1/b))} ‖Δ_q f‖_{L^a})` over the
/// family and over `|α| = k`.
pub fn bernstein_report(
    bank: &DyadicFilterBank,
    family: &[SpectralField],
    k: u32,
    a: f64,
    b: f64,
    levels: RangeInclusive<i32>,
) -> Result<BernsteinReport> {
    if !(1.0 <= a && a <= b) || k > 3 {
        return Err(Error::Domain(format!(
            "need 1 <= a <= b and k <= 3, got a={a} b={b} k={k}"
        )));
    }
    let gain = k as f64 + 3.0 * (1.0 / a - 1.0 / b);
    let alphas = multi_indices(k);
    let mut rows = Vec::new();
    for q in levels {
        let mut worst = 0.0_f64;
        for f in family {
            let block = bank.block(q, f)?;
            let base = lp(&block, a);
            if base == 0.0 {
                continue;
            }
            let derivs: Vec<SpectralField> =
                alphas.iter().map(|al| derivative(&block, *al)).collect();
            let tops = if b.is_infinite() {
                linf_oversampled_all(&derivs.iter().collect::<Vec<_>>())
            } else {
                derivs.iter().map(|d| d.lp_norm(b)).collect()
            };
            let scale = 2f64.powf(q as f64 * gain) * base;
            for t in tops {
                worst = worst.max(t / scale);
            }
        }
        rows.push(LevelConstant { q, constant: worst });
    }
    Ok(BernsteinReport {
        k,
        a,
        b,
        spread: spread(&rows),
        rows,
    })
}

/// Reverse Bernstein: for each `q ≥ 0` the smallest `C` with
/// `‖∇Δ_q f‖_{L²} ≥ C^{-1} 2^q ‖Δ_q f‖_{L²}` over the family.
pub fn bernstein_lower(
    bank: &DyadicFilterBank,
    family: &[SpectralField],
    levels: RangeInclusive<i32>,
) -> Result<Vec<LevelConstant>> {
    let mut rows = Vec::new();
    for q in levels {
        let mut worst = 0.0_f64;
        for f in family {
            let block = bank.block(q, f)?;
            let base = block.l2_norm();
            if base == 0.0 {
                continue;
            }
            worst = worst.max(2f64.powi(q) * base / grad(&block).l2_norm());
        }
        rows.push(LevelConstant { q, constant: worst });
    }
    Ok(rows)
}

/// Deterministic test family: coherent bumps centred at random points and
/// random-phase fields, all band-limited to the 2/3 cube.
pub fn bernstein_family(grid: &Arc<Grid>, seed: u64, count: usize) -> Vec<SpectralField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|m| {
            let coherent = m % 2 == 0;
            let centre: [f64; 3] =
                [rng.gen::<f64>(), rng.gen(), rng.gen()].map(|t| t * std::f64::consts::TAU);
            let mut coeffs = vec![Complex64::default(); grid.len()];
            for idx in 0..grid.len() {
                let j = grid.conj_index(idx);
                if j < idx || !grid.retained(idx) {
                    continue;
                }
                let k = grid.wavevector(idx);
                let amp = 1.0 + 0.5 * rng.gen::<f64>();
                let phase = if coherent {
                    -(k[0] * centre[0] + k[1] * centre[1] + k[2] * centre[2])
                } else {
                    rng.gen::<f64>() * std::f64::consts::TAU
                };
                let c = Complex64::from_polar(amp, phase);
                if j == idx {
                    coeffs[idx] = Complex64::new(c.re, 0.0);
                } else {
                    coeffs[idx] = c;
                    coeffs[j] = c.conj();
                }
            }
            SpectralField::from_coeffs(grid, coeffs)
        })
        .collect()
}

/// `f_λ(x) = f(λ x₁, x₂, x₃)` for `λ = 2^{-m}`, `0 ≤ m ≤ 4`. Requires every
/// active `k₁` to be a multiple of `1/λ`, otherwise `f_λ` is not periodic.
pub fn dilate_x1(f: &SpectralField, lambda: f64) -> Result<SpectralField> {
    let stride = dyadic_stride(lambda)?;
    let g = f.grid().clone();
    let n = g.n();
    let floor = 1e-14 * f.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut out = vec![Complex64::default(); g.len()];
    for (idx, &c) in f.coeffs().iter().enumerate() {
        if c.norm() <= floor {
            continue;
        }
        let [i1, i2, i3] = g.unindex(idx);
        let k1 = g.wavenumber(i1) as i64;
        if k1 % stride as i64 != 0 {
            return Err(Error::Precondition(format!(
                "mode k1 = {k1} is not a multiple of {stride}; dilation would break periodicity"
            )));
        }
        let t1 = (k1 / stride as i64).rem_euclid(n as i64) as usize;
        out[g.index(t1, i2, i3)] += c;
    }
    Ok(SpectralField::from_coeffs(&g, out))
}

fn dyadic_stride(lambda: f64) -> Result<usize> {
    (0..=4)
        .map(|m| 1usize << m)
        .find(|s| (lambda * *s as f64 - 1.0).abs() < 1e-15)
        .ok_or_else(|| Error::Domain(format!("λ = {lambda} is not in {{1, 1/2, 1/4, 1/8, 1/16}}")))
}

#[derive(Clone, Debug, Serialize)]
pub struct DilationRow {
    pub lambda: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DilationReport {
    pub s: f64,
    pub rows: Vec<DilationRow>,
    pub max: f64,
    pub spread: f64,
}

/// Table of `‖f_λ‖_{B^s_{∞,∞}} / (λ^s ‖f‖_{B^s_{∞,∞}})`.
pub fn dilate_check(
    bank: &DyadicFilterBank,
    f: &SpectralField,
    s: f64,
    lambdas: &[f64],
) -> Result<DilationReport> {
    if !(s > -1.0) || s == 0.0 {
        return Err(Error::Domain(format!(
            "s = {s} must lie in (-1, ∞) without 0"
        )));
    }
    let spec = BesovSpec::new(s, f64::INFINITY, f64::INFINITY);
    let base = besov_norm(bank, f, &spec)?;
    let mut rows = Vec::new();
    for &lambda in lambdas {
        let fl = dilate_x1(f, lambda)?;
        let ratio = besov_norm(bank, &fl, &spec)? / (lambda.powf(s) * base);
        rows.push(DilationRow { lambda, ratio });
    }
    let max = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let min = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    Ok(DilationReport {
        s,
        rows,
        max,
        spread: max / min,
    })
}

/// Random field whose `x₁` frequencies are multiples of 16, so it can be
/// dilated by every admissible `λ`. Transverse frequencies stay below `kc`.
pub fn dilation_field(grid: &Arc<Grid>, seed: u64, kc: i64) -> Result<SpectralField> {
    let n = grid.n() as i64;
    if 16 > grid.dealias_cutoff() as i64 {
        return Err(Error::Precondition(format!(
            "grid n = {n} too coarse for x1 stride 16"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs = vec![Complex64::default(); grid.len()];
    let wrap = |k: i64| k.rem_euclid(n) as usize;
    for m1 in 0..=1i64 {
        for k2 in -kc..=kc {
            for k3 in -kc..=kc {
                if m1 == 0 && (k2, k3) <= (0, 0) {
                    continue;
                }
                let decay = 1.0 / (1.0 + (k2 * k2 + k3 * k3) as f64);
                let c = Complex64::from_polar(
                    decay * (0.5 + rng.gen::<f64>()),
                    rng.gen::<f64>() * std::f64::consts::TAU,
                );
                let i = grid.index(wrap(16 * m1), wrap(k2), wrap(k3));
                let j = grid.index(wrap(-16 * m1), wrap(-k2), wrap(-k3));
                coeffs[i] += c;
                coeffs[j] += c.conj();
            }
        }
    }
    Ok(SpectralField::from_coeffs(grid, coeffs))
}

/// `v·∇u` with the products formed on the `2n` grid.
pub fn advect(v: &VecField, u: &SpectralField) -> Result<SpectralField> {
    let mut acc = SpectralField::zeros(u.grid());
    for axis in 0..3 {
        let term = v.comp(axis).mul_exact(&partial(u, axis))?;
        acc = &acc + &term;
    }
    Ok(acc)
}

/// `[Δ_q, v·∇]u = Δ_q(v·∇u) − v·∇Δ_q u`.
pub fn commutator(
    bank: &DyadicFilterBank,
    q: i32,
    v: &VecField,
    u: &SpectralField,
) -> Result<SpectralField> {
    let outer = bank.block(q, &advect(v, u)?)?;
    let inner = advect(v, &bank.block(q, u)?)?;
    Ok(&outer - &inner)
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutatorRow {
    pub q: i32,
    pub lhs: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutatorReport {
    pub rhs: f64,
    pub rows: Vec<CommutatorRow>,
    pub spread: f64,
}

/// Compares `2^{qs}Ψ(q)‖[Δ_q, v·∇]u‖_{L²}` with
/// `‖∇v‖_{L^∞}‖u‖_{B^{s,Ψ}_{2,1}} + ‖∇u‖_{L^∞}‖v‖_{B^{s,Ψ}_{2,1}}`.
pub fn commutator_report(
    bank: &DyadicFilterBank,
    v: &VecField,
    u: &SpectralField,
    s: f64,
    psi: &Psi,
    levels: RangeInclusive<i32>,
) -> Result<CommutatorReport> {
    let spec = BesovSpec::new(s, 2.0, 1.0).with_psi(psi.clone());
    let mut dv = Vec::new();
    for c in v.comps() {
        dv.extend(grad(c).into_comps());
    }
    let grad_v = linf_oversampled_all(&dv.iter().collect::<Vec<_>>())
        .into_iter()
        .fold(0.0, f64::max);
    let du = grad(u);
    let grad_u = linf_oversampled_all(&du.comps().iter().collect::<Vec<_>>())
        .into_iter()
        .fold(0.0, f64::max);
    let mut v_norm = 0.0;
    for c in v.comps() {
        v_norm += besov_norm(bank, c, &spec)?;
    }
    let rhs = grad_v * besov_norm(bank, u, &spec)? + grad_u * v_norm;
    let mut rows = Vec::new();
    for q in levels {
        let lhs = 2f64.powf(q as f64 * s) * psi.eval(q) * commutator(bank, q, v, u)?.l2_norm();
        rows.push(CommutatorRow {
            q,
            lhs,
            ratio: lhs / rhs,
        });
    }
    let max = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let min = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    Ok(CommutatorReport {
        rhs,
        rows,
        spread: max / min,
    })
}
