use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::axisym::{make_initial_data, riesz_identity_check, AxisymRecipe, Profile};
use crate::diagnostics::geometry_residuals;
use crate::error::Result;
use crate::littlewood_paley::{
    bernstein_family, bernstein_lower, bernstein_report, chi, construct_psi, dilate_check,
    dilation_field, phi, DyadicFilterBank,
};
use crate::spectral::{
    curl, div, helmholtz, inv_laplacian, partial, riesz, Grid, SpectralField, VecField,
};

/// A measured quantity and the bound it must respect.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

impl CheckResult {
    fn at_most(suite: &'static str, name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            suite,
            name: name.into(),
            value,
            bound,
            pass: value <= bound,
        }
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Worst errors of the plane-wave identities, each relative to the sup of
/// the exact answer (at least one).
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct PlaneWaveErrors {
    pub derivative: f64,
    pub inv_laplacian: f64,
    pub riesz: f64,
}

/// `cos(k·x + φ)` for random resolved `k` against the closed forms of
/// `∂_j`, `Δ⁻¹` and `R_iR_j`.
pub fn plane_wave_errors(grid: &std::sync::Arc<Grid>, seed: u64, waves: usize) -> PlaneWaveErrors {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kc = grid.dealias_cutoff() as i64;
    let mut out = PlaneWaveErrors::default();
    for _ in 0..waves {
        let k = loop {
            let k: [i64; 3] = std::array::from_fn(|_| rng.gen_range(-kc..=kc));
            if k != [0, 0, 0] {
                break k.map(|x| x as f64);
            }
        };
        let ph = rng.gen::<f64>() * TAU;
        let arg = move |x: [f64; 3]| k[0] * x[0] + k[1] * x[1] + k[2] * x[2] + ph;
        let f = SpectralField::from_fn(grid, |x| arg(x).cos());
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        for j in 0..3 {
            let exact = SpectralField::from_fn(grid, |x| -k[j] * arg(x).sin());
            let scale = k[j].abs().max(1.0);
            out.derivative = out
                .derivative
                .max(max_abs_diff(partial(&f, j).values(), exact.values()) / scale);
        }
        let exact = SpectralField::from_fn(grid, |x| -arg(x).cos() / k2);
        out.inv_laplacian = out
            .inv_laplacian
            .max(max_abs_diff(inv_laplacian(&f).values(), exact.values()));
        for i in 0..3 {
            for j in 0..3 {
                let m = -k[i] * k[j] / k2;
                let exact = SpectralField::from_fn(grid, |x| m * arg(x).cos());
                out.riesz = out
                    .riesz
                    .max(max_abs_diff(riesz(i, j, &f).values(), exact.values()));
            }
        }
    }
    out
}

/// Random band-limited vector field with unit-size coefficients.
pub fn random_vector_field(grid: &std::sync::Arc<Grid>, seed: u64) -> VecField {
    let comps = bernstein_family(grid, seed, 3);
    let [a, b, c]: [SpectralField; 3] = comps.try_into().expect("three fields");
    VecField::new(a, b, c).expect("shared grid")
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct HelmholtzErrors {
    pub idempotence: f64,
    pub orthogonality: f64,
    pub div_free: f64,
    pub curl_free: f64,
}

/// Projection identities for `v = Pv + Qv`, relative to `‖v‖`.
pub fn helmholtz_errors(v: &VecField) -> Result<HelmholtzErrors> {
    let norm = v.l2_norm();
    let (p, q) = helmholtz(v);
    let (pp, pq) = helmholtz(&p);
    let (qp, qq) = helmholtz(&q);
    let idem = [
        pp.axpy(-1.0, &p)?.l2_norm(),
        pq.l2_norm(),
        qq.axpy(-1.0, &q)?.l2_norm(),
        qp.l2_norm(),
        p.axpy(1.0, &q)?.axpy(-1.0, v)?.l2_norm(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok(HelmholtzErrors {
        idempotence: idem / norm,
        orthogonality: p.inner(&q)?.abs() / (norm * norm),
        div_free: div(&p).linf_norm() / v.linf_norm(),
        curl_free: curl(&q).linf_norm() / v.linf_norm(),
    })
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct PartitionErrors {
    /// `max |χ(k) + Σ_q φ(2^{-q}k) − 1|` over the lattice.
    pub partition: f64,
    /// `max |Σ_q Δ_q f − f|` relative to `max |f|`.
    pub reconstruction: f64,
    /// Largest `|φ_p φ_q|` over lattice points with `|p − q| ≥ 2`.
    pub separation: f64,
}

pub fn partition_errors(bank: &DyadicFilterBank, f: &SpectralField) -> Result<PartitionErrors> {
    let grid = bank.grid();
    let levels: Vec<i32> = bank.levels().collect();
    let weight = |q: i32, kabs: f64| {
        if q < 0 {
            chi(kabs)
        } else {
            phi(kabs * 2f64.powi(-q))
        }
    };
    let mut partition = 0.0_f64;
    let mut separation = 0.0_f64;
    for k2 in grid.k_squared() {
        let kabs = k2.sqrt();
        let w: Vec<f64> = levels.iter().map(|&q| weight(q, kabs)).collect();
        partition = partition.max((w.iter().sum::<f64>() - 1.0).abs());
        for a in 0..w.len() {
            for b in a + 2..w.len() {
                separation = separation.max((w[a] * w[b]).abs());
            }
        }
    }
    let mut sum = SpectralField::zeros(grid);
    for b in bank.blocks(f)? {
        sum = sum.axpy(1.0, &b)?;
    }
    Ok(PartitionErrors {
        partition,
        reconstruction: max_abs_diff(sum.values(), f.values()) / f.linf_norm(),
        separation,
    })
}

/// Positive summable test sequences of assorted decay and length.
pub fn random_sequences(seed: u64, count: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|m| {
            let len = rng.gen_range(2..400);
            let rate: f64 = rng.gen_range(0.05..1.5);
            (0..len)
                .map(|q| {
                    let jitter: f64 = rng.gen_range(0.01..1.0);
                    let base = if m % 2 == 0 {
                        2f64.powf(-rate * q as f64)
                    } else {
                        (q as f64 + 1.0).powf(-1.0 - rate)
                    };
                    (base * jitter).max(f64::MIN_POSITIVE * 1e20)
                })
                .collect()
        })
        .collect()
}

/// Number of sequences failing any of the four weight properties.
pub fn psi_failures(sequences: &[Vec<f64>], tol: f64) -> Result<usize> {
    let mut bad = 0;
    for c in sequences {
        if !construct_psi(c)?.report(tol).all_ok() {
            bad += 1;
        }
    }
    Ok(bad)
}

/// Gaussian-derived zero-mass scalar `(3/2 − ρ²/a) e^{−ρ²/a} ∝ Δ e^{−ρ²/a}`
/// centred in the box.
pub fn zero_mass_profile(grid: &std::sync::Arc<Grid>, a: f64) -> SpectralField {
    SpectralField::from_centered_fn(grid, |[x, y, z]| {
        let r2 = x * x + y * y + z * z;
        (1.5 - r2 / a) * (-r2 / a).exp()
    })
}

/// The full property suite at resolution `n`.
pub fn run_checks(n: usize, seed: u64) -> Result<Vec<CheckResult>> {
    let grid = Grid::new(n)?;
    let bank = DyadicFilterBank::new(&grid);
    let mut out = Vec::new();

    let pw = plane_wave_errors(&grid, seed, 6);
    out.push(CheckResult::at_most(
        "spectral",
        "plane-wave derivative",
        pw.derivative,
        1e-12,
    ));
    out.push(CheckResult::at_most(
        "spectral",
        "plane-wave inverse Laplacian",
        pw.inv_laplacian,
        1e-12,
    ));
    out.push(CheckResult::at_most(
        "spectral",
        "plane-wave Riesz",
        pw.riesz,
        1e-12,
    ));

    let v = random_vector_field(&grid, seed);
    let he = helmholtz_errors(&v)?;
    out.push(CheckResult::at_most(
        "helmholtz",
        "idempotence",
        he.idempotence,
        1e-11,
    ));
    out.push(CheckResult::at_most(
        "helmholtz",
        "orthogonality",
        he.orthogonality,
        1e-11,
    ));
    out.push(CheckResult::at_most(
        "helmholtz",
        "div Pv",
        he.div_free,
        1e-11,
    ));
    out.push(CheckResult::at_most(
        "helmholtz",
        "curl Qv",
        he.curl_free,
        1e-11,
    ));

    let pe = partition_errors(&bank, v.comp(0))?;
    out.push(CheckResult::at_most(
        "partition",
        "chi + sum phi = 1",
        pe.partition,
        1e-13,
    ));
    out.push(CheckResult::at_most(
        "partition",
        "block reconstruction",
        pe.reconstruction,
        1e-12,
    ));
    out.push(CheckResult::at_most(
        "partition",
        "support separation",
        pe.separation,
        0.0,
    ));

    let seqs = random_sequences(seed, 100);
    out.push(CheckResult::at_most(
        "psi",
        "sequences violating a weight property",
        psi_failures(&seqs, 1e-12)? as f64,
        0.0,
    ));

    let family = bernstein_family(&grid, seed, 6);
    let levels = 0..=bank.q_max();
    let r0 = bernstein_report(&bank, &family, 0, 2.0, f64::INFINITY, levels.clone())?;
    out.push(CheckResult::at_most(
        "bernstein",
        "k=0 L2->Linf spread",
        r0.spread,
        4.0,
    ));
    let r1 = bernstein_report(&bank, &family, 1, 2.0, 2.0, levels.clone())?;
    out.push(CheckResult::at_most(
        "bernstein",
        "k=1 L2->L2 spread",
        r1.spread,
        4.0,
    ));
    let lower = bernstein_lower(&bank, &family, levels)?;
    let worst = lower.iter().map(|r| r.constant).fold(0.0, f64::max);
    out.push(CheckResult::at_most(
        "bernstein",
        "reverse constant",
        worst,
        4.0,
    ));

    // the default Gaussian width is resolved to round-off from n = 64 on
    let resolved = n >= 64;
    if resolved {
        let u = zero_mass_profile(&grid, Profile::Gaussian.default_width());
        let riesz_err = riesz_identity_check(&u, 4.0 * grid.h())?;
        out.push(CheckResult::at_most(
            "riesz",
            "axisymmetric identity",
            riesz_err,
            1e-6,
        ));
    }

    if grid.dealias_cutoff() >= 16 {
        let f = dilation_field(&grid, seed, 2)?;
        let d = dilate_check(&bank, &f, 0.5, &[0.5, 0.25, 0.125, 0.0625])?;
        out.push(CheckResult::at_most(
            "dilatation",
            "largest ratio",
            d.max,
            16.0,
        ));
        out.push(CheckResult::at_most(
            "dilatation",
            "ratio spread",
            d.spread,
            8.0,
        ));
    }

    if resolved {
        let data = make_initial_data(&grid, &AxisymRecipe::new(Profile::Gaussian), 0.5)?;
        let g = geometry_residuals(&data.v, true, seed);
        out.push(CheckResult::at_most(
            "geometry",
            "generated data swirl",
            g.swirl,
            1e-10,
        ));
        out.push(CheckResult::at_most(
            "geometry",
            "generated data rotation",
            g.axisym(),
            1e-10,
        ));
        out.push(CheckResult::at_most(
            "geometry",
            "generated data omega x e_theta",
            g.omega_cross_etheta,
            1e-10,
        ));
    }
    Ok(out)
}
