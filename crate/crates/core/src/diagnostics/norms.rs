use crate::diagnostics::Zeta;
use crate::error::Result;
use crate::littlewood_paley::{besov_norm, BesovSpec, DyadicFilterBank, NormRow, Psi};
use crate::spectral::{curl, div, SpectralField, VecField};

/// Heterogeneous weight used in norm reports.
pub const REPORT_PSI: Psi = Psi::Power(0.5);

fn row(time: f64, name: &str, s: f64, p: f64, r: f64, psi: &str, value: f64) -> NormRow {
    NormRow {
        time,
        norm_name: name.into(),
        s,
        p,
        r,
        psi_id: psi.into(),
        value,
    }
}

/// The fixed set of norms logged with every checkpoint and recomputed by the
/// offline calculator:
///
/// * `B^{5/2}_{2,1}` and `B^{5/2,Ψ}_{2,1}` of each velocity component and of `c`,
/// * `B⁰_{∞,1}` of `div v` and of `Ω` (summed over components),
/// * `L²` of `v` and `c`,
/// * `L^p` (p = 2, 3, ∞) and `L^{3,1}` of `ζ` on the mask `r ≥ r_min`.
///
/// Lebesgue and Lorentz rows report `s = 0`; for Lebesgue rows `r = p`.
pub fn norm_table(
    bank: &DyadicFilterBank,
    time: f64,
    v: &VecField,
    c: &SpectralField,
    r_min: f64,
) -> Result<Vec<NormRow>> {
    let mut rows = Vec::new();
    let crit = BesovSpec::new(2.5, 2.0, 1.0);
    let het = BesovSpec::new(2.5, 2.0, 1.0).with_psi(REPORT_PSI);
    let named: [(&str, &SpectralField); 4] = [
        ("v1", v.comp(0)),
        ("v2", v.comp(1)),
        ("v3", v.comp(2)),
        ("c", c),
    ];
    for (name, f) in named {
        for spec in [&crit, &het] {
            rows.push(NormRow::besov(time, name, spec, besov_norm(bank, f, spec)?));
        }
    }
    let b0 = BesovSpec::new(0.0, f64::INFINITY, 1.0);
    rows.push(NormRow::besov(
        time,
        "div_v",
        &b0,
        besov_norm(bank, &div(v), &b0)?,
    ));
    let omega = curl(v);
    let mut ob0 = 0.0;
    for comp in omega.comps() {
        ob0 += besov_norm(bank, comp, &b0)?;
    }
    rows.push(NormRow::besov(time, "omega", &b0, ob0));
    rows.push(row(time, "v", 0.0, 2.0, 2.0, "lebesgue", v.l2_norm()));
    rows.push(row(time, "c", 0.0, 2.0, 2.0, "lebesgue", c.l2_norm()));
    let zeta = Zeta::from_omega(omega, r_min)?;
    for p in [2.0, 3.0, f64::INFINITY] {
        rows.push(row(time, "zeta", 0.0, p, p, "lebesgue", zeta.lp_norm(p)));
    }
    rows.push(row(
        time,
        "zeta",
        0.0,
        3.0,
        1.0,
        "lorentz",
        zeta.lorentz_norm(3.0, 1.0)?,
    ));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    #[test]
    fn table_has_fixed_layout() {
        let g = Grid::new(16).unwrap();
        let bank = DyadicFilterBank::new(&g);
        let v = VecField::from_centered_fn(&g, |[x, y, z]| {
            let e = (-(x * x + y * y + z * z)).exp();
            [-y * e, x * e, 0.0]
        });
        let c = SpectralField::from_fn(&g, |x| x[0].cos());
        let rows = norm_table(&bank, 0.5, &v, &c, 2.0 * g.h()).unwrap();
        assert_eq!(rows.len(), 8 + 2 + 2 + 4);
        assert!(rows
            .iter()
            .all(|r| r.time == 0.5 && r.value.is_finite() && r.value >= 0.0));
        // ‖cos x₁‖_{L²} = sqrt(4π³)
        let c_l2 = rows
            .iter()
            .find(|r| r.norm_name == "c" && r.psi_id == "lebesgue")
            .unwrap();
        assert!((c_l2.value - (4.0 * std::f64::consts::PI.powi(3)).sqrt()).abs() < 1e-12);
    }
}
