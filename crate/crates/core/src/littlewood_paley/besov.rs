use serde::{Deserialize, Serialize};

use super::DyadicFilterBank;
use crate::error::{Error, Result};
use crate::spectral::{linf_oversampled_all, SpectralField};

/// Weight on block indices for heterogeneous Besov norms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Psi {
    One,
    /// `Ψ(q) = 2^{αq}`.
    Power(f64),
    /// Values for `q = -1, 0, 1, ...`; the last entry is held beyond the end.
    Table(Vec<f64>),
}

impl Psi {
    pub fn eval(&self, q: i32) -> f64 {
        match self {
            Psi::One => 1.0,
            Psi::Power(a) => 2f64.powf(a * q as f64),
            Psi::Table(t) => {
                let i = ((q + 1).max(0) as usize).min(t.len() - 1);
                t[i]
            }
        }
    }

    pub fn id(&self) -> String {
        match self {
            Psi::One => "one".into(),
            Psi::Power(a) => format!("pow{a}"),
            Psi::Table(t) => format!("table{}", t.len()),
        }
    }

    /// Checks that `Ψ` is positive and nondecreasing on `-1..=q_last` and
    /// returns `C_Ψ = max Ψ(q+1)/Ψ(q)` over that range.
    pub fn growth_constant(&self, q_last: i32) -> Result<f64> {
        let mut c = 1.0_f64;
        let mut prev = self.eval(-1);
        if !(prev > 0.0) || !prev.is_finite() {
            return Err(Error::Domain(format!("Ψ(-1) = {prev} is not positive")));
        }
        for q in 0..=q_last {
            let v = self.eval(q);
            if v < prev {
                return Err(Error::Domain(format!("Ψ decreases at q = {q}")));
            }
            c = c.max(v / prev);
            prev = v;
        }
        Ok(c)
    }
}

/// Norm descriptor for `B^{s,Ψ}_{p,r}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovSpec {
    pub s: f64,
    pub p: f64,
    pub r: f64,
    pub psi: Psi,
    /// Drop the zero mode before measuring.
    pub homogeneous: bool,
}

impl BesovSpec {
    pub fn new(s: f64, p: f64, r: f64) -> Self {
        Self {
            s,
            p,
            r,
            psi: Psi::One,
            homogeneous: false,
        }
    }

    pub fn with_psi(mut self, psi: Psi) -> Self {
        self.psi = psi;
        self
    }

    pub fn homogeneous(mut self) -> Self {
        self.homogeneous = true;
        self
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("p", self.p), ("r", self.r)] {
            if !(v >= 1.0) {
                return Err(Error::Domain(format!("{name} = {v} must lie in [1, ∞]")));
            }
        }
        Ok(())
    }
}

/// `‖Δ_q f‖_{L^p}` for every block, `p = ∞` measured on the oversampled grid.
pub fn block_lp_norms(bank: &DyadicFilterBank, f: &SpectralField, p: f64) -> Result<Vec<f64>> {
    let blocks = bank.blocks(f)?;
    Ok(if p.is_infinite() {
        linf_oversampled_all(&blocks.iter().collect::<Vec<_>>())
    } else {
        blocks.iter().map(|b| b.lp_norm(p)).collect()
    })
}

/// `Ψ(q) 2^{qs} ‖Δ_q f‖_{L^p}` for `q = -1..=q_top`.
pub fn besov_terms(
    bank: &DyadicFilterBank,
    f: &SpectralField,
    spec: &BesovSpec,
) -> Result<Vec<f64>> {
    spec.validate()?;
    let owned;
    let f = if spec.homogeneous {
        owned = f.without_mean();
        &owned
    } else {
        f
    };
    let norms = block_lp_norms(bank, f, spec.p)?;
    Ok(bank
        .levels()
        .zip(norms)
        .map(|(q, x)| spec.psi.eval(q) * 2f64.powf(q as f64 * spec.s) * x)
        .collect())
}

/// ℓ^r aggregation of a sequence of nonnegative terms.
pub fn lr_sum(terms: &[f64], r: f64) -> f64 {
    if r.is_infinite() {
        terms.iter().cloned().fold(0.0, f64::max)
    } else {
        terms.iter().map(|t| t.powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

pub fn besov_norm(bank: &DyadicFilterBank, f: &SpectralField, spec: &BesovSpec) -> Result<f64> {
    Ok(lr_sum(&besov_terms(bank, f, spec)?, spec.r))
}

/// One row of a norm report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormRow {
    pub time: f64,
    pub norm_name: String,
    pub s: f64,
    pub p: f64,
    pub r: f64,
    pub psi_id: String,
    pub value: f64,
}

impl NormRow {
    pub fn besov(time: f64, name: &str, spec: &BesovSpec, value: f64) -> Self {
        Self {
            time,
            norm_name: name.into(),
            s: spec.s,
            p: spec.p,
            r: spec.r,
            psi_id: spec.psi.id(),
            value,
        }
    }
}
