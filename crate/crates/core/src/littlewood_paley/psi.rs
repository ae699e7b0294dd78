use serde::Serialize;

use super::Psi;
use crate::error::{Error, Result};

pub const MAX_LEN: usize = 4096;

/// Slowly growing weight built from a summable sequence `c_q`, `q ≥ -1`.
///
/// `b_q = (Σ_{m≥q} c_m)^{-1/2}`, `a_{-1} = b_{-1}` and
/// `a_{q+1} = (a_q + min(b_{q+1}, 2 a_q)) / 2`.
#[derive(Clone, Debug, Serialize)]
pub struct PsiConstruction {
    pub c: Vec<f64>,
    pub b: Vec<f64>,
    pub a: Vec<f64>,
}

/// Outcome of the four structural inequalities, each with its worst slack.
#[derive(Clone, Debug, Serialize)]
pub struct PsiReport {
    pub nondecreasing: bool,
    pub below_b: bool,
    pub ratio_in_range: bool,
    pub weighted_sum: f64,
    pub sum_bound: f64,
    pub sum_ok: bool,
    pub max_ratio: f64,
}

impl PsiReport {
    pub fn all_ok(&self) -> bool {
        self.nondecreasing && self.below_b && self.ratio_in_range && self.sum_ok
    }
}

pub fn construct_psi(c: &[f64]) -> Result<PsiConstruction> {
    if c.is_empty() || c.len() > MAX_LEN {
        return Err(Error::Domain(format!(
            "sequence length {} outside 1..={MAX_LEN}",
            c.len()
        )));
    }
    if let Some((i, v)) = c
        .iter()
        .enumerate()
        .find(|(_, v)| !(**v > 0.0) || !v.is_finite())
    {
        return Err(Error::Domain(format!(
            "c[{}] = {v} is not positive",
            i as i64 - 1
        )));
    }
    let mut tails = vec![0.0; c.len()];
    let mut acc = 0.0;
    for i in (0..c.len()).rev() {
        acc += c[i];
        tails[i] = acc;
    }
    let b: Vec<f64> = tails.iter().map(|t| t.powf(-0.5)).collect();
    let mut a = Vec::with_capacity(c.len());
    a.push(b[0]);
    for i in 1..c.len() {
        let prev = a[i - 1];
        a.push(0.5 * (prev + b[i].min(2.0 * prev)));
    }
    Ok(PsiConstruction {
        c: c.to_vec(),
        b,
        a,
    })
}

impl PsiConstruction {
    /// Checks the inequalities with relative tolerance `tol`.
    pub fn report(&self, tol: f64) -> PsiReport {
        let a = &self.a;
        let mut nondecreasing = true;
        let mut ratio_in_range = true;
        let mut max_ratio = 1.0_f64;
        for w in a.windows(2) {
            let ratio = w[1] / w[0];
            max_ratio = max_ratio.max(ratio);
            nondecreasing &= w[1] >= w[0] * (1.0 - tol);
            ratio_in_range &= ratio >= 1.0 - tol && ratio <= 1.5 * (1.0 + tol);
        }
        let below_b = a.iter().zip(&self.b).all(|(x, y)| *x <= y * (1.0 + tol));
        let weighted_sum: f64 = a.iter().zip(&self.c).map(|(x, y)| x * y).sum();
        let sum_bound = 2.0 * self.c.iter().sum::<f64>().sqrt();
        PsiReport {
            nondecreasing,
            below_b,
            ratio_in_range,
            weighted_sum,
            sum_bound,
            sum_ok: weighted_sum <= sum_bound * (1.0 + tol),
            max_ratio,
        }
    }

    pub fn psi(&self) -> Psi {
        Psi::Table(self.a.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_sequence_closed_form() {
        // c_q = 4^{-q} for q = -1..=Q; the finite tail from q is
        // 4^{-q} (4/3)(1 - 4^{-(Q+1-q)})
        let top = 20;
        let c: Vec<f64> = (-1..=top).map(|q| 4f64.powi(-q)).collect();
        let pc = construct_psi(&c).unwrap();
        for (i, q) in (-1..=top).enumerate() {
            let tail = 4f64.powi(-q) * 4.0 / 3.0 * (1.0 - 4f64.powi(-(top + 1 - q)));
            assert!((pc.b[i] - tail.powf(-0.5)).abs() <= 1e-13 * pc.b[i]);
        }
        let r = pc.report(1e-12);
        assert!(r.all_ok(), "{r:?}");
        // b doubles each step, so the min in the recursion picks 2 a_q at
        // most and the ratio approaches 3/2
        assert!(r.max_ratio > 1.4);
    }

    #[test]
    fn homogeneity() {
        let c = [0.3, 0.2, 0.1, 0.05, 0.01, 0.003];
        let lam = 7.5;
        let scaled: Vec<f64> = c.iter().map(|x| x * lam).collect();
        let a = construct_psi(&c).unwrap();
        let b = construct_psi(&scaled).unwrap();
        for (x, y) in a.a.iter().zip(&b.a) {
            assert!((y - x / lam.sqrt()).abs() <= 1e-14 * x);
        }
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(matches!(construct_psi(&[1.0, 0.0]), Err(Error::Domain(_))));
        assert!(matches!(construct_psi(&[1.0, -2.0]), Err(Error::Domain(_))));
        assert!(matches!(construct_psi(&[]), Err(Error::Domain(_))));
    }
}
