use num_complex::Complex64;

use super::DyadicFilterBank;
use crate::error::Result;
use crate::spectral::SpectralField;

/// `uv = T_u v + T_v u + R(u, v)`.
#[derive(Clone, Debug)]
pub struct BonyParts {
    pub t_uv: SpectralField,
    pub t_vu: SpectralField,
    pub remainder: SpectralField,
}

impl BonyParts {
    pub fn sum(&self) -> SpectralField {
        &(&self.t_uv + &self.t_vu) + &self.remainder
    }
}

/// Paraproduct decomposition with every product formed on the `2n` grid, so
/// the parts are exact for inputs band-limited to `n/4`.
pub fn bony(bank: &DyadicFilterBank, u: &SpectralField, v: &SpectralField) -> Result<BonyParts> {
    u.check_grid(v)?;
    let g = bank.grid().clone();
    let big = g.padded().clone();
    let len = big.len();
    let (mut acc_t_uv, mut acc_t_vu, mut acc_r) = (vec![0.0; len], vec![0.0; len], vec![0.0; len]);

    let padded_pair = |a: &SpectralField, b: &SpectralField| {
        big.inverse_real_pair(&g.pad_coeffs(a.coeffs()), &g.pad_coeffs(b.coeffs()))
    };
    let accumulate = |acc: &mut [f64], x: &[f64], y: &[f64]| {
        for ((s, a), b) in acc.iter_mut().zip(x).zip(y) {
            *s += a * b;
        }
    };
    let top = bank.q_top();
    for q in bank.levels() {
        if q >= 1 {
            let (su, dv) = padded_pair(&bank.low_pass(q - 1, u)?, &bank.block(q, v)?);
            accumulate(&mut acc_t_uv, &su, &dv);
            let (sv, du) = padded_pair(&bank.low_pass(q - 1, v)?, &bank.block(q, u)?);
            accumulate(&mut acc_t_vu, &sv, &du);
        }
        // Δ_q u times (Δ_{q-1} + Δ_q + Δ_{q+1}) v
        let du = bank.block(q, u)?;
        let near = v.multiplier(|i| {
            (q - 1..=q + 1)
                .filter(|j| (-1..=top).contains(j))
                .map(|j| bank.block_weight(j, i))
                .sum()
        });
        let (a, b) = padded_pair(&du, &near);
        accumulate(&mut acc_r, &a, &b);
    }

    let back = |vals: &[f64]| -> Vec<Complex64> { g.truncate_coeffs(&big.forward_real(vals)) };
    let (c_uv, c_vu) = big.forward_real_pair(&acc_t_uv, &acc_t_vu);
    Ok(BonyParts {
        t_uv: SpectralField::from_coeffs(&g, g.truncate_coeffs(&c_uv)),
        t_vu: SpectralField::from_coeffs(&g, g.truncate_coeffs(&c_vu)),
        remainder: SpectralField::from_coeffs(&g, back(&acc_r)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    fn max_abs_diff(a: &SpectralField, b: &SpectralField) -> f64 {
        a.values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn constant_factor_still_sums() {
        let g = Grid::new(16).unwrap();
        let bank = DyadicFilterBank::new(&g);
        let u = SpectralField::constant(&g, 2.5);
        let v = SpectralField::from_fn(&g, |x| (x[0] + x[2]).sin() + (3.0 * x[1]).cos());
        let parts = bony(&bank, &u, &v).unwrap();
        let prod = u.mul_exact(&v).unwrap();
        assert!(max_abs_diff(&parts.sum(), &prod) < 1e-12);
    }

    #[test]
    fn single_block_factor() {
        // k = (4,4,0) has |k| in [4/3·4, 3/2·4], where only φ(2^{-2}·) is nonzero
        let g = Grid::new(32).unwrap();
        let bank = DyadicFilterBank::new(&g);
        let v = SpectralField::from_fn(&g, |x| (4.0 * x[0] + 4.0 * x[1]).cos());
        let b2 = bank.block(2, &v).unwrap();
        assert!(max_abs_diff(&b2, &v) < 1e-14);
        let u = SpectralField::from_fn(&g, |x| {
            x[2].sin() + (2.0 * x[0]).cos() + (x[1] + 3.0 * x[2]).sin()
        });
        let parts = bony(&bank, &u, &v).unwrap();
        let expect = bank.low_pass(1, &u).unwrap().mul_exact(&v).unwrap();
        assert!(max_abs_diff(&parts.t_uv, &expect) < 1e-12);
    }
}
