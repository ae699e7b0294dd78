use std::sync::Arc;

use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField};

const INNER: f64 = 3.0 / 4.0;
const OUTER: f64 = 4.0 / 3.0;

fn bump(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Smooth radial step: 1 on `[0, 3/4]`, 0 on `[4/3, ∞)`.
pub fn theta(t: f64) -> f64 {
    if t <= INNER {
        1.0
    } else if t >= OUTER {
        0.0
    } else {
        let a = bump(OUTER - t);
        a / (a + bump(t - INNER))
    }
}

/// Low-pass profile `χ(ξ) = θ(|ξ|)`.
pub fn chi(xi: f64) -> f64 {
    theta(xi)
}

/// Annulus profile `φ(ξ) = χ(ξ/2) − χ(ξ)`, supported in `3/4 < |ξ| < 8/3`.
pub fn phi(xi: f64) -> f64 {
    chi(xi / 2.0) - chi(xi)
}

/// Dyadic multipliers on the lattice of one grid.
///
/// Block `q = -1` is `χ(D)`, block `q ≥ 0` is `φ(2^{-q}D)`. `q_max` is the last
/// annulus whose support lies inside the dealiased range; blocks continue up to
/// `q_top`, the first level at which `χ(2^{-(q_top+1)}·)` equals one on the
/// whole lattice, so that the blocks sum to the identity exactly.
#[derive(Clone, Debug)]
pub struct DyadicFilterBank {
    grid: Arc<Grid>,
    kabs: Vec<f64>,
    q_max: i32,
    q_top: i32,
}

impl DyadicFilterBank {
    pub fn new(grid: &Arc<Grid>) -> Self {
        let kabs: Vec<f64> = grid.k_squared().iter().map(|k2| k2.sqrt()).collect();
        let n = grid.n() as f64;
        let q_max = (n / 3.0).log2().floor() as i32 - 1;
        let kmax = kabs.iter().cloned().fold(0.0, f64::max);
        let mut q_top = q_max;
        while chi(kmax * 2f64.powi(-(q_top + 1))) < 1.0 {
            q_top += 1;
        }
        Self {
            grid: grid.clone(),
            kabs,
            q_max,
            q_top,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn q_max(&self) -> i32 {
        self.q_max
    }

    pub fn q_top(&self) -> i32 {
        self.q_top
    }

    /// All block indices `-1..=q_top`.
    pub fn levels(&self) -> std::ops::RangeInclusive<i32> {
        -1..=self.q_top
    }

    fn check(&self, q: i32, lo: i32, hi: i32) -> Result<()> {
        if q < lo || q > hi {
            return Err(Error::Range {
                what: "block index",
                value: q as i64,
                min: lo as i64,
                max: hi as i64,
            });
        }
        Ok(())
    }

    /// `χ(2^{-j}|k|)` at one lattice index.
    fn low_weight(&self, j: i32, idx: usize) -> f64 {
        chi(self.kabs[idx] * 2f64.powi(-j))
    }

    /// Multiplier of `Δ_q` at one lattice index.
    pub fn block_weight(&self, q: i32, idx: usize) -> f64 {
        if q == -1 {
            self.low_weight(0, idx)
        } else {
            self.low_weight(q + 1, idx) - self.low_weight(q, idx)
        }
    }

    /// Multiplier of `S_q = Σ_{j<q} Δ_j`, which is `χ(2^{-q}D)` for `q ≥ 0`
    /// and zero for `q = -1`.
    pub fn low_weight_of(&self, q: i32, idx: usize) -> f64 {
        if q < 0 {
            0.0
        } else {
            self.low_weight(q, idx)
        }
    }

    pub fn block_multiplier(&self, q: i32) -> Result<Vec<f64>> {
        self.check(q, -1, self.q_top)?;
        Ok((0..self.grid.len())
            .map(|i| self.block_weight(q, i))
            .collect())
    }

    pub fn block(&self, q: i32, f: &SpectralField) -> Result<SpectralField> {
        self.check(q, -1, self.q_top)?;
        self.same(f)?;
        Ok(f.multiplier(|i| self.block_weight(q, i)))
    }

    pub fn low_pass(&self, q: i32, f: &SpectralField) -> Result<SpectralField> {
        self.check(q, -1, self.q_top + 1)?;
        self.same(f)?;
        Ok(f.multiplier(|i| self.low_weight_of(q, i)))
    }

    /// Every block of `f`, indexed from `q = -1`.
    pub fn blocks(&self, f: &SpectralField) -> Result<Vec<SpectralField>> {
        self.levels().map(|q| self.block(q, f)).collect()
    }

    fn same(&self, f: &SpectralField) -> Result<()> {
        if f.grid().n() != self.grid.n() {
            return Err(Error::GridMismatch {
                left: self.grid.n(),
                right: f.grid().n(),
            });
        }
        Ok(())
    }
}
