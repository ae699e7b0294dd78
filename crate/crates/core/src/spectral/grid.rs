use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use super::fft::{Direction, Fft3};
use crate::error::{Error, Result};

/// Uniform periodic grid on the cube `[0, 2π)³` with `n` points per axis.
///
/// Arrays are stored with x₁ fastest: `idx = i1 + n (i2 + n i3)`. Fourier
/// coefficients share the layout, index `i` carrying wavenumber `i` for
/// `i < n/2` and `i - n` otherwise.
#[derive(Debug)]
pub struct Grid {
    n: usize,
    h: f64,
    wavenumbers: Vec<f64>,
    deriv: Vec<f64>,
    keep: Vec<bool>,
    k2: Vec<f64>,
    fft: Fft3,
    padded: OnceLock<Arc<Grid>>,
}

impl Grid {
    pub fn new(n: usize) -> Result<Arc<Self>> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(n));
        }
        let half = (n / 2) as i64;
        let wavenumbers: Vec<f64> = (0..n)
            .map(|i| {
                let i = i as i64;
                (if i < half { i } else { i - n as i64 }) as f64
            })
            .collect();
        // Odd derivatives drop the Nyquist mode so real fields stay real.
        let deriv: Vec<f64> = wavenumbers
            .iter()
            .map(|&k| if k == -(half as f64) { 0.0 } else { k })
            .collect();
        let cutoff = (n / 3) as f64;
        let keep: Vec<bool> = wavenumbers.iter().map(|k| k.abs() <= cutoff).collect();
        let mut k2 = vec![0.0; n * n * n];
        for i3 in 0..n {
            for i2 in 0..n {
                for i1 in 0..n {
                    let (a, b, c) = (wavenumbers[i1], wavenumbers[i2], wavenumbers[i3]);
                    k2[i1 + n * (i2 + n * i3)] = a * a + b * b + c * c;
                }
            }
        }
        Ok(Arc::new(Self {
            n,
            h: 2.0 * PI / n as f64,
            wavenumbers,
            deriv,
            keep,
            k2,
            fft: Fft3::new(n),
            padded: OnceLock::new(),
        }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_volume(&self) -> f64 {
        self.h * self.h * self.h
    }

    pub fn volume(&self) -> f64 {
        (2.0 * PI).powi(3)
    }

    /// Largest retained wavenumber component under the 2/3 rule.
    pub fn dealias_cutoff(&self) -> usize {
        self.n / 3
    }

    #[inline]
    pub fn index(&self, i1: usize, i2: usize, i3: usize) -> usize {
        i1 + self.n * (i2 + self.n * i3)
    }

    #[inline]
    pub fn unindex(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx % n, (idx / n) % n, idx / (n * n)]
    }

    /// Index of the wavenumber `-k` for the coefficient at `idx`.
    #[inline]
    pub fn conj_index(&self, idx: usize) -> usize {
        let n = self.n;
        let [a, b, c] = self.unindex(idx);
        self.index((n - a) % n, (n - b) % n, (n - c) % n)
    }

    /// Signed wavenumber carried by axis index `i`.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> f64 {
        self.wavenumbers[i]
    }

    /// Wavenumber used by first-derivative multipliers (Nyquist zeroed).
    #[inline]
    pub fn deriv_wavenumber(&self, i: usize) -> f64 {
        self.deriv[i]
    }

    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let [a, b, c] = self.unindex(idx);
        [
            self.wavenumbers[a],
            self.wavenumbers[b],
            self.wavenumbers[c],
        ]
    }

    pub fn deriv_wavevector(&self, idx: usize) -> [f64; 3] {
        let [a, b, c] = self.unindex(idx);
        [self.deriv[a], self.deriv[b], self.deriv[c]]
    }

    /// |k|² with true wavenumbers.
    pub fn k_squared(&self) -> &[f64] {
        &self.k2
    }

    /// Whether the coefficient at `idx` survives the 2/3 rule.
    #[inline]
    pub fn retained(&self, idx: usize) -> bool {
        let [a, b, c] = self.unindex(idx);
        self.keep[a] && self.keep[b] && self.keep[c]
    }

    pub fn dealias(&self, coeffs: &mut [Complex64]) {
        let n = self.n;
        for i3 in 0..n {
            for i2 in 0..n {
                let row = self.keep[i2] && self.keep[i3];
                let base = n * (i2 + n * i3);
                for i1 in 0..n {
                    if !(row && self.keep[i1]) {
                        coeffs[base + i1] = Complex64::default();
                    }
                }
            }
        }
    }

    /// Physical coordinate of axis index `i` in `[0, 2π)`.
    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    /// Coordinate relative to the box centre, in `[-π, π)`.
    #[inline]
    pub fn centered(&self, i: usize) -> f64 {
        i as f64 * self.h - PI
    }

    pub fn point(&self, idx: usize) -> [f64; 3] {
        let [a, b, c] = self.unindex(idx);
        [self.coord(a), self.coord(b), self.coord(c)]
    }

    pub fn centered_point(&self, idx: usize) -> [f64; 3] {
        let [a, b, c] = self.unindex(idx);
        [self.centered(a), self.centered(b), self.centered(c)]
    }

    /// Normalized coefficients `c(k)` with `f(x) = Σ c(k) e^{ik·x}`, made
    /// exactly conjugate symmetric.
    pub fn forward_real(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft.transform(&mut buf, Direction::Forward);
        let scale = 1.0 / self.len() as f64;
        (0..buf.len())
            .map(|idx| {
                let j = self.conj_index(idx);
                (buf[idx] + buf[j].conj()) * (0.5 * scale)
            })
            .collect()
    }

    /// Two real fields for the price of one complex transform.
    pub fn forward_real_pair(&self, a: &[f64], b: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut buf: Vec<Complex64> = a
            .iter()
            .zip(b)
            .map(|(&x, &y)| Complex64::new(x, y))
            .collect();
        self.fft.transform(&mut buf, Direction::Forward);
        let scale = 0.5 / self.len() as f64;
        let mut ca = Vec::with_capacity(buf.len());
        let mut cb = Vec::with_capacity(buf.len());
        for idx in 0..buf.len() {
            let z = buf[idx];
            let zc = buf[self.conj_index(idx)].conj();
            ca.push((z + zc) * scale);
            // (z - zc) / 2i
            let d = (z - zc) * scale;
            cb.push(Complex64::new(d.im, -d.re));
        }
        (ca, cb)
    }

    /// Real part of the inverse transform of normalized coefficients.
    pub fn inverse_real(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let mut buf = coeffs.to_vec();
        self.fft.transform(&mut buf, Direction::Inverse);
        buf.into_iter().map(|z| z.re).collect()
    }

    /// Inverse transform of two conjugate-symmetric coefficient sets.
    pub fn inverse_real_pair(&self, a: &[Complex64], b: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
        let mut buf: Vec<Complex64> = a
            .iter()
            .zip(b)
            .map(|(&x, &y)| x + Complex64::new(-y.im, y.re))
            .collect();
        self.fft.transform(&mut buf, Direction::Inverse);
        buf.into_iter().map(|z| (z.re, z.im)).unzip()
    }

    /// Complex inverse transform (no symmetry assumed).
    pub fn inverse_complex(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut buf = coeffs.to_vec();
        self.fft.transform(&mut buf, Direction::Inverse);
        buf
    }

    /// The `2n` grid used for oversampled maxima and alias-free products.
    pub fn padded(&self) -> &Arc<Grid> {
        self.padded
            .get_or_init(|| Grid::new(2 * self.n).expect("2n is a valid grid size"))
    }

    /// Embeds coefficients into the `2n` lattice. Nyquist entries are split
    /// evenly between `±n/2` so the padded field stays real.
    pub fn pad_coeffs(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let big = self.padded();
        let m = big.n();
        let mut out = vec![Complex64::default(); m * m * m];
        let targets = |i: usize| -> ([usize; 2], usize) {
            let k = self.wavenumbers[i] as i64;
            if k == -((n / 2) as i64) {
                ([m - n / 2, n / 2], 2)
            } else {
                let t = if k >= 0 {
                    k as usize
                } else {
                    (m as i64 + k) as usize
                };
                ([t, t], 1)
            }
        };
        for i3 in 0..n {
            let (t3, c3) = targets(i3);
            for i2 in 0..n {
                let (t2, c2) = targets(i2);
                for i1 in 0..n {
                    let v = coeffs[self.index(i1, i2, i3)];
                    if v == Complex64::default() {
                        continue;
                    }
                    let (t1, c1) = targets(i1);
                    let w = v / (c1 * c2 * c3) as f64;
                    for &a in &t3[..c3] {
                        for &b in &t2[..c2] {
                            for &c in &t1[..c1] {
                                out[big.index(c, b, a)] += w;
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Inverse of [`Grid::pad_coeffs`]: keeps `|k_i| <= n/2`, folding `+n/2`
    /// back onto the Nyquist index.
    pub fn truncate_coeffs(&self, padded: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let big = self.padded();
        let m = big.n();
        let mut out = vec![Complex64::default(); self.len()];
        let source = |k: i64| -> usize {
            if k >= 0 {
                k as usize
            } else {
                (m as i64 + k) as usize
            }
        };
        let axis = |i: usize| -> Vec<usize> {
            let k = self.wavenumbers[i] as i64;
            if k == -((n / 2) as i64) {
                vec![source(k), source(-k)]
            } else {
                vec![source(k)]
            }
        };
        for i3 in 0..n {
            let s3 = axis(i3);
            for i2 in 0..n {
                let s2 = axis(i2);
                for i1 in 0..n {
                    let s1 = axis(i1);
                    let mut acc = Complex64::default();
                    for &a in &s3 {
                        for &b in &s2 {
                            for &c in &s1 {
                                acc += padded[big.index(c, b, a)];
                            }
                        }
                    }
                    out[self.index(i1, i2, i3)] = acc;
                }
            }
        }
        out
    }
}
