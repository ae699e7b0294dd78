use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use super::grid::Grid;
use crate::error::{Error, Result};

/// Real scalar field on a periodic grid.
///
/// Fourier coefficients are the canonical representation; grid values are
/// synthesized on first access and cached until the field is dropped.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: Arc<Grid>,
    coeffs: Vec<Complex64>,
    values: OnceLock<Vec<f64>>,
}

impl SpectralField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self::from_coeffs(grid, vec![Complex64::default(); grid.len()])
    }

    pub fn constant(grid: &Arc<Grid>, value: f64) -> Self {
        let mut c = vec![Complex64::default(); grid.len()];
        c[0] = Complex64::new(value, 0.0);
        Self::from_coeffs(grid, c)
    }

    /// Takes ownership of normalized coefficients. The caller is responsible
    /// for conjugate symmetry.
    pub fn from_coeffs(grid: &Arc<Grid>, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(
            coeffs.len(),
            grid.len(),
            "coefficient array does not match grid"
        );
        Self {
            grid: Arc::clone(grid),
            coeffs,
            values: OnceLock::new(),
        }
    }

    pub fn from_values(grid: &Arc<Grid>, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.len(), "value array does not match grid");
        let coeffs = grid.forward_real(&values);
        let values_cell = OnceLock::new();
        let _ = values_cell.set(values);
        Self {
            grid: Arc::clone(grid),
            coeffs,
            values: values_cell,
        }
    }

    /// Samples `f` at the physical grid points `x ∈ [0, 2π)³`.
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn([f64; 3]) -> f64) -> Self {
        let values = (0..grid.len()).map(|idx| f(grid.point(idx))).collect();
        Self::from_values(grid, values)
    }

    /// Samples `f` at coordinates centred on the box midpoint.
    pub fn from_centered_fn(grid: &Arc<Grid>, f: impl Fn([f64; 3]) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|idx| f(grid.centered_point(idx)))
            .collect();
        Self::from_values(grid, values)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Largest coefficient-wise distance to `other`.
    pub fn max_coeff_diff(&self, other: &SpectralField) -> f64 {
        self.coeffs()
            .iter()
            .zip(other.coeffs())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn values(&self) -> &[f64] {
        self.values
            .get_or_init(|| self.grid.inverse_real(&self.coeffs))
    }

    pub fn check_grid(&self, other: &SpectralField) -> Result<()> {
        same_grid(&self.grid, &other.grid)
    }

    /// Applies a coefficient-wise map `(index, c) -> c'`.
    pub fn map_coeffs(&self, f: impl Fn(usize, Complex64) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| f(i, c))
            .collect();
        Self::from_coeffs(&self.grid, coeffs)
    }

    /// Applies a real Fourier multiplier given as a function of the index.
    pub fn multiplier(&self, m: impl Fn(usize) -> f64) -> Self {
        self.map_coeffs(|i, c| c * m(i))
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map_coeffs(|_, c| c * a)
    }

    /// `self + a * other`
    pub fn axpy(&self, a: f64, other: &SpectralField) -> Result<Self> {
        self.check_grid(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&x, &y)| x + y * a)
            .collect();
        Ok(Self::from_coeffs(&self.grid, coeffs))
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    pub fn without_mean(&self) -> Self {
        let mut c = self.coeffs.clone();
        c[0] = Complex64::default();
        Self::from_coeffs(&self.grid, c)
    }

    pub fn dealiased(&self) -> Self {
        let mut c = self.coeffs.clone();
        self.grid.dealias(&mut c);
        Self::from_coeffs(&self.grid, c)
    }

    /// Largest coefficient magnitude outside the 2/3-rule cube.
    pub fn alias_content(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(i, _)| !self.grid.retained(*i))
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max)
    }

    /// Pointwise product truncated by the 2/3 rule.
    pub fn mul(&self, other: &SpectralField) -> Result<Self> {
        self.check_grid(other)?;
        let prod: Vec<f64> = self
            .values()
            .iter()
            .zip(other.values())
            .map(|(a, b)| a * b)
            .collect();
        let mut c = self.grid.forward_real(&prod);
        self.grid.dealias(&mut c);
        Ok(Self::from_coeffs(&self.grid, c))
    }

    /// Pointwise product evaluated on the `2n` grid, projected back onto the
    /// `n` lattice without any 2/3 truncation.
    pub fn mul_exact(&self, other: &SpectralField) -> Result<Self> {
        self.check_grid(other)?;
        let big = self.grid.padded();
        let (a, b) = big.inverse_real_pair(
            &self.grid.pad_coeffs(&self.coeffs),
            &self.grid.pad_coeffs(&other.coeffs),
        );
        let prod: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        let c = self.grid.truncate_coeffs(&big.forward_real(&prod));
        Ok(Self::from_coeffs(&self.grid, c))
    }

    /// Values on the `2n` grid (trigonometric interpolation).
    pub fn oversampled_values(&self) -> Vec<f64> {
        self.grid
            .padded()
            .inverse_real(&self.grid.pad_coeffs(&self.coeffs))
    }

    /// Grid quadrature `(Σ |f|^p h³)^{1/p}`; `p = ∞` gives the grid maximum.
    pub fn lp_norm(&self, p: f64) -> f64 {
        lp_of(
            self.values().iter().map(|v| v.abs()),
            p,
            self.grid.cell_volume(),
        )
    }

    pub fn l2_norm(&self) -> f64 {
        self.lp_norm(2.0)
    }

    pub fn linf_norm(&self) -> f64 {
        self.values().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Maximum over the 2x oversampled grid.
    pub fn linf_oversampled(&self) -> f64 {
        self.oversampled_values()
            .iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Trigonometric interpolant evaluated at arbitrary points.
    pub fn eval_points(&self, points: &[[f64; 3]]) -> Vec<f64> {
        let ev = PointEvaluator::new(&self.grid, &[self]);
        points.iter().map(|p| ev.eval(p)[0]).collect()
    }

    /// ⟨f, g⟩ = ∫ f g by grid quadrature.
    pub fn inner(&self, other: &SpectralField) -> Result<f64> {
        self.check_grid(other)?;
        Ok(self
            .values()
            .iter()
            .zip(other.values())
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * self.grid.cell_volume())
    }
}

/// Oversampled maxima of several fields, transforming them two at a time.
pub fn linf_oversampled_all(fields: &[&SpectralField]) -> Vec<f64> {
    let max_abs = |v: &[f64]| v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let mut out = Vec::with_capacity(fields.len());
    for pair in fields.chunks(2) {
        match pair {
            [a, b] => {
                a.check_grid(b).expect("fields share a grid");
                let g = &a.grid;
                let (x, y) = g
                    .padded()
                    .inverse_real_pair(&g.pad_coeffs(&a.coeffs), &g.pad_coeffs(&b.coeffs));
                out.push(max_abs(&x));
                out.push(max_abs(&y));
            }
            [a] => out.push(a.linf_oversampled()),
            _ => unreachable!(),
        }
    }
    out
}

pub(crate) fn same_grid(a: &Arc<Grid>, b: &Arc<Grid>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a.n() == b.n() {
        Ok(())
    } else {
        Err(Error::GridMismatch {
            left: a.n(),
            right: b.n(),
        })
    }
}

/// L^p quadrature of a stream of nonnegative samples.
pub fn lp_of(abs_values: impl Iterator<Item = f64>, p: f64, cell: f64) -> f64 {
    if p.is_infinite() {
        abs_values.fold(0.0, f64::max)
    } else if p == 2.0 {
        (abs_values.map(|v| v * v).sum::<f64>() * cell).sqrt()
    } else if p == 1.0 {
        abs_values.sum::<f64>() * cell
    } else {
        (abs_values.map(|v| v.powf(p)).sum::<f64>() * cell).powf(1.0 / p)
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        self.axpy(1.0, rhs)
            .expect("grid mismatch in field addition")
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        self.axpy(-1.0, rhs)
            .expect("grid mismatch in field subtraction")
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, rhs: f64) -> SpectralField {
        self.scale(rhs)
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        self.scale(-1.0)
    }
}

/// Three components on a common grid.
#[derive(Clone, Debug)]
pub struct VecField {
    comps: [SpectralField; 3],
}

impl VecField {
    pub fn new(c0: SpectralField, c1: SpectralField, c2: SpectralField) -> Result<Self> {
        c0.check_grid(&c1)?;
        c0.check_grid(&c2)?;
        Ok(Self {
            comps: [c0, c1, c2],
        })
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self {
            comps: std::array::from_fn(|_| SpectralField::zeros(grid)),
        }
    }

    pub fn from_centered_fn(grid: &Arc<Grid>, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let samples: Vec<[f64; 3]> = (0..grid.len()).map(|i| f(grid.centered_point(i))).collect();
        Self {
            comps: std::array::from_fn(|c| {
                SpectralField::from_values(grid, samples.iter().map(|s| s[c]).collect())
            }),
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.comps[0].grid()
    }

    pub fn comps(&self) -> &[SpectralField; 3] {
        &self.comps
    }

    pub fn comp(&self, i: usize) -> &SpectralField {
        &self.comps[i]
    }

    pub fn into_comps(self) -> [SpectralField; 3] {
        self.comps
    }

    pub fn map(&self, f: impl Fn(&SpectralField) -> SpectralField) -> Self {
        Self {
            comps: std::array::from_fn(|i| f(&self.comps[i])),
        }
    }

    pub fn axpy(&self, a: f64, other: &VecField) -> Result<Self> {
        let c0 = self.comps[0].axpy(a, &other.comps[0])?;
        let c1 = self.comps[1].axpy(a, &other.comps[1])?;
        let c2 = self.comps[2].axpy(a, &other.comps[2])?;
        Ok(Self {
            comps: [c0, c1, c2],
        })
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map(|c| c.scale(a))
    }

    pub fn dealiased(&self) -> Self {
        self.map(SpectralField::dealiased)
    }

    /// Pointwise Euclidean magnitude on the grid.
    pub fn magnitude_values(&self) -> Vec<f64> {
        let [a, b, c] = &self.comps;
        let (a, b, c) = (a.values(), b.values(), c.values());
        (0..a.len())
            .map(|i| (a[i] * a[i] + b[i] * b[i] + c[i] * c[i]).sqrt())
            .collect()
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        lp_of(
            self.magnitude_values().into_iter(),
            p,
            self.grid().cell_volume(),
        )
    }

    pub fn l2_norm(&self) -> f64 {
        self.lp_norm(2.0)
    }

    pub fn linf_norm(&self) -> f64 {
        self.lp_norm(f64::INFINITY)
    }

    pub fn linf_oversampled(&self) -> f64 {
        let vals: Vec<Vec<f64>> = self.comps.iter().map(|c| c.oversampled_values()).collect();
        (0..vals[0].len())
            .map(|i| (vals[0][i].powi(2) + vals[1][i].powi(2) + vals[2][i].powi(2)).sqrt())
            .fold(0.0, f64::max)
    }

    pub fn inner(&self, other: &VecField) -> Result<f64> {
        let mut s = 0.0;
        for i in 0..3 {
            s += self.comps[i].inner(&other.comps[i])?;
        }
        Ok(s)
    }

    /// Largest coefficient-wise distance to `other`.
    pub fn max_coeff_diff(&self, other: &VecField) -> f64 {
        (0..3)
            .map(|i| self.comps[i].max_coeff_diff(&other.comps[i]))
            .fold(0.0, f64::max)
    }
}

/// Direct evaluation of trigonometric interpolants at off-grid points,
/// restricted to the axis indices that carry nonzero coefficients.
pub struct PointEvaluator<'a> {
    grid: &'a Grid,
    fields: Vec<&'a [Complex64]>,
    active: Vec<usize>,
}

impl<'a> PointEvaluator<'a> {
    pub fn new(grid: &'a Arc<Grid>, fields: &[&'a SpectralField]) -> Self {
        let n = grid.n();
        let mut used = vec![false; n];
        for f in fields {
            for (idx, c) in f.coeffs().iter().enumerate() {
                if *c != Complex64::default() {
                    for a in grid.unindex(idx) {
                        used[a] = true;
                    }
                }
            }
        }
        Self {
            grid,
            fields: fields.iter().map(|f| f.coeffs()).collect(),
            active: (0..n).filter(|&i| used[i]).collect(),
        }
    }

    /// Values of every registered field at `x` (physical coordinates).
    pub fn eval(&self, x: &[f64; 3]) -> Vec<f64> {
        let g = self.grid;
        let phase = |axis: usize| -> Vec<Complex64> {
            self.active
                .iter()
                .map(|&i| Complex64::from_polar(1.0, g.wavenumber(i) * x[axis]))
                .collect()
        };
        let (e1, e2, e3) = (phase(0), phase(1), phase(2));
        let mut out = vec![0.0; self.fields.len()];
        for (f, coeffs) in self.fields.iter().enumerate() {
            let mut total = Complex64::default();
            for (a3, &i3) in self.active.iter().enumerate() {
                let mut plane = Complex64::default();
                for (a2, &i2) in self.active.iter().enumerate() {
                    let base = g.index(0, i2, i3);
                    let mut row = Complex64::default();
                    for (a1, &i1) in self.active.iter().enumerate() {
                        row += coeffs[base + i1] * e1[a1];
                    }
                    plane += row * e2[a2];
                }
                total += plane * e3[a3];
            }
            out[f] = total.re;
        }
        out
    }
}
