use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField, VecField};

/// Compressible state: velocity, zero-mean sound-speed fluctuation and the
/// spatial mean of the sound speed carried as a scalar.
#[derive(Clone, Debug)]
pub struct State {
    pub v: VecField,
    pub c: SpectralField,
    pub c_mean: f64,
    pub eps: f64,
    pub gamma_bar: f64,
    pub t: f64,
}

impl State {
    /// Builds a state from a velocity and the full sound speed. Both are
    /// truncated by the 2/3 rule and the mean of `c` is split off.
    pub fn new(v: &VecField, c: &SpectralField, eps: f64, gamma_bar: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Domain(format!("Mach number {eps} must be positive")));
        }
        if !(gamma_bar > 0.0 && gamma_bar.is_finite()) {
            return Err(Error::Domain(format!(
                "gamma_bar {gamma_bar} must be positive"
            )));
        }
        v.comp(0).check_grid(c)?;
        let c = c.dealiased();
        Ok(Self {
            v: v.dealiased(),
            c_mean: c.mean(),
            c: c.without_mean(),
            eps,
            gamma_bar,
            t: 0.0,
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.v.grid()
    }

    /// `c + c_mean` as one field.
    pub fn c_total(&self) -> SpectralField {
        let mut coeffs = self.c.coeffs().to_vec();
        coeffs[0] = Complex64::new(self.c_mean, 0.0);
        SpectralField::from_coeffs(self.grid(), coeffs)
    }

    /// `‖v‖²_{L²} + ‖c‖²_{L²}` with the mean of `c` included.
    pub fn energy(&self) -> f64 {
        let vol = self.grid().volume();
        let mut e: f64 = self
            .v
            .comps()
            .iter()
            .map(|f| f.coeffs().iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum();
        e += self.c.coeffs().iter().map(|z| z.norm_sqr()).sum::<f64>();
        e += self.c_mean * self.c_mean;
        e * vol
    }

    pub fn is_finite(&self) -> bool {
        self.c_mean.is_finite()
            && self
                .c
                .coeffs()
                .iter()
                .all(|z| z.re.is_finite() && z.im.is_finite())
            && self.v.comps().iter().all(|f| {
                f.coeffs()
                    .iter()
                    .all(|z| z.re.is_finite() && z.im.is_finite())
            })
    }
}

/// Unit wavevector and modulus of the derivative wavevector. Modes that first
/// derivatives cannot see get `k̂ = 0` and zero frequency.
#[inline]
pub(crate) fn khat(grid: &Grid, idx: usize) -> ([f64; 3], f64) {
    let k = grid.deriv_wavevector(idx);
    let m = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
    if m == 0.0 {
        ([0.0; 3], 0.0)
    } else {
        ([k[0] / m, k[1] / m, k[2] / m], m)
    }
}

/// Per-mode diagonal variables of the penalized operator.
///
/// `p` holds the divergence-free velocity `P̂v(k)`; the acoustic pair is
/// `w± = k̂·v̂ ± ĉ`, which evolve freely as `e^{∓i t|k|/ε}`. In terms of the
/// filtered fields, `γ̂(k) = i w₊(k)` and `Γ̂(k) = k̂ w₊(k)`, with
/// `w₋(k) = -conj(w₊(-k))`. The mean of `c` is carried separately.
#[derive(Clone, Debug)]
pub struct FilteredState {
    grid: Arc<Grid>,
    pub p: [Vec<Complex64>; 3],
    pub w_plus: Vec<Complex64>,
    pub w_minus: Vec<Complex64>,
    pub c_mean: f64,
    pub eps: f64,
    pub gamma_bar: f64,
    pub t: f64,
}

impl FilteredState {
    pub fn from_state(s: &State) -> Self {
        let mut fs = Self::from_parts(
            s.grid(),
            [
                s.v.comp(0).coeffs(),
                s.v.comp(1).coeffs(),
                s.v.comp(2).coeffs(),
            ],
            s.c.coeffs(),
            s.eps,
            s.gamma_bar,
        );
        fs.c_mean = s.c_mean;
        fs.t = s.t;
        fs
    }

    /// Filters raw coefficient arrays. The `k = 0` entry of `c` goes to
    /// `c_mean`.
    pub(crate) fn from_parts(
        grid: &Arc<Grid>,
        v: [&[Complex64]; 3],
        c: &[Complex64],
        eps: f64,
        gamma_bar: f64,
    ) -> Self {
        let n = grid.len();
        let zero = Complex64::default();
        let mut p = [vec![zero; n], vec![zero; n], vec![zero; n]];
        let mut w_plus = vec![zero; n];
        let mut w_minus = vec![zero; n];
        for idx in 1..n {
            let (e, _) = khat(grid, idx);
            let vk = [v[0][idx], v[1][idx], v[2][idx]];
            let vq = vk[0] * e[0] + vk[1] * e[1] + vk[2] * e[2];
            for d in 0..3 {
                p[d][idx] = vk[d] - vq * e[d];
            }
            w_plus[idx] = vq + c[idx];
            w_minus[idx] = vq - c[idx];
        }
        for d in 0..3 {
            p[d][0] = v[d][0];
        }
        Self {
            grid: Arc::clone(grid),
            p,
            w_plus,
            w_minus,
            c_mean: c[0].re,
            eps,
            gamma_bar,
            t: 0.0,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Velocity and full sound-speed coefficients (mean at index 0).
    pub(crate) fn to_parts(&self) -> ([Vec<Complex64>; 3], Vec<Complex64>) {
        let n = self.grid.len();
        let zero = Complex64::default();
        let mut v = [vec![zero; n], vec![zero; n], vec![zero; n]];
        let mut c = vec![zero; n];
        for idx in 0..n {
            let (e, _) = khat(&self.grid, idx);
            let vq = (self.w_plus[idx] + self.w_minus[idx]) * 0.5;
            c[idx] = (self.w_plus[idx] - self.w_minus[idx]) * 0.5;
            for d in 0..3 {
                v[d][idx] = self.p[d][idx] + vq * e[d];
            }
        }
        c[0] = Complex64::new(self.c_mean, 0.0);
        (v, c)
    }

    pub fn to_state(&self) -> State {
        let (v, mut c) = self.to_parts();
        c[0] = Complex64::default();
        let [a, b, d] = v;
        State {
            v: VecField::new(
                SpectralField::from_coeffs(&self.grid, a),
                SpectralField::from_coeffs(&self.grid, b),
                SpectralField::from_coeffs(&self.grid, d),
            )
            .expect("components share a grid"),
            c: SpectralField::from_coeffs(&self.grid, c),
            c_mean: self.c_mean,
            eps: self.eps,
            gamma_bar: self.gamma_bar,
            t: self.t,
        }
    }

    /// `Σ |coefficient|²` over every stored mode, times the box volume.
    pub fn l2_norm_sqr(&self) -> f64 {
        let s: f64 = self
            .p
            .iter()
            .chain([&self.w_plus, &self.w_minus])
            .map(|a| a.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum();
        (s + self.c_mean * self.c_mean) * self.grid.volume()
    }

    /// Divergence-free velocity as a field.
    pub fn incompressible(&self) -> VecField {
        let [a, b, c] = self.p.clone();
        VecField::new(
            SpectralField::from_coeffs(&self.grid, a),
            SpectralField::from_coeffs(&self.grid, b),
            SpectralField::from_coeffs(&self.grid, c),
        )
        .expect("components share a grid")
    }

    /// Gradient part of the velocity, `Q̂v = k̂ (w₊ + w₋)/2`.
    pub fn compressible(&self) -> VecField {
        let n = self.grid.len();
        let mut q = [
            vec![Complex64::default(); n],
            vec![Complex64::default(); n],
            vec![Complex64::default(); n],
        ];
        for idx in 0..n {
            let (e, _) = khat(&self.grid, idx);
            let vq = (self.w_plus[idx] + self.w_minus[idx]) * 0.5;
            for d in 0..3 {
                q[d][idx] = vq * e[d];
            }
        }
        let [a, b, c] = q;
        VecField::new(
            SpectralField::from_coeffs(&self.grid, a),
            SpectralField::from_coeffs(&self.grid, b),
            SpectralField::from_coeffs(&self.grid, c),
        )
        .expect("components share a grid")
    }

    /// `self + a * other` on every stored variable; time and parameters are
    /// kept from `self`.
    pub(crate) fn axpy(&self, a: f64, other: &FilteredState) -> FilteredState {
        let add = |x: &[Complex64], y: &[Complex64]| -> Vec<Complex64> {
            x.iter().zip(y).map(|(&u, &w)| u + w * a).collect()
        };
        FilteredState {
            grid: Arc::clone(&self.grid),
            p: [
                add(&self.p[0], &other.p[0]),
                add(&self.p[1], &other.p[1]),
                add(&self.p[2], &other.p[2]),
            ],
            w_plus: add(&self.w_plus, &other.w_plus),
            w_minus: add(&self.w_minus, &other.w_minus),
            c_mean: self.c_mean + a * other.c_mean,
            eps: self.eps,
            gamma_bar: self.gamma_bar,
            t: self.t,
        }
    }

    pub(crate) fn zeros_like(&self) -> FilteredState {
        let n = self.grid.len();
        let zero = Complex64::default();
        FilteredState {
            grid: Arc::clone(&self.grid),
            p: [vec![zero; n], vec![zero; n], vec![zero; n]],
            w_plus: vec![zero; n],
            w_minus: vec![zero; n],
            c_mean: 0.0,
            eps: self.eps,
            gamma_bar: self.gamma_bar,
            t: self.t,
        }
    }
}

/// Free acoustic evolution over `dt`: `w₊ ← e^{-i dt|k|/ε} w₊`,
/// `w₋ ← e^{+i dt|k|/ε} w₋`. The divergence-free part and the mean are
/// untouched, so the map is unitary mode by mode. Time is not advanced.
pub fn acoustic_propagate(fs: &FilteredState, dt: f64) -> FilteredState {
    let mut out = fs.clone();
    if dt == 0.0 {
        return out;
    }
    let grid = fs.grid();
    for idx in 0..grid.len() {
        let (_, m) = khat(grid, idx);
        if m == 0.0 {
            continue;
        }
        let phase = Complex64::from_polar(1.0, -dt * m / fs.eps);
        out.w_plus[idx] *= phase;
        out.w_minus[idx] *= phase.conj();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sample_state(n: usize) -> State {
        let g = Grid::new(n).unwrap();
        let v = VecField::from_centered_fn(&g, |[x, y, z]| {
            let e = (-(x * x + y * y + z * z)).exp();
            [y * e + 0.3 * x.sin(), -x * e, z.sin() * y.cos()]
        });
        let c =
            SpectralField::from_centered_fn(&g, |[x, y, z]| 0.2 + (x + 2.0 * y).cos() * z.sin());
        State::new(&v, &c, 0.25, 1.4).unwrap()
    }

    #[test]
    fn filtered_round_trip_is_identity() {
        let s = sample_state(16);
        let back = FilteredState::from_state(&s).to_state();
        assert!(back.v.max_coeff_diff(&s.v) < 1e-15);
        let dc = back
            .c
            .coeffs()
            .iter()
            .zip(s.c.coeffs())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(dc < 1e-15);
        assert_eq!(back.c_mean, s.c_mean);
    }

    #[test]
    fn filtered_pair_matches_gamma_definition() {
        // γ = |D|⁻¹ div v + i c has coefficients i w₊
        let s = sample_state(16);
        let fs = FilteredState::from_state(&s);
        let g = s.grid();
        let d = crate::spectral::div(&s.v);
        let dd = crate::spectral::inv_abs_d(&d);
        for idx in 1..g.len() {
            let gamma = dd.coeffs()[idx] + Complex64::i() * s.c.coeffs()[idx];
            assert!((gamma - Complex64::i() * fs.w_plus[idx]).norm() < 1e-14);
        }
    }

    #[test]
    fn propagation_is_unitary_and_periodic() {
        let s = sample_state(16);
        let fs = FilteredState::from_state(&s);
        let e0 = fs.l2_norm_sqr();
        for dt in [0.0, 0.1, 1.7, 123.4] {
            let e1 = acoustic_propagate(&fs, dt).l2_norm_sqr();
            assert!((e1 - e0).abs() <= 1e-13 * e0);
        }
    }

    #[test]
    fn single_mode_returns_after_full_period() {
        let g = Grid::new(8).unwrap();
        let v = VecField::new(
            SpectralField::from_fn(&g, |x| x[0].cos()),
            SpectralField::zeros(&g),
            SpectralField::zeros(&g),
        )
        .unwrap();
        let c = SpectralField::from_fn(&g, |x| x[0].cos());
        let s = State::new(&v, &c, 0.25, 1.0).unwrap();
        let fs = FilteredState::from_state(&s);
        let out = acoustic_propagate(&fs, PI / 2.0).to_state();
        assert!(out.v.max_coeff_diff(&s.v) < 1e-15);
        let q = acoustic_propagate(&fs, PI / 8.0).to_state();
        // ∂_t v = -(1/ε) ∂_x c and ∂_t c = -(1/ε) ∂_x v: v = c = cos x is a
        // right-moving wave, v(t) = c(t) = cos(x - t/ε)
        let t = PI / 8.0;
        let ev = SpectralField::from_fn(&g, |x| (x[0] - t / 0.25).cos());
        let ec = SpectralField::from_fn(&g, |x| (x[0] - t / 0.25).cos());
        let err_v =
            q.v.comp(0)
                .values()
                .iter()
                .zip(ev.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
        let err_c =
            q.c.values()
                .iter()
                .zip(ec.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
        assert!(err_v < 1e-14 && err_c < 1e-14, "{err_v} {err_c}");
    }

    #[test]
    fn rejects_bad_parameters() {
        let g = Grid::new(8).unwrap();
        let v = VecField::zeros(&g);
        let c = SpectralField::zeros(&g);
        assert!(State::new(&v, &c, 0.0, 1.0).is_err());
        assert!(State::new(&v, &c, 0.5, -1.0).is_err());
    }
}
