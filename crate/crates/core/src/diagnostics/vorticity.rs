use crate::diagnostics::Rearrangement;
use crate::error::{Error, Result};
use crate::spectral::{curl, PointEvaluator, VecField};

/// `ζ = Ω^θ / r = (x₁Ω² − x₂Ω¹)/r²` on the grid points with `r ≥ r_min`.
#[derive(Clone, Debug)]
pub struct Zeta {
    omega: VecField,
    r_min: f64,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl Zeta {
    pub fn new(v: &VecField, r_min: f64) -> Result<Self> {
        Self::from_omega(curl(v), r_min)
    }

    pub fn from_omega(omega: VecField, r_min: f64) -> Result<Self> {
        let g = omega.grid().clone();
        let (o1, o2) = (omega.comp(0).values(), omega.comp(1).values());
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for idx in 0..g.len() {
            let [x, y, _] = g.centered_point(idx);
            let r2 = x * x + y * y;
            if r2 > 0.0 && r2.sqrt() >= r_min {
                indices.push(idx);
                values.push((x * o2[idx] - y * o1[idx]) / r2);
            }
        }
        if indices.is_empty() {
            return Err(Error::Domain(format!(
                "mask r >= {r_min} contains no grid point"
            )));
        }
        Ok(Self {
            omega,
            r_min,
            indices,
            values,
        })
    }

    pub fn omega(&self) -> &VecField {
        &self.omega
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    /// Grid indices of the masked points, in the order of [`Zeta::values`].
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn rearrangement(&self) -> Rearrangement {
        Rearrangement::new(self.values.iter().copied(), self.omega.grid().cell_volume())
    }

    /// `L^p` norm over the mask by cell quadrature.
    pub fn lp_norm(&self, p: f64) -> f64 {
        self.rearrangement().lp_norm(p)
    }

    pub fn lorentz_norm(&self, p: f64, q: f64) -> Result<f64> {
        self.rearrangement().lorentz_norm(p, q)
    }

    pub fn grid_max(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `sup |ζ|` over the mask, refined from the grid maximum by a pattern
    /// search on the trigonometric interpolant of `Ω`.
    pub fn sup(&self) -> f64 {
        let g = self.omega.grid().clone();
        let (best, _) = self
            .values
            .iter()
            .enumerate()
            .fold((0, 0.0_f64), |(bi, bv), (i, v)| {
                if v.abs() > bv {
                    (i, v.abs())
                } else {
                    (bi, bv)
                }
            });
        let ev = PointEvaluator::new(&g, &[self.omega.comp(0), self.omega.comp(1)]);
        let pi = std::f64::consts::PI;
        let r_min = self.r_min;
        let zeta_at = |c: &[f64; 3]| -> f64 {
            let r2 = c[0] * c[0] + c[1] * c[1];
            if r2 <= 0.0 || r2.sqrt() < r_min {
                return 0.0;
            }
            let o = ev.eval(&[c[0] + pi, c[1] + pi, c[2] + pi]);
            ((c[0] * o[1] - c[1] * o[0]) / r2).abs()
        };
        let mut x = g.centered_point(self.indices[best]);
        let mut fx = zeta_at(&x);
        let mut step = 0.5 * g.h();
        while step > 1e-7 * g.h() {
            let mut moved = false;
            for d in 0..3 {
                for sgn in [-1.0, 1.0] {
                    let mut y = x;
                    y[d] += sgn * step;
                    let fy = zeta_at(&y);
                    if fy > fx {
                        x = y;
                        fx = fy;
                        moved = true;
                    }
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
        fx.max(self.grid_max())
    }
}

/// `‖v^r / r‖_{L^∞}` over the mask.
pub fn radial_over_r_sup(v: &VecField, r_min: f64) -> f64 {
    let g = v.grid();
    let (a, b) = (v.comp(0).values(), v.comp(1).values());
    let mut m = 0.0_f64;
    for idx in 0..g.len() {
        let [x, y, _] = g.centered_point(idx);
        let r2 = x * x + y * y;
        if r2 > 0.0 && r2.sqrt() >= r_min {
            m = m.max(((x * a[idx] + y * b[idx]) / r2).abs());
        }
    }
    m
}
