use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{curl, grad, Grid, SpectralField, VecField};

/// Shape of the stream profile `ψ̃ = r² h(r², z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// `h = e^{-ρ²/a}`; `Ω/r` peaks on the axis.
    Gaussian,
    /// `h = (r²/a)² e^{-ρ²/a}`; `Ω/r` vanishes on the axis and peaks on a ring.
    Ring,
}

impl Profile {
    fn power(self) -> i32 {
        match self {
            Profile::Gaussian => 0,
            Profile::Ring => 2,
        }
    }

    pub fn default_width(self) -> f64 {
        match self {
            Profile::Gaussian => 0.19,
            Profile::Ring => 0.155,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preparation {
    /// Gradient velocity and sound speed of size one.
    Ill,
    /// Gradient velocity and sound speed scaled by `ε`.
    Well,
}

fn default_amplitude() -> f64 {
    1.0
}
fn default_acoustic_amplitude() -> f64 {
    0.5
}
fn default_support_radius() -> f64 {
    0.8 * PI
}
fn default_support_tol() -> f64 {
    1e-12
}
fn default_preparation() -> Preparation {
    Preparation::Ill
}

/// Axisymmetric data without swirl, centred in the box with symmetry axis
/// along `x₃`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisymRecipe {
    pub profile: Profile,
    /// Peak speed of the divergence-free part.
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    /// Width `a` in `e^{-ρ²/a}`; defaults per profile.
    #[serde(default)]
    pub width: Option<f64>,
    #[serde(default = "default_preparation")]
    pub prepared: Preparation,
    /// Peak of the gradient velocity and of the sound speed before any `ε`
    /// scaling. Zero gives purely solenoidal data.
    #[serde(default = "default_acoustic_amplitude")]
    pub acoustic_amplitude: f64,
    #[serde(default)]
    pub acoustic_width: Option<f64>,
    #[serde(default = "default_support_radius")]
    pub support_radius: f64,
    #[serde(default = "default_support_tol")]
    pub support_tol: f64,
}

impl AxisymRecipe {
    pub fn new(profile: Profile) -> Self {
        Self {
            profile,
            amplitude: default_amplitude(),
            width: None,
            prepared: Preparation::Ill,
            acoustic_amplitude: default_acoustic_amplitude(),
            acoustic_width: None,
            support_radius: default_support_radius(),
            support_tol: default_support_tol(),
        }
    }

    pub fn width(&self) -> f64 {
        self.width.unwrap_or(self.profile.default_width())
    }

    pub fn acoustic_width(&self) -> f64 {
        self.acoustic_width
            .unwrap_or(Profile::Gaussian.default_width())
    }

    /// Unnormalized `H(s, z)` with `h(x) = H(r², z)`.
    pub fn h(&self, s: f64, z: f64) -> f64 {
        let a = self.width();
        (s / a).powi(self.profile.power()) * (-(s + z * z) / a).exp()
    }

    /// Unnormalized `Ω^θ / r = -(Δh + 4 ∂_s H)` in closed form.
    pub fn zeta_profile(&self, s: f64, z: f64) -> f64 {
        let a = self.width();
        let m = self.profile.power();
        let t = s / a;
        let pow = |e: i32| if e < 0 { 0.0 } else { t.powi(e) };
        let mf = m as f64;
        let bracket = 8.0 * mf * pow(m - 1) - 8.0 * pow(m) + 4.0 * mf * (mf - 1.0) * pow(m - 1)
            - 8.0 * mf * pow(m)
            + 4.0 * pow(m + 1)
            + pow(m) * (4.0 * z * z / a - 2.0);
        -(-(s + z * z) / a).exp() / a * bracket
    }

    /// Stokes stream function `ψ̃ = r² h`.
    pub fn stream(&self, s: f64, z: f64) -> f64 {
        s * self.h(s, z)
    }

    fn acoustic_potential(&self, rho2: f64) -> f64 {
        (-rho2 / self.acoustic_width()).exp()
    }

    /// Zero-mass Mexican-hat sound profile `(3/2 - ρ²/b) e^{-ρ²/b}`.
    fn sound(&self, rho2: f64) -> f64 {
        let b = self.acoustic_width();
        (1.5 - rho2 / b) * (-rho2 / b).exp()
    }

    fn validate(&self) -> Result<()> {
        let checks = [
            ("amplitude", self.amplitude, self.amplitude >= 0.0),
            ("width", self.width(), self.width() > 0.0),
            (
                "acoustic_amplitude",
                self.acoustic_amplitude,
                self.acoustic_amplitude >= 0.0,
            ),
            (
                "acoustic_width",
                self.acoustic_width(),
                self.acoustic_width() > 0.0,
            ),
            (
                "support_radius",
                self.support_radius,
                self.support_radius > 0.0 && self.support_radius <= 0.8 * PI + 1e-12,
            ),
        ];
        for (name, v, ok) in checks {
            if !ok || !v.is_finite() {
                return Err(Error::Domain(format!("recipe {name} = {v} out of range")));
            }
        }
        Ok(())
    }

    /// Largest value of each profile outside the support ball, relative to
    /// its peak on the grid.
    pub fn support_leak(&self, grid: &Grid) -> f64 {
        let r0 = self.support_radius;
        let profiles: [&dyn Fn(f64, f64) -> f64; 3] = [
            &|s, z| self.stream(s, z),
            &|s, z| self.acoustic_potential(s + z * z),
            &|s, z| self.sound(s + z * z),
        ];
        let mut worst = 0.0_f64;
        for prof in profiles {
            let (mut inside, mut outside) = (0.0_f64, 0.0_f64);
            for idx in 0..grid.len() {
                let [x, y, z] = grid.centered_point(idx);
                let s = x * x + y * y;
                let v = prof(s, z).abs();
                if (s + z * z).sqrt() > r0 {
                    outside = outside.max(v);
                } else {
                    inside = inside.max(v);
                }
            }
            if inside > 0.0 {
                worst = worst.max(outside / inside);
            }
        }
        worst
    }

    pub fn check_support(&self, grid: &Grid) -> Result<()> {
        self.validate()?;
        let leak = self.support_leak(grid);
        if leak > self.support_tol {
            return Err(Error::Domain(format!(
                "profiles reach {leak:.3e} of their peak outside radius {:.4}; narrow the width",
                self.support_radius
            )));
        }
        Ok(())
    }

    /// Factor turning the unit profile into one with peak speed `amplitude`.
    fn solenoidal_scale(&self, unit: &VecField) -> f64 {
        let peak = unit.linf_norm();
        if peak == 0.0 {
            0.0
        } else {
            self.amplitude / peak
        }
    }
}

fn unit_solenoidal(grid: &Arc<Grid>, recipe: &AxisymRecipe) -> VecField {
    // vector potential h (-x₂, x₁, 0), so v = curl A has no swirl
    let a = VecField::from_centered_fn(grid, |[x, y, z]| {
        let h = recipe.h(x * x + y * y, z);
        [-y * h, x * h, 0.0]
    });
    curl(&a)
}

/// Divergence-free part of the data with its normalization factor.
pub fn solenoidal_part(grid: &Arc<Grid>, recipe: &AxisymRecipe) -> Result<(VecField, f64)> {
    recipe.check_support(grid)?;
    let unit = unit_solenoidal(grid, recipe);
    let scale = recipe.solenoidal_scale(&unit);
    Ok((unit.scale(scale), scale))
}

/// `Ω/r` of the normalized solenoidal part, from the closed form.
pub fn zeta_exact(grid: &Arc<Grid>, recipe: &AxisymRecipe) -> Result<SpectralField> {
    let (_, scale) = solenoidal_part(grid, recipe)?;
    Ok(SpectralField::from_centered_fn(grid, |[x, y, z]| {
        scale * recipe.zeta_profile(x * x + y * y, z)
    }))
}

/// Gradient part `∇φ` with peak speed `acoustic_amplitude`.
pub fn gradient_part(grid: &Arc<Grid>, recipe: &AxisymRecipe) -> Result<VecField> {
    recipe.check_support(grid)?;
    let phi = SpectralField::from_centered_fn(grid, |[x, y, z]| {
        recipe.acoustic_potential(x * x + y * y + z * z)
    });
    let g = grad(&phi);
    let peak = g.linf_norm();
    Ok(if peak == 0.0 {
        g
    } else {
        g.scale(recipe.acoustic_amplitude / peak)
    })
}

/// Sound-speed profile with peak `acoustic_amplitude`.
pub fn sound_part(grid: &Arc<Grid>, recipe: &AxisymRecipe) -> Result<SpectralField> {
    recipe.check_support(grid)?;
    let c = SpectralField::from_centered_fn(grid, |[x, y, z]| recipe.sound(x * x + y * y + z * z));
    let peak = c.linf_norm();
    Ok(if peak == 0.0 {
        c
    } else {
        c.scale(recipe.acoustic_amplitude / peak)
    })
}

/// Solenoidal plus gradient velocity at full (unscaled) strength.
pub fn make_velocity(grid: &Arc<Grid>, recipe: &AxisymRecipe) -> Result<VecField> {
    let (sol, _) = solenoidal_part(grid, recipe)?;
    let g = gradient_part(grid, recipe)?;
    sol.axpy(1.0, &g)
}

/// Initial velocity and sound speed, before any dealiasing.
#[derive(Clone, Debug)]
pub struct InitialData {
    pub v: VecField,
    pub c: SpectralField,
    /// Divergence-free part of `v`, shared by every `ε`.
    pub v_solenoidal: VecField,
}

/// Data for one Mach number. Ill-prepared data do not depend on `ε`; the
/// well-prepared variant scales the gradient velocity and `c` by `ε`.
pub fn make_initial_data(grid: &Arc<Grid>, recipe: &AxisymRecipe, eps: f64) -> Result<InitialData> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Domain(format!("ε = {eps} must lie in (0, 1]")));
    }
    let (sol, _) = solenoidal_part(grid, recipe)?;
    let factor = match recipe.prepared {
        Preparation::Ill => 1.0,
        Preparation::Well => eps,
    };
    let g = gradient_part(grid, recipe)?;
    let c = sound_part(grid, recipe)?.scale(factor);
    Ok(InitialData {
        v: sol.axpy(factor, &g)?,
        c,
        v_solenoidal: sol,
    })
}

/// Ill-prepared data regardless of the recipe's preparation flag.
pub fn make_ill_prepared(grid: &Arc<Grid>, recipe: &AxisymRecipe, eps: f64) -> Result<InitialData> {
    let mut r = recipe.clone();
    r.prepared = Preparation::Ill;
    make_initial_data(grid, &r, eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::div;

    #[test]
    fn zeta_profile_matches_finite_differences() {
        // -(Δh + 4 ∂_s H) evaluated with central differences in (r, z)
        for profile in [Profile::Gaussian, Profile::Ring] {
            let rc = AxisymRecipe::new(profile);
            let hh = |r: f64, z: f64| rc.h(r * r, z);
            let d = 1e-4;
            for &(r, z) in &[(0.3, 0.1), (0.5, -0.2), (0.2, 0.4)] {
                let h_rr = (hh(r + d, z) - 2.0 * hh(r, z) + hh(r - d, z)) / (d * d);
                let h_r = (hh(r + d, z) - hh(r - d, z)) / (2.0 * d);
                let h_zz = (hh(r, z + d) - 2.0 * hh(r, z) + hh(r, z - d)) / (d * d);
                // Δh + 4 H_s = h_rr + 3 h_r / r + h_zz
                let fd = -(h_rr + 3.0 * h_r / r + h_zz);
                let exact = rc.zeta_profile(r * r, z);
                assert!(
                    (fd - exact).abs() < 1e-5 * exact.abs().max(1.0),
                    "{profile:?} {fd} {exact}"
                );
            }
        }
    }

    #[test]
    fn ring_vanishes_on_axis() {
        let rc = AxisymRecipe::new(Profile::Ring);
        assert_eq!(rc.zeta_profile(0.0, 0.1), 0.0);
        let g = AxisymRecipe::new(Profile::Gaussian);
        assert!((g.zeta_profile(0.0, 0.0) - 10.0 / g.width()).abs() < 1e-12);
    }

    #[test]
    fn solenoidal_velocity_is_divergence_free() {
        let g = Grid::new(32).unwrap();
        let rc = AxisymRecipe::new(Profile::Gaussian);
        let (v, _) = solenoidal_part(&g, &rc).unwrap();
        assert!((v.linf_norm() - 1.0).abs() < 1e-14);
        assert!(div(&v).linf_norm() < 1e-10);
    }

    #[test]
    fn wide_profile_fails_support() {
        let g = Grid::new(32).unwrap();
        let mut rc = AxisymRecipe::new(Profile::Gaussian);
        rc.width = Some(0.5);
        assert!(matches!(solenoidal_part(&g, &rc), Err(Error::Domain(_))));
    }

    #[test]
    fn preparation_scaling() {
        let g = Grid::new(16).unwrap();
        let mut rc = AxisymRecipe::new(Profile::Gaussian);
        let ill_a = make_initial_data(&g, &rc, 0.5).unwrap();
        let ill_b = make_initial_data(&g, &rc, 0.125).unwrap();
        assert_eq!(ill_a.c.coeffs(), ill_b.c.coeffs());
        assert_eq!(ill_a.v.comp(0).coeffs(), ill_b.v.comp(0).coeffs());
        rc.prepared = Preparation::Well;
        let w1 = make_initial_data(&g, &rc, 0.25).unwrap();
        let w2 = make_initial_data(&g, &rc, 0.125).unwrap();
        let r = w1.c.linf_norm() / w2.c.linf_norm();
        assert!((r - 2.0).abs() < 1e-12);
        let d1 = div(&w1.v).linf_norm();
        let d2 = div(&w2.v).linf_norm();
        assert!((d1 / d2 - 2.0).abs() < 1e-6);
    }
}
