use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::rhs::{
    compressible_terms, incompressible_terms, inverse_many, project, Coeffs3, Monitors,
};
use super::state::{acoustic_propagate, FilteredState, State};
use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField, VecField};

/// Time-step and lifespan-proxy settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepControl {
    pub cfl: f64,
    pub dt_eps_factor: f64,
    pub blowup_factor: f64,
    pub tail_fraction_max: f64,
    /// Overrides the adaptive step (still clipped to the caller's limit).
    pub fixed_dt: Option<f64>,
    /// With `false` only the free acoustic evolution is integrated.
    pub nonlinear: bool,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            cfl: 0.4,
            dt_eps_factor: 0.5,
            blowup_factor: 10.0,
            tail_fraction_max: 1e-3,
            fixed_dt: None,
            nonlinear: true,
        }
    }
}

impl StepControl {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {x}")))
            }
        };
        positive("cfl", self.cfl)?;
        positive("dt_eps_factor", self.dt_eps_factor)?;
        positive("blowup_factor", self.blowup_factor)?;
        positive("tail_fraction_max", self.tail_fraction_max)?;
        if let Some(dt) = self.fixed_dt {
            positive("fixed_dt", dt)?;
        }
        Ok(())
    }
}

/// What one step did: the step size, monitors of the state the step started
/// from, and the spectral tail fraction of the state it produced.
#[derive(Clone, Copy, Debug)]
pub struct StepInfo {
    pub dt: f64,
    pub monitors: Monitors,
    pub tail_fraction: f64,
}

/// Share of `Σ|v̂|² + |ĉ|²` carried by modes with `max |k_i| > n/4`.
pub fn tail_fraction(grid: &Grid, fields: &[&[Complex64]]) -> f64 {
    let quarter = (grid.n() / 4) as f64;
    let (mut tail, mut total) = (0.0, 0.0);
    for idx in 0..grid.len() {
        let k = grid.wavevector(idx);
        let e: f64 = fields.iter().map(|f| f[idx].norm_sqr()).sum();
        total += e;
        if k.iter().any(|x| x.abs() > quarter) {
            tail += e;
        }
    }
    if total > 0.0 {
        tail / total
    } else {
        0.0
    }
}

/// Gradient-growth and spectral-tail thresholds standing in for the
/// maximal existence time.
#[derive(Clone, Copy, Debug)]
pub struct BlowupProxy {
    pub grad0: f64,
    pub factor: f64,
    pub tail_max: f64,
}

impl BlowupProxy {
    pub fn new(ctrl: &StepControl, grad0: f64) -> Self {
        Self {
            grad0,
            factor: ctrl.blowup_factor,
            tail_max: ctrl.tail_fraction_max,
        }
    }

    /// Reason for tripping, if any.
    pub fn check(&self, grad_v_inf: f64, tail: f64) -> Option<String> {
        if self.grad0 > 0.0 && grad_v_inf > self.factor * self.grad0 {
            Some(format!(
                "gradient {grad_v_inf:.4e} exceeds {} x initial {:.4e}",
                self.factor, self.grad0
            ))
        } else if tail > self.tail_max {
            Some(format!(
                "spectral tail fraction {tail:.3e} exceeds {:.1e}",
                self.tail_max
            ))
        } else {
            None
        }
    }
}

struct Compressible<'a> {
    grid: &'a Grid,
    nonlinear: bool,
}

impl Compressible<'_> {
    /// Tendency of the filtered variables and monitors of the input.
    fn eval(&self, u: &FilteredState) -> (FilteredState, Monitors) {
        let (v, c) = u.to_parts();
        let (t, mon) = compressible_terms(self.grid, &v, &c, u.gamma_bar, self.nonlinear);
        let tendency = match t {
            Some((dv, dc)) => FilteredState::from_parts(
                u.grid(),
                [&dv[0], &dv[1], &dv[2]],
                &dc,
                u.eps,
                u.gamma_bar,
            ),
            None => u.zeros_like(),
        };
        (tendency, mon)
    }
}

fn qv_inf(fs: &FilteredState) -> f64 {
    let q = fs.compressible();
    let vals = inverse_many(
        fs.grid(),
        &[q.comp(0).coeffs(), q.comp(1).coeffs(), q.comp(2).coeffs()],
    );
    (0..fs.grid().len())
        .map(|x| (vals[0][x].powi(2) + vals[1][x].powi(2) + vals[2][x].powi(2)).sqrt())
        .fold(0.0, f64::max)
}

fn check_finite(dt: f64, mon: &Monitors) -> Result<()> {
    if dt.is_finite() && mon.energy.is_finite() && mon.grad_v_inf.is_finite() {
        Ok(())
    } else {
        Err(Error::Numerical(format!(
            "non-finite state at t = {}",
            mon.t
        )))
    }
}

/// One integrating-factor RK4 step of the compressible system.
///
/// The stiff acoustic part is carried exactly by [`acoustic_propagate`];
/// the quadratic terms are advanced by classical RK4 in the variables
/// `e^{-tL} U`, with phases evaluated at the stage times. The step is
/// `min(cfl·h/(‖v‖∞ + γ̄‖c‖∞ + 1e-12), dt_eps_factor·ε, dt_limit)` unless a
/// fixed step is set.
pub fn step_compressible(
    state: &State,
    ctrl: &StepControl,
    dt_limit: f64,
) -> Result<(State, StepInfo)> {
    let grid = state.grid();
    let sys = Compressible {
        grid,
        nonlinear: ctrl.nonlinear,
    };
    let u0 = FilteredState::from_state(state);
    let (k1, mut mon) = sys.eval(&u0);
    mon.t = state.t;
    mon.qv_inf = qv_inf(&u0);
    let dt = match ctrl.fixed_dt {
        Some(dt) => dt,
        None => {
            let speed = mon.v_inf + state.gamma_bar * mon.c_inf + 1e-12;
            (ctrl.cfl * grid.h() / speed).min(ctrl.dt_eps_factor * state.eps)
        }
    }
    .min(dt_limit);
    check_finite(dt, &mon)?;
    if !(dt > 0.0) {
        return Err(Error::Precondition(format!(
            "step size {dt} is not positive"
        )));
    }

    let half = |x: &FilteredState| acoustic_propagate(x, 0.5 * dt);
    let full = |x: &FilteredState| acoustic_propagate(x, dt);
    let u1 = if ctrl.nonlinear {
        let e_half_u0 = half(&u0);
        let u2 = half(&u0.axpy(0.5 * dt, &k1));
        let (k2, _) = sys.eval(&u2);
        let u3 = e_half_u0.axpy(0.5 * dt, &k2);
        let (k3, _) = sys.eval(&u3);
        let e_full_u0 = full(&u0);
        let u4 = e_full_u0.axpy(dt, &half(&k3));
        let (k4, _) = sys.eval(&u4);
        let mid = half(&k2.axpy(1.0, &k3));
        e_full_u0
            .axpy(dt / 6.0, &full(&k1))
            .axpy(dt / 3.0, &mid)
            .axpy(dt / 6.0, &k4)
    } else {
        full(&u0)
    };
    let mut next = u1.to_state();
    next.t = state.t + dt;
    if !next.is_finite() {
        return Err(Error::Numerical(format!(
            "non-finite state after step at t = {}",
            state.t
        )));
    }
    let tail = tail_fraction(
        grid,
        &[
            next.v.comp(0).coeffs(),
            next.v.comp(1).coeffs(),
            next.v.comp(2).coeffs(),
            next.c.coeffs(),
        ],
    );
    Ok((
        next,
        StepInfo {
            dt,
            monitors: mon,
            tail_fraction: tail,
        },
    ))
}

/// Monitors of a state without stepping.
pub fn compressible_monitors(state: &State) -> Monitors {
    let u = FilteredState::from_state(state);
    let (_, mut mon) = Compressible {
        grid: state.grid(),
        nonlinear: false,
    }
    .eval(&u);
    mon.t = state.t;
    mon.qv_inf = qv_inf(&u);
    mon
}

fn coeffs_of(v: &VecField) -> Coeffs3 {
    [
        v.comp(0).coeffs().to_vec(),
        v.comp(1).coeffs().to_vec(),
        v.comp(2).coeffs().to_vec(),
    ]
}

fn field_of(grid: &std::sync::Arc<Grid>, v: Coeffs3) -> VecField {
    let [a, b, c] = v;
    VecField::new(
        SpectralField::from_coeffs(grid, a),
        SpectralField::from_coeffs(grid, b),
        SpectralField::from_coeffs(grid, c),
    )
    .expect("components share a grid")
}

fn lin(a: &Coeffs3, s: f64, b: &Coeffs3) -> Coeffs3 {
    let f = |x: &[Complex64], y: &[Complex64]| x.iter().zip(y).map(|(&p, &q)| p + q * s).collect();
    [f(&a[0], &b[0]), f(&a[1], &b[1]), f(&a[2], &b[2])]
}

/// One classical RK4 step of incompressible Euler, `∂_t v = -P[(v·∇)v]`,
/// re-projecting every stage. Returns the new velocity and step info; the
/// step is `cfl·h/‖v‖∞` unless fixed, clipped to `dt_limit`.
pub fn step_incompressible(
    v: &VecField,
    t: f64,
    ctrl: &StepControl,
    dt_limit: f64,
) -> Result<(VecField, StepInfo)> {
    let grid = v.grid();
    let mut u0 = coeffs_of(v);
    for a in &mut u0 {
        grid.dealias(a);
    }
    let (k1, mut mon) = incompressible_terms(grid, &u0);
    mon.t = t;
    if mon.div_inf > 1e-10 {
        return Err(Error::Precondition(format!(
            "velocity is not divergence free ({:.2e})",
            mon.div_inf
        )));
    }
    project(grid, &mut u0);
    let dt = ctrl
        .fixed_dt
        .unwrap_or(ctrl.cfl * grid.h() / (mon.v_inf + 1e-12))
        .min(dt_limit);
    check_finite(dt, &mon)?;
    if !(dt > 0.0) {
        return Err(Error::Precondition(format!(
            "step size {dt} is not positive"
        )));
    }
    let stage = |u: Coeffs3| {
        let mut u = u;
        project(grid, &mut u);
        incompressible_terms(grid, &u).0
    };
    let k2 = stage(lin(&u0, 0.5 * dt, &k1));
    let k3 = stage(lin(&u0, 0.5 * dt, &k2));
    let k4 = stage(lin(&u0, dt, &k3));
    let mut u1 = lin(&u0, dt / 6.0, &k1);
    u1 = lin(&u1, dt / 3.0, &k2);
    u1 = lin(&u1, dt / 3.0, &k3);
    u1 = lin(&u1, dt / 6.0, &k4);
    project(grid, &mut u1);
    let tail = tail_fraction(grid, &[&u1[0], &u1[1], &u1[2]]);
    let next = field_of(grid, u1);
    if next.comps().iter().any(|f| {
        f.coeffs()
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
    }) {
        return Err(Error::Numerical(format!(
            "non-finite velocity after step at t = {t}"
        )));
    }
    Ok((
        next,
        StepInfo {
            dt,
            monitors: mon,
            tail_fraction: tail,
        },
    ))
}

/// Monitors of a divergence-free velocity without stepping.
pub fn incompressible_monitors(v: &VecField, t: f64) -> Monitors {
    let (_, mut mon) = incompressible_terms(v.grid(), &coeffs_of(v));
    mon.t = t;
    mon
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{curl, div, leray};

    fn smooth_state(n: usize, eps: f64) -> State {
        let g = Grid::new(n).unwrap();
        let v = VecField::from_centered_fn(&g, |[x, y, z]| {
            let e = (-(x * x + y * y + z * z) / 0.8).exp();
            [-y * e + 0.1 * z.sin(), x * e, 0.2 * x * e]
        });
        let c = SpectralField::from_centered_fn(&g, |[x, y, z]| {
            0.3 * (-(x * x + y * y + z * z) / 0.6).exp()
        });
        State::new(&v, &c, eps, 1.4).unwrap()
    }

    fn run_to(state: &State, ctrl: &StepControl, t_end: f64) -> State {
        let mut s = state.clone();
        while s.t < t_end - 1e-14 {
            let (next, _) = step_compressible(&s, ctrl, t_end - s.t).unwrap();
            s = next;
        }
        s
    }

    #[test]
    fn zero_data_stay_zero() {
        let g = Grid::new(8).unwrap();
        let s = State::new(&VecField::zeros(&g), &SpectralField::zeros(&g), 0.1, 1.0).unwrap();
        let (next, info) = step_compressible(&s, &StepControl::default(), 1.0).unwrap();
        assert_eq!(next.energy(), 0.0);
        assert!((info.dt - 0.05).abs() < 1e-15);
    }

    #[test]
    fn constant_sound_speed_is_stationary() {
        let g = Grid::new(8).unwrap();
        let s = State::new(
            &VecField::zeros(&g),
            &SpectralField::constant(&g, 0.9),
            0.2,
            1.0,
        )
        .unwrap();
        let out = run_to(&s, &StepControl::default(), 0.5);
        assert!((out.c_mean - 0.9).abs() < 1e-12);
        assert!(out.v.linf_norm() < 1e-12 && out.c.linf_norm() < 1e-12);
    }

    #[test]
    fn linear_mode_is_exact_for_any_step() {
        let s = smooth_state(16, 0.05);
        let ctrl = StepControl {
            nonlinear: false,
            fixed_dt: Some(0.37),
            ..StepControl::default()
        };
        let coarse = run_to(&s, &ctrl, 1.11);
        let exact = acoustic_propagate(&FilteredState::from_state(&s), 1.11).to_state();
        assert!(coarse.v.max_coeff_diff(&exact.v) < 1e-14);
    }

    #[test]
    fn fourth_order_self_refinement() {
        let s = smooth_state(16, 0.5);
        let t_end = 0.1;
        let at = |dt: f64| {
            let ctrl = StepControl {
                fixed_dt: Some(dt),
                ..StepControl::default()
            };
            run_to(&s, &ctrl, t_end)
        };
        let reference = at(0.1 / 64.0);
        let err = |x: &State| x.v.max_coeff_diff(&reference.v);
        let e1 = err(&at(0.05));
        let e2 = err(&at(0.025));
        let e3 = err(&at(0.0125));
        assert!(e1 / e2 > 12.0 && e2 / e3 > 12.0, "{e1} {e2} {e3}");
    }

    #[test]
    fn shear_flow_is_steady() {
        let g = Grid::new(16).unwrap();
        let v = VecField::new(
            SpectralField::from_fn(&g, |x| x[2].sin()),
            SpectralField::zeros(&g),
            SpectralField::zeros(&g),
        )
        .unwrap();
        let (next, info) = step_incompressible(&v, 0.0, &StepControl::default(), 0.3).unwrap();
        assert!(next.max_coeff_diff(&v) < 1e-12);
        assert!((info.dt - 0.3f64.min(0.4 * g.h())).abs() < 1e-12);
    }

    #[test]
    fn incompressible_step_keeps_divergence_and_energy() {
        let s = smooth_state(16, 1.0);
        let v = leray(&s.v);
        let e0 = v.l2_norm();
        let mut u = v.clone();
        let mut t = 0.0;
        let ctrl = StepControl {
            cfl: 0.1,
            ..StepControl::default()
        };
        while t < 0.3 {
            let (next, info) = step_incompressible(&u, t, &ctrl, 0.3 - t + 1e-15).unwrap();
            u = next;
            t += info.dt;
        }
        assert!(div(&u).linf_norm() < 1e-10);
        assert!((u.l2_norm() - e0).abs() < 1e-8 * e0);
        assert!(curl(&u).l2_norm() > 0.0);
    }

    #[test]
    fn incompressible_rejects_compressible_input() {
        let g = Grid::new(8).unwrap();
        let v = VecField::new(
            SpectralField::from_fn(&g, |x| x[0].sin()),
            SpectralField::zeros(&g),
            SpectralField::zeros(&g),
        )
        .unwrap();
        assert!(matches!(
            step_incompressible(&v, 0.0, &StepControl::default(), 0.1),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn tail_fraction_counts_high_modes() {
        let g = Grid::new(16).unwrap();
        let lo = SpectralField::from_fn(&g, |x| x[0].cos());
        let hi = SpectralField::from_fn(&g, |x| (5.0 * x[1]).cos());
        let f = lo.axpy(1.0, &hi).unwrap();
        assert!((tail_fraction(&g, &[f.coeffs()]) - 0.5).abs() < 1e-14);
    }
}
