use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::linear::LinearDecay;
use super::rhs::Monitors;
use super::state::{FilteredState, State};
use super::step::{
    compressible_monitors, incompressible_monitors, step_compressible, step_incompressible,
    BlowupProxy, StepControl, StepInfo,
};
use crate::diagnostics::{
    energy_ineq_check, geometry_residuals, lipschitz_sample, norm_table, EnergyCheck, EnergySample,
    GeometryResiduals, Zeta,
};
use crate::error::{Error, Result};
use crate::littlewood_paley::{DyadicFilterBank, NormRow};
use crate::spectral::checkpoint::Checkpoint;
use crate::spectral::{curl, helmholtz, leray, SpectralField, VecField};

/// Settings shared by compressible and incompressible runs.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub ctrl: StepControl,
    pub t_final: f64,
    pub sample_dt: f64,
    pub checkpoint_dt: Option<f64>,
    /// Axis mask radius for `ζ`.
    pub r_min: f64,
    pub seed: u64,
    /// Generic-angle rotation residual at every sample instead of only the
    /// first and last.
    pub full_geometry: bool,
    pub out_dir: Option<PathBuf>,
}

impl RunOptions {
    pub fn new(t_final: f64, sample_dt: f64, r_min: f64) -> Self {
        Self {
            ctrl: StepControl::default(),
            t_final,
            sample_dt,
            checkpoint_dt: None,
            r_min,
            seed: 0,
            full_geometry: false,
            out_dir: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.ctrl.validate()?;
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::Config(format!(
                "T_final must be nonnegative, got {}",
                self.t_final
            )));
        }
        if !(self.sample_dt > 0.0) {
            return Err(Error::Config(format!(
                "sample_dt must be positive, got {}",
                self.sample_dt
            )));
        }
        if let Some(c) = self.checkpoint_dt {
            if !(c > 0.0) {
                return Err(Error::Config(format!(
                    "checkpoint_dt must be positive, got {c}"
                )));
            }
        }
        if !(self.r_min >= 0.0) {
            return Err(Error::Config(format!(
                "axis mask radius must be nonnegative, got {}",
                self.r_min
            )));
        }
        Ok(())
    }
}

/// `0, dt, 2dt, …` strictly below `t_final`, then `t_final`.
pub fn event_times(t_final: f64, dt: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut k = 0u64;
    loop {
        let t = k as f64 * dt;
        if t >= t_final * (1.0 - 1e-12) {
            break;
        }
        out.push(t);
        k += 1;
    }
    out.push(t_final);
    out
}

fn same_time(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// One accepted step (or the final state, with `dt = 0`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRow {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub energy: f64,
    pub v_inf: f64,
    pub c_inf: f64,
    pub c_fluct_inf: f64,
    pub grad_v_inf: f64,
    pub grad_c_inf: f64,
    pub div_inf: f64,
    pub qv_inf: f64,
    pub tail_fraction: f64,
}

impl StepRow {
    fn new(step: usize, dt: f64, m: &Monitors, tail_fraction: f64) -> Self {
        Self {
            step,
            t: m.t,
            dt,
            energy: m.energy,
            v_inf: m.v_inf,
            c_inf: m.c_inf,
            c_fluct_inf: m.c_fluct_inf,
            grad_v_inf: m.grad_v_inf,
            grad_c_inf: m.grad_c_inf,
            div_inf: m.div_inf,
            qv_inf: m.qv_inf,
            tail_fraction,
        }
    }
}

/// Diagnostics at a sample time. Maxima are taken on the oversampled grid;
/// `V_eps` and `div_int` are the trapezoid integrals of the step monitors up
/// to `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub t: f64,
    pub energy: f64,
    pub grad_v_inf: f64,
    pub grad_c_inf: f64,
    #[serde(rename = "V_eps")]
    pub v_eps: f64,
    pub div_inf: f64,
    pub zeta_inf: f64,
    #[serde(rename = "zeta_L3_1")]
    pub zeta_l3_1: f64,
    pub omega_inf: f64,
    #[serde(rename = "omega_B0")]
    pub omega_b0: f64,
    pub swirl: f64,
    pub axisym_res: f64,
    pub qv_inf: f64,
    pub c_fluct_inf: f64,
    #[serde(rename = "div_B0")]
    pub div_b0: f64,
    pub omega_cross: f64,
    pub zeta_grid_max: f64,
    #[serde(rename = "zeta_L2")]
    pub zeta_l2: f64,
    #[serde(rename = "zeta_L3")]
    pub zeta_l3: f64,
    pub div_int: f64,
    pub log_ratio: f64,
    pub pv_err: Option<f64>,
}

/// Time aggregates, recomputable from the step series alone (trapezoid rule
/// over consecutive rows) plus the sampled `Pv` errors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub t_end: f64,
    #[serde(rename = "div_L1_Linf")]
    pub div_l1_linf: f64,
    #[serde(rename = "gradc_L1_Linf")]
    pub gradc_l1_linf: f64,
    #[serde(rename = "qv_L1_Linf")]
    pub qv_l1_linf: f64,
    #[serde(rename = "qv_L4_Linf")]
    pub qv_l4_linf: f64,
    #[serde(rename = "V_eps")]
    pub v_eps: f64,
    pub pv_err_sup: Option<f64>,
    #[serde(rename = "T_proxy")]
    pub t_proxy: Option<f64>,
}

fn trapezoid(steps: &[StepRow], f: impl Fn(&StepRow) -> f64) -> Vec<f64> {
    let mut acc = Vec::with_capacity(steps.len());
    let mut total = 0.0;
    for (i, row) in steps.iter().enumerate() {
        if i > 0 {
            let prev = &steps[i - 1];
            total += 0.5 * (row.t - prev.t) * (f(prev) + f(row));
        }
        acc.push(total);
    }
    acc
}

impl Aggregates {
    pub fn from_series(steps: &[StepRow], samples: &[SampleRow], t_proxy: Option<f64>) -> Self {
        let last = |v: Vec<f64>| v.last().copied().unwrap_or(0.0);
        let pv = samples
            .iter()
            .filter_map(|s| s.pv_err)
            .fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))));
        Self {
            t_end: steps.last().map_or(0.0, |r| r.t),
            div_l1_linf: last(trapezoid(steps, |r| r.div_inf)),
            gradc_l1_linf: last(trapezoid(steps, |r| r.grad_c_inf)),
            qv_l1_linf: last(trapezoid(steps, |r| r.qv_inf)),
            qv_l4_linf: last(trapezoid(steps, |r| r.qv_inf.powi(4))).powf(0.25),
            v_eps: last(trapezoid(steps, |r| r.grad_v_inf + r.grad_c_inf)),
            pv_err_sup: pv,
            t_proxy,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    LifespanReached { t_proxy: f64, reason: String },
}

/// Worst ratio `‖ζ(t)‖_p / (‖ζ(0)‖_p e^{(1-1/p)∫₀ᵗ‖div v‖_{L^∞}})` over the
/// samples, for `p = 2, 3, ∞`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ZetaEnvelope {
    pub p2: f64,
    pub p3: f64,
    pub pinf: f64,
}

impl ZetaEnvelope {
    pub fn max(&self) -> f64 {
        self.p2.max(self.p3).max(self.pinf)
    }

    pub fn from_samples(samples: &[SampleRow]) -> Self {
        let Some(first) = samples.first() else {
            return Self::default();
        };
        let ratio = |now: f64, start: f64, p_inv: f64, div_int: f64| {
            if start == 0.0 {
                if now == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                now / (start * ((1.0 - p_inv) * div_int).exp())
            }
        };
        let mut env = Self::default();
        for s in samples {
            env.p2 = env.p2.max(ratio(s.zeta_l2, first.zeta_l2, 0.5, s.div_int));
            env.p3 = env
                .p3
                .max(ratio(s.zeta_l3, first.zeta_l3, 1.0 / 3.0, s.div_int));
            env.pinf = env
                .pinf
                .max(ratio(s.zeta_inf, first.zeta_inf, 0.0, s.div_int));
        }
        env
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub kind: String,
    pub eps: Option<f64>,
    pub gamma_bar: Option<f64>,
    pub n: usize,
    #[serde(flatten)]
    pub status: RunStatus,
    #[serde(skip)]
    pub steps: Vec<StepRow>,
    #[serde(skip)]
    pub samples: Vec<SampleRow>,
    #[serde(skip)]
    pub norms: Vec<NormRow>,
    pub aggregates: Aggregates,
    pub energy_check: EnergyCheck,
    /// `|E(T) - E(0)| / E(0)`.
    pub energy_drift: f64,
    pub geometry_initial: GeometryResiduals,
    pub geometry_final: GeometryResiduals,
    pub zeta_envelope: ZetaEnvelope,
    /// `max_t |ζ_sup(t) - ζ_sup(0)| / ζ_sup(0)`.
    pub zeta_drift: f64,
    pub log_ratio_max: f64,
    pub linear: Option<LinearDecay>,
}

impl RunReport {
    pub fn completed(&self) -> bool {
        matches!(self.status, RunStatus::Completed)
    }

    /// Writes `steps.csv`, `timeseries.csv` and `norms.csv` into `dir`.
    pub fn write_csv(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        write_rows(&dir.join("steps.csv"), &self.steps)?;
        write_rows(&dir.join("timeseries.csv"), &self.samples)?;
        write_rows(&dir.join("norms.csv"), &self.norms)?;
        Ok(())
    }
}

pub(crate) fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Velocity snapshots of the incompressible reference at its sample times.
#[derive(Clone, Debug, Default)]
pub struct Reference {
    pub times: Vec<f64>,
    pub fields: Vec<VecField>,
}

impl Reference {
    pub fn at(&self, t: f64) -> Option<&VecField> {
        self.times
            .iter()
            .position(|&s| same_time(s, t))
            .map(|i| &self.fields[i])
    }
}

struct Sampler<'a> {
    bank: DyadicFilterBank,
    opts: &'a RunOptions,
    reference: Option<&'a Reference>,
}

impl Sampler<'_> {
    fn sample(
        &self,
        t: f64,
        v: &VecField,
        c: &SpectralField,
        full_geometry: bool,
    ) -> Result<(SampleRow, GeometryResiduals)> {
        let lip = lipschitz_sample(&self.bank, v, c)?;
        let zeta = Zeta::from_omega(curl(v), self.opts.r_min)?;
        let geom = geometry_residuals(v, full_geometry, self.opts.seed);
        let (_, q) = helmholtz(v);
        let pv_err = match self.reference {
            Some(r) => {
                let vr = r.at(t).ok_or_else(|| {
                    Error::Precondition(format!("reference has no sample at t = {t}"))
                })?;
                Some(leray(v).axpy(-1.0, vr)?.l2_norm())
            }
            None => None,
        };
        let row = SampleRow {
            t,
            energy: crate::diagnostics::energy(v, c),
            grad_v_inf: lip.grad_v_inf,
            grad_c_inf: lip.grad_c_inf,
            v_eps: 0.0,
            div_inf: lip.div_inf,
            zeta_inf: zeta.sup(),
            zeta_l3_1: zeta.lorentz_norm(3.0, 1.0)?,
            omega_inf: lip.omega_inf,
            omega_b0: lip.omega_b0,
            swirl: geom.swirl,
            axisym_res: geom.axisym(),
            qv_inf: q.linf_oversampled(),
            c_fluct_inf: c.without_mean().linf_oversampled(),
            div_b0: lip.div_b0,
            omega_cross: geom.omega_cross_etheta,
            zeta_grid_max: zeta.grid_max(),
            zeta_l2: zeta.lp_norm(2.0),
            zeta_l3: zeta.lp_norm(3.0),
            div_int: 0.0,
            log_ratio: lip.log_ratio,
            pv_err,
        };
        Ok((row, geom))
    }

    fn checkpoint(
        &self,
        index: usize,
        t: f64,
        eps: f64,
        v: &VecField,
        c: &SpectralField,
    ) -> Result<Vec<NormRow>> {
        if let Some(dir) = &self.opts.out_dir {
            let dir = dir.join("checkpoints");
            std::fs::create_dir_all(&dir)?;
            let cp = Checkpoint {
                time: t,
                epsilon: eps,
                fields: vec![
                    v.comp(0).clone(),
                    v.comp(1).clone(),
                    v.comp(2).clone(),
                    c.clone(),
                ],
            };
            cp.save(dir.join(format!("ckpt_{index:04}.bin")))?;
        }
        norm_table(&self.bank, t, v, c, self.opts.r_min)
    }
}

/// Merged stop times with flags (sample, checkpoint).
fn stops(opts: &RunOptions) -> Vec<(f64, bool, bool)> {
    let samples = event_times(opts.t_final, opts.sample_dt);
    let ckpts = opts
        .checkpoint_dt
        .map(|d| event_times(opts.t_final, d))
        .unwrap_or_default();
    let mut all: Vec<(f64, bool, bool)> = samples.iter().map(|&t| (t, true, false)).collect();
    for t in ckpts {
        match all.iter_mut().find(|e| same_time(e.0, t)) {
            Some(e) => e.2 = true,
            None => all.push((t, false, true)),
        }
    }
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    all
}

/// Shared driver: `advance(dt_limit)` takes one step from the current
/// state, `fields()` exposes the current velocity and full sound speed.
trait Integrator {
    fn time(&self) -> f64;
    fn set_time(&mut self, t: f64);
    fn advance(&mut self, dt_limit: f64) -> Result<StepInfo>;
    fn monitors(&self) -> Monitors;
    fn fields(&self) -> (VecField, SpectralField);
    fn eps(&self) -> f64;
}

struct CompressibleRun {
    state: State,
    ctrl: StepControl,
}

impl Integrator for CompressibleRun {
    fn time(&self) -> f64 {
        self.state.t
    }
    fn set_time(&mut self, t: f64) {
        self.state.t = t;
    }
    fn advance(&mut self, dt_limit: f64) -> Result<StepInfo> {
        let (next, info) = step_compressible(&self.state, &self.ctrl, dt_limit)?;
        self.state = next;
        Ok(info)
    }
    fn monitors(&self) -> Monitors {
        compressible_monitors(&self.state)
    }
    fn fields(&self) -> (VecField, SpectralField) {
        (self.state.v.clone(), self.state.c_total())
    }
    fn eps(&self) -> f64 {
        self.state.eps
    }
}

struct IncompressibleRun {
    v: VecField,
    t: f64,
    ctrl: StepControl,
}

impl Integrator for IncompressibleRun {
    fn time(&self) -> f64 {
        self.t
    }
    fn set_time(&mut self, t: f64) {
        self.t = t;
    }
    fn advance(&mut self, dt_limit: f64) -> Result<StepInfo> {
        let (next, info) = step_incompressible(&self.v, self.t, &self.ctrl, dt_limit)?;
        self.v = next;
        self.t += info.dt;
        Ok(info)
    }
    fn monitors(&self) -> Monitors {
        incompressible_monitors(&self.v, self.t)
    }
    fn fields(&self) -> (VecField, SpectralField) {
        (self.v.clone(), SpectralField::zeros(self.v.grid()))
    }
    fn eps(&self) -> f64 {
        0.0
    }
}

struct Outcome {
    steps: Vec<StepRow>,
    samples: Vec<SampleRow>,
    norms: Vec<NormRow>,
    status: RunStatus,
    geometry_initial: GeometryResiduals,
    geometry_final: GeometryResiduals,
    snapshots: Reference,
}

fn drive(
    run: &mut dyn Integrator,
    opts: &RunOptions,
    reference: Option<&Reference>,
    keep_snapshots: bool,
) -> Result<Outcome> {
    opts.validate()?;
    let (v0, _) = run.fields();
    let sampler = Sampler {
        bank: DyadicFilterBank::new(v0.grid()),
        opts,
        reference,
    };
    let stops = stops(opts);
    let last_stop = stops.len() - 1;
    let mut steps: Vec<StepRow> = Vec::new();
    let mut samples: Vec<SampleRow> = Vec::new();
    let mut norms: Vec<NormRow> = Vec::new();
    let mut snapshots = Reference::default();
    let mut geometry_initial = GeometryResiduals::default();
    let mut geometry_final = GeometryResiduals::default();
    let mut status = RunStatus::Completed;
    let mut proxy: Option<BlowupProxy> = None;
    let mut ckpt_index = 0usize;
    let mut next_stop = 0usize;

    let mut record = |run: &dyn Integrator,
                      is_sample: bool,
                      is_ckpt: bool,
                      force_full: bool,
                      samples: &mut Vec<SampleRow>,
                      norms: &mut Vec<NormRow>,
                      snapshots: &mut Reference|
     -> Result<Option<GeometryResiduals>> {
        let t = run.time();
        let (v, c) = run.fields();
        let mut geom = None;
        if is_sample {
            let (row, g) = sampler.sample(t, &v, &c, opts.full_geometry || force_full)?;
            samples.push(row);
            geom = Some(g);
            if keep_snapshots {
                snapshots.times.push(t);
                snapshots.fields.push(v.clone());
            }
        }
        if is_ckpt {
            norms.extend(sampler.checkpoint(ckpt_index, t, run.eps(), &v, &c)?);
            ckpt_index += 1;
        }
        Ok(geom)
    };

    loop {
        let t = run.time();
        let mut at_end = false;
        if next_stop <= last_stop && same_time(t, stops[next_stop].0) {
            let (_, is_sample, is_ckpt) = stops[next_stop];
            at_end = next_stop == last_stop;
            let force_full = next_stop == 0 || at_end;
            let g = record(
                run,
                is_sample,
                is_ckpt,
                force_full,
                &mut samples,
                &mut norms,
                &mut snapshots,
            )?;
            if let Some(g) = g {
                if next_stop == 0 {
                    geometry_initial = g;
                }
                geometry_final = g;
            }
            next_stop += 1;
        }
        if at_end {
            break;
        }
        let target = stops[next_stop].0;
        let info = run.advance(target - t)?;
        steps.push(StepRow::new(
            steps.len(),
            info.dt,
            &info.monitors,
            info.tail_fraction,
        ));
        log::debug!(
            "step {} t={:.6} dt={:.3e} grad_v={:.4e} tail={:.2e}",
            steps.len(),
            t,
            info.dt,
            info.monitors.grad_v_inf,
            info.tail_fraction
        );
        if info.dt >= (target - t) * (1.0 - 1e-12) {
            run.set_time(target);
        }
        let p =
            *proxy.get_or_insert_with(|| BlowupProxy::new(&opts.ctrl, info.monitors.grad_v_inf));
        if let Some(reason) = p.check(info.monitors.grad_v_inf, info.tail_fraction) {
            log::warn!("lifespan proxy tripped at t={}: {reason}", run.time());
            status = RunStatus::LifespanReached {
                t_proxy: run.time(),
                reason,
            };
            let g = record(
                run,
                true,
                false,
                true,
                &mut samples,
                &mut norms,
                &mut snapshots,
            )?;
            if let Some(g) = g {
                geometry_final = g;
            }
            break;
        }
    }
    let mut last = run.monitors();
    last.t = run.time();
    let tail = steps.last().map_or(0.0, |r| r.tail_fraction);
    steps.push(StepRow::new(steps.len(), 0.0, &last, tail));

    // integrals up to each sample time
    let v_int = trapezoid(&steps, |r| r.grad_v_inf + r.grad_c_inf);
    let d_int = trapezoid(&steps, |r| r.div_inf);
    for s in &mut samples {
        let i = steps
            .iter()
            .position(|r| same_time(r.t, s.t))
            .ok_or_else(|| Error::Numerical(format!("no step row at sample time {}", s.t)))?;
        s.v_eps = v_int[i];
        s.div_int = d_int[i];
    }
    Ok(Outcome {
        steps,
        samples,
        norms,
        status,
        geometry_initial,
        geometry_final,
        snapshots,
    })
}

fn assemble(
    kind: &str,
    eps: Option<f64>,
    gamma_bar: Option<f64>,
    n: usize,
    out: Outcome,
    linear: Option<LinearDecay>,
) -> RunReport {
    let history: Vec<EnergySample> = out
        .steps
        .iter()
        .map(|r| EnergySample {
            t: r.t,
            energy: r.energy,
            div_inf: r.div_inf,
        })
        .collect();
    let energy_check = energy_ineq_check(&history, gamma_bar.unwrap_or(1.0), 0.1);
    let e0 = out.steps.first().map_or(0.0, |r| r.energy);
    let e1 = out.steps.last().map_or(0.0, |r| r.energy);
    let energy_drift = if e0 > 0.0 { (e1 - e0).abs() / e0 } else { 0.0 };
    let z0 = out.samples.first().map_or(0.0, |s| s.zeta_inf);
    let zeta_drift = if z0 > 0.0 {
        out.samples
            .iter()
            .map(|s| (s.zeta_inf - z0).abs() / z0)
            .fold(0.0, f64::max)
    } else {
        0.0
    };
    let t_proxy = match &out.status {
        RunStatus::LifespanReached { t_proxy, .. } => Some(*t_proxy),
        RunStatus::Completed => None,
    };
    RunReport {
        kind: kind.into(),
        eps,
        gamma_bar,
        n,
        aggregates: Aggregates::from_series(&out.steps, &out.samples, t_proxy),
        zeta_envelope: ZetaEnvelope::from_samples(&out.samples),
        log_ratio_max: out.samples.iter().map(|s| s.log_ratio).fold(0.0, f64::max),
        status: out.status,
        steps: out.steps,
        samples: out.samples,
        norms: out.norms,
        energy_check,
        energy_drift,
        geometry_initial: out.geometry_initial,
        geometry_final: out.geometry_final,
        zeta_drift,
        linear,
    }
}

/// Integrates the compressible system from `initial` to `opts.t_final`,
/// sampling diagnostics and writing outputs when `opts.out_dir` is set. With
/// a reference, `‖Pv − v_ref‖_{L²}` is logged at every sample. Returns the
/// report and the final state.
pub fn run_compressible(
    initial: &State,
    opts: &RunOptions,
    reference: Option<&Reference>,
) -> Result<(RunReport, State)> {
    let mut run = CompressibleRun {
        state: initial.clone(),
        ctrl: opts.ctrl.clone(),
    };
    let out = drive(&mut run, opts, reference, false)?;
    let linear = (!opts.ctrl.nonlinear)
        .then(|| LinearDecay::measure(&FilteredState::from_state(initial), opts.t_final));
    let report = assemble(
        "compressible",
        Some(initial.eps),
        Some(initial.gamma_bar),
        initial.grid().n(),
        out,
        linear,
    );
    if let Some(dir) = &opts.out_dir {
        report.write_csv(dir)?;
    }
    Ok((report, run.state))
}

/// Integrates incompressible Euler from the Leray projection of `v0` and
/// keeps the velocity at every sample time as a reference.
pub fn run_incompressible(v0: &VecField, opts: &RunOptions) -> Result<(RunReport, Reference)> {
    let mut run = IncompressibleRun {
        v: leray(&v0.dealiased()),
        t: 0.0,
        ctrl: opts.ctrl.clone(),
    };
    let n = v0.grid().n();
    let out = drive(&mut run, opts, None, true)?;
    let reference = Reference {
        times: out.snapshots.times.clone(),
        fields: out.snapshots.fields.clone(),
    };
    let report = assemble("incompressible", None, None, n, out, None);
    if let Some(dir) = &opts.out_dir {
        report.write_csv(dir)?;
    }
    Ok((report, reference))
}
