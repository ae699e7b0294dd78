use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::config::{run_dir_name, Config};
use super::fit::{fit_power_law, monotone_decreasing, Fit};
use crate::axisym::{make_initial_data, InitialData};
use crate::error::{Error, Result};
use crate::solver::{
    run_compressible, run_incompressible, Aggregates, Reference, RunReport, State,
};
use crate::spectral::Grid;

/// Relative increase tolerated between consecutive ε in the monotonicity
/// assertions.
pub const MONOTONE_TOL: f64 = 0.05;
pub const MIN_NONLINEAR_SLOPE: f64 = 0.5;
pub const LINEAR_SLOPE_TOL: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Assertion {
    fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub eps: f64,
    pub pv_err_sup: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub config: Config,
    pub threads: usize,
    pub reference: Option<RunReport>,
    pub runs: Vec<RunReport>,
    /// Largest-first ε values up to the first run that hit the lifespan
    /// proxy; fits and trend assertions use only these.
    pub compared_eps: Vec<f64>,
    pub fits: Vec<Fit>,
    pub fit_errors: Vec<String>,
    pub convergence: Vec<ConvergenceRow>,
    pub assertions: Vec<Assertion>,
    pub pass: bool,
}

impl Summary {
    pub fn fit(&self, metric: &str) -> Option<&Fit> {
        self.fits.iter().find(|f| f.metric == metric)
    }

    pub fn run(&self, eps: f64) -> Option<&RunReport> {
        self.runs.iter().find(|r| r.eps == Some(eps))
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

/// Aggregate named `metric`, when the report carries it.
pub fn metric_value(report: &RunReport, metric: &str) -> Option<f64> {
    match metric {
        "gamma_lin" => report.linear.map(|l| l.measured),
        "gamma_lin_bound" => report.linear.map(|l| l.bound),
        _ => aggregate_value(&report.aggregates, metric),
    }
}

pub fn aggregate_value(a: &Aggregates, metric: &str) -> Option<f64> {
    match metric {
        "div_L1_Linf" => Some(a.div_l1_linf),
        "gradc_L1_Linf" => Some(a.gradc_l1_linf),
        "qv_L1_Linf" => Some(a.qv_l1_linf),
        "qv_L4_Linf" => Some(a.qv_l4_linf),
        "V_eps" => Some(a.v_eps),
        "pv_err_sup" => a.pv_err_sup,
        _ => None,
    }
}

pub fn initial_data(cfg: &Config, eps: f64) -> Result<InitialData> {
    let grid = Grid::new(cfg.n)?;
    make_initial_data(&grid, &cfg.recipe, eps)
}

/// Incompressible run from the Leray projection of the initial velocity.
/// The ill-prepared family shares `Pv₀` across ε, so any member's data
/// serves.
pub fn reference_run(cfg: &Config, out: Option<&Path>) -> Result<(RunReport, Reference)> {
    let data = initial_data(cfg, cfg.eps_list[0])?;
    let dir = out.map(|o| o.join("reference"));
    log::info!("incompressible reference to T={}", cfg.t_final);
    run_incompressible(&data.v, &cfg.run_options(dir))
}

/// One compressible run at `eps`, writing into `out/eps_<ε>` when `out` is
/// set.
pub fn single_run(
    cfg: &Config,
    eps: f64,
    out: Option<&Path>,
    reference: Option<&Reference>,
) -> Result<RunReport> {
    let data = initial_data(cfg, eps)?;
    let state = State::new(&data.v, &data.c, eps, cfg.gamma_bar)?;
    let dir: Option<PathBuf> = out.map(|o| o.join(run_dir_name(eps)));
    log::info!("run eps={eps} started");
    let (report, _) = run_compressible(&state, &cfg.run_options(dir), reference)?;
    log::info!(
        "run eps={eps} finished after {} steps: {:?}",
        report.steps.len() - 1,
        report.status
    );
    Ok(report)
}

/// Table of `sup_t ‖Pv_ε − v_ref‖_{L²}` per run.
pub fn compare_incompressible(runs: &[RunReport]) -> Result<Vec<ConvergenceRow>> {
    runs.iter()
        .map(|r| {
            let eps = r
                .eps
                .ok_or_else(|| Error::Precondition("compressible run without ε".into()))?;
            let pv = r.aggregates.pv_err_sup.ok_or_else(|| {
                Error::Precondition(format!("run at ε = {eps} has no reference comparison"))
            })?;
            Ok(ConvergenceRow {
                eps,
                pv_err_sup: pv,
            })
        })
        .collect()
}

/// Runs the reference (if configured) and every ε on a pool of `threads`
/// workers, then fits and checks the trends.
pub fn sweep(cfg: &Config, threads: usize, out: Option<&Path>) -> Result<Summary> {
    cfg.validate()?;
    let threads = threads.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {threads} workers: {e}")))?;
    let with_reference = cfg.reference && cfg.nonlinear;
    let (reference_report, reference) = if with_reference {
        let (rep, r) = pool.install(|| reference_run(cfg, out))?;
        (Some(rep), Some(r))
    } else {
        (None, None)
    };
    let mut runs: Vec<RunReport> = pool.install(|| {
        cfg.eps_list
            .par_iter()
            .map(|&eps| single_run(cfg, eps, out, reference.as_ref()))
            .collect::<Result<Vec<_>>>()
    })?;
    runs.sort_by(|a, b| b.eps.unwrap_or(0.0).total_cmp(&a.eps.unwrap_or(0.0)));
    let summary = summarize(cfg, threads, reference_report, runs)?;
    if let Some(o) = out {
        summary.write_json(&o.join("summary.json"))?;
    }
    Ok(summary)
}

/// Fits and assertions over runs sorted by decreasing ε. Runs that stopped
/// at the lifespan proxy stay in the summary but are left out of the fits
/// and trends.
pub fn summarize(
    cfg: &Config,
    threads: usize,
    reference: Option<RunReport>,
    runs: Vec<RunReport>,
) -> Result<Summary> {
    let compared: Vec<&RunReport> = runs.iter().filter(|r| r.completed()).collect();
    let compared_eps: Vec<f64> = compared.iter().filter_map(|r| r.eps).collect();
    let mut fits = Vec::new();
    let mut fit_errors = Vec::new();
    for m in cfg.metrics() {
        let values: Option<Vec<f64>> = compared.iter().map(|r| metric_value(r, &m)).collect();
        let Some(values) = values else {
            fit_errors.push(format!("{m}: not recorded by these runs"));
            continue;
        };
        match fit_power_law(&m, &compared_eps, &values) {
            Ok(f) => fits.push(f),
            Err(e) => fit_errors.push(e.to_string()),
        }
    }
    let mut assertions = Vec::new();
    for r in &runs {
        assertions.push(Assertion::new(
            format!("energy inequality at eps={}", r.eps.unwrap_or(0.0)),
            r.energy_check.pass,
            format!(
                "worst ratio {:?} against C_e = {}",
                r.energy_check.worst_ratio, r.energy_check.c_e
            ),
        ));
    }
    let slope_of = |m: &str| fits.iter().find(|f| f.metric == m).map(|f| f.slope);
    let mut trend = |metric: &str, values: Vec<f64>| {
        assertions.push(Assertion::new(
            format!("{metric} decreases with eps"),
            monotone_decreasing(&values, MONOTONE_TOL),
            format!("{values:?}"),
        ));
        let slope = slope_of(metric);
        assertions.push(Assertion::new(
            format!("{metric} slope >= {MIN_NONLINEAR_SLOPE}"),
            slope.is_some_and(|s| s >= MIN_NONLINEAR_SLOPE),
            format!("{slope:?}"),
        ));
    };
    let mut convergence = Vec::new();
    if cfg.nonlinear {
        trend(
            "div_L1_Linf",
            compared.iter().map(|r| r.aggregates.div_l1_linf).collect(),
        );
        if reference.is_some() {
            convergence = compare_incompressible(&runs)?;
            let values: Vec<f64> = convergence
                .iter()
                .filter(|c| compared_eps.contains(&c.eps))
                .map(|c| c.pv_err_sup)
                .collect();
            trend("pv_err_sup", values.clone());
            assertions.push(Assertion::new(
                "pv_err_sup at the largest eps is at most 1",
                values.first().is_some_and(|v| *v <= 1.0),
                format!("{:?}", values.first()),
            ));
        }
    } else {
        for m in ["gamma_lin", "gamma_lin_bound"] {
            let slope = slope_of(m);
            assertions.push(Assertion::new(
                format!("{m} slope within 1 +- {LINEAR_SLOPE_TOL}"),
                slope.is_some_and(|s| (s - 1.0).abs() <= LINEAR_SLOPE_TOL),
                format!("{slope:?}"),
            ));
        }
        for r in &runs {
            let ok = r
                .linear
                .is_some_and(|l| l.measured <= l.bound * (1.0 + 1e-12));
            assertions.push(Assertion::new(
                format!(
                    "gamma_lin below mode-sum bound at eps={}",
                    r.eps.unwrap_or(0.0)
                ),
                ok,
                format!("{:?}", r.linear),
            ));
        }
    }
    let pass = assertions.iter().all(|a| a.pass);
    Ok(Summary {
        config: cfg.clone(),
        threads,
        reference,
        runs,
        compared_eps,
        fits,
        fit_errors,
        convergence,
        assertions,
        pass,
    })
}
