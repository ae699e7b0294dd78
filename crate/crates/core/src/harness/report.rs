use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::config::run_dir_name;
use super::fit::{fit_power_law, Fit};
use super::sweep::aggregate_value;
use crate::error::{Error, Result};
use crate::solver::{Aggregates, SampleRow, StepRow};

pub fn read_rows<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CsvRun {
    pub eps: f64,
    pub steps: usize,
    pub samples: usize,
    pub aggregates: Aggregates,
}

/// Aggregates recomputed from the CSV files of a run directory, with fits
/// over the runs that reached the final time.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CsvReport {
    pub runs: Vec<CsvRun>,
    pub compared_eps: Vec<f64>,
    pub fits: Vec<Fit>,
    pub fit_errors: Vec<String>,
}

/// Scans `dir` for `eps_<ε>` run directories. Runs whose last step falls
/// short of `t_final` are treated as having reached the lifespan proxy at
/// that time.
pub fn report_from_dir(dir: &Path, metrics: &[String], t_final: Option<f64>) -> Result<CsvReport> {
    let entries = std::fs::read_dir(dir)
        .map_err(|e| Error::Precondition(format!("cannot read {}: {e}", dir.display())))?;
    let mut runs = Vec::new();
    for entry in entries {
        let entry = entry?;
        let name = entry.file_name().to_string_lossy().into_owned();
        let Some(eps) = name
            .strip_prefix("eps_")
            .and_then(|e| e.parse::<f64>().ok())
        else {
            continue;
        };
        if name != run_dir_name(eps) {
            continue;
        }
        let steps: Vec<StepRow> = read_rows(&entry.path().join("steps.csv"))?;
        let samples: Vec<SampleRow> = read_rows(&entry.path().join("timeseries.csv"))?;
        let t_end = steps.last().map_or(0.0, |r| r.t);
        let t_proxy = t_final.filter(|t| t_end < t * (1.0 - 1e-12)).map(|_| t_end);
        runs.push(CsvRun {
            eps,
            steps: steps.len(),
            samples: samples.len(),
            aggregates: Aggregates::from_series(&steps, &samples, t_proxy),
        });
    }
    if runs.is_empty() {
        return Err(Error::Precondition(format!(
            "no eps_* run directories under {}",
            dir.display()
        )));
    }
    runs.sort_by(|a, b| b.eps.total_cmp(&a.eps));
    let compared: Vec<&CsvRun> = runs
        .iter()
        .take_while(|r| r.aggregates.t_proxy.is_none())
        .collect();
    let compared_eps: Vec<f64> = compared.iter().map(|r| r.eps).collect();
    let mut fits = Vec::new();
    let mut fit_errors = Vec::new();
    for m in metrics {
        let values: Option<Vec<f64>> = compared
            .iter()
            .map(|r| aggregate_value(&r.aggregates, m))
            .collect();
        match values {
            None => fit_errors.push(format!("{m}: not recoverable from the CSV files")),
            Some(v) => match fit_power_law(m, &compared_eps, &v) {
                Ok(f) => fits.push(f),
                Err(e) => fit_errors.push(e.to_string()),
            },
        }
    }
    Ok(CsvReport {
        runs,
        compared_eps,
        fits,
        fit_errors,
    })
}
