//! Sweeps over `ε`, slope fitting, report assembly and the property-check
//! suite behind the command-line tool.

mod checks;
mod config;
mod fit;
mod report;
mod sweep;

pub use checks::{
    helmholtz_errors, partition_errors, plane_wave_errors, psi_failures, random_sequences,
    random_vector_field, run_checks, zero_mass_profile, CheckResult, HelmholtzErrors,
    PartitionErrors, PlaneWaveErrors,
};
pub use config::{run_dir_name, Config, LINEAR_METRICS, NONLINEAR_METRICS};
pub use fit::{fit_power_law, monotone_decreasing, Fit};
pub use report::{read_rows, report_from_dir, CsvReport, CsvRun};
pub use sweep::{
    aggregate_value, compare_incompressible, initial_data, metric_value, reference_run, single_run,
    summarize, sweep, Assertion, ConvergenceRow, Summary, LINEAR_SLOPE_TOL, MIN_NONLINEAR_SLOPE,
    MONOTONE_TOL,
};
