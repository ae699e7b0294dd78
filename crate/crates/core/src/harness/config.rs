use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::axisym::AxisymRecipe;
use crate::error::{Error, Result};
use crate::solver::{RunOptions, StepControl};
use crate::spectral::Grid;

fn default_gamma_bar() -> f64 {
    0.5
}
fn default_cfl() -> f64 {
    StepControl::default().cfl
}
fn default_dt_eps_factor() -> f64 {
    StepControl::default().dt_eps_factor
}
fn default_blowup_factor() -> f64 {
    StepControl::default().blowup_factor
}
fn default_tail_fraction_max() -> f64 {
    StepControl::default().tail_fraction_max
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}
fn yes() -> bool {
    true
}

/// Run and sweep configuration, read from TOML.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub n: usize,
    pub eps_list: Vec<f64>,
    #[serde(default = "default_gamma_bar")]
    pub gamma_bar: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default = "default_dt_eps_factor")]
    pub dt_eps_factor: f64,
    #[serde(rename = "T_final")]
    pub t_final: f64,
    pub recipe: AxisymRecipe,
    pub sample_dt: f64,
    #[serde(default)]
    pub checkpoint_dt: Option<f64>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_blowup_factor")]
    pub blowup_factor: f64,
    #[serde(default = "default_tail_fraction_max")]
    pub tail_fraction_max: f64,
    /// `false` switches the quadratic terms off (free acoustic evolution).
    #[serde(default = "yes")]
    pub nonlinear: bool,
    /// Run the incompressible reference and log `‖Pv − v_ref‖_{L²}`.
    #[serde(default = "yes")]
    pub reference: bool,
    /// Axis mask radius for `ζ`; defaults to two grid spacings.
    #[serde(default)]
    pub r_min: Option<f64>,
    /// Generic-angle rotation residual at every sample.
    #[serde(default)]
    pub full_geometry: bool,
    /// Aggregates to fit against `ε`; empty selects a default list.
    #[serde(default)]
    pub metrics: Vec<String>,
}

pub const NONLINEAR_METRICS: [&str; 6] = [
    "div_L1_Linf",
    "pv_err_sup",
    "gradc_L1_Linf",
    "qv_L1_Linf",
    "qv_L4_Linf",
    "V_eps",
];
pub const LINEAR_METRICS: [&str; 3] = ["gamma_lin", "gamma_lin_bound", "div_L1_Linf"];

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let grid = Grid::new(self.n)?;
        if self.eps_list.is_empty() {
            return Err(Error::Config("eps_list is empty".into()));
        }
        for (i, &e) in self.eps_list.iter().enumerate() {
            if !(e > 0.0 && e <= 1.0) {
                return Err(Error::Config(format!(
                    "eps_list[{i}] = {e} is outside (0, 1]"
                )));
            }
            if self.eps_list[..i].contains(&e) {
                return Err(Error::Config(format!("eps_list repeats {e}")));
            }
        }
        if !(self.gamma_bar > 0.0) {
            return Err(Error::Config(format!(
                "gamma_bar must be positive, got {}",
                self.gamma_bar
            )));
        }
        for m in &self.metrics {
            if !NONLINEAR_METRICS.contains(&m.as_str()) && !LINEAR_METRICS.contains(&m.as_str()) {
                return Err(Error::Config(format!("unknown metric {m}")));
            }
        }
        self.recipe.check_support(&grid)?;
        self.run_options(None).validate()
    }

    pub fn step_control(&self) -> StepControl {
        StepControl {
            cfl: self.cfl,
            dt_eps_factor: self.dt_eps_factor,
            blowup_factor: self.blowup_factor,
            tail_fraction_max: self.tail_fraction_max,
            fixed_dt: None,
            nonlinear: self.nonlinear,
        }
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
            .unwrap_or(2.0 * 2.0 * std::f64::consts::PI / self.n as f64)
    }

    pub fn run_options(&self, out_dir: Option<PathBuf>) -> RunOptions {
        RunOptions {
            ctrl: self.step_control(),
            t_final: self.t_final,
            sample_dt: self.sample_dt,
            checkpoint_dt: self.checkpoint_dt,
            r_min: self.r_min(),
            seed: self.seed,
            full_geometry: self.full_geometry,
            out_dir,
        }
    }

    pub fn metrics(&self) -> Vec<String> {
        if !self.metrics.is_empty() {
            return self.metrics.clone();
        }
        let list: &[&str] = if self.nonlinear {
            &NONLINEAR_METRICS
        } else {
            &LINEAR_METRICS
        };
        list.iter()
            .filter(|m| self.reference || **m != "pv_err_sup")
            .map(|m| m.to_string())
            .collect()
    }
}

/// Directory name of the run at `eps`.
pub fn run_dir_name(eps: f64) -> String {
    format!("eps_{eps}")
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
n = 16
eps_list = [0.5, 0.25, 0.125]
T_final = 0.1
sample_dt = 0.05

[recipe]
profile = "gaussian"
support_tol = 1.0
"#;

    #[test]
    fn parses_with_defaults() {
        let c = Config::from_toml(BASE).unwrap();
        assert_eq!(c.gamma_bar, 0.5);
        assert_eq!(c.cfl, 0.4);
        assert!(c.nonlinear && c.reference);
        assert_eq!(c.metrics().len(), NONLINEAR_METRICS.len());
        assert_eq!(run_dir_name(0.125), "eps_0.125");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(Config::from_toml("n = 16"), Err(Error::Config(_))));
        let dup = BASE.replace("[0.5, 0.25, 0.125]", "[0.5, 0.5, 0.25]");
        assert!(matches!(Config::from_toml(&dup), Err(Error::Config(_))));
        let unknown = BASE.replace("n = 16", "n = 16\nspeed = 3");
        assert!(Config::from_toml(&unknown).is_err());
        let metric = BASE.replace("n = 16", "n = 16\nmetrics = [\"nope\"]");
        assert!(Config::from_toml(&metric).is_err());
    }
}
