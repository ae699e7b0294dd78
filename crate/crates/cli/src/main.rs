use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use lowmach::harness::{self, Config};
use lowmach::littlewood_paley::DyadicFilterBank;
use lowmach::spectral::checkpoint::Checkpoint;
use lowmach::spectral::VecField;

#[derive(Parser)]
#[command(
    name = "lowmach",
    version,
    about = "Low Mach number laboratory for axisymmetric Euler flows"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single Mach number.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Mach number; defaults to the first entry of `eps_list`.
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run every Mach number of the configuration, fit slopes and check trends.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Besov, Lebesgue and Lorentz norms of a checkpoint, as CSV.
    Norms {
        checkpoint: PathBuf,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Axis mask radius for ζ; defaults to two grid spacings.
        #[arg(long)]
        r_min: Option<f64>,
    },
    /// Property-check suite.
    Check {
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the results as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute aggregates and fits from the CSV files under a sweep directory.
    Report {
        #[arg(long)]
        out: PathBuf,
        /// Configuration of the sweep, for its final time and metric list.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

/// Failure carrying its exit status.
#[derive(Debug)]
struct Failed(u8);

impl std::fmt::Display for Failed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "checks failed")
    }
}

impl std::error::Error for Failed {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(Failed(code)) = err.downcast_ref::<Failed>() {
        return *code;
    }
    match err.downcast_ref::<lowmach::Error>() {
        Some(lowmach::Error::Numerical(_)) => 3,
        _ => 2,
    }
}

fn load_config(path: &Path, seed: Option<u64>) -> anyhow::Result<Config> {
    let mut cfg = Config::load(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, serde_json::to_string_pretty(value)?)
        .with_context(|| format!("writing {}", path.display()))
}

fn run(
    config: &Path,
    eps: Option<f64>,
    out: Option<PathBuf>,
    seed: Option<u64>,
) -> anyhow::Result<()> {
    let cfg = load_config(config, seed)?;
    let eps = eps.unwrap_or(cfg.eps_list[0]);
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(lowmach::Error::Config(format!("--eps {eps} is outside (0, 1]")).into());
    }
    let out = out.unwrap_or_else(|| cfg.output_dir.clone());
    let reference = if cfg.reference && cfg.nonlinear {
        Some(harness::reference_run(&cfg, Some(&out))?.1)
    } else {
        None
    };
    let report = harness::single_run(&cfg, eps, Some(&out), reference.as_ref())?;
    write_json(
        &out.join(harness::run_dir_name(eps)).join("report.json"),
        &report,
    )?;
    println!(
        "eps={eps} {:?} div_L1_Linf={:.6e} V_eps={:.6e}",
        report.status, report.aggregates.div_l1_linf, report.aggregates.v_eps
    );
    Ok(())
}

fn sweep(
    config: &Path,
    out: Option<PathBuf>,
    threads: usize,
    seed: Option<u64>,
) -> anyhow::Result<()> {
    let cfg = load_config(config, seed)?;
    let out = out.unwrap_or_else(|| cfg.output_dir.clone());
    let summary = harness::sweep(&cfg, threads, Some(&out))?;
    for f in &summary.fits {
        println!("fit {:<16} slope {:>8.4} r2 {:.4}", f.metric, f.slope, f.r2);
    }
    for e in &summary.fit_errors {
        println!("fit error: {e}");
    }
    for a in &summary.assertions {
        println!(
            "{} {}: {}",
            if a.pass { "PASS" } else { "FAIL" },
            a.name,
            a.detail
        );
    }
    if !summary.pass {
        return Err(Failed(2).into());
    }
    Ok(())
}

fn norms(checkpoint: &Path, out: Option<PathBuf>, r_min: Option<f64>) -> anyhow::Result<()> {
    let cp = Checkpoint::load(checkpoint)?;
    let [v0, v1, v2, c]: [_; 4] = cp.fields.try_into().map_err(|f: Vec<_>| {
        lowmach::Error::Format(format!(
            "expected 4 fields (v1, v2, v3, c), found {}",
            f.len()
        ))
    })?;
    let grid = v0.grid().clone();
    let v = VecField::new(v0, v1, v2)?;
    let r_min = r_min.unwrap_or(2.0 * grid.h());
    let rows =
        lowmach::diagnostics::norm_table(&DyadicFilterBank::new(&grid), cp.time, &v, &c, r_min)?;
    let sink: Box<dyn std::io::Write> = match &out {
        Some(p) => {
            Box::new(std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?)
        }
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn check(n: usize, seed: u64, out: Option<PathBuf>) -> anyhow::Result<()> {
    let results = harness::run_checks(n, seed)?;
    for r in &results {
        println!(
            "{} {:<11} {:<40} {:>12.4e} <= {:.1e}",
            if r.pass { "PASS" } else { "FAIL" },
            r.suite,
            r.name,
            r.value,
            r.bound
        );
    }
    if let Some(p) = out {
        write_json(&p, &results)?;
    }
    if results.iter().any(|r| !r.pass) {
        return Err(Failed(2).into());
    }
    Ok(())
}

fn report(out: &Path, config: Option<PathBuf>) -> anyhow::Result<()> {
    let cfg = config.map(|p| Config::load(&p)).transpose()?;
    let metrics: Vec<String> = match &cfg {
        Some(c) => c.metrics(),
        None => [
            "div_L1_Linf",
            "gradc_L1_Linf",
            "qv_L1_Linf",
            "qv_L4_Linf",
            "V_eps",
            "pv_err_sup",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
    };
    let rep = harness::report_from_dir(out, &metrics, cfg.as_ref().map(|c| c.t_final))?;
    write_json(&out.join("report.json"), &rep)?;
    for f in &rep.fits {
        println!("fit {:<16} slope {:>8.4} r2 {:.4}", f.metric, f.slope, f.r2);
    }
    if rep.runs.is_empty() {
        bail!("no runs found");
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Run {
            config,
            eps,
            out,
            seed,
        } => run(&config, eps, out, seed),
        Command::Sweep {
            config,
            out,
            threads,
            seed,
        } => sweep(&config, out, threads, seed),
        Command::Norms {
            checkpoint,
            out,
            r_min,
        } => norms(&checkpoint, out, r_min),
        Command::Check { n, seed, out } => check(n, seed, out),
        Command::Report { out, config } => report(&out, config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = exit_code(&e);
            if !e.is::<Failed>() {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(code)
        }
    }
}
