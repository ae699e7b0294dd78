use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_lowmach"));
    c.env("RUST_LOG", "warn");
    c
}

fn quick_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/quick.toml")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_tree(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|x| x == "csv") {
                out.insert(
                    p.strip_prefix(dir).unwrap().to_path_buf(),
                    std::fs::read(&p).unwrap(),
                );
            }
        }
    }
    out
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(code(&run(&["--help"])), 0);
    let o = run(&["sweep", "--bogus"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn missing_config_is_a_validation_failure() {
    let o = run(&["sweep", "--config", "missing.toml"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.toml"));
}

#[test]
fn invalid_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("dup.toml");
    std::fs::write(
        &cfg,
        "n = 16\neps_list = [0.5, 0.5, 0.25]\nT_final = 0.1\n[recipe]\nprofile = \"gaussian\"\n",
    )
    .unwrap();
    let o = run(&["run", "--config", path_str(&cfg)]);
    assert_eq!(code(&o), 2);
    let o = run(&["run", "--config", path_str(&quick_config()), "--eps", "2.0"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn check_passes_at_the_default_resolution() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("checks.json");
    let o = run(&["check", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let results = json(&out);
    let results = results.as_array().unwrap();
    assert_eq!(results.len(), 20);
    assert!(results.iter().all(|r| r["pass"] == Value::Bool(true)));
}

#[test]
fn run_writes_series_and_checkpoints_that_norms_reproduces() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "run",
        "--config",
        path_str(&quick_config()),
        "--eps",
        "0.25",
        "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let run_dir = dir.path().join("eps_0.25");
    for f in ["steps.csv", "timeseries.csv", "norms.csv", "report.json"] {
        assert!(run_dir.join(f).exists(), "{f}");
    }
    assert!(dir.path().join("reference/timeseries.csv").exists());
    let report = json(&run_dir.join("report.json"));
    assert_eq!(report["status"], "completed");
    assert_eq!(report["eps"], 0.25);

    let ckpt = run_dir.join("checkpoints/ckpt_0001.bin");
    let table = dir.path().join("offline.csv");
    let o = run(&["norms", path_str(&ckpt), "--out", path_str(&table)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    type Row = (f64, String, f64, f64, f64, String, f64);
    let read = |p: &Path| -> Vec<Row> {
        csv::Reader::from_path(p)
            .unwrap()
            .deserialize()
            .collect::<Result<_, _>>()
            .unwrap()
    };
    let offline = read(&table);
    let t = offline[0].0;
    let logged: Vec<Row> = read(&run_dir.join("norms.csv"))
        .into_iter()
        .filter(|r| r.0 == t)
        .collect();
    assert!(!offline.is_empty());
    assert_eq!(offline.len(), logged.len());
    for (a, b) in offline.iter().zip(&logged) {
        assert_eq!((&a.1, a.2, a.3, a.4, &a.5), (&b.1, b.2, b.3, b.4, &b.5));
        assert!(
            (a.6 - b.6).abs() <= 1e-10 * b.6.abs().max(1.0),
            "{a:?} vs {b:?}"
        );
    }
}

#[test]
fn norms_rejects_a_corrupt_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.bin");
    std::fs::write(&bad, b"not a checkpoint").unwrap();
    assert_eq!(code(&run(&["norms", path_str(&bad)])), 2);
}

#[test]
fn sweep_is_deterministic_and_report_recomputes_aggregates() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let o = run(&[
            "sweep",
            "--config",
            path_str(&quick_config()),
            "--out",
            path_str(d.path()),
            "--threads",
            "2",
        ]);
        // the coarse smoke configuration does not meet the slope assertions
        assert!(
            matches!(code(&o), 0 | 2),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert!(d.path().join("summary.json").exists());
    }
    let a = csv_tree(dirs[0].path());
    assert_eq!(a.len(), 12);
    assert_eq!(a, csv_tree(dirs[1].path()));

    let out = dirs[0].path();
    let o = run(&[
        "report",
        "--out",
        path_str(out),
        "--config",
        path_str(&quick_config()),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary = json(&out.join("summary.json"));
    let report = json(&out.join("report.json"));
    let runs = summary["runs"].as_array().unwrap();
    let recomputed = report["runs"].as_array().unwrap();
    assert_eq!(runs.len(), recomputed.len());
    for run in runs {
        let other = recomputed.iter().find(|r| r["eps"] == run["eps"]).unwrap();
        let (x, y) = (
            run["aggregates"].as_object().unwrap(),
            other["aggregates"].as_object().unwrap(),
        );
        for (k, v) in x {
            match (v.as_f64(), y[k].as_f64()) {
                (Some(p), Some(q)) => {
                    assert!((p - q).abs() <= 1e-10 * p.abs().max(1.0), "{k}: {p} vs {q}")
                }
                _ => assert_eq!(v, &y[k], "{k}"),
            }
        }
    }
    let fits = |v: &Value| -> Vec<(String, f64)> {
        v["fits"]
            .as_array()
            .unwrap()
            .iter()
            .map(|f| {
                (
                    f["metric"].as_str().unwrap().to_string(),
                    f["slope"].as_f64().unwrap(),
                )
            })
            .collect()
    };
    for ((m, s), (m2, s2)) in fits(&summary).iter().zip(&fits(&report)) {
        assert_eq!(m, m2);
        assert!((s - s2).abs() < 1e-10);
    }
}

#[test]
fn report_on_an_empty_directory_fails() {
    let dir = tempfile::tempdir().unwrap();
    assert_ne!(code(&run(&["report", "--out", path_str(dir.path())])), 0);
}
