use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use fracpq::ExperimentConfig;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fracpq"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("config.toml");
    fs::write(&path, text).unwrap();
    path
}

const SMALL: &str = r#"
[experiment]
kind = "solve"
[domain]
a = 0.0
b = 0.1
[grid]
n = 128
[operator]
p = 2.0
q = 2.0
s1 = 0.75
s2 = 0.35
[rhs]
kind = "constant"
value = 0.0
"#;

/// Data rows of a CSV artifact after the hash line and header.
fn rows(path: &Path) -> (String, Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let hash = lines.next().unwrap().to_string();
    let rest: String = lines.collect::<Vec<_>>().join("\n");
    let mut reader = csv::Reader::from_reader(rest.as_bytes());
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let data = reader
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (hash, header, data)
}

#[test]
fn zero_source_gives_zero_solution() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    let status = bin().args(["solve", "--config"]).arg(&cfg).arg("--out").arg(&out).output().unwrap().status;
    assert!(status.success());
    let (hash, header, data) = rows(&out.join("solution.csv"));
    assert!(hash.starts_with("# config_hash="));
    assert_eq!(header, ["x", "u", "d"]);
    assert_eq!(data.len(), 130);
    assert!(data.iter().all(|r| r[1].parse::<f64>().unwrap() == 0.0));
    let (_, header, _) = rows(&out.join("verdicts.csv"));
    assert_eq!(header, ["name", "passed", "margin", "n", "refinement_ratio", "config_hash"]);
    assert!(out.join("report.md").exists());
}

#[test]
fn malformed_config_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SMALL.replace("n = 128", "n = 4"));
    let out = dir.path().join("out");
    let output = bin().args(["solve", "--config"]).arg(&cfg).arg("--out").arg(&out).output().unwrap();
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("grid.n"));
    assert!(!out.exists());
}

#[test]
fn unknown_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &(SMALL.to_string() + "[solver]\nspeed = 3\n"));
    let output = bin().args(["solve", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("solver.speed"));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SMALL.replace("value = 0.0", "value = 1.0"));
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let status = bin().args(["exponent", "--config"]).arg(&cfg).arg("--out").arg(&out).output().unwrap().status;
        assert!(status.success());
        outputs.push(out);
    }
    for file in ["solution.csv", "fit.csv", "verdicts.csv"] {
        assert_eq!(fs::read(outputs[0].join(file)).unwrap(), fs::read(outputs[1].join(file)).unwrap(), "{file}");
    }
}

#[test]
fn overrides_change_grid_and_window() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SMALL.replace("value = 0.0", "value = 1.0"));
    let out = dir.path().join("out");
    let status = bin()
        .args(["exponent", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(["--resolution-override", "255", "--fit-window", "0.002:0.01", "--seed", "5"])
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    let (_, header, data) = rows(&out.join("fit.csv"));
    assert_eq!(header, ["kind", "side", "d_lo", "d_hi", "exponent", "r_squared", "n", "config_hash"]);
    assert_eq!(data[0][0], "regular");
    assert_eq!(data[0][2].parse::<f64>().unwrap(), 0.002);
    assert_eq!(data[0][6], "255");
    let (_, _, sol) = rows(&out.join("solution.csv"));
    assert_eq!(sol.len(), 257);
}

#[test]
fn singular_exponent_near_prediction() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let status = bin()
        .args(["exponent", "--config"])
        .arg(configs().join("singular_strong.toml"))
        .arg("--out")
        .arg(&out)
        .args(["--resolution-override", "512"])
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    let (_, _, data) = rows(&out.join("fit.csv"));
    assert_eq!(data[0][0], "singular_strong");
    let mu: f64 = data[0][4].parse().unwrap();
    assert!((mu - 0.3).abs() < 0.05, "{mu}");
    let (_, header, stages) = rows(&out.join("stages.csv"));
    assert_eq!(header[0], "eps");
    assert_eq!(stages.len(), 11);
}

#[test]
fn eps_sweep_is_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep");
    let status = bin()
        .args(["sweep", "--config"])
        .arg(configs().join("sweep_eps.toml"))
        .arg("--out")
        .arg(&out)
        .args(["--resolution-override", "256"])
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    let (_, header, data) = rows(&out.join("aggregate.csv"));
    assert_eq!(header[..5], ["value", "status", "exponent", "sup_u", "min_increment"]);
    assert_eq!(data.len(), 3);
    assert!(data[0][4].is_empty());
    for row in &data[1..] {
        assert_eq!(row[1], "ok");
        assert!(row[4].parse::<f64>().unwrap() >= -1e-7, "{row:?}");
    }
    for k in 0..3 {
        assert!(out.join(format!("run_{k:03}")).join("solution.csv").exists());
    }
}

#[test]
fn alpha_sweep_has_positive_margins() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep");
    let status = bin()
        .args(["sweep", "--config"])
        .arg(configs().join("sweep_alpha.toml"))
        .arg("--out")
        .arg(&out)
        .env("FRACPQ_THREADS", "2")
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    let (_, _, data) = rows(&out.join("aggregate.csv"));
    assert_eq!(data.len(), 5);
    for row in &data {
        assert_eq!(row[1], "ok");
        let (_, _, barrier) = rows(&Path::new(&row[6]).join("barrier.csv"));
        let inf: f64 = barrier[0][7].parse().unwrap();
        assert!(inf > 0.0, "{row:?}");
    }
}

#[test]
fn empty_sweep_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(configs().join("sweep_alpha.toml"))
        .unwrap()
        .replace("values = [0.1, 0.25, 0.4, 0.55, 0.7]", "values = []");
    let cfg = write_config(dir.path(), &text);
    let out = dir.path().join("out");
    let output = bin().args(["sweep", "--config"]).arg(&cfg).arg("--out").arg(&out).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("sweep.values"));
    assert!(!out.exists());
}

#[test]
fn principles_exit_code_tracks_failures() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let output = bin()
        .args(["principles", "--config"])
        .arg(configs().join("principles.toml"))
        .arg("--out")
        .arg(&out)
        .args(["--resolution-override", "64"])
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stdout));
    let (_, _, data) = rows(&out.join("verdicts.csv"));
    assert!(data.iter().all(|r| r[1] == "true" || r[1] == "n/a"));
    assert!(data.iter().any(|r| r[0].starts_with("singular strong comparison") && r[1] == "n/a"));
}

#[test]
fn shipped_configs_resolve() {
    for entry in fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        let cfg = ExperimentConfig::load(&path).unwrap();
        cfg.resolve().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}
