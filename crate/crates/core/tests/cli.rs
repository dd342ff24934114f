use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn sourcebf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sourcebf")).args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Scenario 1 against the synthetic data, shortened to keep the test quick.
fn write_config(dir: &Path, data: &Path) -> PathBuf {
    let text = fs::read_to_string(fixture("scenario1.toml"))
        .unwrap()
        .replace("synthetic_glass.csv", &data.display().to_string())
        .replace("iterations = 30000", "iterations = 3000")
        .replace("burn_in = 1000", "burn_in = 500");
    let path = dir.join("run.toml");
    fs::write(&path, text).unwrap();
    path
}

fn without_timestamp(text: &str) -> String {
    text.lines().filter(|l| !l.starts_with("generated_at")).collect::<Vec<_>>().join("\n")
}

#[test]
fn help_lists_exit_codes() {
    let o = sourcebf(&["--help"]);
    assert!(o.status.success());
    let out = String::from_utf8(o.stdout).unwrap();
    for code in ["0  success", "2  configuration", "3  data", "4  numerical", "5  internal"] {
        assert!(out.contains(code), "missing {code:?}");
    }
}

#[test]
fn missing_data_file_is_a_data_error_and_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), &tmp.path().join("absent.csv"));
    let out = tmp.path().join("out");
    let o = sourcebf(&["evaluate", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn unparsable_config_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("bad.toml");
    fs::write(&config, "[mcmc\niterations = ").unwrap();
    let o = sourcebf(&["evaluate", "--config", config.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn evaluate_is_reproducible_across_output_dirs() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), &fixture("synthetic_glass.csv"));
    let run = |name: &str| {
        let out = tmp.path().join(name);
        let o = sourcebf(&["evaluate", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        out
    };
    let a = run("a");
    let b = run("b");
    for name in ["draws_specific.csv", "draws_alternative.csv", "diagnostics.csv"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    let ra = fs::read_to_string(a.join("report.toml")).unwrap();
    let rb = fs::read_to_string(b.join("report.toml")).unwrap();
    assert!(ra.contains("generated_at"));
    assert_eq!(without_timestamp(&ra), without_timestamp(&rb));
    let parsed: toml::Table = ra.parse().unwrap();
    assert!(parsed["v_full"]["log_v"].as_float().unwrap().is_finite());

    let o = sourcebf(&["evaluate", "--config", config.to_str().unwrap(), "--out", tmp.path().join("c").to_str().unwrap(), "--seed", "7"]);
    assert!(o.status.success());
    let rc = fs::read_to_string(tmp.path().join("c/report.toml")).unwrap();
    assert_ne!(without_timestamp(&ra), without_timestamp(&rc));
}

#[test]
fn diagnose_reports_every_parameter_and_rejects_truncation() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), &fixture("synthetic_glass.csv"));
    let out = tmp.path().join("out");
    assert!(sourcebf(&["evaluate", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()]).status.success());

    let draws = out.join("draws_specific.csv");
    let o = sourcebf(&["diagnose", "--draws", draws.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let rows = text.lines().filter(|l| !l.starts_with('#') && !l.starts_with("parameter")).count();
    // mu (3) plus the 6 distinct entries of the 3x3 covariance.
    assert_eq!(rows, 9);

    let bytes = fs::read(&draws).unwrap();
    let cut = tmp.path().join("cut.csv");
    fs::write(&cut, &bytes[..bytes.len() - 7]).unwrap();
    let o = sourcebf(&["diagnose", "--draws", cut.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("at byte "), "{}", stderr(&o));
}

#[test]
fn descending_grid_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("study.toml");
    fs::write(&config, "[study]\ngrid = [50, 10]\nreplicates = 1\n").unwrap();
    let o = sourcebf(&["simulate", "--config", config.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn simulate_emits_one_dataset_per_cell() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("study.toml");
    fs::write(
        &config,
        "[study]\ngrid = [4, 6]\nreplicates = 2\nseed = 3\n\n[study.mcmc]\niterations = 600\nburn_in = 100\n\n[output]\ndir = \"res\"\n",
    )
    .unwrap();
    let o = sourcebf(&["simulate", "--config", config.to_str().unwrap(), "--emit-datasets"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let res = tmp.path().join("res");
    let table = fs::read_to_string(res.join("convergence.csv")).unwrap();
    assert_eq!(table.lines().count(), 5);
    let mut names: Vec<String> = fs::read_dir(res.join("datasets"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["n4_rep0.csv", "n4_rep1.csv", "n6_rep0.csv", "n6_rep1.csv"]);
}
