use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn truncvar(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_truncvar"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn worked_example(dir: &Path) -> &'static str {
    fs::write(dir.join("ex.csv"), "time,value\n0,0\n1,3\n2,1\n3,4\n").unwrap();
    "ex.csv"
}

fn read_values(file: &Path) -> Vec<f64> {
    fs::read_to_string(file)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn generate_writes_csv_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let out = truncvar(
        &["generate", "--kind", "wiener", "--sigma", "1", "--t", "1", "--n", "1024", "--seed", "7", "--out", "w.csv"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(read_values(&dir.path().join("w.csv")).len(), 1025);
    let meta: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("w.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["seed"], 7);
    assert_eq!(meta["true_qv_cont"], 1.0);

    // same seed reproduces the file byte for byte
    let again = truncvar(
        &["generate", "--kind", "wiener", "--sigma", "1", "--n", "1024", "--seed", "7", "--out", "v"],
        dir.path(),
    );
    assert_eq!(code(&again), 0);
    assert_eq!(
        fs::read(dir.path().join("w.csv")).unwrap(),
        fs::read(dir.path().join("v.csv")).unwrap()
    );
}

#[test]
fn generate_reads_config_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("g.json"),
        r#"{"kind":"compound_poisson","jump_rate":5,"jump_sd":1,"horizon":1,"steps":256,"seed":3}"#,
    )
    .unwrap();
    let out = truncvar(&["generate", "--config", "g.json", "--out", "cp"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(read_values(&dir.path().join("cp.csv")).len(), 257);
}

#[test]
fn generate_usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing_out = truncvar(&["generate", "--kind", "wiener", "--n", "8"], dir.path());
    assert_eq!(code(&missing_out), 2);
    let negative = truncvar(
        &["generate", "--kind", "wiener", "--sigma", "-1", "--n", "8", "--out", "x"],
        dir.path(),
    );
    assert_eq!(code(&negative), 2);
    assert!(String::from_utf8_lossy(&negative.stderr).contains("invalid generator config"));
    assert!(!dir.path().join("x.csv").exists());
}

#[test]
fn decompose_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let input = worked_example(dir.path());
    let out = truncvar(&["decompose", "--input", input, "--c", "1", "--out", "d"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let summary: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("d.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["tv"], 5.0);
    assert_eq!(summary["utv"], 4.0);
    assert_eq!(summary["dtv"], 1.0);
    assert_eq!(read_values(&dir.path().join("d.trend.csv")), vec![0.0, 2.0, 1.0, 3.0]);
    assert_eq!(read_values(&dir.path().join("d.noise.csv")), vec![0.0, 1.0, 0.0, 1.0]);
}

#[test]
fn decompose_extreme_levels() {
    let dir = tempfile::tempdir().unwrap();
    let input = worked_example(dir.path());
    assert_eq!(code(&truncvar(&["decompose", "--input", input, "--c", "0", "--out", "z"], dir.path())), 0);
    assert!(read_values(&dir.path().join("z.noise.csv")).iter().all(|&e| e == 0.0));

    assert_eq!(code(&truncvar(&["decompose", "--input", input, "--c", "10", "--out", "big"], dir.path())), 0);
    assert!(read_values(&dir.path().join("big.trend.csv")).iter().all(|&v| v == 0.0));

    assert_eq!(code(&truncvar(&["decompose", "--input", input, "--c", "-1", "--out", "n"], dir.path())), 2);
}

#[test]
fn unreadable_input_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let missing = truncvar(&["decompose", "--input", "nope.csv", "--c", "1", "--out", "d"], dir.path());
    assert_eq!(code(&missing), 1);
    fs::write(dir.path().join("bad.csv"), "time,value\n0,0\n1,abc\n").unwrap();
    let bad = truncvar(&["decompose", "--input", "bad.csv", "--c", "1", "--out", "d"], dir.path());
    assert_eq!(code(&bad), 1);
}

#[test]
fn pvar_outputs_tsv() {
    let dir = tempfile::tempdir().unwrap();
    let input = worked_example(dir.path());
    let out = truncvar(
        &["pvar", "--input", input, "--p", "2", "--scheme", "mesh-sweep", "--deltas", "3,1"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split('\t').map(|f| f.parse().unwrap()).collect())
        .collect();
    assert_eq!(text.lines().next(), Some("param\tsum"));
    assert_eq!(rows, vec![vec![3.0, 22.0], vec![1.0, 22.0]]);

    let nested = truncvar(&["pvar", "--input", input, "--p", "1", "--levels", "2"], dir.path());
    assert_eq!(code(&nested), 0);
    let schedule = truncvar(
        &["pvar", "--input", input, "--p", "1", "--scheme", "mesh-schedule", "--schedule", "log"],
        dir.path(),
    );
    assert_eq!(code(&schedule), 0);
    let squared = truncvar(
        &["pvar", "--input", input, "--p", "1", "--scheme", "mesh-schedule", "--schedule", "log-squared"],
        dir.path(),
    );
    // later stages of 3 / ln(n + 2)^2 drop below the unit grid gap
    assert_eq!(code(&squared), 2);
    let too_fine = truncvar(
        &["pvar", "--input", input, "--p", "2", "--scheme", "mesh-sweep", "--deltas", "0.5"],
        dir.path(),
    );
    assert_eq!(code(&too_fine), 2);
}

#[test]
fn integrate_with_and_without_truncation() {
    let dir = tempfile::tempdir().unwrap();
    let input = worked_example(dir.path());
    let out = truncvar(&["integrate", "--y", input, "--x", input], dir.path());
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    // 0*3 + 3*(-2) + 1*3
    assert_eq!(v["value"], -3.0);
    assert_eq!(v["integrator_tv"], 8.0);

    let out = truncvar(&["integrate", "--y", input, "--x", input, "--c", "1"], dir.path());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    // against X^c = [0, 2, 1, 3]: 0*2 + 3*(-1) + 1*2
    assert_eq!(v["value"], -1.0);
    assert_eq!(v["integrator_tv"], 5.0);
}

#[test]
fn experiment_writes_report_files() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("e.json"),
        r#"{
            "x": {"kind": "wiener", "volatility": 1, "horizon": 1, "steps": 512},
            "c_values": [0.5, 0.1],
            "replications": 8,
            "base_seed": 1,
            "target": "ito_plus_bracket",
            "steps": 512
        }"#,
    )
    .unwrap();
    let run = |prefix: &str| {
        let out = truncvar(&["experiment", "--config", "e.json", "--out", prefix], dir.path());
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    };
    run("r1");
    run("r2");
    let tsv = fs::read_to_string(dir.path().join("r1.tsv")).unwrap();
    assert_eq!(tsv.lines().next(), Some("c\tmean_err\tstd_err\tmean_tvc"));
    assert_eq!(tsv.lines().count(), 3);
    assert_eq!(
        fs::read(dir.path().join("r1.json")).unwrap(),
        fs::read(dir.path().join("r2.json")).unwrap()
    );

    fs::write(dir.path().join("bad.json"), r#"{"x": 1}"#).unwrap();
    let bad = truncvar(&["experiment", "--config", "bad.json", "--out", "b"], dir.path());
    assert_eq!(code(&bad), 2);
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = truncvar(&["selftest"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("[PASS]"));
}
