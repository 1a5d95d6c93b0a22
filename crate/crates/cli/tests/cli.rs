use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn rivalry(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rivalry"))
        .args(args)
        .env_remove("RIVALRY_JOBS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout_json(out: &Output) -> Value {
    assert_eq!(code(out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn zero_stimulus_from_rest_is_an_all_zero_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("zero.csv");
    let out = rivalry(&[
        "simulate", "--model", "wilson", "--stim", "0,0", "--dur", "100", "--init", "symmetric-zero",
        "--out", path_str(&csv),
    ]);
    let report = stdout_json(&out);
    assert_eq!(report["regime"], "Fusion");
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,E1,H1,I1,E2,H2,I2"));
    let mut rows = 0;
    for line in lines {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert!(cells[1..].iter().all(|&v| v == 0.0));
        rows += 1;
    }
    assert_eq!(rows, 101);
    let sidecar: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("zero.json")).unwrap()).unwrap();
    assert_eq!(sidecar["model"]["kind"], "wilson");
    assert_eq!(sidecar["config"]["duration"], 100.0);
    assert_eq!(sidecar["samples"], 101);
}

#[test]
fn seeded_noisy_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = rivalry(&[
            "simulate", "--model", "kalarickal", "--seed", "7", "--stim", "0.8,0.8", "--dur", "1000",
            "--out", path_str(p),
        ]);
        assert_eq!(code(&out), 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(
        std::fs::read(dir.path().join("a.json")).unwrap(),
        std::fs::read(dir.path().join("b.json")).unwrap()
    );
}

#[test]
fn rivalry_band_stimulus_reports_rivalry() {
    let report = stdout_json(&rivalry(&["simulate", "--model", "wilson", "--stim", "20,20"]));
    assert_eq!(report["regime"], "Rivalry");
    assert!(report["switches"].as_u64().unwrap() >= 3);
}

#[test]
fn classify_reproduces_the_simulate_report() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("run.csv");
    let intervals = dir.path().join("iv.csv");
    let sim = rivalry(&[
        "simulate", "--model", "laing-chow", "--stim", "0.3,0.28", "--transient", "1500", "--out",
        path_str(&csv), "--intervals", path_str(&intervals),
    ]);
    assert_eq!(code(&sim), 0);
    let classify = rivalry(&["classify", "--in", path_str(&csv)]);
    assert_eq!(code(&classify), 0);
    assert_eq!(sim.stdout, classify.stdout);

    let iv = std::fs::read_to_string(&intervals).unwrap();
    assert!(iv.starts_with("channel,start_ms,end_ms,complete\n"));
    let report: Value = serde_json::from_slice(&sim.stdout).unwrap();
    assert_eq!(iv.lines().count() - 1, report["intervals"].as_array().unwrap().len());
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn classify_synthetic_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let mut square = String::from("t,u1,a1,u2,a2\n");
    for k in 0..2400 {
        let one = (k / 300) % 2 == 0;
        square.push_str(&format!("{k},{},0,{},0\n", one as u8, !one as u8));
    }
    let p = write(dir.path(), "square.csv", &square);
    let report = stdout_json(&rivalry(&["classify", "--in", &p, "--transient", "0"]));
    assert_eq!(report["regime"], "Rivalry");
    assert_eq!(report["intervals"].as_array().unwrap().len(), 8);
    assert_eq!(report["mean_duration_1"], 300.0);

    let mut zero = String::from("t,E1,H1,I1,E2,H2,I2\n");
    for k in 0..50 {
        zero.push_str(&format!("{k},0,0,0,0,0,0\n"));
    }
    let p = write(dir.path(), "zero.csv", &zero);
    assert_eq!(stdout_json(&rivalry(&["classify", "--in", &p]))["regime"], "Fusion");
}

#[test]
fn malformed_csv_is_a_usage_error_with_a_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "bad.csv", "t,u1,a1,u2,a2\n0,0,0,0,0\n1,0,oops,0,0\n");
    let out = rivalry(&["classify", "--in", &p]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn usage_and_numerical_exit_codes() {
    assert_eq!(code(&rivalry(&["simulate", "--model", "lotka"])), 2);
    assert_eq!(code(&rivalry(&["simulate", "--model", "wilson", "--param", "zeta=1"])), 2);
    assert_eq!(code(&rivalry(&["simulate", "--model", "wilson", "--param", "g=-1"])), 2);
    assert_eq!(code(&rivalry(&["simulate", "--model", "wilson", "--stim", "1"])), 2);
    assert_eq!(code(&rivalry(&["simulate", "--model", "wilson", "--dt", "0"])), 2);
    assert_eq!(code(&rivalry(&["simulate", "--model", "wilson", "--frobnicate"])), 2);
    assert_eq!(code(&rivalry(&["classify", "--in", "/nonexistent/file.csv"])), 2);
    let blowup = rivalry(&["simulate", "--model", "kalarickal", "--stim", "4,4", "--dt", "5", "--dur", "5000"]);
    assert_eq!(code(&blowup), 3);
    assert!(String::from_utf8_lossy(&blowup.stderr).contains("t ="), "{}", String::from_utf8_lossy(&blowup.stderr));
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.json",
        r#"{"model": {"kind": "wilson", "params": {"g": 0.5}}, "stim": {"s1": 20.0, "s2": 20.0},
            "sim": {"duration": 3000.0}}"#,
    );
    let csv = dir.path().join("out.csv");
    let out = rivalry(&["simulate", "--config", &cfg, "--dur", "2000", "--out", path_str(&csv)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("out.json")).unwrap()).unwrap();
    assert_eq!(meta["model"]["params"]["g"], 0.5);
    assert_eq!(meta["config"]["duration"], 2000.0);
    assert_eq!(meta["stim"]["s1"], 20.0);

    let bad = write(dir.path(), "bad.json", r#"{"model": {"kind": "wilson"}, "simm": {}}"#);
    assert_eq!(code(&rivalry(&["simulate", "--config", &bad])), 2);
}

#[test]
fn single_point_sweep_is_one_row() {
    let out = rivalry(&["sweep", "--model", "wilson", "--grid", "20:20:1", "--dur", "5000"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "param,replicate,regime,mean_dur_1,mean_dur_2,alt_rate,predom_1,predom_2");
    assert_eq!(lines.len(), 2);
    assert!(lines[1].contains(",Rivalry,"));
}

#[test]
fn empty_or_missing_grids_are_usage_errors() {
    assert_eq!(code(&rivalry(&["sweep", "--model", "wilson", "--grid", "5:1:1"])), 2);
    assert_eq!(code(&rivalry(&["sweep", "--model", "wilson", "--grid", "1:5:0"])), 2);
    assert_eq!(code(&rivalry(&["sweep", "--model", "wilson", "--axis", "cross-inhibition"])), 2);
    assert_eq!(
        code(&rivalry(&["sweep", "--model", "wilson", "--axis", "cross-inhibition", "--grid", "0.4:0.5:0.05"])),
        2,
        "missing fixed stimulus"
    );
}

#[test]
fn sweep_outputs_do_not_depend_on_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for jobs in ["1", "3"] {
        let prefix = dir.path().join(format!("jobs{jobs}"));
        let out = rivalry(&[
            "--jobs", jobs, "sweep", "--model", "kalarickal", "--grid", "0.2:1.2:0.2", "--dur", "800",
            "--seed", "3", "--out", path_str(&prefix),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let csv = std::fs::read(prefix.with_extension("csv")).unwrap();
        let json = std::fs::read(prefix.with_extension("json")).unwrap();
        outputs.push((csv, json));
    }
    assert_eq!(outputs[0], outputs[1]);
    let csv = String::from_utf8(outputs[0].0.clone()).unwrap();
    // six grid points, five replicates each
    assert_eq!(csv.lines().count(), 1 + 6 * 5);

    let env_run = Command::new(env!("CARGO_BIN_EXE_rivalry"))
        .args(["sweep", "--model", "kalarickal", "--grid", "0.2:1.2:0.2", "--dur", "800", "--seed", "3"])
        .env("RIVALRY_JOBS", "2")
        .output()
        .unwrap();
    assert_eq!(env_run.stdout, outputs[0].0);
}

#[test]
fn asymmetric_sweep_records_fixed_eye() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("asym");
    let out = rivalry(&[
        "sweep", "--model", "laing-chow", "--axis", "asymmetric", "--grid", "0.2:0.24:0.02", "--fixed", "s2=0.2",
        "--dur", "3000", "--out", path_str(&prefix),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let json: Value = serde_json::from_str(&std::fs::read_to_string(prefix.with_extension("json")).unwrap()).unwrap();
    assert_eq!(json["spec"]["fixed"]["s2"], 0.2);
    assert_eq!(json["spec"]["axis"], "asymmetric_s1");
    assert_eq!(json["rows"].as_array().unwrap().len(), 3);
}
