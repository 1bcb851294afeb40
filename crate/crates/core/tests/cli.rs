use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_switchnet"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synth(cfg: &str, dir: &Path, extra: &[&str]) -> Output {
    let cfg = config(cfg);
    let mut args = vec!["synth", "--config", path(&cfg), "--out", path(dir)];
    args.extend(extra);
    run(&args)
}

fn last_row(csv: &Path) -> Vec<f64> {
    let text = fs::read_to_string(csv).unwrap();
    text.lines().last().unwrap().split(',').map(|v| v.parse().unwrap()).collect()
}

fn leg_rows(report: &Value, leg: u64) -> Vec<(f64, f64)> {
    report["pulses"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["leg"].as_u64() == Some(leg))
        .map(|r| (r["duration"].as_f64().unwrap(), r["power"].as_f64().unwrap()))
        .collect()
}

#[test]
fn help_and_bad_usage() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["synth"]).status.code(), Some(1));
    let o = run(&["synth", "--config", "/nonexistent/config.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("cannot read"));
}

#[test]
fn demo_config_synthesizes_euler_table() {
    let dir = TempDir::new().unwrap();
    let o = synth("demo_third.json", dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = read_json(&dir.path().join("synth_report.json"));
    assert_eq!(report["bang_bang"], Value::Bool(true));
    let r = std::f64::consts::PI * 10f64.sqrt() / 20.0;
    let s = std::f64::consts::PI * 5f64.sqrt() / 20.0;
    let want = [(r, r), (7.0 * s, 0.0), (3.0 * r, 3.0 * r)];
    let got = leg_rows(&report, 2);
    assert_eq!(got.len(), 3);
    for ((a, b), (wa, wb)) in got.iter().zip(want) {
        assert!((a - wa).abs() < 1e-12 && (b - wb).abs() < 1e-12, "{got:?}");
    }
    assert!(report["algorithm_costs"]["piecewise"].is_number());
    assert!(stdout(&o).contains("a_k"));
}

#[test]
fn piecewise_table_and_flag() {
    let dir = TempDir::new().unwrap();
    let o = synth("demo_third.json", dir.path(), &["--algorithm", "piecewise"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = read_json(&dir.path().join("synth_report.json"));
    assert_eq!(report["bang_bang"], Value::Bool(false));
    let got = leg_rows(&report, 2);
    let want = [(0.269, -0.380), (0.649, 0.917)];
    for ((a, b), (wa, wb)) in got.iter().zip(want) {
        assert!((a - wa).abs() < 1e-3 && (b - wb).abs() < 1e-3, "{got:?}");
    }
}

#[test]
fn malformed_config_names_the_field() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"circuit": {"third": {"c1": 0.1, "c2": "wide", "l3": 0.5}}, "transfer": {"x0": [1,0,0], "xf": [0,1,0]}}"#).unwrap();
    let o = run(&["synth", "--config", path(&cfg), "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("circuit.third.c2"), "{}", stderr(&o));

    fs::write(&cfg, r#"{"circuit": {"third": {"c1": 0.1, "c2": 0.2, "l3": 0.5}}, "transfer": {"x0": [1,0,0], "xf": [0,2,0]}}"#).unwrap();
    let o = run(&["synth", "--config", path(&cfg), "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("transfer"), "{}", stderr(&o));
}

#[test]
fn algorithm_must_match_dimension() {
    let dir = TempDir::new().unwrap();
    let o = synth("demo_third.json", dir.path(), &["--algorithm", "fourth"]);
    assert_eq!(o.status.code(), Some(1));
    let o = synth("fourth_cc1.json", dir.path(), &["--algorithm", "bangbang2"]);
    assert_eq!(o.status.code(), Some(1));
    let o = synth("demo_third.json", dir.path(), &["--algorithm", "bangbang3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unmet_resonance_is_infeasible() {
    let dir = TempDir::new().unwrap();
    let o = synth("fourth_cc1_unmet.json", dir.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cc1"), "{}", stderr(&o));
    assert!(!dir.path().join("schedule.json").exists());
    let cfg = config("fourth_cc1_unmet.json");
    assert_eq!(run(&["verify", "--config", path(&cfg)]).status.code(), Some(2));
}

#[test]
fn synth_then_simulate_round_trip() {
    let dir = TempDir::new().unwrap();
    assert_eq!(synth("demo_third.json", dir.path(), &[]).status.code(), Some(0));
    let schedule = dir.path().join("schedule.json");
    let sim = dir.path().join("sim");
    let o = run(&["simulate", "--schedule", path(&schedule), "--out", path(&sim)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let csv = sim.join("trajectory.csv");
    let header = fs::read_to_string(&csv).unwrap().lines().next().unwrap().to_string();
    assert_eq!(header, "t,x1,x2,x3");
    let end = last_row(&csv);
    assert!(common_distance(&end[1..], &[0.0, -1.0, 0.0]) < 1e-9);

    let report = read_json(&sim.join("transfer_report.json"));
    assert_eq!(report["passed"], Value::Bool(true));
    assert_eq!(report["waypoint_errors"].as_array().unwrap().len(), 2);

    // A second run from the file alone is identical.
    let sim2 = dir.path().join("sim2");
    assert_eq!(run(&["simulate", "--schedule", path(&schedule), "--out", path(&sim2)]).status.code(), Some(0));
    assert_eq!(fs::read(&csv).unwrap(), fs::read(sim2.join("trajectory.csv")).unwrap());
    assert_eq!(
        fs::read(sim.join("transfer_report.json")).unwrap(),
        fs::read(sim2.join("transfer_report.json")).unwrap()
    );

    let o = run(&["verify", "--schedule", path(&schedule)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

fn common_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[test]
fn sample_dt_controls_trajectory_density() {
    let dir = TempDir::new().unwrap();
    assert_eq!(synth("demo_third.json", dir.path(), &[]).status.code(), Some(0));
    let schedule = dir.path().join("schedule.json");
    let o = run(&["simulate", "--schedule", path(&schedule), "--out", path(dir.path()), "--sample-dt", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap().lines().count();
    assert!(rows < 30, "{rows}");
    let o = run(&["simulate", "--schedule", path(&schedule), "--sample-dt", "-1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn tampered_schedule_fails_verification() {
    let dir = TempDir::new().unwrap();
    assert_eq!(synth("demo_third.json", dir.path(), &[]).status.code(), Some(0));
    let schedule = dir.path().join("schedule.json");
    let mut file = read_json(&schedule);
    let d = file["pulses"][1]["duration"].as_f64().unwrap();
    file["pulses"][1]["duration"] = Value::from(d * 1.01);
    fs::write(&schedule, serde_json::to_string(&file).unwrap()).unwrap();
    let o = run(&["simulate", "--schedule", path(&schedule), "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(read_json(&dir.path().join("transfer_report.json"))["passed"], Value::Bool(false));
    assert_eq!(run(&["verify", "--schedule", path(&schedule)]).status.code(), Some(3));
}

#[test]
fn identity_schedule_stays_at_x0() {
    let dir = TempDir::new().unwrap();
    let schedule = dir.path().join("identity.json");
    fs::write(
        &schedule,
        r#"{"dimension": 3, "pulses": [], "mode": "bangbang",
            "circuit": {"third": {"c1": 0.1, "c2": 0.2, "l3": 0.5}},
            "transfer": {"x0": [0, 0, 1], "xf": [0, 0, 1]}}"#,
    )
    .unwrap();
    let o = run(&["simulate", "--schedule", path(&schedule), "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    for line in text.lines().skip(1) {
        let row: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(&row[1..], &[0.0, 0.0, 1.0]);
    }
}

#[test]
fn schedule_dimension_mismatch_is_rejected() {
    let dir = TempDir::new().unwrap();
    let schedule = dir.path().join("s.json");
    fs::write(
        &schedule,
        r#"{"dimension": 4, "pulses": [], "mode": "bangbang",
            "circuit": {"third": {"c1": 0.1, "c2": 0.2, "l3": 0.5}}}"#,
    )
    .unwrap();
    assert_eq!(run(&["simulate", "--schedule", path(&schedule)]).status.code(), Some(1));

    fs::write(
        &schedule,
        r#"{"dimension": 3, "pulses": [{"duration": -1.0, "control": 0.0}], "mode": "bangbang",
            "circuit": {"third": {"c1": 0.1, "c2": 0.2, "l3": 0.5}},
            "transfer": {"x0": [0, 0, 1], "xf": [0, 0, 1]}}"#,
    )
    .unwrap();
    assert_eq!(run(&["simulate", "--schedule", path(&schedule)]).status.code(), Some(1));
}

#[test]
fn fourth_order_schedules_reach_their_targets() {
    for (cfg, target) in [
        ("fourth_cc1.json", [0.0, 0.0, 1.0, 0.0]),
        ("fourth_free.json", [0.0, 1.0, 0.0, 0.0]),
        ("fourth_cc2.json", [0.0, 0.0, 0.0, 1.0]),
    ] {
        let dir = TempDir::new().unwrap();
        let o = synth(cfg, dir.path(), &[]);
        assert_eq!(o.status.code(), Some(0), "{cfg}: {}", stderr(&o));
        let report = read_json(&dir.path().join("synth_report.json"));
        assert_eq!(report["bang_bang"], Value::Bool(true));
        let schedule = dir.path().join("schedule.json");
        let o = run(&["simulate", "--schedule", path(&schedule), "--out", path(dir.path())]);
        assert_eq!(o.status.code(), Some(0), "{cfg}: {}", stdout(&o));
        let end = last_row(&dir.path().join("trajectory.csv"));
        assert_eq!(end.len(), 5);
        assert!(common_distance(&end[1..], &target) < 1e-9, "{cfg}: {end:?}");
    }
}

#[test]
fn verify_synthesizes_from_config() {
    let cfg = config("demo_third.json");
    for alg in ["piecewise", "bangbang1", "bangbang2"] {
        let o = run(&["verify", "--config", path(&cfg), "--algorithm", alg]);
        assert_eq!(o.status.code(), Some(0), "{alg}: {}", stdout(&o));
        assert!(stdout(&o).contains("passed"));
    }
    assert_eq!(run(&["verify"]).status.code(), Some(1));
}

#[test]
fn demo_matches_and_detects_perturbation() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("artifacts");
    let o = run(&["demo", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(out.join("third_bangbang2_trajectory.csv").exists());
    assert!(out.join("fourth_free_schedule.json").exists());
    assert!(out.join("costs.json").exists());

    let expected = dir.path().join("expected.json");
    let o = run(&["demo", "--record", path(&expected)]);
    assert_eq!(o.status.code(), Some(0));
    let mut file = read_json(&expected);
    let v = file["values"]["third.bangbang2.pulse4.duration"].as_f64().unwrap();
    file["values"]["third.bangbang2.pulse4.duration"] = Value::from(v + 1e-3);
    file["values"]["no.such.value"] = Value::from(1.0);
    fs::write(&expected, serde_json::to_string(&file).unwrap()).unwrap();
    let o = run(&["demo", "--expected", path(&expected)]);
    assert_eq!(o.status.code(), Some(3));
    let text = stdout(&o);
    assert!(text.contains("third.bangbang2.pulse4.duration"), "{text}");
    assert!(text.contains("no.such.value"), "{text}");
}
