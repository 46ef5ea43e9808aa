use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn tmn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tmn"))
        .args(args)
        .current_dir(root())
        .env("TMN_PARAMS_DIR", root().join("data/params"))
        .env_remove("RUST_LOG")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn analyze_five_vertex_example() {
    let o = tmn(&["analyze", "--network", "data/networks/five_vertex_alpha_0.5.json"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("lambda = 0.4\n"), "{out}");
    assert!(out.contains("cycles (1):\n  2 -> 3 -> 4 -> 2"));
    assert!(out.contains("leak set (2):"));
}

#[test]
fn analyze_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = tmn(&["analyze", "--network", "data/networks/five_vertex_alpha_0.5.json", "--out", out]);
    assert!(o.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert!((report["lambda"].as_f64().unwrap() - 0.4).abs() < 1e-15);
    assert_eq!(report["n_phi"], 1);
}

#[test]
fn analyze_acyclic_chain() {
    let o = tmn(&["analyze", "--network", "data/networks/acyclic_chain.json"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("lambda = 0\ncycles (0):\n"));
}

#[test]
fn malformed_network_fails_with_one_coded_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"materials\": [\n").unwrap();
    let o = tmn(&["analyze", "--network", bad.to_str().unwrap()]);
    assert!(!o.status.success());
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("PARSE: parse error at line 3"), "{err}");
}

#[test]
fn graph_errors_are_reported_verbatim() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("loop.json");
    std::fs::write(
        &bad,
        r#"{"materials":[{"id":"b","label":"b"}],"vertices":[{"k":1,"stock":0}],
            "arcs":[{"k":2,"tail":1,"head":1,"flow":1,"material":"b"}]}"#,
    )
    .unwrap();
    let o = tmn(&["analyze", "--network", bad.to_str().unwrap()]);
    assert!(!o.status.success());
    assert_eq!(stderr(&o), "SELF_LOOP_ARC: arc c2 has tail = head = 1\n");
}

#[test]
fn missing_file_is_an_io_error() {
    let o = tmn(&["analyze", "--network", "no/such/file.json"]);
    assert!(!o.status.success());
    assert!(stderr(&o).starts_with("IO: "));
}

fn table(o: &Output) -> Vec<(f64, f64)> {
    stdout(o)
        .lines()
        .skip(1)
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect()
}

#[test]
fn circularity_sweep() {
    let o = tmn(&["demo", "circularity", "--alphas", "0,0.25,0.5,0.75,1"]);
    assert!(o.status.success());
    let expected = [1.0, 0.625, 0.4, 0.25, 0.0];
    for ((_, l), e) in table(&o).iter().zip(expected) {
        assert!((l - e).abs() < 1e-12, "{l} vs {e}");
    }
    let o = tmn(&["demo", "circularity", "--alphas", "0:1:0.05"]);
    assert_eq!(table(&o).len(), 21);
}

#[test]
fn circularity_edge_cases() {
    let o = tmn(&["demo", "circularity", "--alphas", "0"]);
    assert_eq!(table(&o), vec![(0.0, 1.0)]);
    let o = tmn(&["demo", "circularity", "--alphas", ""]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "alpha,lambda\n");
    let o = tmn(&["demo", "circularity", "--alphas", "0.5,1.5"]);
    assert!(!o.status.success());
    assert!(stderr(&o).starts_with("ALPHA_OUT_OF_RANGE: "));
}

#[test]
fn usage_errors_are_one_line() {
    let o = tmn(&["demo", "biomethane", "--mode", "sideways"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr(&o).lines().count(), 1);
    assert!(stderr(&o).starts_with("USAGE: "));
}

#[test]
fn biomethane_overrides() {
    let o = tmn(&["demo", "biomethane", "--mode", "closed", "--set", "digester.nope=1"]);
    assert!(!o.status.success());
    assert!(stderr(&o).starts_with("INVALID_PARAMETER: "));
    let o = tmn(&["demo", "biomethane", "--mode", "closed", "--set", "control.p=8"]);
    assert!(o.status.success());
    // T* scales with p^{-2/3}
    assert!(stdout(&o).contains("(bound 1.211869513143 day)"), "{}", stdout(&o));
    let o = tmn(&["demo", "biomethane", "--mode", "closed", "--set", "truck.t_u=-1"]);
    assert!(stderr(&o).starts_with("INVALID_PARAMETER: "));
}

fn read_summary(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn biomethane_open_loop_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = tmn(&["demo", "biomethane", "--mode", "open", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["hub.csv", "truck.csv", "digester.csv", "ledger.csv", "metadata.json", "summary.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let s = read_summary(dir.path());
    assert_eq!(s["hub_final_kg"], 4800.0);
    assert!(s["digester"]["final_distance_to_working_point"].as_f64().unwrap() < 1e-5);
    assert!(s["truck"]["delivery_position_error_m"].as_f64().unwrap().abs() <= 1e-3);
    let header = std::fs::read_to_string(dir.path().join("digester.csv")).unwrap();
    assert!(header.starts_with("time_day,X1_g/L,S1_g/L,X2_g/L,S2_mmol/L,D1_1/day"));
}

#[test]
fn simulate_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = tmn(&["simulate", "--scenario", "data/scenarios/biomethane_closed.json", "--out", out]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = read_summary(dir.path());
    assert_eq!(s["circularity"], 0.0);
    assert!(s["digester"]["settling_time_day"].as_f64().is_some());
    let o = tmn(&["simulate", "--scenario", "data/scenarios/idle.json", "--out", out]);
    assert!(o.status.success());
    assert_eq!(read_summary(dir.path())["hub_final_kg"], 5000.0);
}

#[test]
fn scenario_with_unknown_field_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let scn = dir.path().join("s.json");
    let params = root().join("data/params/biomethane.json");
    std::fs::write(&scn, format!(r#"{{"name": "x", "params": "{}", "bogus": 1}}"#, params.display())).unwrap();
    let o = tmn(&["simulate", "--scenario", scn.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).starts_with("PARSE: "));
}
