use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relmirror")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let o = run(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

fn geometry_file(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "geometries", &format!("{name}.toml")].iter().collect();
    p.to_string_lossy().into_owned()
}

fn values(v: &Value, series: &str, key: &str) -> Vec<(i64, String)> {
    v.as_array()
        .unwrap()
        .iter()
        .filter(|r| r["series"] == series)
        .map(|r| (r[key].as_i64().unwrap(), r["value"].as_str().unwrap().to_string()))
        .collect()
}

#[test]
fn proper_potential_json() {
    let v = json(&["proper-potential", "--geometry", "p2_cubic", "--order", "6", "--format", "json"]);
    let rows: Vec<(i64, i64, String)> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["x_exp"].as_i64().unwrap(), r["t_deg"].as_i64().unwrap(), r["value"].as_str().unwrap().into()))
        .collect();
    assert_eq!(rows, vec![(1, 0, "1".into()), (-2, 3, "2".into()), (-5, 6, "5".into())]);
}

#[test]
fn verify_reports_periods_and_conventions() {
    let v = json(&["verify", "--geometry", "p3_quartic", "--order", "8", "--format", "json"]);
    assert_eq!(v["passed"], true);
    let rows = v["period"]["rows"].as_array().unwrap();
    assert_eq!(rows[4]["classical"], "24");
    assert_eq!(rows[8]["regularized_quantum"], "2520");
    let conv = &v["metadata"]["conventions"];
    for key in ["state_space_product", "contact_minus_one", "m_vector_signs"] {
        assert!(conv[key].is_string(), "{key}");
    }
    assert_eq!(v["metadata"]["m_vector"], serde_json::json!([4]));
    assert_eq!(v["delta_d"]["checks"].as_array().unwrap().len(), 4);
    assert_eq!(v["roundtrip"]["holds"], true);
}

#[test]
fn verify_pretty_exit_status() {
    let o = run(&["verify", "--geometry", "p2_cubic", "--order", "9"]);
    assert!(o.status.success());
    assert!(stdout(&o).trim_end().ends_with("PASS"));
}

#[test]
fn negative_control_is_flagged() {
    let v = json(&["verify", "--geometry", "p3_quartic", "--order", "8", "--negative-control", "--format", "json"]);
    assert_eq!(v["period"]["first_mismatch"], 4);
    assert!(v["period"]["perturbed"].is_string());
    assert_eq!(v["passed"], true);
}

#[test]
fn identities_pass_and_are_deterministic() {
    let a = run(&["identities", "--seed", "1", "--cases", "25"]);
    assert!(a.status.success());
    let b = run(&["identities", "--seed", "1", "--cases", "25"]);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&["identities", "--seed", "3", "--cases", "5", "--format", "json"]);
    assert_eq!(v["passed"], true);
    assert_eq!(v["metadata"]["seed"], 3);
    assert_eq!(v["suites"].as_array().unwrap().len(), 2);
}

#[test]
fn invariant_table_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for ext in ["json", "csv"] {
        let path = dir.path().join(format!("table.{ext}"));
        let p = path.to_str().unwrap();
        let direct = run(&["quantum-period", "--geometry", "p3_quartic", "--write-invariants", p, "--format", "json"]);
        assert!(direct.status.success());
        let again = run(&["quantum-period", "--geometry", "p3_quartic", "--invariants", p, "--format", "json"]);
        assert_eq!(direct.stdout, again.stdout, "{ext}");
        let v1 = run(&["verify", "--geometry", "p3_quartic", "--format", "json"]);
        let v2 = run(&["verify", "--geometry", "p3_quartic", "--invariants", p, "--format", "json"]);
        let strip = |o: &Output| {
            let mut v: Value = serde_json::from_slice(&o.stdout).unwrap();
            v["metadata"]["invariant_rows"] = Value::Null;
            v
        };
        assert_eq!(strip(&v1), strip(&v2), "{ext}");
    }
}

#[test]
fn regularized_period_values() {
    let v = json(&["regularized-period", "--geometry", "p3_quartic", "--order", "12", "--format", "json"]);
    let got = values(&v, "G_hat", "t_deg");
    let want: Vec<(i64, String)> = [(0, "1"), (4, "24"), (8, "2520"), (12, "369600")].map(|(d, s)| (d, s.into())).into();
    assert_eq!(got, want);
    let v = json(&["classical-period", "--geometry", "p2_cubic", "--order", "9", "--format", "json"]);
    let got = values(&v, "pi_W", "t_deg");
    let want: Vec<(i64, String)> = [(0, "1"), (3, "6"), (6, "90"), (9, "1680")].map(|(d, s)| (d, s.into())).into();
    assert_eq!(got, want);
}

#[test]
fn per_beta_rows() {
    let v = json(&["quantum-period", "--geometry", "p2_cubic", "--order", "6", "--per-beta", "--format", "json"]);
    let rows = v.as_array().unwrap();
    assert_eq!(rows[0]["beta"], "1");
    assert_eq!(rows[0]["t_deg"], 3);
    assert_eq!(rows[0]["value"], "1");
    assert_eq!(rows[1]["beta"], "2");
    assert_eq!(rows[1]["value"], "1/8");
}

#[test]
fn mirror_map_values() {
    let v = json(&["mirror-map", "--geometry", "p3_quartic", "--format", "json"]);
    let g: Vec<String> = v
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["series"] == "g")
        .map(|r| r["value"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(g, ["6", "315", "30800"]);
    let v = json(&["mirror-map", "--geometry", "p2_cubic", "--order", "9", "--format", "json"]);
    assert!(v.as_array().unwrap().iter().any(|r| r["series"] == "g" && r["value"] == "560/3"));
    let v = json(&["mirror-map", "--geometry", "blp3_k3", "--format", "json"]);
    assert!(v
        .as_array()
        .unwrap()
        .iter()
        .any(|r| r["series"] == "contact_minus_one" && r["beta"] == "0 1" && r["value"] == "1"));
}

#[test]
fn i_function_and_tau_d() {
    let v = json(&["i-function", "--geometry", "p3_quartic", "--extended", "--format", "json"]);
    assert!(v
        .as_array()
        .unwrap()
        .iter()
        .any(|r| r["beta"] == "0 2" && r["contact"] == 2 && r["z_exp"] == -1 && r["value"] == "1/2"));
    let v = json(&["tau-d", "--geometry", "p2_cubic", "--format", "json"]);
    assert_eq!(v, serde_json::json!([]));
}

#[test]
fn csv_output_is_rectangular() {
    let o = run(&["mirror-map", "--geometry", "blp3_k3", "--format", "csv"]);
    assert!(o.status.success());
    let mut r = csv::Reader::from_reader(&o.stdout[..]);
    let header = r.headers().unwrap().clone();
    assert_eq!(&header[0], "series");
    assert_eq!(&header[header.len() - 1], "value");
    for rec in r.records() {
        assert_eq!(rec.unwrap().len(), header.len());
    }
}

#[test]
fn geometry_files_match_builtins() {
    let file = geometry_file("p2_cubic");
    let a = run(&["proper-potential", "--geometry", &file, "--format", "json"]);
    let b = run(&["proper-potential", "--geometry", "p2_cubic", "--format", "json"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn errors_name_the_problem() {
    let o = run(&["classical-period", "--geometry", "p3_quartic", "--order", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--order must be at least 2"));
    let o = run(&["classical-period", "--geometry", "no_such_geometry"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["classical-period", "--geometry", "blp3_k3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("truncation exceeded"));
    let o = run(&["quantum-period", "--geometry", "p3_quartic", "--z-min", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["no-such-command"]);
    assert!(!o.status.success());
}
