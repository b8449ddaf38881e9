use std::io::Write;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_circuit-zpf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn netlist(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".net").tempfile().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn help_and_bad_flags() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["figure", "9z"]).status.code(), Some(1));
    assert_eq!(run(&["force", "--circuit", "II", "--R", "-3"]).status.code(), Some(1));
}

#[test]
fn figure_2b_csv() {
    let o = run(&["figure", "2b", "--points", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "circuit,r,U_over_U0,U_over_U0_quadrature,valid,renormalized");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 15);
    // r = 1: U/U0 = −ln 2 for the series RC case.
    let row = rows.iter().find(|r| r[0] == "I" && r[1] == "1.00000000000e0").unwrap();
    let u: f64 = row[2].parse().unwrap();
    assert!((u + 2f64.ln()).abs() < 1e-10);
    assert_eq!(out, stdout(&run(&["figure", "2b", "--points", "5"])));
}

#[test]
fn force_json_keeps_column_order() {
    let o = run(&["force", "--circuit", "II", "--y", "50n", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let f = v[0]["force_N"].as_f64().unwrap();
    assert!(f < 0.0 && f.abs() > 1e-17 && f.abs() < 1e-14, "{f}");
    assert!(out.find("\"xi\"").unwrap() < out.find("\"force_N\"").unwrap());
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.csv");
    let o = run(&["figure", "2c", "--points", "3", "--output", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn divergent_energy_exits_two() {
    let o = run(&["energy", "--circuit", "I"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("requires renormalization"));
}

#[test]
fn validate_reports_diagnostics() {
    let good = netlist("# series RC\nR1 a gnd 10\nC0 a b 1p\nPORT b gnd\n");
    let o = run(&["validate", "--netlist", good.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("check,value,ok\n"));
    assert!(out.contains("elements,2,true"));

    let bad = netlist("R1 a gnd 10\nR1 a gnd -2\nPORT a a\n");
    let o = run(&["validate", "--netlist", bad.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("3:8: port nodes identical"), "{err}");
    assert!(err.contains("2:"), "{err}");
    assert!(!err.contains("missing PORT"), "{err}");
}

#[test]
fn netlist_energy_matches_builtin() {
    let net = netlist("R1 a gnd 10\nC0 a b 0.0313p\nPORT b gnd\n");
    let from_file = run(&["energy", "--netlist", net.path().to_str().unwrap(), "--C", "0.0313p", "--renormalize", "--format", "json"]);
    let builtin = run(&["energy", "--circuit", "I", "--C", "0.0313p", "--renormalize", "--format", "json"]);
    assert_eq!(from_file.status.code(), Some(0));
    let a: serde_json::Value = serde_json::from_slice(&from_file.stdout).unwrap();
    let b: serde_json::Value = serde_json::from_slice(&builtin.stdout).unwrap();
    let (ea, eb) = (a[0]["energy_J"].as_f64().unwrap(), b[0]["energy_J"].as_f64().unwrap());
    assert!(((ea - eb) / eb).abs() < 1e-9);
    // −(ħ/2πRC)·ln 2 at C = C0.
    assert!((eb / -3.7e-23 - 1.0).abs() < 0.02, "{eb}");
}

#[test]
fn sweep_and_snr() {
    let o = run(&["sweep", "--circuit", "II", "--vary", "y", "--from", "100n", "--to", "1u", "--points", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 5);
    assert!(out.lines().skip(1).all(|l| l.split(',').nth(1).unwrap().starts_with('-')));

    let o = run(&["snr", "--force", "1e-15", "--eta", "0.05"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_slice(&run(&["snr", "--force", "1e-15", "--eta", "0.05", "--format", "json"]).stdout).unwrap();
    let snr = v[0]["snr"].as_f64().unwrap();
    assert!(snr > 100.0 && snr < 1e4, "{snr}");
}
