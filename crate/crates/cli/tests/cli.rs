use std::process::{Command, Output};

fn zonalis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zonalis")).args(args).env_remove("ZONALIS_THREADS").output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = zonalis(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn value(csv: &str, key: &str) -> String {
    csv.lines().find_map(|l| l.strip_prefix(&format!("{key},"))).unwrap_or_else(|| panic!("no {key}")).to_string()
}

#[test]
fn legendre_examples() {
    let p = stdout(&["legendre", "3", "2"]);
    assert_eq!(value(&p, "polynomial"), "-1/2 + (3/2)*t^2");
    assert_eq!(value(&p, "P(1)"), "1");
    assert_eq!(value(&stdout(&["legendre", "3", "0", "--eval", "1/3"]), "P(1/3)"), "1");
    let c = stdout(&["legendre", "--n", "4", "--k", "2", "--check-identities"]);
    assert_eq!(value(&c, "ode_residual"), "0");
    assert_eq!(value(&c, "derivative_identity"), "true");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(zonalis(&["qscan", "--n", "3..x"]).status.code(), Some(2));
    assert_eq!(zonalis(&["qscan", "--n", "3", "--i", "5"]).status.code(), Some(2));
    assert_eq!(zonalis(&["legendre", "2", "1"]).status.code(), Some(2));
    assert_eq!(zonalis(&["nosuch"]).status.code(), Some(2));
    assert_eq!(zonalis(&["qscan", "--tol", "-1"]).status.code(), Some(2));
}

#[test]
fn qscan_single_cell() {
    let out = stdout(&["qscan", "--n", "3", "--k", "2", "--i", "1"]);
    let mut lines = out.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| row[header.iter().position(|h| *h == name).unwrap()];
    assert_eq!(col("min_lo"), "-5/8");
    assert_eq!(col("min_hi"), "-5/8");
    assert_eq!(col("max_lo"), "1/2");
    assert_eq!(col("max_at_one"), "holds");
}

#[test]
fn qscan_json_matches_csv_rows() {
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&["qscan", "--n", "3..4", "--k", "4", "--format", "json"])).unwrap();
    let rows = json["qscan"].as_array().unwrap();
    assert_eq!(rows.len(), 2 + 3);
    assert!(rows.iter().all(|r| r["max_at_one"] == "holds" && r["min_above"] == "holds"));
    let csv = stdout(&["qscan", "--n", "3..4", "--k", "4"]);
    assert_eq!(csv.lines().count(), 1 + rows.len());
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["qscan", "--n", "3..5", "--k", "2..8:2"];
    let one = stdout(&[&args[..], &["--parallel", "1"]].concat());
    let four = stdout(&[&args[..], &["--parallel", "4"]].concat());
    assert_eq!(one, four);
    let env = Command::new(env!("CARGO_BIN_EXE_zonalis")).args(args).env("ZONALIS_THREADS", "3").output().unwrap();
    assert_eq!(String::from_utf8(env.stdout).unwrap(), one);
    let bad = Command::new(env!("CARGO_BIN_EXE_zonalis")).args(args).env("ZONALIS_THREADS", "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn strict_mode_exit_codes() {
    let out = zonalis(&["intervals", "--n", "3", "--k", "2", "--strict"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("finding:"));
    assert_eq!(zonalis(&["intervals", "--n", "3", "--k", "2"]).status.code(), Some(0));
    assert_eq!(zonalis(&["conditions", "--berg", "3", "2", "--strict"]).status.code(), Some(0));
}

#[test]
fn conditions_examples() {
    let berg = stdout(&["conditions", "--berg", "3", "2"]);
    for c in ["C2", "C3"] {
        assert!(berg.lines().any(|l| l.starts_with(&format!("{c},pass"))), "{c} in\n{berg}");
    }
    let seg = stdout(&["conditions", "--body", "segment", "--i", "n-1"]);
    assert!(seg.lines().any(|l| l.starts_with("C3,equality,") && l.contains(",2,")), "{seg}");
    let ball = stdout(&["conditions", "--body", "ball"]);
    let verdicts: Vec<&str> =
        ball.lines().filter(|l| l.starts_with('C')).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert!(!verdicts.is_empty() && verdicts.iter().all(|v| *v == "pass"), "{ball}");
}

#[test]
fn msofixpoint_examples() {
    let summary = |args: &[&str]| -> serde_json::Value {
        let v: serde_json::Value = serde_json::from_str(&stdout(&[args, &["--format", "json"]].concat())).unwrap();
        v["summary"][0].clone()
    };
    let s = summary(&["msofixpoint", "--n", "3", "--j", "2", "--k", "2", "--eps", "1e-3", "--steps", "20"]);
    let f = s["measured_factor"].as_f64().unwrap();
    assert!((f / 0.25 - 1.0).abs() < 0.05, "{f}");
    assert_eq!(s["truncated"], false);

    let flat: serde_json::Value =
        serde_json::from_str(&stdout(&["msofixpoint", "--eps", "0", "--steps", "5", "--format", "json"])).unwrap();
    assert!(flat["trace"].as_array().unwrap().iter().all(|r| r["amplitude"] == 0.0));

    let out = zonalis(&["msofixpoint", "--eps", "0.8", "--strict"]);
    assert_eq!(out.status.code(), Some(1));
    let s = summary(&["msofixpoint", "--eps", "0.8"]);
    assert_eq!(s["truncated"], true);
}

#[test]
fn out_path_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.csv");
    let cfg = dir.path().join("scan.conf");
    std::fs::write(&cfg, "# single cell\nn = 3\nk = 2..4:2\ni = 1\nformat = json\n").unwrap();
    let direct = stdout(&["qscan", "--n", "3", "--k", "2", "--i", "1"]);
    // flags override the config file
    let r = zonalis(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "qscan",
        "--k",
        "2",
        "--format",
        "csv",
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(r.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&out).unwrap(), direct);
    let from_cfg = stdout(&["--config", cfg.to_str().unwrap(), "qscan"]);
    let v: serde_json::Value = serde_json::from_str(&from_cfg).unwrap();
    assert_eq!(v["qscan"].as_array().unwrap().len(), 2);
}

#[test]
fn other_commands_run() {
    let m = stdout(&["multipliers", "--berg", "3", "2", "--K", "6"]);
    assert_eq!(m.lines().count(), 1 + 7);
    let b = stdout(&["bodies", "--n", "3", "--body", "segment,disk"]);
    assert!(b.lines().filter(|l| l.starts_with("segment,")).all(|l| l.contains(",holds,")), "{b}");
    let f = stdout(&["fixpoint", "--body", "segment", "--n", "3", "--steps", "3"]);
    assert!(f.starts_with("summary\n") || f.contains("measured_factor"), "{f}");
}
