use std::fs;
use std::process::{Command, Output};

fn orw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orw")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn dp_writes_pmf() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pmf.csv");
    let o = orw(&["dp", "--delta", "0", "--steps", "100", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("N,delta,x,a,p\n100,"));
}

#[test]
fn exact_dp_prints_rationals() {
    let o = orw(&["dp", "--delta", "4", "--steps", "2", "--exact"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains(",0,1,5/6"), "{text}");
    assert!(text.contains(",2,2,1/6"), "{text}");
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let o = orw(&["mc", "--delta", "1.5", "--steps", "40", "--walks", "20000", "--seed", "9", "--out", p.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        fs::read(p).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn density_table_shows_series_switch() {
    let o = orw(&["density", "--delta", "4", "--t", "1", "--quantity", "Q", "--grid", "0.05:3:60"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 61);
    assert_eq!(lines[0], "t,delta,coord,value,method,terms,tail_bound");
    assert!(text.contains("poisson_series") && text.contains("direct_series"));
}

#[test]
fn domain_error_leaves_no_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let o = orw(&["dp", "--delta", "-2", "--steps", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(!out.exists());
}

#[test]
fn convergence_error_exit_code() {
    let o = orw(&["moments", "--m", "0.3", "--quad-tol", "1e-300"]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn usage_errors() {
    assert_eq!(code(&orw(&["dp", "--steps", "3"])), 64);
    assert_eq!(code(&orw(&["frobnicate"])), 64);
    assert_eq!(code(&orw(&["density", "--delta", "0", "--t", "1", "--quantity", "Q", "--grid", "3:1:4"])), 64);
    assert_eq!(code(&orw(&["--help"])), 0);
}

#[test]
fn gf_check_and_alternate_form() {
    let dir = tempfile::tempdir().unwrap();
    let coeffs = dir.path().join("c.csv");
    let o = orw(&["gf-check", "--delta", "2", "--steps", "8", "--coeffs", coeffs.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8(o.stdout).unwrap().contains("\"identical\": true"));
    assert!(fs::read_to_string(coeffs).unwrap().starts_with("a,N,x,coeff\n"));
    let o = orw(&["gf-check", "--delta", "4", "--steps", "6", "--form", "alternate"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"delta": 4, "steps": 50}"#).unwrap();
    let o = orw(&["dp", "--config", cfg.to_str().unwrap(), "--steps", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("2,4.0"));
}

#[test]
fn moments_and_bridge_tables() {
    let o = orw(&["moments", "--m", "1"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("quantity,k,m,t,method,value,tolerance\n"));
    assert!(text.contains("walker_mean,1,1.0000000000000000e0,1.0000000000000000e0,closed_form,3.4245"));
    let o = orw(&["--workers", "1", "bridge", "--delta", "0", "--eps", "0.1,0.05"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 3);
}

#[test]
fn bounds_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("b.json");
    let args = ["bounds", "--steps", "2500", "--gammas", "0.5,1,2", "--json", json.to_str().unwrap()];
    assert_eq!(code(&orw(&args)), 3);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["passed"], false);
    let mut args = args.to_vec();
    args.extend(["--band", "limit-consistent"]);
    assert_eq!(code(&orw(&args)), 0);
}

#[test]
fn verify_selected_criteria() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let o = orw(&["verify", "--suite", "A2,4", "--json", json.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("A2  PASS"));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["criteria"].as_array().unwrap().len(), 2);
    assert_eq!(code(&orw(&["verify", "--suite", "6"])), 3);
    assert_eq!(code(&orw(&["verify", "--suite", "11"])), 1);
}
