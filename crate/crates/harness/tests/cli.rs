use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn qd(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qd"))
        .args(args)
        .env_remove("QD_SEED")
        .output()
        .expect("spawn qd")
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

fn rows(dir: &Path) -> Vec<csv::StringRecord> {
    let mut r = csv::Reader::from_path(dir.join("trace.csv")).unwrap();
    assert_eq!(r.headers().unwrap(), vec!["k", "f", "grad_norm", "R", "step", "dist", "G"]);
    r.records().map(|x| x.unwrap()).collect()
}

#[test]
fn adaptive_convex_quartic_reaches_threshold() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let o = qd(&[
        "run", "--problem", "convex_quartic", "--algo", "adaptive", "--eta", "1", "--tau", "0.15",
        "--x0", "0.5,0.5", "--stop-kind", "distance", "--stop-threshold", "1e-6", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(&out);
    assert_eq!(s["terminated_by"], "stop_rule");
    assert!(s["iterations"].as_u64().unwrap() <= 200);
    assert_eq!(rows(&out).len() as u64, s["iterations"].as_u64().unwrap() + 1);
}

#[test]
fn gd_plateaus_on_convex_quartic() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("gd");
    let o = qd(&[
        "run", "--problem", "convex_quartic", "--algo", "gd", "--eta", "1", "--max-iters", "200",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let s = summary(&out);
    assert_eq!(s["terminated_by"], "budget");
    assert!(s["final_diagnostic"].as_f64().unwrap() >= 1e-3);
}

#[test]
fn high_threshold_never_triggers_polyak() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("q");
    let o = qd(&["run", "--problem", "quartic_1d", "--tau", "0.16", "--max-iters", "50", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let r = rows(&out);
    assert_eq!(r.len(), 51);
    assert!(r[..50].iter().all(|row| &row[4] == "gd"));
}

#[test]
fn config_file_with_flag_override() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("exp.toml");
    std::fs::write(&cfg, "problem = \"quadratic_1d\"\nalgo = \"gd\"\neta = 0.5\nmax_iters = 7\n").unwrap();
    let out = tmp.path().join("cfg");
    let o = qd(&["run", "--config", cfg.to_str().unwrap(), "--max-iters", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(&out);
    assert_eq!(s["iterations"], 3);
    assert_eq!(s["config"]["stepsize"], 0.5);
}

#[test]
fn invalid_spec_exits_nonzero() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("bad");
    for args in [
        vec!["run", "--problem", "no_such_problem"],
        vec!["run", "--problem", "convex_quartic", "--x0", "1,2,3"],
        vec!["run", "--problem", "convex_quartic", "--tau", "-1"],
    ] {
        let mut a = args.clone();
        a.extend(["--out", out.to_str().unwrap()]);
        let o = qd(&a);
        assert!(!o.status.success(), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    }
}

#[test]
fn diverging_run_exits_nonzero() {
    let tmp = tempfile::tempdir().unwrap();
    let o = qd(&[
        "run", "--problem", "nonconvex_quartic", "--algo", "gd", "--eta", "1", "--out",
        tmp.path().join("div").to_str().unwrap(),
    ]);
    assert!(!o.status.success());
}

#[test]
fn seed_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("env");
    let o = Command::new(env!("CARGO_BIN_EXE_qd"))
        .args(["run", "--problem", "quadratic_sensing", "--max-iters", "2", "--out", out.to_str().unwrap()])
        .env("QD_SEED", "7")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(summary(&out)["seed"], 7);
}

#[test]
fn identical_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let read = |name: &str| {
        let out = tmp.path().join(name);
        let o = qd(&["run", "--problem", "quadratic_sensing", "--seed", "7", "--max-iters", "500", "--record-g", "--out", out.to_str().unwrap()]);
        assert!(o.status.success());
        std::fs::read(out.join("trace.csv")).unwrap()
    };
    assert_eq!(read("a"), read("b"));
}

#[test]
fn grid_over_adaptive_parameters() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("grid");
    let o = qd(&[
        "grid", "--problem", "convex_quartic", "--etas", "0.5,1", "--taus", "0.1,0.15", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut r = csv::Reader::from_path(out.join("grid.csv")).unwrap();
    assert_eq!(r.records().count(), 4);
    let best: Value = serde_json::from_str(&std::fs::read_to_string(out.join("best.json")).unwrap()).unwrap();
    assert_eq!(best["row"]["reached_stop"], true);
}

#[test]
fn block_grid_prefers_unit_blocks() {
    let tmp = tempfile::tempdir().unwrap();
    let o = qd(&[
        "grid", "--problem", "convex_quartic", "--algo", "block", "--stepsizes", "0.5,1", "--block-lens",
        "1,5,50", "--out", tmp.path().join("g").to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let best: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(best["block_len"], 1);
    assert_eq!(best["stepsize"], 1.0);
}

#[test]
fn verify_exit_codes() {
    for p in ["convex_quartic", "nonconvex_quartic"] {
        let o = qd(&["verify", "--problem", p]);
        assert!(o.status.success(), "{p}");
        let r: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(r["passed"], true);
    }
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("sensing.json");
    let o = qd(&["verify", "--problem", "quadratic_sensing", "--seed", "7", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(r["checks"][0]["name"], "gradient_fd");
    assert_eq!(r["checks"][0]["status"], "pass");
    assert!(!qd(&["verify", "--problem", "nope"]).status.success());
}

#[test]
fn figure_bundles() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("fig1");
    assert!(qd(&["figure-data", "--figure", "fig1", "--out", dir.to_str().unwrap()]).status.success());
    let mut s = csv::Reader::from_path(dir.join("surface.csv")).unwrap();
    assert_eq!(s.headers().unwrap(), vec!["v", "u", "f"]);
    assert_eq!(s.records().count(), 101 * 101);
    let mut r = csv::Reader::from_path(dir.join("ravine.csv")).unwrap();
    for row in r.records() {
        let row = row.unwrap();
        let (v, u): (f64, f64) = (row[0].parse().unwrap(), row[1].parse().unwrap());
        assert_eq!(v, -(u * u) * (u * u));
    }

    let dir = tmp.path().join("fig3");
    assert!(qd(&["figure-data", "--figure", "fig3", "--out", dir.to_str().unwrap()]).status.success());
    let m: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    let traces = m["traces"].as_array().unwrap();
    assert_eq!(traces.len(), 8);
    for t in traces {
        assert_eq!(t["x0"], serde_json::json!([0.5, 0.5]));
        if let Some(f) = t["file"].as_str() {
            assert!(dir.join(f).exists());
        }
    }
    let adaptive_g = traces
        .iter()
        .find(|t| t["problem"] == "nonconvex_quartic" && t["method"] == "adaptive")
        .unwrap();
    assert_eq!(adaptive_g["params"], serde_json::json!({ "eta": 1.0, "tau": 0.12 }));

    assert!(!qd(&["figure-data", "--figure", "fig9", "--out", dir.to_str().unwrap()]).status.success());
}
