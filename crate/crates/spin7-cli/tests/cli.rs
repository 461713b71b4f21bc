use std::path::Path;
use std::process::{Command, Output};

use spin7::closed_form_solutions::v_of_y;

fn spin7(args: &[&str], out_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_spin7"));
    cmd.args(args).env_remove("SPIN7_OUT_DIR");
    if let Some(d) = out_dir {
        cmd.env("SPIN7_OUT_DIR", d);
    }
    cmd.output().expect("binary runs")
}

fn rows(text: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn a8_flow_is_ricci_flat_and_written_under_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = spin7(&["flow", "--family", "A8", "--t-end", "20", "--out", "a8.csv"], Some(dir.path()));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("a8.csv")).unwrap();
    assert!(text.starts_with("t,a,b,c,ricci_residual,el_residual,TplusV\n"));
    let rows = rows(&text);
    let last = rows.last().unwrap();
    assert!((num(&last[0]) - 20.0).abs() < 1e-12);
    assert!(num(&last[4]) < 1e-8);
    // 17 significant digits
    assert_eq!(last[1].split('e').next().unwrap().replace(['.', '-'], "").len(), 17);
}

#[test]
fn flat_data_moves_in_straight_lines() {
    let out = spin7(&["flow", "--a", "1", "--b", "-1", "--c", "1", "--t-end", "3"], None);
    assert_eq!(out.status.code(), Some(0));
    for r in rows(&String::from_utf8(out.stdout).unwrap()) {
        let t = num(&r[0]);
        assert!((num(&r[1]) - (1.0 + t / 2.0)).abs() < 1e-9);
        assert!((num(&r[2]) + (1.0 + t / 2.0)).abs() < 1e-9);
        assert!((num(&r[3]) - (1.0 + t / 2.0)).abs() < 1e-9);
    }
}

#[test]
fn singular_flow_exits_2_with_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let out = spin7(&["flow", "--a", "1", "--b", "3", "--c", "1", "--out", path.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(rows(&std::fs::read_to_string(&path).unwrap()).len() > 10);
}

#[test]
fn usage_errors_exit_1() {
    for args in [
        &["flow", "--r-min", "3", "--r-max", "1"][..],
        &["flow", "--tol", "-1"],
        &["classify"],
        &["classify", "--k", "1", "--kappa", "0"],
        &["metric", "--family", "Nope"],
        &["flow", "--bogus"],
        &["phase-portrait", "--z-min", "0", "--z-max", "2", "--nz", "3"],
    ] {
        let out = spin7(args, None);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(spin7(&["--help"], None).status.code(), Some(0));
}

#[test]
fn classification_examples() {
    let b8 = json(&spin7(&["classify", "--k", "0", "--family", "B8"], None));
    assert_eq!(b8["branch"], "B8");

    let m = json(&spin7(&["classify", "--k", "1"], None));
    assert_eq!(m["branch"], "B8minus");
    let z0 = m["z0"].as_f64().unwrap();
    assert!(z0 > 0.0 && z0 < 1.0);

    let p = json(&spin7(&["classify", "--kappa", "0"], None));
    assert_eq!(p["branch"], "B8plus");
    let y0 = p["y0"].as_f64().unwrap();
    assert!((v_of_y(0.0, y0).unwrap() - 2.0).abs() < 1e-10);
    assert!(p["asymptotic_circle_radius"].as_f64().unwrap() > 0.0);
}

#[test]
fn phase_portrait_grid_and_trajectories() {
    let dir = tempfile::tempdir().unwrap();
    let out = spin7(
        &["phase-portrait", "--z-min", "0.25", "--z-max", "0.75", "--nz", "3", "--v-min", "0", "--v-max", "4", "--nv", "3", "--out", "pp.csv"],
        Some(dir.path()),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let grid = rows(&std::fs::read_to_string(dir.path().join("pp.csv")).unwrap());
    assert_eq!(grid.len(), 9);
    let mid = grid.iter().find(|r| num(&r[0]) == 0.5 && num(&r[1]) == 2.0).unwrap();
    assert_eq!((num(&mid[2]), num(&mid[3])), (0.75, 3.0));
    let traj = rows(&std::fs::read_to_string(dir.path().join("pp.trajectories.csv")).unwrap());
    for class in ["A8", "B8", "B8minus", "B8plus"] {
        assert!(traj.iter().any(|r| r[0] == class), "{class}");
    }
}

#[test]
fn identical_runs_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["one.csv", "two.csv"] {
        let out = spin7(&["metric", "--k", "1", "--n", "30", "--out", name], Some(dir.path()));
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(dir.path().join("one.csv")).unwrap();
    let b = std::fs::read(dir.path().join("two.csv")).unwrap();
    assert_eq!(a, b);
    assert_eq!(rows(&String::from_utf8(a).unwrap()).len(), 30);
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "family = \"B8\"\nn = 5\nr-min = 3.5\nr-max = 6.0\n").unwrap();
    let from_file = spin7(&["metric", "--config", cfg.to_str().unwrap()], None);
    assert_eq!(from_file.status.code(), Some(0));
    let r = rows(&String::from_utf8(from_file.stdout).unwrap());
    assert_eq!(r.len(), 5);
    assert_eq!(num(&r[0][0]), 3.5);
    let overridden = spin7(&["metric", "--config", cfg.to_str().unwrap(), "--n", "7"], None);
    assert_eq!(rows(&String::from_utf8(overridden.stdout).unwrap()).len(), 7);
    std::fs::write(&cfg, "colour = 3\n").unwrap();
    assert_eq!(spin7(&["metric", "--config", cfg.to_str().unwrap()], None).status.code(), Some(1));
}

#[test]
fn harmonic_summary_and_profile() {
    let dir = tempfile::tempdir().unwrap();
    let out = spin7(&["harmonic", "--family", "A8", "--json", "--out", "h.csv", "--n", "11"], Some(dir.path()));
    assert_eq!(out.status.code(), Some(0));
    let s = json(&out);
    assert_eq!(s["quoted"], "9/4");
    assert!(s["relative_error"].as_f64().unwrap() < 1e-9);
    assert_eq!(rows(&std::fs::read_to_string(dir.path().join("h.csv")).unwrap()).len(), 11);
    // no L² anti-self-dual form on A8
    assert_eq!(spin7(&["harmonic", "--family", "A8", "--duality", "asd"], None).status.code(), Some(2));
}

#[test]
fn verify_groups_and_sign_flip() {
    assert_eq!(spin7(&["verify", "superpotential"], None).status.code(), Some(0));
    let flipped = spin7(&["verify", "superpotential", "--sign-flip", "--json"], None);
    assert_eq!(flipped.status.code(), Some(2));
    let rep = json(&flipped);
    assert_eq!(rep["criteria"][0]["passed"], false);
    assert!(String::from_utf8_lossy(&flipped.stderr).contains("failing criteria: [1]"));
    assert_eq!(spin7(&["verify", "holonomy"], None).status.code(), Some(0));
}

#[test]
fn report_json_lists_every_criterion() {
    let out = spin7(&["report", "--json"], None);
    let rep = json(&out);
    let criteria = rep["criteria"].as_array().unwrap();
    assert_eq!(criteria.iter().map(|c| c["id"].as_u64().unwrap()).collect::<Vec<_>>(), (1..=12).collect::<Vec<u64>>());
    for c in criteria {
        assert!(c["title"].is_string() && c["passed"].is_boolean() && c["measured"].is_object());
    }
    assert!((rep["measure_calibration"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let failing: Vec<u64> = criteria.iter().filter(|c| c["passed"] == false).map(|c| c["id"].as_u64().unwrap()).collect();
    let code = out.status.code();
    if failing.is_empty() {
        assert_eq!(code, Some(0));
    } else {
        assert_eq!(code, Some(2));
        assert!(String::from_utf8_lossy(&out.stderr).contains(&format!("{failing:?}")));
    }
}
