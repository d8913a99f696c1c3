use std::path::Path;
use std::process::{Command, Output};

use rwre::lepskii::{adaptive_estimate, ZPolicy};
use rwre::walk_sim::io::read_csv;

const BETA43: &str = r#"{"type":"beta","a":4,"b":3}"#;

fn rwre(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rwre")).args(args).env_remove("RWRE_SEED").output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn manifest_matches(dir: &Path) {
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    let outputs = manifest["outputs"].as_array().unwrap();
    assert!(!outputs.is_empty());
    for entry in outputs {
        let bytes = std::fs::read(dir.join(entry["path"].as_str().unwrap())).unwrap();
        assert_eq!(entry["bytes"].as_u64().unwrap(), bytes.len() as u64);
        assert_eq!(entry["sha256"].as_str().unwrap().len(), 64);
    }
}

#[test]
fn simulate_then_estimate_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    let out = rwre(&["simulate", "--spec", BETA43, "--n", "100", "--seed", "1", "--out", p(&sim)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    manifest_matches(&sim);
    let text = std::fs::read_to_string(sim.join("zpath.csv")).unwrap();
    let record = read_csv(text.as_bytes()).unwrap();
    assert_eq!(record.path.z[0], 0);
    assert_eq!(record.seed, 1);

    let est = dir.path().join("est");
    let out = rwre(&["estimate", p(&sim.join("zpath.csv")), "--out", p(&est)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    manifest_matches(&est);
    let lib = adaptive_estimate(&record.path, ZPolicy::Auto).unwrap();
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(est.join("lepskii.json")).unwrap()).unwrap();
    assert_eq!(json["chosen_M"].as_u64().unwrap() as usize, lib.chosen_m);
    let grid: Vec<f64> = json["final_grid"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert_eq!(grid, lib.final_estimate.grid_values);
    let csv = std::fs::read_to_string(est.join("estimate.csv")).unwrap();
    let (back, _) = rwre::estimators::io::read_csv(csv.as_bytes()).unwrap();
    assert_eq!(back, lib.final_estimate);
}

#[test]
fn fixed_z_overrides_auto() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    assert_eq!(code(&rwre(&["simulate", "--spec", BETA43, "--n", "60", "--seed", "3", "--out", p(&sim)])), 0);
    let est = dir.path().join("est");
    let out = rwre(&["estimate", p(&sim.join("zpath.csv")), "--z", "1.0", "--all-estimates", "--out", p(&est)]);
    assert_eq!(code(&out), 0);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(est.join("lepskii.json")).unwrap()).unwrap();
    assert_eq!(json["z"].as_f64().unwrap(), 1.0);
    let m_max = json["M_max"].as_u64().unwrap();
    assert_eq!(std::fs::read_dir(est.join("estimates")).unwrap().count() as u64, m_max);
}

#[test]
fn binary_format_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    let args = ["simulate", "--spec", BETA43, "--n", "80", "--seed", "5", "--format", "binary", "--out", p(&sim)];
    assert_eq!(code(&rwre(&args)), 0);
    let est = dir.path().join("est");
    assert_eq!(code(&rwre(&["estimate", p(&sim.join("zpath.bin")), "--out", p(&est)])), 0);
}

#[test]
fn deterministic_given_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let out = Command::new(env!("CARGO_BIN_EXE_rwre"))
            .args(["simulate", "--spec", BETA43, "--n", "50", "--out", p(d)])
            .env("RWRE_SEED", "77")
            .output()
            .unwrap();
        assert_eq!(code(&out), 0);
    }
    assert_eq!(std::fs::read(a.join("zpath.csv")).unwrap(), std::fs::read(b.join("zpath.csv")).unwrap());
    assert!(std::fs::read_to_string(a.join("zpath.csv")).unwrap().contains("seed=77"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("x");
    let out = rwre(&["simulate", "--spec", r#"{"type":"beta","a":4}"#, "--n", "10", "--out", p(&out_dir)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains('b'));
    assert_eq!(code(&rwre(&["simulate", "--spec", "{not json", "--n", "10", "--out", p(&out_dir)])), 2);
    assert_eq!(code(&rwre(&["estimate", p(&dir.path().join("missing.csv")), "--out", p(&out_dir)])), 2);
    assert_eq!(code(&rwre(&["estimate", "x.csv", "--z", "-3", "--out", p(&out_dir)])), 2);

    let out = rwre(&["simulate", "--spec", BETA43, "--n", "1000", "--max-steps", "50", "--out", p(&out_dir)]);
    assert_eq!(code(&out), 3);

    let sim = dir.path().join("flat");
    let spec = r#"{"type":"discrete","atoms":[[1.0,0.9999999]]}"#;
    assert_eq!(code(&rwre(&["simulate", "--spec", spec, "--n", "5", "--out", p(&sim)])), 0);
    assert_eq!(code(&rwre(&["estimate", p(&sim.join("zpath.csv")), "--out", p(&out_dir)])), 4);

    let recurrent = r#"{"spec":{"type":"beta","a":3,"b":3},"n":100,"replications":5}"#;
    assert_eq!(code(&rwre(&["replicate", "--clt", "--config", recurrent, "--out", p(&out_dir)])), 5);
    assert_eq!(code(&rwre(&["replicate", "--table1", "--config", r#"{"bogus":1}"#, "--out", p(&out_dir)])), 2);
}

#[test]
fn branching_engine_on_recurrent_law() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    let spec = r#"{"type":"beta","a":3,"b":3}"#;
    let out = rwre(&["simulate", "--spec", spec, "--n", "500", "--seed", "2", "--engine", "branching", "--out", p(&sim)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(std::fs::read_to_string(sim.join("zpath.csv")).unwrap().contains("# engine=branching"));
}

#[test]
fn table1_reports_theoretical_rate() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("t");
    let cfg = r#"{"n_values":[100,200],"replications":3}"#;
    let out = rwre(&["replicate", "--table1", "--config", cfg, "--workers", "2", "--out", p(&out_dir)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    manifest_matches(&out_dir);
    let csv = std::fs::read_to_string(out_dir.join("risk_table.csv")).unwrap();
    let rate: f64 = csv.lines().nth(1).unwrap().rsplit(',').next().unwrap().parse().unwrap();
    assert!((rate - 0.25).abs() < 1e-9);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("risk_summary.json")).unwrap()).unwrap();
    assert!(summary["slope"].is_number());
}

#[test]
fn figure_preset_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("f");
    let out = rwre(&["replicate", "--figures", "fig4", "--seed", "1", "--out", p(&out_dir)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    manifest_matches(&out_dir);
    for f in ["exact_cdf.csv", "estimate.csv", "empirical_env.csv", "summary.json"] {
        assert!(out_dir.join("fig4").join(f).exists(), "{f}");
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("fig4/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["n"], 500);
    for key in ["M_hat", "T_n", "N_inf"] {
        assert!(summary[key].is_number(), "{key}");
    }
}

#[test]
fn verification_modes_write_reports() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().join("c");
    let out = rwre(&["replicate", "--concentration", "--config", r#"{"replications":40,"n":100}"#, "--out", p(&c)]);
    assert_eq!(code(&out), 0);
    assert!(std::fs::read_to_string(c.join("concentration.csv")).unwrap().starts_with("z,nominal"));
    let o = dir.path().join("o");
    let cfg = r#"{"replications":4,"n":300,"m_list":[1,2],"tail_samples":500}"#;
    assert_eq!(code(&rwre(&["replicate", "--occupation", "--config", cfg, "--out", p(&o)])), 0);
    assert!(o.join("occupation_report.json").exists());
    let k = dir.path().join("k");
    let cfg = r#"{"replications":10,"n":200,"alpha":0,"beta":1}"#;
    assert_eq!(code(&rwre(&["replicate", "--clt", "--config", cfg, "--out", p(&k)])), 0);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(k.join("clt_report.json")).unwrap()).unwrap();
    assert!(report["variance_bounds"].is_array());
}
