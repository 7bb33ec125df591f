use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str], cfg: &Path, envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pinchext"));
    cmd.args(args).arg("--config").arg(cfg);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn remark1_on_lines_through_origin_is_holomorphic() {
    let d = TempDir::new().unwrap();
    let cfg = write(
        d.path(),
        "a.cfg",
        "[function]\ngallery = remark1\n[curves]\ngenerator = lambda_over_k 1..5\n",
    );
    let out = run(&["test"], &cfg, &[]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let curves = v["curves"].as_array().unwrap();
    assert_eq!(curves.len(), 5);
    assert!(curves.iter().all(|c| c["verdict"] == "holomorphic"));
}

#[test]
fn remark1_on_constant_curve_is_negative() {
    let d = TempDir::new().unwrap();
    let cfg = write(
        d.path(),
        "a.cfg",
        "[function]\ngallery = remark1\n[curves]\ncurve = 0.2\n",
    );
    let out = run(&["test"], &cfg, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["curves"][0]["verdict"], "not-extendable");
}

#[test]
fn missing_files_are_config_errors() {
    let d = TempDir::new().unwrap();
    let out = run(&["test"], &d.path().join("absent.cfg"), &[]);
    assert_eq!(out.status.code(), Some(1));
    let cfg = write(
        d.path(),
        "a.cfg",
        "[function]\nlaurent = absent.csv\n[curves]\ncurve = 0\n",
    );
    assert_eq!(run(&["test"], &cfg, &[]).status.code(), Some(1));
}

#[test]
fn exponential_ladder_has_one_pinch_at_origin() {
    let d = TempDir::new().unwrap();
    let cfg = write(
        d.path(),
        "a.cfg",
        "[function]\ngallery = remark1\n[curves]\ngenerator = lambda_over_k 1..12\n[analysis]\ndepth = 6\n",
    );
    let out_dir = d.path().join("out");
    let out = run(&["ladder", "--out", out_dir.to_str().unwrap()], &cfg, &[]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let pinches = v["pinch"]["pinches"].as_array().unwrap();
    assert_eq!(pinches.len(), 1);
    assert_eq!(pinches[0]["l"], 1);
    let a = &pinches[0]["a"];
    assert!(a[0].as_f64().unwrap().hypot(a[1].as_f64().unwrap()) < 1e-9);
    assert!(v["bound_violations"].as_array().unwrap().is_empty());

    assert_eq!(fs::read(out_dir.join("ladder.json")).unwrap(), out.stdout);
    let csv = fs::read_to_string(out_dir.join("ladder.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,r,abs_An"));
    assert_eq!(lines.count(), 7 * 32);
}

#[test]
fn holomorphic_laurent_ladder_has_no_pinch() {
    let d = TempDir::new().unwrap();
    write(d.path(), "f.csv", "n,l,re,im\n2,1,1,0\n");
    let cfg = write(
        d.path(),
        "a.cfg",
        "[function]\nlaurent = f.csv\n[curves]\ngenerator = lambda_over_k 1..6\n[analysis]\ndepth = 4\n",
    );
    let out = run(&["ladder"], &cfg, &[]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["pinch"]["pinches"]
        .as_array()
        .unwrap()
        .is_empty());
}

#[test]
fn depth_above_limit_is_rejected() {
    let d = TempDir::new().unwrap();
    let cfg = write(
        d.path(),
        "a.cfg",
        "[function]\ngallery = remark1\n[curves]\ngenerator = lambda_over_k 1..6\n[analysis]\ndepth = 25\n",
    );
    assert_eq!(run(&["ladder"], &cfg, &[]).status.code(), Some(1));
}

#[test]
fn two_thirds_powers_are_not_a_test_sequence() {
    let d = TempDir::new().unwrap();
    let cfg = write(
        d.path(),
        "a.cfg",
        "[curves]\ngenerator = power_two_thirds 1..16\n",
    );
    let out = run(&["validate"], &cfg, &[]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["is_test"], false);
    let w: Vec<i64> = v["test_sequence"]["windings"]
        .as_array()
        .unwrap()
        .iter()
        .map(|w| w["winding"].as_i64().unwrap())
        .collect();
    assert_eq!(w, (1..=16).collect::<Vec<_>>());
}

#[test]
fn lines_through_origin_fail_general_position_at_origin() {
    let d = TempDir::new().unwrap();
    let cfg = write(
        d.path(),
        "a.cfg",
        "[curves]\ngenerator = lambda_over_k 1..8\n",
    );
    let out = run(&["validate"], &cfg, &[]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["is_test"], true);
    let probe = &v["general_position"]["probes"][0];
    assert_eq!(probe["probe"], serde_json::json!([0.0, 0.0]));
    assert_eq!(probe["passed"], false);
}

#[test]
fn empty_curve_list_is_rejected() {
    let d = TempDir::new().unwrap();
    let cfg = write(d.path(), "a.cfg", "[curves]\n[validate]\nn_bound = 3\n");
    assert_eq!(run(&["validate"], &cfg, &[]).status.code(), Some(1));
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let d = TempDir::new().unwrap();
    let cfg = write(
        d.path(),
        "a.cfg",
        "[function]\ngallery = remark1\n[curves]\ngenerator = lambda_over_k 1..4\ncurve = 0.1, 0.5\ncurve = 0.2i\n[validate]\nrandom_probes = 3\n[analysis]\nseed = 9\n",
    );
    let a = run(&["test"], &cfg, &[("PINCHEXT_THREADS", "1")]);
    let b = run(&["test"], &cfg, &[("PINCHEXT_THREADS", "4")]);
    let c = run(&["test"], &cfg, &[]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let v1 = run(&["validate"], &cfg, &[]);
    let v2 = run(&["validate"], &cfg, &[]);
    assert_eq!(v1.stdout, v2.stdout);
    assert_eq!(
        json(&v1)["general_position"]["probes"]
            .as_array()
            .unwrap()
            .len(),
        3
    );
}

#[test]
fn bad_thread_count_and_usage_errors_exit_one() {
    let d = TempDir::new().unwrap();
    let cfg = write(
        d.path(),
        "a.cfg",
        "[curves]\ngenerator = lambda_over_k 1..4\n",
    );
    assert_eq!(
        run(&["validate"], &cfg, &[("PINCHEXT_THREADS", "zero")])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(run(&["frobnicate"], &cfg, &[]).status.code(), Some(1));
    assert_eq!(
        run(&["validate", "--format", "xml"], &cfg, &[])
            .status
            .code(),
        Some(1)
    );
    let bad = write(
        d.path(),
        "b.cfg",
        "[analysis]\nepsilon = 0.7\n[curves]\ncurve = 0\n",
    );
    assert_eq!(run(&["validate"], &bad, &[]).status.code(), Some(1));
}

#[test]
fn gallery_witnesses() {
    let d = TempDir::new().unwrap();
    let cfg = write(d.path(), "a.cfg", "[gallery]\nname = example2\nk_max = 6\n");
    let out = run(&["gallery"], &cfg, &[]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let m: Vec<i64> = v["restrictions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["multiplicity"].as_i64().unwrap())
        .collect();
    assert_eq!(m, vec![1, 2, 3, 4, 5, 6]);

    let cfg = write(
        d.path(),
        "b.cfg",
        "[gallery]\nname = example1\nm_range = 6..9\n",
    );
    let out = run(&["gallery", "--format", "csv"], &cfg, &[]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("m,lambda,log10_abs_f,log10_ratio_p6\n"));
    assert_eq!(csv.lines().count(), 5);

    let cfg = write(d.path(), "c.cfg", "[gallery]\nname = example1\nc = 2\n");
    assert_eq!(run(&["gallery"], &cfg, &[]).status.code(), Some(1));
}
