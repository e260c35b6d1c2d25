//! End-to-end tests of the `qcournot` binary: flag handling, key=value and
//! CSV output, config resolution, and exit codes.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn exe() -> &'static str {
    env!("CARGO_BIN_EXE_qcournot")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("qcournot-cli").join(name);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(exe())
        .current_dir(dir)
        .env_remove("QCOURNOT_CONFIG")
        .args(args)
        .output()
        .unwrap()
}

fn run(args: &[&str]) -> Output {
    run_in(&scratch("default"), args)
}

fn kv_map(stdout: &[u8]) -> HashMap<String, String> {
    String::from_utf8(stdout.to_vec())
        .unwrap()
        .lines()
        .map(|line| {
            let (k, v) = line.split_once('=').expect("key=value line");
            (k.to_string(), v.to_string())
        })
        .collect()
}

fn value(map: &HashMap<String, String>, key: &str) -> f64 {
    map[key].parse().unwrap()
}

#[test]
fn payoff_closed_series_mc_agree() {
    let closed = run(&[
        "payoff", "--k", "4", "--gamma", "0", "--x1-sq", "2", "--x2-sq", "2", "--method", "closed",
    ]);
    assert!(closed.status.success());
    assert_eq!(String::from_utf8_lossy(&closed.stdout), "u1=2\nu2=1\n");

    let series = run(&[
        "payoff", "--k", "4", "--gamma", "0", "--x1-sq", "2", "--x2-sq", "2", "--method", "series",
    ]);
    assert!(series.status.success());
    let m = kv_map(&series.stdout);
    assert!((value(&m, "u1") - 2.0).abs() < 1e-9);
    assert!((value(&m, "u2") - 1.0).abs() < 1e-9);

    let mc = run(&[
        "payoff",
        "--k",
        "4",
        "--gamma",
        "0",
        "--x1-sq",
        "2",
        "--x2-sq",
        "2",
        "--method",
        "mc",
        "--samples",
        "1000000",
        "--seed",
        "42",
    ]);
    assert!(mc.status.success());
    let m = kv_map(&mc.stdout);
    let stderr2 = value(&m, "stderr2");
    assert!(stderr2 > 0.0);
    assert!((value(&m, "u2") - 1.0).abs() < 4.0 * stderr2);
    assert!((value(&m, "u1") - 2.0).abs() < 0.01);
}

#[test]
fn nash_closed_and_numeric() {
    let closed = run(&["nash", "--k", "4", "--gamma", "0.5235988"]);
    assert!(closed.status.success());
    let m = kv_map(&closed.stdout);
    assert!((value(&m, "x1_sq") - 3.6).abs() < 1e-5);
    assert!((value(&m, "x2_sq") - 0.6).abs() < 1e-5);
    assert_eq!(m["branch"], "interior");
    assert!((value(&m, "gamma_c") - 0.6154797086703873).abs() < 1e-9);

    let numeric = run(&[
        "nash",
        "--k",
        "4",
        "--gamma",
        "0.5235988",
        "--method",
        "numeric",
    ]);
    assert!(numeric.status.success());
    let n = kv_map(&numeric.stdout);
    assert!((value(&n, "x1_sq") - value(&m, "x1_sq")).abs() < 1e-8);
    assert!((value(&n, "x2_sq") - value(&m, "x2_sq")).abs() < 1e-8);

    let corner = run(&["nash", "--k", "1", "--gamma", "0.3"]);
    let c = kv_map(&corner.stdout);
    assert_eq!(c["x1_sq"], "1");
    assert_eq!(c["x2_sq"], "0");
    assert_eq!(c["branch"], "corner");
    assert!(!c.contains_key("gamma_c"));
}

#[test]
fn gamma_frac_flag_scales_by_quarter_pi() {
    // 2/3 of pi/4 is pi/6.
    let out = run(&[
        "nash",
        "--k",
        "4",
        "--gamma",
        "0.6666666666666666",
        "--gamma-frac",
    ]);
    assert!(out.status.success());
    let m = kv_map(&out.stdout);
    assert!((value(&m, "x1_sq") - 3.6).abs() < 1e-12);
    assert!((value(&m, "x2_sq") - 0.6).abs() < 1e-12);
}

#[test]
fn domain_violations_exit_nonzero_with_reason() {
    let out = run(&["nash", "--k", "4", "--gamma", "0.79"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error:"), "{err}");
    assert_eq!(err.lines().count(), 1);

    let out = run(&["nash", "--k", "0.5", "--gamma", "0.3"]);
    assert!(!out.status.success());

    let out = run(&[
        "payoff", "--k", "4", "--gamma", "0", "--x1-sq", "-1", "--x2-sq", "0",
    ]);
    assert!(!out.status.success());
}

#[test]
fn sweep_csv_contents() {
    let dir = scratch("sweep");
    let out_path = dir.join("one.csv");
    let out = run_in(
        &dir,
        &[
            "--out",
            out_path.to_str().unwrap(),
            "sweep",
            "--k-min",
            "4",
            "--k-max",
            "4",
            "--k-steps",
            "1",
            "--gamma-min",
            "0",
            "--gamma-max",
            "0",
            "--gamma-steps",
            "1",
        ],
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "k,inv_k,gamma,x1_sq,x2_sq,x1_sq_over_k,x2_sq_over_k,U1,U2,U1_over_k2,U2_over_k2,sum_over_k2,diff_over_k2,branch,region"
    );
    let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(fields.len(), 15);
    let u1_over_k2: f64 = fields[9].parse().unwrap();
    assert!((u1_over_k2 - 25.0 / 144.0).abs() < 1e-12);

    // A k = 2 stripe has an all-zero U2 column.
    let out = run_in(
        &dir,
        &[
            "sweep",
            "--k-min",
            "2",
            "--k-max",
            "2",
            "--k-steps",
            "1",
            "--gamma-min",
            "0",
            "--gamma-max",
            "0.7",
            "--gamma-steps",
            "8",
        ],
    );
    assert!(out.status.success());
    for line in String::from_utf8_lossy(&out.stdout).lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[8], "0", "U2 must vanish at k = 2: {line}");
    }
}

#[test]
fn regions_csv_contents() {
    let out = run(&[
        "regions",
        "--k-min",
        "10",
        "--k-max",
        "10",
        "--k-steps",
        "1",
        "--gamma-min",
        "0.05",
        "--gamma-max",
        "0.05",
        "--gamma-steps",
        "1",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "k,inv_k,gamma,cos_2gamma,region");
    let row = lines.next().unwrap();
    assert!(row.starts_with("10,0.1,0.05,"), "{row}");
    assert!(row.ends_with(",D"), "{row}");
}

#[test]
fn loss_check_reports_and_exits_zero() {
    let out = run(&[
        "loss-check",
        "--k",
        "4",
        "--gamma",
        "0.3",
        "--x1",
        "1.5",
        "--x2",
        "0.8",
        "--kappa-t",
        "0",
    ]);
    assert!(out.status.success());
    let m = kv_map(&out.stdout);
    assert_eq!(m["max_deviation"], "0");
    assert_eq!(m["within_tolerance"], "true");

    let out = run(&[
        "loss-check",
        "--k",
        "4",
        "--gamma",
        "0.3",
        "--x1",
        "1.5",
        "--x2",
        "0.8",
        "--kappa-t",
        "1.386294",
    ]);
    assert!(out.status.success());
    let m = kv_map(&out.stdout);
    assert!(value(&m, "max_deviation") < 1e-12);

    let out = run(&[
        "loss-check",
        "--k",
        "4",
        "--gamma",
        "0.3",
        "--x1",
        "1.5",
        "--x2",
        "0.8",
        "--kappa-t",
        "-1",
    ]);
    assert!(!out.status.success());
}

#[test]
fn classical_subcommands() {
    let out = run(&[
        "classical",
        "payoffs",
        "--k",
        "4",
        "--q1",
        "1",
        "--q2",
        "1",
        "--dist",
        "poisson",
    ]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "u1=2\nu2=1\n");

    let out = run(&["classical", "mandel-q", "--q2", "1", "--dist", "const:2"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "Q=1\ng2=2\n");

    let out = run(&["classical", "nash", "--k", "5", "--dist", "poisson"]);
    assert!(out.status.success());
    let m = kv_map(&out.stdout);
    assert!((value(&m, "q1") - 2.0).abs() < 1e-9);
    assert!((value(&m, "q2") - 1.0).abs() < 1e-9);

    let out = run(&["classical", "poisson-eq", "--k", "2"]);
    assert!(out.status.success());
    let m = kv_map(&out.stdout);
    assert_eq!(m["q1"], "1");
    assert_eq!(m["u2"], "0");

    let out = run(&["classical", "advantage", "--k", "5", "--dist", "poisson"]);
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8_lossy(&out.stdout),
        "firm2_advantage=false\n"
    );

    let out = run(&["classical", "nash", "--k", "5", "--dist", "bogus"]);
    assert!(!out.status.success());
}

#[test]
fn config_file_and_env_and_flag_precedence() {
    let dir = scratch("config");
    // Config in the working directory is picked up automatically.
    std::fs::write(
        dir.join("qcournot.conf"),
        "default_k=5\noutput_precision=5\n",
    )
    .unwrap();
    let out = run_in(&dir, &["classical", "poisson-eq"]);
    assert!(out.status.success());
    let m = kv_map(&out.stdout);
    assert_eq!(m["q1"], "2"); // (5+1)/3
    assert_eq!(m["u1"], "4");

    // The environment variable points somewhere else.
    let alt = dir.join("alt.conf");
    std::fs::write(&alt, "default_k=10\n").unwrap();
    let out = Command::new(exe())
        .current_dir(&dir)
        .env("QCOURNOT_CONFIG", alt.to_str().unwrap())
        .args(["classical", "poisson-eq"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let m = kv_map(&out.stdout);
    assert!((value(&m, "q1") - 11.0 / 3.0).abs() < 1e-9);

    // An explicit --config beats the environment.
    let flag = dir.join("flag.conf");
    std::fs::write(&flag, "default_k=3\n").unwrap();
    let out = Command::new(exe())
        .current_dir(&dir)
        .env("QCOURNOT_CONFIG", alt.to_str().unwrap())
        .args([
            "--config",
            flag.to_str().unwrap(),
            "classical",
            "poisson-eq",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let m = kv_map(&out.stdout);
    assert!((value(&m, "q1") - 4.0 / 3.0).abs() < 1e-9);

    // Flags override whatever the config said, and the configured
    // 5-digit output precision shows in the formatting.
    let out = run_in(&dir, &["classical", "poisson-eq", "--k", "4"]);
    let m = kv_map(&out.stdout);
    assert_eq!(m["q1"], "1.6667");

    // A broken config is a one-line error.
    std::fs::write(dir.join("qcournot.conf"), "nonsense=1\n").unwrap();
    let out = run_in(&dir, &["classical", "poisson-eq"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn unwritable_out_path_fails() {
    let out = run(&[
        "--out",
        "/nonexistent-dir/x.csv",
        "sweep",
        "--k-min",
        "2",
        "--k-max",
        "2",
        "--k-steps",
        "1",
        "--gamma-min",
        "0",
        "--gamma-max",
        "0",
        "--gamma-steps",
        "1",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}
