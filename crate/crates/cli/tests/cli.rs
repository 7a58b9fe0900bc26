use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_adaptive-mls"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

/// Columns 1.. of a CSV with a header row.
fn columns(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn collinear_points_are_reproduced_at_midpoints() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "line.csv", "x,f\n0,1\n1,3\n2,5\n3,7\n4,9\n");
    let out = run(&["approx", "--in", &input, "--degree", "1", "--eval", "midpoints"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("x,value_linear,value_nonlinear\n"));
    let rows = columns(&text);
    assert_eq!(rows.len(), 4);
    for r in rows {
        let line = 2.0 * r[0] + 1.0;
        assert!((r[1] - line).abs() <= 1e-10);
        assert!((r[2] - line).abs() <= 1e-10);
    }
}

#[test]
fn step_data_nonlinear_is_monotone_and_linear_overshoots() {
    let dir = tempfile::tempdir().unwrap();
    let text: String = (0..=40)
        .map(|i| {
            let x = i as f64 / 40.0;
            format!("{x},{}\n", if x < 0.5 { 0.0 } else { 1.0 })
        })
        .collect();
    let input = write(dir.path(), "step.csv", &text);
    let out = run(&["approx", "--in", &input, "--kernel", "W2", "--degree", "2", "--eval", "0:1:401"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = columns(&stdout(&out));
    let lin: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    let nl: Vec<f64> = rows.iter().map(|r| r[2]).collect();
    assert!(nl.windows(2).all(|w| w[1] >= w[0] - 1e-9));
    assert!(nl.iter().all(|v| (-1e-9..=1.0 + 1e-9).contains(v)));
    let overshoot = lin.iter().map(|v| (v - 1.0).max(-v)).fold(0.0, f64::max);
    assert!(overshoot > 1e-2, "linear overshoot {overshoot}");
}

#[test]
fn too_few_members_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "three.csv", "0,1\n1,2\n2,3\n");
    let out = run(&["approx", "--in", &input, "--degree", "3"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("members"), "{}", stderr(&out));
}

#[test]
fn malformed_row_reports_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "bad.csv", "0,1\n1,2\n2,x\n3,4\n");
    let out = run(&["approx", "--in", &input]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("bad.csv:3:"), "{}", stderr(&out));
}

#[test]
fn uncovered_evaluation_point_fails() {
    let dir = tempfile::tempdir().unwrap();
    let text: String = (0..=20).map(|i| format!("{},{}\n", i as f64 / 20.0, i)).collect();
    let input = write(dir.path(), "data.csv", &text);
    let out = run(&["approx", "--in", &input, "--degree", "1", "--eval", "0:5:3"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("no active subdomain"), "{}", stderr(&out));
}

#[test]
fn empty_level_list_is_a_usage_error() {
    let out = run(&["convergence", "--levels", ""]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("empty level list"));
}

#[test]
fn convergence_table_matches_reference_values() {
    let out = run(&["convergence", "--kernel", "W2", "--degree", "2", "--method", "linear", "--levels", "8-9"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        stdout(&out),
        "level,N,h,mae,rate\n\
         8,257,2.3438e-02,2.5460e-05,\n\
         9,513,1.1719e-02,1.5964e-06,3.9954\n"
    );
}

#[test]
fn output_is_identical_across_runs_and_thread_counts() {
    let args = [
        "convergence", "--grid", "random", "--seed", "3", "--levels", "6-8", "--kernel", "W2,G", "--degree", "2,3",
    ];
    let one = bin().args(args).env("ADAPTIVE_MLS_THREADS", "1").output().unwrap();
    let many = bin().args(args).env("ADAPTIVE_MLS_THREADS", "4").output().unwrap();
    let again = bin().args(args).env("ADAPTIVE_MLS_THREADS", "4").output().unwrap();
    assert!(one.status.success(), "{}", stderr(&one));
    assert_eq!(one.stdout, many.stdout);
    assert_eq!(many.stdout, again.stdout);
}

#[test]
fn convergence_directory_output_has_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("tables");
    let out = run(&[
        "convergence", "--kernel", "W2,W4", "--degree", "2", "--levels", "6-7", "--out", out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    for name in ["MLSPU2_W2_uniform.csv", "NL-MLSPU2_W4_uniform.csv", "summary.csv"] {
        assert!(out_dir.join(name).exists(), "{name} missing");
    }
    let summary = fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    assert!(summary.starts_with("method,kernel,degree,grid,levels,final_mae,mean_rate\n"));
    assert_eq!(summary.lines().count(), 5);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.cfg", "# defaults\nkernel=W4\ndegree=3\nlevels=6-7\nmethod=linear\n");
    let out = run(&["convergence", "--config", &cfg, "--degree", "2", "--out", dir.path().join("t").to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(dir.path().join("t/MLSPU2_W4_uniform.csv").exists());
    assert!(!dir.path().join("t/MLSPU3_W4_uniform.csv").exists());

    let bad = write(dir.path(), "bad.cfg", "kernel=W4\nwhatever=1\n");
    let out = run(&["convergence", "--config", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bad.cfg:2"), "{}", stderr(&out));
}

#[test]
fn discontinuity_writes_table_and_curves() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("jump");
    let out = run(&[
        "discontinuity", "--func", "z", "--level", "7", "--degree", "3", "--curve-points", "101",
        "--out", out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let table = fs::read_to_string(out_dir.join("overshoot.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("method,kernel,degree,max_overshoot,smooth_region_mae,exclusion_radius"));
    assert!(lines.next().unwrap().starts_with("linear,W2,3,"));
    assert!(lines.next().unwrap().starts_with("nonlinear,W2,3,"));
    for name in ["z_exact.csv", "MLSPU3_W2_z.csv", "NL-MLSPU3_W2_z.csv"] {
        let curve = fs::read_to_string(out_dir.join(name)).unwrap();
        assert!(curve.starts_with("x,value\n"));
        assert_eq!(curve.lines().count(), 102);
    }
}

#[test]
fn discontinuity_rejects_smooth_function() {
    let out = run(&["discontinuity", "--func", "sin"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn selftest_passes_and_negative_control_fails() {
    let ok = run(&["selftest"]);
    assert!(ok.status.success(), "{}", stdout(&ok));
    assert!(stdout(&ok).contains("all suites passed"));
    let bad = run(&["selftest", "--corrupt-indicators"]);
    assert!(!bad.status.success());
    assert!(stdout(&bad).contains("weno-suppression         FAIL"));
}
