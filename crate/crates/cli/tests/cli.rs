//! End-to-end checks of the command-line surface: table shapes, exit codes
//! and byte determinism.

use std::process::{Command, Output};

fn mdimex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdimex"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_lines(out: &Output) -> Vec<String> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|s| s.to_string())
        .collect()
}

#[test]
fn solve_kaps_reaches_the_exact_end_state() {
    let out = mdimex(&[
        "solve",
        "--problem",
        "kaps",
        "--eps",
        "1e-3",
        "--dt",
        "1e-2",
        "--tend",
        "1",
        "--kmax",
        "2",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let lines = stdout_lines(&out);
    assert!(lines[0].starts_with('#'));
    assert_eq!(lines.len(), 102); // header + 101 time levels

    let last: Vec<f64> = lines
        .last()
        .unwrap()
        .split_whitespace()
        .map(|t| t.parse().unwrap())
        .collect();
    assert_eq!(last.len(), 3);
    assert!((last[0] - 1.0).abs() < 1e-12);
    assert!(
        (last[1] - 0.1353352832366127).abs() < 1e-6,
        "y = {}",
        last[1]
    );
    assert!(
        (last[2] - 0.36787944117144233).abs() < 1e-6,
        "z = {}",
        last[2]
    );
}

#[test]
fn converge_table_layout_matches_contract() {
    let out = mdimex(&[
        "converge",
        "--problem",
        "kaps",
        "--kmax",
        "2",
        "--tend",
        "1",
        "--eps",
        "1e-1,1e-3",
        "--dts",
        "halving:4e-2:3",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let lines = stdout_lines(&out);
    assert_eq!(lines.len(), 4); // header + 3 step sizes
    assert!(lines[0].starts_with('#'));
    for row in &lines[1..] {
        let vals: Vec<f64> = row.split_whitespace().map(|t| t.parse().unwrap()).collect();
        // dt, then one error/slope pair per stiffness value
        assert_eq!(vals.len(), 5);
        assert!(vals.iter().all(|v| v.is_finite()));
    }
    // first data row carries slope 0 placeholders
    let first: Vec<f64> = lines[1]
        .split_whitespace()
        .map(|t| t.parse().unwrap())
        .collect();
    assert_eq!(first[2], 0.0);
    assert_eq!(first[4], 0.0);
    // halving sequence: dt column halves
    let dts: Vec<f64> = lines[1..]
        .iter()
        .map(|r| r.split_whitespace().next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(dts, vec![4e-2, 2e-2, 1e-2]);
}

#[test]
fn asymptotic_table_has_three_columns() {
    let out = mdimex(&[
        "asymptotic",
        "--problem",
        "kaps",
        "--tend",
        "1",
        "--dts",
        "halving:1e-1:2",
        "--kmax",
        "2",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let lines = stdout_lines(&out);
    assert_eq!(lines.len(), 3);
    for row in &lines[1..] {
        assert_eq!(row.split_whitespace().count(), 3);
    }
}

#[test]
fn apresid_reports_decaying_residuals_for_vdp() {
    let out = mdimex(&[
        "apresid",
        "--problem",
        "vdp",
        "--dt",
        "1e-2",
        "--tend",
        "0.1",
        "--kmax",
        "2",
        "--eps",
        "1e-3,1e-4,1e-5",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let lines = stdout_lines(&out);
    assert_eq!(lines.len(), 4);
    let rows: Vec<Vec<f64>> = lines[1..]
        .iter()
        .map(|r| r.split_whitespace().map(|t| t.parse().unwrap()).collect())
        .collect();
    assert!(rows[0][1] > rows[2][1], "residual must shrink with eps");
}

#[test]
fn apresid_rejects_split_problems() {
    let out = mdimex(&[
        "apresid",
        "--problem",
        "kaps",
        "--dt",
        "1e-2",
        "--eps",
        "1e-3,1e-4",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn stability_scan_covers_requested_ratios() {
    let out = mdimex(&[
        "stability",
        "--scheme",
        "fullk2",
        "--gammas",
        "0,-0.1",
        "--mu-max",
        "50",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let lines = stdout_lines(&out);
    assert_eq!(lines.len(), 3);
    let row0: Vec<f64> = lines[1]
        .split_whitespace()
        .map(|t| t.parse().unwrap())
        .collect();
    assert_eq!(row0[0], 0.0); // -gamma column
    assert!((row0[1] - 2.0757).abs() < 0.01, "boundary {}", row0[1]);
}

#[test]
fn unresolvable_run_exits_with_solver_failure() {
    // Past the fold of the slow manifold the relaxation jump cannot be
    // resolved at this step size; the run must abort with status 2.
    let out = mdimex(&[
        "solve",
        "--problem",
        "vdp",
        "--eps",
        "1e-3",
        "--dt",
        "1e-2",
        "--tend",
        "2",
        "--kmax",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("solver failure"));
}

#[test]
fn unknown_problem_exits_with_usage_error() {
    let out = mdimex(&["solve", "--problem", "lorenz", "--dt", "0.1", "--tend", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_command_exits_with_usage_error() {
    let out = mdimex(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_dt_is_a_parameter_error() {
    let out = mdimex(&["solve", "--problem", "kaps", "--dt", "-0.5", "--tend", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_is_byte_deterministic() {
    let args = [
        "converge",
        "--problem",
        "vdp",
        "--kmax",
        "0",
        "--tend",
        "0.5",
        "--eps",
        "1e-2,1e-4",
        "--dts",
        "halving:1e-1:3",
    ];
    let a = mdimex(&args);
    let b = mdimex(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn output_file_matches_stdout() {
    let dir = std::env::temp_dir().join("mdimex-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("solve.dat");
    let to_file = mdimex(&[
        "solve",
        "--problem",
        "kaps",
        "--eps",
        "1e-2",
        "--dt",
        "0.25",
        "--tend",
        "1",
        "--kmax",
        "1",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(to_file.status.success());
    let on_disk = std::fs::read(&path).unwrap();
    let to_stdout = mdimex(&[
        "solve",
        "--problem",
        "kaps",
        "--eps",
        "1e-2",
        "--dt",
        "0.25",
        "--tend",
        "1",
        "--kmax",
        "1",
    ]);
    assert_eq!(on_disk, to_stdout.stdout);
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn linear_prototype_needs_eigenvalues() {
    let out = mdimex(&["solve", "--problem", "linear", "--dt", "0.1", "--tend", "1"]);
    assert_eq!(out.status.code(), Some(1));

    let ok = mdimex(&[
        "solve",
        "--problem",
        "linear",
        "--lambda",
        "-1",
        "--mu",
        "1",
        "--dt",
        "0.1",
        "--tend",
        "1",
    ]);
    assert!(
        ok.status.success(),
        "{}",
        String::from_utf8_lossy(&ok.stderr)
    );
}
