use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_atomcauchy")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const TOY: &str = r#"{"coefficients": [-1, 1, 1], "rhs": "x^2", "x_range": [1, 2], "samples": 5}"#;
const EIGHTH: &str =
    r#"{"coefficients": ["9", "-9", "9/2", "-3/2", "3309/4", "3345/4", "1007/4", "28", "1"], "rhs": "x^4*ln(x)"}"#;
const QUARTIC: &str = r#"{"coefficients": [-3, 3, "-9/2", "7/2", 1], "rhs": "x^4*sin(x)"}"#;

#[test]
fn toy_solve_prints_closed_form() {
    let dir = TempDir::new().unwrap();
    let problem = write(dir.path(), "toy.json", TOY);
    let csv = dir.path().join("toy.csv");
    let o = run(&["solve", problem.to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.lines().any(|l| l == "y_p = (1/3)*x^2"), "{}", out);
    assert!(out.contains("max residual: 0 (exact)"));
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "x,y");
    assert_eq!(rows.len(), 6);
    let last: Vec<f64> = rows[5].split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(last[0], 2.0);
    assert!((last[1] - 4.0 / 3.0).abs() < 1e-14);
}

#[test]
fn eighth_order_log_example() {
    let dir = TempDir::new().unwrap();
    let problem = write(dir.path(), "ex.json", EIGHTH);
    let csv = dir.path().join("ex.csv");
    let out = stdout(&run(&["solve", problem.to_str().unwrap(), "--out", csv.to_str().unwrap()]));
    assert!(out.contains("(1/19845)*x^4*ln(x)") && out.contains("-(898/6251175)*x^4"), "{}", out);
}

#[test]
fn machine_output_only_on_stdout_without_out() {
    let dir = TempDir::new().unwrap();
    let problem = write(dir.path(), "toy.json", TOY);
    let o = run(&["solve", problem.to_str().unwrap()]);
    assert!(stdout(&o).starts_with("x,y\n"));
    assert!(String::from_utf8(o.stderr).unwrap().contains("y_p = (1/3)*x^2"));
}

#[test]
fn error_exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"coefficients\": [1, ");
    assert_eq!(run(&["solve", bad.to_str().unwrap()]).status.code(), Some(2));
    let repeated = write(dir.path(), "rep.json", r#"{"coefficients": [1, -1, 1], "rhs": "x^3"}"#);
    assert_eq!(run(&["solve", repeated.to_str().unwrap()]).status.code(), Some(3));
    let divergent = write(dir.path(), "div.json", r#"{"coefficients": [-1, 1, 1], "rhs": "x^-3"}"#);
    assert_eq!(run(&["solve", divergent.to_str().unwrap()]).status.code(), Some(4));
    let quartic = write(dir.path(), "q.json", QUARTIC);
    assert_eq!(run(&["perturb", quartic.to_str().unwrap(), "--eps", "0.5,1.5"]).status.code(), Some(7));
}

#[test]
fn zero_perturbation_gives_zero_column() {
    let dir = TempDir::new().unwrap();
    let problem = write(dir.path(), "q.json", QUARTIC);
    let o = run(&["perturb", problem.to_str().unwrap(), "--eps", "0", "--samples", "16"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,err_eps1"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 16);
    assert!(rows.iter().all(|r| r.split(',').nth(1).unwrap().parse::<f64>().unwrap() == 0.0));
}

#[test]
fn perturb_defaults_and_determinism() {
    let dir = TempDir::new().unwrap();
    let problem = write(dir.path(), "q.json", QUARTIC);
    let args = ["perturb", problem.to_str().unwrap(), "--seed", "7", "--samples", "64"];
    let (a, b) = (run(&args), run(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("x,err_eps1,err_eps2,err_eps3,err_eps4,err_eps5\n"));
    let rows: Vec<Vec<f64>> =
        text.lines().skip(1).map(|l| l.split(',').map(|s| s.parse().unwrap()).collect()).collect();
    let sups: Vec<f64> = (1..=5).map(|j| rows.iter().map(|r| r[j]).fold(0.0, f64::max)).collect();
    assert!(sups.windows(2).all(|w| w[0] > w[1]), "{:?}", sups);
}

#[test]
fn bench_edge_cases() {
    let o = run(&["bench", "--trials", "0"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "n,seconds\n");
    let o = run(&["bench", "--n-min", "4", "--n-max", "4", "--trials", "1"]);
    assert!(o.status.success());
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("slope: NaN") && err.contains("warning"), "{}", err);
    assert_eq!(run(&["bench", "--n-min", "1"]).status.code(), Some(2));
}

#[test]
fn atoms_command() {
    let o = run(&["atoms", "1", "-2", "3", "1/2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "i,node,weight\n0,1,-1/3\n1,-2,-2/75\n2,3,1/25\n3,1/2,8/25\n");
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("M(A, 0) = 0") && err.contains("M(A, 3) = 1"), "{}", err);
}
