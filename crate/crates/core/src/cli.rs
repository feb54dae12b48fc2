//! Command-line front end.
//!
//! Machine output (CSV) goes to `--out` when given and to stdout otherwise;
//! the human summary goes to stdout when the CSV went to a file and to
//! stderr otherwise. Errors map to the exit codes of [`Error::exit_code`].

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::Value;

use crate::atoms::{compute_atoms, moment, NodeSet};
use crate::bench::{run_bench, BenchConfig};
use crate::charpoly::EulerEquation;
use crate::error::{Error, Result};
use crate::integral_op::{ClosedForm, DEFAULT_TOL};
use crate::perturbation::{self, PerturbMode, PerturbationStudy, StudyConfig};
use crate::scalar::parse_rational;
use crate::solver::{residual, residual_numeric, solve_particular, ParticularSolution, MAX_NUMERIC_ORDER};
use crate::term_algebra::{parse, Expr};

pub const DEFAULT_RANGE: (f64, f64) = (1.0, 2.0);
pub const DEFAULT_SOLVE_SAMPLES: usize = 100;
/// Points at which the numeric residual is checked when no closed form exists.
const RESIDUAL_POINTS: usize = 5;

#[derive(Debug, Parser)]
#[command(name = "atomcauchy", version, about = "Particular solutions of Cauchy-Euler equations via atom weights")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a problem file and sample y_p.
    Solve(SolveArgs),
    /// Perturb the characteristic roots and tabulate |y_p - y_eps|.
    Perturb(PerturbArgs),
    /// Time the solver for random equations of increasing order.
    Bench(BenchArgs),
    /// Print atom weights and moments of a node list.
    Atoms(AtomsArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Problem JSON: {"coefficients": [...], "rhs": "...", "x_range": [a, b], "samples": n}
    pub problem: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Overrides the problem's sample count.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Overrides the problem's x range.
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
    pub range: Option<Vec<f64>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PerturbArgs {
    pub problem: PathBuf,
    /// Comma-separated perturbations; defaults to c*10^-j, j = 1..5.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub eps: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Compact interval K.
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
    pub range: Option<Vec<f64>>,
    #[arg(long, default_value_t = perturbation::DEFAULT_SAMPLES)]
    pub samples: usize,
    #[arg(long, default_value_t = perturbation::DEFAULT_TOL)]
    pub tol: f64,
    /// Perturb each root by its own multiple of eps.
    #[arg(long)]
    pub per_root: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 2)]
    pub n_min: usize,
    #[arg(long, default_value_t = 50)]
    pub n_max: usize,
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Interval the roots are drawn from.
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
    pub range: Option<Vec<f64>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AtomsArgs {
    /// Nodes as integers, decimals or p/q.
    #[arg(required = true, allow_hyphen_values = true)]
    pub nodes: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// What a command produced.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub csv: String,
    pub summary: Vec<String>,
    /// Always written to stderr.
    pub diagnostics: Vec<String>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
struct ProblemJson {
    coefficients: Vec<Value>,
    rhs: String,
    #[serde(default)]
    x_range: Option<[f64; 2]>,
    #[serde(default)]
    samples: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub equation: EulerEquation,
    pub rhs: Expr,
    pub x_range: (f64, f64),
    pub samples: usize,
}

impl Problem {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ProblemJson = serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))?;
        let equation = EulerEquation::from_json_values(&raw.coefficients)?;
        let rhs = parse(&raw.rhs)?;
        let x_range = raw.x_range.map_or(DEFAULT_RANGE, |[a, b]| (a, b));
        Ok(Problem { equation, rhs, x_range, samples: raw.samples.unwrap_or(DEFAULT_SOLVE_SAMPLES) })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Uniform grid on `[a, b]`, `0 < a <= b`.
pub fn grid(range: (f64, f64), samples: usize) -> Result<Vec<f64>> {
    let (a, b) = range;
    if !(a > 0.0 && b >= a && b.is_finite()) {
        return Err(Error::InvalidInput(format!("range [{}, {}] must satisfy 0 < a <= b", a, b)));
    }
    Ok(match samples {
        0 => Vec::new(),
        1 => vec![a],
        m => (0..m).map(|i| a + (b - a) * i as f64 / (m - 1) as f64).collect(),
    })
}

fn range_arg(v: &Option<Vec<f64>>) -> Option<(f64, f64)> {
    v.as_ref().map(|r| (r[0], r[1]))
}

pub fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Solve(a) => cmd_solve(&a),
        Command::Perturb(a) => cmd_perturb(&a),
        Command::Bench(a) => cmd_bench(&a),
        Command::Atoms(a) => cmd_atoms(&a),
    }
}

pub fn cmd_solve(args: &SolveArgs) -> Result<Outcome> {
    let problem = Problem::load(&args.problem)?;
    let xs = grid(range_arg(&args.range).unwrap_or(problem.x_range), args.samples.unwrap_or(problem.samples))?;
    let y = solve_particular(&problem.equation, &problem.rhs)?;
    let ys = y.evaluate_many(&xs, args.tol)?;
    let mut csv = String::from("x,y\n");
    for (x, v) in xs.iter().zip(&ys) {
        csv.push_str(&format!("{:.16e},{:.16e}\n", x, v));
    }
    let mut summary = vec![match y.closed_form() {
        Some(ClosedForm::Exact(e)) => format!("y_p = {}", e),
        Some(ClosedForm::Real(e)) => format!("y_p = {}", e),
        Some(ClosedForm::Complex(e)) => format!("y_p = {}", e),
        None => "y_p: no closed form, evaluated by quadrature".to_string(),
    }];
    summary.push(residual_summary(&problem, &y, &xs)?);
    Ok(Outcome { csv, summary, diagnostics: Vec::new(), out: args.out.clone() })
}

fn residual_summary(problem: &Problem, y: &ParticularSolution, xs: &[f64]) -> Result<String> {
    let eq = &problem.equation;
    let g = &problem.rhs;
    let relative_max = |f: &dyn Fn(f64) -> Result<f64>, pts: &[f64]| -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &x in pts {
            let scale = g.evaluate(x)?.abs().max(f64::MIN_POSITIVE);
            worst = worst.max(f(x)?.abs() / scale);
        }
        Ok(worst)
    };
    Ok(match y.closed_form() {
        Some(ClosedForm::Exact(e)) => {
            let r = residual(eq, e).sub(g);
            if r.is_zero() {
                "max residual: 0 (exact)".to_string()
            } else {
                format!("max relative residual: {:.3e}", relative_max(&|x| r.evaluate(x), xs)?)
            }
        }
        Some(ClosedForm::Real(e)) => {
            let r = residual(eq, e).sub(&g.map(crate::scalar::rational_to_f64));
            format!("max relative residual: {:.3e}", relative_max(&|x| r.evaluate(x), xs)?)
        }
        Some(ClosedForm::Complex(e)) => {
            let r = residual(eq, e).sub(&g.to_complex());
            format!("max relative residual: {:.3e}", relative_max(&|x| Ok(r.eval_complex(x)?.norm()), xs)?)
        }
        None if eq.order() <= MAX_NUMERIC_ORDER && !xs.is_empty() => {
            let step = (xs.len() / RESIDUAL_POINTS).max(1);
            let pts: Vec<f64> = xs.iter().step_by(step).take(RESIDUAL_POINTS).copied().collect();
            let worst = relative_max(&|x| residual_numeric(eq, y, x), &pts)?;
            format!("max relative residual: {:.3e} (finite differences at {} points)", worst, pts.len())
        }
        None => format!("max residual: not computed (order {} without closed form)", eq.order()),
    })
}

pub fn cmd_perturb(args: &PerturbArgs) -> Result<Outcome> {
    let problem = Problem::load(&args.problem)?;
    let mut config = StudyConfig::with_seed(args.seed);
    if let Some(eps) = &args.eps {
        config.epsilons = eps.clone();
    }
    if let Some(k) = range_arg(&args.range) {
        config.compact = k;
    }
    config.samples = args.samples;
    config.tol = args.tol;
    config.mode = if args.per_root { PerturbMode::PerRoot } else { PerturbMode::Uniform };
    let study = PerturbationStudy::new(&problem.equation, &problem.rhs, config)?;
    let curves = study.error_curves()?;
    let mut csv = String::from("x");
    for j in 1..=curves.len() {
        csv.push_str(&format!(",err_eps{}", j));
    }
    csv.push('\n');
    for (i, x) in study.grid.iter().enumerate() {
        csv.push_str(&format!("{:.16e}", x));
        for c in &curves {
            csv.push_str(&format!(",{:.16e}", c.errors[i]));
        }
        csv.push('\n');
    }
    let mut summary: Vec<String> =
        curves.iter().map(|c| format!("eps = {:.6e}: sup error = {:.6e}", c.eps, c.sup)).collect();
    let mut diagnostics = Vec::new();
    match study.fit(&curves) {
        Ok(fit) => summary.push(format!(
            "bound fit: alpha = {}, beta = {}, C_K = {:.6e}, check = {}",
            fit.alpha, fit.beta, fit.c_k, fit.check
        )),
        Err(e) => diagnostics.push(format!("bound fit skipped: {}", e)),
    }
    Ok(Outcome { csv, summary, diagnostics, out: args.out.clone() })
}

pub fn cmd_bench(args: &BenchArgs) -> Result<Outcome> {
    let config = BenchConfig {
        n_min: args.n_min,
        n_max: args.n_max,
        trials: args.trials,
        root_range: range_arg(&args.range).unwrap_or((-10.0, 10.0)),
        seed: args.seed,
        threads: None,
    };
    let report = run_bench(&config)?;
    Ok(Outcome {
        csv: report.to_csv(),
        summary: vec![format!("log-log slope: {:.4}", report.slope)],
        diagnostics: report.warnings,
        out: args.out.clone(),
    })
}

pub fn cmd_atoms(args: &AtomsArgs) -> Result<Outcome> {
    let nodes = args
        .nodes
        .iter()
        .map(|s| parse_rational(s).ok_or_else(|| Error::InvalidInput(format!("malformed node `{}`", s))))
        .collect::<Result<Vec<_>>>()?;
    let set = NodeSet::new(nodes)?;
    let a = compute_atoms(&set);
    let mut csv = String::from("i,node,weight\n");
    for (i, (x, w)) in set.nodes().iter().zip(a.weights()).enumerate() {
        csv.push_str(&format!("{},{},{}\n", i, x, w));
    }
    let summary = (0..set.len() as u32).map(|s| format!("M(A, {}) = {}", s, moment(&a, &set, s))).collect();
    Ok(Outcome { csv, summary, diagnostics: Vec::new(), out: args.out.clone() })
}

/// Runs the parsed command, writes its output and returns the exit status.
pub fn execute(cli: Cli) -> i32 {
    match run(cli) {
        Ok(outcome) => match emit(&outcome) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("error: {}", e);
                e.exit_code()
            }
        },
        Err(e) => {
            eprintln!("error: {}", e);
            e.exit_code()
        }
    }
}

fn emit(outcome: &Outcome) -> Result<()> {
    for d in &outcome.diagnostics {
        eprintln!("warning: {}", d);
    }
    match &outcome.out {
        Some(path) => {
            std::fs::write(path, &outcome.csv)?;
            for line in &outcome.summary {
                println!("{}", line);
            }
        }
        None => {
            print!("{}", outcome.csv);
            for line in &outcome.summary {
                eprintln!("{}", line);
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn problem_parsing() {
        let p = Problem::from_json(
            r#"{"coefficients": ["-1", 1, "1"], "rhs": "x^2", "x_range": [0.5, 5.0], "samples": 200}"#,
        )
        .unwrap();
        assert_eq!(p.equation.order(), 2);
        assert_eq!((p.x_range, p.samples), ((0.5, 5.0), 200));
        assert!(matches!(Problem::from_json("{"), Err(Error::InvalidInput(_))));
        assert!(matches!(
            Problem::from_json(r#"{"coefficients": [1, 1], "rhs": "exp(x)"}"#),
            Err(Error::UnsupportedFunction { .. })
        ));
    }

    #[test]
    fn grids() {
        assert_eq!(grid((1.0, 2.0), 3).unwrap(), vec![1.0, 1.5, 2.0]);
        assert_eq!(grid((1.0, 2.0), 1).unwrap(), vec![1.0]);
        assert!(grid((0.0, 2.0), 3).is_err());
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
        let cli = Cli::try_parse_from(["atomcauchy", "atoms", "1", "-2", "3", "1/2"]).unwrap();
        let out = run(cli).unwrap();
        assert!(out.csv.contains("3,1/2,8/25"));
        assert_eq!(out.summary[3], "M(A, 3) = 1");
        let cli = Cli::try_parse_from(["atomcauchy", "perturb", "p.json", "--eps", "0.1,-0.01", "--range", "1", "2"])
            .unwrap();
        match cli.command {
            Command::Perturb(a) => assert_eq!(a.eps, Some(vec![0.1, -0.01])),
            _ => unreachable!(),
        }
    }
}
