//! Running-time scaling of the solver in the order `n`.
//!
//! For each `n` a random set of `n` distinct roots `k/100` is drawn, the
//! monic equation with those roots is built, and the solve from the roots
//! (atom weights, integral handles, evaluation on a 100-point grid over
//! [1, 2]) is timed. The right-hand side is `x^p sin x` with
//! `p = ceil(max root) + 2`, so every integral converges.

use std::time::Instant;

use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::charpoly::EulerEquation;
use crate::error::{Error, Result};
use crate::roots::RootSet;
use crate::scalar::{rational, rational_to_f64};
use crate::solver::solve_with_roots;
use crate::term_algebra::{Expr, Expression, Term, Trig};

pub const GRID_POINTS: usize = 100;
pub const MIN_SEPARATION: f64 = 0.1;
pub const THREADS_ENV: &str = "ATOMCAUCHY_THREADS";
const EVAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub n_min: usize,
    pub n_max: usize,
    pub trials: usize,
    pub root_range: (f64, f64),
    pub seed: u64,
    /// Worker threads across `n`; `None` reads `ATOMCAUCHY_THREADS`, falling
    /// back to the available parallelism.
    pub threads: Option<usize>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig { n_min: 2, n_max: 50, trials: 5, root_range: (-10.0, 10.0), seed: 0, threads: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    /// Median over the successful trials.
    pub seconds: f64,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// Least-squares slope of `ln seconds` against `ln n`.
    pub slope: f64,
    pub warnings: Vec<String>,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,seconds\n");
        for r in &self.rows {
            out.push_str(&format!("{},{:.9e}\n", r.n, r.seconds));
        }
        out
    }
}

/// `n` roots `k/100` in the range, pairwise at least [`MIN_SEPARATION`] apart.
pub fn random_roots(n: usize, range: (f64, f64), rng: &mut ChaCha8Rng) -> Result<Vec<i64>> {
    let lo = (range.0 * 100.0).ceil() as i64;
    let hi = (range.1 * 100.0).floor() as i64;
    let sep = (MIN_SEPARATION * 100.0).round() as i64;
    if hi < lo || (hi - lo) / sep.max(1) + 1 < n as i64 {
        return Err(Error::InvalidInput(format!(
            "cannot place {} roots {} apart in [{}, {}]",
            n, MIN_SEPARATION, range.0, range.1
        )));
    }
    let mut picked: Vec<i64> = Vec::with_capacity(n);
    let mut attempts = 0usize;
    while picked.len() < n {
        attempts += 1;
        if attempts > 1_000_000 {
            return Err(Error::InvalidInput("root sampling did not terminate".into()));
        }
        let k = rng.gen_range(lo..=hi);
        if picked.iter().all(|p| (p - k).abs() >= sep) {
            picked.push(k);
        }
    }
    Ok(picked)
}

/// Equation, roots and right-hand side for one benchmark instance.
pub fn instance(n: usize, range: (f64, f64), rng: &mut ChaCha8Rng) -> Result<(EulerEquation, RootSet, Expr)> {
    let ks = random_roots(n, range, rng)?;
    let exact: Vec<_> = ks.iter().map(|&k| rational(k, 100)).collect();
    let eq = EulerEquation::from_roots(&exact)?;
    let values = exact.iter().map(|q| Complex64::new(rational_to_f64(q), 0.0)).collect();
    let roots = RootSet::from_values(values)?;
    let max_root = *ks.iter().max().expect("n >= 1") as f64 / 100.0;
    let p = max_root.ceil() as i64 + 2;
    let g = Expression::from_term(Term::new(rational(1, 1), rational(p, 1), 0, Trig::Sin));
    Ok((eq, roots, g))
}

fn time_one(eq: &EulerEquation, roots: &RootSet, g: &Expr, grid: &[f64]) -> Result<f64> {
    let start = Instant::now();
    let y = solve_with_roots(eq, g, roots)?;
    let values = y.evaluate_many(grid, EVAL_TOL)?;
    let elapsed = start.elapsed().as_secs_f64();
    std::hint::black_box(values);
    Ok(elapsed)
}

pub fn run_bench(config: &BenchConfig) -> Result<BenchReport> {
    if !(2 <= config.n_min && config.n_min <= config.n_max) {
        return Err(Error::InvalidInput(format!(
            "need 2 <= n_min <= n_max, got n_min = {}, n_max = {}",
            config.n_min, config.n_max
        )));
    }
    let mut warnings = Vec::new();
    if config.trials == 0 {
        return Ok(BenchReport { rows: Vec::new(), slope: f64::NAN, warnings: vec!["no trials requested".into()] });
    }
    let grid: Vec<f64> = (0..GRID_POINTS).map(|i| 1.0 + i as f64 / (GRID_POINTS - 1) as f64).collect();
    let threads = config.threads.or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.parse().ok())).unwrap_or(0);
    let pool =
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| Error::InvalidInput(e.to_string()))?;
    let sizes: Vec<usize> = (config.n_min..=config.n_max).collect();
    let rows: Vec<Result<BenchRow>> = pool.install(|| {
        sizes
            .par_iter()
            .map(|&n| {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(n as u64));
                let (eq, roots, g) = instance(n, config.root_range, &mut rng)?;
                let mut times = Vec::with_capacity(config.trials);
                let mut failures = 0;
                for _ in 0..config.trials {
                    match time_one(&eq, &roots, &g, &grid) {
                        Ok(t) => times.push(t),
                        Err(_) => failures += 1,
                    }
                }
                times.sort_by(f64::total_cmp);
                let seconds = if times.is_empty() { f64::NAN } else { times[times.len() / 2] };
                Ok(BenchRow { n, seconds, failures })
            })
            .collect()
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    for r in rows.iter().filter(|r| r.failures > 0) {
        warnings.push(format!("n = {}: {} of {} trials failed", r.n, r.failures, config.trials));
    }
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.seconds.is_finite() && r.seconds > 0.0)
        .map(|r| ((r.n as f64).ln(), r.seconds.ln()))
        .collect();
    let slope = loglog_slope(&points);
    if slope.is_nan() {
        warnings.push("slope undefined: fewer than two distinct sizes".into());
    }
    Ok(BenchReport { rows, slope, warnings })
}

/// Least-squares slope; NaN with fewer than two distinct abscissae.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let m = points.len() as f64;
    if points.len() < 2 {
        return f64::NAN;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return f64::NAN;
    }
    points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx
}
