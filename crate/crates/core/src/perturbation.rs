//! Stability of `y_p` under perturbation of the characteristic roots.
//!
//! The perturbed solution keeps the unperturbed atom weights and shifts the
//! exponents: `y_eps = sum A(r_i) x^(r_i + eps) I_(r_i + eps + 1)(g)`. Its
//! distance to `y_p` is bounded by `C_K eps / (beta - eps)` on a compact
//! `K`, with `beta = min(alpha - Re r_i)` and `alpha` the growth exponent of
//! `g` at 0.

use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::charpoly::EulerEquation;
use crate::error::{Error, Result};
use crate::integral_op::verify_growth;
use crate::solver::{solve_particular, Exponents, ParticularSolution, Rhs};
use crate::term_algebra::Expr;

pub const DEFAULT_SAMPLES: usize = 512;
pub const DEFAULT_COMPACT: (f64, f64) = (1.0, 2.0);
pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_LEVELS: i32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PerturbMode {
    /// The same `eps` added to every root.
    #[default]
    Uniform,
    /// `eps * c_i` with independent `c_i` in (-1, 1); conjugate roots share `c_i`.
    PerRoot,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub epsilons: Vec<f64>,
    pub compact: (f64, f64),
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
    pub mode: PerturbMode,
}

impl StudyConfig {
    /// Default schedule `c 10^-j`, `j = 1..5`, with one `c` drawn from (-1, 1).
    pub fn with_seed(seed: u64) -> Self {
        StudyConfig {
            epsilons: default_schedule(seed, DEFAULT_LEVELS),
            compact: DEFAULT_COMPACT,
            seed,
            samples: DEFAULT_SAMPLES,
            tol: DEFAULT_TOL,
            mode: PerturbMode::Uniform,
        }
    }
}

/// `c 10^-j` for `j = 1..=levels`; `c` is uniform in (-1, 1), drawn once from
/// the seed so the levels differ only by the decade.
pub fn default_schedule(seed: u64, levels: i32) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = 0.0;
    while c == 0.0 {
        c = rng.gen_range(-1.0..1.0);
    }
    (1..=levels).map(|j| c * 10f64.powi(-j)).collect()
}

/// `beta = min_i (alpha - Re r_i)`.
pub fn beta(alpha: f64, y: &ParticularSolution) -> f64 {
    y.roots().values().iter().map(|r| alpha - r.re).fold(f64::INFINITY, f64::min)
}

/// Solves `eq` with the roots shifted by `eps` (uniform mode).
pub fn perturbed_solution(eq: &EulerEquation, g: &Expr, eps: f64, seed: u64) -> Result<ParticularSolution> {
    let base = solve_particular(eq, g)?;
    perturb(&base, eps, PerturbMode::Uniform, seed)
}

/// Perturbs the exponents of `base`, keeping its weights.
pub fn perturb(base: &ParticularSolution, eps: f64, mode: PerturbMode, seed: u64) -> Result<ParticularSolution> {
    let alpha = match base.rhs() {
        Rhs::Terms(g) => verify_growth(g, DEFAULT_COMPACT.1).alpha,
        Rhs::BlackBox(_, growth) => growth.alpha,
    };
    let b = beta(alpha, base);
    if eps.abs() >= b {
        return Err(Error::BoundViolation { eps, beta: b });
    }
    if eps == 0.0 {
        return Ok(base.clone());
    }
    let roots = base.roots().values();
    let shifts = match mode {
        PerturbMode::Uniform => vec![eps; roots.len()],
        PerturbMode::PerRoot => per_root_shifts(&roots, eps, seed),
    };
    let exponents: Vec<Complex64> = roots.iter().zip(&shifts).map(|(r, s)| r + s).collect();
    ParticularSolution::assemble(
        base.equation(),
        base.rhs().clone(),
        base.roots().clone(),
        base.weights().clone(),
        Exponents::Float(exponents),
    )
}

fn per_root_shifts(roots: &[Complex64], eps: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shifts: Vec<Option<f64>> = vec![None; roots.len()];
    for i in 0..roots.len() {
        if shifts[i].is_some() {
            continue;
        }
        let s = eps * rng.gen_range(-1.0..1.0);
        shifts[i] = Some(s);
        if roots[i].im != 0.0 {
            if let Some(j) = (i + 1..roots.len()).find(|&j| shifts[j].is_none() && roots[j] == roots[i].conj()) {
                shifts[j] = Some(s);
            }
        }
    }
    shifts.into_iter().map(|s| s.unwrap_or(0.0)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorCurve {
    pub eps: f64,
    /// `|y_p(x) - y_eps(x)|` on the study grid.
    pub errors: Vec<f64>,
    pub sup: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundFit {
    pub alpha: f64,
    pub beta: f64,
    pub c_k: f64,
    /// `c_k` finite and the per-level estimates within a factor of 10.
    pub check: bool,
}

#[derive(Debug, Clone)]
pub struct PerturbationStudy {
    pub equation: EulerEquation,
    pub rhs: Expr,
    pub config: StudyConfig,
    pub base: ParticularSolution,
    pub alpha: f64,
    pub beta: f64,
    pub grid: Vec<f64>,
}

impl PerturbationStudy {
    pub fn new(eq: &EulerEquation, g: &Expr, config: StudyConfig) -> Result<Self> {
        let (k0, k1) = config.compact;
        if !(k0 > 0.0 && k1 > k0 && k1.is_finite()) {
            return Err(Error::InvalidInput(format!("compact [{}, {}] must satisfy 0 < k0 < k1", k0, k1)));
        }
        if config.samples < 2 {
            return Err(Error::InvalidInput("at least two samples are needed".into()));
        }
        let base = solve_particular(eq, g)?;
        let alpha = verify_growth(g, k1).alpha;
        let b = beta(alpha, &base);
        if let Some(&eps) = config.epsilons.iter().find(|e| e.abs() >= b) {
            return Err(Error::BoundViolation { eps, beta: b });
        }
        let m = config.samples;
        let grid = (0..m).map(|i| k0 + (k1 - k0) * i as f64 / (m - 1) as f64).collect();
        Ok(PerturbationStudy { equation: eq.clone(), rhs: g.clone(), config, base, alpha, beta: b, grid })
    }

    /// One curve per `eps`, in schedule order; levels run in parallel.
    pub fn error_curves(&self) -> Result<Vec<ErrorCurve>> {
        let tol = self.config.tol;
        let reference = self.base.evaluate_many(&self.grid, tol)?;
        self.config
            .epsilons
            .par_iter()
            .map(|&eps| {
                let y = perturb(&self.base, eps, self.config.mode, self.config.seed)?;
                let values = y.evaluate_many(&self.grid, tol)?;
                let errors: Vec<f64> = values.iter().zip(&reference).map(|(a, b)| (a - b).abs()).collect();
                let sup = errors.iter().copied().fold(0.0, f64::max);
                Ok(ErrorCurve { eps, errors, sup })
            })
            .collect()
    }

    pub fn fit(&self, curves: &[ErrorCurve]) -> Result<BoundFit> {
        fit_bound(curves, self.alpha, self.beta)
    }
}

/// `C_K = max_j sup_j (beta - |eps_j|) / |eps_j|` over the nonzero levels.
pub fn fit_bound(curves: &[ErrorCurve], alpha: f64, beta: f64) -> Result<BoundFit> {
    if curves.len() < 3 {
        return Err(Error::InvalidInput(format!("bound fit needs at least 3 levels, got {}", curves.len())));
    }
    let estimates: Vec<f64> =
        curves.iter().filter(|c| c.eps != 0.0).map(|c| c.sup * (beta - c.eps.abs()) / c.eps.abs()).collect();
    if estimates.is_empty() {
        return Err(Error::InvalidInput("bound fit needs a nonzero perturbation".into()));
    }
    let c_k = estimates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let low = estimates.iter().copied().fold(f64::INFINITY, f64::min);
    let check = c_k.is_finite() && low > 0.0 && c_k / low <= 10.0;
    Ok(BoundFit { alpha, beta, c_k, check })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use crate::solver::Weights;
    use crate::term_algebra::parse;

    fn toy() -> EulerEquation {
        EulerEquation::new(vec![rational(-1, 1), rational(1, 1), rational(1, 1)]).unwrap()
    }

    #[test]
    fn schedule_is_seeded_decades() {
        let a = default_schedule(7, 5);
        assert_eq!(a, default_schedule(7, 5));
        assert_ne!(a, default_schedule(8, 5));
        assert!(a[0].abs() < 0.1);
        for w in a.windows(2) {
            assert!((w[0] / w[1] - 10.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_eps_is_identity_and_weights_frozen() {
        let g = parse("x^2").unwrap();
        let base = solve_particular(&toy(), &g).unwrap();
        let same = perturbed_solution(&toy(), &g, 0.0, 1).unwrap();
        assert_eq!(same.evaluate(1.5, 1e-12).unwrap(), base.evaluate(1.5, 1e-12).unwrap());
        let moved = perturb(&base, 0.01, PerturbMode::Uniform, 1).unwrap();
        assert_eq!(moved.weights(), base.weights());
        assert!(matches!(moved.weights(), Weights::Exact(_)));
    }

    #[test]
    fn toy_matches_analytic_perturbation() {
        // y_eps = x^2 (1/(2(1-eps)) - 1/(2(3-eps)))
        let g = parse("x^2").unwrap();
        let eps = 0.01;
        let y = perturbed_solution(&toy(), &g, eps, 0).unwrap();
        let exact = 0.5 / (1.0 - eps) - 0.5 / (3.0 - eps);
        assert!((y.evaluate(1.0, 1e-12).unwrap() - exact).abs() < 1e-13);
        let base = 1.0 / 3.0;
        assert!(((exact - base) / eps - 4.0 / 9.0).abs() < 0.01);
    }

    #[test]
    fn bound_violation() {
        let g = parse("x^2").unwrap();
        // alpha = 2, max root 1
        assert!(matches!(perturbed_solution(&toy(), &g, 1.0, 0), Err(Error::BoundViolation { .. })));
        let config = StudyConfig { epsilons: vec![0.1, 1.5], ..StudyConfig::with_seed(0) };
        assert!(matches!(PerturbationStudy::new(&toy(), &g, config), Err(Error::BoundViolation { .. })));
    }

    #[test]
    fn toy_study_fits_analytic_constant() {
        let g = parse("x^2").unwrap();
        let study = PerturbationStudy::new(&toy(), &g, StudyConfig::with_seed(3)).unwrap();
        let curves = study.error_curves().unwrap();
        assert_eq!(curves.len(), 5);
        for w in curves.windows(2) {
            assert!(w[0].sup > w[1].sup);
        }
        let fit = study.fit(&curves).unwrap();
        assert!(fit.check);
        // sup over [1, 2] of |d y_eps / d eps| at 0 is 4 * 4/9
        let analytic = 16.0 / 9.0;
        assert!(fit.c_k / analytic < 2.0 && analytic / fit.c_k < 2.0, "{}", fit.c_k);
    }

    #[test]
    fn zero_level_curve_and_fit_errors() {
        let g = parse("x^2").unwrap();
        let config = StudyConfig { epsilons: vec![0.0], samples: 16, ..StudyConfig::with_seed(0) };
        let study = PerturbationStudy::new(&toy(), &g, config).unwrap();
        let curves = study.error_curves().unwrap();
        assert!(curves[0].errors.iter().all(|e| *e == 0.0));
        assert!(fit_bound(&[], 1.0, 1.0).is_err());
        assert!(study.fit(&curves).is_err());
    }

    #[test]
    fn per_root_mode_pairs_conjugates() {
        let roots = [Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0)];
        let s = per_root_shifts(&roots, 0.1, 5);
        assert_eq!(s[1], s[2]);
        assert!(s.iter().all(|v| v.abs() < 0.1));
        let g = parse("x^4").unwrap();
        let base = solve_particular(&toy(), &g).unwrap();
        let y = perturb(&base, 0.01, PerturbMode::PerRoot, 5).unwrap();
        assert!((y.evaluate(1.0, 1e-12).unwrap() - base.evaluate(1.0, 1e-12).unwrap()).abs() < 0.01);
    }
}
