//! Characteristic roots.
//!
//! Global stage: eigenvalues of the balanced companion matrix. Polishing:
//! Aberth-Ehrlich sweeps in which `p(z)` is evaluated exactly (the f64 iterate
//! is converted to a rational), so residuals are limited by the rounding of
//! the root and not by cancellation in Horner's rule.

use std::cmp::Ordering;

use nalgebra::linalg::balancing::balance_parlett_reinsch;
use nalgebra::{DMatrix, Schur};
use num::complex::Complex64;
use num::rational::BigRational;
use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::atoms::check_separation;
use crate::charpoly::Polynomial;
use crate::error::{Error, Result};
use crate::scalar::{f64_to_rational, rational_to_f64};

/// Residual target of the refinement, relative to the coefficient scale.
pub const RESIDUAL_TARGET: f64 = 1e-13;
/// Refined roots with a larger scaled residual are rejected.
pub const RESIDUAL_LIMIT: f64 = 1e-10;
/// `|Im r| <= SNAP_TOL * (1 + |r|)` puts `r` on the real axis.
pub const SNAP_TOL: f64 = 1e-10;
/// Search window for rational reconstruction. Wide, because every candidate
/// is confirmed by exact evaluation.
const RATIONAL_WINDOW: f64 = 1e-6;
const MAX_ITER: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct Root {
    pub value: Complex64,
    /// Set when the root was verified to be this rational exactly.
    pub exact: Option<BigRational>,
}

impl Root {
    pub fn is_real(&self) -> bool {
        self.value.im == 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    roots: Vec<Root>,
    max_residual: f64,
}

#[derive(Serialize, Deserialize)]
struct JsonRoot {
    re: f64,
    im: f64,
}

impl RootSet {
    /// Prescribed rational roots.
    pub fn from_exact(roots: Vec<BigRational>) -> Result<Self> {
        let roots = roots
            .into_iter()
            .map(|q| Root { value: Complex64::new(rational_to_f64(&q), 0.0), exact: Some(q) })
            .collect();
        Self::assemble(roots, 0.0)
    }

    /// Prescribed floating-point roots.
    pub fn from_values(values: Vec<Complex64>) -> Result<Self> {
        let roots = values.into_iter().map(|value| Root { value, exact: None }).collect();
        Self::assemble(roots, 0.0)
    }

    fn assemble(mut roots: Vec<Root>, max_residual: f64) -> Result<Self> {
        if roots.is_empty() {
            return Err(Error::EmptyNodeSet);
        }
        roots.sort_by(|a, b| cmp_complex(&a.value, &b.value));
        let values: Vec<Complex64> = roots.iter().map(|r| r.value).collect();
        check_separation(&values).map_err(|e| match e {
            Error::DegenerateNodes { i, .. } => Error::MultipleRootDetected { re: values[i].re, im: values[i].im },
            other => other,
        })?;
        Ok(RootSet { roots, max_residual })
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn values(&self) -> Vec<Complex64> {
        self.roots.iter().map(|r| r.value).collect()
    }

    /// All roots as exact rationals, when every root is one.
    pub fn exact_values(&self) -> Option<Vec<BigRational>> {
        self.roots.iter().map(|r| r.exact.clone()).collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.max_residual
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn max_real_part(&self) -> f64 {
        self.roots.iter().map(|r| r.value.re).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `[{"re": .., "im": ..}, ...]`
    pub fn to_json(&self) -> String {
        let items: Vec<JsonRoot> = self.roots.iter().map(|r| JsonRoot { re: r.value.re, im: r.value.im }).collect();
        serde_json::to_string(&items).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let items: Vec<JsonRoot> = serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))?;
        Self::from_values(items.into_iter().map(|r| Complex64::new(r.re, r.im)).collect())
    }
}

fn cmp_complex(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// `max(1, sum |c_k|)`.
pub fn residual_scale(p: &Polynomial) -> f64 {
    p.coeffs().iter().map(|c| rational_to_f64(c).abs()).sum::<f64>().max(1.0)
}

/// All roots of `p`, sorted by real then imaginary part.
pub fn find_roots(p: &Polynomial) -> Result<RootSet> {
    let n = match p.degree() {
        Some(n) if n >= 1 => n,
        _ => return Err(Error::InvalidEquation("characteristic polynomial must have degree >= 1".into())),
    };
    if !p.is_squarefree() {
        let g = p.gcd(&p.derivative());
        let z = eigenvalues(&g).into_iter().min_by(cmp_complex).unwrap_or_default();
        return Err(Error::MultipleRootDetected { re: z.re, im: z.im });
    }
    let scale = residual_scale(p);
    let fp = FloatPoly::new(p);
    let mut z = if n == 1 { vec![Complex64::new(-fp.c[0] / fp.c[1], 0.0)] } else { eigenvalues(p) };
    aberth(p, &fp, &mut z, scale);

    let mut roots = Vec::with_capacity(n);
    let mut upper = Vec::new();
    let mut lower = 0usize;
    for zi in z {
        if zi.im.abs() <= SNAP_TOL * (1.0 + zi.norm()) {
            let r = refine_root(p, Complex64::new(zi.re, 0.0))?;
            let exact = rational_root(p, r.re);
            let value = exact.as_ref().map_or(r, |q| Complex64::new(rational_to_f64(q), 0.0));
            roots.push(Root { value, exact });
        } else if zi.im > 0.0 {
            upper.push(refine_root(p, zi)?);
        } else {
            lower += 1;
        }
    }
    if upper.len() != lower {
        return Err(Error::NonConvergence { residual: f64::NAN });
    }
    for u in upper {
        roots.push(Root { value: u, exact: None });
        roots.push(Root { value: u.conj(), exact: None });
    }
    // Snapped rational roots satisfy p(q) = 0 exactly; their double rounding
    // is not charged to the residual.
    let max_residual =
        roots.iter().filter(|r| r.exact.is_none()).map(|r| exact_eval(p, r.value).norm() / scale).fold(0.0, f64::max);
    if max_residual > RESIDUAL_LIMIT {
        return Err(Error::NonConvergence { residual: max_residual });
    }
    RootSet::assemble(roots, max_residual)
}

/// Newton iteration with exactly evaluated `p`.
///
/// Stops when `|p(r)| <= 1e-13 * scale`, when the step drops to rounding
/// level, or after 50 iterations. Fails if the residual is above both
/// `1e-10 * scale` and the rounding floor `4 eps (1 + |r|) |p'(r)|`.
pub fn refine_root(p: &Polynomial, r0: Complex64) -> Result<Complex64> {
    let scale = residual_scale(p);
    let fp = FloatPoly::new(p);
    let mut z = r0;
    let mut res = exact_eval(p, z);
    // Keep stepping past the target while the exact residual still improves.
    for _ in 0..MAX_ITER {
        if res.norm() == 0.0 {
            break;
        }
        let dp = fp.eval_derivative(z);
        if dp.norm() == 0.0 || !dp.is_finite() {
            break;
        }
        let step = res / dp;
        let next = z - step;
        let next_res = exact_eval(p, next);
        if next_res.norm() >= res.norm() && res.norm() <= RESIDUAL_TARGET * scale {
            break;
        }
        z = next;
        res = next_res;
        if step.norm() <= 2.0 * f64::EPSILON * z.norm() {
            break;
        }
    }
    let residual = res.norm() / scale;
    // A residual no larger than one rounding of z can cause is as good as
    // doubles allow, even above the limit.
    let floor = 4.0 * f64::EPSILON * (1.0 + z.norm()) * fp.eval_derivative(z).norm() / scale;
    if !z.is_finite() || residual > RESIDUAL_LIMIT.max(floor) {
        return Err(Error::NonConvergence { residual });
    }
    Ok(z)
}

fn eigenvalues(p: &Polynomial) -> Vec<Complex64> {
    let fp = FloatPoly::new(p);
    let n = fp.c.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![Complex64::new(-fp.c[0] / fp.c[1], 0.0)];
    }
    let lead = fp.c[n];
    let mut m = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        m[(0, k)] = -fp.c[n - 1 - k] / lead;
    }
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    balance_parlett_reinsch(&mut m);
    match Schur::try_new(m, f64::EPSILON, 10_000) {
        Some(s) => s.complex_eigenvalues().iter().copied().collect(),
        // Aberth from a circle of starting points.
        None => {
            let radius = (fp.c[0] / lead).abs().powf(1.0 / n as f64).max(1.0);
            (0..n)
                .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64))
                .collect()
        }
    }
}

/// Simultaneous Aberth-Ehrlich polish of all approximations.
fn aberth(p: &Polynomial, fp: &FloatPoly, z: &mut [Complex64], scale: f64) {
    let n = z.len();
    for _ in 0..MAX_ITER {
        let mut moved = false;
        for i in 0..n {
            let pv = exact_eval(p, z[i]);
            if pv.norm() <= RESIDUAL_TARGET * scale {
                continue;
            }
            let w = pv / fp.eval_derivative(z[i]);
            let sum: Complex64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = w / (Complex64::new(1.0, 0.0) - w * sum);
            if step.is_finite() {
                z[i] -= step;
                if step.norm() > 2.0 * f64::EPSILON * z[i].norm() {
                    moved = true;
                }
            }
        }
        if !moved {
            break;
        }
    }
}

struct FloatPoly {
    c: Vec<f64>,
}

impl FloatPoly {
    fn new(p: &Polynomial) -> Self {
        FloatPoly { c: p.coeffs().iter().map(rational_to_f64).collect() }
    }

    fn eval_derivative(&self, z: Complex64) -> Complex64 {
        self.c.iter().enumerate().skip(1).rev().fold(Complex64::zero(), |acc, (k, c)| acc * z + *c * k as f64)
    }
}

/// `p(z)` in exact complex-rational arithmetic, rounded once at the end.
pub fn exact_eval(p: &Polynomial, z: Complex64) -> Complex64 {
    let (Some(a), Some(b)) = (f64_to_rational(z.re), f64_to_rational(z.im)) else {
        return Complex64::new(f64::NAN, f64::NAN);
    };
    let mut re = BigRational::zero();
    let mut im = BigRational::zero();
    for c in p.coeffs().iter().rev() {
        if b.is_zero() {
            re = &re * &a + c;
        } else {
            let next_re = &re * &a - &im * &b + c;
            im = &re * &b + &im * &a;
            re = next_re;
        }
    }
    Complex64::new(rational_to_f64(&re), rational_to_f64(&im))
}

/// Continued-fraction convergents of `x` close to `x`, each tested exactly
/// as a root.
fn rational_root(p: &Polynomial, x: f64) -> Option<BigRational> {
    let target = f64_to_rational(x)?;
    let (mut h0, mut h1) = (num::BigInt::from(0), num::BigInt::from(1));
    let (mut k0, mut k1) = (num::BigInt::from(1), num::BigInt::from(0));
    let mut rest = target;
    for _ in 0..40 {
        let a = rest.floor();
        let ai = a.to_integer();
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        let q = BigRational::new(h2.clone(), k2.clone());
        if k2.bits() > 64 {
            return None;
        }
        if (rational_to_f64(&q) - x).abs() <= RATIONAL_WINDOW * (1.0 + x.abs()) && p.eval(&q).is_zero() {
            return Some(q);
        }
        let frac = &rest - &a;
        if frac.is_zero() || frac.abs() < BigRational::new(1.into(), num::BigInt::from(1u64 << 62)) {
            return None;
        }
        rest = frac.recip();
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
    }
    None
}
