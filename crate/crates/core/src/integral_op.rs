//! The operator `I_r(g)(x) = int_0^x t^(-r) g(t) dt`.
//!
//! A handle carries the closed form when every term of `t^(-r) g(t)` has a
//! term-class antiderivative, and falls back to quadrature otherwise. The
//! quadrature splits `(0, x]` into the dyadic panels `[x 2^(-k-1), x 2^(-k)]`,
//! `k < 20`, plus an initial piece `(0, x 2^(-20)]` integrated from the
//! Taylor series of the trigonometric factor, so integrable endpoint
//! singularities `t^m`, `-1 < Re m < 0`, are handled analytically.

use std::fmt;
use std::sync::Arc;

use num::complex::Complex64;
use num::rational::BigRational;
use num::{One, Zero};

use crate::error::{Error, Result};
use crate::quadrature::{adaptive, PANEL_BUDGET};
use crate::scalar::{rational_to_f64, Scalar};
use crate::term_algebra::{scaled_antiderivative, Antiderivative, Expr, Expression, Term, Trig};

pub const DEFAULT_TOL: f64 = 1e-10;
/// Number of dyadic panels; the initial piece is `(0, x 2^(-GRADED_LEVELS)]`.
pub const GRADED_LEVELS: i32 = 20;
pub const GROWTH_SAMPLES: usize = 1000;
/// Sampling range of [`verify_growth`] when a handle is built.
pub const DEFAULT_GROWTH_XMAX: f64 = 10.0;

/// `|g(t)| <= c t^alpha` on the sampled range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthBound {
    pub c: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shift {
    Exact(BigRational),
    Float(Complex64),
}

impl Shift {
    pub fn value(&self) -> Complex64 {
        match self {
            Shift::Exact(q) => Complex64::new(rational_to_f64(q), 0.0),
            Shift::Float(z) => *z,
        }
    }
}

/// Antiderivative in the scalar type the computation ran in.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosedForm {
    Exact(Expr),
    Real(Expression<f64>),
    Complex(Expression<Complex64>),
}

impl ClosedForm {
    pub fn eval_with_magnitude(&self, x: f64) -> Result<(Complex64, f64)> {
        match self {
            ClosedForm::Exact(e) => e.eval_with_magnitude(x),
            ClosedForm::Real(e) => e.eval_with_magnitude(x),
            ClosedForm::Complex(e) => e.eval_with_magnitude(x),
        }
    }

    pub fn to_complex(&self) -> Expression<Complex64> {
        match self {
            ClosedForm::Exact(e) => e.to_complex(),
            ClosedForm::Real(e) => e.to_complex(),
            ClosedForm::Complex(e) => e.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Mode {
    ClosedForm(ClosedForm),
    Quadrature,
}

pub type BlackBox = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// `t^(-r) g(t)` as terms, or `g` as an opaque function.
#[derive(Clone)]
pub enum Integrand {
    Terms(Expression<Complex64>),
    BlackBox(BlackBox),
}

impl fmt::Debug for Integrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Integrand::Terms(e) => write!(f, "Terms({})", e),
            Integrand::BlackBox(_) => f.write_str("BlackBox"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct IntegralHandle {
    shift: Shift,
    integrand: Integrand,
    mode: Mode,
    growth: GrowthBound,
}

/// Builds `I_r(g)`; fails when some term of `t^(-r) g` is not integrable at 0.
pub fn make_integral(g: &Expr, shift: Shift) -> Result<IntegralHandle> {
    let (closed, integrand) = match &shift {
        Shift::Exact(r) => {
            (closed_form(g, r)?.map(ClosedForm::Exact), g.mul_monomial(&BigRational::one(), &-r.clone()).to_complex())
        }
        Shift::Float(z) if z.im == 0.0 => {
            let gf: Expression<f64> = g.map(rational_to_f64);
            (closed_form(&gf, &z.re)?.map(ClosedForm::Real), gf.mul_monomial(&1.0, &-z.re).to_complex())
        }
        Shift::Float(z) => {
            let gc = g.to_complex();
            let one = Complex64::new(1.0, 0.0);
            (closed_form(&gc, z)?.map(ClosedForm::Complex), gc.mul_monomial(&one, &-*z))
        }
    };
    Ok(IntegralHandle {
        shift,
        integrand: Integrand::Terms(integrand),
        mode: closed.map_or(Mode::Quadrature, Mode::ClosedForm),
        growth: verify_growth(g, DEFAULT_GROWTH_XMAX),
    })
}

/// `I_r` applied to an opaque `g` with a stated growth bound near 0; always
/// evaluated by quadrature.
pub fn make_black_box_integral(g: BlackBox, growth: GrowthBound, shift: Complex64) -> Result<IntegralHandle> {
    if growth.alpha - shift.re <= -1.0 {
        return Err(Error::DivergentAtZero { term: "black-box integrand".into(), shift: format!("{:?}", shift) });
    }
    Ok(IntegralHandle { shift: Shift::Float(shift), integrand: Integrand::BlackBox(g), mode: Mode::Quadrature, growth })
}

/// Sum of the term antiderivatives, `None` if any term lacks one.
pub fn closed_form<S: Scalar>(g: &Expression<S>, r: &S) -> Result<Option<Expression<S>>> {
    let mut acc = Some(Expression::zero());
    for t in g.terms() {
        match scaled_antiderivative(t, r)? {
            Antiderivative::Closed(e) => acc = acc.map(|a| a.add(&e)),
            Antiderivative::NoClosedForm => acc = None,
        }
    }
    Ok(acc)
}

impl IntegralHandle {
    pub fn shift(&self) -> &Shift {
        &self.shift
    }

    pub fn mode(&self) -> &Mode {
        &self.mode
    }

    pub fn growth(&self) -> GrowthBound {
        self.growth
    }

    pub fn closed_form(&self) -> Option<&ClosedForm> {
        match &self.mode {
            Mode::ClosedForm(c) => Some(c),
            Mode::Quadrature => None,
        }
    }

    /// Same integral, always evaluated by quadrature.
    pub fn quadrature_only(&self) -> IntegralHandle {
        IntegralHandle { mode: Mode::Quadrature, ..self.clone() }
    }

    /// `t^(-r) g(t)`.
    pub fn integrand_value(&self, t: f64) -> Complex64 {
        match &self.integrand {
            Integrand::Terms(e) => e.terms().iter().map(|term| term.eval_complex_unchecked(t)).sum(),
            Integrand::BlackBox(g) => g(t) * Complex64::new(t, 0.0).powc(-self.shift.value()),
        }
    }

    /// The closed form when round-off in it stays below `tol` relative.
    fn closed_value(&self, x: f64, tol: f64) -> Result<Option<Complex64>> {
        let Mode::ClosedForm(c) = &self.mode else { return Ok(None) };
        let (v, mag) = c.eval_with_magnitude(x)?;
        let noise = 4.0 * f64::EPSILON * mag;
        Ok((noise <= tol * v.norm() || mag == 0.0).then_some(v))
    }

    fn near_zero(&self, delta: f64) -> Result<(Complex64, f64)> {
        match &self.integrand {
            Integrand::Terms(e) => Ok(e.terms().iter().fold((Complex64::zero(), 0.0), |(v, err), t| {
                let (tv, te) = taylor_piece(t, delta);
                (v + tv, err + te)
            })),
            Integrand::BlackBox(_) => {
                let f = |t: f64| self.integrand_value(t);
                let (f1, f2, f3) = (f(delta), f(delta / 2.0), f(delta / 4.0));
                if f1.norm() == 0.0 {
                    return Ok((Complex64::zero(), 0.0));
                }
                let q1 = (f1.norm() / f2.norm()).log2();
                let q2 = (f2.norm() / f3.norm()).log2();
                if q1.is_nan() || q1 <= -1.0 {
                    return Err(Error::DivergentAtZero {
                        term: "black-box integrand".into(),
                        shift: format!("{:?}", self.shift.value()),
                    });
                }
                let v = f1 * delta / (q1 + 1.0);
                Ok((v, v.norm() * ((q1 - q2).abs() / (q1 + 1.0)).max(1e-3)))
            }
        }
    }
}

/// `int_0^delta c t^m ln^k t trig(t) dt` from the Taylor series of the
/// trigonometric factor, with the last retained term as error estimate.
fn taylor_piece(t: &Term<Complex64>, delta: f64) -> (Complex64, f64) {
    let zero = Complex64::zero();
    let integrate_monomial = |coeff: Complex64, extra: u32| -> Complex64 {
        let term = Term::new(coeff, t.power + extra as f64, t.log_exp, Trig::None);
        match scaled_antiderivative(&term, &zero) {
            Ok(Antiderivative::Closed(e)) => e.terms().iter().map(|u| u.eval_complex_unchecked(delta)).sum(),
            _ => Complex64::new(f64::NAN, f64::NAN),
        }
    };
    let start = match t.trig {
        Trig::None => return (integrate_monomial(t.coeff, 0), 0.0),
        Trig::Sin => 1u32,
        Trig::Cos => 0u32,
    };
    let mut sum = zero;
    let mut coeff = t.coeff;
    let mut last = 0.0;
    for j in 0..200u32 {
        let e = start + 2 * j;
        if j > 0 {
            coeff = -coeff / ((e - 1) as f64 * e as f64);
        }
        let piece = integrate_monomial(coeff, e);
        sum += piece;
        last = piece.norm();
        if j > 0 && last <= 1e-17 * sum.norm() {
            break;
        }
    }
    (sum, last)
}

/// Evaluates `I_r(g)(x)` to within `tol * (1 + |result|)`.
pub fn eval_integral(h: &IntegralHandle, x: f64, tol: f64) -> Result<Complex64> {
    check_args(x, tol)?;
    if let Some(v) = h.closed_value(x, tol)? {
        return Ok(v);
    }
    let (value, error) = quadrature_from_zero(h, x, tol, 0.0)?;
    finish(value, error, tol)
}

/// Evaluates at many points, integrating cumulatively along the sorted grid.
pub fn eval_integral_many(h: &IntegralHandle, xs: &[f64], tol: f64) -> Result<Vec<Complex64>> {
    let mut out = vec![Complex64::zero(); xs.len()];
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut prev: Option<(f64, Complex64, f64)> = None;
    let m = xs.len().max(1) as f64;
    for idx in order {
        let x = xs[idx];
        check_args(x, tol)?;
        if let Some(v) = h.closed_value(x, tol)? {
            out[idx] = v;
            continue;
        }
        let (value, error) = match prev {
            Some((px, pv, perr)) if px == x => (pv, perr),
            // Continue from the previous point unless it is far below x.
            Some((px, pv, perr)) if px >= 0.5 * x => {
                let f = |t: f64| h.integrand_value(t);
                let r = adaptive(&f, &[(px, x)], tol, tol * pv.norm() / m);
                (pv + r.value, perr + r.error)
            }
            _ => quadrature_from_zero(h, x, tol, 0.0)?,
        };
        prev = Some((x, value, error));
        out[idx] = finish(value, error, tol)?;
    }
    Ok(out)
}

fn check_args(x: f64, tol: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain { x });
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {}", tol)));
    }
    Ok(())
}

fn finish(value: Complex64, error: f64, tol: f64) -> Result<Complex64> {
    if !value.is_finite() || error > tol * (1.0 + value.norm()) {
        return Err(Error::ToleranceNotMet { achieved: error, requested: tol });
    }
    Ok(value)
}

fn quadrature_from_zero(h: &IntegralHandle, x: f64, tol: f64, abs_tol: f64) -> Result<(Complex64, f64)> {
    let delta = x * 2f64.powi(-GRADED_LEVELS);
    let (v0, e0) = h.near_zero(delta)?;
    let panels: Vec<(f64, f64)> = (0..GRADED_LEVELS).map(|k| (x * 2f64.powi(-k - 1), x * 2f64.powi(-k))).collect();
    let f = |t: f64| h.integrand_value(t);
    let r = adaptive(&f, &panels, tol, abs_tol);
    debug_assert!(r.panels <= PANEL_BUDGET);
    Ok((r.value + v0, r.error + e0))
}

/// `alpha` is the smallest term power; `c` the largest `|g(t)| / t^alpha`
/// over log-spaced samples on `[x_max 1e-6, x_max]`.
pub fn verify_growth(g: &Expr, x_max: f64) -> GrowthBound {
    if g.is_zero() {
        return GrowthBound { c: 0.0, alpha: f64::INFINITY };
    }
    let alpha = g.min_power();
    let gc = g.to_complex();
    let c = (0..GROWTH_SAMPLES)
        .map(|k| {
            let t = x_max * 10f64.powf(-6.0 + 6.0 * k as f64 / (GROWTH_SAMPLES - 1) as f64);
            let v: Complex64 = gc.terms().iter().map(|term| term.eval_complex_unchecked(t)).sum();
            v.norm() / t.powf(alpha)
        })
        .fold(0.0, f64::max);
    GrowthBound { c, alpha }
}
