//! The right-hand-side class `g(x) = sum c * x^p * ln(x)^k * tau(x)` with
//! `tau` one of `1`, `sin`, `cos`.
//!
//! Expressions are always kept canonical: terms sorted by
//! `(power, log_exp, trig)`, like terms merged and zero terms dropped. The
//! class is closed under differentiation and under multiplication by `x^r`,
//! which is all the solver needs to build and check closed-form solutions.

mod antiderivative;
mod parse;

use std::cmp::Ordering;
use std::fmt;

use num::complex::Complex64;
use num::rational::BigRational;

use crate::error::{Error, Result};
use crate::scalar::{RealScalar, Scalar};

pub use antiderivative::{scaled_antiderivative, Antiderivative};
pub use parse::parse;

/// Trigonometric factor of a term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Trig {
    None,
    Sin,
    Cos,
}

impl Trig {
    fn eval(self, x: f64) -> f64 {
        match self {
            Trig::None => 1.0,
            Trig::Sin => x.sin(),
            Trig::Cos => x.cos(),
        }
    }
}

/// One summand `coeff * x^power * ln(x)^log_exp * trig(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term<S> {
    pub coeff: S,
    pub power: S,
    pub log_exp: u32,
    pub trig: Trig,
}

impl<S: Scalar> Term<S> {
    pub fn new(coeff: S, power: S, log_exp: u32, trig: Trig) -> Self {
        Term { coeff, power, log_exp, trig }
    }

    pub fn constant(c: S) -> Self {
        Term::new(c, S::zero(), 0, Trig::None)
    }

    fn key_cmp(&self, other: &Self) -> Ordering {
        self.power.canonical_cmp(&other.power).then(self.log_exp.cmp(&other.log_exp)).then(self.trig.cmp(&other.trig))
    }

    /// Product of two terms; `None` when both carry a trigonometric factor.
    pub fn mul(&self, other: &Self) -> Option<Self> {
        let trig = match (self.trig, other.trig) {
            (Trig::None, t) | (t, Trig::None) => t,
            _ => return None,
        };
        Some(Term::new(
            self.coeff.clone() * other.coeff.clone(),
            self.power.clone() + other.power.clone(),
            self.log_exp + other.log_exp,
            trig,
        ))
    }

    /// Exact derivative as a list of (not yet canonical) terms.
    pub fn derivative(&self) -> Vec<Term<S>> {
        let mut out = Vec::with_capacity(3);
        let lowered = self.power.clone() - S::one();
        if !self.power.is_zero() {
            out.push(Term::new(self.coeff.clone() * self.power.clone(), lowered.clone(), self.log_exp, self.trig));
        }
        if self.log_exp > 0 {
            out.push(Term::new(
                self.coeff.clone() * S::from_i64(self.log_exp as i64),
                lowered,
                self.log_exp - 1,
                self.trig,
            ));
        }
        match self.trig {
            Trig::None => {}
            Trig::Sin => out.push(Term::new(self.coeff.clone(), self.power.clone(), self.log_exp, Trig::Cos)),
            Trig::Cos => out.push(Term::new(-self.coeff.clone(), self.power.clone(), self.log_exp, Trig::Sin)),
        }
        out
    }

    /// Value at `x > 0` (caller checks the domain).
    pub fn eval_complex_unchecked(&self, x: f64) -> Complex64 {
        let lx = x.ln();
        let p = self.power.to_complex();
        let xp = if p.im == 0.0 { Complex64::new(x.powf(p.re), 0.0) } else { (p * lx).exp() };
        let mut v = self.coeff.to_complex() * xp;
        if self.log_exp > 0 {
            v *= lx.powi(self.log_exp as i32);
        }
        v * self.trig.eval(x)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Term<T> {
        Term::new(f(&self.coeff), f(&self.power), self.log_exp, self.trig)
    }
}

/// Canonical sum of [`Term`]s.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression<S> {
    terms: Vec<Term<S>>,
}

/// Exact expression, the type produced by the parser.
pub type Expr = Expression<BigRational>;

impl<S: Scalar> Default for Expression<S> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<S: Scalar> Expression<S> {
    pub fn zero() -> Self {
        Expression { terms: Vec::new() }
    }

    pub fn new(terms: Vec<Term<S>>) -> Self {
        let mut e = Expression { terms };
        e.canonicalize();
        e
    }

    pub fn from_term(t: Term<S>) -> Self {
        Self::new(vec![t])
    }

    pub fn terms(&self) -> &[Term<S>] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<Term<S>> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn canonicalize(&mut self) {
        if self.terms.is_empty() {
            return;
        }
        // Snap powers that denote the same exponent onto one representative,
        // so float round-off in exponent arithmetic still merges like terms.
        self.terms.sort_by(|a, b| a.power.canonical_cmp(&b.power));
        let mut anchor = 0;
        for i in 1..self.terms.len() {
            if self.terms[i].power.same_as(&self.terms[anchor].power) {
                let p = self.terms[anchor].power.clone();
                self.terms[i].power = p;
            } else {
                anchor = i;
            }
        }
        self.terms.sort_by(|a, b| a.key_cmp(b));
        let mut merged: Vec<Term<S>> = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            match merged.last_mut() {
                Some(last) if last.key_cmp(&t) == Ordering::Equal => {
                    last.coeff = last.coeff.clone() + t.coeff;
                }
                _ => merged.push(t),
            }
        }
        merged.retain(|t| !t.coeff.is_zero());
        self.terms = merged;
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::new(terms)
    }

    pub fn neg(&self) -> Self {
        self.scale(&-S::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::new(
            self.terms
                .iter()
                .map(|t| Term::new(t.coeff.clone() * c.clone(), t.power.clone(), t.log_exp, t.trig))
                .collect(),
        )
    }

    /// Multiplies by `c * x^power`; always stays in the class.
    pub fn mul_monomial(&self, c: &S, power: &S) -> Self {
        Self::new(
            self.terms
                .iter()
                .map(|t| Term::new(t.coeff.clone() * c.clone(), t.power.clone() + power.clone(), t.log_exp, t.trig))
                .collect(),
        )
    }

    /// Distributes the product; `None` if two trigonometric factors meet.
    pub fn mul(&self, other: &Self) -> Option<Self> {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(a.mul(b)?);
            }
        }
        Some(Self::new(terms))
    }

    pub fn differentiate(&self) -> Self {
        Self::new(self.terms.iter().flat_map(|t| t.derivative()).collect())
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |e, _| e.differentiate())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Expression<T> {
        Expression::new(self.terms.iter().map(|t| t.map(&f)).collect())
    }

    pub fn to_complex(&self) -> Expression<Complex64> {
        self.map(|s| s.to_complex())
    }

    pub fn eval_complex(&self, x: f64) -> Result<Complex64> {
        check_domain(x)?;
        Ok(self.terms.iter().map(|t| t.eval_complex_unchecked(x)).sum())
    }

    /// Value together with the sum of term magnitudes, a cancellation gauge.
    pub fn eval_with_magnitude(&self, x: f64) -> Result<(Complex64, f64)> {
        check_domain(x)?;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut mag = 0.0;
        for t in &self.terms {
            let v = t.eval_complex_unchecked(x);
            mag += v.norm();
            sum += v;
        }
        Ok((sum, mag))
    }

    /// Smallest real part among the term powers; `+inf` for the zero expression.
    pub fn min_power(&self) -> f64 {
        self.terms.iter().map(|t| t.power.real_part()).fold(f64::INFINITY, f64::min)
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.iter().all(|t| t.log_exp == 0 && t.trig == Trig::None && t.power.as_nonneg_integer().is_some())
    }
}

impl<S: RealScalar> Expression<S> {
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        Ok(self.eval_complex(x)?.re)
    }
}

impl Expression<Complex64> {
    /// Real-coefficient, real-power copy when every imaginary part is below
    /// `tol` relative to the largest coefficient magnitude.
    pub fn to_real(&self, tol: f64) -> Option<Expression<f64>> {
        let scale = self.terms.iter().map(|t| t.coeff.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let real = self
            .terms
            .iter()
            .all(|t| t.coeff.im.abs() <= tol * scale && t.power.im.abs() <= tol * (1.0 + t.power.re.abs()));
        real.then(|| self.map(|c| c.re))
    }
}

fn check_domain(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { x })
    }
}

struct TermBody<'a, S>(&'a Term<S>, bool);

impl<S: Scalar> fmt::Display for TermBody<'_, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let TermBody(t, negate) = *self;
        let coeff = if negate { -t.coeff.clone() } else { t.coeff.clone() };
        let has_factor = !t.power.is_zero() || t.log_exp > 0 || t.trig != Trig::None;
        let mut first = true;
        let mut sep = |f: &mut fmt::Formatter<'_>| -> fmt::Result {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            Ok(())
        };
        if !(has_factor && coeff.is_one()) {
            sep(f)?;
            coeff.fmt_coeff(f)?;
        }
        if !t.power.is_zero() {
            sep(f)?;
            f.write_str("x")?;
            if !t.power.is_one() {
                f.write_str("^")?;
                t.power.fmt_power(f)?;
            }
        }
        if t.log_exp > 0 {
            sep(f)?;
            f.write_str("ln(x)")?;
            if t.log_exp > 1 {
                write!(f, "^{}", t.log_exp)?;
            }
        }
        match t.trig {
            Trig::None => {}
            Trig::Sin => {
                sep(f)?;
                f.write_str("sin(x)")?;
            }
            Trig::Cos => {
                sep(f)?;
                f.write_str("cos(x)")?;
            }
        }
        Ok(())
    }
}

impl<S: Scalar> fmt::Display for Term<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeff.is_negative_real() {
            write!(f, "-{}", TermBody(self, true))
        } else {
            write!(f, "{}", TermBody(self, false))
        }
    }
}

impl<S: Scalar> fmt::Display for Expression<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let negative = t.coeff.is_negative_real();
            match (i, negative) {
                (0, false) => write!(f, "{}", TermBody(t, false))?,
                (0, true) => write!(f, "-{}", TermBody(t, true))?,
                (_, false) => write!(f, " + {}", TermBody(t, false))?,
                (_, true) => write!(f, " - {}", TermBody(t, true))?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    fn q(n: i64, d: i64) -> BigRational {
        rational(n, d)
    }

    fn t(c: i64, p: i64, k: u32, trig: Trig) -> Term<BigRational> {
        Term::new(q(c, 1), q(p, 1), k, trig)
    }

    #[test]
    fn canonical_merges_and_drops() {
        let e = Expression::new(vec![t(1, 2, 0, Trig::None), t(-1, 2, 0, Trig::None), t(3, 1, 0, Trig::Sin)]);
        assert_eq!(e.terms(), &[t(3, 1, 0, Trig::Sin)]);
        let e = Expression::new(vec![t(2, 3, 1, Trig::None), t(1, 3, 0, Trig::Cos), t(1, 3, 0, Trig::None)]);
        let keys: Vec<_> = e.terms().iter().map(|t| (t.log_exp, t.trig)).collect();
        assert_eq!(keys, vec![(0, Trig::None), (0, Trig::Cos), (1, Trig::None)]);
    }

    #[test]
    fn float_powers_merge_despite_roundoff() {
        let a = Term::new(1.0, 0.1 + (3.0 - 0.1), 0, Trig::None);
        let b = Term::new(2.0, 3.0, 0, Trig::None);
        let c = Term::new(5.0, 3.0, 1, Trig::None);
        let e = Expression::new(vec![a, c, b]);
        assert_eq!(e.terms().len(), 2);
        assert_eq!(e.terms()[0].coeff, 3.0);
    }

    #[test]
    fn evaluate_examples() {
        let e = Expression::from_term(t(1, 4, 1, Trig::None));
        assert_eq!(e.evaluate(1.0).unwrap(), 0.0);
        let e = Expression::from_term(t(1, 8, 0, Trig::Sin));
        assert!(e.evaluate(std::f64::consts::PI).unwrap().abs() < 1e-10);
        let e = Expression::from_term(t(2, 1, 0, Trig::None));
        assert_eq!(e.evaluate(3.0).unwrap(), 6.0);
        assert!(matches!(e.evaluate(0.0), Err(Error::Domain { .. })));
        assert!(matches!(e.evaluate(-1.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn differentiate_examples() {
        let x2 = Expression::from_term(t(1, 2, 0, Trig::None));
        assert_eq!(x2.differentiate(), Expression::from_term(t(2, 1, 0, Trig::None)));

        let xlnx = Expression::from_term(t(1, 1, 1, Trig::None));
        assert_eq!(xlnx.differentiate(), Expression::new(vec![t(1, 0, 1, Trig::None), t(1, 0, 0, Trig::None)]));

        let xsin = Expression::from_term(t(1, 1, 0, Trig::Sin));
        assert_eq!(xsin.differentiate(), Expression::new(vec![t(1, 0, 0, Trig::Sin), t(1, 1, 0, Trig::Cos)]));
        assert!(Expression::from_term(t(7, 0, 0, Trig::None)).differentiate().is_zero());
    }

    #[test]
    fn complex_power_evaluation() {
        // x^(1+2i) = x * (cos(2 ln x) + i sin(2 ln x))
        let e = Expression::from_term(Term::new(Complex64::new(1.0, 0.0), Complex64::new(1.0, 2.0), 0, Trig::None));
        let x: f64 = 3.0;
        let v = e.eval_complex(x).unwrap();
        let expected = Complex64::new(x * (2.0 * x.ln()).cos(), x * (2.0 * x.ln()).sin());
        assert!((v - expected).norm() < 1e-14);
    }

    #[test]
    fn trig_products_rejected() {
        let s = Expression::from_term(t(1, 0, 0, Trig::Sin));
        let c = Expression::from_term(t(1, 0, 0, Trig::Cos));
        assert!(s.mul(&c).is_none());
        let p = Expression::from_term(t(2, 3, 1, Trig::None));
        assert_eq!(p.mul(&s).unwrap(), Expression::from_term(t(2, 3, 1, Trig::Sin)));
    }

    #[test]
    fn display_forms() {
        let e = Expression::new(vec![
            Term::new(q(1, 19845), q(4, 1), 1, Trig::None),
            Term::new(q(-898, 6251175), q(4, 1), 0, Trig::None),
        ]);
        assert_eq!(e.to_string(), "-(898/6251175)*x^4 + (1/19845)*x^4*ln(x)");
        let e = Expression::new(vec![
            Term::new(q(-1, 1), q(-1, 2), 2, Trig::Cos),
            Term::new(q(5, 1), q(0, 1), 0, Trig::None),
        ]);
        assert_eq!(e.to_string(), "-x^(-1/2)*ln(x)^2*cos(x) + 5");
        assert_eq!(Expression::<BigRational>::zero().to_string(), "0");
    }
}
