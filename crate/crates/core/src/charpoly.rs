//! Cauchy-Euler operators and their characteristic polynomials.
//!
//! `sum a_i x^i y^(i)` maps `x^r` to `phi(r) x^r` with
//! `phi(r) = sum a_i r(r-1)...(r-i+1)`. The operator coefficients are exact
//! rationals and the falling-factorial to monomial conversion is exact.

use num::bigint::BigInt;
use num::integer::Integer;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::atoms::json_rational;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Operator `sum_{i=0}^n a_i x^i d^i/dx^i` with `a_n != 0`, `n >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerEquation {
    coeffs: Vec<BigRational>,
}

#[derive(Serialize, Deserialize)]
struct EquationJson {
    coefficients: Vec<Value>,
}

impl EulerEquation {
    /// `coeffs` in ascending order, `a_0` first.
    pub fn new(coeffs: Vec<BigRational>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidEquation("order must be at least 1".into()));
        }
        if coeffs.last().is_some_and(|a| a.is_zero()) {
            return Err(Error::InvalidEquation("leading coefficient a_n must be nonzero".into()));
        }
        Ok(EulerEquation { coeffs })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: EquationJson = serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))?;
        Self::from_json_values(&raw.coefficients)
    }

    pub(crate) fn from_json_values(values: &[Value]) -> Result<Self> {
        let coeffs = values.iter().map(json_rational).collect::<Result<Vec<_>>>()?;
        Self::new(coeffs)
    }

    /// `{"coefficients": ["-3", "3", ...]}`.
    pub fn to_json(&self) -> String {
        let raw = EquationJson { coefficients: self.coeffs.iter().map(|c| Value::String(c.to_string())).collect() };
        serde_json::to_string(&raw).expect("serializable")
    }

    /// Operator whose characteristic polynomial is `p`.
    pub fn from_charpoly(p: &Polynomial) -> Result<Self> {
        let n = p.degree().ok_or_else(|| Error::InvalidEquation("zero polynomial".into()))?;
        let mut rem = p.coeffs.clone();
        let mut coeffs = vec![BigRational::zero(); n + 1];
        for i in (0..=n).rev() {
            let a = rem[i].clone();
            if !a.is_zero() {
                for (k, f) in falling_factorial(i).coeffs.iter().enumerate() {
                    rem[k] -= &a * f;
                }
            }
            coeffs[i] = a;
        }
        Self::new(coeffs)
    }

    /// Monic operator with characteristic roots `roots`.
    pub fn from_roots(roots: &[BigRational]) -> Result<Self> {
        Self::from_charpoly(&Polynomial::from_roots(roots))
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> &BigRational {
        self.coeffs.last().expect("order >= 1")
    }
}

/// Dense polynomial with exact rational coefficients, ascending degree,
/// no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<BigRational>,
}

/// Characteristic polynomial in the monomial basis.
pub type MonomialPolynomial = Polynomial;

impl Polynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn one() -> Self {
        Polynomial { coeffs: vec![BigRational::one()] }
    }

    pub fn from_roots(roots: &[BigRational]) -> Self {
        roots.iter().fold(Self::one(), |p, r| p.mul_linear(r))
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    /// `self * (r - root)`.
    pub fn mul_linear(&self, root: &BigRational) -> Self {
        let mut out = vec![BigRational::zero(); self.coeffs.len() + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[k + 1] += c;
            out[k] -= c * root;
        }
        Polynomial::new(out)
    }

    /// Horner evaluation in any scalar field.
    pub fn eval<S: Scalar>(&self, r: &S) -> S {
        self.coeffs.iter().rev().fold(S::zero(), |acc, c| acc * r.clone() + S::from_rational(c))
    }

    pub fn derivative(&self) -> Self {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    fn rem(&self, divisor: &Polynomial) -> Polynomial {
        let mut r = self.coeffs.clone();
        let d = divisor.degree().expect("nonzero divisor");
        let lead = divisor.coeffs[d].clone();
        while r.len() > d && !r.is_empty() {
            let shift = r.len() - 1 - d;
            let factor = r.last().unwrap().clone() / &lead;
            for (k, c) in divisor.coeffs.iter().enumerate() {
                r[shift + k] -= &factor * c;
            }
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        Polynomial::new(r)
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Polynomial) -> Polynomial {
        let (mut a, mut b) = (self.primitive(), other.primitive());
        while !b.is_zero() {
            let r = a.rem(&b).primitive();
            a = b;
            b = r;
        }
        match a.leading().cloned() {
            Some(l) => Polynomial::new(a.coeffs.iter().map(|c| c / &l).collect()),
            None => a,
        }
    }

    /// True when the polynomial has no repeated root over the complex numbers.
    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree() == Some(0)
    }

    /// Integer polynomial with coprime coefficients and positive leading
    /// coefficient, proportional to `self`.
    pub fn integer_coeffs(&self) -> Vec<BigInt> {
        let lcm = self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * &lcm).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if g.is_zero() {
            return ints;
        }
        let sign = if self.leading().is_some_and(|l| l.is_negative()) { -BigInt::one() } else { BigInt::one() };
        ints.into_iter().map(|c| c / &g * &sign).collect()
    }

    fn primitive(&self) -> Polynomial {
        Polynomial::new(self.integer_coeffs().into_iter().map(BigRational::from_integer).collect())
    }
}

/// `r(r-1)...(r-i+1)` in the monomial basis (signed Stirling numbers of the
/// first kind).
pub fn falling_factorial(i: usize) -> Polynomial {
    (0..i).fold(Polynomial::one(), |p, s| p.mul_linear(&BigRational::from_integer(BigInt::from(s))))
}

/// Exact monomial expansion of `phi(r) = sum a_i r^(i falling)`.
pub fn build_charpoly(eq: &EulerEquation) -> Polynomial {
    let mut out = vec![BigRational::zero(); eq.order() + 1];
    let mut ff = Polynomial::one();
    for (i, a) in eq.coeffs().iter().enumerate() {
        if i > 0 {
            ff = ff.mul_linear(&BigRational::from_integer(BigInt::from(i - 1)));
        }
        for (k, c) in ff.coeffs.iter().enumerate() {
            out[k] += a * c;
        }
    }
    Polynomial::new(out)
}

/// `phi(r)` evaluated directly in the falling-factorial form.
pub fn eval_charpoly_falling<S: Scalar>(eq: &EulerEquation, r: &S) -> S {
    let mut sum = S::zero();
    let mut ff = S::one();
    for (i, a) in eq.coeffs().iter().enumerate() {
        if i > 0 {
            ff = ff * (r.clone() - S::from_i64(i as i64 - 1));
        }
        sum = sum + S::from_rational(a) * ff.clone();
    }
    sum
}
