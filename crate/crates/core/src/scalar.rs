//! Numeric fields the algebra is generic over.
//!
//! Three scalar types are supported: exact rationals ([`BigRational`]), real
//! doubles and complex doubles. Exact rationals drive the bit-reproducible
//! paths (basis changes, atom weights of rational roots, closed-form
//! solutions); the float types carry irrational or complex roots.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Neg;

use num::bigint::BigInt;
use num::complex::Complex64;
use num::rational::BigRational;
use num::{Num, Signed, ToPrimitive, Zero};

/// Relative tolerance used to decide that two float exponents denote the same
/// power when merging like terms.
pub const FLOAT_SAME_TOL: f64 = 1e-12;

pub trait Scalar: Clone + fmt::Debug + PartialEq + Num + Neg<Output = Self> + Send + Sync + 'static {
    fn from_rational(q: &BigRational) -> Self;

    fn from_i64(v: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(v)))
    }

    fn to_complex(&self) -> Complex64;

    fn magnitude(&self) -> f64 {
        self.to_complex().norm()
    }

    fn real_part(&self) -> f64 {
        self.to_complex().re
    }

    /// Total order used for canonical term ordering.
    fn canonical_cmp(&self, other: &Self) -> Ordering;

    /// Whether two exponents denote the same power (exact for rationals).
    fn same_as(&self, other: &Self) -> bool;

    /// `Some(m)` when the value is exactly a non-negative integer.
    fn as_nonneg_integer(&self) -> Option<u32>;

    /// `1 / prod(factors)`.
    fn inv_product(factors: &[Self]) -> Self {
        let mut p = Self::one();
        for f in factors {
            p = p * f.clone();
        }
        Self::one() / p
    }

    /// `1 / prod_j (x - others_j)`.
    fn inv_product_of_differences(x: &Self, others: &[Self]) -> Self {
        let diffs: Vec<Self> = others.iter().map(|o| x.clone() - o.clone()).collect();
        Self::inv_product(&diffs)
    }

    /// `sum_i x_i^s w_i`.
    fn power_dot(xs: &[Self], ws: &[Self], s: u32) -> Self {
        xs.iter()
            .zip(ws)
            .fold(Self::zero(), |acc, (x, w)| acc + (0..s).fold(Self::one(), |p, _| p * x.clone()) * w.clone())
    }

    fn fmt_coeff(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result;

    fn fmt_power(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result;

    fn is_negative_real(&self) -> bool;
}

/// Marker for scalar types whose values are real.
pub trait RealScalar: Scalar {
    fn to_f64(&self) -> f64;
}

impl Scalar for BigRational {
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(rational_to_f64(self), 0.0)
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }

    fn same_as(&self, other: &Self) -> bool {
        self == other
    }

    fn as_nonneg_integer(&self) -> Option<u32> {
        if self.is_integer() && !self.is_negative() {
            self.to_integer().to_u32()
        } else {
            None
        }
    }

    fn fmt_coeff(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "({}/{})", self.numer(), self.denom())
        }
    }

    fn fmt_power(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "({}/{})", self.numer(), self.denom())
        }
    }

    fn is_negative_real(&self) -> bool {
        self.is_negative()
    }
}

impl RealScalar for BigRational {
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
}

impl Scalar for f64 {
    fn from_rational(q: &BigRational) -> Self {
        rational_to_f64(q)
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.total_cmp(other)
    }

    fn same_as(&self, other: &Self) -> bool {
        close(*self, *other)
    }

    fn as_nonneg_integer(&self) -> Option<u32> {
        if *self >= 0.0 && self.fract() == 0.0 && *self <= u32::MAX as f64 {
            Some(*self as u32)
        } else {
            None
        }
    }

    fn inv_product(factors: &[Self]) -> Self {
        let mut p = 1.0f64;
        for &d in factors {
            p *= d;
            if !(1e-300..=1e300).contains(&p.abs()) {
                return log_inv_product_real(factors);
            }
        }
        1.0 / p
    }

    /// Differences and product in double-double, so the weight is accurate
    /// to about one rounding.
    fn inv_product_of_differences(x: &Self, others: &[Self]) -> Self {
        let mut p = DoubleDouble::from(1.0);
        for &o in others {
            p = p.mul(DoubleDouble::sum(*x, -o));
            if !(1e-300..=1e300).contains(&p.hi.abs()) {
                let diffs: Vec<f64> = others.iter().map(|o| x - o).collect();
                return log_inv_product_real(&diffs);
            }
        }
        p.recip()
    }

    fn power_dot(xs: &[Self], ws: &[Self], s: u32) -> Self {
        let mut acc = DoubleDouble::from(0.0);
        for (&x, &w) in xs.iter().zip(ws) {
            let mut term = DoubleDouble::from(w);
            for _ in 0..s {
                term = term.mul(DoubleDouble::from(x));
            }
            acc = acc.add(term);
        }
        acc.hi + acc.lo
    }

    fn fmt_coeff(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self)
    }

    fn fmt_power(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.fract() == 0.0 && self.abs() < 1e15 {
            write!(f, "{}", *self as i64)
        } else {
            write!(f, "({:?})", self)
        }
    }

    fn is_negative_real(&self) -> bool {
        *self < 0.0
    }
}

impl RealScalar for f64 {
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for Complex64 {
    fn from_rational(q: &BigRational) -> Self {
        Complex64::new(rational_to_f64(q), 0.0)
    }

    fn to_complex(&self) -> Complex64 {
        *self
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.re.total_cmp(&other.re).then_with(|| self.im.total_cmp(&other.im))
    }

    fn same_as(&self, other: &Self) -> bool {
        let scale = 1.0 + self.norm().max(other.norm());
        (self - other).norm() <= FLOAT_SAME_TOL * scale
    }

    fn as_nonneg_integer(&self) -> Option<u32> {
        if self.im == 0.0 {
            self.re.as_nonneg_integer()
        } else {
            None
        }
    }

    fn inv_product(factors: &[Self]) -> Self {
        let mut p = Complex64::new(1.0, 0.0);
        for &d in factors {
            p *= d;
            if !(1e-300..=1e300).contains(&p.norm()) {
                let (log_mag, arg) = factors.iter().fold((0.0, 0.0), |(l, a), d| (l + d.norm().ln(), a + d.arg()));
                return Complex64::from_polar((-log_mag).exp(), -arg);
            }
        }
        Complex64::new(1.0, 0.0) / p
    }

    fn fmt_coeff(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im == 0.0 {
            write!(f, "{:?}", self.re)
        } else {
            write!(f, "({:?}{:+?}i)", self.re, self.im)
        }
    }

    fn fmt_power(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im == 0.0 {
            self.re.fmt_power(f)
        } else {
            write!(f, "({:?}{:+?}i)", self.re, self.im)
        }
    }

    fn is_negative_real(&self) -> bool {
        self.im == 0.0 && self.re < 0.0
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= FLOAT_SAME_TOL * (1.0 + a.abs().max(b.abs()))
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl From<f64> for DoubleDouble {
    fn from(v: f64) -> Self {
        DoubleDouble { hi: v, lo: 0.0 }
    }
}

impl DoubleDouble {
    /// Exact `a + b`.
    fn sum(a: f64, b: f64) -> Self {
        let hi = a + b;
        let bb = hi - a;
        DoubleDouble { hi, lo: (a - (hi - bb)) + (b - bb) }
    }

    fn renormalize(hi: f64, lo: f64) -> Self {
        let s = hi + lo;
        DoubleDouble { hi: s, lo: lo - (s - hi) }
    }

    fn add(self, o: Self) -> Self {
        let s = Self::sum(self.hi, o.hi);
        Self::renormalize(s.hi, s.lo + self.lo + o.lo)
    }

    fn mul(self, o: Self) -> Self {
        let hi = self.hi * o.hi;
        let err = self.hi.mul_add(o.hi, -hi);
        Self::renormalize(hi, err + self.hi * o.lo + self.lo * o.hi)
    }

    /// `1 / self` rounded to a double.
    fn recip(self) -> f64 {
        let q = 1.0 / self.hi;
        let r = DoubleDouble::from(1.0).add(self.mul(DoubleDouble::from(-q)));
        q + q * (r.hi + r.lo)
    }
}

fn log_inv_product_real(factors: &[f64]) -> f64 {
    let mut log_mag = 0.0;
    let mut negative = false;
    for &d in factors {
        log_mag += d.abs().ln();
        negative ^= d < 0.0;
    }
    let v = (-log_mag).exp();
    if negative {
        -v
    } else {
        v
    }
}

/// Correctly scaled conversion that survives numerators and denominators
/// beyond the f64 range.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && n.abs() < 9.007_199_254_740_992e15 && d < 9.007_199_254_740_992e15 {
            return n / d;
        }
    }
    if q.is_zero() {
        return 0.0;
    }
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    // Shift so the integer quotient carries ~64 significant bits.
    let shift = 64 - (nb - db);
    let (num, den) = if shift >= 0 {
        (q.numer().clone() << (shift as usize), q.denom().clone())
    } else {
        (q.numer().clone(), q.denom().clone() << ((-shift) as usize))
    };
    let quotient = (num / den).to_f64().unwrap_or(f64::NAN);
    ldexp(quotient, -shift)
}

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

/// Exact rational value of a finite double.
pub fn f64_to_rational(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"`, an integer, or a decimal literal (with optional exponent)
/// into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d.is_zero() {
            return None;
        }
        return Some(n / d);
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{}{}", int_part, frac_part);
    let mut value = BigRational::from_integer(all_digits.parse::<BigInt>().ok()?);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num::pow(ten, scale as usize);
    } else {
        value /= num::pow(ten, (-scale) as usize);
    }
    Some(if negative { -value } else { value })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals_and_decimals() {
        assert_eq!(parse_rational("3/4"), Some(rational(3, 4)));
        assert_eq!(parse_rational("-0.25"), Some(rational(-1, 4)));
        assert_eq!(parse_rational("1e-2"), Some(rational(1, 100)));
        assert_eq!(parse_rational("2.5E1"), Some(rational(25, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("."), None);
    }

    #[test]
    fn huge_rationals_convert() {
        let big = BigRational::new(BigInt::from(3) << 2000usize, BigInt::from(1) << 2001usize);
        assert_eq!(rational_to_f64(&big), 1.5);
        let tiny = BigRational::new(BigInt::from(1), BigInt::from(7) << 900usize);
        let expected = (1.0f64 / 7.0) * 2f64.powi(-900);
        assert_eq!(rational_to_f64(&tiny), expected);
    }

    #[test]
    fn log_path_matches_direct_product() {
        let factors: Vec<f64> = (1..=200).map(|i| (i as f64) * 0.37 - 40.0).collect();
        let via_log = f64::inv_product(&factors);
        let log_mag: f64 = factors.iter().map(|d| d.abs().ln()).sum();
        assert!(((-log_mag).exp() - via_log.abs()).abs() <= 1e-12 * via_log.abs());
        let small = [2.0, -4.0, 0.5];
        assert_eq!(f64::inv_product(&small), -0.25);
    }

    #[test]
    fn integer_detection() {
        assert_eq!(rational(6, 2).as_nonneg_integer(), Some(3));
        assert_eq!(rational(-6, 2).as_nonneg_integer(), None);
        assert_eq!(2.5f64.as_nonneg_integer(), None);
        assert_eq!(Complex64::new(4.0, 0.0).as_nonneg_integer(), Some(4));
        assert_eq!(Complex64::new(4.0, 1.0).as_nonneg_integer(), None);
    }
}
