use super::{Expression, Term, Trig};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Result of integrating `s^(-r) * term(s)` from 0 to x.
#[derive(Debug, Clone, PartialEq)]
pub enum Antiderivative<S> {
    Closed(Expression<S>),
    /// The integral exists but has no closed form inside the term class.
    NoClosedForm,
}

impl<S> Antiderivative<S> {
    pub fn closed(self) -> Option<Expression<S>> {
        match self {
            Antiderivative::Closed(e) => Some(e),
            Antiderivative::NoClosedForm => None,
        }
    }
}

/// `F(x) = int_0^x s^(-r) * term(s) ds`.
///
/// Pure power/log terms always have a closed form, built from
/// `int x^m ln^k x = x^(m+1)/(m+1) ln^k x - k/(m+1) int x^m ln^(k-1) x`.
/// Trigonometric terms have one only without a log factor and when the
/// shifted power `m` is a non-negative integer.
pub fn scaled_antiderivative<S: Scalar>(t: &Term<S>, r: &S) -> Result<Antiderivative<S>> {
    let m = t.power.clone() - r.clone();
    if m.real_part() <= -1.0 {
        return Err(Error::DivergentAtZero {
            term: Expression::from_term(t.clone()).to_string(),
            shift: format!("{:?}", r.to_complex()),
        });
    }
    match t.trig {
        Trig::None => Ok(Antiderivative::Closed(power_log(&t.coeff, &m, t.log_exp))),
        Trig::Sin | Trig::Cos if t.log_exp == 0 => match m.as_nonneg_integer() {
            Some(k) => Ok(Antiderivative::Closed(power_trig(k, t.trig).scale(&t.coeff))),
            None => Ok(Antiderivative::NoClosedForm),
        },
        _ => Ok(Antiderivative::NoClosedForm),
    }
}

fn power_log<S: Scalar>(coeff: &S, m: &S, k: u32) -> Expression<S> {
    let m1 = m.clone() + S::one();
    let mut terms = Vec::with_capacity(k as usize + 1);
    // factor = (-1)^j k!/(k-j)! / (m+1)^(j+1)
    let mut factor = coeff.clone() / m1.clone();
    for j in 0..=k {
        terms.push(Term::new(factor.clone(), m1.clone(), k - j, Trig::None));
        factor = -(factor * S::from_i64((k - j) as i64)) / m1.clone();
    }
    Expression::new(terms)
}

/// `int_0^x t^m sin t dt` or the cosine analogue, for integer `m >= 0`.
fn power_trig<S: Scalar>(m: u32, trig: Trig) -> Expression<S> {
    let one = S::one;
    let mono = |c: S, p: u32, trig| Term::new(c, S::from_i64(p as i64), 0, trig);
    // S_0 = 1 - cos x, C_0 = sin x
    let mut s = Expression::new(vec![Term::constant(one()), mono(-one(), 0, Trig::Cos)]);
    let mut c = Expression::from_term(mono(one(), 0, Trig::Sin));
    for j in 1..=m {
        let jj = S::from_i64(j as i64);
        // S_j = -x^j cos x + j C_{j-1};  C_j = x^j sin x - j S_{j-1}
        let s_next = Expression::from_term(mono(-one(), j, Trig::Cos)).add(&c.scale(&jj));
        let c_next = Expression::from_term(mono(one(), j, Trig::Sin)).add(&s.scale(&-jj));
        s = s_next;
        c = c_next;
    }
    match trig {
        Trig::Sin => s,
        _ => c,
    }
}
