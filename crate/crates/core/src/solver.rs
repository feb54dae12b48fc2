//! Particular solutions `y_p = (1/a_n) sum A(r_i) x^(r_i) I_(r_i+1)(g)(x)`.
//!
//! For a monic operator this is the atom-weight formula verbatim; a general
//! leading coefficient divides through. When all roots are rational and every
//! integral has a closed form the solution is assembled as an exact
//! expression; otherwise it is evaluated component by component.

use num::complex::Complex64;
use num::rational::BigRational;
use num::{One, Zero};
use std::collections::BTreeMap;

use crate::atoms::{compute_atoms, AtomWeights, NodeSet};
use crate::charpoly::{build_charpoly, EulerEquation};
use crate::error::{Error, Result};
use crate::integral_op::{
    eval_integral, eval_integral_many, make_black_box_integral, make_integral, BlackBox, ClosedForm, GrowthBound,
    IntegralHandle, Shift,
};
use crate::roots::{find_roots, RootSet};
use crate::scalar::{rational_to_f64, Scalar};
use crate::term_algebra::{Expr, Expression};

/// Imaginary parts above this, relative to the summed component
/// magnitudes, mean conjugate pairing failed.
pub const IMAG_RESIDUE_TOL: f64 = 1e-9;
/// Float exponents this close to a right-hand-side power count as resonant.
const RESONANCE_TOL: f64 = 1e-12;

/// Right-hand side.
#[derive(Clone)]
pub enum Rhs {
    Terms(Expr),
    BlackBox(BlackBox, GrowthBound),
}

impl std::fmt::Debug for Rhs {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Rhs::Terms(e) => write!(f, "{}", e),
            Rhs::BlackBox(_, b) => write!(f, "black-box g with {:?}", b),
        }
    }
}

impl Rhs {
    pub fn value(&self, x: f64) -> Result<f64> {
        match self {
            Rhs::Terms(e) => e.evaluate(x),
            Rhs::BlackBox(g, _) => Ok(g(x).re),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Weights {
    Exact(AtomWeights<BigRational>),
    Float(AtomWeights<Complex64>),
}

impl Weights {
    pub fn values(&self) -> Vec<Complex64> {
        match self {
            Weights::Exact(w) => w.weights().iter().map(|q| q.to_complex()).collect(),
            Weights::Float(w) => w.weights().to_vec(),
        }
    }
}

/// Exponents `r_i` attached to the components.
#[derive(Debug, Clone, PartialEq)]
pub enum Exponents {
    Exact(Vec<BigRational>),
    Float(Vec<Complex64>),
}

impl Exponents {
    fn values(&self) -> Vec<Complex64> {
        match self {
            Exponents::Exact(v) => v.iter().map(|q| q.to_complex()).collect(),
            Exponents::Float(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Component {
    pub weight: Complex64,
    pub exponent: Complex64,
    /// `I_(r_i + 1)(g)`.
    pub integral: IntegralHandle,
    /// Index of the conjugate component.
    partner: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct ParticularSolution {
    equation: EulerEquation,
    rhs: Rhs,
    roots: RootSet,
    weights: Weights,
    components: Vec<Component>,
    closed_form: Option<ClosedForm>,
    leading_inv: f64,
}

/// Finds the characteristic roots and assembles `y_p`.
pub fn solve_particular(eq: &EulerEquation, g: &Expr) -> Result<ParticularSolution> {
    let roots = find_roots(&build_charpoly(eq))?;
    solve_with_roots(eq, g, &roots)
}

/// Assembles `y_p` from known characteristic roots of `eq`.
pub fn solve_with_roots(eq: &EulerEquation, g: &Expr, roots: &RootSet) -> Result<ParticularSolution> {
    let weights = atom_weights(roots)?;
    let exponents = match roots.exact_values() {
        Some(v) => Exponents::Exact(v),
        None => Exponents::Float(roots.values()),
    };
    ParticularSolution::assemble(eq, Rhs::Terms(g.clone()), roots.clone(), weights, exponents)
}

/// `y_p` for an opaque right-hand side with a stated growth bound.
pub fn solve_black_box(eq: &EulerEquation, g: BlackBox, growth: GrowthBound) -> Result<ParticularSolution> {
    let roots = find_roots(&build_charpoly(eq))?;
    let weights = atom_weights(&roots)?;
    let exponents = Exponents::Float(roots.values());
    ParticularSolution::assemble(eq, Rhs::BlackBox(g, growth), roots, weights, exponents)
}

/// Atom weights of the roots, exact when every root is rational.
pub fn atom_weights(roots: &RootSet) -> Result<Weights> {
    Ok(match roots.exact_values() {
        Some(v) => Weights::Exact(compute_atoms(&NodeSet::new(v)?)),
        None => Weights::Float(compute_atoms(&NodeSet::new(roots.values())?)),
    })
}

impl ParticularSolution {
    /// Components with the given exponents and weights. The weights need not
    /// be the atoms of the exponents; the perturbation study freezes them.
    pub fn assemble(
        eq: &EulerEquation,
        rhs: Rhs,
        roots: RootSet,
        weights: Weights,
        exponents: Exponents,
    ) -> Result<Self> {
        let exps = exponents.values();
        if let Rhs::Terms(g) = &rhs {
            check_resonance(g, &exponents)?;
        }
        let handles: Vec<IntegralHandle> = match (&rhs, &exponents) {
            (Rhs::Terms(g), Exponents::Exact(rs)) => {
                rs.iter().map(|r| make_integral(g, Shift::Exact(r + BigRational::one()))).collect::<Result<_>>()?
            }
            (Rhs::Terms(g), Exponents::Float(rs)) => {
                rs.iter().map(|r| make_integral(g, Shift::Float(r + 1.0))).collect::<Result<_>>()?
            }
            (Rhs::BlackBox(g, growth), _) => {
                exps.iter().map(|r| make_black_box_integral(g.clone(), *growth, r + 1.0)).collect::<Result<_>>()?
            }
        };
        let leading_inv = 1.0 / rational_to_f64(eq.leading());
        let closed_form = closed_form(eq, &weights, &exponents, &handles);
        let wv = weights.values();
        let mut components: Vec<Component> = wv
            .iter()
            .zip(&exps)
            .zip(handles)
            .map(|((w, e), integral)| Component { weight: *w, exponent: *e, integral, partner: None })
            .collect();
        pair_conjugates(&mut components);
        Ok(ParticularSolution { equation: eq.clone(), rhs, roots, weights, components, closed_form, leading_inv })
    }

    pub fn equation(&self) -> &EulerEquation {
        &self.equation
    }

    pub fn rhs(&self) -> &Rhs {
        &self.rhs
    }

    pub fn roots(&self) -> &RootSet {
        &self.roots
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn closed_form(&self) -> Option<&ClosedForm> {
        self.closed_form.as_ref()
    }

    /// The closed form when it is exact.
    pub fn exact_closed_form(&self) -> Option<&Expr> {
        match &self.closed_form {
            Some(ClosedForm::Exact(e)) => Some(e),
            _ => None,
        }
    }

    /// Copy without the closed form, so evaluation goes through the components.
    pub fn without_closed_form(&self) -> Self {
        ParticularSolution { closed_form: None, ..self.clone() }
    }

    /// `y_p(x)` for `x > 0`.
    pub fn evaluate(&self, x: f64, tol: f64) -> Result<f64> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::Domain { x });
        }
        if let Some(v) = self.closed_value(x, tol)? {
            return Ok(v);
        }
        let parts = self
            .components
            .iter()
            .map(|c| Ok(self.component_factor(c, x) * eval_integral(&c.integral, x, tol)?))
            .collect::<Result<Vec<_>>>()?;
        self.combine(&parts)
    }

    /// `y_p` on a grid; integrals are accumulated along the sorted grid.
    pub fn evaluate_many(&self, xs: &[f64], tol: f64) -> Result<Vec<f64>> {
        if let Some(&x) = xs.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
            return Err(Error::Domain { x });
        }
        let mut parts = vec![Vec::with_capacity(self.components.len()); xs.len()];
        for c in &self.components {
            let values = eval_integral_many(&c.integral, xs, tol)?;
            for ((slot, v), x) in parts.iter_mut().zip(values).zip(xs) {
                slot.push(self.component_factor(c, *x) * v);
            }
        }
        xs.iter()
            .zip(&parts)
            .map(|(&x, p)| match self.closed_value(x, tol)? {
                Some(v) => Ok(v),
                None => self.combine(p),
            })
            .collect()
    }

    /// `y_p(|x|)` for `x != 0`: the solution on `x < 0` is taken to be the one
    /// obtained by replacing `x` with `|x|`, as prescribed for the equation, not
    /// derived here.
    pub fn evaluate_abs(&self, x: f64, tol: f64) -> Result<f64> {
        self.evaluate(x.abs(), tol)
    }

    fn component_factor(&self, c: &Component, x: f64) -> Complex64 {
        let xr = if c.exponent.im == 0.0 {
            Complex64::new(x.powf(c.exponent.re), 0.0)
        } else {
            Complex64::new(x, 0.0).powc(c.exponent)
        };
        c.weight * xr * self.leading_inv
    }

    fn closed_value(&self, x: f64, tol: f64) -> Result<Option<f64>> {
        let Some(cf) = &self.closed_form else { return Ok(None) };
        let (v, mag) = cf.eval_with_magnitude(x)?;
        if mag != 0.0 && 4.0 * f64::EPSILON * mag > tol * v.norm() {
            return Ok(None);
        }
        if v.im.abs() > IMAG_RESIDUE_TOL * mag.max(f64::MIN_POSITIVE) {
            return Err(Error::ImaginaryResidue { residue: v.im.abs(), scale: mag });
        }
        Ok(Some(v.re))
    }

    /// Real roots contribute their value, conjugate pairs `2 Re`.
    fn combine(&self, parts: &[Complex64]) -> Result<f64> {
        let scale: f64 = parts.iter().map(|p| p.norm()).sum();
        let total: Complex64 = parts.iter().sum();
        if total.im.abs() > IMAG_RESIDUE_TOL * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::ImaginaryResidue { residue: total.im.abs(), scale });
        }
        let mut value = 0.0;
        for (i, (c, p)) in self.components.iter().zip(parts).enumerate() {
            match c.partner {
                Some(j) if j > i => value += 2.0 * p.re,
                Some(_) => {}
                None => value += p.re,
            }
        }
        Ok(value)
    }
}

fn check_resonance(g: &Expr, exponents: &Exponents) -> Result<()> {
    for t in g.terms() {
        let hit = match exponents {
            Exponents::Exact(rs) => rs.iter().find(|r| **r == t.power).map(|r| r.to_string()),
            Exponents::Float(rs) => {
                let p = rational_to_f64(&t.power);
                rs.iter().find(|r| (**r - p).norm() <= RESONANCE_TOL * (1.0 + p.abs())).map(|r| format!("{}", r))
            }
        };
        if let Some(root) = hit {
            return Err(Error::ResonantExponent { power: t.power.to_string(), root });
        }
    }
    Ok(())
}

fn closed_form(
    eq: &EulerEquation,
    weights: &Weights,
    exponents: &Exponents,
    handles: &[IntegralHandle],
) -> Option<ClosedForm> {
    let forms: Vec<&ClosedForm> = handles.iter().map(|h| h.closed_form()).collect::<Option<_>>()?;
    if let (Weights::Exact(w), Exponents::Exact(rs)) = (weights, exponents) {
        let exact: Option<Vec<&Expr>> = forms
            .iter()
            .map(|f| match f {
                ClosedForm::Exact(e) => Some(e),
                _ => None,
            })
            .collect();
        if let Some(exact) = exact {
            let inv = BigRational::one() / eq.leading();
            let y = exact
                .iter()
                .zip(w.weights())
                .zip(rs)
                .fold(Expr::zero(), |acc, ((f, a), r)| acc.add(&f.mul_monomial(&(a * &inv), r)));
            return Some(ClosedForm::Exact(y));
        }
    }
    let inv = Complex64::new(1.0 / rational_to_f64(eq.leading()), 0.0);
    let y = forms
        .iter()
        .zip(weights.values())
        .zip(exponents.values())
        .fold(Expression::<Complex64>::zero(), |acc, ((f, a), r)| {
            acc.add(&f.to_complex().mul_monomial(&(a * inv), &r))
        });
    Some(match y.to_real(1e-12) {
        Some(real) => ClosedForm::Real(real),
        None => ClosedForm::Complex(y),
    })
}

fn pair_conjugates(components: &mut [Component]) {
    let n = components.len();
    for i in 0..n {
        let e = components[i].exponent;
        if e.im <= 0.0 || components[i].partner.is_some() {
            continue;
        }
        let target = e.conj();
        let found = (0..n).find(|&j| {
            j != i
                && components[j].partner.is_none()
                && components[j].exponent.im < 0.0
                && (components[j].exponent - target).norm() <= RESONANCE_TOL * (1.0 + e.norm())
        });
        if let Some(j) = found {
            components[i].partner = Some(j);
            components[j].partner = Some(i);
        }
    }
}

/// Closed form `sum_i sum_j b_j A(r_i) / (j - r_i) x^j / a_n` for a polynomial
/// right-hand side `sum_j b_j x^j`.
///
/// With irrational roots the inner sum is evaluated as `a_n / phi(j)`, the
/// partial-fraction identity it reduces to, which keeps the result exact.
pub fn solve_polynomial_rhs(eq: &EulerEquation, b: &BTreeMap<i64, BigRational>) -> Result<Expr> {
    let phi = build_charpoly(eq);
    let roots = find_roots(&phi)?;
    let max_re = roots.max_real_part();
    let exact = roots.exact_values();
    let weights = match &exact {
        Some(rs) => Some(compute_atoms(&NodeSet::new(rs.clone())?)),
        None => None,
    };
    let inv = BigRational::one() / eq.leading();
    let mut terms = Vec::new();
    for (&j, bj) in b.iter().filter(|(_, bj)| !bj.is_zero()) {
        let jq = BigRational::from_integer(j.into());
        if phi.eval(&jq).is_zero() {
            return Err(Error::ResonantExponent { power: j.to_string(), root: j.to_string() });
        }
        if (j as f64) <= max_re {
            return Err(Error::ExponentBelowRoots { exponent: j, max_root: max_re });
        }
        let coeff = match (&exact, &weights) {
            (Some(rs), Some(w)) => {
                let s = rs.iter().zip(w.weights()).fold(BigRational::zero(), |acc, (r, a)| acc + a / (&jq - r));
                bj * s * &inv
            }
            _ => bj / phi.eval(&jq),
        };
        terms.push(crate::term_algebra::Term::new(coeff, jq, 0, crate::term_algebra::Trig::None));
    }
    Ok(Expr::new(terms))
}

/// `sum a_i x^i y^(i)` by exact term calculus.
pub fn residual<S: Scalar>(eq: &EulerEquation, y: &Expression<S>) -> Expression<S> {
    let mut acc = Expression::zero();
    let mut d = y.clone();
    for (i, a) in eq.coeffs().iter().enumerate() {
        if i > 0 {
            d = d.differentiate();
        }
        acc = acc.add(&d.mul_monomial(&S::from_rational(a), &S::from_i64(i as i64)));
    }
    acc
}

/// Largest order handled by [`residual_numeric`].
pub const MAX_NUMERIC_ORDER: usize = 6;
/// Accuracy requested from each evaluation of `y` inside the stencils.
const STENCIL_TOL: f64 = 1e-11;

/// `sum a_i x^i D^i y(x) - g(x)` with central differences and three levels
/// of Richardson extrapolation. Order-`k` steps are `x * 1e-15^(1/(k+6))`,
/// which balances the `h^6` truncation against `eps / h^k` round-off.
pub fn residual_numeric(eq: &EulerEquation, y: &ParticularSolution, x: f64) -> Result<f64> {
    let n = eq.order();
    if n > MAX_NUMERIC_ORDER {
        return Err(Error::UnsupportedOrder(n));
    }
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain { x });
    }
    let y0 = y.evaluate(x, STENCIL_TOL)?;
    let mut lhs = rational_to_f64(&eq.coeffs()[0]) * y0;
    for (k, a) in eq.coeffs().iter().enumerate().skip(1) {
        let h = x * 1e-15f64.powf(1.0 / (k as f64 + 6.0));
        let smallest = h / 4.0;
        if !smallest.powi(k as i32).is_normal() {
            return Err(Error::StepUnderflow { x });
        }
        let level = |h: f64| -> Result<f64> { central_difference(&|t| y.evaluate(t, STENCIL_TOL), x, h, k) };
        let d = [level(h)?, level(h / 2.0)?, level(h / 4.0)?];
        let r1 = [(4.0 * d[1] - d[0]) / 3.0, (4.0 * d[2] - d[1]) / 3.0];
        let dk = (16.0 * r1[1] - r1[0]) / 15.0;
        lhs += rational_to_f64(a) * x.powi(k as i32) * dk;
    }
    Ok(lhs - y.rhs().value(x)?)
}

/// `h^-k sum_j (-1)^j C(k, j) f(x + (k/2 - j) h)`.
fn central_difference(f: &dyn Fn(f64) -> Result<f64>, x: f64, h: f64, k: usize) -> Result<f64> {
    let mut sum = 0.0;
    let mut binom = 1.0;
    for j in 0..=k {
        if j > 0 {
            binom = binom * (k + 1 - j) as f64 / j as f64;
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * binom * f(x + (k as f64 / 2.0 - j as f64) * h)?;
    }
    Ok(sum / h.powi(k as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integral_op::DEFAULT_TOL;
    use crate::scalar::{parse_rational, rational};
    use crate::term_algebra::parse;
    use std::sync::Arc;

    fn eq(c: &[&str]) -> EulerEquation {
        EulerEquation::new(c.iter().map(|s| parse_rational(s).unwrap()).collect()).unwrap()
    }

    fn toy() -> EulerEquation {
        eq(&["-1", "1", "1"])
    }

    fn eighth() -> EulerEquation {
        eq(&["9", "-9", "9/2", "-3/2", "3309/4", "3345/4", "1007/4", "28", "1"])
    }

    #[test]
    fn toy_closed_form() {
        let y = solve_particular(&toy(), &parse("x^2").unwrap()).unwrap();
        assert_eq!(y.exact_closed_form(), Some(&parse("1/3*x^2").unwrap()));
        assert!((y.evaluate(3.0, DEFAULT_TOL).unwrap() - 3.0).abs() < 1e-14);
        assert!((y.without_closed_form().evaluate(3.0, DEFAULT_TOL).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eighth_order_log_example() {
        let g = parse("x^4*ln(x)").unwrap();
        let y = solve_particular(&eighth(), &g).unwrap();
        let expected = parse("1/19845*x^4*ln(x) - 898/6251175*x^4").unwrap();
        assert_eq!(y.exact_closed_form(), Some(&expected));
        assert_eq!(residual(&eighth(), &expected), g);
        let at_one = y.evaluate(1.0, DEFAULT_TOL).unwrap();
        assert!((at_one + 898.0 / 6251175.0).abs() < 1e-18);
    }

    #[test]
    fn zero_rhs() {
        let y = solve_particular(&eighth(), &Expr::zero()).unwrap();
        assert_eq!(y.exact_closed_form(), Some(&Expr::zero()));
        assert_eq!(y.evaluate(2.0, DEFAULT_TOL).unwrap(), 0.0);
        assert!(residual(&toy(), &Expr::zero()).is_zero());
    }

    #[test]
    fn residual_examples() {
        assert_eq!(residual(&toy(), &parse("1/3*x^2").unwrap()), parse("x^2").unwrap());
    }

    #[test]
    fn polynomial_fast_path() {
        let b: BTreeMap<i64, BigRational> = [(2, rational(1, 1))].into();
        assert_eq!(solve_polynomial_rhs(&toy(), &b).unwrap(), parse("1/3*x^2").unwrap());
        let quartic =
            EulerEquation::from_roots(&[rational(1, 1), rational(-2, 1), rational(3, 1), rational(1, 2)]).unwrap();
        let b: BTreeMap<i64, BigRational> = [(4, rational(1, 1))].into();
        // -1/9 - 1/225 + 1/25 + 16/175 = 1/63
        assert_eq!(solve_polynomial_rhs(&quartic, &b).unwrap(), parse("1/63*x^4").unwrap());
        assert!(solve_polynomial_rhs(&quartic, &BTreeMap::new()).unwrap().is_zero());
        let b: BTreeMap<i64, BigRational> = [(3, rational(1, 1))].into();
        assert!(matches!(solve_polynomial_rhs(&quartic, &b), Err(Error::ResonantExponent { .. })));
        let b: BTreeMap<i64, BigRational> = [(2, rational(1, 1))].into();
        assert!(matches!(solve_polynomial_rhs(&quartic, &b), Err(Error::ExponentBelowRoots { exponent: 2, .. })));
    }

    #[test]
    fn polynomial_rhs_with_irrational_roots() {
        // phi = r^2 - 2
        let e = eq(&["-2", "1", "1"]);
        let b: BTreeMap<i64, BigRational> = [(3, rational(1, 1))].into();
        let y = solve_polynomial_rhs(&e, &b).unwrap();
        assert_eq!(y, parse("1/7*x^3").unwrap());
        assert_eq!(residual(&e, &y), parse("x^3").unwrap());
    }

    #[test]
    fn resonance_and_divergence() {
        assert!(matches!(solve_particular(&toy(), &parse("x").unwrap()), Err(Error::ResonantExponent { .. })));
        assert!(matches!(solve_particular(&toy(), &parse("x^(1/2)").unwrap()), Err(Error::DivergentAtZero { .. })));
    }

    #[test]
    fn complex_roots_give_real_values() {
        // roots {1, i, -i}: (r - 1)(r^2 + 1)
        let e = EulerEquation::from_charpoly(&crate::charpoly::Polynomial::new(
            [-1, 1, -1, 1].iter().map(|&k| rational(k, 1)).collect(),
        ))
        .unwrap();
        let g = parse("x^3").unwrap();
        let y = solve_particular(&e, &g).unwrap();
        // phi(3) = 20, so y = x^3 / 20
        for x in [0.5, 1.0, 2.0] {
            let v = y.evaluate(x, DEFAULT_TOL).unwrap();
            assert!((v - x * x * x / 20.0).abs() < 1e-13, "{} {}", x, v);
            let v = y.without_closed_form().evaluate(x, DEFAULT_TOL).unwrap();
            assert!((v - x * x * x / 20.0).abs() < 1e-12);
        }
    }

    #[test]
    fn numeric_residual_toy_and_order_limit() {
        let y = solve_particular(&toy(), &parse("x^2").unwrap()).unwrap();
        let r = residual_numeric(&toy(), &y, 2.0).unwrap();
        assert!(r.abs() <= 1e-6 * 4.0, "{}", r);
        let y8 = solve_particular(&eighth(), &parse("x^4*ln(x)").unwrap()).unwrap();
        assert!(matches!(residual_numeric(&eighth(), &y8, 1.0), Err(Error::UnsupportedOrder(8))));
        assert!(matches!(residual_numeric(&toy(), &y, 1e-300), Err(Error::StepUnderflow { .. })));
    }

    #[test]
    fn evaluate_many_matches_pointwise() {
        let quartic =
            EulerEquation::from_roots(&[rational(1, 1), rational(-2, 1), rational(3, 1), rational(1, 2)]).unwrap();
        let y = solve_particular(&quartic, &parse("x^4*sin(x)").unwrap()).unwrap();
        assert!(y.closed_form().is_none());
        let xs = [1.0, 1.5, 2.0, 4.0];
        let many = y.evaluate_many(&xs, DEFAULT_TOL).unwrap();
        for (x, v) in xs.iter().zip(many) {
            let single = y.evaluate(*x, DEFAULT_TOL).unwrap();
            assert!((v - single).abs() <= 1e-9 * (1.0 + single.abs()));
        }
        assert!(matches!(y.evaluate(-1.0, DEFAULT_TOL), Err(Error::Domain { .. })));
        assert_eq!(y.evaluate_abs(-2.0, DEFAULT_TOL).unwrap(), y.evaluate(2.0, DEFAULT_TOL).unwrap());
    }

    #[test]
    fn black_box_matches_terms() {
        let quartic =
            EulerEquation::from_roots(&[rational(1, 1), rational(-2, 1), rational(3, 1), rational(1, 2)]).unwrap();
        let y = solve_particular(&quartic, &parse("x^5*sin(x)").unwrap()).unwrap();
        let g: BlackBox = Arc::new(|t: f64| Complex64::new(t.powi(5) * t.sin(), 0.0));
        let yb = solve_black_box(&quartic, g, GrowthBound { c: 1.0, alpha: 5.0 }).unwrap();
        let (a, b) = (y.evaluate(2.0, 1e-12).unwrap(), yb.evaluate(2.0, 1e-12).unwrap());
        assert!((a - b).abs() < 1e-9 * a.abs(), "{} {}", a, b);
    }
}
