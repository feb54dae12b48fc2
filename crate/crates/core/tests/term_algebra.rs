use num::rational::BigRational;
use proptest::prelude::*;

use atomcauchy::scalar::rational;
use atomcauchy::term_algebra::{parse, scaled_antiderivative, Expr, Term, Trig};

fn arb_rational(num: std::ops::RangeInclusive<i64>, den: i64) -> impl Strategy<Value = BigRational> {
    (num, 1..=den).prop_map(|(n, d)| rational(n, d))
}

fn arb_trig() -> impl Strategy<Value = Trig> {
    prop_oneof![Just(Trig::None), Just(Trig::Sin), Just(Trig::Cos)]
}

fn arb_term() -> impl Strategy<Value = Term<BigRational>> {
    (arb_rational(-20..=20, 6), arb_rational(-6..=16, 4), 0u32..=3, arb_trig())
        .prop_map(|(c, p, k, t)| Term::new(c, p, k, t))
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    prop::collection::vec(arb_term(), 0..5).prop_map(Expr::new)
}

proptest! {
    #[test]
    fn print_parse_round_trip(e in arb_expr()) {
        prop_assert_eq!(parse(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn differentiation_is_linear(a in arb_expr(), b in arb_expr()) {
        prop_assert_eq!(a.add(&b).differentiate(), a.differentiate().add(&b.differentiate()));
    }

    /// Shifted powers `m = p - r` are kept non-negative integers for trig
    /// terms without logs so that a closed form exists.
    #[test]
    fn antiderivative_differentiates_back(
        c in arb_rational(1..=9, 4),
        m in 0i64..=6,
        r in arb_rational(-8..=8, 3),
        k in 0u32..=3,
        trig in arb_trig(),
        xs in prop::collection::vec(0.1f64..10.0, 100),
    ) {
        let k = if trig == Trig::None { k } else { 0 };
        let power = if trig == Trig::None { rational(m, 1) + rational(1, 3) + &r } else { rational(m, 1) + &r };
        let t = Term::new(c, power, k, trig);
        let f = scaled_antiderivative(&t, &r).unwrap().closed().expect("closed form");
        let target = Expr::from_term(t.clone()).mul_monomial(&rational(1, 1), &-r.clone());
        prop_assert_eq!(f.differentiate(), target.clone());
        let df = f.differentiate();
        for x in xs {
            let (v, mag) = df.eval_with_magnitude(x).unwrap();
            let want = target.evaluate(x).unwrap();
            prop_assert!((v.re - want).abs() <= 1e-12 * mag.max(want.abs()));
        }
        let (at_one, _) = f.eval_with_magnitude(1.0).unwrap();
        let (near_zero, _) = f.eval_with_magnitude(1e-8).unwrap();
        prop_assert!(near_zero.norm() <= 1e-6 * at_one.norm());
    }
}

#[test]
fn reference_right_hand_sides_round_trip() {
    for src in ["x^4*ln(x)", "x^8*sin(x)", "x^6*(sin(x)+cos(x))", "x^(1/2)*ln(x)^2 - 3*x^-1/2*cos(x)"] {
        let e = parse(src).unwrap();
        assert_eq!(parse(&e.to_string()).unwrap(), e);
    }
}
