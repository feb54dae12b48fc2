use num::rational::BigRational;
use num::Zero;
use proptest::prelude::*;

use atomcauchy::charpoly::{build_charpoly, eval_charpoly_falling, falling_factorial, EulerEquation};
use atomcauchy::scalar::rational;

fn arb_rational() -> impl Strategy<Value = BigRational> {
    (-30i64..=30, 1i64..=8).prop_map(|(n, d)| rational(n, d))
}

fn arb_equation() -> impl Strategy<Value = EulerEquation> {
    prop::collection::vec(arb_rational(), 1..=12)
        .prop_flat_map(|lower| (Just(lower), arb_rational().prop_filter("nonzero", |q| !q.is_zero())))
        .prop_map(|(mut c, lead)| {
            c.push(lead);
            EulerEquation::new(c).unwrap()
        })
}

proptest! {
    #[test]
    fn basis_change_is_exact(eq in arb_equation(), rs in prop::collection::vec(arb_rational(), 20)) {
        let phi = build_charpoly(&eq);
        for r in &rs {
            prop_assert_eq!(eval_charpoly_falling(&eq, r), phi.eval(r));
        }
    }

    #[test]
    fn degree_and_leading_coefficient(eq in arb_equation()) {
        let phi = build_charpoly(&eq);
        prop_assert_eq!(phi.degree(), Some(eq.order()));
        prop_assert_eq!(phi.leading(), Some(eq.leading()));
    }

    #[test]
    fn falling_factorial_vanishes_on_its_integers(i in 0usize..=20) {
        let p = falling_factorial(i);
        prop_assert_eq!(p.degree(), Some(i));
        for s in 0..i as i64 {
            prop_assert!(p.eval(&rational(s, 1)).is_zero());
        }
        prop_assert!(!p.eval(&rational(i as i64, 1)).is_zero());
    }
}

#[test]
fn peeling_inverts_the_basis_change() {
    let eq = EulerEquation::new(
        ["9", "-9", "9/2", "-3/2", "3309/4", "3345/4", "1007/4", "28", "1"]
            .iter()
            .map(|s| atomcauchy::scalar::parse_rational(s).unwrap())
            .collect(),
    )
    .unwrap();
    assert_eq!(EulerEquation::from_charpoly(&build_charpoly(&eq)).unwrap(), eq);
}
