use proptest::prelude::*;

use atomcauchy::atoms::{compute_atoms, lagrange_leading_coefficients, moment, moment_scale, NodeSet};
use atomcauchy::scalar::f64_to_rational;

/// Nodes in [-5, 5] with pairwise separation at least 0.1.
fn arb_nodes(max_n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50i32..=50, 2..=max_n)
        .prop_map(|mut ks| {
            ks.sort_unstable();
            ks.dedup();
            ks
        })
        .prop_filter("need two nodes", |ks| ks.len() >= 2)
        .prop_flat_map(|ks| {
            let n = ks.len();
            (Just(ks), prop::collection::vec(0.0f64..0.5, n))
        })
        .prop_map(|(ks, jitter)| ks.iter().zip(jitter).map(|(&k, j)| (k as f64 + j) / 10.0).collect::<Vec<f64>>())
        .prop_filter("separation", |xs| xs.windows(2).all(|w| w[1] - w[0] >= 0.1))
}

fn check_atom_conditions(nodes: &[f64]) -> Result<(), TestCaseError> {
    let set = NodeSet::new(nodes.to_vec()).unwrap();
    let a = compute_atoms(&set);
    let n = nodes.len() as u32;
    for s in 0..=n - 2 {
        prop_assert!(moment(&a, &set, s).abs() <= 1e-8 * moment_scale(&a, &set, s));
    }
    // Rounding the weights to doubles alone moves M(n-1) by up to about
    // eps * sum |x_i^(n-1) A_i|, which exceeds 1e-10 for tightly clustered
    // nodes near the edge of [-5, 5].
    let floor: f64 =
        nodes.iter().zip(a.weights()).map(|(x, w)| (x.powi(n as i32 - 1) * w).abs()).sum::<f64>() * f64::EPSILON;
    prop_assert!((moment(&a, &set, n - 1) - 1.0).abs() <= floor.max(1e-10));
    Ok(())
}

proptest! {
    #[test]
    fn cancellation_and_size(nodes in arb_nodes(12)) {
        check_atom_conditions(&nodes)?;
    }

    #[test]
    fn translation_keeps_atom_conditions(nodes in arb_nodes(12), u in 0.0f64..1.0) {
        // Shift within the sampling window [-5, 5].
        let (lo, hi) = (-5.0 - nodes[0], 5.0 - nodes[nodes.len() - 1]);
        let shift = lo + u * (hi - lo);
        let shifted: Vec<f64> = nodes.iter().map(|x| x + shift).collect();
        check_atom_conditions(&shifted)?;
    }

    #[test]
    fn float_weights_match_exact_oracle(nodes in arb_nodes(8)) {
        let a = compute_atoms(&NodeSet::new(nodes.clone()).unwrap());
        let exact = NodeSet::new(nodes.iter().map(|x| f64_to_rational(*x).unwrap()).collect()).unwrap();
        let oracle = lagrange_leading_coefficients(&exact);
        let exact_weights = compute_atoms(&exact);
        prop_assert_eq!(exact_weights.weights(), oracle.as_slice());
        for (w, q) in a.weights().iter().zip(&oracle) {
            let q = atomcauchy::scalar::rational_to_f64(q);
            prop_assert!((w - q).abs() <= 1e-10 * q.abs());
        }
    }
}

#[test]
fn coincident_nodes_rejected() {
    assert!(NodeSet::new(vec![1.0, 2.0, 1.0 + 1e-12]).is_err());
    assert!(NodeSet::<f64>::new(vec![]).is_err());
}
