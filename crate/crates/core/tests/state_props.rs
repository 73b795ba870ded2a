mod common;

use common::{arb_biases, arb_state};
use hbac_core::state::{
    binary_entropy, bias_from_physics, effective_temperature, equilibrium_state, marginal_bias, shannon_entropy,
    PhysicalParams,
};
use hbac_core::{DiagonalState, QubitSpec};
use proptest::prelude::*;

proptest! {
    #[test]
    fn constructed_states_are_normalized(biases in arb_biases(1, 8)) {
        let s = DiagonalState::product(&biases).unwrap();
        let total: f64 = s.probs().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
        prop_assert!(s.probs().iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn equilibrium_marginals_recover_inputs(biases in arb_biases(1, 8)) {
        let qubits: Vec<QubitSpec> =
            biases.iter().enumerate().map(|(i, &b)| QubitSpec::new(format!("q{i}"), b, 1.0)).collect();
        let s = equilibrium_state(&qubits).unwrap();
        for (i, &b) in biases.iter().enumerate() {
            prop_assert!((marginal_bias(&s, i).unwrap().value() - b).abs() < 1e-12);
        }
    }

    #[test]
    fn product_entropy_is_sum_of_binary_entropies(biases in arb_biases(1, 8)) {
        let s = DiagonalState::product(&biases).unwrap();
        let expected: f64 = biases.iter().map(|&e| binary_entropy((1.0 + e) / 2.0)).sum();
        prop_assert!((shannon_entropy(&s) - expected).abs() < 1e-9);
    }

    #[test]
    fn bias_temperature_round_trip(eps in 1e-9..0.999f64) {
        // choose units with k = 1 and ΔE = 2 so that ε = tanh(1/T)
        let t = effective_temperature(hbac_core::Bias::new(eps).unwrap(), 2.0, 1.0).unwrap();
        let back = bias_from_physics(&PhysicalParams { delta_e: 2.0, k_boltzmann: 1.0, temperature: t }).unwrap();
        prop_assert!((back.value() - eps).abs() <= 1e-9 * eps);
    }

    #[test]
    fn marginal_is_linear_in_mixtures(
        pair in (1usize..=5).prop_flat_map(|n| (arb_state(n, n), arb_state(n, n))),
        w in 0.0..=1.0f64,
    ) {
        let (a, b) = pair;
        let mixed = a.mix(&b, w).unwrap();
        for i in 0..a.n_qubits() {
            let lhs = marginal_bias(&mixed, i).unwrap().value();
            let rhs = w * marginal_bias(&a, i).unwrap().value() + (1.0 - w) * marginal_bias(&b, i).unwrap().value();
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn marginal_bias_stays_in_range(s in arb_state(1, 6)) {
        for i in 0..s.n_qubits() {
            prop_assert!(marginal_bias(&s, i).unwrap().value().abs() <= 1.0);
        }
    }
}

#[test]
fn uniform_and_pure_entropy() {
    assert_eq!(shannon_entropy(&DiagonalState::uniform(3).unwrap()), 3.0);
    assert_eq!(shannon_entropy(&DiagonalState::basis(4, 9).unwrap()), 0.0);
}
