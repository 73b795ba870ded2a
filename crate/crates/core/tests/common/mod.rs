#![allow(dead_code)]

use hbac_core::DiagonalState;
use proptest::prelude::*;

/// Random normalized distribution over 2ⁿ outcomes, including exact zeros.
pub fn arb_state(n_min: usize, n_max: usize) -> impl Strategy<Value = DiagonalState> {
    (n_min..=n_max).prop_flat_map(|n| {
        prop::collection::vec(prop_oneof![4 => 0.0..1.0f64, 1 => Just(0.0)], 1 << n).prop_filter_map(
            "all-zero weights",
            |w| {
                let total: f64 = w.iter().sum();
                (total > 0.0).then(|| DiagonalState::from_probs(w.iter().map(|x| x / total).collect()).unwrap())
            },
        )
    })
}

pub fn arb_biases(n_min: usize, n_max: usize) -> impl Strategy<Value = Vec<f64>> {
    (n_min..=n_max).prop_flat_map(|n| prop::collection::vec(-1.0..=1.0f64, n))
}

/// Maximum target bias over every ordering of the basis populations,
/// by brute-force enumeration (Heap's algorithm).
pub fn exhaustive_permutation_max(probs: &[f64], target: usize, n: usize) -> f64 {
    let dim = probs.len();
    let shift = n - 1 - target;
    let sign: Vec<f64> = (0..dim).map(|b| if (b >> shift) & 1 == 0 { 1.0 } else { -1.0 }).collect();
    let mut perm: Vec<usize> = (0..dim).collect();
    let score = |perm: &[usize]| perm.iter().enumerate().map(|(slot, &src)| sign[slot] * probs[src]).sum::<f64>();
    let mut best = score(&perm);
    let mut c = vec![0usize; dim];
    let mut i = 0;
    while i < dim {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            best = best.max(score(&perm));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best
}
