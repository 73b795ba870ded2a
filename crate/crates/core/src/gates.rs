//! Reversible gates on diagonal states.
//!
//! On a diagonal state every closed-system (unitary) operation that keeps
//! the state diagonal acts as a permutation of the basis populations, so
//! all gates here are permutations and leave the entropy untouched.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::state::{Bias, DiagonalState};

/// A basis-state permutation written as transpositions applied left to right.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Permutation {
    pub transpositions: Vec<(usize, usize)>,
}

impl Permutation {
    pub fn new(transpositions: Vec<(usize, usize)>) -> Self {
        Permutation { transpositions }
    }

    /// The same transpositions in reverse order, which undoes `self`.
    pub fn inverse(&self) -> Self {
        Permutation { transpositions: self.transpositions.iter().rev().copied().collect() }
    }
}

pub fn apply_permutation(s: &DiagonalState, p: &Permutation) -> Result<DiagonalState> {
    let mut out = s.clone();
    apply_permutation_in_place(&mut out, p)?;
    Ok(out)
}

pub fn apply_permutation_in_place(s: &mut DiagonalState, p: &Permutation) -> Result<()> {
    let dim = s.dim();
    if let Some(&(a, b)) = p.transpositions.iter().find(|&&(a, b)| a >= dim || b >= dim) {
        return Err(Error::IndexOutOfRange { what: "basis index", index: a.max(b), limit: dim });
    }
    let probs = s.probs_mut();
    for &(a, b) in &p.transpositions {
        probs.swap(a, b);
    }
    Ok(())
}

/// Exchanges qubits `i` and `j`. Swapping a qubit with itself is a no-op.
pub fn swap_qubits(s: &DiagonalState, i: usize, j: usize) -> Result<DiagonalState> {
    let mut out = s.clone();
    swap_qubits_in_place(&mut out, i, j)?;
    Ok(out)
}

pub fn swap_qubits_in_place(s: &mut DiagonalState, i: usize, j: usize) -> Result<()> {
    s.check_qubit(i)?;
    s.check_qubit(j)?;
    if i == j {
        return Ok(());
    }
    let (si, sj) = (s.shift_of(i), s.shift_of(j));
    let probs = s.probs_mut();
    for b in 0..probs.len() {
        // visit each unordered pair once: bit i up, bit j down
        if (b >> si) & 1 == 0 && (b >> sj) & 1 == 1 {
            let partner = b ^ (1 << si) ^ (1 << sj);
            probs.swap(b, partner);
        }
    }
    Ok(())
}

/// Three-bit compression onto `target`: within every setting of the other
/// qubits, exchanges the populations of `(target, a, b) = (↓, ↑, ↑)` and
/// `(↑, ↓, ↓)`. On three equal-bias spins this raises the target bias from
/// `ε` to `(3ε − ε³)/2`. The map is its own inverse.
pub fn compress_3b(s: &DiagonalState, target: usize, a: usize, b: usize) -> Result<DiagonalState> {
    let mut out = s.clone();
    compress_3b_in_place(&mut out, target, a, b)?;
    Ok(out)
}

pub fn compress_3b_in_place(s: &mut DiagonalState, target: usize, a: usize, b: usize) -> Result<()> {
    for q in [target, a, b] {
        s.check_qubit(q)?;
    }
    if target == a || target == b || a == b {
        return Err(Error::InvalidParameter(format!(
            "compression qubits must be distinct, got ({target}, {a}, {b})"
        )));
    }
    let (st, sa, sb) = (s.shift_of(target), s.shift_of(a), s.shift_of(b));
    let mask = (1 << st) | (1 << sa) | (1 << sb);
    let probs = s.probs_mut();
    for idx in 0..probs.len() {
        if idx & mask == 1 << st {
            probs.swap(idx, idx ^ mask);
        }
    }
    Ok(())
}

/// Flips qubit `i`, negating its bias.
pub fn not_qubit(s: &DiagonalState, i: usize) -> Result<DiagonalState> {
    let mut out = s.clone();
    not_qubit_in_place(&mut out, i)?;
    Ok(out)
}

pub fn not_qubit_in_place(s: &mut DiagonalState, i: usize) -> Result<()> {
    s.check_qubit(i)?;
    let bit = 1 << s.shift_of(i);
    let probs = s.probs_mut();
    for b in 0..probs.len() {
        if b & bit == 0 {
            probs.swap(b, b | bit);
        }
    }
    Ok(())
}

/// Largest bias any basis permutation can give `target`: the larger half of
/// the sorted populations goes to target-up.
pub fn reversible_bias_bound(s: &DiagonalState, target: usize) -> Result<Bias> {
    s.check_qubit(target)?;
    let mut order: Vec<(usize, f64)> = s.probs().iter().copied().enumerate().collect();
    order.sort_by(|x, y| y.1.partial_cmp(&x.1).unwrap_or(Ordering::Equal).then(x.0.cmp(&y.0)));
    let half = order.len() / 2;
    let top: f64 = order[..half].iter().map(|x| x.1).sum();
    let bottom: f64 = order[half..].iter().map(|x| x.1).sum();
    Bias::new((top - bottom).clamp(-1.0, 1.0))
}
