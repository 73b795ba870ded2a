//! Spin-lattice (T1) thermalization and the T2 time budget.
//!
//! Each qubit relaxes independently through the single-bit channel
//!
//! ```text
//! m(x | y) = λ·δ(x, y) + (1 − λ)·π(x),   λ = exp(−dt / T1)
//! ```
//!
//! where `π` is the qubit's thermal distribution. The channels commute, so
//! applying them one after another gives the product channel on the joint
//! distribution. Marginal biases follow `ε(dt) = ε_eq + (ε(0) − ε_eq)·λ`
//! and classical correlations between qubits decay by the product of
//! their `λ`s.

use crate::error::{Error, Result};
use crate::state::{DiagonalState, QubitSpec};

/// Elapsed wall time and the part of it spent inside gates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RelaxationClock {
    pub elapsed_total: f64,
    pub coherent_time_used: f64,
}

impl RelaxationClock {
    pub fn advance_wait(&mut self, dt: f64) {
        self.elapsed_total += dt;
    }

    pub fn advance_gate(&mut self, dt: f64) {
        self.elapsed_total += dt;
        self.coherent_time_used += dt;
    }
}

/// `exp(−dt / t1)`.
pub fn relax_factor(dt: f64, t1: f64) -> Result<f64> {
    if dt.is_nan() || dt < 0.0 {
        return Err(Error::InvalidParameter(format!("duration must be non-negative, got {dt}")));
    }
    if t1.is_nan() || t1 <= 0.0 {
        return Err(Error::InvalidParameter(format!("t1 must be positive, got {t1}")));
    }
    if t1 == f64::INFINITY {
        return Ok(1.0);
    }
    Ok((-dt / t1).exp())
}

/// Lets every qubit thermalize for `dt` seconds. `qubits[i].eq_bias` is
/// read as a true bias.
pub fn relax(s: &DiagonalState, qubits: &[QubitSpec], dt: f64) -> Result<DiagonalState> {
    let mut out = s.clone();
    relax_in_place(&mut out, qubits, dt)?;
    Ok(out)
}

pub fn relax_in_place(s: &mut DiagonalState, qubits: &[QubitSpec], dt: f64) -> Result<()> {
    if qubits.len() != s.n_qubits() {
        return Err(Error::InvalidParameter(format!(
            "{} qubit specs for a {}-qubit state",
            qubits.len(),
            s.n_qubits()
        )));
    }
    let factors = qubits.iter().map(|q| relax_factor(dt, q.t1)).collect::<Result<Vec<_>>>()?;
    if dt == 0.0 {
        return Ok(());
    }
    let n = s.n_qubits();
    for (i, (q, &lambda)) in qubits.iter().zip(&factors).enumerate() {
        if lambda == 1.0 {
            continue;
        }
        let pi_up = (1.0 + q.eq_bias) / 2.0;
        let pi_down = (1.0 - q.eq_bias) / 2.0;
        let bit = 1usize << (n - 1 - i);
        let probs = s.probs_mut();
        for b in 0..probs.len() {
            if b & bit != 0 {
                continue;
            }
            let (up, down) = (probs[b], probs[b | bit]);
            let total = up + down;
            probs[b] = lambda * up + (1.0 - lambda) * pi_up * total;
            probs[b | bit] = lambda * down + (1.0 - lambda) * pi_down * total;
        }
    }
    s.renormalize_check()
}

/// One row of a T1 ratio table.
#[derive(Debug, Clone, PartialEq)]
pub struct T1Ratio {
    pub name: String,
    pub t1: f64,
    /// `t1 / t1(reset)`.
    pub ratio: f64,
}

pub fn t1_ratio_report(qubits: &[QubitSpec], reset: usize) -> Result<Vec<T1Ratio>> {
    let reset_t1 = qubits
        .get(reset)
        .ok_or(Error::IndexOutOfRange { what: "qubit", index: reset, limit: qubits.len() })?
        .t1;
    Ok(qubits
        .iter()
        .map(|q| T1Ratio { name: q.name.clone(), t1: q.t1, ratio: q.t1 / reset_t1 })
        .collect())
}

/// Before/after comparison of two relaxation-time sets for the same qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct T1Change {
    pub name: String,
    /// Percentage decrease of T1, `100·(before − after)/before`.
    pub t1_decrease_pct: f64,
    /// Percentage increase of the ratio to the reset qubit's T1.
    pub ratio_increase_pct: f64,
}

pub fn t1_change_report(before: &[QubitSpec], after: &[QubitSpec], reset: usize) -> Result<Vec<T1Change>> {
    if before.len() != after.len() {
        return Err(Error::InvalidParameter("qubit lists differ in length".into()));
    }
    let rb = t1_ratio_report(before, reset)?;
    let ra = t1_ratio_report(after, reset)?;
    Ok(rb
        .iter()
        .zip(&ra)
        .map(|(b, a)| T1Change {
            name: b.name.clone(),
            t1_decrease_pct: 100.0 * (b.t1 - a.t1) / b.t1,
            ratio_increase_pct: 100.0 * (a.ratio - b.ratio) / b.ratio,
        })
        .collect())
}
