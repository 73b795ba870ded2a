//! Chooses durations for `wait auto` operations by maximizing the final
//! bias of a target qubit.
//!
//! Cyclic coordinate ascent: each wait in turn gets a golden-section search
//! over its interval while the others stay fixed. Cycles stop once a full
//! pass improves the objective by less than the objective tolerance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::SystemConfig;
use crate::engine::execute;
use crate::error::{Error, Result};
use crate::seqlang::Sequence;

const INV_PHI: f64 = 0.618_033_988_749_894_9;
pub const MAX_CYCLES: usize = 100;

#[derive(Debug, Clone)]
pub struct OptimizationProblem {
    pub sequence: Sequence,
    pub config: SystemConfig,
    pub target: usize,
    /// `(lo, hi)` seconds per auto wait, in order of appearance.
    pub bounds: Vec<(f64, f64)>,
    pub duration_tol: f64,
    pub objective_tol: f64,
    /// Extra coordinate-ascent runs from random starting points.
    pub restarts: usize,
    pub seed: u64,
}

impl OptimizationProblem {
    /// Default bounds are `(0, 10·max T1)` for every auto wait.
    pub fn new(sequence: Sequence, config: SystemConfig, target: usize) -> Result<Self> {
        let k = sequence.free_waits().len();
        if k == 0 {
            return Err(Error::InvalidParameter("sequence has no `wait auto` operations to optimize".into()));
        }
        let max_t1 = config.qubits.iter().map(|q| q.t1).fold(0.0, f64::max);
        Ok(OptimizationProblem {
            sequence,
            config,
            target,
            bounds: vec![(0.0, 10.0 * max_t1); k],
            duration_tol: 1e-3,
            objective_tol: 1e-9,
            restarts: 0,
            seed: 0,
        })
    }

    pub fn with_max_wait(mut self, hi: f64) -> Self {
        for b in &mut self.bounds {
            *b = (0.0, hi);
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.sequence.free_waits().len();
        if self.bounds.len() != k {
            return Err(Error::InvalidParameter(format!("{} bounds for {k} auto waits", self.bounds.len())));
        }
        for &(lo, hi) in &self.bounds {
            if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
                return Err(Error::InvalidParameter(format!("invalid wait bounds ({lo}, {hi})")));
            }
        }
        if self.duration_tol.is_nan() || self.duration_tol <= 0.0 || self.objective_tol.is_nan() || self.objective_tol < 0.0 {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        if self.target >= self.config.n_qubits() {
            return Err(Error::IndexOutOfRange { what: "qubit", index: self.target, limit: self.config.n_qubits() });
        }
        Ok(())
    }
}

/// Final bias of the target after substituting `durations` for the auto waits.
pub fn objective(durations: &[f64], p: &OptimizationProblem) -> Result<f64> {
    let k = p.sequence.free_waits().len();
    if durations.len() != k {
        return Err(Error::InvalidParameter(format!("{} durations for {k} auto waits", durations.len())));
    }
    let seq = p.sequence.with_durations(durations);
    let trace = execute(&seq, &p.config, None)?;
    Ok(trace.final_step().biases_after[p.target])
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub durations: Vec<f64>,
    pub objective: f64,
    pub evaluations: usize,
    pub cycles: usize,
}

struct Evaluator<'a> {
    problem: &'a OptimizationProblem,
    count: usize,
}

impl Evaluator<'_> {
    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        self.count += 1;
        let v = objective(x, self.problem)?;
        if !v.is_finite() {
            return Err(Error::Optimization(format!("objective is {v} at durations {x:?}")));
        }
        Ok(v)
    }
}

/// Golden-section maximization of coordinate `k` over `[lo, hi]`, also
/// checking both endpoints. Returns the best point found and its value.
fn golden_section(ev: &mut Evaluator, x: &mut [f64], k: usize, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)> {
    let f_at = |ev: &mut Evaluator, x: &mut [f64], t: f64| {
        x[k] = t;
        ev.eval(x)
    };
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f_at(ev, x, c)?;
    let mut fd = f_at(ev, x, d)?;
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f_at(ev, x, c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f_at(ev, x, d)?;
        }
    }
    let mid = 0.5 * (a + b);
    let mut best = (mid, f_at(ev, x, mid)?);
    for t in [lo, hi] {
        let v = f_at(ev, x, t)?;
        if v > best.1 {
            best = (t, v);
        }
    }
    x[k] = best.0;
    Ok(best)
}

fn coordinate_ascent(ev: &mut Evaluator, start: Vec<f64>) -> Result<(Vec<f64>, f64, usize)> {
    let p = ev.problem;
    let mut x = start;
    let mut fx = ev.eval(&x)?;
    let mut cycles = 0;
    while cycles < MAX_CYCLES {
        cycles += 1;
        let before = fx;
        for (k, &(lo, hi)) in p.bounds.iter().enumerate() {
            let mut trial = x.clone();
            let (t, v) = golden_section(ev, &mut trial, k, lo, hi, p.duration_tol)?;
            if v > fx {
                x[k] = t;
                fx = v;
            }
        }
        if fx - before < p.objective_tol {
            break;
        }
    }
    Ok((x, fx, cycles))
}

pub fn optimize_waits(p: &OptimizationProblem) -> Result<OptimizationResult> {
    p.validate()?;
    let mut ev = Evaluator { problem: p, count: 0 };
    let start: Vec<f64> = p.bounds.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect();
    let (mut best_x, mut best_f, mut cycles) = coordinate_ascent(&mut ev, start)?;

    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    for _ in 0..p.restarts {
        let start: Vec<f64> = p.bounds.iter().map(|&(lo, hi)| rng.gen_range(lo..hi)).collect();
        let (x, f, c) = coordinate_ascent(&mut ev, start)?;
        cycles += c;
        let better = f > best_f || (f == best_f && x.iter().partial_cmp(best_x.iter()) == Some(std::cmp::Ordering::Less));
        if better {
            best_x = x;
            best_f = f;
        }
    }
    Ok(OptimizationResult { durations: best_x, objective: best_f, evaluations: ev.count, cycles })
}
