//! Diagonal spin states.
//!
//! A state of `n` spin-½ qubits is stored as the diagonal of its density
//! matrix: a probability vector over the `2ⁿ` computational basis states.
//!
//! # Bit order
//!
//! Qubit `0` is the **most significant** bit of a basis index, qubit `n-1`
//! the least significant. A bit value of `0` means the spin is up (`|↑⟩`),
//! `1` means down. So for three qubits index `0b100` is `|↓↑↑⟩`: qubit 0
//! down, qubits 1 and 2 up. Every module in this crate uses this
//! convention.
//!
//! The polarization bias of qubit `i` is `P↑ − P↓`, which for a thermal
//! spin equals `tanh(ΔE / 2kT)`.

use crate::error::{Error, Result};

/// Largest supported register (2²⁰ probabilities).
pub const MAX_QUBITS: usize = 20;

/// Negative probabilities down to this value are rounding noise and get
/// clamped to zero. Anything lower is an error.
pub const CLAMP_TOLERANCE: f64 = 1e-12;

/// Allowed deviation of the total probability from one.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Polarization bias `ε = P↑ − P↓`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Bias(f64);

impl Bias {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value.abs() > 1.0 {
            return Err(Error::InvalidParameter(format!(
                "bias must be a finite value in [-1, 1], got {value}"
            )));
        }
        Ok(Bias(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Probability of the up state, `(1 + ε) / 2`.
    pub fn p_up(self) -> f64 {
        (1.0 + self.0) / 2.0
    }

    pub fn p_down(self) -> f64 {
        (1.0 - self.0) / 2.0
    }
}

/// Energy gap, Boltzmann constant and bath temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Energy gap between the two spin states, joules.
    pub delta_e: f64,
    /// Boltzmann constant, joules per kelvin.
    pub k_boltzmann: f64,
    /// Bath temperature, kelvin.
    pub temperature: f64,
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        if !self.delta_e.is_finite() || !self.k_boltzmann.is_finite() || !self.temperature.is_finite() {
            return Err(Error::InvalidParameter("physical parameters must be finite".into()));
        }
        if self.k_boltzmann <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "Boltzmann constant must be positive, got {}",
                self.k_boltzmann
            )));
        }
        if self.temperature <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "temperature must be positive, got {}",
                self.temperature
            )));
        }
        Ok(())
    }
}

/// Thermal bias `tanh(ΔE / 2kT)`.
pub fn bias_from_physics(p: &PhysicalParams) -> Result<Bias> {
    p.validate()?;
    Bias::new((p.delta_e / (2.0 * p.k_boltzmann * p.temperature)).tanh())
}

/// Spin temperature at which a two-level system with gap `delta_e` has
/// bias `b`: `ΔE / (2k·atanh ε)`.
///
/// A zero bias is an infinite temperature and `|ε| = 1` is absolute zero;
/// both are rejected. Negative biases give negative temperatures.
pub fn effective_temperature(b: Bias, delta_e: f64, k: f64) -> Result<f64> {
    let eps = b.value();
    if eps == 0.0 {
        return Err(Error::Temperature("zero bias corresponds to infinite temperature".into()));
    }
    if eps.abs() >= 1.0 {
        return Err(Error::Temperature("|bias| = 1 corresponds to zero temperature".into()));
    }
    if !delta_e.is_finite() || !k.is_finite() || k <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "need finite energy gap and positive Boltzmann constant, got ΔE = {delta_e}, k = {k}"
        )));
    }
    Ok(delta_e / (2.0 * k * eps.atanh()))
}

/// Binary entropy of a two-outcome distribution `(p, 1-p)`, in bits.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    term(p) + term(1.0 - p)
}

/// Number of thermal qubits with bias `eps0` needed to distil `n_j` pure
/// qubits by entropy-preserving compression: `ln(4)·n_j·ε₀⁻²`.
pub fn shannon_qubit_bound(n_j: u64, eps0: f64) -> Result<f64> {
    if n_j == 0 {
        return Err(Error::InvalidParameter("n_j must be at least 1".into()));
    }
    if !eps0.is_finite() || eps0 <= 0.0 || eps0 > 1.0 {
        return Err(Error::InvalidParameter(format!(
            "initial bias must lie in (0, 1], got {eps0}"
        )));
    }
    Ok(4f64.ln() * n_j as f64 / (eps0 * eps0))
}

/// Per-qubit physical description.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitSpec {
    pub name: String,
    /// Equilibrium bias, in whatever unit the owning configuration uses.
    pub eq_bias: f64,
    /// Spin-lattice relaxation time, seconds.
    pub t1: f64,
    /// Dephasing time, seconds.
    pub t2: Option<f64>,
}

impl QubitSpec {
    pub fn new(name: impl Into<String>, eq_bias: f64, t1: f64) -> Self {
        QubitSpec { name: name.into(), eq_bias, t1, t2: None }
    }

    pub fn with_t2(mut self, t2: f64) -> Self {
        self.t2 = Some(t2);
        self
    }

    /// Checks hard invariants and returns soft warnings (T2 > 2·T1).
    pub fn validate(&self) -> Result<Vec<String>> {
        if !self.t1.is_finite() || self.t1 <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "qubit {}: t1 must be positive, got {}",
                self.name, self.t1
            )));
        }
        if !self.eq_bias.is_finite() {
            return Err(Error::InvalidParameter(format!("qubit {}: eq_bias must be finite", self.name)));
        }
        let mut warnings = Vec::new();
        if let Some(t2) = self.t2 {
            if !t2.is_finite() || t2 <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "qubit {}: t2 must be positive, got {t2}",
                    self.name
                )));
            }
            if t2 > 2.0 * self.t1 {
                warnings.push(format!(
                    "qubit {}: t2 = {t2} s exceeds 2·t1 = {} s",
                    self.name,
                    2.0 * self.t1
                ));
            }
        }
        Ok(warnings)
    }
}

/// Diagonal of an `n`-qubit density matrix. See the module docs for the
/// basis labelling.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalState {
    n_qubits: usize,
    probs: Vec<f64>,
    clamped: usize,
}

impl DiagonalState {
    /// Builds a state from raw probabilities, clamping tiny negative noise.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        let len = probs.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Capacity(format!(
                "probability vector length must be 2^n with n >= 1, got {len}"
            )));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::Capacity(format!("{n_qubits} qubits exceeds the limit of {MAX_QUBITS}")));
        }
        let mut state = DiagonalState { n_qubits, probs, clamped: 0 };
        state.check_and_clamp()?;
        Ok(state)
    }

    /// The uniform (maximally mixed) state.
    pub fn uniform(n_qubits: usize) -> Result<Self> {
        check_capacity(n_qubits)?;
        let dim = 1usize << n_qubits;
        Ok(DiagonalState { n_qubits, probs: vec![1.0 / dim as f64; dim], clamped: 0 })
    }

    /// A single basis state with probability one.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_capacity(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::IndexOutOfRange { what: "basis index", index, limit: dim });
        }
        let mut probs = vec![0.0; dim];
        probs[index] = 1.0;
        Ok(DiagonalState { n_qubits, probs, clamped: 0 })
    }

    /// Product state with the given per-qubit biases.
    pub fn product(biases: &[f64]) -> Result<Self> {
        let n_qubits = biases.len();
        check_capacity(n_qubits)?;
        for &b in biases {
            Bias::new(b)?;
        }
        let dim = 1usize << n_qubits;
        let mut probs = vec![1.0; dim];
        for (q, &eps) in biases.iter().enumerate() {
            let shift = n_qubits - 1 - q;
            let (up, down) = ((1.0 + eps) / 2.0, (1.0 - eps) / 2.0);
            for (b, p) in probs.iter_mut().enumerate() {
                *p *= if (b >> shift) & 1 == 0 { up } else { down };
            }
        }
        DiagonalState::from_raw(n_qubits, probs)
    }

    pub(crate) fn from_raw(n_qubits: usize, probs: Vec<f64>) -> Result<Self> {
        let mut state = DiagonalState { n_qubits, probs, clamped: 0 };
        state.check_and_clamp()?;
        Ok(state)
    }

    fn check_and_clamp(&mut self) -> Result<()> {
        let mut clamped = 0;
        for (index, p) in self.probs.iter_mut().enumerate() {
            if !p.is_finite() {
                return Err(Error::InvalidState(format!("probability at index {index} is not finite")));
            }
            if *p < 0.0 {
                if *p < -CLAMP_TOLERANCE {
                    return Err(Error::InvalidState(format!(
                        "probability at index {index} is negative ({p})"
                    )));
                }
                *p = 0.0;
                clamped += 1;
            }
        }
        let total: f64 = self.probs.iter().sum();
        if (total - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidState(format!("probabilities sum to {total}, expected 1")));
        }
        self.clamped += clamped;
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }

    /// How many entries were clamped from tiny negative values so far.
    pub fn clamped_count(&self) -> usize {
        self.clamped
    }

    /// Bit shift selecting qubit `i` in a basis index.
    pub(crate) fn shift_of(&self, i: usize) -> usize {
        self.n_qubits - 1 - i
    }

    pub(crate) fn check_qubit(&self, i: usize) -> Result<()> {
        if i >= self.n_qubits {
            return Err(Error::IndexOutOfRange { what: "qubit", index: i, limit: self.n_qubits });
        }
        Ok(())
    }

    pub(crate) fn probs_mut(&mut self) -> &mut [f64] {
        &mut self.probs
    }

    /// Re-validates after an in-place update that may have produced rounding noise.
    pub(crate) fn renormalize_check(&mut self) -> Result<()> {
        self.check_and_clamp()
    }

    /// Convex combination `w·self + (1-w)·other`.
    pub fn mix(&self, other: &DiagonalState, w: f64) -> Result<DiagonalState> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::InvalidParameter("cannot mix states of different sizes".into()));
        }
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidParameter(format!("mixing weight must be in [0, 1], got {w}")));
        }
        let probs = self.probs.iter().zip(&other.probs).map(|(a, b)| w * a + (1.0 - w) * b).collect();
        DiagonalState::from_raw(self.n_qubits, probs)
    }

    pub fn marginal_bias(&self, i: usize) -> Result<Bias> {
        marginal_bias(self, i)
    }

    /// Marginal biases of all qubits in order.
    pub fn biases(&self) -> Vec<f64> {
        let n = self.n_qubits;
        let mut up = vec![0.0; n];
        for (b, &p) in self.probs.iter().enumerate() {
            for (q, acc) in up.iter_mut().enumerate() {
                if (b >> (n - 1 - q)) & 1 == 0 {
                    *acc += p;
                }
            }
        }
        up.into_iter().map(|pu| (2.0 * pu - 1.0).clamp(-1.0, 1.0)).collect()
    }

    pub fn entropy(&self) -> f64 {
        shannon_entropy(self)
    }
}

fn check_capacity(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::Capacity(format!(
            "number of qubits must be in 1..={MAX_QUBITS}, got {n_qubits}"
        )));
    }
    Ok(())
}

/// Thermal product state of the given qubits. Biases are taken as true
/// biases here; scaling from relative units is the caller's job.
pub fn equilibrium_state(qubits: &[QubitSpec]) -> Result<DiagonalState> {
    let biases: Vec<f64> = qubits.iter().map(|q| q.eq_bias).collect();
    DiagonalState::product(&biases)
}

/// `Σ_b s_i(b)·p(b)` with `s_i(b) = +1` when qubit `i` is up in `b`.
pub fn marginal_bias(s: &DiagonalState, i: usize) -> Result<Bias> {
    s.check_qubit(i)?;
    let shift = s.shift_of(i);
    let v: f64 = s
        .probs
        .iter()
        .enumerate()
        .map(|(b, &p)| if (b >> shift) & 1 == 0 { p } else { -p })
        .sum();
    Ok(Bias(v.clamp(-1.0, 1.0)))
}

/// Shannon entropy of the basis-state distribution, in bits.
pub fn shannon_entropy(s: &DiagonalState) -> f64 {
    s.probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}
