//! System configuration, its JSON form, and the built-in TCE presets.
//!
//! JSON schema:
//!
//! ```json
//! {
//!   "qubits": [{"name": "C2", "eq_bias": 1.0, "t1_s": 28.3, "t2_s": 1.0}],
//!   "reset_qubits": ["H"],
//!   "coupling_edges": [["H", "C1"], ["C1", "C2"]],
//!   "bias_unit": "relative",
//!   "gate_duration_s": 0.01,
//!   "t2_budget_fraction": 1.0,
//!   "relative_scale": 1e-5,
//!   "physical": {"delta_e_j": 4e-25, "k_j_per_k": 1.380649e-23, "temperature_k": 300.0}
//! }
//! ```
//!
//! `t2_s`, `coupling_edges`, `gate_duration_s`, `t2_budget_fraction`,
//! `relative_scale` and `physical` are optional.

use std::collections::{BTreeSet, VecDeque};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{PhysicalParams, QubitSpec, MAX_QUBITS};

pub const DEFAULT_GATE_DURATION: f64 = 0.010;
pub const DEFAULT_RELATIVE_SCALE: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BiasUnit {
    /// Biases in arbitrary units; the simulator multiplies them by
    /// `relative_scale` to get true biases and divides results back.
    Relative,
    /// Biases are true polarization values.
    Absolute,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub qubits: Vec<QubitSpec>,
    /// Sorted, deduplicated indices of reset qubits.
    pub reset_qubits: Vec<usize>,
    pub coupling_edges: Option<Vec<(usize, usize)>>,
    pub gate_duration: f64,
    pub t2_budget_fraction: f64,
    pub bias_unit: BiasUnit,
    /// True bias represented by one relative unit.
    pub relative_scale: f64,
    pub physical: Option<PhysicalParams>,
}

impl SystemConfig {
    pub fn new(qubits: Vec<QubitSpec>, reset_qubits: Vec<usize>) -> Self {
        SystemConfig {
            qubits,
            reset_qubits,
            coupling_edges: None,
            gate_duration: DEFAULT_GATE_DURATION,
            t2_budget_fraction: 1.0,
            bias_unit: BiasUnit::Relative,
            relative_scale: DEFAULT_RELATIVE_SCALE,
            physical: None,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.qubits.len()
    }

    /// Checks invariants; returns soft warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        let n = self.qubits.len();
        if n == 0 || n > MAX_QUBITS {
            return Err(config_err("/qubits", format!("need between 1 and {MAX_QUBITS} qubits, got {n}")));
        }
        let mut warnings = Vec::new();
        for (i, q) in self.qubits.iter().enumerate() {
            if !q.t1.is_finite() || q.t1 <= 0.0 {
                return Err(config_err(format!("/qubits/{i}/t1_s"), format!("t1 must be positive, got {}", q.t1)));
            }
            if let Some(t2) = q.t2 {
                if !t2.is_finite() || t2 <= 0.0 {
                    return Err(config_err(format!("/qubits/{i}/t2_s"), format!("t2 must be positive, got {t2}")));
                }
            }
            let true_bias = self.to_true_bias(q.eq_bias);
            if !true_bias.is_finite() || true_bias.abs() > 1.0 {
                return Err(config_err(
                    format!("/qubits/{i}/eq_bias"),
                    format!("equilibrium bias {} gives a true bias outside [-1, 1]", q.eq_bias),
                ));
            }
            warnings.extend(q.validate()?);
        }
        let mut names = BTreeSet::new();
        for (i, q) in self.qubits.iter().enumerate() {
            if !names.insert(q.name.as_str()) {
                return Err(config_err(format!("/qubits/{i}/name"), format!("duplicate qubit name `{}`", q.name)));
            }
        }
        for (k, &r) in self.reset_qubits.iter().enumerate() {
            if r >= n {
                return Err(config_err(format!("/reset_qubits/{k}"), format!("reset index {r} out of range")));
            }
        }
        if let Some(edges) = &self.coupling_edges {
            for (k, &(a, b)) in edges.iter().enumerate() {
                if a >= n || b >= n || a == b {
                    return Err(config_err(format!("/coupling_edges/{k}"), format!("invalid edge ({a}, {b})")));
                }
            }
        }
        if !self.gate_duration.is_finite() || self.gate_duration < 0.0 {
            return Err(config_err("/gate_duration_s", format!("must be >= 0, got {}", self.gate_duration)));
        }
        if !self.t2_budget_fraction.is_finite() || self.t2_budget_fraction <= 0.0 {
            return Err(config_err("/t2_budget_fraction", format!("must be > 0, got {}", self.t2_budget_fraction)));
        }
        if !self.relative_scale.is_finite() || self.relative_scale <= 0.0 {
            return Err(config_err("/relative_scale", format!("must be > 0, got {}", self.relative_scale)));
        }
        if let Some(p) = &self.physical {
            p.validate().map_err(|e| config_err("/physical", e.to_string()))?;
        }
        Ok(warnings)
    }

    pub fn to_true_bias(&self, value: f64) -> f64 {
        match self.bias_unit {
            BiasUnit::Relative => value * self.relative_scale,
            BiasUnit::Absolute => value,
        }
    }

    pub fn from_true_bias(&self, value: f64) -> f64 {
        match self.bias_unit {
            BiasUnit::Relative => value / self.relative_scale,
            BiasUnit::Absolute => value,
        }
    }

    /// Qubit specs with equilibrium biases converted to true biases.
    pub fn physical_qubits(&self) -> Vec<QubitSpec> {
        self.qubits
            .iter()
            .map(|q| QubitSpec { eq_bias: self.to_true_bias(q.eq_bias), ..q.clone() })
            .collect()
    }

    /// Looks a qubit up by name or by decimal index.
    pub fn qubit_index(&self, key: &str) -> Option<usize> {
        self.qubits
            .iter()
            .position(|q| q.name == key)
            .or_else(|| key.parse::<usize>().ok().filter(|&i| i < self.qubits.len()))
    }

    pub fn is_reset(&self, i: usize) -> bool {
        self.reset_qubits.contains(&i)
    }

    pub fn computation_qubits(&self) -> Vec<usize> {
        (0..self.qubits.len()).filter(|&i| !self.is_reset(i)).collect()
    }

    /// `None` when no coupling graph is declared.
    pub fn adjacent(&self, i: usize, j: usize) -> Option<bool> {
        self.coupling_edges
            .as_ref()
            .map(|edges| edges.iter().any(|&(a, b)| (a, b) == (i, j) || (a, b) == (j, i)))
    }

    /// Whether `nodes` form a connected subgraph of the coupling graph.
    /// Always true without a graph.
    pub fn connected(&self, nodes: &[usize]) -> bool {
        let Some(edges) = &self.coupling_edges else { return true };
        let Some(&start) = nodes.first() else { return true };
        let mut seen = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &(a, b) in edges {
                let v = if a == u { b } else if b == u { a } else { continue };
                if nodes.contains(&v) && !seen.contains(&v) {
                    seen.push(v);
                    queue.push_back(v);
                }
            }
        }
        seen.len() == nodes.len()
    }

    /// Hop distance in the coupling graph, if both qubits are connected.
    pub fn graph_distance(&self, from: usize, to: usize) -> Option<usize> {
        let edges = self.coupling_edges.as_ref()?;
        let mut dist = vec![usize::MAX; self.qubits.len()];
        dist[from] = 0;
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            for &(a, b) in edges {
                let v = if a == u { b } else if b == u { a } else { continue };
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        (dist[to] != usize::MAX).then_some(dist[to])
    }

    pub fn min_t2(&self) -> Option<f64> {
        self.qubits.iter().filter_map(|q| q.t2).reduce(f64::min)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: ConfigFile = serde_json::from_str(text).map_err(|e| {
            config_err("", format!("{e}"))
        })?;
        raw.into_config()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err("", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn to_json_string(&self) -> String {
        let name = |i: usize| self.qubits[i].name.clone();
        let file = ConfigFile {
            qubits: self
                .qubits
                .iter()
                .map(|q| QubitEntry { name: q.name.clone(), eq_bias: q.eq_bias, t1_s: q.t1, t2_s: q.t2 })
                .collect(),
            reset_qubits: self.reset_qubits.iter().map(|&i| name(i)).collect(),
            coupling_edges: self.coupling_edges.as_ref().map(|e| e.iter().map(|&(a, b)| [name(a), name(b)]).collect()),
            bias_unit: self.bias_unit,
            gate_duration_s: Some(self.gate_duration),
            t2_budget_fraction: Some(self.t2_budget_fraction),
            relative_scale: Some(self.relative_scale),
            physical: self.physical.map(|p| PhysicalEntry {
                delta_e_j: p.delta_e,
                k_j_per_k: p.k_boltzmann,
                temperature_k: p.temperature,
            }),
        };
        serde_json::to_string_pretty(&file).expect("config serializes")
    }
}

fn config_err(path: impl Into<String>, message: impl Into<String>) -> Error {
    let path = path.into();
    Error::Config { path: if path.is_empty() { "/".into() } else { path }, message: message.into() }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QubitEntry {
    name: String,
    eq_bias: f64,
    t1_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t2_s: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize, Clone, Copy)]
#[serde(deny_unknown_fields)]
struct PhysicalEntry {
    delta_e_j: f64,
    k_j_per_k: f64,
    temperature_k: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    qubits: Vec<QubitEntry>,
    #[serde(default)]
    reset_qubits: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coupling_edges: Option<Vec<[String; 2]>>,
    bias_unit: BiasUnit,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gate_duration_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t2_budget_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    relative_scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    physical: Option<PhysicalEntry>,
}

impl ConfigFile {
    fn into_config(self) -> Result<SystemConfig> {
        let qubits: Vec<QubitSpec> = self
            .qubits
            .into_iter()
            .map(|q| QubitSpec { name: q.name, eq_bias: q.eq_bias, t1: q.t1_s, t2: q.t2_s })
            .collect();
        let lookup = |name: &str, path: String| {
            qubits
                .iter()
                .position(|q| q.name == name)
                .ok_or_else(|| config_err(path, format!("unknown qubit `{name}`")))
        };
        let mut reset = Vec::new();
        for (k, name) in self.reset_qubits.iter().enumerate() {
            reset.push(lookup(name, format!("/reset_qubits/{k}"))?);
        }
        reset.sort_unstable();
        reset.dedup();
        let coupling_edges = match self.coupling_edges {
            Some(edges) => {
                let mut out = Vec::new();
                for (k, [a, b]) in edges.iter().enumerate() {
                    out.push((lookup(a, format!("/coupling_edges/{k}/0"))?, lookup(b, format!("/coupling_edges/{k}/1"))?));
                }
                Some(out)
            }
            None => None,
        };
        let config = SystemConfig {
            qubits,
            reset_qubits: reset,
            coupling_edges,
            gate_duration: self.gate_duration_s.unwrap_or(DEFAULT_GATE_DURATION),
            t2_budget_fraction: self.t2_budget_fraction.unwrap_or(1.0),
            bias_unit: self.bias_unit,
            relative_scale: self.relative_scale.unwrap_or(DEFAULT_RELATIVE_SCALE),
            physical: self.physical.map(|p| PhysicalParams {
                delta_e: p.delta_e_j,
                k_boltzmann: p.k_j_per_k,
                temperature: p.temperature_k,
            }),
        };
        config.validate()?;
        Ok(config)
    }
}

/// Trichloroethylene with two ¹³C labels, measured at 600 MHz.
///
/// Qubit order is `(C2, C1, H)`: the proton is the reset qubit, C1 is its
/// nearest neighbour and C2 the next-nearest, so the coupling chain is
/// H–C1–C2. Equilibrium biases are relative, carbon = 1 and proton = 4.
/// The salted sample contains 233.2 mg/L chromium(III) acetylacetonate.
pub mod presets {
    use super::*;

    pub const NAMES: [&str; 2] = ["tce-unsalted", "tce-salted"];

    /// Chromium(III) acetylacetonate concentration of the salted sample, mg/L.
    pub const SALT_MG_PER_LITER: f64 = 233.2;

    pub const PROTON_TO_CARBON_BIAS: f64 = 4.0;

    /// T1 of (C2, C1, H) in seconds, before adding salt.
    pub const UNSALTED_T1: [f64; 3] = [30.85, 27.45, 5.46];
    /// T1 of (C2, C1, H) in seconds, after adding salt.
    pub const SALTED_T1: [f64; 3] = [28.3, 16.0, 1.88];

    pub fn tce(t1: [f64; 3]) -> SystemConfig {
        let qubits = vec![
            QubitSpec::new("C2", 1.0, t1[0]),
            QubitSpec::new("C1", 1.0, t1[1]),
            QubitSpec::new("H", PROTON_TO_CARBON_BIAS, t1[2]),
        ];
        let mut cfg = SystemConfig::new(qubits, vec![2]);
        cfg.coupling_edges = Some(vec![(2, 1), (1, 0)]);
        cfg
    }

    pub fn tce_unsalted() -> SystemConfig {
        tce(UNSALTED_T1)
    }

    pub fn tce_salted() -> SystemConfig {
        tce(SALTED_T1)
    }

    pub fn by_name(name: &str) -> Option<SystemConfig> {
        match name {
            "tce-unsalted" => Some(tce_unsalted()),
            "tce-salted" => Some(tce_salted()),
            _ => None,
        }
    }
}
