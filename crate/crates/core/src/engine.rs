//! Runs cooling sequences: gates interleaved with T1 relaxation.
//!
//! Every gate applies its permutation and then lets the whole register
//! relax for `gate_duration` seconds, charging that time to the coherent
//! budget. A wait only relaxes. Biases in traces and metrics are reported
//! in the configuration's bias unit.

use crate::config::{BiasUnit, SystemConfig};
use crate::error::{Error, Result};
use crate::gates::{
    apply_permutation_in_place, compress_3b_in_place, not_qubit_in_place, reversible_bias_bound, swap_qubits_in_place,
    Permutation,
};
use crate::relaxation::{relax_in_place, RelaxationClock};
use crate::seqlang::{OpKind, Sequence, WaitSpec};
use crate::state::{effective_temperature, equilibrium_state, DiagonalState};

#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    /// Canonical text of the operation, `init` for the initial snapshot.
    pub op: String,
    pub time_after: f64,
    pub biases_after: Vec<f64>,
    pub entropy_after: f64,
    pub coherent_time_used: f64,
    pub is_gate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
    pub warnings: Vec<String>,
    pub initial: DiagonalState,
    pub final_state: DiagonalState,
}

impl Trace {
    pub fn final_step(&self) -> &TraceStep {
        self.steps.last().expect("trace always holds the initial snapshot")
    }
}

fn snapshot(op: String, state: &DiagonalState, clock: &RelaxationClock, config: &SystemConfig, is_gate: bool) -> TraceStep {
    TraceStep {
        op,
        time_after: clock.elapsed_total,
        biases_after: state.biases().into_iter().map(|b| config.from_true_bias(b)).collect(),
        entropy_after: state.entropy(),
        coherent_time_used: clock.coherent_time_used,
        is_gate,
    }
}

/// Executes `seq` starting from `initial`, or from thermal equilibrium.
pub fn execute(seq: &Sequence, config: &SystemConfig, initial: Option<&DiagonalState>) -> Result<Trace> {
    if let Some(label) = seq.free_waits().first() {
        return Err(Error::UnresolvedWait(label.to_string()));
    }
    let qubits = config.physical_qubits();
    let mut state = match initial {
        Some(s) => {
            if s.n_qubits() != qubits.len() {
                return Err(Error::InvalidParameter(format!(
                    "initial state has {} qubits, config has {}",
                    s.n_qubits(),
                    qubits.len()
                )));
            }
            s.clone()
        }
        None => equilibrium_state(&qubits)?,
    };
    let initial_state = state.clone();
    let mut clock = RelaxationClock::default();
    let mut warnings = Vec::new();
    let t2_limit = config.min_t2().map(|t2| t2 * config.t2_budget_fraction);
    let mut t2_warned = false;
    let mut clamped = state.clamped_count();

    let mut steps = vec![snapshot("init".into(), &state, &clock, config, false)];
    for op in &seq.ops {
        let is_gate = !op.kind.is_wait();
        match &op.kind {
            OpKind::Swap(i, j) => swap_qubits_in_place(&mut state, *i, *j)?,
            OpKind::Comp { target, a, b } => compress_3b_in_place(&mut state, *target, *a, *b)?,
            OpKind::Not(i) => not_qubit_in_place(&mut state, *i)?,
            OpKind::Perm(pairs) => apply_permutation_in_place(&mut state, &Permutation::new(pairs.clone()))?,
            OpKind::Wait(WaitSpec::Fixed(dt)) => {
                relax_in_place(&mut state, &qubits, *dt)?;
                clock.advance_wait(*dt);
            }
            OpKind::Wait(WaitSpec::Auto(label)) => return Err(Error::UnresolvedWait(label.clone())),
        }
        if is_gate && config.gate_duration > 0.0 {
            relax_in_place(&mut state, &qubits, config.gate_duration)?;
            clock.advance_gate(config.gate_duration);
        }
        if let Some(limit) = t2_limit {
            if !t2_warned && clock.coherent_time_used > limit {
                warnings.push(format!(
                    "line {}: coherent gate time {:.6} s exceeds the T2 budget of {:.6} s",
                    op.source_line, clock.coherent_time_used, limit
                ));
                t2_warned = true;
            }
        }
        if state.clamped_count() > clamped {
            warnings.push(format!(
                "line {}: clamped {} rounding-level negative probabilities",
                op.source_line,
                state.clamped_count() - clamped
            ));
            clamped = state.clamped_count();
        }
        steps.push(snapshot(op.kind.to_string(), &state, &clock, config, is_gate));
    }
    Ok(Trace { steps, warnings, initial: initial_state, final_state: state })
}

#[derive(Debug, Clone, PartialEq)]
pub enum WaitPolicy {
    Fixed(f64),
    Auto,
}

impl WaitPolicy {
    /// Three reset-qubit T1s, enough for about 95% re-thermalization.
    pub fn default_fixed(config: &SystemConfig) -> Option<WaitPolicy> {
        let &reset = config.reset_qubits.first()?;
        Some(WaitPolicy::Fixed(3.0 * config.qubits[reset].t1))
    }
}

/// The two-thermalization schedule for a three-qubit system with one reset
/// qubit: load the far computation qubit from the reset qubit, wait, load
/// the near one, wait, then compress onto `target`.
///
/// "Far" means farther from the reset qubit in the coupling graph; without
/// a graph (or on ties) the qubit with the longer T1 is loaded first.
pub fn canonical_ac_schedule(config: &SystemConfig, target: usize, policy: &WaitPolicy) -> Result<Sequence> {
    let n = config.n_qubits();
    if n != 3 {
        return Err(Error::UnsupportedSchedule(format!(
            "the canonical schedule is defined for 3 qubits, this system has {n}; write the sequence by hand"
        )));
    }
    if config.reset_qubits.len() != 1 {
        return Err(Error::UnsupportedSchedule(format!(
            "the canonical schedule needs exactly one reset qubit, found {}",
            config.reset_qubits.len()
        )));
    }
    let reset = config.reset_qubits[0];
    if target >= n {
        return Err(Error::IndexOutOfRange { what: "qubit", index: target, limit: n });
    }
    if target == reset {
        return Err(Error::UnsupportedSchedule("target must be a computation qubit".into()));
    }
    let mut comp = config.computation_qubits();
    if config.coupling_edges.is_some() && !comp.iter().any(|&c| config.adjacent(reset, c) == Some(true)) {
        return Err(Error::UnsupportedSchedule("reset qubit is not coupled to any computation qubit".into()));
    }
    comp.sort_by(|&a, &b| {
        let da = config.graph_distance(reset, a).unwrap_or(usize::MAX);
        let db = config.graph_distance(reset, b).unwrap_or(usize::MAX);
        db.cmp(&da).then(config.qubits[b].t1.total_cmp(&config.qubits[a].t1)).then(a.cmp(&b))
    });
    let (far, near) = (comp[0], comp[1]);
    let wait = |k: usize| match policy {
        WaitPolicy::Fixed(d) => OpKind::Wait(WaitSpec::Fixed(*d)),
        WaitPolicy::Auto => OpKind::Wait(WaitSpec::Auto(format!("w{k}"))),
    };
    if let WaitPolicy::Fixed(d) = policy {
        if !d.is_finite() || *d < 0.0 {
            return Err(Error::InvalidParameter(format!("wait must be a non-negative duration, got {d}")));
        }
    }
    let mut others: Vec<usize> = (0..n).filter(|&q| q != target).collect();
    others.sort_unstable();
    Ok(Sequence::from_kinds([
        OpKind::Swap(reset, far),
        wait(1),
        OpKind::Swap(reset, near),
        wait(2),
        OpKind::Comp { target, a: others[0], b: others[1] },
    ]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub target: usize,
    pub final_bias: f64,
    pub equilibrium_bias: f64,
    /// `final_bias / equilibrium_bias`.
    pub cooling_factor: f64,
    pub entropy_initial: f64,
    pub entropy_final: f64,
    /// Best bias any permutation could give the target from the initial state.
    pub bound_initial: f64,
    /// `final_bias − bound_initial`; positive means the reversible limit was beaten.
    pub bypass_margin: f64,
    /// Spin temperature of the target, kelvin. Absolute units only.
    pub effective_temperature: Option<f64>,
}

pub fn trace_metrics(t: &Trace, config: &SystemConfig, target: usize) -> Result<Metrics> {
    let q = config
        .qubits
        .get(target)
        .ok_or(Error::IndexOutOfRange { what: "qubit", index: target, limit: config.n_qubits() })?;
    let final_bias = *t.final_step().biases_after.get(target).ok_or(Error::InvalidParameter(
        "trace does not match the configuration".into(),
    ))?;
    let bound_initial = config.from_true_bias(reversible_bias_bound(&t.initial, target)?.value());
    let effective_temperature = match (config.bias_unit, config.physical) {
        (BiasUnit::Absolute, Some(_)) => final_temperature(t, config, target).ok(),
        _ => None,
    };
    Ok(Metrics {
        target,
        final_bias,
        equilibrium_bias: q.eq_bias,
        cooling_factor: final_bias / q.eq_bias,
        entropy_initial: t.steps[0].entropy_after,
        entropy_final: t.final_step().entropy_after,
        bound_initial,
        bypass_margin: final_bias - bound_initial,
        effective_temperature,
    })
}

/// Spin temperature of `target` at the end of the trace.
pub fn final_temperature(t: &Trace, config: &SystemConfig, target: usize) -> Result<f64> {
    if config.bias_unit != BiasUnit::Absolute {
        return Err(Error::Unit("effective temperature needs absolute bias units".into()));
    }
    let physical = config
        .physical
        .ok_or_else(|| Error::Unit("effective temperature needs physical parameters".into()))?;
    let bias = t.final_state.marginal_bias(target)?;
    effective_temperature(bias, physical.delta_e, physical.k_boltzmann)
}

/// A sweepable configuration or sequence parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamPath {
    T1(usize),
    T2(usize),
    EqBias(usize),
    GateDuration,
    T2BudgetFraction,
    /// Duration of the auto wait with this label.
    Wait(String),
}

impl ParamPath {
    /// Parses `qubits[<index|name>].t1|t2|eq_bias`, `gate_duration`,
    /// `t2_budget_fraction` or `waits.<label>`.
    pub fn parse(path: &str, config: &SystemConfig, seq: &Sequence) -> Result<ParamPath> {
        let unknown = || Error::UnknownPath(path.to_string());
        match path {
            "gate_duration" | "gate_duration_s" => return Ok(ParamPath::GateDuration),
            "t2_budget_fraction" => return Ok(ParamPath::T2BudgetFraction),
            _ => {}
        }
        if let Some(label) = path.strip_prefix("waits.") {
            if seq.free_waits().contains(&label) {
                return Ok(ParamPath::Wait(label.to_string()));
            }
            return Err(unknown());
        }
        let rest = path.strip_prefix("qubits[").ok_or_else(unknown)?;
        let (key, field) = rest.split_once("].").ok_or_else(unknown)?;
        let idx = config.qubit_index(key).ok_or_else(unknown)?;
        match field {
            "t1" | "t1_s" => Ok(ParamPath::T1(idx)),
            "t2" | "t2_s" => Ok(ParamPath::T2(idx)),
            "eq_bias" => Ok(ParamPath::EqBias(idx)),
            _ => Err(unknown()),
        }
    }

    pub fn apply(&self, config: &mut SystemConfig, seq: &mut Sequence, value: f64) {
        match self {
            ParamPath::T1(i) => config.qubits[*i].t1 = value,
            ParamPath::T2(i) => config.qubits[*i].t2 = Some(value),
            ParamPath::EqBias(i) => config.qubits[*i].eq_bias = value,
            ParamPath::GateDuration => config.gate_duration = value,
            ParamPath::T2BudgetFraction => config.t2_budget_fraction = value,
            ParamPath::Wait(label) => {
                seq.resolve_wait(label, value);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub axis: String,
    pub target_name: String,
    pub rows: Vec<SweepRow>,
}

/// Runs `seq` once per axis value. Rows come back in input order.
pub fn sweep(config: &SystemConfig, axis: &str, values: &[f64], seq: &Sequence, target: usize) -> Result<SweepTable> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("sweep needs at least one axis value".into()));
    }
    let path = ParamPath::parse(axis, config, seq)?;
    let target_name = config
        .qubits
        .get(target)
        .ok_or(Error::IndexOutOfRange { what: "qubit", index: target, limit: config.n_qubits() })?
        .name
        .clone();
    let point = |&value: &f64| -> Result<SweepRow> {
        let mut cfg = config.clone();
        let mut s = seq.clone();
        path.apply(&mut cfg, &mut s, value);
        cfg.validate()?;
        let trace = execute(&s, &cfg, None)?;
        Ok(SweepRow { axis_value: value, metrics: trace_metrics(&trace, &cfg, target)? })
    };
    #[cfg(feature = "parallel")]
    let rows = {
        use rayon::prelude::*;
        values.par_iter().map(point).collect::<Result<Vec<_>>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let rows = values.iter().map(point).collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { axis: axis.to_string(), target_name, rows })
}

/// Target bias (true units) that perfect separation reaches: three spins
/// at the reset bias compressed onto one.
pub fn ideal_three_bit_bias(reset_bias: f64) -> f64 {
    (3.0 * reset_bias - reset_bias.powi(3)) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::presets;
    use crate::gates::{compress_3b, swap_qubits};
    use crate::seqlang::parse_sequence;
    use crate::state::QubitSpec;
    use approx::assert_relative_eq;

    fn ideal(mut cfg: SystemConfig) -> SystemConfig {
        cfg.gate_duration = 0.0;
        cfg
    }

    #[test]
    fn empty_sequence_is_initial_snapshot() {
        let cfg = presets::tce_salted();
        let t = execute(&Sequence::default(), &cfg, None).unwrap();
        assert_eq!(t.steps.len(), 1);
        for (b, q) in t.steps[0].biases_after.iter().zip(&cfg.qubits) {
            assert_relative_eq!(*b, q.eq_bias, max_relative = 1e-9);
        }
        let m = trace_metrics(&t, &cfg, 0).unwrap();
        assert_relative_eq!(m.cooling_factor, 1.0, max_relative = 1e-9);
        assert!(m.bypass_margin <= 0.0);
    }

    #[test]
    fn swap_loads_carbon_with_proton_bias() {
        let cfg = ideal(presets::tce_unsalted());
        let t = execute(&parse_sequence("swap 2 0").unwrap(), &cfg, None).unwrap();
        let b = &t.final_step().biases_after;
        assert_relative_eq!(b[0], 4.0, max_relative = 1e-9);
        assert_relative_eq!(b[1], 1.0, max_relative = 1e-9);
        assert_relative_eq!(b[2], 1.0, max_relative = 1e-9);

        let t = execute(&parse_sequence("swap 2 1").unwrap(), &cfg, None).unwrap();
        let b = &t.final_step().biases_after;
        assert_relative_eq!(b[1], 4.0, max_relative = 1e-9);
        assert_relative_eq!(b[2], 1.0, max_relative = 1e-9);
    }

    #[test]
    fn unresolved_auto_wait_is_an_error() {
        let cfg = presets::tce_salted();
        let seq = parse_sequence("swap 2 0\nwait auto w").unwrap();
        assert!(matches!(execute(&seq, &cfg, None), Err(Error::UnresolvedWait(l)) if l == "w"));
    }

    #[test]
    fn gate_time_is_charged_and_relaxes() {
        let cfg = presets::tce_salted();
        let t = execute(&parse_sequence("swap 2 0\nwait 1.5\nswap 2 1").unwrap(), &cfg, None).unwrap();
        let last = t.final_step();
        assert_relative_eq!(last.time_after, 1.52, epsilon = 1e-12);
        assert_relative_eq!(last.coherent_time_used, 0.02, epsilon = 1e-12);
        // ideal swap would leave C2 at exactly 4
        assert!(t.steps[1].biases_after[0] < 4.0);
    }

    #[test]
    fn t2_budget_warning() {
        let mut cfg = presets::tce_salted();
        cfg.qubits[0].t2 = Some(0.025);
        let seq = parse_sequence("swap 2 0\nswap 2 1\nnot 0\nnot 0").unwrap();
        let t = execute(&seq, &cfg, None).unwrap();
        assert_eq!(t.warnings.len(), 1);
        assert!(t.warnings[0].starts_with("line 3"), "{}", t.warnings[0]);
        cfg.t2_budget_fraction = 2.0;
        assert!(execute(&seq, &cfg, None).unwrap().warnings.is_empty());
    }

    #[test]
    fn canonical_schedule_shape() {
        let cfg = presets::tce_salted();
        let seq = canonical_ac_schedule(&cfg, 0, &WaitPolicy::Fixed(5.64)).unwrap();
        let text = crate::seqlang::format_sequence(&seq);
        assert_eq!(text, "swap 2 0\nwait 5.64\nswap 2 1\nwait 5.64\ncomp 0 1 2\n");
        let auto = canonical_ac_schedule(&cfg, 1, &WaitPolicy::Auto).unwrap();
        assert_eq!(auto.free_waits(), vec!["w1", "w2"]);
        assert_eq!(auto.ops[4].kind, OpKind::Comp { target: 1, a: 0, b: 2 });
        assert_eq!(WaitPolicy::default_fixed(&cfg), Some(WaitPolicy::Fixed(3.0 * 1.88)));
    }

    #[test]
    fn canonical_schedule_rejects_other_shapes() {
        let cfg = presets::tce_salted();
        assert!(matches!(canonical_ac_schedule(&cfg, 2, &WaitPolicy::Auto), Err(Error::UnsupportedSchedule(_))));
        let mut four = cfg.clone();
        four.qubits.push(QubitSpec::new("X", 1.0, 3.0));
        assert!(matches!(canonical_ac_schedule(&four, 0, &WaitPolicy::Auto), Err(Error::UnsupportedSchedule(_))));
        let mut two_reset = cfg.clone();
        two_reset.reset_qubits = vec![1, 2];
        assert!(matches!(canonical_ac_schedule(&two_reset, 0, &WaitPolicy::Auto), Err(Error::UnsupportedSchedule(_))));
    }

    #[test]
    fn zero_wait_canonical_equals_gate_algebra() {
        let cfg = ideal(presets::tce_salted());
        let seq = canonical_ac_schedule(&cfg, 0, &WaitPolicy::Fixed(0.0)).unwrap();
        let t = execute(&seq, &cfg, None).unwrap();
        let s0 = equilibrium_state(&cfg.physical_qubits()).unwrap();
        let s = swap_qubits(&s0, 2, 0).unwrap();
        let s = swap_qubits(&s, 2, 1).unwrap();
        let s = compress_3b(&s, 0, 1, 2).unwrap();
        for (a, b) in t.final_state.probs().iter().zip(s.probs()) {
            assert!((a - b).abs() <= 1e-15);
        }
    }

    #[test]
    fn effective_temperature_needs_absolute_units() {
        let cfg = presets::tce_salted();
        let t = execute(&Sequence::default(), &cfg, None).unwrap();
        assert!(matches!(final_temperature(&t, &cfg, 0), Err(Error::Unit(_))));
        assert_eq!(trace_metrics(&t, &cfg, 0).unwrap().effective_temperature, None);

        let mut abs = cfg.clone();
        abs.bias_unit = BiasUnit::Absolute;
        let k = 1.380649e-23;
        let temp = 300.0;
        let delta_e = 2.0 * k * temp * 1e-5;
        abs.physical = Some(crate::state::PhysicalParams { delta_e, k_boltzmann: k, temperature: temp });
        for q in &mut abs.qubits {
            q.eq_bias = (delta_e / (2.0 * k * temp)).tanh();
        }
        let t = execute(&Sequence::default(), &abs, None).unwrap();
        let m = trace_metrics(&t, &abs, 0).unwrap();
        assert_relative_eq!(m.effective_temperature.unwrap(), temp, max_relative = 1e-9);
    }

    #[test]
    fn sweep_single_value_matches_execute() {
        let cfg = presets::tce_salted();
        let seq = canonical_ac_schedule(&cfg, 0, &WaitPolicy::Fixed(4.0)).unwrap();
        let table = sweep(&cfg, "qubits[C1].t1", &[16.0], &seq, 0).unwrap();
        let direct = trace_metrics(&execute(&seq, &cfg, None).unwrap(), &cfg, 0).unwrap();
        assert_eq!(table.rows.len(), 1);
        assert_eq!(table.rows[0].metrics, direct);
        assert_eq!(table.target_name, "C2");
    }

    #[test]
    fn sweep_errors() {
        let cfg = presets::tce_salted();
        let seq = canonical_ac_schedule(&cfg, 0, &WaitPolicy::Auto).unwrap();
        assert!(matches!(sweep(&cfg, "qubits[Z].t1", &[1.0], &seq, 0), Err(Error::UnknownPath(_))));
        assert!(matches!(sweep(&cfg, "waits.nope", &[1.0], &seq, 0), Err(Error::UnknownPath(_))));
        assert!(matches!(sweep(&cfg, "bogus", &[1.0], &seq, 0), Err(Error::UnknownPath(_))));
        assert!(sweep(&cfg, "waits.w1", &[], &seq, 0).is_err());
        // w2 stays unresolved
        assert!(matches!(sweep(&cfg, "waits.w1", &[1.0], &seq, 0), Err(Error::UnresolvedWait(_))));
        assert!(sweep(&cfg, "qubits[0].t1", &[-1.0], &seq.with_durations(&[1.0, 1.0]), 0).is_err());
    }

    #[test]
    fn param_paths() {
        let cfg = presets::tce_salted();
        let seq = canonical_ac_schedule(&cfg, 0, &WaitPolicy::Auto).unwrap();
        assert_eq!(ParamPath::parse("qubits[2].t1", &cfg, &seq).unwrap(), ParamPath::T1(2));
        assert_eq!(ParamPath::parse("qubits[H].eq_bias", &cfg, &seq).unwrap(), ParamPath::EqBias(2));
        assert_eq!(ParamPath::parse("qubits[C2].t2", &cfg, &seq).unwrap(), ParamPath::T2(0));
        assert_eq!(ParamPath::parse("gate_duration", &cfg, &seq).unwrap(), ParamPath::GateDuration);
        assert_eq!(ParamPath::parse("waits.w2", &cfg, &seq).unwrap(), ParamPath::Wait("w2".into()));
        assert!(ParamPath::parse("qubits[1].color", &cfg, &seq).is_err());
    }
}
