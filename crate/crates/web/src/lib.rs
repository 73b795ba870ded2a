//! Browser bindings for the TCE cooling demo.
//!
//! All functions take the three relaxation times in the order (C2, C1, H)
//! and return flat `Float64Array`s so the page can plot them directly.

use hbac_core::engine::WaitPolicy;
use hbac_core::seqlang::{OpKind, WaitSpec};
use hbac_core::{
    canonical_ac_schedule, execute, optimize_waits, presets, trace_metrics, OptimizationProblem, Sequence, SystemConfig,
};
use wasm_bindgen::prelude::*;

fn js(e: hbac_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Canonical schedule with each wait cut into `samples` equal slices, so the
/// trace has points along the relaxation curves.
fn sampled_schedule(cfg: &SystemConfig, wait: f64, samples: usize) -> Result<Sequence, hbac_core::Error> {
    let seq = canonical_ac_schedule(cfg, 0, &WaitPolicy::Fixed(wait))?;
    let slice = wait / samples.max(1) as f64;
    let kinds = seq.ops.into_iter().flat_map(|op| match op.kind {
        OpKind::Wait(_) => vec![OpKind::Wait(WaitSpec::Fixed(slice)); samples.max(1)],
        other => vec![other],
    });
    Ok(Sequence::from_kinds(kinds))
}

/// Rows of `[time_s, bias_C2, bias_C1, bias_H]` for the canonical schedule
/// with both waits equal to `wait`.
pub fn trajectory_rows(t1: [f64; 3], wait: f64, samples: usize) -> hbac_core::Result<Vec<[f64; 4]>> {
    let cfg = presets::tce(t1);
    cfg.validate()?;
    let trace = execute(&sampled_schedule(&cfg, wait, samples)?, &cfg, None)?;
    Ok(trace
        .steps
        .iter()
        .map(|s| [s.time_after, s.biases_after[0], s.biases_after[1], s.biases_after[2]])
        .collect())
}

/// Final C2 bias against a common wait duration, `points` values in `[0, max_wait]`.
pub fn wait_scan_rows(t1: [f64; 3], max_wait: f64, points: usize) -> hbac_core::Result<Vec<[f64; 2]>> {
    let cfg = presets::tce(t1);
    cfg.validate()?;
    let n = points.max(2);
    (0..n)
        .map(|k| {
            let w = max_wait * k as f64 / (n - 1) as f64;
            let seq = canonical_ac_schedule(&cfg, 0, &WaitPolicy::Fixed(w))?;
            let m = trace_metrics(&execute(&seq, &cfg, None)?, &cfg, 0)?;
            Ok([w, m.final_bias])
        })
        .collect()
}

/// `[w1, w2, final_bias, bound]` for the optimized two-wait schedule.
pub fn optimized_waits(t1: [f64; 3], max_wait: f64) -> hbac_core::Result<[f64; 4]> {
    let cfg = presets::tce(t1);
    cfg.validate()?;
    let seq = canonical_ac_schedule(&cfg, 0, &WaitPolicy::Auto)?;
    let problem = OptimizationProblem::new(seq, cfg.clone(), 0)?.with_max_wait(max_wait);
    let r = optimize_waits(&problem)?;
    let trace = execute(&problem.sequence.with_durations(&r.durations), &cfg, None)?;
    let m = trace_metrics(&trace, &cfg, 0)?;
    Ok([r.durations[0], r.durations[1], m.final_bias, m.bound_initial])
}

#[wasm_bindgen]
pub fn trajectory(t1_c2: f64, t1_c1: f64, t1_h: f64, wait: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    Ok(trajectory_rows([t1_c2, t1_c1, t1_h], wait, samples).map_err(js)?.concat())
}

#[wasm_bindgen]
pub fn wait_scan(t1_c2: f64, t1_c1: f64, t1_h: f64, max_wait: f64, points: usize) -> Result<Vec<f64>, JsError> {
    Ok(wait_scan_rows([t1_c2, t1_c1, t1_h], max_wait, points).map_err(js)?.concat())
}

#[wasm_bindgen]
pub fn optimize(t1_c2: f64, t1_c1: f64, t1_h: f64, max_wait: f64) -> Result<Vec<f64>, JsError> {
    Ok(optimized_waits([t1_c2, t1_c1, t1_h], max_wait).map_err(js)?.to_vec())
}

/// Relaxation times of the built-in samples, `[C2, C1, H]`.
#[wasm_bindgen]
pub fn preset_t1(name: &str) -> Option<Vec<f64>> {
    presets::by_name(name).map(|c| c.qubits.iter().map(|q| q.t1).collect())
}
