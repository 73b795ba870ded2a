//! CSV and SVG emitters for traces and sweeps.
//!
//! Numbers are written in the shortest decimal form that reads back to
//! the identical `f64`, so emitted tables parse back exactly.
//!
//! Trace CSV header: `step,op,time_s,bias_<name>...,entropy_bits,coherent_time_s`.
//! Sweep CSV header: `axis_value,final_bias_<target>,cooling_factor,bypass_margin,entropy_final_bits`.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use crate::config::SystemConfig;
use crate::engine::{SweepTable, Trace};
use crate::error::{Error, Result};
use crate::seqlang::format_float;

fn csv_error(e: impl std::fmt::Display) -> Error {
    Error::InvalidParameter(format!("csv: {e}"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub step: usize,
    pub op: String,
    pub time_s: f64,
    pub biases: Vec<f64>,
    pub entropy_bits: f64,
    pub coherent_time_s: f64,
}

pub fn trace_rows(trace: &Trace) -> Vec<TraceRow> {
    trace
        .steps
        .iter()
        .enumerate()
        .map(|(step, s)| TraceRow {
            step,
            op: s.op.clone(),
            time_s: s.time_after,
            biases: s.biases_after.clone(),
            entropy_bits: s.entropy_after,
            coherent_time_s: s.coherent_time_used,
        })
        .collect()
}

pub fn trace_header(config: &SystemConfig) -> Vec<String> {
    let mut header = vec!["step".to_string(), "op".into(), "time_s".into()];
    header.extend(config.qubits.iter().map(|q| format!("bias_{}", q.name)));
    header.push("entropy_bits".into());
    header.push("coherent_time_s".into());
    header
}

pub fn trace_csv(trace: &Trace, config: &SystemConfig) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(trace_header(config)).map_err(csv_error)?;
    for row in trace_rows(trace) {
        let mut rec = vec![row.step.to_string(), row.op, format_float(row.time_s)];
        rec.extend(row.biases.iter().map(|&b| format_float(b)));
        rec.push(format_float(row.entropy_bits));
        rec.push(format_float(row.coherent_time_s));
        w.write_record(rec).map_err(csv_error)?;
    }
    into_string(w)
}

fn into_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(csv_error)?;
    String::from_utf8(bytes).map_err(csv_error)
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse().map_err(|_| csv_error(format!("`{s}` is not a number")))
}

pub fn parse_trace_csv(text: &str) -> Result<(Vec<String>, Vec<TraceRow>)> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers().map_err(csv_error)?.iter().map(str::to_string).collect();
    if header.len() < 5 || header[..3] != ["step", "op", "time_s"] {
        return Err(csv_error("unexpected trace header"));
    }
    let n_bias = header.len() - 5;
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_error)?;
        let field = |i: usize| rec.get(i).ok_or_else(|| csv_error("short record"));
        rows.push(TraceRow {
            step: field(0)?.parse().map_err(csv_error)?,
            op: field(1)?.to_string(),
            time_s: parse_f64(field(2)?)?,
            biases: (0..n_bias).map(|i| parse_f64(field(3 + i)?)).collect::<Result<_>>()?,
            entropy_bits: parse_f64(field(3 + n_bias)?)?,
            coherent_time_s: parse_f64(field(4 + n_bias)?)?,
        });
    }
    Ok((header, rows))
}

/// The columns of a sweep that go to CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCsvRow {
    pub axis_value: f64,
    pub final_bias: f64,
    pub cooling_factor: f64,
    pub bypass_margin: f64,
    pub entropy_final_bits: f64,
}

pub fn sweep_rows(table: &SweepTable) -> Vec<SweepCsvRow> {
    table
        .rows
        .iter()
        .map(|r| SweepCsvRow {
            axis_value: r.axis_value,
            final_bias: r.metrics.final_bias,
            cooling_factor: r.metrics.cooling_factor,
            bypass_margin: r.metrics.bypass_margin,
            entropy_final_bits: r.metrics.entropy_final,
        })
        .collect()
}

pub fn sweep_header(target_name: &str) -> [String; 5] {
    [
        "axis_value".into(),
        format!("final_bias_{target_name}"),
        "cooling_factor".into(),
        "bypass_margin".into(),
        "entropy_final_bits".into(),
    ]
}

pub fn sweep_csv(table: &SweepTable) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(sweep_header(&table.target_name)).map_err(csv_error)?;
    for r in sweep_rows(table) {
        w.write_record(
            [r.axis_value, r.final_bias, r.cooling_factor, r.bypass_margin, r.entropy_final_bits].map(format_float),
        )
        .map_err(csv_error)?;
    }
    into_string(w)
}

/// Returns the target name from the header and the rows.
pub fn parse_sweep_csv(text: &str) -> Result<(String, Vec<SweepCsvRow>)> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(csv_error)?.clone();
    let target = header
        .get(1)
        .and_then(|h| h.strip_prefix("final_bias_"))
        .ok_or_else(|| csv_error("unexpected sweep header"))?
        .to_string();
    if header.iter().collect::<Vec<_>>() != sweep_header(&target).iter().map(String::as_str).collect::<Vec<_>>() {
        return Err(csv_error("unexpected sweep header"));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_error)?;
        let v: Vec<f64> = rec.iter().map(parse_f64).collect::<Result<_>>()?;
        if v.len() != 5 {
            return Err(csv_error("sweep rows need 5 fields"));
        }
        rows.push(SweepCsvRow {
            axis_value: v[0],
            final_bias: v[1],
            cooling_factor: v[2],
            bypass_margin: v[3],
            entropy_final_bits: v[4],
        });
    }
    Ok((target, rows))
}

const PANEL_W: f64 = 560.0;
const PANEL_H: f64 = 150.0;
const MARGIN_L: f64 = 80.0;
const MARGIN_T: f64 = 30.0;
const GAP: f64 = 40.0;

/// Stacked line plots of every sweep metric against the axis value, one
/// `<polyline>` per metric.
pub fn sweep_svg(table: &SweepTable) -> String {
    let rows = sweep_rows(table);
    let series: [(String, Vec<f64>); 4] = [
        (format!("final bias {}", table.target_name), rows.iter().map(|r| r.final_bias).collect()),
        ("cooling factor".into(), rows.iter().map(|r| r.cooling_factor).collect()),
        ("bypass margin".into(), rows.iter().map(|r| r.bypass_margin).collect()),
        ("final entropy (bits)".into(), rows.iter().map(|r| r.entropy_final_bits).collect()),
    ];
    let xs: Vec<f64> = rows.iter().map(|r| r.axis_value).collect();
    let width = MARGIN_L + PANEL_W + 30.0;
    let height = MARGIN_T + series.len() as f64 * (PANEL_H + GAP) + 20.0;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (xmin, xmax) = range(&xs);
    for (k, (label, ys)) in series.iter().enumerate() {
        let top = MARGIN_T + k as f64 * (PANEL_H + GAP);
        let (ymin, ymax) = range(ys);
        let px = |x: f64| MARGIN_L + (x - xmin) / (xmax - xmin) * PANEL_W;
        let py = |y: f64| top + PANEL_H - (y - ymin) / (ymax - ymin) * PANEL_H;
        let _ = writeln!(
            out,
            r##"<rect x="{MARGIN_L}" y="{top}" width="{PANEL_W}" height="{PANEL_H}" fill="none" stroke="#888"/>"##
        );
        let _ = writeln!(out, r#"<text x="{MARGIN_L}" y="{}">{}</text>"#, top - 6.0, escape(label));
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, MARGIN_L - 4.0, top + 10.0, tick(ymax));
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, MARGIN_L - 4.0, top + PANEL_H, tick(ymin));
        let _ = writeln!(out, r#"<text x="{MARGIN_L}" y="{}">{}</text>"#, top + PANEL_H + 14.0, tick(xmin));
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            MARGIN_L + PANEL_W,
            top + PANEL_H + 14.0,
            tick(xmax)
        );
        let points: Vec<String> = xs.iter().zip(ys).map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(
            out,
            r##"<polyline fill="none" stroke="#1f5fa8" stroke-width="1.5" points="{}"/>"##,
            points.join(" ")
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        MARGIN_L + PANEL_W / 2.0,
        height - 6.0,
        escape(&table.axis)
    );
    out.push_str("</svg>\n");
    out
}

/// Finite plotting range, widened when degenerate.
fn range(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
        let pad = lo.abs().max(1.0) * 1e-3;
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-3 || v.abs() >= 1e4) {
        format!("{v:.3e}")
    } else {
        format!("{v:.4}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Writes `contents` to a temporary sibling and renames it over `path`.
pub fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "path has no file name"))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path).inspect_err(|_| {
        let _ = std::fs::remove_file(&tmp);
    })
}
