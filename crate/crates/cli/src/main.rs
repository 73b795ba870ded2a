use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hbac_core::output::{sweep_csv, sweep_svg, trace_csv, write_atomic};
use hbac_core::relaxation::{t1_change_report, t1_ratio_report};
use hbac_core::seqlang::{format_float, has_errors, validate, Severity};
use hbac_core::state::shannon_qubit_bound;
use hbac_core::{
    canonical_ac_schedule, execute, format_sequence, optimize_waits, parse_sequence, presets, sweep, trace_metrics,
    Error, Metrics, OptimizationProblem, Sequence, SystemConfig, WaitPolicy,
};

#[derive(Parser)]
#[command(name = "hbac", version, about = "Heat-bath algorithmic cooling simulator for NMR spin systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sequence and print the cooling metrics of the target qubit.
    Simulate {
        #[command(flatten)]
        source: Source,
        /// `.acs` sequence file
        sequence: PathBuf,
        #[command(flatten)]
        target: TargetArg,
        /// Write the per-step trace as CSV
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Choose auto wait durations that maximize the target's final bias.
    Optimize {
        #[command(flatten)]
        source: Source,
        /// `.acs` sequence file with at least one `wait auto <label>`
        sequence: PathBuf,
        #[command(flatten)]
        target: TargetArg,
        /// Where to write the resolved sequence
        #[arg(long)]
        out: PathBuf,
        /// Upper bound for every wait, seconds (default 10 × the longest T1)
        #[arg(long)]
        max_wait: Option<f64>,
        /// Extra random starting points
        #[arg(long, default_value_t = 0)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the trace of the optimized run as CSV
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Rerun a sequence over a list of parameter values.
    Sweep {
        #[command(flatten)]
        source: Source,
        /// `.acs` sequence file
        sequence: PathBuf,
        #[command(flatten)]
        target: TargetArg,
        /// `qubits[<name|index>].t1|t2|eq_bias`, `gate_duration`, `t2_budget_fraction` or `waits.<label>`
        #[arg(long)]
        axis: String,
        /// Comma-separated axis values
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        values: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
        /// Also draw the table as an SVG plot
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Qubits needed to store the target's entropy at a given bias.
    Bound {
        /// Number of target qubits
        #[arg(long)]
        nj: u64,
        /// Initial bias of the raw qubits
        #[arg(long, allow_negative_numbers = true)]
        eps: f64,
    },
    /// T1 ratios to the reset qubit, optionally compared against a baseline.
    Report {
        #[command(flatten)]
        source: Source,
        /// Preset name or config path to compare against
        #[arg(long)]
        baseline: Option<String>,
    },
    /// Print the two-thermalization cooling schedule for a system.
    Schedule {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        target: TargetArg,
        /// Fixed wait in seconds (default 3 × T1 of the reset qubit)
        #[arg(long, conflicts_with = "auto")]
        wait: Option<f64>,
        /// Emit `wait auto` placeholders instead of fixed waits
        #[arg(long)]
        auto: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// JSON system description
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in system: tce-unsalted or tce-salted
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Args)]
struct TargetArg {
    /// Qubit to cool, by name or index (default: first computation qubit)
    #[arg(long)]
    target: Option<String>,
}

/// Exit 2 for bad input, 3 when a well-formed run fails.
enum Failure {
    Input(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Runtime(_) => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidState(_) | Error::Capacity(_) | Error::Temperature(_) | Error::Optimization(_) => {
                Failure::Runtime(e.to_string())
            }
            _ => Failure::Input(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn num(x: f64) -> String {
    format!("{} ({x:e})", format_float(x))
}

fn load_source(source: &Source) -> CliResult<SystemConfig> {
    let config = match (&source.config, &source.preset) {
        (Some(path), _) => SystemConfig::load(path)?,
        (None, Some(name)) => presets::by_name(name).ok_or_else(|| {
            Failure::Input(format!("unknown preset `{name}` (expected one of {})", presets::NAMES.join(", ")))
        })?,
        (None, None) => unreachable!("clap requires a source"),
    };
    for w in config.validate()? {
        eprintln!("warning: {w}");
    }
    Ok(config)
}

fn load_sequence(path: &Path, config: &SystemConfig) -> CliResult<Sequence> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let seq = parse_sequence(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let diags = validate(&seq, config);
    for d in &diags {
        let tag = match d.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        eprintln!("{tag}: {}:{}: {}", path.display(), d.line, d.message);
    }
    if has_errors(&diags) {
        return Err(Failure::Input(format!("{}: sequence does not fit the system", path.display())));
    }
    Ok(seq)
}

fn resolve_target(arg: &TargetArg, config: &SystemConfig) -> CliResult<usize> {
    match &arg.target {
        Some(key) => config.qubit_index(key).ok_or_else(|| Failure::Input(format!("unknown target qubit `{key}`"))),
        None => config
            .computation_qubits()
            .first()
            .copied()
            .ok_or_else(|| Failure::Input("system has no computation qubit".into())),
    }
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    write_atomic(path, contents.as_bytes()).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn metrics_summary(m: &Metrics, config: &SystemConfig, total_time: f64) -> String {
    let name = &config.qubits[m.target].name;
    let mut s = String::new();
    writeln!(s, "target: {name}").unwrap();
    writeln!(s, "final_bias_{name}: {}", num(m.final_bias)).unwrap();
    writeln!(s, "equilibrium_bias: {}", num(m.equilibrium_bias)).unwrap();
    writeln!(s, "cooling_factor: {}", num(m.cooling_factor)).unwrap();
    writeln!(s, "bound_initial: {}", num(m.bound_initial)).unwrap();
    writeln!(s, "bypass_margin: {}", num(m.bypass_margin)).unwrap();
    writeln!(s, "entropy_initial_bits: {}", num(m.entropy_initial)).unwrap();
    writeln!(s, "entropy_final_bits: {}", num(m.entropy_final)).unwrap();
    writeln!(s, "total_time_s: {}", num(total_time)).unwrap();
    if let Some(t) = m.effective_temperature {
        writeln!(s, "effective_temperature_k: {}", num(t)).unwrap();
    }
    s
}

fn run(cli: Cli) -> CliResult<String> {
    match cli.command {
        Command::Simulate { source, sequence, target, trace_out } => {
            let config = load_source(&source)?;
            let seq = load_sequence(&sequence, &config)?;
            let target = resolve_target(&target, &config)?;
            let trace = execute(&seq, &config, None)?;
            for w in &trace.warnings {
                eprintln!("warning: {w}");
            }
            let metrics = trace_metrics(&trace, &config, target)?;
            if let Some(path) = trace_out {
                write_file(&path, &trace_csv(&trace, &config)?)?;
            }
            Ok(metrics_summary(&metrics, &config, trace.final_step().time_after))
        }
        Command::Optimize { source, sequence, target, out, max_wait, restarts, seed, trace_out } => {
            let config = load_source(&source)?;
            let seq = load_sequence(&sequence, &config)?;
            let target = resolve_target(&target, &config)?;
            let labels: Vec<String> = seq.free_waits().into_iter().map(String::from).collect();
            if labels.is_empty() {
                return Err(Failure::Input(format!(
                    "{}: no `wait auto <label>` to optimize",
                    sequence.display()
                )));
            }
            let mut problem = OptimizationProblem::new(seq.clone(), config.clone(), target)?;
            if let Some(hi) = max_wait {
                problem = problem.with_max_wait(hi);
            }
            problem.restarts = restarts;
            problem.seed = seed;
            let result = optimize_waits(&problem)?;
            let resolved = seq.with_durations(&result.durations);
            write_file(&out, &format_sequence(&resolved))?;
            if let Some(path) = trace_out {
                let trace = execute(&resolved, &config, None)?;
                write_file(&path, &trace_csv(&trace, &config)?)?;
            }
            let mut s = String::new();
            for (label, d) in labels.iter().zip(&result.durations) {
                writeln!(s, "wait {label}: {}", num(*d)).unwrap();
            }
            writeln!(s, "objective_{}: {}", config.qubits[target].name, num(result.objective)).unwrap();
            writeln!(s, "evaluations: {}", result.evaluations).unwrap();
            writeln!(s, "cycles: {}", result.cycles).unwrap();
            Ok(s)
        }
        Command::Sweep { source, sequence, target, axis, values, out, svg } => {
            let config = load_source(&source)?;
            let seq = load_sequence(&sequence, &config)?;
            let target = resolve_target(&target, &config)?;
            if values.is_empty() {
                return Err(Failure::Input("--values needs at least one number".into()));
            }
            let table = sweep(&config, &axis, &values, &seq, target)?;
            write_file(&out, &sweep_csv(&table)?)?;
            if let Some(path) = svg {
                write_file(&path, &sweep_svg(&table))?;
            }
            let mut s = String::new();
            writeln!(s, "{} rows over {axis}", table.rows.len()).unwrap();
            for row in &table.rows {
                writeln!(s, "{}: final_bias_{} {}", format_float(row.axis_value), table.target_name, num(row.metrics.final_bias))
                    .unwrap();
            }
            Ok(s)
        }
        Command::Bound { nj, eps } => {
            let b = shannon_qubit_bound(nj, eps)?;
            Ok(format!("qubits_needed: {b:.3} ({b:.4e})\n"))
        }
        Command::Report { source, baseline } => {
            let config = load_source(&source)?;
            let reset = *config.reset_qubits.first().ok_or_else(|| Failure::Input("system has no reset qubit".into()))?;
            let mut s = String::new();
            writeln!(s, "reset qubit: {} (T1 {} s)", config.qubits[reset].name, format_float(config.qubits[reset].t1)).unwrap();
            for r in t1_ratio_report(&config.qubits, reset)? {
                if r.name != config.qubits[reset].name {
                    writeln!(s, "{}: T1 {} s, ratio {:.2}", r.name, format_float(r.t1), r.ratio).unwrap();
                }
            }
            if let Some(base) = baseline {
                let before = match presets::by_name(&base) {
                    Some(c) => c,
                    None => SystemConfig::load(Path::new(&base))?,
                };
                writeln!(s, "change from {base}:").unwrap();
                for c in t1_change_report(&before.qubits, &config.qubits, reset)? {
                    writeln!(s, "{}: T1 -{:.1}%", c.name, c.t1_decrease_pct).unwrap();
                    if c.name != config.qubits[reset].name {
                        writeln!(s, "{}: ratio +{:.1}%", c.name, c.ratio_increase_pct).unwrap();
                    }
                }
            }
            Ok(s)
        }
        Command::Schedule { source, target, wait, auto, out } => {
            let config = load_source(&source)?;
            let target = resolve_target(&target, &config)?;
            let policy = match (auto, wait) {
                (true, _) => WaitPolicy::Auto,
                (false, Some(w)) => WaitPolicy::Fixed(w),
                (false, None) => WaitPolicy::default_fixed(&config)
                    .ok_or_else(|| Failure::Input("no reset qubit to derive a default wait from".into()))?,
            };
            let text = format_sequence(&canonical_ac_schedule(&config, target, &policy)?);
            match out {
                Some(path) => {
                    write_file(&path, &text)?;
                    Ok(String::new())
                }
                None => Ok(text),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            let (Failure::Input(msg) | Failure::Runtime(msg)) = &f;
            eprintln!("error: {msg}");
            ExitCode::from(f.code())
        }
    }
}
