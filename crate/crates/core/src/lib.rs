//! Heat-bath algorithmic cooling of nuclear spins on diagonal states.
//!
//! The building blocks are a diagonal `n`-qubit state ([`state`]),
//! entropy-preserving permutation gates ([`gates`]), independent T1
//! thermalization ([`relaxation`]), a small sequence language
//! ([`seqlang`]), an executor that interleaves gates with relaxation
//! ([`engine`]) and a wait-time optimizer ([`optimizer`]).

pub mod config;
pub mod engine;
pub mod error;
pub mod gates;
pub mod optimizer;
pub mod output;
pub mod relaxation;
pub mod seqlang;
pub mod state;

pub use config::{presets, BiasUnit, SystemConfig};
pub use engine::{canonical_ac_schedule, execute, sweep, trace_metrics, Metrics, SweepTable, Trace, WaitPolicy};
pub use error::{Error, Result};
pub use optimizer::{optimize_waits, OptimizationProblem, OptimizationResult};
pub use seqlang::{format_sequence, parse_sequence, Sequence};
pub use state::{Bias, DiagonalState, QubitSpec};
