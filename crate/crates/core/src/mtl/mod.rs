//! Metric temporal logic over discrete-time traces.
//!
//! Formulas are evaluated on traces sampled at a fixed `dt`. Temporal
//! intervals are written in seconds and quantized to closed step ranges by
//! rounding inward, so `[0.1, 0.5]` at `dt = 0.04` covers steps `3..=12`.

mod formula;
mod monitor;
mod parser;
mod predicate;
mod trace;
mod value;

pub use formula::{Formula, Interval, IntervalError};
pub use monitor::{boolean_sat, robustness, MonitorError};
pub use parser::{parse_formula, ParseError};
pub use predicate::{Predicate, PredicateSet, Relation};
pub use trace::{Record, Signal, Trace, TraceError};
pub use value::Robustness;
