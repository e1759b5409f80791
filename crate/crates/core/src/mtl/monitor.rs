use thiserror::Error;

use super::formula::{Formula, Interval};
use super::trace::Trace;
use super::value::Robustness;

#[derive(Clone, Copy, Debug, Error, PartialEq)]
pub enum MonitorError {
    #[error("step {step} is outside a trace of {len} samples")]
    StepOutOfRange { step: usize, len: usize },
    #[error("interval starting at step {start} lies beyond the trace end (step {last})")]
    InsufficientHorizon { start: usize, last: usize },
    #[error("interval {0} contains no sample step")]
    EmptyInterval(Interval),
}

/// Closed step window `[t + lo, min(t + hi, last)]` of `interval` anchored at `t`.
fn window(interval: &Interval, tr: &Trace, t: usize) -> Result<(usize, usize), MonitorError> {
    let last = tr.len() - 1;
    let (lo, hi) = interval.steps(tr.dt()).ok_or(MonitorError::EmptyInterval(*interval))?;
    let start = t.saturating_add(lo);
    if start > last {
        return Err(MonitorError::InsufficientHorizon { start, last });
    }
    let end = hi.map_or(last, |h| t.saturating_add(h).min(last));
    Ok((start, end))
}

fn check_step(tr: &Trace, t: usize) -> Result<(), MonitorError> {
    if t >= tr.len() {
        Err(MonitorError::StepOutOfRange { step: t, len: tr.len() })
    } else {
        Ok(())
    }
}

/// Quantitative robustness of `tr` against `f` at step `t`.
///
/// Suprema and infima over time become max/min over the sample steps of the
/// quantized interval. For `a U_I b` the inner infimum of `a` ranges over
/// steps strictly between `t` and the witness step.
pub fn robustness(f: &Formula, tr: &Trace, t: usize) -> Result<Robustness, MonitorError> {
    check_step(tr, t)?;
    eval_rob(f, tr, t)
}

fn eval_rob(f: &Formula, tr: &Trace, t: usize) -> Result<Robustness, MonitorError> {
    Ok(match f {
        Formula::True => Robustness::Infinity,
        Formula::Atom(p) => Robustness::Finite(p.distance(&tr.records()[t])),
        Formula::Not(g) => -eval_rob(g, tr, t)?,
        Formula::Or(a, b) => eval_rob(a, tr, t)?.max(eval_rob(b, tr, t)?),
        Formula::And(a, b) => eval_rob(a, tr, t)?.min(eval_rob(b, tr, t)?),
        Formula::Until(i, a, b) => {
            let (start, end) = window(i, tr, t)?;
            let mut best = Robustness::NegInfinity;
            // min of `a` over (t, tp)
            let mut prefix = Robustness::Infinity;
            for tp in t..=end {
                if tp >= start {
                    best = best.max(eval_rob(b, tr, tp)?.min(prefix));
                }
                if tp > t && tp < end {
                    prefix = prefix.min(eval_rob(a, tr, tp)?);
                }
            }
            best
        }
        Formula::Eventually(i, g) => {
            let (start, end) = window(i, tr, t)?;
            let mut best = Robustness::NegInfinity;
            for tp in start..=end {
                best = best.max(eval_rob(g, tr, tp)?);
            }
            best
        }
        Formula::GloballyWithin(i, g) => {
            let (start, end) = window(i, tr, t)?;
            let mut worst = Robustness::Infinity;
            for tp in start..=end {
                worst = worst.min(eval_rob(g, tr, tp)?);
            }
            worst
        }
        Formula::Globally(g) => {
            let mut worst = Robustness::Infinity;
            for tp in t..tr.len() {
                worst = worst.min(eval_rob(g, tr, tp)?);
            }
            worst
        }
    })
}

/// Classical Boolean satisfaction of `f` by `tr` at step `t`, using the same
/// step quantization as [`robustness`].
pub fn boolean_sat(f: &Formula, tr: &Trace, t: usize) -> Result<bool, MonitorError> {
    check_step(tr, t)?;
    eval_sat(f, tr, t)
}

fn eval_sat(f: &Formula, tr: &Trace, t: usize) -> Result<bool, MonitorError> {
    Ok(match f {
        Formula::True => true,
        Formula::Atom(p) => p.holds(&tr.records()[t]),
        Formula::Not(g) => !eval_sat(g, tr, t)?,
        Formula::Or(a, b) => {
            let left = eval_sat(a, tr, t)?;
            let right = eval_sat(b, tr, t)?;
            left || right
        }
        Formula::And(a, b) => {
            let left = eval_sat(a, tr, t)?;
            let right = eval_sat(b, tr, t)?;
            left && right
        }
        Formula::Until(i, a, b) => {
            let (start, end) = window(i, tr, t)?;
            let mut found = false;
            let mut a_held = true;
            for tp in t..=end {
                if tp >= start {
                    // Evaluate `b` even when the prefix already failed so both
                    // monitors report the same errors.
                    let witness = eval_sat(b, tr, tp)?;
                    found |= a_held && witness;
                }
                if tp > t && tp < end {
                    a_held &= eval_sat(a, tr, tp)?;
                }
            }
            found
        }
        Formula::Eventually(i, g) => {
            let (start, end) = window(i, tr, t)?;
            let mut found = false;
            for tp in start..=end {
                found |= eval_sat(g, tr, tp)?;
            }
            found
        }
        Formula::GloballyWithin(i, g) => {
            let (start, end) = window(i, tr, t)?;
            let mut all = true;
            for tp in start..=end {
                all &= eval_sat(g, tr, tp)?;
            }
            all
        }
        Formula::Globally(g) => {
            let mut all = true;
            for tp in t..tr.len() {
                all &= eval_sat(g, tr, tp)?;
            }
            all
        }
    })
}
