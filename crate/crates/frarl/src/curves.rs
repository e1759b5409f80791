//! Learning curves: smoothed per-iteration metrics, mean ± std across seeds.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use frarl_core::train::MetricsRow;

use crate::io::{write_string, FormatError};

pub const CURVE_HEADER: &str = "step,mean,std,seeds";
pub const DEFAULT_WINDOW: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    Reward,
    Violations,
}

impl Metric {
    pub const ALL: [Metric; 2] = [Metric::Reward, Metric::Violations];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Reward => "reward",
            Metric::Violations => "violations",
        }
    }

    fn value(self, row: &MetricsRow) -> f64 {
        match self {
            Metric::Reward => row.mean_reward,
            Metric::Violations => row.violation_steps as f64,
        }
    }
}

/// Trailing moving average over the last `window` values. NaN entries
/// (iterations in which no episode finished) are skipped; a window with no
/// finite value stays NaN. `window <= 1` returns the input.
pub fn smooth(values: &[f64], window: usize) -> Vec<f64> {
    if window <= 1 {
        return values.to_vec();
    }
    (0..values.len())
        .map(|i| {
            let w = &values[(i + 1).saturating_sub(window)..=i];
            let (sum, n) = w.iter().filter(|v| !v.is_nan()).fold((0.0, 0), |(s, n), v| (s + v, n + 1));
            if n == 0 { f64::NAN } else { sum / n as f64 }
        })
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Curve {
    pub step: Vec<u64>,
    pub mean: Vec<f64>,
    /// Population standard deviation across seeds.
    pub std: Vec<f64>,
    pub seeds: Vec<usize>,
}

/// Smooths each log, then aggregates across logs per step. Steps present in
/// only some logs (a run that stopped early) use the seeds that reached them.
pub fn learning_curve(logs: &[Vec<MetricsRow>], metric: Metric, window: usize) -> Curve {
    let mut buckets: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for log in logs {
        let raw: Vec<f64> = log.iter().map(|r| metric.value(r)).collect();
        for (row, v) in log.iter().zip(smooth(&raw, window)) {
            let bucket = buckets.entry(row.step).or_default();
            if !v.is_nan() {
                bucket.push(v);
            }
        }
    }
    let mut curve = Curve::default();
    for (step, vs) in buckets {
        let n = vs.len();
        let mean = vs.iter().sum::<f64>() / n as f64;
        let var = vs.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        curve.step.push(step);
        curve.mean.push(mean);
        curve.std.push(if n == 0 { f64::NAN } else { var.sqrt() });
        curve.seeds.push(n);
    }
    curve
}

pub fn format_curve(curve: &Curve) -> String {
    let mut out = format!("{CURVE_HEADER}\n");
    for i in 0..curve.step.len() {
        let _ = writeln!(out, "{},{},{},{}", curve.step[i], curve.mean[i], curve.std[i], curve.seeds[i]);
    }
    out
}

/// Writes `<out>/<group>-<metric>.csv` for every group and metric; returns the
/// written paths.
pub fn emit_learning_curves(
    groups: &[(String, Vec<Vec<MetricsRow>>)],
    window: usize,
    out: &Path,
) -> Result<Vec<PathBuf>, FormatError> {
    let mut written = Vec::new();
    for (name, logs) in groups {
        for metric in Metric::ALL {
            let path = out.join(format!("{name}-{}.csv", metric.as_str()));
            write_string(&path, &format_curve(&learning_curve(logs, metric, window)))?;
            written.push(path);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use frarl_core::train::Phase;

    fn log(rewards: &[f64]) -> Vec<MetricsRow> {
        rewards
            .iter()
            .enumerate()
            .map(|(i, &r)| MetricsRow {
                iteration: i as u64 + 1,
                step: (i as u64 + 1) * 100,
                phase: Phase::Warmup,
                episodes: 1,
                mean_reward: r,
                collisions: 0,
                reverses: 0,
                violation_steps: i,
            })
            .collect()
    }

    #[test]
    fn one_seed_has_zero_std() {
        let c = learning_curve(&[log(&[1.0, -2.0, 0.5])], Metric::Reward, 2);
        assert!(c.std.iter().all(|s| *s == 0.0));
        assert_eq!(c.mean, vec![1.0, -0.5, -0.75]);
    }

    #[test]
    fn window_one_passes_values_through() {
        let raw = [0.3, -1.0, 7.0, 2.5];
        assert_eq!(smooth(&raw, 1), raw.to_vec());
        let c = learning_curve(&[log(&raw)], Metric::Reward, 1);
        assert_eq!(c.mean, raw.to_vec());
        assert_eq!(learning_curve(&[log(&raw)], Metric::Violations, 1).mean, vec![0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn constant_logs_average() {
        let c = learning_curve(&[log(&[0.0; 5]), log(&[1.0; 5])], Metric::Reward, 3);
        assert!(c.mean.iter().all(|m| *m == 0.5));
        assert!(c.std.iter().all(|s| *s == 0.5));
        assert!(c.seeds.iter().all(|n| *n == 2));
    }

    #[test]
    fn nan_iterations_are_skipped_and_short_logs_drop_out() {
        let s = smooth(&[f64::NAN, 2.0, f64::NAN, f64::NAN], 2);
        assert!(s[0].is_nan() && s[3].is_nan());
        assert_eq!(&s[1..3], &[2.0, 2.0]);
        let c = learning_curve(&[log(&[1.0, 1.0, 1.0]), log(&[3.0])], Metric::Reward, 1);
        assert_eq!(c.seeds, vec![2, 1, 1]);
        assert_eq!(c.mean, vec![2.0, 1.0, 1.0]);
    }

    #[test]
    fn files_per_group_and_metric() {
        let tmp = tempfile::tempdir().unwrap();
        let paths = emit_learning_curves(&[("ppo".into(), vec![log(&[1.0, 2.0])])], 10, tmp.path()).unwrap();
        let names: Vec<_> = paths.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect();
        assert_eq!(names, ["ppo-reward.csv", "ppo-violations.csv"]);
        let text = std::fs::read_to_string(&paths[0]).unwrap();
        assert_eq!(text, "step,mean,std,seeds\n100,1,0,1\n200,1.5,0,1\n");
    }
}
