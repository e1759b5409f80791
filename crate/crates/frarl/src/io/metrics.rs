//! Comma-separated logs with a header row: training metrics, falsifier
//! calls during training, and per-episode evaluation outcomes.

use std::path::Path;

use frarl_core::eval::EpisodeSummary;
use frarl_core::mtl::Robustness;
use frarl_core::sim::Termination;
use frarl_core::train::{FalsificationEvent, MetricsRow, Phase};

use super::{read_to_string, FormatError};

pub const METRICS_HEADER: &str = "iteration,step,phase,episodes,mean_reward,collisions,reverses,violation_steps";
pub const FALSIFICATION_HEADER: &str = "iteration,step,simulations,best_robustness,falsified,added,first_falsified_at,error";
pub const EPISODES_HEADER: &str = "index,termination,steps,reward,violation_steps";

pub fn format_metrics_row(r: &MetricsRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        r.iteration, r.step, r.phase, r.episodes, r.mean_reward, r.collisions, r.reverses, r.violation_steps
    )
}

fn fields(line: &str, n: usize, lineno: usize) -> Result<Vec<&str>, FormatError> {
    let f: Vec<&str> = line.splitn(n, ',').collect();
    if f.len() != n {
        return Err(FormatError::at(lineno, format!("expected {n} fields, found {}", f.len())));
    }
    Ok(f)
}

fn parse<T: std::str::FromStr>(s: &str, lineno: usize, column: &str) -> Result<T, FormatError> {
    s.trim().parse::<T>().map_err(|_| FormatError::at_column(lineno, column, format!("cannot parse {s:?}")))
}

fn parse_phase(s: &str, lineno: usize) -> Result<Phase, FormatError> {
    match s {
        "warmup" => Ok(Phase::Warmup),
        "protagonist" => Ok(Phase::Protagonist),
        "adversary" => Ok(Phase::Adversary),
        _ => Err(FormatError::at_column(lineno, "phase", format!("unknown phase {s:?}"))),
    }
}

fn check_header(text: &str, header: &str) -> Result<(), FormatError> {
    match text.lines().next() {
        Some(h) if h.trim() == header => Ok(()),
        Some(h) => Err(FormatError::at(1, format!("expected header {header:?}, found {h:?}"))),
        None => Err(FormatError::at(1, "missing header")),
    }
}

pub fn parse_metrics(text: &str) -> Result<Vec<MetricsRow>, FormatError> {
    check_header(text, METRICS_HEADER)?;
    let cols: Vec<&str> = METRICS_HEADER.split(',').collect();
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        let n = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let f = fields(line, cols.len(), n)?;
        rows.push(MetricsRow {
            iteration: parse(f[0], n, cols[0])?,
            step: parse(f[1], n, cols[1])?,
            phase: parse_phase(f[2], n)?,
            episodes: parse(f[3], n, cols[3])?,
            mean_reward: parse(f[4], n, cols[4])?,
            collisions: parse(f[5], n, cols[5])?,
            reverses: parse(f[6], n, cols[6])?,
            violation_steps: parse(f[7], n, cols[7])?,
        });
    }
    Ok(rows)
}

pub fn read_metrics(path: &Path) -> Result<Vec<MetricsRow>, FormatError> {
    parse_metrics(&read_to_string(path)?).map_err(|e| e.in_file(path))
}

pub fn format_falsification_event(e: &FalsificationEvent) -> String {
    let error = e.error.as_deref().unwrap_or("").replace(['\n', ','], ";");
    format!(
        "{},{},{},{},{},{},{},{}",
        e.iteration,
        e.step,
        e.simulations,
        e.best_robustness.to_f64(),
        e.falsified,
        e.added,
        e.first_falsified_at.map_or(String::new(), |x| x.to_string()),
        error
    )
}

pub fn parse_falsification_log(text: &str) -> Result<Vec<FalsificationEvent>, FormatError> {
    check_header(text, FALSIFICATION_HEADER)?;
    let cols: Vec<&str> = FALSIFICATION_HEADER.split(',').collect();
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        let n = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let f = fields(line, cols.len(), n)?;
        out.push(FalsificationEvent {
            iteration: parse(f[0], n, cols[0])?,
            step: parse(f[1], n, cols[1])?,
            simulations: parse(f[2], n, cols[2])?,
            best_robustness: Robustness::from(parse::<f64>(f[3], n, cols[3])?),
            falsified: parse(f[4], n, cols[4])?,
            added: parse(f[5], n, cols[5])?,
            first_falsified_at: if f[6].is_empty() { None } else { Some(parse(f[6], n, cols[6])?) },
            error: (!f[7].is_empty()).then(|| f[7].to_string()),
        });
    }
    Ok(out)
}

pub fn format_episodes(episodes: &[EpisodeSummary]) -> String {
    let mut out = format!("{EPISODES_HEADER}\n");
    for (i, e) in episodes.iter().enumerate() {
        out.push_str(&format!("{},{},{},{},{}\n", i, e.termination, e.steps, e.reward, e.violation_steps));
    }
    out
}

fn parse_termination(s: &str, lineno: usize) -> Result<Termination, FormatError> {
    [Termination::None, Termination::LaneEnd, Termination::MaxSteps, Termination::Collision, Termination::Reverse]
        .into_iter()
        .find(|t| t.as_str() == s)
        .ok_or_else(|| FormatError::at_column(lineno, "termination", format!("unknown termination {s:?}")))
}

pub fn parse_episodes(text: &str) -> Result<Vec<EpisodeSummary>, FormatError> {
    check_header(text, EPISODES_HEADER)?;
    let cols: Vec<&str> = EPISODES_HEADER.split(',').collect();
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        let n = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let f = fields(line, cols.len(), n)?;
        out.push(EpisodeSummary {
            termination: parse_termination(f[1], n)?,
            steps: parse(f[2], n, cols[2])?,
            reward: parse(f[3], n, cols[3])?,
            violation_steps: parse(f[4], n, cols[4])?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metrics_round_trip() {
        let rows = vec![
            MetricsRow { iteration: 1, step: 2048, phase: Phase::Warmup, episodes: 4, mean_reward: -0.25, collisions: 1, reverses: 0, violation_steps: 17 },
            MetricsRow { iteration: 2, step: 4096, phase: Phase::Adversary, episodes: 0, mean_reward: f64::NAN, collisions: 0, reverses: 0, violation_steps: 0 },
        ];
        let mut text = format!("{METRICS_HEADER}\n");
        for r in &rows {
            text.push_str(&format_metrics_row(r));
            text.push('\n');
        }
        let back = parse_metrics(&text).unwrap();
        assert_eq!(back[0], rows[0]);
        assert!(back[1].mean_reward.is_nan());
        assert_eq!(back[1].phase, Phase::Adversary);
    }

    #[test]
    fn falsification_log_round_trip() {
        let e = FalsificationEvent {
            iteration: 50,
            step: 102400,
            simulations: 1000,
            best_robustness: Robustness::Finite(-0.0075),
            falsified: 10,
            added: 10,
            first_falsified_at: Some(37),
            error: None,
        };
        let failed = FalsificationEvent { error: Some("boom, twice".into()), first_falsified_at: None, ..e.clone() };
        let text = format!("{FALSIFICATION_HEADER}\n{}\n{}\n", format_falsification_event(&e), format_falsification_event(&failed));
        let back = parse_falsification_log(&text).unwrap();
        assert_eq!(back[0], e);
        assert_eq!(back[1].error.as_deref(), Some("boom; twice"));
    }

    #[test]
    fn episodes_round_trip() {
        let eps = vec![
            EpisodeSummary { termination: Termination::Collision, steps: 120, reward: -1.0, violation_steps: 30 },
            EpisodeSummary { termination: Termination::MaxSteps, steps: 500, reward: 0.0, violation_steps: 0 },
        ];
        assert_eq!(parse_episodes(&format_episodes(&eps)).unwrap(), eps);
    }

    #[test]
    fn bad_rows_are_located() {
        let text = format!("{METRICS_HEADER}\n1,2048,warmup,4,x,0,0,0\n");
        let err = parse_metrics(&text).unwrap_err().to_string();
        assert!(err.contains("line 2") && err.contains("mean_reward"), "{err}");
        assert!(parse_metrics("step,reward\n").is_err());
    }
}
