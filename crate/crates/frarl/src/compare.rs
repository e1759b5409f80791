//! Cross-method comparison tables.
//!
//! Rows are training methods; columns are `task / test set / metric` for the
//! reverse and collision rates. Every rate is the fraction of episodes that
//! ended in that event, averaged over the seeds of a method. Reference values
//! for full-budget runs on recorded HighD traffic (10 seeds, 28 037
//! scenarios):
//!
//! | BA, dataset test | PPO   | RARL  | FRARL  |
//! |------------------|-------|-------|--------|
//! | collision        | 4.59% | 2.70% | 0.015% |
//!
//! and FRARL reaches zero reverse and collision episodes on the ACC random
//! test set. Desk-scale runs on synthetic data are not expected to match
//! these numbers, only their ordering.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use frarl_core::eval::{evaluate_episodes, summarize, EpisodeSummary, EvalError, EvalRow};
use frarl_core::policy::PolicyController;
use frarl_core::sim::{Scenario, Task};
use frarl_core::train::{Method, TrainConfig};

use crate::io::checkpoint::Checkpoint;
use crate::io::FormatError;
use crate::parallel::par_map;
use crate::run::RunDir;

pub const REPORT_HEADER: &str = "method,task,set,seeds,scenarios,reverse_rate,collision_rate,mean_reward,violation_steps";

#[derive(Debug, Error)]
pub enum CompareError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("{}: set `{set}`: {source}", run.display())]
    Eval { run: PathBuf, set: String, source: EvalError },
    #[error("no runs to compare")]
    NoRuns,
    #[error("no test sets to evaluate on")]
    NoSets,
}

/// A finished training run: its configuration and final checkpoint.
#[derive(Clone, Debug)]
pub struct Run {
    pub dir: PathBuf,
    pub config: TrainConfig,
    pub checkpoint: Checkpoint,
}

impl Run {
    pub fn load(dir: &Path) -> Result<Run, FormatError> {
        let rd = RunDir::new(dir);
        Ok(Run { dir: dir.to_path_buf(), config: rd.read_config()?, checkpoint: rd.read_checkpoint()? })
    }

    pub fn method(&self) -> Method {
        self.config.method
    }

    pub fn task(&self) -> Task {
        self.config.task
    }

    /// Deterministic per-episode outcomes of the final protagonist.
    pub fn evaluate(&self, scenarios: &[Scenario]) -> Result<Vec<EpisodeSummary>, EvalError> {
        let policy = &self.checkpoint.state.protagonist.params;
        evaluate_episodes(&mut PolicyController(policy), scenarios, self.task(), &self.config.sim)
    }
}

#[derive(Clone, Debug)]
pub struct TestSet {
    pub name: String,
    pub scenarios: Vec<Scenario>,
}

/// One method × task × set entry, averaged over seeds.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub method: Method,
    pub task: Task,
    pub set: String,
    pub seeds: usize,
    pub scenarios: usize,
    pub reverse_rate: f64,
    pub collision_rate: f64,
    pub mean_reward: f64,
    /// Total safe-distance-violation steps over the set, averaged over seeds.
    pub violation_steps: f64,
}

/// Episodes of one run on one set.
#[derive(Clone, Debug)]
pub struct RunEvaluation {
    pub run: PathBuf,
    pub method: Method,
    pub task: Task,
    pub seed: u64,
    pub set: String,
    pub episodes: Vec<EpisodeSummary>,
    pub row: EvalRow,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub methods: Vec<Method>,
    pub tasks: Vec<Task>,
    pub sets: Vec<String>,
    pub cells: Vec<Cell>,
    /// Method × task combinations with no run.
    pub missing: Vec<(Method, Task)>,
    pub evaluations: Vec<RunEvaluation>,
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    sum / n as f64
}

/// Evaluates every run on every set and averages over seeds.
pub fn compare_methods(runs: &[Run], sets: &[TestSet]) -> Result<Report, CompareError> {
    if runs.is_empty() {
        return Err(CompareError::NoRuns);
    }
    if sets.is_empty() {
        return Err(CompareError::NoSets);
    }
    let jobs: Vec<(&Run, &TestSet)> = runs.iter().flat_map(|r| sets.iter().map(move |s| (r, s))).collect();
    let results = par_map(&jobs, |(run, set)| {
        let episodes = run.evaluate(&set.scenarios)?;
        let row = summarize(&episodes)?;
        Ok::<_, EvalError>(RunEvaluation {
            run: run.dir.clone(),
            method: run.method(),
            task: run.task(),
            seed: run.config.seed,
            set: set.name.clone(),
            episodes,
            row,
        })
    });
    let mut evaluations = Vec::with_capacity(results.len());
    for ((run, set), r) in jobs.iter().zip(results) {
        evaluations.push(r.map_err(|source| CompareError::Eval { run: run.dir.clone(), set: set.name.clone(), source })?);
    }

    let methods: Vec<Method> = Method::ALL.into_iter().filter(|m| runs.iter().any(|r| r.method() == *m)).collect();
    let tasks: Vec<Task> = [Task::Ba, Task::Acc].into_iter().filter(|t| runs.iter().any(|r| r.task() == *t)).collect();
    let mut cells = Vec::new();
    let mut missing = Vec::new();
    for &method in &methods {
        for &task in &tasks {
            if !runs.iter().any(|r| r.method() == method && r.task() == task) {
                missing.push((method, task));
                continue;
            }
            for set in sets {
                let rows: Vec<&EvalRow> = evaluations
                    .iter()
                    .filter(|e| e.method == method && e.task == task && e.set == set.name)
                    .map(|e| &e.row)
                    .collect();
                cells.push(Cell {
                    method,
                    task,
                    set: set.name.clone(),
                    seeds: rows.len(),
                    scenarios: set.scenarios.len(),
                    reverse_rate: mean(rows.iter().map(|r| r.reverse_rate)),
                    collision_rate: mean(rows.iter().map(|r| r.collision_rate)),
                    mean_reward: mean(rows.iter().map(|r| r.mean_reward)),
                    violation_steps: mean(rows.iter().map(|r| r.violation_steps as f64)),
                });
            }
        }
    }
    Ok(Report { methods, tasks, sets: sets.iter().map(|s| s.name.clone()).collect(), cells, missing, evaluations })
}

impl Report {
    pub fn cell(&self, method: Method, task: Task, set: &str) -> Option<&Cell> {
        self.cells.iter().find(|c| c.method == method && c.task == task && c.set == set)
    }

    /// Delimited export, one line per cell.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{REPORT_HEADER}\n");
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                c.method, c.task, c.set, c.seeds, c.scenarios, c.reverse_rate, c.collision_rate, c.mean_reward, c.violation_steps
            );
        }
        out
    }

    /// Plain-text table with the lowest value of each column in `**bold**`.
    pub fn render(&self) -> String {
        type Metric = fn(&Cell) -> f64;
        let metrics: [(&str, Metric); 2] = [("reverse", |c| c.reverse_rate), ("collision", |c| c.collision_rate)];
        let mut header = vec!["method".to_string()];
        let mut columns: Vec<Vec<Option<f64>>> = Vec::new();
        for &task in &self.tasks {
            for set in &self.sets {
                for (name, metric) in metrics {
                    header.push(format!("{task}/{set}/{name}"));
                    columns.push(self.methods.iter().map(|&m| self.cell(m, task, set).map(metric)).collect());
                }
            }
        }
        let mut grid: Vec<Vec<String>> = vec![header];
        for (i, m) in self.methods.iter().enumerate() {
            let mut line = vec![m.as_str().to_ascii_uppercase()];
            for col in &columns {
                let min = col.iter().flatten().copied().fold(f64::INFINITY, f64::min);
                line.push(match col[i] {
                    None => "missing".into(),
                    Some(v) if v == min => format!("**{:.3}%**", 100.0 * v),
                    Some(v) => format!("{:.3}%", 100.0 * v),
                });
            }
            grid.push(line);
        }
        let widths: Vec<usize> = (0..grid[0].len()).map(|j| grid.iter().map(|r| r[j].len()).max().unwrap_or(0)).collect();
        let mut out = String::new();
        for (k, row) in grid.iter().enumerate() {
            let cells: Vec<String> = row.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
            let _ = writeln!(out, "{}", cells.join("  ").trim_end());
            if k == 0 {
                let _ = writeln!(out, "{}", widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  "));
            }
        }
        let seeds: BTreeSet<String> = self.cells.iter().map(|c| format!("{}/{}: {} seed(s)", c.method, c.task, c.seeds)).collect();
        for s in seeds {
            let _ = writeln!(out, "{s}");
        }
        for (m, t) in &self.missing {
            let _ = writeln!(out, "missing: no {m} run for task {t}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use frarl_core::policy::PolicyParams;
    use frarl_core::seeded_rng;
    use frarl_core::sim::{generate_random_scenario, SimConfig};
    use frarl_core::train::Trainer;

    fn set(name: &str, seed: u64, n: usize) -> TestSet {
        let sim = SimConfig::default();
        let mut rng = seeded_rng(seed);
        TestSet { name: name.into(), scenarios: (0..n).map(|_| generate_random_scenario(&mut rng, &sim)).collect() }
    }

    fn run(method: Method, task: Task, seed: u64, params: PolicyParams) -> Run {
        let config = TrainConfig { method, task, seed, ..TrainConfig::default() };
        let mut state = Trainer::new(config.clone(), set("d", 0, 2).scenarios).unwrap().state().clone();
        state.protagonist.params = params;
        Run { dir: PathBuf::from(format!("{method}-{task}-{seed}")), config, checkpoint: Checkpoint { method, seed, state } }
    }

    fn braking() -> PolicyParams {
        // Zero weights with a strongly negative output bias: full braking.
        let mut p = PolicyParams::zeros(1.0);
        let bias = PolicyParams::tensors().into_iter().find(|t| t.name == "mean.bias").unwrap();
        p.values[bias.range.start] = -50.0;
        p
    }

    #[test]
    fn single_method_gives_single_row() {
        let runs = [run(Method::Ppo, Task::Ba, 1, PolicyParams::zeros(1.0))];
        let report = compare_methods(&runs, &[set("random", 5, 20)]).unwrap();
        let table = report.render();
        let body: Vec<&str> = table.lines().skip(2).filter(|l| l.starts_with("PPO") || l.starts_with("RARL") || l.starts_with("FRARL")).collect();
        assert_eq!(body.len(), 1);
        assert_eq!(report.cells.len(), 1);
        assert_eq!(report.to_csv().lines().count(), 2);
    }

    #[test]
    fn rates_average_over_seeds_and_minimum_is_bold() {
        let runs = [
            run(Method::Ppo, Task::Ba, 1, braking()),
            run(Method::Ppo, Task::Ba, 2, PolicyParams::zeros(1.0)),
            run(Method::Frarl, Task::Ba, 1, PolicyParams::zeros(1.0)),
        ];
        let report = compare_methods(&runs, &[set("random", 5, 20)]).unwrap();
        let ppo = report.cell(Method::Ppo, Task::Ba, "random").unwrap();
        let per_seed: Vec<f64> = report.evaluations.iter().filter(|e| e.method == Method::Ppo).map(|e| e.row.reverse_rate).collect();
        assert_eq!(per_seed[0], 1.0);
        assert_eq!(ppo.seeds, 2);
        assert_eq!(ppo.reverse_rate, (per_seed[0] + per_seed[1]) / 2.0);
        let table = report.render();
        let frarl = table.lines().find(|l| l.starts_with("FRARL")).unwrap();
        let ppo_line = table.lines().find(|l| l.starts_with("PPO")).unwrap();
        // FRARL never reverses, PPO does on its braking seed.
        assert!(frarl.contains("**0.000%**"), "{table}");
        assert!(ppo_line.contains("50.000%") && !ppo_line.contains("**50"), "{table}");
    }

    #[test]
    fn missing_runs_are_reported_per_cell() {
        let runs = [run(Method::Ppo, Task::Ba, 1, PolicyParams::zeros(1.0)), run(Method::Rarl, Task::Acc, 1, PolicyParams::zeros(1.0))];
        let report = compare_methods(&runs, &[set("random", 5, 5)]).unwrap();
        assert_eq!(report.missing, vec![(Method::Ppo, Task::Acc), (Method::Rarl, Task::Ba)]);
        let table = report.render();
        assert!(table.contains("missing: no ppo run for task acc"), "{table}");
        assert_eq!(table.lines().find(|l| l.starts_with("PPO")).unwrap().matches("missing").count(), 2);
    }

    #[test]
    fn export_is_reproducible_and_matches_episode_logs() {
        let runs = [run(Method::Frarl, Task::Acc, 3, PolicyParams::init(&mut seeded_rng(4), 1.0))];
        let sets = [set("random", 6, 30)];
        let a = compare_methods(&runs, &sets).unwrap();
        let b = compare_methods(&runs, &sets).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        let text = crate::io::metrics::format_episodes(&a.evaluations[0].episodes);
        let episodes = crate::io::metrics::parse_episodes(&text).unwrap();
        let cell = &a.cells[0];
        let row = summarize(&episodes).unwrap();
        assert_eq!((row.reverse_rate, row.collision_rate), (cell.reverse_rate, cell.collision_rate));
    }

    #[test]
    fn empty_inputs_are_errors() {
        assert!(matches!(compare_methods(&[], &[set("r", 1, 1)]), Err(CompareError::NoRuns)));
        let runs = [run(Method::Ppo, Task::Ba, 1, PolicyParams::zeros(1.0))];
        assert!(matches!(compare_methods(&runs, &[]), Err(CompareError::NoSets)));
        let empty = TestSet { name: "e".into(), scenarios: vec![] };
        assert!(matches!(compare_methods(&runs, &[empty]), Err(CompareError::Eval { .. })));
    }
}
