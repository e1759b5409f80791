//! Run directories and the checkpointing training driver.
//!
//! Layout of a run directory:
//!
//! * `config.txt`: configuration snapshot (see [`crate::io::config`])
//! * `metrics.csv`: one row per iteration
//! * `falsification.csv`: one row per falsifier call (FRARL)
//! * `evaluation.csv`: periodic deterministic evaluation on the test sets
//! * `checkpoint.txt`: latest checkpoint
//! * `falsified/`: every scenario the falsifier added to the pool

use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

use frarl_core::eval::{evaluate, EvalError, EvalRow};
use frarl_core::policy::PolicyController;
use frarl_core::sim::Scenario;
use frarl_core::train::{IterationReport, TrainConfig, TrainError, Trainer};

use crate::io::checkpoint::{read_checkpoint, write_checkpoint, Checkpoint};
use crate::io::config::{read_config, write_config};
use crate::io::metrics::{
    format_falsification_event, format_metrics_row, read_metrics, FALSIFICATION_HEADER, METRICS_HEADER,
};
use crate::io::scenario::{write_scenario, ScenarioFile, EXTENSION};
use crate::io::FormatError;

pub const EVALUATION_HEADER: &str = "step,set,episodes,collision_rate,reverse_rate,mean_reward,violation_steps";

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{} already holds a run; resume it or choose another directory", .0.display())]
    Exists(PathBuf),
    #[error("{} holds no checkpoint to resume from", .0.display())]
    NoCheckpoint(PathBuf),
    #[error("checkpoint is for {found}, configuration asks for {expected}")]
    Mismatch { expected: String, found: String },
}

/// Paths inside one run directory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunDir {
    root: PathBuf,
}

impl RunDir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        RunDir { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn config(&self) -> PathBuf {
        self.root.join("config.txt")
    }

    pub fn metrics(&self) -> PathBuf {
        self.root.join("metrics.csv")
    }

    pub fn falsification(&self) -> PathBuf {
        self.root.join("falsification.csv")
    }

    pub fn evaluation(&self) -> PathBuf {
        self.root.join("evaluation.csv")
    }

    pub fn checkpoint(&self) -> PathBuf {
        self.root.join("checkpoint.txt")
    }

    pub fn falsified(&self) -> PathBuf {
        self.root.join("falsified")
    }

    pub fn read_config(&self) -> Result<TrainConfig, FormatError> {
        read_config(&self.config(), TrainConfig::default())
    }

    pub fn read_checkpoint(&self) -> Result<Checkpoint, FormatError> {
        read_checkpoint(&self.checkpoint())
    }
}

/// Test sets evaluated at the configured cadence.
#[derive(Clone, Debug, Default)]
pub struct EvalSets {
    pub sets: Vec<(String, Vec<Scenario>)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    /// Iterations between checkpoints; the final state is always saved.
    pub checkpoint_every: u64,
    pub resume: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { checkpoint_every: 10, resume: false }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io { path: path.to_path_buf(), source }
}

fn append(path: &Path) -> Result<File, RunError> {
    OpenOptions::new().append(true).create(true).open(path).map_err(io_err(path))
}

fn write_line(file: &mut File, path: &Path, line: &str) -> Result<(), RunError> {
    writeln!(file, "{line}").map_err(io_err(path))
}

/// Rewrites a log keeping its header and the rows whose `step` column (the
/// one at `step_col`) does not exceed `max_step`.
fn truncate_log(path: &Path, step_col: usize, max_step: u64) -> Result<(), RunError> {
    let Ok(text) = std::fs::read_to_string(path) else {
        return Ok(());
    };
    let mut kept = String::new();
    for (i, line) in text.lines().enumerate() {
        let step = line.split(',').nth(step_col).and_then(|s| s.parse::<u64>().ok());
        if i == 0 || step.is_some_and(|s| s <= max_step) {
            kept.push_str(line);
            kept.push('\n');
        }
    }
    std::fs::write(path, kept).map_err(io_err(path))
}

fn eval_row_line(step: u64, set: &str, r: &EvalRow) -> String {
    format!(
        "{step},{set},{},{},{},{},{}",
        r.episodes, r.collision_rate, r.reverse_rate, r.mean_reward, r.violation_steps
    )
}

/// Trains into `dir`, writing logs as it goes and checkpointing every
/// `opts.checkpoint_every` iterations. With `opts.resume` the run continues
/// from the directory's checkpoint and its saved configuration; log rows
/// written after that checkpoint are dropped so the step axis stays
/// continuous. A failed update saves the last consistent state before the
/// error is returned.
pub fn run_training(
    dir: &RunDir,
    cfg: Option<TrainConfig>,
    dataset: Vec<Scenario>,
    eval_sets: &EvalSets,
    opts: RunOptions,
    mut progress: impl FnMut(&IterationReport),
) -> Result<Checkpoint, RunError> {
    let mut trainer = if opts.resume {
        if !dir.checkpoint().exists() {
            return Err(RunError::NoCheckpoint(dir.root().to_path_buf()));
        }
        let saved = dir.read_config()?;
        if let Some(cfg) = &cfg {
            if (cfg.method, cfg.seed) != (saved.method, saved.seed) {
                return Err(RunError::Mismatch {
                    expected: format!("{} seed {}", cfg.method, cfg.seed),
                    found: format!("{} seed {}", saved.method, saved.seed),
                });
            }
        }
        let ck = dir.read_checkpoint()?;
        if (ck.method, ck.seed) != (saved.method, saved.seed) {
            return Err(RunError::Mismatch {
                expected: format!("{} seed {}", saved.method, saved.seed),
                found: format!("{} seed {}", ck.method, ck.seed),
            });
        }
        truncate_log(&dir.metrics(), 1, ck.state.steps)?;
        truncate_log(&dir.falsification(), 1, ck.state.steps)?;
        truncate_log(&dir.evaluation(), 0, ck.state.steps)?;
        Trainer::resume(saved, dataset, ck.state)?
    } else {
        let cfg = cfg.unwrap_or_default();
        if dir.checkpoint().exists() || dir.metrics().exists() {
            return Err(RunError::Exists(dir.root().to_path_buf()));
        }
        std::fs::create_dir_all(dir.root()).map_err(io_err(dir.root()))?;
        write_config(&dir.config(), &cfg)?;
        let trainer = Trainer::new(cfg, dataset)?;
        std::fs::write(dir.metrics(), format!("{METRICS_HEADER}\n")).map_err(io_err(&dir.metrics()))?;
        std::fs::write(dir.falsification(), format!("{FALSIFICATION_HEADER}\n")).map_err(io_err(&dir.falsification()))?;
        std::fs::write(dir.evaluation(), format!("{EVALUATION_HEADER}\n")).map_err(io_err(&dir.evaluation()))?;
        trainer
    };

    let checkpoint = |t: &Trainer| Checkpoint { method: t.config().method, seed: t.config().seed, state: t.state().clone() };
    let (metrics_path, fals_path, eval_path) = (dir.metrics(), dir.falsification(), dir.evaluation());
    let mut metrics = append(&metrics_path)?;
    let mut fals = append(&fals_path)?;
    let mut evals = append(&eval_path)?;
    while !trainer.is_finished() {
        let report = match trainer.step() {
            Ok(r) => r,
            Err(e) => {
                write_checkpoint(&dir.checkpoint(), &checkpoint(&trainer))?;
                return Err(e.into());
            }
        };
        write_line(&mut metrics, &metrics_path, &format_metrics_row(&report.metrics))?;
        if let Some(event) = &report.falsification {
            write_line(&mut fals, &fals_path, &format_falsification_event(event))?;
            let entries = trainer.pool().falsified();
            for (k, e) in entries[entries.len() - event.added..].iter().enumerate() {
                let name = format!("{:06}-{:02}.{EXTENSION}", e.iteration, k);
                write_scenario(&dir.falsified().join(name), &ScenarioFile::from(e))?;
            }
        }
        if report.evaluate {
            let sim = trainer.config().sim.clone();
            for (name, set) in &eval_sets.sets {
                let row = evaluate(&mut PolicyController(trainer.protagonist()), set, trainer.config().task, &sim)?;
                write_line(&mut evals, &eval_path, &eval_row_line(report.metrics.step, name, &row))?;
            }
        }
        if report.metrics.iteration.is_multiple_of(opts.checkpoint_every.max(1)) {
            write_checkpoint(&dir.checkpoint(), &checkpoint(&trainer))?;
        }
        progress(&report);
    }
    let ck = checkpoint(&trainer);
    write_checkpoint(&dir.checkpoint(), &ck)?;
    Ok(ck)
}

/// Metrics rows of a finished or interrupted run.
pub fn read_run_metrics(dir: &RunDir) -> Result<Vec<frarl_core::train::MetricsRow>, FormatError> {
    read_metrics(&dir.metrics())
}
