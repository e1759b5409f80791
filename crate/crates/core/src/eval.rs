//! Deterministic evaluation of a controller on a scenario set.

use alloc::vec::Vec;

use thiserror::Error;

use crate::sim::{Controller, Env, Scenario, SimConfig, SimError, Task, Termination};

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("empty scenario set")]
    Empty,
    #[error("scenario {index}: {source}")]
    Sim { index: usize, source: SimError },
}

/// Outcome of one evaluation episode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpisodeSummary {
    pub termination: Termination,
    pub steps: usize,
    pub reward: f64,
    /// Post-step states with a gap below the safe distance.
    pub violation_steps: usize,
}

/// Aggregate over a scenario set. Rates are episode fractions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalRow {
    pub episodes: usize,
    pub collisions: usize,
    pub reverses: usize,
    pub collision_rate: f64,
    pub reverse_rate: f64,
    pub mean_reward: f64,
    pub violation_steps: usize,
}

/// Runs one episode without recording a trace.
pub fn run_episode<C: Controller + ?Sized>(
    controller: &mut C,
    scenario: &Scenario,
    task: Task,
    cfg: &SimConfig,
) -> Result<EpisodeSummary, SimError> {
    let (mut env, mut obs) = Env::reset(scenario.clone(), cfg)?;
    let mut reward = 0.0;
    let mut violation_steps = 0;
    loop {
        let out = env.step(controller.act(&obs))?;
        reward += task.reward(&out.state, cfg);
        if out.state.violates_safe_distance(cfg) {
            violation_steps += 1;
        }
        obs = out.observation;
        if out.done {
            return Ok(EpisodeSummary { termination: out.termination, steps: out.state.step, reward, violation_steps });
        }
    }
}

/// Per-episode outcomes of `controller` on every scenario, in order.
pub fn evaluate_episodes<C: Controller + ?Sized>(
    controller: &mut C,
    scenarios: &[Scenario],
    task: Task,
    cfg: &SimConfig,
) -> Result<Vec<EpisodeSummary>, EvalError> {
    if scenarios.is_empty() {
        return Err(EvalError::Empty);
    }
    scenarios
        .iter()
        .enumerate()
        .map(|(index, s)| run_episode(controller, s, task, cfg).map_err(|source| EvalError::Sim { index, source }))
        .collect()
}

/// Aggregates episode outcomes into a report row.
pub fn summarize(episodes: &[EpisodeSummary]) -> Result<EvalRow, EvalError> {
    if episodes.is_empty() {
        return Err(EvalError::Empty);
    }
    let n = episodes.len();
    let collisions = episodes.iter().filter(|e| e.termination == Termination::Collision).count();
    let reverses = episodes.iter().filter(|e| e.termination == Termination::Reverse).count();
    Ok(EvalRow {
        episodes: n,
        collisions,
        reverses,
        collision_rate: collisions as f64 / n as f64,
        reverse_rate: reverses as f64 / n as f64,
        mean_reward: episodes.iter().map(|e| e.reward).sum::<f64>() / n as f64,
        violation_steps: episodes.iter().map(|e| e.violation_steps).sum(),
    })
}

/// Deterministic evaluation; `controller` should act on the policy mean.
pub fn evaluate<C: Controller + ?Sized>(
    controller: &mut C,
    scenarios: &[Scenario],
    task: Task,
    cfg: &SimConfig,
) -> Result<EvalRow, EvalError> {
    summarize(&evaluate_episodes(controller, scenarios, task, cfg)?)
}
