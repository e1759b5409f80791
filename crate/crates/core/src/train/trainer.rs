use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use super::config::{derive_seed, ConfigError, Method, TrainConfig};
use super::pool::{PoolEntry, ScenarioPool};
use super::rollout::{actors, collect, Actor, Agent, LeadMode};
use crate::falsify::{falsify, CeConfig, FalsificationResult, FalsifyError, SearchSpace, SpaceError};
use crate::mtl::{Formula, Robustness, Trace};
use crate::policy::{GaeError, PolicyController, PolicyParams, PpoError, PpoStats, ShapeError};
use crate::seeded_rng;
use crate::sim::{driving_spec, rollout, Scenario, SimConfig, SimError, Task};

const STREAM_PROTAGONIST_INIT: u64 = 1;
const STREAM_ADVERSARY_INIT: u64 = 2;
const STREAM_ITERATION: u64 = 3;
const STREAM_FALSIFY: u64 = 4;

#[derive(Debug, Error, PartialEq)]
pub enum TrainError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("scenario pool is empty")]
    EmptyPool,
    #[error("resumed state is inconsistent: {0}")]
    State(&'static str),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error(transparent)]
    Gae(#[from] GaeError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("update at iteration {iteration} failed: {source}")]
    Update { iteration: u64, source: PpoError },
}

/// What an iteration trains.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    /// Protagonist only, before the adversary or falsifier starts.
    Warmup,
    Protagonist,
    Adversary,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Warmup => "warmup",
            Phase::Protagonist => "protagonist",
            Phase::Adversary => "adversary",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One metrics-log row, covering the episodes that ended in an iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricsRow {
    pub iteration: u64,
    /// Environment steps after this iteration.
    pub step: u64,
    pub phase: Phase,
    pub episodes: usize,
    /// Mean protagonist episode reward; NaN when no episode ended.
    pub mean_reward: f64,
    pub collisions: usize,
    pub reverses: usize,
    /// Steps with a gap below the safe distance.
    pub violation_steps: usize,
}

/// Summary of one falsifier call during FRARL.
#[derive(Clone, Debug, PartialEq)]
pub struct FalsificationEvent {
    pub iteration: u64,
    pub step: u64,
    pub simulations: usize,
    pub best_robustness: Robustness,
    /// Added scenarios with negative robustness.
    pub falsified: usize,
    /// Scenarios added to the pool, including near-misses.
    pub added: usize,
    pub first_falsified_at: Option<usize>,
    /// Set when the call failed; the pool is then unchanged.
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationReport {
    pub metrics: MetricsRow,
    pub update: PpoStats,
    pub falsification: Option<FalsificationEvent>,
    /// The evaluation cadence fires after this iteration.
    pub evaluate: bool,
}

/// Everything needed to continue a run, apart from the configuration and
/// the dataset split. Environments in flight are not part of it; a resumed
/// run starts fresh episodes.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainerState {
    pub steps: u64,
    pub iteration: u64,
    pub protagonist: Agent,
    pub adversary: Option<Agent>,
    pub falsified: Vec<PoolEntry>,
    pub protagonist_updates: u64,
    pub adversary_updates: u64,
    /// Position inside the RARL macro-cycle.
    pub cycle_position: usize,
    pub falsify_calls: u64,
    /// Consecutive falsifier calls without a violation.
    pub clean_calls: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainOutput {
    pub protagonist: PolicyParams,
    pub adversary: Option<PolicyParams>,
    pub metrics: Vec<MetricsRow>,
    pub falsifications: Vec<FalsificationEvent>,
    pub falsified: Vec<PoolEntry>,
}

/// Failure of one closed-loop simulation inside the falsifier.
#[derive(Debug, Error, PartialEq)]
pub enum SystemError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Falsifies `spec` against the deterministic `policy` in closed loop: each
/// point of `space` is decoded into a scenario and simulated to a trace.
#[allow(clippy::too_many_arguments)]
pub fn falsify_policy(
    policy: &PolicyParams,
    spec: &Formula,
    space: &SearchSpace,
    task: Task,
    sim: &SimConfig,
    budget: usize,
    ce: &CeConfig,
    rng: &mut crate::Rng,
) -> Result<FalsificationResult, FalsifyError<SystemError>> {
    let system = |x: &[f64]| -> Result<Trace, SystemError> {
        let scenario = space.decode(x, sim)?;
        Ok(rollout(&mut PolicyController(policy), &scenario, task, sim)?.trace)
    };
    falsify(system, spec, space, budget, ce, rng)
}

pub struct Trainer {
    cfg: TrainConfig,
    spec: Formula,
    space: SearchSpace,
    pool: ScenarioPool,
    state: TrainerState,
    actors: Vec<Actor>,
    actor_phase: Option<Phase>,
}

impl Trainer {
    /// Fresh run. `dataset` is the training split episodes are drawn from.
    pub fn new(cfg: TrainConfig, dataset: Vec<Scenario>) -> Result<Self, TrainError> {
        cfg.validate()?;
        let protagonist = Agent::new(&mut seeded_rng(derive_seed(cfg.seed, STREAM_PROTAGONIST_INIT, 0)), &cfg.ppo);
        let adversary = (cfg.method == Method::Rarl)
            .then(|| Agent::new(&mut seeded_rng(derive_seed(cfg.seed, STREAM_ADVERSARY_INIT, 0)), &cfg.ppo));
        let state = TrainerState {
            steps: 0,
            iteration: 0,
            protagonist,
            adversary,
            falsified: Vec::new(),
            protagonist_updates: 0,
            adversary_updates: 0,
            cycle_position: 0,
            falsify_calls: 0,
            clean_calls: 0,
            converged: false,
        };
        Self::resume(cfg, dataset, state)
    }

    /// Continues from a saved state.
    pub fn resume(cfg: TrainConfig, dataset: Vec<Scenario>, state: TrainerState) -> Result<Self, TrainError> {
        cfg.validate()?;
        if dataset.is_empty() {
            return Err(TrainError::EmptyPool);
        }
        for s in &dataset {
            s.validate(&cfg.sim).map_err(SimError::from)?;
        }
        if (cfg.method == Method::Rarl) != state.adversary.is_some() {
            return Err(TrainError::State("adversary presence does not match the method"));
        }
        if state.steps != state.iteration * cfg.ppo.batch_size() as u64 {
            return Err(TrainError::State("step count is not iterations times batch size"));
        }
        state.protagonist.params.check_finite()?;
        let mut pool = ScenarioPool::new(dataset, cfg.adversarial_weight);
        for e in &state.falsified {
            pool.add_falsified(e.clone());
        }
        Ok(Trainer {
            spec: driving_spec(&cfg.sim),
            space: SearchSpace::driving(&cfg.sim, cfg.control_points)?,
            actors: actors(cfg.ppo.n_actors),
            actor_phase: None,
            cfg,
            pool,
            state,
        })
    }

    pub fn config(&self) -> &TrainConfig {
        &self.cfg
    }

    pub fn state(&self) -> &TrainerState {
        &self.state
    }

    pub fn pool(&self) -> &ScenarioPool {
        &self.pool
    }

    pub fn protagonist(&self) -> &PolicyParams {
        &self.state.protagonist.params
    }

    pub fn adversary(&self) -> Option<&PolicyParams> {
        self.state.adversary.as_ref().map(|a| &a.params)
    }

    /// Step budget spent or (FRARL) the falsifier stopped finding violations.
    pub fn is_finished(&self) -> bool {
        self.state.steps >= self.cfg.total_steps || self.state.converged
    }

    /// Phase of the next iteration.
    pub fn phase(&self) -> Phase {
        let warm = self.state.steps < self.cfg.warmup_steps;
        match self.cfg.method {
            Method::Ppo => Phase::Protagonist,
            _ if warm => Phase::Warmup,
            Method::Frarl => Phase::Protagonist,
            Method::Rarl if self.state.cycle_position < self.cfg.protagonist_iters => Phase::Protagonist,
            Method::Rarl => Phase::Adversary,
        }
    }

    /// Collects one batch, performs one PPO update and, for FRARL, runs the
    /// falsifier when its cadence fires.
    pub fn step(&mut self) -> Result<IterationReport, TrainError> {
        let phase = self.phase();
        if self.cfg.method == Method::Rarl && self.actor_phase != Some(phase) {
            self.actors = actors(self.cfg.ppo.n_actors);
        }
        self.actor_phase = Some(phase);
        let iteration = self.state.iteration;
        let mut rng = seeded_rng(derive_seed(self.cfg.seed, STREAM_ITERATION, iteration));

        let lead = match (&self.state.adversary, phase) {
            (Some(adv), Phase::Protagonist) => {
                LeadMode::Mixed { adversary: &adv.params, weight: self.cfg.adversarial_weight }
            }
            (Some(adv), Phase::Adversary) => LeadMode::Adversary(&adv.params),
            _ => LeadMode::Scenario,
        };
        let col = collect(
            &mut self.actors,
            &self.state.protagonist.params,
            lead,
            &self.pool,
            self.cfg.task,
            &self.cfg.ppo,
            &self.cfg.sim,
            &mut rng,
        )?;

        let (learner, batch) = match phase {
            Phase::Adversary => (
                self.state.adversary.as_mut().expect("adversary phase requires an adversary"),
                col.adversary,
            ),
            _ => (&mut self.state.protagonist, col.protagonist),
        };
        // Keep the pre-update agent so an aborted update leaves a consistent state.
        let mut updated = learner.clone();
        let update = updated
            .update(batch, &self.cfg.ppo, &mut rng)
            .map_err(|source| TrainError::Update { iteration, source })?;
        *learner = updated;

        self.state.steps += self.cfg.ppo.batch_size() as u64;
        self.state.iteration += 1;
        match phase {
            Phase::Adversary => self.state.adversary_updates += 1,
            _ => self.state.protagonist_updates += 1,
        }
        if self.cfg.method == Method::Rarl && phase != Phase::Warmup {
            self.state.cycle_position =
                (self.state.cycle_position + 1) % (self.cfg.protagonist_iters + self.cfg.adversary_iters);
        }

        let falsification = (self.cfg.method == Method::Frarl
            && !self.state.converged
            && self.state.steps > self.cfg.warmup_steps
            && self.state.protagonist_updates.is_multiple_of(self.cfg.falsify_every as u64))
            .then(|| self.falsification_call());

        let n = col.episodes.len();
        let metrics = MetricsRow {
            iteration: self.state.iteration,
            step: self.state.steps,
            phase,
            episodes: n,
            mean_reward: if n == 0 { f64::NAN } else { col.episodes.iter().map(|e| e.reward).sum::<f64>() / n as f64 },
            collisions: col.episodes.iter().filter(|e| e.termination == crate::sim::Termination::Collision).count(),
            reverses: col.episodes.iter().filter(|e| e.termination == crate::sim::Termination::Reverse).count(),
            violation_steps: col.violation_steps,
        };
        let evaluate = self.cfg.eval_every > 0 && self.state.iteration.is_multiple_of(self.cfg.eval_every as u64);
        Ok(IterationReport { metrics, update, falsification, evaluate })
    }

    /// Falsifies the current deterministic protagonist and adds the
    /// lowest-robustness candidates to the pool.
    fn falsification_call(&mut self) -> FalsificationEvent {
        let call = self.state.falsify_calls;
        self.state.falsify_calls += 1;
        let mut rng = seeded_rng(derive_seed(self.cfg.seed, STREAM_FALSIFY, call));
        let ce = CeConfig { keep_best: self.cfg.falsify_candidates, ..self.cfg.ce.clone() };
        let (sim, space) = (&self.cfg.sim, &self.space);
        let mut event = FalsificationEvent {
            iteration: self.state.iteration,
            step: self.state.steps,
            simulations: 0,
            best_robustness: Robustness::Infinity,
            falsified: 0,
            added: 0,
            first_falsified_at: None,
            error: None,
        };
        let params = &self.state.protagonist.params;
        let budget = self.cfg.falsify_budget;
        let result = match falsify_policy(params, &self.spec, space, self.cfg.task, sim, budget, &ce, &mut rng) {
            Ok(r) => r,
            Err(e) => {
                event.error = Some(e.to_string());
                return event;
            }
        };
        event.simulations = result.simulations;
        event.best_robustness = result.best_robustness();
        event.first_falsified_at = result.first_falsified_at;
        let mut entries = Vec::with_capacity(result.top.len());
        for c in &result.top {
            match space.decode(&c.point, sim) {
                Ok(scenario) => entries.push(PoolEntry { scenario, robustness: c.robustness, iteration: self.state.iteration }),
                Err(e) => {
                    event.error = Some(e.to_string());
                    return event;
                }
            }
        }
        event.falsified = entries.iter().filter(|e| !e.is_near_miss()).count();
        event.added = entries.len();
        for e in entries {
            self.state.falsified.push(e.clone());
            self.pool.add_falsified(e);
        }
        self.record_call(result.falsified);
        event
    }

    fn record_call(&mut self, falsified: bool) {
        if falsified {
            self.state.clean_calls = 0;
        } else {
            self.state.clean_calls += 1;
            if self.state.clean_calls >= self.cfg.convergence_calls {
                self.state.converged = true;
            }
        }
    }

    /// Runs until [`Trainer::is_finished`].
    pub fn run(mut self) -> Result<TrainOutput, TrainError> {
        let mut metrics = Vec::new();
        let mut falsifications = Vec::new();
        while !self.is_finished() {
            let report = self.step()?;
            metrics.push(report.metrics);
            falsifications.extend(report.falsification);
        }
        Ok(self.into_output(metrics, falsifications))
    }

    pub fn into_output(self, metrics: Vec<MetricsRow>, falsifications: Vec<FalsificationEvent>) -> TrainOutput {
        TrainOutput {
            protagonist: self.state.protagonist.params,
            adversary: self.state.adversary.map(|a| a.params),
            metrics,
            falsifications,
            falsified: self.state.falsified,
        }
    }
}

/// Trains with `cfg.method` to completion.
pub fn train(cfg: TrainConfig, dataset: Vec<Scenario>) -> Result<TrainOutput, TrainError> {
    Trainer::new(cfg, dataset)?.run()
}

/// Plain PPO on the dataset scenarios.
pub fn train_ppo(cfg: TrainConfig, dataset: Vec<Scenario>) -> Result<TrainOutput, TrainError> {
    train(TrainConfig { method: Method::Ppo, ..cfg }, dataset)
}

/// PPO warm-up, then alternating protagonist and adversary updates.
pub fn train_rarl(cfg: TrainConfig, dataset: Vec<Scenario>) -> Result<TrainOutput, TrainError> {
    train(TrainConfig { method: Method::Rarl, ..cfg }, dataset)
}

/// PPO warm-up, then periodic falsification feeding the scenario pool.
pub fn train_frarl(cfg: TrainConfig, dataset: Vec<Scenario>) -> Result<TrainOutput, TrainError> {
    train(TrainConfig { method: Method::Frarl, ..cfg }, dataset)
}
