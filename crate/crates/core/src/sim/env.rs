use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use super::config::{safe_distance, SimConfig};
use super::controller::Controller;
use super::reward::Task;
use super::scenario::{Scenario, ScenarioError};
use crate::mtl::{Record, Trace};

/// Number of policy input features.
pub const OBS_DIM: usize = 5;

/// Policy features: gap [m], `v_ego - v_lead` [m/s], `v_ego` [m/s],
/// `a_lead` [m/s²], `a_ego` [m/s²].
pub type Observation = [f64; OBS_DIM];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Termination {
    None,
    LaneEnd,
    MaxSteps,
    Collision,
    Reverse,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::None => "none",
            Termination::LaneEnd => "lane-end",
            Termination::MaxSteps => "max-steps",
            Termination::Collision => "collision",
            Termination::Reverse => "reverse",
        }
    }

    /// Collision or reverse driving.
    pub fn is_unsafe(self) -> bool {
        matches!(self, Termination::Collision | Termination::Reverse)
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("step called after the episode terminated ({0})")]
    StepAfterDone(Termination),
    #[error("non-finite action {0}")]
    NonFiniteAction(f64),
}

/// Kinematic state of both vehicles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimState {
    pub x_ego: f64,
    pub v_ego: f64,
    pub a_ego: f64,
    pub x_lead: f64,
    pub v_lead: f64,
    pub a_lead: f64,
    pub step: usize,
    pub termination: Termination,
}

impl SimState {
    pub fn gap(&self) -> f64 {
        self.x_lead - self.x_ego
    }

    pub fn safe_distance(&self, cfg: &SimConfig) -> f64 {
        safe_distance(self.v_ego.max(0.0), self.v_lead, cfg)
    }

    /// Gap shorter than the safe distance.
    pub fn violates_safe_distance(&self, cfg: &SimConfig) -> bool {
        self.gap() < self.safe_distance(cfg)
    }

    pub fn observation(&self) -> Observation {
        [self.gap(), self.v_ego - self.v_lead, self.v_ego, self.a_lead, self.a_ego]
    }

    pub fn record(&self) -> Record {
        Record {
            gap: self.gap(),
            v_ego: self.v_ego,
            v_lead: self.v_lead,
            a_ego: self.a_ego,
            a_lead: self.a_lead,
            x_ego: self.x_ego,
            x_lead: self.x_lead,
        }
    }

    pub fn done(&self) -> bool {
        self.termination != Termination::None
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepOutcome {
    pub observation: Observation,
    /// Post-step state, the input of the reward functions.
    pub state: SimState,
    pub done: bool,
    pub termination: Termination,
}

/// One environment instance. Owns its state and scenario.
#[derive(Clone, Debug)]
pub struct Env {
    cfg: SimConfig,
    scenario: Scenario,
    state: SimState,
}

impl Env {
    /// Places the ego at `ego_start` and the leader at the safe distance plus
    /// the scenario offset ahead of it.
    pub fn reset(scenario: Scenario, cfg: &SimConfig) -> Result<(Env, Observation), SimError> {
        scenario.validate(cfg)?;
        let gap = safe_distance(scenario.ego_velocity, scenario.lead_velocity, cfg)
            + scenario.offset;
        let state = SimState {
            x_ego: cfg.ego_start,
            v_ego: scenario.ego_velocity,
            a_ego: 0.0,
            x_lead: cfg.ego_start + gap,
            v_lead: scenario.lead_velocity,
            a_lead: 0.0,
            step: 0,
            termination: Termination::None,
        };
        let obs = state.observation();
        Ok((Env { cfg: cfg.clone(), scenario, state }, obs))
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    /// Advances one step with the leader following the scenario trace.
    pub fn step(&mut self, ego_accel: f64) -> Result<StepOutcome, SimError> {
        let lead = self.scenario.lead_accel.get(self.state.step).copied().unwrap_or(0.0);
        self.step_with_lead(ego_accel, lead)
    }

    /// Advances one step with an externally chosen leader acceleration.
    pub fn step_with_lead(&mut self, ego_accel: f64, lead_accel: f64) -> Result<StepOutcome, SimError> {
        if self.state.done() {
            return Err(SimError::StepAfterDone(self.state.termination));
        }
        for a in [ego_accel, lead_accel] {
            if !a.is_finite() {
                return Err(SimError::NonFiniteAction(a));
            }
        }
        let cfg = &self.cfg;
        let dt = cfg.dt;
        let s = &mut self.state;

        let a_ego = ego_accel.clamp(-cfg.a_max, cfg.a_max);
        s.v_ego += a_ego * dt;
        s.x_ego += s.v_ego * dt;
        s.a_ego = a_ego;

        let a_lead = lead_accel.clamp(-cfg.a_max, cfg.a_max);
        let v_lead = s.v_lead + a_lead * dt;
        if v_lead < 0.0 {
            s.a_lead = -s.v_lead / dt;
            s.v_lead = 0.0;
        } else {
            s.a_lead = a_lead;
            s.v_lead = v_lead;
        }
        s.x_lead += s.v_lead * dt;
        s.step += 1;

        s.termination = if s.gap() <= 0.0 {
            Termination::Collision
        } else if s.v_ego < 0.0 {
            Termination::Reverse
        } else if s.x_lead >= cfg.lane_length {
            Termination::LaneEnd
        } else if s.step >= cfg.max_steps {
            Termination::MaxSteps
        } else {
            Termination::None
        };

        Ok(StepOutcome {
            observation: s.observation(),
            state: *s,
            done: s.done(),
            termination: s.termination,
        })
    }
}

/// Summary of a closed-loop episode.
#[derive(Clone, Debug)]
pub struct Episode {
    /// Initial state followed by every post-step state.
    pub trace: Trace,
    pub termination: Termination,
    pub steps: usize,
    pub total_reward: f64,
    /// Post-step states with a gap below the safe distance.
    pub safe_distance_violations: usize,
}

/// Runs `controller` on `scenario` until termination.
pub fn rollout<C: Controller + ?Sized>(
    controller: &mut C,
    scenario: &Scenario,
    task: Task,
    cfg: &SimConfig,
) -> Result<Episode, SimError> {
    let (mut env, mut obs) = Env::reset(scenario.clone(), cfg)?;
    let mut records = Vec::with_capacity(cfg.max_steps + 1);
    records.push(env.state().record());
    let mut total_reward = 0.0;
    let mut violations = 0;
    loop {
        let action = controller.act(&obs);
        let out = env.step(action)?;
        records.push(out.state.record());
        total_reward += task.reward(&out.state, cfg);
        if out.state.violates_safe_distance(cfg) {
            violations += 1;
        }
        obs = out.observation;
        if out.done {
            let trace = Trace::new(cfg.dt, records).map_err(|_| SimError::NonFiniteAction(action))?;
            return Ok(Episode {
                trace,
                termination: out.termination,
                steps: out.state.step,
                total_reward,
                safe_distance_violations: violations,
            });
        }
    }
}
