//! Two-vehicle longitudinal highway simulator.
//!
//! Both vehicles are point masses driven by acceleration and integrated with
//! semi-implicit Euler at `dt = 0.04 s` (25 Hz, 500 steps = 20 s). The gap is
//! the bumper distance `x_lead - x_ego`; an episode ends on collision
//! (`gap <= 0`), ego reversing (`v_ego < 0`), the leader reaching the lane
//! end, or the step limit.

mod config;
mod controller;
mod dataset;
mod env;
mod reward;
mod scenario;
mod spec;

pub use config::{safe_distance, ConfigError, SimConfig};
pub use controller::{ConstantAction, Controller, SafeBrakingController};
pub use dataset::{
    generate_random_scenario, generate_synthetic_dataset, group_trajectories, preprocess,
    ScenarioSplit, Trajectory, TrajectoryRow, HALF_LENGTH,
};
pub use env::{
    rollout, Env, Episode, Observation, SimError, SimState, StepOutcome, Termination, OBS_DIM,
};
pub use reward::{adversary_reward, reward_acc, reward_ba, Task};
pub use scenario::{Scenario, ScenarioError, ScenarioSource};
pub use spec::{driving_predicates, driving_spec, DRIVING_SPEC};
