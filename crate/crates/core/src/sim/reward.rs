use core::fmt;
use core::str::FromStr;

use super::config::SimConfig;
use super::env::{SimState, Termination};

/// Reward definition of the protagonist.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Task {
    /// Braking assistance: sparse penalty on collision or reverse driving.
    Ba,
    /// Adaptive cruise control: adds safe-distance and slow-following penalties.
    Acc,
}

impl Task {
    pub fn reward(self, state: &SimState, cfg: &SimConfig) -> f64 {
        match self {
            Task::Ba => reward_ba(state),
            Task::Acc => reward_acc(state, cfg),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Task::Ba => "ba",
            Task::Acc => "acc",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s.to_ascii_lowercase().as_str() {
            "ba" => Ok(Task::Ba),
            "acc" => Ok(Task::Acc),
            _ => Err(()),
        }
    }
}

fn unsafe_event(state: &SimState) -> bool {
    matches!(state.termination, Termination::Collision | Termination::Reverse)
        || state.gap() <= 0.0
        || state.v_ego < 0.0
}

/// `-1` on collision or reverse driving, else `0`.
pub fn reward_ba(state: &SimState) -> f64 {
    if unsafe_event(state) {
        -1.0
    } else {
        0.0
    }
}

/// Branches are checked in order: unsafe event, safe-distance violation,
/// following slower than the leader.
pub fn reward_acc(state: &SimState, cfg: &SimConfig) -> f64 {
    if unsafe_event(state) {
        return -1.0;
    }
    let gap = state.gap();
    let s_safe = state.safe_distance(cfg);
    if gap < s_safe {
        -0.1 * libm::exp(-5.0 * gap / s_safe)
    } else if state.v_ego < state.v_lead {
        -0.05 * libm::exp(-5.0 * state.v_ego / state.v_lead)
    } else {
        0.0
    }
}

/// Zero-sum reward of the adversary.
pub fn adversary_reward(protagonist_reward: f64) -> f64 {
    -protagonist_reward
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::safe_distance;

    fn state(gap: f64, v_ego: f64, v_lead: f64) -> SimState {
        SimState {
            x_ego: 10.0,
            v_ego,
            a_ego: 0.0,
            x_lead: 10.0 + gap,
            v_lead,
            a_lead: 0.0,
            step: 1,
            termination: Termination::None,
        }
    }

    #[test]
    fn braking_assistance_reward() {
        let mut collided = state(-0.1, 20.0, 10.0);
        collided.termination = Termination::Collision;
        assert_eq!(reward_ba(&collided), -1.0);
        let mut reversed = state(10.0, -0.01, 10.0);
        reversed.termination = Termination::Reverse;
        assert_eq!(reward_ba(&reversed), -1.0);
        assert_eq!(reward_ba(&state(30.0, 20.0, 20.0)), 0.0);
    }

    #[test]
    fn cruise_control_reward_branches() {
        let cfg = SimConfig::default();
        let mut collided = state(0.0, 20.0, 10.0);
        collided.termination = Termination::Collision;
        assert_eq!(reward_acc(&collided, &cfg), -1.0);

        let s_safe = safe_distance(30.0, 10.0, &cfg);
        let close = state(s_safe / 5.0, 30.0, 10.0);
        let expected = -0.1 * (-1.0f64).exp();
        assert!((reward_acc(&close, &cfg) - expected).abs() < 1e-12);
        assert!((expected + 0.03679).abs() < 1e-5);

        assert_eq!(reward_acc(&state(50.0, 20.0, 20.0), &cfg), 0.0);

        let slow = state(100.0, 10.0, 20.0);
        let expected = -0.05 * (-2.5f64).exp();
        assert!((reward_acc(&slow, &cfg) - expected).abs() < 1e-12);
    }

    #[test]
    fn adversary_reward_negates() {
        assert_eq!(adversary_reward(-1.0), 1.0);
        assert_eq!(adversary_reward(0.0), 0.0);
        assert!((adversary_reward(-0.0368) - 0.0368).abs() < 1e-15);
    }
}
