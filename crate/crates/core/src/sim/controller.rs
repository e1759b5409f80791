use super::config::{safe_distance, SimConfig};
use super::env::Observation;

/// Anything that maps an observation to an ego acceleration.
pub trait Controller {
    fn act(&mut self, obs: &Observation) -> f64;
}

impl<F: FnMut(&Observation) -> f64> Controller for F {
    fn act(&mut self, obs: &Observation) -> f64 {
        self(obs)
    }
}

/// Applies the same acceleration every step; `ConstantAction(0.0)` keeps a
/// constant velocity and ignores the leader.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantAction(pub f64);

impl Controller for ConstantAction {
    fn act(&mut self, _obs: &Observation) -> f64 {
        self.0
    }
}

/// Rule-based reference driver built on the safe-distance rule: cruise while
/// the gap exceeds the safe distance plus a margin, otherwise brake at
/// `a_max`, never braking below standstill.
#[derive(Clone, Debug)]
pub struct SafeBrakingController {
    cfg: SimConfig,
    /// Fixed part of the trigger margin [m].
    pub margin: f64,
}

impl SafeBrakingController {
    pub fn new(cfg: &SimConfig) -> Self {
        SafeBrakingController { cfg: cfg.clone(), margin: 2.0 }
    }
}

impl Controller for SafeBrakingController {
    fn act(&mut self, obs: &Observation) -> f64 {
        let gap = obs[0];
        let v_ego = obs[2].max(0.0);
        let v_lead = (obs[2] - obs[1]).max(0.0);
        let dt = self.cfg.dt;
        // One step of closing speed at the worst case plus a fixed buffer.
        let trigger = safe_distance(v_ego, v_lead, &self.cfg) + self.margin + 2.0 * v_ego * dt;
        if gap > trigger {
            return 0.0;
        }
        // Stop at (numerically just above) zero rather than overshoot into reverse.
        let to_standstill = -v_ego / dt * (1.0 - 1e-9);
        to_standstill.max(-self.cfg.a_max)
    }
}
