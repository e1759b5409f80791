use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

use super::config::SimConfig;

/// Where a scenario came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScenarioSource {
    Dataset,
    Random,
    Falsified,
    Adversary,
}

impl ScenarioSource {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioSource::Dataset => "dataset",
            ScenarioSource::Random => "random",
            ScenarioSource::Falsified => "falsified",
            ScenarioSource::Adversary => "adversary",
        }
    }
}

impl fmt::Display for ScenarioSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioSource {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "dataset" => Ok(ScenarioSource::Dataset),
            "random" => Ok(ScenarioSource::Random),
            "falsified" => Ok(ScenarioSource::Falsified),
            "adversary" => Ok(ScenarioSource::Adversary),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error("lead acceleration trace has {got} values, expected {expected}")]
    TraceLength { got: usize, expected: usize },
    #[error("leader offset {0} m is outside the configured range")]
    Offset(f64),
    #[error("initial velocity {0} m/s must be finite and non-negative")]
    Velocity(f64),
    #[error("lead acceleration at step {0} is not finite")]
    NonFinite(usize),
}

/// Initial condition plus leader input for one episode.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub source: ScenarioSource,
    /// Leader placement beyond the safe distance [m].
    pub offset: f64,
    pub ego_velocity: f64,
    pub lead_velocity: f64,
    /// Leader acceleration per step [m/s²].
    pub lead_accel: Vec<f64>,
}

impl Scenario {
    /// Builds a validated scenario, clamping the acceleration trace to
    /// `[-a_max, a_max]`.
    pub fn new(
        source: ScenarioSource,
        offset: f64,
        ego_velocity: f64,
        lead_velocity: f64,
        mut lead_accel: Vec<f64>,
        cfg: &SimConfig,
    ) -> Result<Self, ScenarioError> {
        for a in lead_accel.iter_mut() {
            *a = a.clamp(-cfg.a_max, cfg.a_max);
        }
        let s = Scenario { source, offset, ego_velocity, lead_velocity, lead_accel };
        s.validate(cfg)?;
        Ok(s)
    }

    pub fn validate(&self, cfg: &SimConfig) -> Result<(), ScenarioError> {
        if self.lead_accel.len() != cfg.max_steps {
            return Err(ScenarioError::TraceLength {
                got: self.lead_accel.len(),
                expected: cfg.max_steps,
            });
        }
        if let Some(i) = self.lead_accel.iter().position(|a| !a.is_finite()) {
            return Err(ScenarioError::NonFinite(i));
        }
        let (lo, hi) = cfg.offset_range;
        if !(self.offset >= lo && self.offset <= hi) {
            return Err(ScenarioError::Offset(self.offset));
        }
        for v in [self.ego_velocity, self.lead_velocity] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(ScenarioError::Velocity(v));
            }
        }
        Ok(())
    }
}
