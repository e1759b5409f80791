use thiserror::Error;

/// Simulator constants.
#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    /// Lane length [m]; the episode ends when the leader passes it.
    pub lane_length: f64,
    pub max_steps: usize,
    /// Integration step [s].
    pub dt: f64,
    /// Maximum acceleration magnitude of both vehicles [m/s²].
    pub a_max: f64,
    /// Reaction delay of the follower in the safe-distance rule [s].
    pub reaction_delay: f64,
    /// Initial ego position [m].
    pub ego_start: f64,
    /// Extra leader placement beyond the safe distance [m].
    pub offset_range: (f64, f64),
    /// Initial ego velocity range [m/s].
    pub ego_velocity_range: (f64, f64),
    /// Initial leader velocity range [m/s].
    pub lead_velocity_range: (f64, f64),
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            lane_length: 600.0,
            max_steps: 500,
            dt: 0.04,
            a_max: 10.0,
            reaction_delay: 0.3,
            ego_start: 10.0,
            offset_range: (0.0, 40.0),
            ego_velocity_range: (15.0, 35.0),
            lead_velocity_range: (15.0, 35.0),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("simulator parameter `{0}` must be positive and finite")]
    NotPositive(&'static str),
    #[error("range `{0}` must satisfy 0 <= lo <= hi")]
    BadRange(&'static str),
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("lane_length", self.lane_length),
            ("dt", self.dt),
            ("a_max", self.a_max),
            ("reaction_delay", self.reaction_delay),
            ("ego_start", self.ego_start),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError::NotPositive(name));
            }
        }
        if self.max_steps == 0 {
            return Err(ConfigError::NotPositive("max_steps"));
        }
        for (name, (lo, hi)) in [
            ("offset_range", self.offset_range),
            ("ego_velocity_range", self.ego_velocity_range),
            ("lead_velocity_range", self.lead_velocity_range),
        ] {
            if !(lo >= 0.0 && hi >= lo && hi.is_finite()) {
                return Err(ConfigError::BadRange(name));
            }
        }
        Ok(())
    }

    /// Episode horizon in seconds.
    pub fn horizon(&self) -> f64 {
        self.dt * self.max_steps as f64
    }

    /// Normalizer for the gap in the safety specification: the largest
    /// initial gap the scenario bounds allow.
    pub fn gap_scale(&self) -> f64 {
        self.offset_range.1 + safe_distance(self.ego_velocity_range.1, 0.0, self)
    }

    /// Normalizer for the ego velocity in the safety specification.
    pub fn velocity_scale(&self) -> f64 {
        self.ego_velocity_range.1.max(self.lead_velocity_range.1)
    }
}

/// Minimum following distance for a follower at `v_follow` behind a leader at
/// `v_lead`, both able to brake at `a_max`, with the follower reacting after
/// the configured delay. Floored at zero.
pub fn safe_distance(v_follow: f64, v_lead: f64, cfg: &SimConfig) -> f64 {
    let raw = (v_follow * v_follow - v_lead * v_lead) / (2.0 * cfg.a_max)
        + v_follow * cfg.reaction_delay;
    raw.max(0.0)
}
