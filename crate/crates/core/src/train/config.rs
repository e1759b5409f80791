use core::fmt;
use core::str::FromStr;

use thiserror::Error;

use crate::falsify::CeConfig;
use crate::policy::PpoConfig;
use crate::sim::{ConfigError as SimConfigError, SimConfig, Task};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Ppo,
    Rarl,
    Frarl,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Ppo, Method::Rarl, Method::Frarl];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Ppo => "ppo",
            Method::Rarl => "rarl",
            Method::Frarl => "frarl",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ppo" => Ok(Method::Ppo),
            "rarl" => Ok(Method::Rarl),
            "frarl" => Ok(Method::Frarl),
            _ => Err(ConfigError::UnknownMethod(s.into())),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown training method {0:?}")]
    UnknownMethod(alloc::string::String),
    #[error("warm-up ({warmup}) must be below the total step budget ({total})")]
    Warmup { warmup: u64, total: u64 },
    #[error("{0} must be at least 1")]
    Zero(&'static str),
    #[error("{name} = {value} is outside {range}")]
    Range { name: &'static str, value: f64, range: &'static str },
    #[error(transparent)]
    Sim(#[from] SimConfigError),
}

/// Everything a training run depends on.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub method: Method,
    pub task: Task,
    pub seed: u64,
    /// Environment steps over all actors.
    pub total_steps: u64,
    /// Steps trained without adversary or falsifier.
    pub warmup_steps: u64,
    /// Protagonist iterations between falsifier calls.
    pub falsify_every: usize,
    /// Scenarios added to the pool per falsifier call.
    pub falsify_candidates: usize,
    /// Simulation budget per falsifier call.
    pub falsify_budget: usize,
    /// Leader acceleration control points of the falsification space.
    pub control_points: usize,
    /// Consecutive falsifier calls without a violation that end training.
    pub convergence_calls: usize,
    /// Protagonist iterations per RARL macro-cycle.
    pub protagonist_iters: usize,
    /// Adversary iterations per RARL macro-cycle.
    pub adversary_iters: usize,
    /// Probability that an episode uses a falsified scenario (FRARL) or an
    /// adversary-driven leader (RARL) once those exist.
    pub adversarial_weight: f64,
    /// Iterations between evaluation hooks; 0 disables them.
    pub eval_every: usize,
    pub ppo: PpoConfig,
    pub ce: CeConfig,
    pub sim: SimConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            method: Method::Ppo,
            task: Task::Ba,
            seed: 0,
            total_steps: 1_000_000,
            warmup_steps: 200_000,
            falsify_every: 10,
            falsify_candidates: 10,
            falsify_budget: 1000,
            control_points: 10,
            convergence_calls: 3,
            protagonist_iters: 10,
            adversary_iters: 1,
            adversarial_weight: 0.5,
            eval_every: 10,
            ppo: PpoConfig::default(),
            ce: CeConfig { stop_on_falsified: false, ..CeConfig::default() },
            sim: SimConfig::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.sim.validate()?;
        if self.warmup_steps >= self.total_steps {
            return Err(ConfigError::Warmup { warmup: self.warmup_steps, total: self.total_steps });
        }
        let counts = [
            ("falsify-every", self.falsify_every),
            ("falsify-candidates", self.falsify_candidates),
            ("falsify-budget", self.falsify_budget),
            ("control-points", self.control_points),
            ("convergence-calls", self.convergence_calls),
            ("protagonist-iters", self.protagonist_iters),
            ("adversary-iters", self.adversary_iters),
            ("ppo.minibatch-size", self.ppo.minibatch_size),
            ("ppo.epochs", self.ppo.epochs),
            ("ppo.n-actors", self.ppo.n_actors),
            ("ppo.steps-per-actor", self.ppo.steps_per_actor),
            ("ce.samples-per-iter", self.ce.samples_per_iter),
            ("ce.iterations", self.ce.iterations),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(ConfigError::Zero(name));
            }
        }
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        let checks = [
            ("ppo.clip-range", self.ppo.clip_range, self.ppo.clip_range > 0.0 && self.ppo.clip_range < 1.0, "(0, 1)"),
            ("ppo.gamma", self.ppo.gamma, unit(self.ppo.gamma), "[0, 1]"),
            ("ppo.lambda", self.ppo.lambda, unit(self.ppo.lambda), "[0, 1]"),
            ("adversarial-weight", self.adversarial_weight, unit(self.adversarial_weight), "[0, 1]"),
            ("ce.elite-fraction", self.ce.elite_fraction, self.ce.elite_fraction > 0.0 && self.ce.elite_fraction <= 1.0, "(0, 1]"),
            ("ce.smoothing", self.ce.smoothing, unit(self.ce.smoothing), "[0, 1]"),
            ("ppo.learning-rate", self.ppo.learning_rate, self.ppo.learning_rate > 0.0, "(0, inf)"),
            ("ppo.value-coef", self.ppo.value_coef, self.ppo.value_coef >= 0.0, "[0, inf)"),
            ("ppo.adam.beta1", self.ppo.adam.beta1, (0.0..1.0).contains(&self.ppo.adam.beta1), "[0, 1)"),
            ("ppo.adam.beta2", self.ppo.adam.beta2, (0.0..1.0).contains(&self.ppo.adam.beta2), "[0, 1)"),
            ("ppo.adam.epsilon", self.ppo.adam.epsilon, self.ppo.adam.epsilon > 0.0, "(0, inf)"),
            ("ppo.action-scale", self.ppo.action_scale, self.ppo.action_scale > 0.0 && self.ppo.action_scale.is_finite(), "(0, inf)"),
        ];
        for (name, value, ok, range) in checks {
            if !ok {
                return Err(ConfigError::Range { name, value, range });
            }
        }
        Ok(())
    }
}

/// Independent seed for `(stream, index)` under a run seed (SplitMix64
/// finalizer over the combined words).
pub fn derive_seed(seed: u64, stream: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    for _ in 0..2 {
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}
