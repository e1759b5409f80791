//! PPO, RARL and falsification-based RARL training loops.

mod config;
mod pool;
mod rollout;
mod trainer;

pub use config::{derive_seed, ConfigError, Method, TrainConfig};
pub use pool::{PoolEntry, ScenarioPool};
pub use rollout::{Agent, EpisodeStats};
pub use trainer::{
    falsify_policy, train, train_frarl, train_ppo, train_rarl, FalsificationEvent, IterationReport, MetricsRow, Phase, SystemError, TrainError,
    TrainOutput, Trainer, TrainerState,
};
