//! Actor-critic policy, advantage estimation and PPO.

mod adam;
mod gae;
mod network;
mod ppo;

pub use adam::{Adam, AdamConfig};
pub use gae::{compute_gae, GaeError};
pub use network::{
    gaussian_log_prob, ForwardCache, PolicyController, PolicyParams, ShapeError, Tensor, HIDDEN,
};
pub use ppo::{normalize, ppo_loss, ppo_loss_and_grad, PpoConfig, PpoError, PpoStats, Sample};
