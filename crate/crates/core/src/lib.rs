//! Core algorithms for falsification-driven adversarial training of a
//! longitudinal driving policy.
//!
//! The crate is `no_std` (with `alloc`) and contains no IO. It provides:
//!
//! * [`mtl`]: an MTL formula parser plus quantitative robustness and Boolean
//!   satisfaction monitors over sampled traces.
//! * [`falsify`]: a cross-entropy falsifier and a uniform-sampling baseline.
//! * [`sim`]: a two-vehicle point-mass highway simulator, rewards and
//!   scenario sources.
//! * [`policy`]: the shared actor-critic network, GAE, the clipped PPO loss
//!   and Adam.
//! * [`train`]: PPO, RARL and falsification-based RARL training loops.
//! * [`eval`]: deterministic evaluation producing unsafe-behaviour rates.
#![no_std]

extern crate alloc;

pub mod eval;
pub mod falsify;
pub mod mtl;
pub mod policy;
pub mod sim;
pub mod train;

/// Seeded generator used throughout the crate.
pub type Rng = rand_chacha::ChaCha8Rng;

/// Builds the crate's generator from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> Rng {
    use rand::SeedableRng;
    Rng::seed_from_u64(seed)
}
