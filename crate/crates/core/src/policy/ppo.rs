use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use super::adam::AdamConfig;
use super::network::{gaussian_log_prob, PolicyParams, ShapeError};
use crate::sim::Observation;

/// PPO hyper-parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct PpoConfig {
    /// Clip range of the probability ratio.
    pub clip_range: f64,
    /// Weight of the squared value error.
    pub value_coef: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub learning_rate: f64,
    pub minibatch_size: usize,
    pub epochs: usize,
    /// Parallel actors per iteration.
    pub n_actors: usize,
    /// Steps each actor collects per iteration.
    pub steps_per_actor: usize,
    /// Standardize advantages per update batch.
    pub normalize_advantages: bool,
    /// Global gradient-norm clip; `None` disables it.
    pub max_grad_norm: Option<f64>,
    /// Scale of the action-mean head [m/s² per unit output].
    pub action_scale: f64,
    pub adam: AdamConfig,
}

impl Default for PpoConfig {
    fn default() -> Self {
        PpoConfig {
            clip_range: 0.2,
            value_coef: 0.5,
            gamma: 0.99,
            lambda: 0.95,
            learning_rate: 3e-4,
            minibatch_size: 128,
            epochs: 4,
            n_actors: 4,
            steps_per_actor: 512,
            normalize_advantages: true,
            max_grad_norm: Some(0.5),
            action_scale: 1.0,
            adam: AdamConfig::default(),
        }
    }
}

impl PpoConfig {
    pub fn batch_size(&self) -> usize {
        self.n_actors * self.steps_per_actor
    }
}

/// One transition prepared for the surrogate loss.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub obs: Observation,
    pub action: f64,
    /// Log-probability under the policy that collected the sample.
    pub old_log_prob: f64,
    pub advantage: f64,
    pub value_target: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PpoStats {
    pub loss: f64,
    pub policy_loss: f64,
    pub value_loss: f64,
    /// Fraction of samples with `|r - 1| > clip_range`.
    pub clip_fraction: f64,
    /// Mean of `(r - 1) - ln r`, a non-negative KL estimator.
    pub approx_kl: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum PpoError {
    #[error("empty batch")]
    EmptyBatch,
    #[error("non-finite loss (policy {policy_loss}, value {value_loss})")]
    NonFinite { policy_loss: f64, value_loss: f64 },
    #[error(transparent)]
    Shape(#[from] ShapeError),
}

/// Standardizes `xs` to zero mean and unit standard deviation in place.
pub fn normalize(xs: &mut [f64]) {
    if xs.is_empty() {
        return;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    let std = libm::sqrt(var) + 1e-8;
    xs.iter_mut().for_each(|x| *x = (*x - mean) / std);
}

fn evaluate(
    params: &PolicyParams,
    batch: &[Sample],
    cfg: &PpoConfig,
    mut grad: Option<&mut [f64]>,
) -> Result<PpoStats, PpoError> {
    if batch.is_empty() {
        return Err(PpoError::EmptyBatch);
    }
    let n = batch.len() as f64;
    let log_std = params.log_std();
    let inv_var = libm::exp(-2.0 * log_std);
    let (lo, hi) = (1.0 - cfg.clip_range, 1.0 + cfg.clip_range);
    let mut stats = PpoStats::default();
    let mut clipped = 0usize;
    for s in batch {
        let cache = params.forward_cached(&s.obs)?;
        let log_prob = gaussian_log_prob(s.action, cache.mean, log_std);
        let ratio = libm::exp(log_prob - s.old_log_prob);
        let unclipped = ratio * s.advantage;
        let clipped_obj = ratio.clamp(lo, hi) * s.advantage;
        stats.policy_loss -= unclipped.min(clipped_obj) / n;
        let err = cache.value - s.value_target;
        stats.value_loss += err * err / n;
        if (ratio - 1.0).abs() > cfg.clip_range {
            clipped += 1;
        }
        stats.approx_kl += ((ratio - 1.0) - (log_prob - s.old_log_prob)) / n;

        if let Some(g) = grad.as_deref_mut() {
            // The min selects the unclipped branch whenever it is smaller or
            // the ratio is inside the clip range; otherwise it is flat.
            let d_log_prob = if unclipped <= clipped_obj { -s.advantage * ratio / n } else { 0.0 };
            let diff = s.action - cache.mean;
            let d_mean = d_log_prob * diff * inv_var;
            let d_log_std = d_log_prob * (diff * diff * inv_var - 1.0);
            let d_value = cfg.value_coef * 2.0 * err / n;
            params.backward(&cache, d_mean, d_value, d_log_std, g);
        }
    }
    stats.loss = stats.policy_loss + cfg.value_coef * stats.value_loss;
    stats.clip_fraction = clipped as f64 / n;
    if !stats.loss.is_finite() {
        return Err(PpoError::NonFinite {
            policy_loss: stats.policy_loss,
            value_loss: stats.value_loss,
        });
    }
    Ok(stats)
}

/// Clipped surrogate plus weighted value error, to be minimized:
/// `-E[min(r A, clip(r, 1-ε, 1+ε) A)] + c E[(V(s) - V_targ)²]`.
pub fn ppo_loss(params: &PolicyParams, batch: &[Sample], cfg: &PpoConfig) -> Result<PpoStats, PpoError> {
    evaluate(params, batch, cfg, None)
}

/// [`ppo_loss`] plus its exact gradient with respect to every parameter.
pub fn ppo_loss_and_grad(
    params: &PolicyParams,
    batch: &[Sample],
    cfg: &PpoConfig,
) -> Result<(PpoStats, Vec<f64>), PpoError> {
    let mut grad = vec![0.0; params.values.len()];
    let stats = evaluate(params, batch, cfg, Some(&mut grad))?;
    Ok((stats, grad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeded_rng;
    use rand::Rng as _;

    fn batch(params: &PolicyParams, rng: &mut crate::Rng, n: usize) -> Vec<Sample> {
        (0..n)
            .map(|_| {
                let obs: Observation = core::array::from_fn(|_| rng.random_range(-30.0..30.0));
                let (action, old_log_prob) = params.sample_action(&obs, rng).unwrap();
                Sample {
                    obs,
                    action,
                    old_log_prob,
                    advantage: rng.random_range(-2.0..2.0),
                    value_target: rng.random_range(-1.0..1.0),
                }
            })
            .collect()
    }

    #[test]
    fn unchanged_params_give_mean_advantage() {
        let mut rng = seeded_rng(1);
        let p = PolicyParams::random(&mut rng, 0.3, 2.0);
        let b = batch(&p, &mut rng, 32);
        let cfg = PpoConfig::default();
        let stats = ppo_loss(&p, &b, &cfg).unwrap();
        let mean_adv = b.iter().map(|s| s.advantage).sum::<f64>() / 32.0;
        assert!((stats.policy_loss + mean_adv).abs() < 1e-12);
        assert_eq!(stats.clip_fraction, 0.0);
        assert!(stats.approx_kl.abs() < 1e-6);
    }

    #[test]
    fn clipped_positive_advantage_has_no_policy_gradient() {
        let mut rng = seeded_rng(2);
        let p = PolicyParams::random(&mut rng, 0.3, 1.0);
        let obs = [20.0, 1.0, 20.0, 0.0, 0.0];
        let (mean, _) = p.forward(&obs).unwrap();
        let action = mean + 0.1;
        // Old policy made the action much less likely, so r >> 1 + ε.
        let old_log_prob = gaussian_log_prob(action, mean, p.log_std()) - 1.0;
        let s = Sample { obs, action, old_log_prob, advantage: 1.5, value_target: 0.0 };
        let cfg = PpoConfig { value_coef: 0.0, ..PpoConfig::default() };
        let (stats, grad) = ppo_loss_and_grad(&p, &[s], &cfg).unwrap();
        assert_eq!(stats.clip_fraction, 1.0);
        assert!((stats.policy_loss + 1.2 * 1.5).abs() < 1e-12);
        assert!(grad.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn empty_batch_is_an_error() {
        let p = PolicyParams::zeros(1.0);
        assert_eq!(ppo_loss(&p, &[], &PpoConfig::default()), Err(PpoError::EmptyBatch));
    }

    #[test]
    fn non_finite_loss_is_reported() {
        let mut p = PolicyParams::zeros(1.0);
        p.values.iter_mut().for_each(|v| *v = 1e200);
        p.set_log_std(0.0);
        let s = Sample {
            obs: [0.0; 5],
            action: 1.0,
            old_log_prob: 0.0,
            advantage: 1.0,
            value_target: 0.0,
        };
        assert!(matches!(
            ppo_loss(&p, &[s], &PpoConfig::default()),
            Err(PpoError::NonFinite { .. })
        ));
    }

    #[test]
    fn normalization() {
        let mut xs = [1.0, 2.0, 3.0, 4.0];
        normalize(&mut xs);
        assert!(xs.iter().sum::<f64>().abs() < 1e-12);
        let var = xs.iter().map(|x| x * x).sum::<f64>() / 4.0;
        assert!((var - 1.0).abs() < 1e-6);
    }
}
