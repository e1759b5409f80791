use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use super::pool::ScenarioPool;
use super::trainer::TrainError;
use crate::policy::{compute_gae, normalize, ppo_loss_and_grad, Adam, PolicyParams, PpoConfig, PpoError, PpoStats, Sample};
use crate::sim::{Env, Observation, ScenarioSource, SimConfig, Task, Termination};

/// A policy together with its optimizer state.
#[derive(Clone, Debug, PartialEq)]
pub struct Agent {
    pub params: PolicyParams,
    pub adam: Adam,
}

impl Agent {
    pub fn new(rng: &mut crate::Rng, cfg: &PpoConfig) -> Self {
        let params = PolicyParams::init(rng, cfg.action_scale);
        let adam = Adam::with_config(params.values.len(), cfg.adam);
        Agent { params, adam }
    }

    /// Epochs of shuffled minibatch PPO on one collected batch. Returns the
    /// statistics averaged over minibatches.
    pub fn update(&mut self, mut batch: Vec<Sample>, cfg: &PpoConfig, rng: &mut crate::Rng) -> Result<PpoStats, PpoError> {
        if batch.is_empty() {
            return Err(PpoError::EmptyBatch);
        }
        if cfg.normalize_advantages {
            let mut adv: Vec<f64> = batch.iter().map(|s| s.advantage).collect();
            normalize(&mut adv);
            batch.iter_mut().zip(adv).for_each(|(s, a)| s.advantage = a);
        }
        let mut order: Vec<usize> = (0..batch.len()).collect();
        let mut minibatch = Vec::with_capacity(cfg.minibatch_size);
        let mut total = PpoStats::default();
        let mut count = 0.0;
        for _ in 0..cfg.epochs {
            order.shuffle(rng);
            for chunk in order.chunks(cfg.minibatch_size) {
                minibatch.clear();
                minibatch.extend(chunk.iter().map(|&i| batch[i]));
                let (stats, mut grad) = ppo_loss_and_grad(&self.params, &minibatch, cfg)?;
                if let Some(max_norm) = cfg.max_grad_norm {
                    let norm = libm::sqrt(grad.iter().map(|g| g * g).sum::<f64>());
                    if norm > max_norm {
                        grad.iter_mut().for_each(|g| *g *= max_norm / norm);
                    }
                }
                self.adam.step(&mut self.params.values, &grad, cfg.learning_rate);
                total.loss += stats.loss;
                total.policy_loss += stats.policy_loss;
                total.value_loss += stats.value_loss;
                total.clip_fraction += stats.clip_fraction;
                total.approx_kl += stats.approx_kl;
                count += 1.0;
            }
        }
        self.params.check_finite()?;
        Ok(PpoStats {
            loss: total.loss / count,
            policy_loss: total.policy_loss / count,
            value_loss: total.value_loss / count,
            clip_fraction: total.clip_fraction / count,
            approx_kl: total.approx_kl / count,
        })
    }
}

/// Outcome of one finished training episode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpisodeStats {
    pub reward: f64,
    pub termination: Termination,
    pub violation_steps: usize,
    pub adversarial: bool,
}

/// Who drives the leader during collection.
#[derive(Clone, Copy)]
pub(crate) enum LeadMode<'a> {
    /// Scenario acceleration traces only.
    Scenario,
    /// Each new episode is adversary-driven with probability `weight`.
    Mixed { adversary: &'a PolicyParams, weight: f64 },
    /// Every new episode is adversary-driven and adversary samples are kept.
    Adversary(&'a PolicyParams),
}

/// A persistent environment slot; episodes continue across iterations.
#[derive(Clone, Debug, Default)]
pub(crate) struct Actor {
    env: Option<Env>,
    obs: Observation,
    adversarial: bool,
    reward: f64,
    violations: usize,
}

#[derive(Default)]
struct Segment {
    obs: Vec<Observation>,
    actions: Vec<f64>,
    log_probs: Vec<f64>,
    values: Vec<f64>,
    rewards: Vec<f64>,
    dones: Vec<bool>,
}

impl Segment {
    fn push(&mut self, obs: Observation, action: f64, log_prob: f64, value: f64, reward: f64, done: bool) {
        self.obs.push(obs);
        self.actions.push(action);
        self.log_probs.push(log_prob);
        self.values.push(value);
        self.rewards.push(reward);
        self.dones.push(done);
    }

    fn into_samples(self, last_value: f64, cfg: &PpoConfig, out: &mut Vec<Sample>) -> Result<(), TrainError> {
        let (adv, targets) = compute_gae(&self.rewards, &self.values, &self.dones, last_value, cfg.gamma, cfg.lambda)?;
        for t in 0..self.obs.len() {
            out.push(Sample {
                obs: self.obs[t],
                action: self.actions[t],
                old_log_prob: self.log_probs[t],
                advantage: adv[t],
                value_target: targets[t],
            });
        }
        Ok(())
    }
}

pub(crate) struct Collection {
    pub protagonist: Vec<Sample>,
    pub adversary: Vec<Sample>,
    pub episodes: Vec<EpisodeStats>,
    pub violation_steps: usize,
}

/// Runs every actor for `steps_per_actor` steps with stochastic policies and
/// returns GAE-processed samples. Actors are stepped in order from one
/// generator, which keeps collection deterministic for a fixed actor count.
#[allow(clippy::too_many_arguments)]
pub(crate) fn collect(
    actors: &mut [Actor],
    protagonist: &PolicyParams,
    lead: LeadMode<'_>,
    pool: &ScenarioPool,
    task: Task,
    ppo: &PpoConfig,
    sim: &SimConfig,
    rng: &mut crate::Rng,
) -> Result<Collection, TrainError> {
    let mut out = Collection {
        protagonist: Vec::with_capacity(actors.len() * ppo.steps_per_actor),
        adversary: Vec::new(),
        episodes: Vec::new(),
        violation_steps: 0,
    };
    let keep_adversary = matches!(lead, LeadMode::Adversary(_));
    for actor in actors.iter_mut() {
        let mut seg = Segment::default();
        let mut adv_seg = Segment::default();
        for _ in 0..ppo.steps_per_actor {
            if actor.env.is_none() {
                let mut scenario = pool.sample(rng).clone();
                actor.adversarial = match lead {
                    LeadMode::Scenario => false,
                    LeadMode::Mixed { weight, .. } => rand::Rng::random::<f64>(rng) < weight,
                    LeadMode::Adversary(_) => true,
                };
                if actor.adversarial {
                    scenario.source = ScenarioSource::Adversary;
                }
                let (env, obs) = Env::reset(scenario, sim)?;
                actor.env = Some(env);
                actor.obs = obs;
                actor.reward = 0.0;
                actor.violations = 0;
            }
            let env = actor.env.as_mut().expect("actor environment initialized above");
            let obs = actor.obs;
            let (mean, value) = protagonist.forward(&obs)?;
            let (action, log_prob) = sample_around(protagonist, mean, rng);
            let adversary = match lead {
                LeadMode::Mixed { adversary, .. } | LeadMode::Adversary(adversary) if actor.adversarial => Some(adversary),
                _ => None,
            };
            let out_step = match adversary {
                Some(adv) => {
                    let (adv_mean, adv_value) = adv.forward(&obs)?;
                    let (lead_accel, adv_log_prob) = sample_around(adv, adv_mean, rng);
                    let step = env.step_with_lead(action, lead_accel)?;
                    if keep_adversary {
                        let r = task.reward(&step.state, sim);
                        adv_seg.push(obs, lead_accel, adv_log_prob, adv_value, crate::sim::adversary_reward(r), step.done);
                    }
                    step
                }
                None => env.step(action)?,
            };
            let reward = task.reward(&out_step.state, sim);
            seg.push(obs, action, log_prob, value, reward, out_step.done);
            actor.reward += reward;
            if out_step.state.violates_safe_distance(sim) {
                actor.violations += 1;
                out.violation_steps += 1;
            }
            actor.obs = out_step.observation;
            if out_step.done {
                out.episodes.push(EpisodeStats {
                    reward: actor.reward,
                    termination: out_step.termination,
                    violation_steps: actor.violations,
                    adversarial: actor.adversarial,
                });
                actor.env = None;
            }
        }
        let (last, adv_last) = match &actor.env {
            Some(_) => {
                let last = protagonist.forward(&actor.obs)?.1;
                let adv_last = match lead {
                    LeadMode::Adversary(adv) => adv.forward(&actor.obs)?.1,
                    _ => 0.0,
                };
                (last, adv_last)
            }
            None => (0.0, 0.0),
        };
        seg.into_samples(last, ppo, &mut out.protagonist)?;
        if keep_adversary {
            adv_seg.into_samples(adv_last, ppo, &mut out.adversary)?;
        }
    }
    Ok(out)
}

fn sample_around(params: &PolicyParams, mean: f64, rng: &mut crate::Rng) -> (f64, f64) {
    let noise: f64 = rand::Rng::sample(rng, rand_distr::StandardNormal);
    let action = mean + params.std() * noise;
    (action, crate::policy::gaussian_log_prob(action, mean, params.log_std()))
}

/// Fresh actor slots.
pub(crate) fn actors(n: usize) -> Vec<Actor> {
    vec![Actor::default(); n]
}
