//! Training configuration files: `key = value` lines, `#` comments.
//!
//! [`format_config`] writes every key with a short description, so the
//! output of `format_config(&TrainConfig::default())` doubles as the
//! reference of all keys and defaults. Keys missing from a file keep their
//! defaults; unknown keys are errors.

use std::path::Path;

use frarl_core::sim::Task;
use frarl_core::train::{Method, TrainConfig};

use super::{read_to_string, write_string, FormatError};

type Getter = fn(&TrainConfig) -> String;
type Setter = fn(&mut TrainConfig, &str) -> Result<(), String>;

fn num<T: std::str::FromStr>(v: &str) -> Result<T, String> {
    v.parse::<T>().map_err(|_| format!("{v:?} is not a valid number"))
}

fn boolean(v: &str) -> Result<bool, String> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!("{v:?} is not true or false")),
    }
}

fn range(v: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = v.split_whitespace().collect();
    match parts.as_slice() {
        [lo, hi] => Ok((num(lo)?, num(hi)?)),
        _ => Err(format!("{v:?} is not a `low high` pair")),
    }
}

macro_rules! keys {
    ($( $key:literal, $doc:literal, |$c:ident| $get:expr, |$m:ident, $v:ident| $set:expr; )*) => {
        const KEYS: &[(&str, &str, Getter, Setter)] = &[
            $( ($key, $doc, |$c: &TrainConfig| $get, |$m: &mut TrainConfig, $v: &str| { $set; Ok(()) }), )*
        ];
    };
}

keys! {
    "method", "ppo | rarl | frarl", |c| c.method.to_string(), |m, v| m.method = v.parse::<Method>().map_err(|e| e.to_string())?;
    "task", "ba (braking assistance) | acc (adaptive cruise control)", |c| c.task.as_str().to_string(), |m, v| m.task = v.parse::<Task>().map_err(|_| format!("unknown task {v:?}"))?;
    "seed", "run seed; every random stream is derived from it", |c| c.seed.to_string(), |m, v| m.seed = num(v)?;
    "total-steps", "environment steps over all actors", |c| c.total_steps.to_string(), |m, v| m.total_steps = num(v)?;
    "warmup-steps", "steps before the adversary or falsifier starts", |c| c.warmup_steps.to_string(), |m, v| m.warmup_steps = num(v)?;
    "falsify-every", "protagonist iterations between falsifier calls", |c| c.falsify_every.to_string(), |m, v| m.falsify_every = num(v)?;
    "falsify-candidates", "lowest-robustness scenarios added per call", |c| c.falsify_candidates.to_string(), |m, v| m.falsify_candidates = num(v)?;
    "falsify-budget", "simulations per falsifier call", |c| c.falsify_budget.to_string(), |m, v| m.falsify_budget = num(v)?;
    "control-points", "leader acceleration control points searched by the falsifier", |c| c.control_points.to_string(), |m, v| m.control_points = num(v)?;
    "convergence-calls", "consecutive violation-free falsifier calls that end training", |c| c.convergence_calls.to_string(), |m, v| m.convergence_calls = num(v)?;
    "protagonist-iters", "protagonist iterations per RARL cycle", |c| c.protagonist_iters.to_string(), |m, v| m.protagonist_iters = num(v)?;
    "adversary-iters", "adversary iterations per RARL cycle", |c| c.adversary_iters.to_string(), |m, v| m.adversary_iters = num(v)?;
    "adversarial-weight", "share of episodes on falsified scenarios (FRARL) or with the adversary leader (RARL)", |c| c.adversarial_weight.to_string(), |m, v| m.adversarial_weight = num(v)?;
    "eval-every", "iterations between evaluations on the test sets (0 = never)", |c| c.eval_every.to_string(), |m, v| m.eval_every = num(v)?;
    "ppo.clip-range", "probability-ratio clip range", |c| c.ppo.clip_range.to_string(), |m, v| m.ppo.clip_range = num(v)?;
    "ppo.value-coef", "weight of the value loss", |c| c.ppo.value_coef.to_string(), |m, v| m.ppo.value_coef = num(v)?;
    "ppo.gamma", "discount factor", |c| c.ppo.gamma.to_string(), |m, v| m.ppo.gamma = num(v)?;
    "ppo.lambda", "GAE lambda", |c| c.ppo.lambda.to_string(), |m, v| m.ppo.lambda = num(v)?;
    "ppo.learning-rate", "Adam step size", |c| c.ppo.learning_rate.to_string(), |m, v| m.ppo.learning_rate = num(v)?;
    "ppo.minibatch-size", "samples per gradient step", |c| c.ppo.minibatch_size.to_string(), |m, v| m.ppo.minibatch_size = num(v)?;
    "ppo.epochs", "passes over each batch", |c| c.ppo.epochs.to_string(), |m, v| m.ppo.epochs = num(v)?;
    "ppo.n-actors", "parallel environments", |c| c.ppo.n_actors.to_string(), |m, v| m.ppo.n_actors = num(v)?;
    "ppo.steps-per-actor", "steps per environment per iteration", |c| c.ppo.steps_per_actor.to_string(), |m, v| m.ppo.steps_per_actor = num(v)?;
    "ppo.normalize-advantages", "standardize advantages per batch", |c| c.ppo.normalize_advantages.to_string(), |m, v| m.ppo.normalize_advantages = boolean(v)?;
    "ppo.max-grad-norm", "global gradient-norm clip, or none", |c| c.ppo.max_grad_norm.map_or("none".into(), |x| x.to_string()), |m, v| m.ppo.max_grad_norm = if v == "none" { None } else { Some(num(v)?) };
    "ppo.action-scale", "m/s^2 per unit of the action-mean output", |c| c.ppo.action_scale.to_string(), |m, v| m.ppo.action_scale = num(v)?;
    "ppo.adam.beta1", "first-moment decay", |c| c.ppo.adam.beta1.to_string(), |m, v| m.ppo.adam.beta1 = num(v)?;
    "ppo.adam.beta2", "second-moment decay", |c| c.ppo.adam.beta2.to_string(), |m, v| m.ppo.adam.beta2 = num(v)?;
    "ppo.adam.epsilon", "denominator floor", |c| c.ppo.adam.epsilon.to_string(), |m, v| m.ppo.adam.epsilon = num(v)?;
    "ce.samples-per-iter", "candidates per cross-entropy iteration", |c| c.ce.samples_per_iter.to_string(), |m, v| m.ce.samples_per_iter = num(v)?;
    "ce.elite-fraction", "share of candidates refit as elites", |c| c.ce.elite_fraction.to_string(), |m, v| m.ce.elite_fraction = num(v)?;
    "ce.smoothing", "weight of the elite fit against the previous proposal", |c| c.ce.smoothing.to_string(), |m, v| m.ce.smoothing = num(v)?;
    "ce.iterations", "maximum cross-entropy iterations", |c| c.ce.iterations.to_string(), |m, v| m.ce.iterations = num(v)?;
    "ce.std-floor", "lower bound of every proposal std", |c| c.ce.std_floor.to_string(), |m, v| m.ce.std_floor = num(v)?;
    "ce.convergence-ratio", "stop when every std is below this share of its range", |c| c.ce.convergence_ratio.to_string(), |m, v| m.ce.convergence_ratio = num(v)?;
    "ce.stop-on-falsified", "stop a call after the first batch with a violation", |c| c.ce.stop_on_falsified.to_string(), |m, v| m.ce.stop_on_falsified = boolean(v)?;
    "ce.keep-best", "candidates reported by standalone falsification", |c| c.ce.keep_best.to_string(), |m, v| m.ce.keep_best = num(v)?;
    "sim.lane-length", "m", |c| c.sim.lane_length.to_string(), |m, v| m.sim.lane_length = num(v)?;
    "sim.max-steps", "steps per episode", |c| c.sim.max_steps.to_string(), |m, v| m.sim.max_steps = num(v)?;
    "sim.dt", "s per step", |c| c.sim.dt.to_string(), |m, v| m.sim.dt = num(v)?;
    "sim.a-max", "acceleration bound, m/s^2", |c| c.sim.a_max.to_string(), |m, v| m.sim.a_max = num(v)?;
    "sim.reaction-delay", "s, used by the safe distance", |c| c.sim.reaction_delay.to_string(), |m, v| m.sim.reaction_delay = num(v)?;
    "sim.ego-start", "initial ego position, m", |c| c.sim.ego_start.to_string(), |m, v| m.sim.ego_start = num(v)?;
    "sim.offset-range", "leader placement beyond the safe distance, m", |c| format!("{} {}", c.sim.offset_range.0, c.sim.offset_range.1), |m, v| m.sim.offset_range = range(v)?;
    "sim.ego-velocity-range", "initial ego velocity, m/s", |c| format!("{} {}", c.sim.ego_velocity_range.0, c.sim.ego_velocity_range.1), |m, v| m.sim.ego_velocity_range = range(v)?;
    "sim.lead-velocity-range", "initial leader velocity, m/s", |c| format!("{} {}", c.sim.lead_velocity_range.0, c.sim.lead_velocity_range.1), |m, v| m.sim.lead_velocity_range = range(v)?;
}

/// Documented listing of every key.
pub fn format_config(cfg: &TrainConfig) -> String {
    let mut out = String::new();
    for (key, doc, get, _) in KEYS {
        out.push_str(&format!("# {doc}\n{key} = {}\n", get(cfg)));
    }
    out
}

/// Applies the file's settings on top of `base` and validates the result.
pub fn parse_config(text: &str, base: TrainConfig) -> Result<TrainConfig, FormatError> {
    let mut cfg = base;
    let mut seen = std::collections::BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| FormatError::at(line, "expected `key = value`"))?;
        let (_, _, _, set) = KEYS
            .iter()
            .find(|(k, ..)| *k == key)
            .ok_or_else(|| FormatError::at(line, format!("unknown key {key:?}")))?;
        if !seen.insert(key.to_string()) {
            return Err(FormatError::at(line, format!("duplicate key {key:?}")));
        }
        set(&mut cfg, value).map_err(|m| FormatError::at(line, format!("{key}: {m}")))?;
    }
    cfg.validate().map_err(|e| FormatError::at(text.lines().count(), e.to_string()))?;
    Ok(cfg)
}

pub fn read_config(path: &Path, base: TrainConfig) -> Result<TrainConfig, FormatError> {
    parse_config(&read_to_string(path)?, base).map_err(|e| e.in_file(path))
}

pub fn write_config(path: &Path, cfg: &TrainConfig) -> Result<(), FormatError> {
    write_string(path, &format_config(cfg))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = TrainConfig::default();
        assert_eq!(parse_config(&format_config(&cfg), TrainConfig::default()).unwrap(), cfg);
    }

    #[test]
    fn changed_values_round_trip() {
        let mut cfg = TrainConfig { method: Method::Frarl, task: Task::Acc, seed: 17, ..TrainConfig::default() };
        cfg.ppo.max_grad_norm = None;
        cfg.ppo.learning_rate = 1.2345e-4;
        cfg.sim.offset_range = (1.5, 30.25);
        cfg.ce.stop_on_falsified = true;
        let text = format_config(&cfg);
        assert_eq!(parse_config(&text, TrainConfig::default()).unwrap(), cfg);
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let cfg = parse_config("# short run\nseed = 3\ntotal-steps = 4096 # two iterations\nwarmup-steps = 0\n", TrainConfig::default()).unwrap();
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.total_steps, 4096);
        assert_eq!(cfg.ppo, TrainConfig::default().ppo);
    }

    #[test]
    fn errors_name_the_line() {
        let err = parse_config("seed = 1\nbogus = 2\n", TrainConfig::default()).unwrap_err().to_string();
        assert!(err.contains("line 2") && err.contains("bogus"), "{err}");
        let err = parse_config("ppo.gamma = high\n", TrainConfig::default()).unwrap_err().to_string();
        assert!(err.contains("line 1"), "{err}");
        let err = parse_config("seed = 1\nseed = 2\n", TrainConfig::default()).unwrap_err().to_string();
        assert!(err.contains("duplicate"), "{err}");
        let err = parse_config("ppo.gamma = 1.5\n", TrainConfig::default()).unwrap_err().to_string();
        assert!(err.contains("ppo.gamma"), "{err}");
    }

    #[test]
    fn every_config_field_has_a_key() {
        // A default config has 46 settings, one key each.
        assert_eq!(KEYS.len(), 46);
    }
}
