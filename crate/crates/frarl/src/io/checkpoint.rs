//! Versioned text checkpoints. Floats are stored as the hex digits of their
//! bit patterns, so save → load → save is byte-identical.
//!
//! ```text
//! frarl-checkpoint 1
//! method frarl
//! seed 1
//! steps 102400
//! ...
//! agent protagonist
//! action-scale 3ff0000000000000
//! input-scale <5 values>
//! tensor hidden1.weight 64 5
//! <values, 8 per line>
//! ...
//! adam <beta1> <beta2> <epsilon> <step count>
//! moment m hidden1.weight 64 5
//! ...
//! end agent
//! falsified <count>
//! entry <iteration> <robustness> <source> <offset> <ego velocity> <lead velocity> <length>
//! <values>
//! end checkpoint
//! ```

use std::path::Path;

use frarl_core::mtl::Robustness;
use frarl_core::policy::{Adam, AdamConfig, PolicyParams, Tensor};
use frarl_core::sim::{Scenario, ScenarioSource, OBS_DIM};
use frarl_core::train::{Agent, Method, PoolEntry, TrainerState};

use super::{hex, parse_hex, read_to_string, write_string, FormatError};

pub const MAGIC: &str = "frarl-checkpoint";
pub const VERSION: u32 = 1;
const PER_LINE: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub method: Method,
    pub seed: u64,
    pub state: TrainerState,
}

fn push_values(out: &mut String, values: &[f64]) {
    for chunk in values.chunks(PER_LINE) {
        let line: Vec<String> = chunk.iter().map(|v| hex(*v)).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
}

fn push_tensors(out: &mut String, prefix: &str, values: &[f64]) {
    for t in PolicyParams::tensors() {
        let dims: Vec<String> = t.shape.iter().map(|d| d.to_string()).collect();
        out.push_str(&format!("{prefix} {} {}\n", t.name, dims.join(" ")));
        push_values(out, &values[t.range.clone()]);
    }
}

fn push_agent(out: &mut String, role: &str, agent: &Agent) {
    let p = &agent.params;
    out.push_str(&format!("agent {role}\n"));
    out.push_str(&format!("action-scale {}\n", hex(p.action_scale)));
    let scale: Vec<String> = p.input_scale.iter().map(|v| hex(*v)).collect();
    out.push_str(&format!("input-scale {}\n", scale.join(" ")));
    push_tensors(out, "tensor", &p.values);
    let c = agent.adam.config;
    out.push_str(&format!("adam {} {} {} {}\n", hex(c.beta1), hex(c.beta2), hex(c.epsilon), agent.adam.t));
    push_tensors(out, "moment m", &agent.adam.m);
    push_tensors(out, "moment v", &agent.adam.v);
    out.push_str("end agent\n");
}

pub fn format_checkpoint(ck: &Checkpoint) -> String {
    let s = &ck.state;
    let mut out = format!("{MAGIC} {VERSION}\n");
    out.push_str(&format!("method {}\nseed {}\n", ck.method, ck.seed));
    out.push_str(&format!("steps {}\niteration {}\n", s.steps, s.iteration));
    out.push_str(&format!("protagonist-updates {}\nadversary-updates {}\n", s.protagonist_updates, s.adversary_updates));
    out.push_str(&format!("cycle-position {}\nfalsify-calls {}\n", s.cycle_position, s.falsify_calls));
    out.push_str(&format!("clean-calls {}\nconverged {}\n", s.clean_calls, s.converged));
    push_agent(&mut out, "protagonist", &s.protagonist);
    if let Some(adv) = &s.adversary {
        push_agent(&mut out, "adversary", adv);
    }
    out.push_str(&format!("falsified {}\n", s.falsified.len()));
    for e in &s.falsified {
        let sc = &e.scenario;
        out.push_str(&format!(
            "entry {} {} {} {} {} {} {}\n",
            e.iteration,
            hex(e.robustness.to_f64()),
            sc.source.as_str(),
            hex(sc.offset),
            hex(sc.ego_velocity),
            hex(sc.lead_velocity),
            sc.lead_accel.len()
        ));
        push_values(&mut out, &sc.lead_accel);
    }
    out.push_str("end checkpoint\n");
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next_line(&mut self) -> Result<&'a str, FormatError> {
        match self.inner.next() {
            Some((i, l)) => {
                self.line = i + 1;
                Ok(l)
            }
            None => Err(FormatError::at(self.line + 1, "unexpected end of checkpoint")),
        }
    }

    fn err(&self, message: impl Into<String>) -> FormatError {
        FormatError::at(self.line, message)
    }

    /// Next line split into words, checking the leading keyword.
    fn keyed(&mut self, key: &str) -> Result<Vec<&'a str>, FormatError> {
        let line = self.next_line()?;
        let words: Vec<&str> = line.split_whitespace().collect();
        let key_words: Vec<&str> = key.split_whitespace().collect();
        if words.len() < key_words.len() || words[..key_words.len()] != key_words[..] {
            return Err(self.err(format!("expected `{key}`, found {line:?}")));
        }
        Ok(words[key_words.len()..].to_vec())
    }

    fn value<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, FormatError> {
        let words = self.keyed(key)?;
        match words.as_slice() {
            [v] => v.parse::<T>().map_err(|_| self.err(format!("bad value {v:?} for `{key}`"))),
            _ => Err(self.err(format!("`{key}` takes one value"))),
        }
    }

    fn float(&self, word: &str) -> Result<f64, FormatError> {
        parse_hex(word).ok_or_else(|| self.err(format!("{word:?} is not a 16-digit hex float")))
    }

    fn values(&mut self, n: usize) -> Result<Vec<f64>, FormatError> {
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let line = self.next_line()?;
            for w in line.split_whitespace() {
                out.push(self.float(w)?);
            }
        }
        if out.len() != n {
            return Err(self.err(format!("expected {n} values, found {}", out.len())));
        }
        Ok(out)
    }

    fn tensors(&mut self, prefix: &str) -> Result<Vec<f64>, FormatError> {
        let mut values = vec![0.0; PolicyParams::LEN];
        for Tensor { name, shape, range } in PolicyParams::tensors() {
            let words = self.keyed(prefix)?;
            let (got_name, dims) = words.split_first().ok_or_else(|| self.err("tensor line without a name"))?;
            if *got_name != name {
                return Err(self.err(format!("architecture mismatch: expected tensor `{name}`, found `{got_name}`")));
            }
            let dims: Vec<usize> = dims
                .iter()
                .map(|d| d.parse::<usize>().map_err(|_| self.err(format!("bad dimension {d:?}"))))
                .collect::<Result<_, _>>()?;
            if dims != shape {
                return Err(self.err(format!("architecture mismatch: tensor `{name}` has shape {dims:?}, expected {shape:?}")));
            }
            values[range.clone()].copy_from_slice(&self.values(range.len())?);
        }
        Ok(values)
    }

    fn agent(&mut self, role: &str) -> Result<Agent, FormatError> {
        let words = self.keyed("agent")?;
        if words != [role] {
            return Err(self.err(format!("expected agent {role}, found {words:?}")));
        }
        let action_scale = match self.keyed("action-scale")?.as_slice() {
            [v] => self.float(v)?,
            _ => return Err(self.err("action-scale takes one value")),
        };
        let scale_words = self.keyed("input-scale")?;
        if scale_words.len() != OBS_DIM {
            return Err(self.err(format!("input-scale needs {OBS_DIM} values")));
        }
        let mut input_scale = [0.0; OBS_DIM];
        for (slot, w) in input_scale.iter_mut().zip(&scale_words) {
            *slot = self.float(w)?;
        }
        let values = self.tensors("tensor")?;
        let adam = self.keyed("adam")?;
        let [b1, b2, eps, t] = adam.as_slice() else {
            return Err(self.err("adam takes beta1, beta2, epsilon and a step count"));
        };
        let config = AdamConfig { beta1: self.float(b1)?, beta2: self.float(b2)?, epsilon: self.float(eps)? };
        let t: u64 = t.parse().map_err(|_| self.err(format!("bad step count {t:?}")))?;
        let m = self.tensors("moment m")?;
        let v = self.tensors("moment v")?;
        self.keyed("end agent")?;
        let params = PolicyParams { values, input_scale, action_scale };
        params.check_finite().map_err(|e| self.err(e.to_string()))?;
        Ok(Agent { params, adam: Adam { config, m, v, t } })
    }
}

pub fn parse_checkpoint(text: &str) -> Result<Checkpoint, FormatError> {
    let mut l = Lines { inner: text.lines().enumerate(), line: 0 };
    let version: u32 = l.value(MAGIC)?;
    if version != VERSION {
        return Err(l.err(format!("unsupported checkpoint version {version}")));
    }
    let method: String = l.value("method")?;
    let method: Method = method.parse().map_err(|e: frarl_core::train::ConfigError| l.err(e.to_string()))?;
    let seed = l.value("seed")?;
    let steps = l.value("steps")?;
    let iteration = l.value("iteration")?;
    let protagonist_updates = l.value("protagonist-updates")?;
    let adversary_updates = l.value("adversary-updates")?;
    let cycle_position = l.value("cycle-position")?;
    let falsify_calls = l.value("falsify-calls")?;
    let clean_calls = l.value("clean-calls")?;
    let converged = l.value("converged")?;
    let protagonist = l.agent("protagonist")?;
    let adversary = if method == Method::Rarl { Some(l.agent("adversary")?) } else { None };
    let count: usize = l.value("falsified")?;
    let mut falsified = Vec::with_capacity(count);
    for _ in 0..count {
        let words = l.keyed("entry")?;
        let [iter, rob, source, offset, ego, lead, len] = words.as_slice() else {
            return Err(l.err("entry takes seven fields"));
        };
        let iteration = iter.parse().map_err(|_| l.err(format!("bad iteration {iter:?}")))?;
        let robustness = Robustness::from(l.float(rob)?);
        let source: ScenarioSource = source.parse().map_err(|_| l.err(format!("unknown source {source:?}")))?;
        let (offset, ego_velocity, lead_velocity) = (l.float(offset)?, l.float(ego)?, l.float(lead)?);
        let len: usize = len.parse().map_err(|_| l.err(format!("bad length {len:?}")))?;
        let lead_accel = l.values(len)?;
        let scenario = Scenario { source, offset, ego_velocity, lead_velocity, lead_accel };
        falsified.push(PoolEntry { scenario, robustness, iteration });
    }
    l.keyed("end checkpoint")?;
    let state = TrainerState {
        steps,
        iteration,
        protagonist,
        adversary,
        falsified,
        protagonist_updates,
        adversary_updates,
        cycle_position,
        falsify_calls,
        clean_calls,
        converged,
    };
    Ok(Checkpoint { method, seed, state })
}

pub fn read_checkpoint(path: &Path) -> Result<Checkpoint, FormatError> {
    parse_checkpoint(&read_to_string(path)?).map_err(|e| e.in_file(path))
}

pub fn write_checkpoint(path: &Path, ck: &Checkpoint) -> Result<(), FormatError> {
    write_string(path, &format_checkpoint(ck))
}
