//! Shared-trunk actor-critic MLP: `5 -> 64 tanh -> 64 tanh -> {mean, value}`
//! with a state-independent Gaussian log-std.
//!
//! Parameters live in one flat vector so the optimizer, finite-difference
//! checks and checkpoints can treat them uniformly.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::Range;

use rand::Rng as _;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::sim::{Controller, Observation, OBS_DIM};

pub const HIDDEN: usize = 64;

const W1: Range<usize> = 0..HIDDEN * OBS_DIM;
const B1: Range<usize> = W1.end..W1.end + HIDDEN;
const W2: Range<usize> = B1.end..B1.end + HIDDEN * HIDDEN;
const B2: Range<usize> = W2.end..W2.end + HIDDEN;
const WM: Range<usize> = B2.end..B2.end + HIDDEN;
const BM: usize = WM.end;
const WV: Range<usize> = BM + 1..BM + 1 + HIDDEN;
const BV: usize = WV.end;
const LOG_STD: usize = BV + 1;
const N_PARAMS: usize = LOG_STD + 1;

/// Fixed per-feature input scaling: gap, relative velocity, ego velocity,
/// leader and ego acceleration.
pub const DEFAULT_INPUT_SCALE: [f64; OBS_DIM] = [1.0 / 50.0, 1.0 / 10.0, 1.0 / 30.0, 1.0 / 10.0, 1.0 / 10.0];

/// A named view of part of the parameter vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    pub name: &'static str,
    pub shape: Vec<usize>,
    pub range: Range<usize>,
}

#[derive(Debug, Error, PartialEq)]
pub enum ShapeError {
    #[error("missing tensor `{0}`")]
    Missing(String),
    #[error("tensor `{name}` has shape {got:?}, expected {expected:?}")]
    Shape { name: String, got: Vec<usize>, expected: Vec<usize> },
    #[error("parameter `{0}` is not finite")]
    NonFinite(String),
    #[error("observation feature {0} is not finite")]
    NonFiniteInput(usize),
}

/// Network weights plus the fixed input and action scaling.
#[derive(Clone, Debug, PartialEq)]
pub struct PolicyParams {
    pub values: Vec<f64>,
    /// Multiplies each observation feature before the first layer.
    pub input_scale: [f64; OBS_DIM],
    /// Multiplies the mean head so its output is in m/s².
    pub action_scale: f64,
}

/// Activations kept for backpropagation.
#[derive(Clone, Debug)]
pub struct ForwardCache {
    input: [f64; OBS_DIM],
    h1: [f64; HIDDEN],
    h2: [f64; HIDDEN],
    pub mean: f64,
    pub value: f64,
}

fn orthogonal_rows(rows: usize, cols: usize, gain: f64, rng: &mut crate::Rng) -> Vec<f64> {
    // Gram-Schmidt over the longer side, then transpose back if needed.
    let (n, m) = if rows <= cols { (rows, cols) } else { (cols, rows) };
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    while basis.len() < n {
        let mut v: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
        for b in &basis {
            let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= dot * y);
        }
        let norm = libm::sqrt(v.iter().map(|x| x * x).sum::<f64>());
        if norm > 1e-8 {
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
    }
    let mut out = vec![0.0; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            out[r * cols + c] = gain * if rows <= cols { basis[r][c] } else { basis[c][r] };
        }
    }
    out
}

impl PolicyParams {
    pub const LEN: usize = N_PARAMS;

    /// All-zero parameters (mean 0, value 0, unit std).
    pub fn zeros(action_scale: f64) -> Self {
        PolicyParams { values: vec![0.0; N_PARAMS], input_scale: DEFAULT_INPUT_SCALE, action_scale }
    }

    /// Orthogonal hidden layers with gain √2, policy head gain 0.01, value
    /// head gain 1, zero biases, log-std 0.
    pub fn init(rng: &mut crate::Rng, action_scale: f64) -> Self {
        let mut p = Self::zeros(action_scale);
        let sqrt2 = core::f64::consts::SQRT_2;
        p.values[W1].copy_from_slice(&orthogonal_rows(HIDDEN, OBS_DIM, sqrt2, rng));
        p.values[W2].copy_from_slice(&orthogonal_rows(HIDDEN, HIDDEN, sqrt2, rng));
        p.values[WM].copy_from_slice(&orthogonal_rows(1, HIDDEN, 0.01, rng));
        p.values[WV].copy_from_slice(&orthogonal_rows(1, HIDDEN, 1.0, rng));
        p
    }

    /// Uniform random parameters in `[-scale, scale]`, for tests.
    pub fn random(rng: &mut crate::Rng, scale: f64, action_scale: f64) -> Self {
        let mut p = Self::zeros(action_scale);
        for v in p.values.iter_mut() {
            *v = rng.random_range(-scale..=scale);
        }
        p
    }

    pub fn tensors() -> Vec<Tensor> {
        vec![
            Tensor { name: "hidden1.weight", shape: vec![HIDDEN, OBS_DIM], range: W1 },
            Tensor { name: "hidden1.bias", shape: vec![HIDDEN], range: B1 },
            Tensor { name: "hidden2.weight", shape: vec![HIDDEN, HIDDEN], range: W2 },
            Tensor { name: "hidden2.bias", shape: vec![HIDDEN], range: B2 },
            Tensor { name: "mean.weight", shape: vec![1, HIDDEN], range: WM },
            Tensor { name: "mean.bias", shape: vec![1], range: BM..BM + 1 },
            Tensor { name: "value.weight", shape: vec![1, HIDDEN], range: WV },
            Tensor { name: "value.bias", shape: vec![1], range: BV..BV + 1 },
            Tensor { name: "log_std", shape: vec![1], range: LOG_STD..LOG_STD + 1 },
        ]
    }

    pub fn log_std(&self) -> f64 {
        self.values[LOG_STD]
    }

    pub fn set_log_std(&mut self, v: f64) {
        self.values[LOG_STD] = v;
    }

    pub fn std(&self) -> f64 {
        libm::exp(self.log_std())
    }

    pub fn check_finite(&self) -> Result<(), ShapeError> {
        for t in Self::tensors() {
            if self.values[t.range.clone()].iter().any(|v| !v.is_finite()) {
                return Err(ShapeError::NonFinite(t.name.into()));
            }
        }
        Ok(())
    }

    pub fn forward_cached(&self, obs: &Observation) -> Result<ForwardCache, ShapeError> {
        if let Some(i) = obs.iter().position(|x| !x.is_finite()) {
            return Err(ShapeError::NonFiniteInput(i));
        }
        let p = &self.values;
        let mut input = [0.0; OBS_DIM];
        for i in 0..OBS_DIM {
            input[i] = obs[i] * self.input_scale[i];
        }
        let mut h1 = [0.0; HIDDEN];
        for (j, h) in h1.iter_mut().enumerate() {
            let row = &p[W1.start + j * OBS_DIM..W1.start + (j + 1) * OBS_DIM];
            let z: f64 = row.iter().zip(&input).map(|(w, x)| w * x).sum::<f64>() + p[B1.start + j];
            *h = libm::tanh(z);
        }
        let mut h2 = [0.0; HIDDEN];
        for (j, h) in h2.iter_mut().enumerate() {
            let row = &p[W2.start + j * HIDDEN..W2.start + (j + 1) * HIDDEN];
            let z: f64 = row.iter().zip(&h1).map(|(w, x)| w * x).sum::<f64>() + p[B2.start + j];
            *h = libm::tanh(z);
        }
        let head = |w: Range<usize>, b: usize| -> f64 {
            p[w].iter().zip(&h2).map(|(w, x)| w * x).sum::<f64>() + p[b]
        };
        let mean = self.action_scale * head(WM, BM);
        let value = head(WV, BV);
        Ok(ForwardCache { input, h1, h2, mean, value })
    }

    /// Action mean [m/s², before environment clamping] and state value.
    pub fn forward(&self, obs: &Observation) -> Result<(f64, f64), ShapeError> {
        self.forward_cached(obs).map(|c| (c.mean, c.value))
    }

    /// Accumulates into `grad` the parameter gradient of a scalar loss with
    /// partial derivatives `d_mean`, `d_value`, `d_log_std`.
    pub fn backward(&self, cache: &ForwardCache, d_mean: f64, d_value: f64, d_log_std: f64, grad: &mut [f64]) {
        let p = &self.values;
        let d_head = d_mean * self.action_scale;
        grad[BM] += d_head;
        grad[BV] += d_value;
        grad[LOG_STD] += d_log_std;
        let mut d_h2 = [0.0; HIDDEN];
        for j in 0..HIDDEN {
            grad[WM.start + j] += d_head * cache.h2[j];
            grad[WV.start + j] += d_value * cache.h2[j];
            d_h2[j] = d_head * p[WM.start + j] + d_value * p[WV.start + j];
        }
        let mut d_h1 = [0.0; HIDDEN];
        for j in 0..HIDDEN {
            let dz = d_h2[j] * (1.0 - cache.h2[j] * cache.h2[j]);
            if dz == 0.0 {
                continue;
            }
            grad[B2.start + j] += dz;
            let row = W2.start + j * HIDDEN;
            for k in 0..HIDDEN {
                grad[row + k] += dz * cache.h1[k];
                d_h1[k] += dz * p[row + k];
            }
        }
        for j in 0..HIDDEN {
            let dz = d_h1[j] * (1.0 - cache.h1[j] * cache.h1[j]);
            grad[B1.start + j] += dz;
            let row = W1.start + j * OBS_DIM;
            for k in 0..OBS_DIM {
                grad[row + k] += dz * cache.input[k];
            }
        }
    }

    /// Draws an action from `Normal(mean, exp(log_std))` and returns it with
    /// its log-density.
    pub fn sample_action(&self, obs: &Observation, rng: &mut crate::Rng) -> Result<(f64, f64), ShapeError> {
        let (mean, _) = self.forward(obs)?;
        let std = self.std();
        let noise: f64 = rng.sample(StandardNormal);
        let action = mean + std * noise;
        Ok((action, gaussian_log_prob(action, mean, self.log_std())))
    }

    /// The mean action; used for evaluation and falsification.
    pub fn deterministic_action(&self, obs: &Observation) -> Result<f64, ShapeError> {
        self.forward(obs).map(|(mean, _)| mean)
    }
}

/// Log-density of `Normal(mean, exp(log_std))` at `x`.
pub fn gaussian_log_prob(x: f64, mean: f64, log_std: f64) -> f64 {
    let z = (x - mean) * libm::exp(-log_std);
    -0.5 * z * z - log_std - 0.5 * libm::log(2.0 * PI)
}

/// Deterministic policy as a [`Controller`]. Non-finite observations map to
/// zero acceleration.
#[derive(Clone, Copy, Debug)]
pub struct PolicyController<'a>(pub &'a PolicyParams);

impl Controller for PolicyController<'_> {
    fn act(&mut self, obs: &Observation) -> f64 {
        self.0.deterministic_action(obs).unwrap_or(0.0)
    }
}
