use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::sim::{Scenario, ScenarioError, ScenarioSource, SimConfig};

/// One bounded search dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct Dim {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

impl Dim {
    pub fn range(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SpaceError {
    #[error("dimension `{0}` needs lower < upper")]
    EmptyDim(String),
    #[error("at least one control point is required")]
    NoControlPoints,
    #[error("candidate has {got} coordinates, expected {expected}")]
    Arity { got: usize, expected: usize },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

/// Leader placement offset, leader initial velocity, then `K` acceleration
/// control points linearly interpolated over the episode.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchSpace {
    dims: Vec<Dim>,
    control_points: usize,
}

impl SearchSpace {
    pub fn new(offset: (f64, f64), lead_velocity: (f64, f64), control_points: usize, accel: (f64, f64)) -> Result<Self, SpaceError> {
        if control_points == 0 {
            return Err(SpaceError::NoControlPoints);
        }
        let mut dims = alloc::vec![
            Dim { name: "offset".to_string(), lower: offset.0, upper: offset.1 },
            Dim { name: "lead_velocity".to_string(), lower: lead_velocity.0, upper: lead_velocity.1 },
        ];
        for i in 0..control_points {
            dims.push(Dim { name: alloc::format!("accel_{i}"), lower: accel.0, upper: accel.1 });
        }
        for d in &dims {
            if d.lower.partial_cmp(&d.upper) != Some(core::cmp::Ordering::Less) {
                return Err(SpaceError::EmptyDim(d.name.clone()));
            }
        }
        Ok(SearchSpace { dims, control_points })
    }

    /// The driving search space: configured offset and leader velocity
    /// ranges, `K` control points in `[-a_max, a_max]`.
    pub fn driving(cfg: &SimConfig, control_points: usize) -> Result<Self, SpaceError> {
        SearchSpace::new(
            cfg.offset_range,
            cfg.lead_velocity_range,
            control_points,
            (-cfg.a_max, cfg.a_max),
        )
    }

    /// Arbitrary box with no scenario semantics, for optimizer tests.
    pub fn boxed(bounds: &[(f64, f64)]) -> Result<Self, SpaceError> {
        let dims: Vec<Dim> = bounds
            .iter()
            .enumerate()
            .map(|(i, &(lower, upper))| Dim { name: alloc::format!("x{i}"), lower, upper })
            .collect();
        for d in &dims {
            if d.lower.partial_cmp(&d.upper) != Some(core::cmp::Ordering::Less) {
                return Err(SpaceError::EmptyDim(d.name.clone()));
            }
        }
        Ok(SearchSpace { dims, control_points: 0 })
    }

    pub fn dims(&self) -> &[Dim] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn control_points(&self) -> usize {
        self.control_points
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dims.len()
            && x.iter().zip(&self.dims).all(|(v, d)| *v >= d.lower && *v <= d.upper)
    }

    /// Step index of each control point.
    fn knots(&self, steps: usize) -> Vec<usize> {
        let k = self.control_points;
        if k == 1 {
            return alloc::vec![0];
        }
        (0..k).map(|i| libm::round((i * (steps - 1)) as f64 / (k - 1) as f64) as usize).collect()
    }

    /// Candidate to scenario. The ego starts at the leader's velocity.
    pub fn decode(&self, x: &[f64], cfg: &SimConfig) -> Result<Scenario, SpaceError> {
        let expected = 2 + self.control_points;
        if x.len() != expected || self.control_points == 0 {
            return Err(SpaceError::Arity { got: x.len(), expected });
        }
        let points = &x[2..];
        let knots = self.knots(cfg.max_steps);
        let mut accel = Vec::with_capacity(cfg.max_steps);
        for step in 0..cfg.max_steps {
            let seg = knots.iter().rposition(|&k| k <= step).unwrap_or(0);
            let a = if seg + 1 >= knots.len() {
                points[seg]
            } else {
                let (k0, k1) = (knots[seg], knots[seg + 1]);
                let w = (step - k0) as f64 / (k1 - k0) as f64;
                points[seg] + (points[seg + 1] - points[seg]) * w
            };
            accel.push(a);
        }
        Ok(Scenario::new(ScenarioSource::Falsified, x[0], x[1], x[1], accel, cfg)?)
    }

    /// Scenario to candidate, reading the trace at the control-point steps.
    pub fn encode(&self, s: &Scenario, cfg: &SimConfig) -> Vec<f64> {
        let mut x = alloc::vec![s.offset, s.lead_velocity];
        x.extend(self.knots(cfg.max_steps).into_iter().map(|k| s.lead_accel[k]));
        x
    }
}
