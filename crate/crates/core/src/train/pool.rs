use alloc::vec::Vec;

use rand::Rng as _;

use crate::mtl::Robustness;
use crate::sim::Scenario;

/// A falsifier-produced scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct PoolEntry {
    pub scenario: Scenario,
    /// Robustness against the policy that was falsified.
    pub robustness: Robustness,
    /// Protagonist iteration of the falsifier call.
    pub iteration: u64,
}

impl PoolEntry {
    /// Admitted as one of the lowest-robustness candidates without actually
    /// violating the specification.
    pub fn is_near_miss(&self) -> bool {
        !self.robustness.is_negative()
    }
}

/// Scenarios episodes are drawn from: the dataset train split plus any
/// falsified scenarios.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioPool {
    dataset: Vec<Scenario>,
    falsified: Vec<PoolEntry>,
    /// Probability of drawing a falsified scenario once any exist.
    falsified_weight: f64,
}

impl ScenarioPool {
    pub fn new(dataset: Vec<Scenario>, falsified_weight: f64) -> Self {
        ScenarioPool { dataset, falsified: Vec::new(), falsified_weight }
    }

    pub fn dataset(&self) -> &[Scenario] {
        &self.dataset
    }

    pub fn falsified(&self) -> &[PoolEntry] {
        &self.falsified
    }

    pub fn len(&self) -> usize {
        self.dataset.len() + self.falsified.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn add_falsified(&mut self, entry: PoolEntry) {
        self.falsified.push(entry);
    }

    /// Draws a scenario. Until a falsified scenario exists this consumes
    /// exactly one index draw from `rng`.
    pub fn sample(&self, rng: &mut crate::Rng) -> &Scenario {
        if !self.falsified.is_empty() && (self.dataset.is_empty() || rng.random::<f64>() < self.falsified_weight) {
            return &self.falsified[rng.random_range(0..self.falsified.len())].scenario;
        }
        &self.dataset[rng.random_range(0..self.dataset.len())]
    }
}
