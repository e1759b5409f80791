use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::trace::{Record, Signal};

/// Direction of a threshold predicate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// Satisfied when `signal >= threshold`.
    AtLeast,
    /// Satisfied when `signal <= threshold`.
    AtMost,
}

/// An atomic proposition over a single signal, with its signed distance.
///
/// The satisfying set is a closed half-line, so the signed distance of a
/// sample is its Euclidean distance to the threshold, positive inside the
/// set, divided by `scale` so heterogeneous units can be compared.
#[derive(Clone, Debug, PartialEq)]
pub struct Predicate {
    pub name: String,
    pub signal: Signal,
    pub relation: Relation,
    pub threshold: f64,
    pub scale: f64,
}

impl Predicate {
    pub fn new(name: &str, signal: Signal, relation: Relation, threshold: f64) -> Self {
        Predicate { name: name.to_string(), signal, relation, threshold, scale: 1.0 }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        assert!(scale > 0.0 && scale.is_finite(), "predicate scale must be positive");
        self.scale = scale;
        self
    }

    pub fn distance(&self, record: &Record) -> f64 {
        let value = record.get(self.signal);
        let raw = match self.relation {
            Relation::AtLeast => value - self.threshold,
            Relation::AtMost => self.threshold - value,
        };
        raw / self.scale
    }

    /// Boolean membership of the sample in the satisfying set.
    pub fn holds(&self, record: &Record) -> bool {
        let value = record.get(self.signal);
        match self.relation {
            Relation::AtLeast => value >= self.threshold,
            Relation::AtMost => value <= self.threshold,
        }
    }
}

/// Registry of atoms available to the parser.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PredicateSet {
    predicates: Vec<Predicate>,
}

impl PredicateSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `p`, replacing any predicate with the same name.
    pub fn insert(&mut self, p: Predicate) {
        match self.predicates.iter_mut().find(|q| q.name == p.name) {
            Some(slot) => *slot = p,
            None => self.predicates.push(p),
        }
    }

    pub fn with(mut self, p: Predicate) -> Self {
        self.insert(p);
        self
    }

    pub fn get(&self, name: &str) -> Option<&Predicate> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Predicate> {
        self.predicates.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_agrees_with_membership() {
        let p = Predicate::new("close", Signal::Gap, Relation::AtMost, 5.0).with_scale(2.0);
        let inside = Record { gap: 3.0, ..Record::default() };
        let outside = Record { gap: 9.0, ..Record::default() };
        assert_eq!(p.distance(&inside), 1.0);
        assert!(p.holds(&inside));
        assert_eq!(p.distance(&outside), -2.0);
        assert!(!p.holds(&outside));
    }
}
