use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

/// Named fields of a trace record.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Signal {
    /// Bumper gap `lead position - ego position` [m].
    Gap,
    EgoVelocity,
    LeadVelocity,
    EgoAcceleration,
    LeadAcceleration,
    EgoPosition,
    LeadPosition,
}

impl Signal {
    pub const ALL: [Signal; 7] = [
        Signal::Gap,
        Signal::EgoVelocity,
        Signal::LeadVelocity,
        Signal::EgoAcceleration,
        Signal::LeadAcceleration,
        Signal::EgoPosition,
        Signal::LeadPosition,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Signal::Gap => "gap",
            Signal::EgoVelocity => "v_ego",
            Signal::LeadVelocity => "v_lead",
            Signal::EgoAcceleration => "a_ego",
            Signal::LeadAcceleration => "a_lead",
            Signal::EgoPosition => "x_ego",
            Signal::LeadPosition => "x_lead",
        }
    }
}

impl fmt::Display for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Signal {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Signal::ALL.into_iter().find(|sig| sig.name() == s).ok_or(())
    }
}

/// One sample of the two-vehicle system output.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Record {
    pub gap: f64,
    pub v_ego: f64,
    pub v_lead: f64,
    pub a_ego: f64,
    pub a_lead: f64,
    pub x_ego: f64,
    pub x_lead: f64,
}

impl Record {
    pub fn get(&self, signal: Signal) -> f64 {
        match signal {
            Signal::Gap => self.gap,
            Signal::EgoVelocity => self.v_ego,
            Signal::LeadVelocity => self.v_lead,
            Signal::EgoAcceleration => self.a_ego,
            Signal::LeadAcceleration => self.a_lead,
            Signal::EgoPosition => self.x_ego,
            Signal::LeadPosition => self.x_lead,
        }
    }

    pub fn set(&mut self, signal: Signal, value: f64) {
        let slot = match signal {
            Signal::Gap => &mut self.gap,
            Signal::EgoVelocity => &mut self.v_ego,
            Signal::LeadVelocity => &mut self.v_lead,
            Signal::EgoAcceleration => &mut self.a_ego,
            Signal::LeadAcceleration => &mut self.a_lead,
            Signal::EgoPosition => &mut self.x_ego,
            Signal::LeadPosition => &mut self.x_lead,
        };
        *slot = value;
    }

    fn is_finite(&self) -> bool {
        Signal::ALL.iter().all(|&s| self.get(s).is_finite())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum TraceError {
    #[error("trace is empty")]
    Empty,
    #[error("sampling period must be positive and finite, got {0}")]
    BadPeriod(f64),
    #[error("record {0} has a non-finite field")]
    NonFinite(usize),
}

/// A uniformly sampled system trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    dt: f64,
    records: Vec<Record>,
}

impl Trace {
    pub fn new(dt: f64, records: Vec<Record>) -> Result<Self, TraceError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(TraceError::BadPeriod(dt));
        }
        if records.is_empty() {
            return Err(TraceError::Empty);
        }
        if let Some(i) = records.iter().position(|r| !r.is_finite()) {
            return Err(TraceError::NonFinite(i));
        }
        Ok(Trace { dt, records })
    }

    /// Builds a trace where only `signal` is populated.
    pub fn from_signal(dt: f64, signal: Signal, values: &[f64]) -> Result<Self, TraceError> {
        let records = values
            .iter()
            .map(|&v| {
                let mut r = Record::default();
                r.set(signal, v);
                r
            })
            .collect();
        Trace::new(dt, records)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    /// Always false; traces are nonempty by construction.
    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn record(&self, step: usize) -> Option<&Record> {
        self.records.get(step)
    }
}
