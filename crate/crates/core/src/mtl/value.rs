use core::cmp::Ordering;
use core::fmt;
use core::ops::Neg;

/// A robustness value: a finite signed distance or one of the two
/// saturating infinities.
///
/// The variant order gives the total order `NegInfinity < Finite(_) < Infinity`,
/// so `min`/`max` chains absorb the infinities without touching IEEE
/// infinities.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub enum Robustness {
    NegInfinity,
    Finite(f64),
    Infinity,
}

impl Robustness {
    pub const ZERO: Self = Robustness::Finite(0.0);

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn is_positive(self) -> bool {
        self > Self::ZERO
    }

    pub fn is_negative(self) -> bool {
        self < Self::ZERO
    }

    pub fn is_zero(self) -> bool {
        self == Self::ZERO
    }

    /// Finite payload, if any.
    pub fn finite(self) -> Option<f64> {
        match self {
            Robustness::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// Lossy conversion to an IEEE float, for reporting.
    pub fn to_f64(self) -> f64 {
        match self {
            Robustness::NegInfinity => f64::NEG_INFINITY,
            Robustness::Finite(v) => v,
            Robustness::Infinity => f64::INFINITY,
        }
    }

    /// Total order used for sorting candidates. Finite values are never NaN
    /// when produced by the monitor.
    pub fn total_cmp(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }
}

impl From<f64> for Robustness {
    fn from(value: f64) -> Self {
        if value == f64::INFINITY {
            Robustness::Infinity
        } else if value == f64::NEG_INFINITY {
            Robustness::NegInfinity
        } else {
            Robustness::Finite(value)
        }
    }
}

impl Neg for Robustness {
    type Output = Robustness;

    fn neg(self) -> Self {
        match self {
            Robustness::NegInfinity => Robustness::Infinity,
            Robustness::Finite(v) => Robustness::Finite(-v),
            Robustness::Infinity => Robustness::NegInfinity,
        }
    }
}

impl fmt::Display for Robustness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Robustness::NegInfinity => f.write_str("-inf"),
            Robustness::Finite(v) => write!(f, "{v}"),
            Robustness::Infinity => f.write_str("inf"),
        }
    }
}
