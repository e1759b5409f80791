use alloc::boxed::Box;
use core::fmt;

use thiserror::Error;

use super::predicate::Predicate;

#[derive(Debug, Error, PartialEq)]
pub enum IntervalError {
    #[error("interval bounds must satisfy 0 <= lo <= hi, got [{lo}, {hi}]")]
    Bounds { lo: f64, hi: f64 },
}

/// A time interval in seconds. `hi == None` is unbounded.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: Option<f64>,
}

impl Interval {
    pub fn new(lo: f64, hi: Option<f64>) -> Result<Self, IntervalError> {
        let hi_val = hi.unwrap_or(f64::INFINITY);
        if !(lo >= 0.0 && lo.is_finite() && hi_val >= lo) || hi.is_some_and(|h| !h.is_finite()) {
            return Err(IntervalError::Bounds { lo, hi: hi_val });
        }
        Ok(Interval { lo, hi })
    }

    pub fn bounded(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        Interval::new(lo, Some(hi))
    }

    pub fn unbounded(lo: f64) -> Result<Self, IntervalError> {
        Interval::new(lo, None)
    }

    /// `[0, inf)`.
    pub fn always() -> Self {
        Interval { lo: 0.0, hi: None }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> Option<f64> {
        self.hi
    }

    /// Closed step range after inward rounding; `None` for the upper bound
    /// means unbounded. Returns `None` if no sample step lies in the interval.
    pub fn steps(&self, dt: f64) -> Option<(usize, Option<usize>)> {
        // Tolerance so that e.g. 0.12 / 0.04 lands on step 3.
        const EPS: f64 = 1e-9;
        let lo = libm::ceil(self.lo / dt - EPS) as usize;
        let hi = self.hi.map(|h| libm::floor(h / dt + EPS) as usize);
        match hi {
            Some(h) if h < lo => None,
            _ => Some((lo, hi)),
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.hi {
            Some(h) => write!(f, "[{:?},{:?}]", self.lo, h),
            None => write!(f, "[{:?},inf]", self.lo),
        }
    }
}

/// MTL abstract syntax.
///
/// `True`, `Atom`, `Not`, `Or`, `Until` and `Globally` are primitive;
/// `And`, `GloballyWithin` and `Eventually` are derived and evaluate exactly
/// like their expansions (see [`Formula::expand`]).
#[derive(Clone, Debug, PartialEq)]
pub enum Formula {
    True,
    Atom(Predicate),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Until(Interval, Box<Formula>, Box<Formula>),
    Globally(Box<Formula>),
    GloballyWithin(Interval, Box<Formula>),
    Eventually(Interval, Box<Formula>),
}

impl Formula {
    pub fn atom(p: Predicate) -> Self {
        Formula::Atom(p)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn until(i: Interval, a: Formula, b: Formula) -> Self {
        Formula::Until(i, Box::new(a), Box::new(b))
    }

    pub fn globally(f: Formula) -> Self {
        Formula::Globally(Box::new(f))
    }

    pub fn globally_within(i: Interval, f: Formula) -> Self {
        Formula::GloballyWithin(i, Box::new(f))
    }

    pub fn eventually(i: Interval, f: Formula) -> Self {
        Formula::Eventually(i, Box::new(f))
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::True | Formula::Atom(_) => 1,
            Formula::Not(f) | Formula::Globally(f) => 1 + f.depth(),
            Formula::GloballyWithin(_, f) | Formula::Eventually(_, f) => 1 + f.depth(),
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Until(_, a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    /// Rewrites derived connectives into `True | Atom | Not | Or | Until`:
    ///
    /// * `a & b` as `!(!a | !b)`
    /// * `F_I f` as `true U_I f`
    /// * `G_I f` as `!(true U_I !f)`
    /// * `G f` as `!(true U_[0,inf) !f)`
    pub fn expand(&self) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::Atom(p) => Formula::Atom(p.clone()),
            Formula::Not(f) => Formula::not(f.expand()),
            Formula::Or(a, b) => Formula::or(a.expand(), b.expand()),
            Formula::And(a, b) => {
                Formula::not(Formula::or(Formula::not(a.expand()), Formula::not(b.expand())))
            }
            Formula::Until(i, a, b) => Formula::until(*i, a.expand(), b.expand()),
            Formula::Eventually(i, f) => Formula::until(*i, Formula::True, f.expand()),
            Formula::GloballyWithin(i, f) => {
                Formula::not(Formula::until(*i, Formula::True, Formula::not(f.expand())))
            }
            Formula::Globally(f) => Formula::not(Formula::until(
                Interval::always(),
                Formula::True,
                Formula::not(f.expand()),
            )),
        }
    }
}

/// Prints in the textual grammar accepted by [`super::parse_formula`], with
/// every binary connective parenthesized.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::Atom(p) => f.write_str(&p.name),
            Formula::Not(g) => write!(f, "!{g}"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Until(i, a, b) => write!(f, "({a} U{i} {b})"),
            Formula::Globally(g) => write!(f, "G {g}"),
            Formula::GloballyWithin(i, g) => write!(f, "G{i} {g}"),
            Formula::Eventually(i, g) => write!(f, "F{i} {g}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_validation() {
        assert!(Interval::bounded(0.0, 0.0).is_ok());
        assert!(Interval::bounded(2.0, 1.0).is_err());
        assert!(Interval::bounded(-1.0, 1.0).is_err());
        assert!(Interval::new(0.0, Some(f64::INFINITY)).is_err());
        assert!(Interval::unbounded(3.0).is_ok());
    }

    #[test]
    fn steps_round_inward() {
        let dt = 0.04;
        assert_eq!(Interval::bounded(0.0, 2.0).unwrap().steps(dt), Some((0, Some(50))));
        assert_eq!(Interval::bounded(0.1, 0.5).unwrap().steps(dt), Some((3, Some(12))));
        assert_eq!(Interval::bounded(0.12, 0.12).unwrap().steps(dt), Some((3, Some(3))));
        assert_eq!(Interval::bounded(0.01, 0.03).unwrap().steps(dt), None);
        assert_eq!(Interval::unbounded(1.0).unwrap().steps(dt), Some((25, None)));
    }
}
