use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use super::distribution::{ce_update, CeDistribution};
use super::space::SearchSpace;
use crate::mtl::{robustness, Formula, MonitorError, Robustness, Trace};

/// Cross-entropy settings.
#[derive(Clone, Debug, PartialEq)]
pub struct CeConfig {
    /// Candidates per iteration.
    pub samples_per_iter: usize,
    pub elite_fraction: f64,
    /// Blend factor of the elite fit against the previous parameters.
    pub smoothing: f64,
    /// Maximum number of iterations.
    pub iterations: usize,
    pub std_floor: f64,
    /// Stop once every std is below this fraction of its dimension's range.
    pub convergence_ratio: f64,
    /// Stop at the end of the first iteration that found a violation.
    pub stop_on_falsified: bool,
    /// Number of lowest-robustness candidates to return.
    pub keep_best: usize,
}

impl Default for CeConfig {
    fn default() -> Self {
        CeConfig {
            samples_per_iter: 50,
            elite_fraction: 0.1,
            smoothing: 0.7,
            iterations: 20,
            std_floor: 1e-3,
            convergence_ratio: 1e-2,
            stop_on_falsified: true,
            keep_best: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScoredCandidate {
    pub point: Vec<f64>,
    pub robustness: Robustness,
}

/// One row of the falsification report.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Running minimum over all candidates so far.
    pub best_robustness: Robustness,
    /// Mean over this iteration's batch (IEEE infinities if any candidate
    /// was infinitely robust).
    pub mean_robustness: f64,
    /// Proposal the batch was drawn from.
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FalsificationResult {
    pub best: ScoredCandidate,
    pub falsified: bool,
    pub simulations: usize,
    /// 1-based index of the first simulation with negative robustness.
    pub first_falsified_at: Option<usize>,
    pub history: Vec<IterationRecord>,
    /// Up to `keep_best` candidates, lowest robustness first.
    pub top: Vec<ScoredCandidate>,
}

impl FalsificationResult {
    pub fn best_robustness(&self) -> Robustness {
        self.best.robustness
    }
}

#[derive(Debug, Error)]
pub enum FalsifyError<E: fmt::Debug + fmt::Display> {
    #[error("budget {budget} is smaller than one batch of {batch}")]
    Budget { budget: usize, batch: usize },
    #[error("simulation of candidate {candidate:?} failed: {error}")]
    System { candidate: Vec<f64>, error: E },
    #[error("monitoring candidate {candidate:?} failed: {error}")]
    Monitor { candidate: Vec<f64>, error: MonitorError },
}

struct Tracker {
    top: Vec<ScoredCandidate>,
    keep: usize,
    simulations: usize,
    first_falsified_at: Option<usize>,
    history: Vec<IterationRecord>,
}

impl Tracker {
    fn new(keep: usize) -> Self {
        Tracker { top: Vec::new(), keep: keep.max(1), simulations: 0, first_falsified_at: None, history: Vec::new() }
    }

    fn offer(&mut self, c: &ScoredCandidate) {
        let pos = self.top.partition_point(|t| t.robustness.total_cmp(&c.robustness).is_le());
        if pos < self.keep {
            self.top.insert(pos, c.clone());
            self.top.truncate(self.keep);
        }
    }

    fn best(&self) -> Robustness {
        self.top.first().map_or(Robustness::Infinity, |c| c.robustness)
    }

    fn finish(self) -> FalsificationResult {
        let best = self.top[0].clone();
        FalsificationResult {
            falsified: best.robustness.is_negative(),
            best,
            simulations: self.simulations,
            first_falsified_at: self.first_falsified_at,
            history: self.history,
            top: self.top,
        }
    }
}

fn score_batch<S, E>(
    system: &mut S,
    formula: &Formula,
    batch: Vec<Vec<f64>>,
    tracker: &mut Tracker,
) -> Result<Vec<ScoredCandidate>, FalsifyError<E>>
where
    S: FnMut(&[f64]) -> Result<Trace, E>,
    E: fmt::Debug + fmt::Display,
{
    let mut scored = Vec::with_capacity(batch.len());
    for point in batch {
        let trace = match system(&point) {
            Ok(t) => t,
            Err(error) => return Err(FalsifyError::System { candidate: point, error }),
        };
        let rob = match robustness(formula, &trace, 0) {
            Ok(r) => r,
            Err(error) => return Err(FalsifyError::Monitor { candidate: point, error }),
        };
        tracker.simulations += 1;
        if rob.is_negative() && tracker.first_falsified_at.is_none() {
            tracker.first_falsified_at = Some(tracker.simulations);
        }
        let c = ScoredCandidate { point, robustness: rob };
        tracker.offer(&c);
        scored.push(c);
    }
    Ok(scored)
}

fn batch_mean(scored: &[ScoredCandidate]) -> f64 {
    scored.iter().map(|c| c.robustness.to_f64()).sum::<f64>() / scored.len() as f64
}

/// Cross-entropy falsification.
///
/// Starts from a uniform proposal, then repeats sample → simulate → score
/// (robustness at step 0) → elite refit until the iteration limit, the
/// budget, convergence of the proposal, or (if configured) a violation.
pub fn falsify<S, E>(
    mut system: S,
    formula: &Formula,
    space: &SearchSpace,
    budget: usize,
    cfg: &CeConfig,
    rng: &mut crate::Rng,
) -> Result<FalsificationResult, FalsifyError<E>>
where
    S: FnMut(&[f64]) -> Result<Trace, E>,
    E: fmt::Debug + fmt::Display,
{
    let batch = cfg.samples_per_iter.max(1);
    if budget < batch {
        return Err(FalsifyError::Budget { budget, batch });
    }
    let mut dist = CeDistribution::uniform(space);
    let mut tracker = Tracker::new(cfg.keep_best);
    for iteration in 0..cfg.iterations.max(1) {
        let n = batch.min(budget - tracker.simulations);
        if n == 0 {
            break;
        }
        let samples = dist.sample(n, rng);
        let scored = score_batch(&mut system, formula, samples, &mut tracker)?;
        tracker.history.push(IterationRecord {
            iteration,
            best_robustness: tracker.best(),
            mean_robustness: batch_mean(&scored),
            mean: dist.mean.clone(),
            std: dist.std.clone(),
        });
        dist = ce_update(&dist, &scored, cfg.elite_fraction, cfg.smoothing, cfg.std_floor);
        if cfg.stop_on_falsified && tracker.best().is_negative() {
            break;
        }
        if dist.max_relative_std() < cfg.convergence_ratio {
            break;
        }
    }
    Ok(tracker.finish())
}

/// Baseline that samples uniformly over the bounds without updating the
/// proposal. Batches and stopping rules otherwise match [`falsify`], except
/// that it runs until the budget is spent.
pub fn uniform_falsify<S, E>(
    mut system: S,
    formula: &Formula,
    space: &SearchSpace,
    budget: usize,
    cfg: &CeConfig,
    rng: &mut crate::Rng,
) -> Result<FalsificationResult, FalsifyError<E>>
where
    S: FnMut(&[f64]) -> Result<Trace, E>,
    E: fmt::Debug + fmt::Display,
{
    let batch = cfg.samples_per_iter.max(1);
    if budget < batch {
        return Err(FalsifyError::Budget { budget, batch });
    }
    let dist = CeDistribution::uniform(space);
    let mut tracker = Tracker::new(cfg.keep_best);
    let mut iteration = 0;
    while tracker.simulations < budget {
        let n = batch.min(budget - tracker.simulations);
        let samples = dist.sample(n, rng);
        let scored = score_batch(&mut system, formula, samples, &mut tracker)?;
        tracker.history.push(IterationRecord {
            iteration,
            best_robustness: tracker.best(),
            mean_robustness: batch_mean(&scored),
            mean: dist.mean.clone(),
            std: dist.std.clone(),
        });
        iteration += 1;
        if cfg.stop_on_falsified && tracker.best().is_negative() {
            break;
        }
    }
    Ok(tracker.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mtl::{Predicate, Relation, Signal};
    use crate::seeded_rng;

    /// Single-sample trace whose gap is `(x - target)^2`; the robustness of
    /// `gap >= 0` is then the squared error.
    fn parabola_system(target: f64) -> impl FnMut(&[f64]) -> Result<Trace, &'static str> {
        move |x: &[f64]| Ok(Trace::from_signal(1.0, Signal::Gap, &[(x[0] - target).powi(2)]).unwrap())
    }

    fn gap_positive() -> Formula {
        Formula::atom(Predicate::new("p", Signal::Gap, Relation::AtLeast, 0.0))
    }

    #[test]
    fn ce_minimizes_a_parabola() {
        let space = SearchSpace::boxed(&[(0.0, 1.0)]).unwrap();
        let cfg = CeConfig {
            samples_per_iter: 100,
            elite_fraction: 0.1,
            smoothing: 0.7,
            iterations: 20,
            convergence_ratio: 0.0,
            stop_on_falsified: false,
            ..CeConfig::default()
        };
        let res = falsify(parabola_system(0.7), &gap_positive(), &space, 2000, &cfg, &mut seeded_rng(1)).unwrap();
        let last = res.history.last().unwrap();
        assert_eq!(res.history.len(), 20);
        assert!((last.mean[0] - 0.7).abs() < 0.02, "{}", last.mean[0]);
        assert!((res.best.point[0] - 0.7).abs() < 0.02);
        assert!(!res.falsified);
    }

    #[test]
    fn best_is_running_minimum_and_budget_holds() {
        let space = SearchSpace::boxed(&[(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let cfg = CeConfig { samples_per_iter: 30, iterations: 50, convergence_ratio: 0.0, ..CeConfig::default() };
        let res = falsify(parabola_system(0.3), &gap_positive(), &space, 200, &cfg, &mut seeded_rng(2)).unwrap();
        assert!(res.simulations <= 200);
        assert_eq!(res.simulations, 200);
        for w in res.history.windows(2) {
            assert!(w[1].best_robustness <= w[0].best_robustness);
        }
        assert_eq!(res.best, res.top[0]);
        assert!(res.top.windows(2).all(|w| w[0].robustness <= w[1].robustness));
        assert!(res.top.iter().all(|c| space.contains(&c.point)));
    }

    #[test]
    fn true_is_never_falsified() {
        let space = SearchSpace::boxed(&[(0.0, 1.0)]).unwrap();
        let cfg = CeConfig::default();
        let res = falsify(parabola_system(0.5), &Formula::True, &space, 500, &cfg, &mut seeded_rng(3)).unwrap();
        assert!(!res.falsified);
        assert_eq!(res.best_robustness(), Robustness::Infinity);
        let res = uniform_falsify(parabola_system(0.5), &Formula::True, &space, 500, &cfg, &mut seeded_rng(3)).unwrap();
        assert_eq!(res.simulations, 500);
        assert_eq!(res.best_robustness(), Robustness::Infinity);
    }

    #[test]
    fn budget_below_one_batch_is_rejected() {
        let space = SearchSpace::boxed(&[(0.0, 1.0)]).unwrap();
        let err = falsify(parabola_system(0.5), &Formula::True, &space, 10, &CeConfig::default(), &mut seeded_rng(4));
        assert!(matches!(err, Err(FalsifyError::Budget { budget: 10, batch: 50 })));
    }

    #[test]
    fn system_failures_carry_the_candidate() {
        let space = SearchSpace::boxed(&[(0.0, 1.0)]).unwrap();
        let failing = |_: &[f64]| -> Result<Trace, &'static str> { Err("boom") };
        match falsify(failing, &Formula::True, &space, 50, &CeConfig::default(), &mut seeded_rng(5)) {
            Err(FalsifyError::System { candidate, error }) => {
                assert_eq!(candidate.len(), 1);
                assert_eq!(error, "boom");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn stops_on_first_violation_batch() {
        let space = SearchSpace::boxed(&[(-1.0, 1.0)]).unwrap();
        let negative = |x: &[f64]| Trace::from_signal(1.0, Signal::Gap, &[x[0]]).map_err(|_| "bad");
        let res = falsify(negative, &gap_positive(), &space, 1000, &CeConfig::default(), &mut seeded_rng(6)).unwrap();
        assert!(res.falsified);
        assert_eq!(res.simulations, 50);
        assert!(res.first_falsified_at.unwrap() <= 50);
    }
}
