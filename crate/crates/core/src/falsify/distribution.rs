use alloc::vec::Vec;

use rand::Rng as _;
use rand_distr::StandardNormal;

use super::search::ScoredCandidate;
use super::space::SearchSpace;

/// Shape of the per-dimension proposal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProposalKind {
    /// Uniform over the bounds; the initial proposal.
    Uniform,
    /// Gaussian truncated to the bounds.
    Gaussian,
}

/// Independent per-dimension sampling distribution of the cross-entropy
/// method.
#[derive(Clone, Debug, PartialEq)]
pub struct CeDistribution {
    pub kind: ProposalKind,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

const MAX_REJECTIONS: usize = 64;

impl CeDistribution {
    /// Uniform proposal over `space`; mean and std are the uniform moments.
    pub fn uniform(space: &SearchSpace) -> Self {
        let lower: Vec<f64> = space.dims().iter().map(|d| d.lower).collect();
        let upper: Vec<f64> = space.dims().iter().map(|d| d.upper).collect();
        let mean = lower.iter().zip(&upper).map(|(l, u)| 0.5 * (l + u)).collect();
        let std = lower.iter().zip(&upper).map(|(l, u)| (u - l) / libm::sqrt(12.0)).collect();
        CeDistribution { kind: ProposalKind::Uniform, mean, std, lower, upper }
    }

    /// Truncated Gaussian with the given moments over `space`.
    pub fn gaussian(space: &SearchSpace, mean: Vec<f64>, std: Vec<f64>) -> Self {
        let mut d = CeDistribution::uniform(space);
        assert_eq!(mean.len(), d.mean.len(), "mean has wrong dimension");
        assert_eq!(std.len(), d.std.len(), "std has wrong dimension");
        d.kind = ProposalKind::Gaussian;
        d.mean = mean;
        d.std = std;
        d
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Largest per-dimension std relative to the dimension's range.
    pub fn max_relative_std(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.std[i] / (self.upper[i] - self.lower[i]))
            .fold(0.0, f64::max)
    }

    fn sample_one(&self, rng: &mut crate::Rng) -> Vec<f64> {
        (0..self.dim())
            .map(|i| {
                let (lo, hi) = (self.lower[i], self.upper[i]);
                match self.kind {
                    ProposalKind::Uniform => rng.random_range(lo..=hi),
                    ProposalKind::Gaussian => {
                        for _ in 0..MAX_REJECTIONS {
                            let z: f64 = rng.sample(StandardNormal);
                            let x = self.mean[i] + self.std[i] * z;
                            if x >= lo && x <= hi {
                                return x;
                            }
                        }
                        self.mean[i].clamp(lo, hi)
                    }
                }
            })
            .collect()
    }

    /// `n` candidates within the bounds. Gaussian dimensions use rejection
    /// sampling and fall back to the clamped mean after repeated misses.
    pub fn sample(&self, n: usize, rng: &mut crate::Rng) -> Vec<Vec<f64>> {
        (0..n).map(|_| self.sample_one(rng)).collect()
    }
}

/// Refits the proposal to the `ceil(elite_fraction * n)` lowest-robustness
/// candidates by maximum likelihood, then blends with the old parameters:
/// `new = α·elite + (1 − α)·old`. The std is floored at `std_floor`.
pub fn ce_update(
    dist: &CeDistribution,
    scored: &[ScoredCandidate],
    elite_fraction: f64,
    smoothing: f64,
    std_floor: f64,
) -> CeDistribution {
    assert!(!scored.is_empty(), "ce_update needs at least one scored candidate");
    assert!(elite_fraction > 0.0 && elite_fraction <= 1.0, "elite fraction must be in (0, 1]");
    assert!((0.0..=1.0).contains(&smoothing), "smoothing must be in [0, 1]");
    let mut order: Vec<&ScoredCandidate> = scored.iter().collect();
    order.sort_by(|a, b| a.robustness.total_cmp(&b.robustness));
    let m = (libm::ceil(elite_fraction * scored.len() as f64) as usize).clamp(1, scored.len());
    let elites = &order[..m];

    let mut next = dist.clone();
    next.kind = ProposalKind::Gaussian;
    for i in 0..dist.dim() {
        let mean = elites.iter().map(|c| c.point[i]).sum::<f64>() / m as f64;
        let var = elites.iter().map(|c| (c.point[i] - mean) * (c.point[i] - mean)).sum::<f64>() / m as f64;
        let std = libm::sqrt(var);
        next.mean[i] = (smoothing * mean + (1.0 - smoothing) * dist.mean[i]).clamp(dist.lower[i], dist.upper[i]);
        next.std[i] = (smoothing * std + (1.0 - smoothing) * dist.std[i]).max(std_floor);
    }
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mtl::Robustness;
    use crate::seeded_rng;
    use alloc::vec;

    fn scored(points: &[(f64, f64)]) -> Vec<ScoredCandidate> {
        points
            .iter()
            .map(|&(x, r)| ScoredCandidate { point: vec![x], robustness: Robustness::Finite(r) })
            .collect()
    }

    #[test]
    fn uniform_samples_cover_the_box() {
        let space = SearchSpace::boxed(&[(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let d = CeDistribution::uniform(&space);
        let xs = d.sample(1000, &mut seeded_rng(1));
        for i in 0..2 {
            let m = xs.iter().map(|x| x[i]).sum::<f64>() / 1000.0;
            assert!((m - 0.5).abs() < 0.05, "{m}");
        }
        assert!(xs.iter().all(|x| space.contains(x)));
    }

    #[test]
    fn degenerate_gaussian_returns_mean() {
        let space = SearchSpace::boxed(&[(-1.0, 1.0)]).unwrap();
        let d = CeDistribution::gaussian(&space, vec![0.25], vec![1e-12]);
        for x in d.sample(50, &mut seeded_rng(2)) {
            assert!((x[0] - 0.25).abs() < 1e-10);
        }
    }

    #[test]
    fn sampling_is_deterministic_and_bounded() {
        let space = SearchSpace::boxed(&[(0.0, 1.0), (-3.0, 3.0)]).unwrap();
        let d = CeDistribution::gaussian(&space, vec![0.95, -2.9], vec![0.5, 4.0]);
        let a = d.sample(200, &mut seeded_rng(3));
        assert_eq!(a, d.sample(200, &mut seeded_rng(3)));
        assert!(a.iter().all(|x| space.contains(x)));
    }

    #[test]
    fn full_smoothing_takes_elite_mean() {
        let space = SearchSpace::boxed(&[(0.0, 10.0)]).unwrap();
        let d = CeDistribution::uniform(&space);
        let s = scored(&[(2.0, -1.0), (4.0, -0.5), (9.0, 3.0), (8.0, 2.0)]);
        let next = ce_update(&d, &s, 0.5, 1.0, 1e-3);
        assert_eq!(next.mean, [3.0]);
        assert_eq!(next.std, [1.0]);
        assert_eq!(next.kind, ProposalKind::Gaussian);
    }

    #[test]
    fn zero_smoothing_keeps_the_distribution() {
        let space = SearchSpace::boxed(&[(0.0, 10.0)]).unwrap();
        let d = CeDistribution::gaussian(&space, vec![6.0], vec![2.0]);
        let s = scored(&[(2.0, -1.0), (4.0, -0.5)]);
        assert_eq!(ce_update(&d, &s, 0.5, 0.0, 1e-3), d);
    }

    #[test]
    fn identical_elites_hit_the_floor() {
        let space = SearchSpace::boxed(&[(0.0, 10.0)]).unwrap();
        let d = CeDistribution::uniform(&space);
        let s = scored(&[(5.0, -1.0), (5.0, -1.0), (1.0, 4.0)]);
        let next = ce_update(&d, &s, 0.5, 1.0, 1e-3);
        assert_eq!(next.std, [1e-3]);
    }

    #[test]
    fn whole_sample_elite_equals_sample_mean() {
        let space = SearchSpace::boxed(&[(0.0, 10.0)]).unwrap();
        let d = CeDistribution::uniform(&space);
        let s = scored(&[(1.0, 0.0), (2.0, 5.0), (6.0, -2.0)]);
        assert_eq!(ce_update(&d, &s, 1.0, 1.0, 1e-3).mean, [3.0]);
    }
}
