//! Falsification report: a `key value` summary, the per-iteration history
//! and the lowest-robustness candidates, as comma-separated sections.

use frarl_core::falsify::{FalsificationResult, SearchSpace};

pub fn format_falsification_report(spec: &str, budget: usize, space: &SearchSpace, result: &FalsificationResult) -> String {
    let mut out = String::new();
    out.push_str(&format!("specification {spec}\n"));
    out.push_str(&format!("budget {budget}\n"));
    out.push_str(&format!("simulations {}\n", result.simulations));
    out.push_str(&format!("falsified {}\n", result.falsified));
    out.push_str(&format!(
        "first_falsified_at {}\n",
        result.first_falsified_at.map_or("none".to_string(), |x| x.to_string())
    ));
    out.push_str(&format!("best_robustness {}\n", result.best_robustness()));
    out.push_str("\n[history]\niteration,best_robustness,mean_robustness,max_relative_std\n");
    for h in &result.history {
        let rel = h
            .std
            .iter()
            .zip(space.dims())
            .map(|(s, d)| s / d.range())
            .fold(0.0, f64::max);
        out.push_str(&format!("{},{},{},{}\n", h.iteration, h.best_robustness, h.mean_robustness, rel));
    }
    out.push_str("\n[candidates]\nrank,robustness");
    for d in space.dims() {
        out.push_str(&format!(",{}", d.name));
    }
    out.push('\n');
    for (i, c) in result.top.iter().enumerate() {
        out.push_str(&format!("{},{}", i, c.robustness));
        for x in &c.point {
            out.push_str(&format!(",{x}"));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use frarl_core::falsify::{falsify, CeConfig};
    use frarl_core::mtl::{Formula, Trace};
    use frarl_core::seeded_rng;
    use frarl_core::sim::SimConfig;

    #[test]
    fn report_lists_history_and_candidates() {
        let space = SearchSpace::driving(&SimConfig::default(), 3).unwrap();
        let system = |_: &[f64]| -> Result<Trace, &'static str> {
            Ok(Trace::from_signal(0.04, frarl_core::mtl::Signal::Gap, &[1.0]).unwrap())
        };
        let cfg = CeConfig { iterations: 2, keep_best: 4, ..CeConfig::default() };
        let res = falsify(system, &Formula::True, &space, 100, &cfg, &mut seeded_rng(1)).unwrap();
        let text = format_falsification_report("true", 100, &space, &res);
        assert!(text.contains("falsified false"));
        assert!(text.contains("first_falsified_at none"));
        let history = text.split("[history]\n").nth(1).unwrap().split("\n\n").next().unwrap();
        assert_eq!(history.lines().count(), 1 + res.history.len());
        let candidates = text.split("[candidates]\n").nth(1).unwrap();
        assert_eq!(candidates.lines().count(), 1 + 4);
        assert_eq!(candidates.lines().next().unwrap().split(',').count(), 2 + space.len());
    }
}
