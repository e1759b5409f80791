use alloc::format;

use super::config::SimConfig;
use crate::mtl::{parse_formula, Formula, Predicate, PredicateSet, Relation, Signal};

/// The driving safety requirement: never collide, never drive in reverse.
pub const DRIVING_SPEC: &str = "G (!collision & !reverse)";

/// `collision` (gap <= 0) and `reverse` (v_ego <= 0) atoms. Standstill sits on
/// the reverse boundary with robustness zero. Each distance is normalized by
/// the signal's range over the scenario bounds so meters and m/s compare on
/// one scale.
pub fn driving_predicates(cfg: &SimConfig) -> PredicateSet {
    PredicateSet::new()
        .with(
            Predicate::new("collision", Signal::Gap, Relation::AtMost, 0.0)
                .with_scale(cfg.gap_scale()),
        )
        .with(
            Predicate::new("reverse", Signal::EgoVelocity, Relation::AtMost, 0.0)
                .with_scale(cfg.velocity_scale()),
        )
}

/// Parsed [`DRIVING_SPEC`].
pub fn driving_spec(cfg: &SimConfig) -> Formula {
    match parse_formula(DRIVING_SPEC, &driving_predicates(cfg)) {
        Ok(f) => f,
        Err(e) => panic!("{}", format!("built-in specification does not parse: {e}")),
    }
}
