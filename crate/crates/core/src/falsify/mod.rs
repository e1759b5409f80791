//! Search for initial conditions and leader inputs that minimize the
//! robustness of a closed-loop system against an MTL formula.

mod distribution;
mod search;
mod space;

pub use distribution::{ce_update, CeDistribution, ProposalKind};
pub use search::{
    falsify, uniform_falsify, CeConfig, FalsificationResult, FalsifyError, IterationRecord,
    ScoredCandidate,
};
pub use space::{Dim, SearchSpace, SpaceError};
