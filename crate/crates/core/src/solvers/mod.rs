//! Exact, budget-aware solvers for every complexity measure.
//!
//! The search-based solvers work on single-word bit sets, so they require a
//! ground set of at most 64 elements.

mod bounds;
mod budget;
mod discrete;
mod experiment;
mod finiteness;
mod result;
mod rho;
mod side;

pub use bounds::{counting_bound, cubic_bound, BoundsReport};
pub use budget::{BudgetSpent, Meter, SearchBudget};
pub use discrete::{solve_discrete, solve_discrete_multi};
pub use experiment::{random_graph_experiment, ExperimentReport, GraphSample, ASYMPTOTIC_NOTE};
pub use finiteness::{finiteness_test, FinitenessWitness};
pub use result::{ComplexityResult, Measure, Status, Witness};
pub use rho::{
    solve_cyclic_intersections, solve_rho, solve_rho_can_neq, RhoMethod, LAMBDA_SEARCH_CAP, RHO_CAN_NEQ_CAP,
};
pub use side::{solve_side_count, Side, CLOSURE_CAP};

use crate::sets::{DiscreteSpace, Subset};
use crate::{Error, Result};

pub const WORD_CAP: usize = 64;

/// Generators and target as single words.
pub(crate) fn words(space: &DiscreteSpace, target: &Subset) -> Result<(Vec<u64>, u64)> {
    if target.len() != space.size() {
        return Err(Error::GroundMismatch {
            expected: space.size(),
            actual: target.len(),
        });
    }
    if space.size() > WORD_CAP {
        return Err(Error::Cap {
            what: "ground set size for exact search",
            value: space.size(),
            limit: WORD_CAP,
        });
    }
    let gens = space
        .family()
        .sets()
        .map(|s| s.as_word().expect("at most 64 elements"))
        .collect();
    Ok((gens, target.as_word().expect("at most 64 elements")))
}

/// Sharded set of refuted search states, shared by parallel branches.
///
/// Only fully explored dead ends are published, so the first solution in
/// search order does not depend on scheduling.
pub(crate) struct Refuted {
    shards: Vec<std::sync::Mutex<std::collections::HashSet<Vec<u64>>>>,
}

impl Refuted {
    pub(crate) fn new() -> Self {
        Self {
            shards: (0..64).map(|_| Default::default()).collect(),
        }
    }

    fn shard(&self, key: &[u64]) -> &std::sync::Mutex<std::collections::HashSet<Vec<u64>>> {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        key.hash(&mut h);
        &self.shards[(h.finish() % self.shards.len() as u64) as usize]
    }

    pub(crate) fn contains(&self, key: &[u64]) -> bool {
        self.shard(key).lock().expect("poisoned").contains(key)
    }

    pub(crate) fn insert(&self, key: Vec<u64>) {
        self.shard(&key).lock().expect("poisoned").insert(key);
    }
}

/// Sorted copy of `produced` with `extra` added.
pub(crate) fn state_key(produced: &[u64], extra: u64) -> Vec<u64> {
    let mut key = Vec::with_capacity(produced.len() + 1);
    key.extend_from_slice(produced);
    key.push(extra);
    key.sort_unstable();
    key
}
