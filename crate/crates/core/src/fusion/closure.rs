use rayon::prelude::*;

use super::{antichain_insert, enumerate_semifilters, is_above, Lambda, SemiFilter, Universe};
use crate::sets::{DiscreteSpace, Subset};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClosureState {
    /// The closure is a semi-filter above `w` preserving the pairs.
    Filter(SemiFilter),
    /// No generator contains `w`, so the closure is the empty family.
    Degenerate,
    /// `∅` was derived.
    Empty,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Closure {
    pub state: ClosureState,
    pub empty_reached: bool,
    /// Propagation rounds that added a set.
    pub rounds: usize,
}

/// `B ∩ U` as local masks for every generator through each element.
pub struct GeneratorMasks {
    pub per_element: Vec<Vec<u64>>,
}

pub(crate) fn generator_masks(space: &DiscreteSpace, universe: &Universe) -> GeneratorMasks {
    let locals: Vec<u64> = space.family().sets().map(|b| universe.to_local(b)).collect();
    let per_element = (0..space.size())
        .map(|w| {
            let mut v: Vec<u64> = space.family().containing(w).map(|k| locals[k]).collect();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();
    GeneratorMasks { per_element }
}

/// Base case then synchronous propagation rounds. Returns the minimal sets, or
/// `None` once `∅` is derived, together with the number of productive rounds.
pub(crate) fn closure_masks(base: &[u64], pairs: &[(u64, u64)]) -> (Option<Vec<u64>>, usize) {
    let mut minimal = Vec::new();
    for &b in base {
        if b == 0 {
            return (None, 0);
        }
        antichain_insert(&mut minimal, b);
    }
    let contains = |minimal: &[u64], s: u64| minimal.iter().any(|&m| m & !s == 0);
    let mut rounds = 0;
    loop {
        let fresh: Vec<u64> = pairs
            .iter()
            .filter(|&&(e, h)| contains(&minimal, e) && contains(&minimal, h) && !contains(&minimal, e & h))
            .map(|&(e, h)| e & h)
            .collect();
        if fresh.is_empty() {
            return (Some(minimal), rounds);
        }
        rounds += 1;
        for x in fresh {
            if x == 0 {
                return (None, rounds);
            }
            antichain_insert(&mut minimal, x);
        }
    }
}

/// The least family that any semi-filter above `w` preserving `lambda` must contain.
pub fn closure_gw(w: usize, space: &DiscreteSpace, lambda: &Lambda) -> Result<Closure> {
    let universe = lambda.universe();
    if space.size() != universe.ground_size() {
        return Err(Error::UniverseMismatch("pairs and space use different ground sets".into()));
    }
    if w >= space.size() {
        return Err(Error::Parameter(format!("element {w} outside the ground set")));
    }
    let mut base: Vec<u64> = space
        .family()
        .containing(w)
        .map(|k| universe.to_local(space.generator(k)))
        .collect();
    base.sort_unstable();
    base.dedup();
    let (result, rounds) = closure_masks(&base, lambda.pairs());
    let (state, empty_reached) = match result {
        None => (ClosureState::Empty, true),
        Some(minimal) => match SemiFilter::upward_closure(universe.size(), minimal) {
            Some(f) => (ClosureState::Filter(f), false),
            None => (ClosureState::Degenerate, false),
        },
    };
    debug_assert!(rounds <= lambda.len());
    Ok(Closure {
        state,
        empty_reached,
        rounds,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    /// Per-element closure: `∅` is derived exactly for the elements of `A`.
    Closure,
    /// No enumerated semi-filter above an element of `A` preserves the pairs.
    Enumerate,
    /// As `Enumerate`, restricted to semi-ultra-filters.
    EnumerateUltra,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LambdaWitness {
    /// The closure of this element disagrees with membership in `A`.
    Element(usize),
    /// This filter is above `element ∈ A` and preserves every pair.
    Filter { filter: SemiFilter, element: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub valid: bool,
    pub witness: Option<LambdaWitness>,
}

/// Checks that `lambda` covers every semi-filter above an element of `a`.
pub fn verify_lambda(a: &Subset, space: &DiscreteSpace, lambda: &Lambda, mode: VerifyMode) -> Result<Verification> {
    if a.len() != space.size() {
        return Err(Error::GroundMismatch {
            expected: space.size(),
            actual: a.len(),
        });
    }
    if a.is_empty() || a.is_full() {
        return Err(Error::TrivialTarget);
    }
    let universe = lambda.universe();
    if *universe.set() != a.complement() {
        return Err(Error::UniverseMismatch("pairs are not over the complement of the target".into()));
    }
    let witness = match mode {
        VerifyMode::Closure => {
            let masks = generator_masks(space, universe);
            (0..space.size())
                .into_par_iter()
                .find_first(|&w| {
                    let reached = closure_masks(&masks.per_element[w], lambda.pairs()).0.is_none();
                    reached != a.contains(w)
                })
                .map(LambdaWitness::Element)
        }
        VerifyMode::Enumerate | VerifyMode::EnumerateUltra => {
            let filters = enumerate_semifilters(universe.size(), mode == VerifyMode::EnumerateUltra)?;
            let members: Vec<usize> = a.iter().collect();
            filters
                .par_iter()
                .find_map_first(|f| {
                    if !f.preserves(lambda).expect("same universe") {
                        return None;
                    }
                    members
                        .iter()
                        .find(|&&w| is_above(f, w, space, universe).expect("same universe"))
                        .map(|&w| LambdaWitness::Filter {
                            filter: f.clone(),
                            element: w,
                        })
                })
        }
    };
    Ok(Verification {
        valid: witness.is_none(),
        witness,
    })
}
