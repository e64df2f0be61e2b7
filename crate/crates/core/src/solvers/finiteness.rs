use crate::sets::{DiscreteSpace, Subset};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FinitenessWitness {
    Finite,
    /// Every generator containing `a ∈ A` also contains `b ∉ A`.
    Dominated { a: usize, b: usize },
    /// `A` is the whole ground set but `a` lies in no generator.
    Uncovered { a: usize },
    /// `A = ∅` but all generators share an element.
    EmptyUnreachable,
}

impl FinitenessWitness {
    pub fn is_finite(&self) -> bool {
        *self == FinitenessWitness::Finite
    }
}

/// Decides whether `a` can be built from the generators at all.
pub fn finiteness_test(a: &Subset, space: &DiscreteSpace) -> Result<FinitenessWitness> {
    if a.len() != space.size() {
        return Err(Error::GroundMismatch {
            expected: space.size(),
            actual: a.len(),
        });
    }
    let m = space.family().len();
    // vec(w): the generators containing w
    let vecs: Vec<Subset> = (0..space.size())
        .map(|w| Subset::from_indices(m, space.family().containing(w)).expect("generator indices in range"))
        .collect();
    if a.is_empty() {
        let all = space
            .family()
            .sets()
            .fold(Subset::full(space.size()), |acc, s| acc.intersection(s));
        return Ok(if all.is_empty() {
            FinitenessWitness::Finite
        } else {
            FinitenessWitness::EmptyUnreachable
        });
    }
    let outside: Vec<usize> = a.complement().iter().collect();
    for x in a.iter() {
        if let Some(&b) = outside.iter().find(|&&b| vecs[x].is_subset(&vecs[b])) {
            return Ok(FinitenessWitness::Dominated { a: x, b });
        }
    }
    if let Some(x) = a.iter().find(|&x| vecs[x].is_empty()) {
        return Ok(FinitenessWitness::Uncovered { a: x });
    }
    Ok(FinitenessWitness::Finite)
}
