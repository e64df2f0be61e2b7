//! Semi-filters over a universe `U = Aᶜ` and the pair-cover machinery.
//!
//! Subsets of `U` are handled as local bit masks (`u64`, bit `k` is the
//! `k`-th element of `U` in ground-set order), so `|U| ≤ 64` throughout.

mod closure;
mod compile;
mod cover;
mod lambda;

use std::sync::OnceLock;

use crate::sets::{DiscreteSpace, Subset};
use crate::{Error, Result};

pub use closure::{closure_gw, verify_lambda, Closure, ClosureState, LambdaWitness, Verification, VerifyMode};
pub use compile::{compile_lambda, CompileTarget, CompileTrace, Compiled, OmegaEntry, OmegaTag, StageValues};
pub use cover::{build_cover_graph, canonical_filters, covers_canonical, CanonicalFilter, CoverGraph};
pub use lambda::{induce_lambda, is_inert_pair, Lambda};

pub(crate) use closure::{closure_masks, generator_masks};
pub use cover::COVER_GRAPH_CAP;

/// Largest universe for exhaustive semi-filter enumeration.
pub const ENUMERATION_CAP: usize = 5;
/// Largest universe for the exhaustive semi-ultra-filter test.
pub const ULTRA_TEST_CAP: usize = 20;
pub const UNIVERSE_CAP: usize = 64;

/// A subset `U` of the ground set with a local element order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Universe {
    set: Subset,
    elements: Vec<usize>,
}

impl Universe {
    pub fn new(set: Subset) -> Result<Self> {
        let elements: Vec<usize> = set.iter().collect();
        if elements.len() > UNIVERSE_CAP {
            return Err(Error::Cap {
                what: "universe size",
                value: elements.len(),
                limit: UNIVERSE_CAP,
            });
        }
        Ok(Self { set, elements })
    }

    pub fn set(&self) -> &Subset {
        &self.set
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn ground_size(&self) -> usize {
        self.set.len()
    }

    /// Ground-set indices of the elements, in local order.
    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn full_mask(&self) -> u64 {
        full_mask(self.size())
    }

    /// `s ∩ U` as a local mask.
    pub fn to_local(&self, s: &Subset) -> u64 {
        self.elements
            .iter()
            .enumerate()
            .filter(|(_, &g)| s.contains(g))
            .fold(0, |acc, (k, _)| acc | 1 << k)
    }

    pub fn to_global(&self, mask: u64) -> Subset {
        Subset::from_indices(
            self.set.len(),
            self.elements
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &g)| g),
        )
        .expect("universe elements are in range")
    }

    pub fn local_index(&self, global: usize) -> Option<usize> {
        self.elements.binary_search(&global).ok()
    }
}

pub fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        !0
    } else {
        (1u64 << n) - 1
    }
}

/// Inserts `x` into an antichain of minimal sets, keeping it minimal.
/// Returns false when `x` was already covered.
pub(crate) fn antichain_insert(minimal: &mut Vec<u64>, x: u64) -> bool {
    if minimal.iter().any(|&m| m & !x == 0) {
        return false;
    }
    minimal.retain(|&m| x & !m != 0);
    minimal.push(x);
    true
}

/// A non-empty upward-closed family of subsets of `U` without `∅`, stored by
/// its minimal sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SemiFilter {
    size: usize,
    minimal: Vec<u64>,
}

impl SemiFilter {
    /// Upward closure of `generators`; `None` when that is not a semi-filter.
    pub fn upward_closure(size: usize, generators: impl IntoIterator<Item = u64>) -> Option<Self> {
        let mut minimal = Vec::new();
        for g in generators {
            if g == 0 {
                return None;
            }
            antichain_insert(&mut minimal, g & full_mask(size));
        }
        if minimal.is_empty() {
            return None;
        }
        minimal.sort_unstable();
        Some(Self { size, minimal })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn minimal(&self) -> &[u64] {
        &self.minimal
    }

    pub fn contains(&self, s: u64) -> bool {
        self.minimal.iter().any(|&m| m & !s == 0)
    }

    /// Every set of `self` is in `other`.
    pub fn is_subfamily_of(&self, other: &SemiFilter) -> bool {
        self.minimal.iter().all(|&m| other.contains(m))
    }

    /// `E, H ∈ 𝓕 ⇒ E ∩ H ∈ 𝓕` for the pair.
    pub fn preserves_pair(&self, e: u64, h: u64) -> bool {
        !(self.contains(e) && self.contains(h)) || self.contains(e & h)
    }

    pub fn preserves(&self, lambda: &Lambda) -> Result<bool> {
        if lambda.universe().size() != self.size {
            return Err(Error::UniverseMismatch(format!(
                "filter over {} elements, pairs over {}",
                self.size,
                lambda.universe().size()
            )));
        }
        Ok(lambda.pairs().iter().all(|&(e, h)| self.preserves_pair(e, h)))
    }

    /// For every `S ⊆ U`, `S ∈ 𝓕` or `U ∖ S ∈ 𝓕`.
    pub fn is_semi_ultra(&self) -> Result<bool> {
        if self.size > ULTRA_TEST_CAP {
            return Err(Error::Cap {
                what: "semi-ultra-filter test universe",
                value: self.size,
                limit: ULTRA_TEST_CAP,
            });
        }
        let full = full_mask(self.size);
        Ok((0..=full).all(|s| self.contains(s) || self.contains(full & !s)))
    }

    /// Membership bitmap over all `2^size` subsets.
    pub fn bitmap(&self) -> Vec<u64> {
        upward_bitmap(self.size, &self.minimal)
    }
}

pub fn upward_bitmap(size: usize, minimal: &[u64]) -> Vec<u64> {
    let total = 1usize << size;
    let mut bits = vec![0u64; total.div_ceil(64)];
    for s in 0..total as u64 {
        if minimal.iter().any(|&m| m & !s == 0) {
            bits[(s / 64) as usize] |= 1 << (s % 64);
        }
    }
    bits
}

pub fn bitmap_contains(bits: &[u64], s: u64) -> bool {
    bits[(s / 64) as usize] >> (s % 64) & 1 == 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyClass {
    NotSemiFilter,
    SemiFilter,
    SemiUltraFilter,
}

/// Classifies the upward closure of `sets` (given as subsets of the ground set).
///
/// The sets must form an antichain of non-empty subsets of `U`.
pub fn classify_family(universe: &Universe, sets: &[Subset]) -> Result<FamilyClass> {
    let mut masks = Vec::with_capacity(sets.len());
    for s in sets {
        if !s.checked_is_subset(universe.set())? {
            return Err(Error::UniverseMismatch("family member is not a subset of U".into()));
        }
        masks.push(universe.to_local(s));
    }
    masks.sort_unstable();
    masks.dedup();
    let antichain = masks
        .iter()
        .all(|&x| masks.iter().all(|&y| x == y || (x & !y != 0 && y & !x != 0)));
    if !antichain || masks.contains(&0) {
        return Ok(FamilyClass::NotSemiFilter);
    }
    let Some(f) = SemiFilter::upward_closure(universe.size(), masks) else {
        return Ok(FamilyClass::NotSemiFilter);
    };
    Ok(if f.is_semi_ultra()? {
        FamilyClass::SemiUltraFilter
    } else {
        FamilyClass::SemiFilter
    })
}

fn enumerate_all(n: usize) -> Vec<SemiFilter> {
    fn rec(cands: &[u64], start: usize, chosen: &mut Vec<u64>, n: usize, out: &mut Vec<SemiFilter>) {
        for i in start..cands.len() {
            let c = cands[i];
            if chosen.iter().all(|&x| x & !c != 0 && c & !x != 0) {
                chosen.push(c);
                let mut minimal = chosen.clone();
                minimal.sort_unstable();
                out.push(SemiFilter { size: n, minimal });
                rec(cands, i + 1, chosen, n, out);
                chosen.pop();
            }
        }
    }
    let cands: Vec<u64> = (1..=full_mask(n)).collect();
    let mut out = Vec::new();
    rec(&cands, 0, &mut Vec::new(), n, &mut out);
    out
}

/// Every semi-filter over a universe of `size` elements (`size ≤ 5`), or only
/// the semi-ultra-filters.
pub fn enumerate_semifilters(size: usize, ultra_only: bool) -> Result<&'static [SemiFilter]> {
    static ALL: [OnceLock<Vec<SemiFilter>>; ENUMERATION_CAP + 1] = [const { OnceLock::new() }; ENUMERATION_CAP + 1];
    static ULTRA: [OnceLock<Vec<SemiFilter>>; ENUMERATION_CAP + 1] = [const { OnceLock::new() }; ENUMERATION_CAP + 1];
    if size > ENUMERATION_CAP {
        return Err(Error::Cap {
            what: "semi-filter enumeration universe",
            value: size,
            limit: ENUMERATION_CAP,
        });
    }
    let all = ALL[size].get_or_init(|| enumerate_all(size));
    if !ultra_only {
        return Ok(all);
    }
    Ok(ULTRA[size].get_or_init(|| {
        all.iter()
            .filter(|f| f.is_semi_ultra().expect("small universe"))
            .cloned()
            .collect()
    }))
}

/// `B ∩ U ∈ 𝓕` for every generator `B` containing `w`.
pub fn is_above(f: &SemiFilter, w: usize, space: &DiscreteSpace, universe: &Universe) -> Result<bool> {
    if f.size() != universe.size() || space.size() != universe.ground_size() {
        return Err(Error::UniverseMismatch("filter, space and universe disagree".into()));
    }
    if w >= space.size() {
        return Err(Error::Parameter(format!("element {w} outside the ground set")));
    }
    Ok(space
        .family()
        .containing(w)
        .all(|k| f.contains(universe.to_local(space.generator(k)))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{make_generators, neq, SpaceKind};

    fn universe(bits: &str) -> Universe {
        Universe::new(Subset::parse_bits(bits).unwrap()).unwrap()
    }

    #[test]
    fn classify_examples() {
        let u = universe("11");
        let both = Subset::parse_bits("11").unwrap();
        let first = Subset::parse_bits("10").unwrap();
        assert_eq!(classify_family(&u, &[both]).unwrap(), FamilyClass::SemiFilter);
        assert_eq!(classify_family(&u, std::slice::from_ref(&first)).unwrap(), FamilyClass::SemiUltraFilter);
        assert_eq!(
            classify_family(&u, &[Subset::empty(2)]).unwrap(),
            FamilyClass::NotSemiFilter
        );
        assert_eq!(classify_family(&u, &[]).unwrap(), FamilyClass::NotSemiFilter);
        assert_eq!(
            classify_family(&u, &[first, Subset::parse_bits("11").unwrap()]).unwrap(),
            FamilyClass::NotSemiFilter
        );
        let v = universe("10");
        assert!(classify_family(&v, &[Subset::parse_bits("01").unwrap()]).is_err());
    }

    #[test]
    fn enumeration_counts_small() {
        assert_eq!(enumerate_semifilters(1, false).unwrap().len(), 1);
        assert_eq!(enumerate_semifilters(2, false).unwrap().len(), 4);
        assert_eq!(enumerate_semifilters(2, true).unwrap().len(), 3);
        assert!(enumerate_semifilters(6, false).is_err());
    }

    #[test]
    fn preservation_examples() {
        let u = Universe::new(neq(2).unwrap().complement()).unwrap();
        let f = SemiFilter::upward_closure(2, [0b01, 0b10]).unwrap();
        assert!(f.preserves(&Lambda::empty(u.clone().into())).unwrap());
        let diag = Lambda::new(u.clone().into(), [(0b01, 0b10)]).unwrap();
        assert!(!f.preserves(&diag).unwrap());
        let nested = Lambda::new(u.into(), [(0b01, 0b11)]).unwrap();
        assert!(f.preserves(&nested).unwrap());
    }

    #[test]
    fn above_for_neq2() {
        let space = make_generators(SpaceKind::GraphStars { rows: 2, cols: 2 }).unwrap();
        let u = Universe::new(neq(2).unwrap().complement()).unwrap();
        let w = space.ground().grid_index(1, 2).unwrap();
        for f in enumerate_semifilters(2, false).unwrap() {
            let expected = f.contains(0b01) && f.contains(0b10);
            assert_eq!(is_above(f, w, &space, &u).unwrap(), expected);
        }
    }

    #[test]
    fn nothing_is_above_over_rectangles() {
        let space = make_generators(SpaceKind::Rectangles { n: 2 }).unwrap();
        let g = Subset::parse_bits("0110").unwrap();
        let u = Universe::new(g.complement()).unwrap();
        for w in g.iter() {
            for f in enumerate_semifilters(2, false).unwrap() {
                assert!(!is_above(f, w, &space, &u).unwrap());
            }
        }
    }

    #[test]
    fn local_masks_round_trip() {
        let u = universe("0110110");
        let s = Subset::parse_bits("0100010").unwrap();
        assert_eq!(u.to_local(&s), 0b1001);
        assert_eq!(u.to_global(0b1001), s);
        assert_eq!(u.local_index(4), Some(2));
        assert_eq!(u.local_index(0), None);
    }
}
