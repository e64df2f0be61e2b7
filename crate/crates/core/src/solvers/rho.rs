use std::sync::Arc;

use rayon::prelude::*;

use super::{finiteness_test, ComplexityResult, Measure, Meter, Refuted, SearchBudget, Status, Witness};
use crate::fusion::{
    build_cover_graph, closure_masks, compile_lambda, enumerate_semifilters, full_mask, generator_masks, is_above,
    is_inert_pair, upward_bitmap, bitmap_contains, CompileTarget, Compiled, Lambda, SemiFilter, Universe,
};
use crate::sets::{DiscreteSpace, Subset};
use crate::spaces::{make_generators, neq, SpaceKind};
use crate::{Error, Result};

/// Largest `|U|` for the closure-driven pair search.
pub const LAMBDA_SEARCH_CAP: usize = 10;
pub const RHO_CAN_NEQ_CAP: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RhoMethod {
    /// Branch on pairs that break the closure of an uncovered element of `A`.
    LambdaSearch,
    /// Exact set cover over the materialized cover graph.
    SetCover,
}

/// Non-inert pairs with `E ∪ H = U`.
///
/// Any covering pair `(E, H)` can be replaced by `(E ∪ R, H)` with
/// `R = U ∖ (E ∪ H)`: the meet is unchanged and every filter containing `E`
/// contains `E ∪ R`, so the restriction loses nothing.
fn spanning_pairs(size: usize) -> Vec<(u64, u64)> {
    let full = full_mask(size);
    let mut out = Vec::new();
    for e in 1..=full {
        // h ranges over supersets of U ∖ e
        let rest = full & !e;
        let mut s = e;
        loop {
            let h = rest | s;
            if e < h && !is_inert_pair(e, h) {
                out.push((e, h));
            }
            if s == 0 {
                break;
            }
            s = (s - 1) & e;
        }
    }
    out.sort_unstable();
    out
}

fn covers(bits: &[u64], (e, h): (u64, u64)) -> bool {
    bitmap_contains(bits, e) && bitmap_contains(bits, h) && !bitmap_contains(bits, e & h)
}

/// Elements with the same relativized generators have the same closure.
fn distinct_bases(bases: impl Iterator<Item = Vec<u64>>) -> Vec<Vec<u64>> {
    let mut out: Vec<Vec<u64>> = Vec::new();
    for b in bases {
        if !out.contains(&b) {
            out.push(b);
        }
    }
    out
}

fn key(chosen: &[usize]) -> Vec<u64> {
    let mut k: Vec<u64> = chosen.iter().map(|&i| i as u64).collect();
    k.sort_unstable();
    k
}

type Outcome = Option<Option<Vec<usize>>>;

/// Runs `dfs` under each of `first`'s branches in parallel; the earliest success wins.
fn par_first(first: Vec<usize>, dfs: impl Fn(usize) -> Outcome + Sync + Send) -> Outcome {
    let results: Vec<Outcome> = first.into_par_iter().map(dfs).collect();
    let mut out = Some(None);
    for r in results {
        match r {
            Some(Some(found)) => return Some(Some(found)),
            Some(None) => {}
            None => out = None,
        }
    }
    out
}

struct ClosureSearch<'a> {
    size: usize,
    bases: Vec<Vec<u64>>,
    candidates: Vec<(u64, u64)>,
    meter: &'a Meter,
    refuted: &'a Refuted,
}

impl ClosureSearch<'_> {
    /// Upward bitmaps of the closures that do not reach `∅`.
    fn uncovered(&self, chosen: &[usize]) -> Vec<Vec<u64>> {
        let pairs: Vec<(u64, u64)> = chosen.iter().map(|&i| self.candidates[i]).collect();
        self.bases
            .iter()
            .filter_map(|base| closure_masks(base, &pairs).0)
            .map(|minimal| upward_bitmap(self.size, &minimal))
            .collect()
    }

    /// Covering candidates of the uncovered closure with the fewest of them.
    fn branch(&self, open: &[Vec<u64>]) -> Vec<usize> {
        let mut best: Option<Vec<usize>> = None;
        for bits in open {
            let limit = best.as_ref().map_or(usize::MAX, Vec::len);
            let mut cands = Vec::new();
            for (i, &p) in self.candidates.iter().enumerate() {
                if covers(bits, p) {
                    cands.push(i);
                    if cands.len() >= limit {
                        break;
                    }
                }
            }
            if cands.len() < limit {
                let empty = cands.is_empty();
                best = Some(cands);
                if empty {
                    break;
                }
            }
        }
        best.unwrap_or_default()
    }

    fn dfs(&self, chosen: &mut Vec<usize>, left: usize) -> Outcome {
        if !self.meter.tick() {
            return None;
        }
        let open = self.uncovered(chosen);
        if open.is_empty() {
            return Some(Some(chosen.clone()));
        }
        if left == 0 {
            return Some(None);
        }
        for c in self.branch(&open) {
            chosen.push(c);
            let k = key(chosen);
            let r = if self.refuted.contains(&k) {
                Some(None)
            } else {
                self.dfs(chosen, left - 1)
            };
            chosen.pop();
            match r {
                Some(Some(found)) => return Some(Some(found)),
                Some(None) => self.refuted.insert(k),
                None => return None,
            }
        }
        Some(None)
    }

    fn run(&self, depth: usize) -> Outcome {
        let open = self.uncovered(&[]);
        if open.is_empty() {
            return Some(Some(Vec::new()));
        }
        if depth == 0 {
            return Some(None);
        }
        par_first(self.branch(&open), |c| self.dfs(&mut vec![c], depth - 1))
    }
}

/// Exact cover of `filters` by pairs, each pair given by the filters it covers.
struct CoverSearch<'a> {
    /// `covering[f]`: pairs that cover filter `f`, in pair order.
    covering: Vec<Vec<usize>>,
    /// `hits[p]`: bitset of filters covered by pair `p`.
    hits: Vec<Vec<u64>>,
    filters: usize,
    meter: &'a Meter,
    refuted: &'a Refuted,
}

impl CoverSearch<'_> {
    fn covered(&self, chosen: &[usize]) -> Vec<u64> {
        let mut bits = vec![0u64; self.filters.div_ceil(64)];
        for &p in chosen {
            for (b, h) in bits.iter_mut().zip(&self.hits[p]) {
                *b |= h;
            }
        }
        bits
    }

    fn branch(&self, chosen: &[usize]) -> Option<Vec<usize>> {
        let bits = self.covered(chosen);
        (0..self.filters)
            .filter(|&f| bits[f / 64] >> (f % 64) & 1 == 0)
            .min_by_key(|&f| self.covering[f].len())
            .map(|f| self.covering[f].clone())
    }

    fn dfs(&self, chosen: &mut Vec<usize>, left: usize) -> Outcome {
        if !self.meter.tick() {
            return None;
        }
        let Some(cands) = self.branch(chosen) else {
            return Some(Some(chosen.clone()));
        };
        if left == 0 {
            return Some(None);
        }
        for c in cands {
            chosen.push(c);
            let k = key(chosen);
            let r = if self.refuted.contains(&k) {
                Some(None)
            } else {
                self.dfs(chosen, left - 1)
            };
            chosen.pop();
            match r {
                Some(Some(found)) => return Some(Some(found)),
                Some(None) => self.refuted.insert(k),
                None => return None,
            }
        }
        Some(None)
    }

    fn run(&self, depth: usize) -> Outcome {
        let Some(first) = self.branch(&[]) else {
            return Some(Some(Vec::new()));
        };
        if depth == 0 {
            return Some(None);
        }
        par_first(first, |c| self.dfs(&mut vec![c], depth - 1))
    }
}

fn cover_search<'a>(
    filters: &[&SemiFilter],
    pairs: &[(u64, u64)],
    meter: &'a Meter,
    refuted: &'a Refuted,
) -> CoverSearch<'a> {
    let words = filters.len().div_ceil(64);
    let mut hits = vec![vec![0u64; words]; pairs.len()];
    let mut covering = vec![Vec::new(); filters.len()];
    for (p, &(e, h)) in pairs.iter().enumerate() {
        for (f, filter) in filters.iter().enumerate() {
            if !filter.preserves_pair(e, h) {
                hits[p][f / 64] |= 1 << (f % 64);
                covering[f].push(p);
            }
        }
    }
    CoverSearch {
        covering,
        hits,
        filters: filters.len(),
        meter,
        refuted,
    }
}

fn check_target(a: &Subset, space: &DiscreteSpace) -> Result<()> {
    if a.len() != space.size() {
        return Err(Error::GroundMismatch {
            expected: space.size(),
            actual: a.len(),
        });
    }
    if a.is_empty() || a.is_full() {
        return Err(Error::TrivialTarget);
    }
    Ok(())
}

fn cap(what: &'static str, value: usize, limit: usize) -> Result<()> {
    if value > limit {
        return Err(Error::Cap { what, value, limit });
    }
    Ok(())
}

/// `ρ` (or `ρ_ultra`): the fewest pairs covering every (ultra) semi-filter above
/// an element of `a`.
pub fn solve_rho(
    a: &Subset,
    space: &Arc<DiscreteSpace>,
    method: RhoMethod,
    ultra: bool,
    budget: &SearchBudget,
) -> Result<ComplexityResult> {
    check_target(a, space)?;
    let measure = if ultra { Measure::RhoUltra } else { Measure::Rho };
    let meter = Meter::new(*budget);
    let f = finiteness_test(a, space)?;
    if !f.is_finite() {
        return Ok(ComplexityResult {
            measure,
            status: Status::Infinite,
            value: 0,
            witness: Witness::NotFinite(f),
            spent: meter.spent(0),
        });
    }
    let universe = Arc::new(Universe::new(a.complement())?);
    let n = universe.size();
    let members: Vec<usize> = a.iter().collect();

    // filter list for the set-cover style searches
    let (pairs, filters): (Vec<(u64, u64)>, Vec<SemiFilter>) = match (method, ultra) {
        (RhoMethod::LambdaSearch, false) => {
            cap("universe for pair search", n, LAMBDA_SEARCH_CAP)?;
            (spanning_pairs(n), Vec::new())
        }
        (RhoMethod::LambdaSearch, true) => {
            let mut above = Vec::new();
            for f in enumerate_semifilters(n, true)? {
                if members.iter().any(|&w| is_above(f, w, space, &universe).expect("same universe")) {
                    above.push(f.clone());
                }
            }
            (spanning_pairs(n), above)
        }
        (RhoMethod::SetCover, _) => {
            let graph = build_cover_graph(a, space)?;
            let filters = graph
                .filters
                .into_iter()
                .map(|(f, _)| f)
                .filter(|f| !ultra || f.is_semi_ultra().expect("small universe"))
                .collect();
            (graph.pairs, filters)
        }
    };

    for depth in 0..=budget.max_depth {
        let refuted = Refuted::new();
        let outcome = if method == RhoMethod::LambdaSearch && !ultra {
            let masks = generator_masks(space, &universe);
            ClosureSearch {
                size: n,
                bases: distinct_bases(members.iter().map(|&w| masks.per_element[w].clone())),
                candidates: pairs.clone(),
                meter: &meter,
                refuted: &refuted,
            }
            .run(depth)
        } else {
            let refs: Vec<&SemiFilter> = filters.iter().collect();
            cover_search(&refs, &pairs, &meter, &refuted).run(depth)
        };
        match outcome {
            Some(Some(chosen)) => {
                let lambda = Lambda::new(universe.clone(), chosen.iter().map(|&i| pairs[i]))?;
                return Ok(ComplexityResult {
                    measure,
                    status: Status::Exact,
                    value: lambda.len(),
                    witness: Witness::Lambda {
                        space: space.clone(),
                        target: a.clone(),
                        lambda,
                    },
                    spent: meter.spent(depth),
                });
            }
            Some(None) => {}
            None => {
                return Ok(ComplexityResult {
                    measure,
                    status: Status::BudgetExhausted,
                    value: depth,
                    witness: Witness::None,
                    spent: meter.spent(depth.saturating_sub(1)),
                })
            }
        }
    }
    Ok(ComplexityResult {
        measure,
        status: Status::LowerBoundOnly,
        value: budget.max_depth + 1,
        witness: Witness::None,
        spent: meter.spent(budget.max_depth),
    })
}

/// `D°∩` through `ρ`: an exact pair family compiled into a cyclic sequence with
/// one intersection gate per pair.
pub fn solve_cyclic_intersections(a: &Subset, space: &Arc<DiscreteSpace>, budget: &SearchBudget) -> Result<ComplexityResult> {
    let mut r = solve_rho(a, space, RhoMethod::LambdaSearch, false, budget)?;
    r.measure = Measure::DCircCap;
    if let Witness::Lambda { lambda, .. } = &r.witness {
        let (compiled, _) = compile_lambda(a, space, lambda, CompileTarget::Cyclic)?;
        let Compiled::Cyclic(seq) = compiled else { unreachable!("cyclic target") };
        r.witness = Witness::Cyclic(seq);
    }
    Ok(r)
}

struct SeparatingSearch<'a> {
    n: usize,
    meter: &'a Meter,
}

impl SeparatingSearch<'_> {
    fn largest_class(sig: &[u64]) -> usize {
        let mut sorted = sig.to_vec();
        sorted.sort_unstable();
        sorted.chunk_by(|a, b| a == b).map(|c| c.len()).max().unwrap_or(0)
    }

    fn dfs(&self, sig: &mut Vec<u64>, chosen: &mut Vec<u64>, left: usize) -> Option<bool> {
        if !self.meter.tick() {
            return None;
        }
        let largest = Self::largest_class(sig);
        if largest <= 1 {
            return Some(true);
        }
        if left >= 64 || largest > 1usize << left {
            return Some(left >= 64);
        }
        let start = chosen.last().map_or(1, |&m| m + 1);
        let bit = chosen.len();
        for m in start..1u64 << (self.n - 1) {
            for (u, s) in sig.iter_mut().enumerate() {
                *s |= (m >> u & 1) << bit;
            }
            chosen.push(m);
            let r = self.dfs(sig, chosen, left - 1);
            if r != Some(false) {
                return r;
            }
            chosen.pop();
            for s in sig.iter_mut() {
                *s &= !(1 << bit);
            }
        }
        Some(false)
    }
}

/// The fewest pairs `(E, Ḡ ∖ E)` covering every canonical filter of `NEQ(n)`:
/// the fewest bipartitions of `[n]` separating every two elements.
pub fn solve_rho_can_neq(n: usize, budget: &SearchBudget) -> Result<ComplexityResult> {
    if n < 2 {
        return Err(Error::Parameter("NEQ needs N ≥ 2".into()));
    }
    cap("N for separating bipartitions", n, RHO_CAN_NEQ_CAP)?;
    let meter = Meter::new(*budget);
    let search = SeparatingSearch { n, meter: &meter };
    for depth in 1..=budget.max_depth {
        let mut sig = vec![0u64; n];
        let mut chosen = Vec::new();
        match search.dfs(&mut sig, &mut chosen, depth) {
            Some(true) => {
                let space = Arc::new(make_generators(SpaceKind::GraphStars { rows: n, cols: n })?);
                let target = neq(n)?;
                let universe = Arc::new(Universe::new(target.complement())?);
                // local element k of the diagonal is (k+1, k+1)
                let full = universe.full_mask();
                let lambda = Lambda::new(universe, chosen.iter().map(|&m| (m, full & !m)))?;
                return Ok(ComplexityResult {
                    measure: Measure::RhoCanNeq,
                    status: Status::Exact,
                    value: lambda.len(),
                    witness: Witness::Lambda { space, target, lambda },
                    spent: meter.spent(depth),
                });
            }
            Some(false) => {}
            None => {
                return Ok(ComplexityResult {
                    measure: Measure::RhoCanNeq,
                    status: Status::BudgetExhausted,
                    value: depth,
                    witness: Witness::None,
                    spent: meter.spent(depth - 1),
                })
            }
        }
    }
    Ok(ComplexityResult {
        measure: Measure::RhoCanNeq,
        status: Status::LowerBoundOnly,
        value: budget.max_depth + 1,
        witness: Witness::None,
        spent: meter.spent(budget.max_depth),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::{verify_lambda, VerifyMode};

    fn stars(n: usize) -> Arc<DiscreteSpace> {
        Arc::new(make_generators(SpaceKind::GraphStars { rows: n, cols: n }).unwrap())
    }

    fn rho(a: &Subset, space: &Arc<DiscreteSpace>, method: RhoMethod, ultra: bool) -> ComplexityResult {
        let r = solve_rho(a, space, method, ultra, &SearchBudget::with_depth(6)).unwrap();
        assert_eq!(r.status, Status::Exact);
        assert!(r.verify(std::slice::from_ref(a)).unwrap());
        r
    }

    #[test]
    fn spanning_pairs_cover_everything_and_are_non_inert() {
        let p = spanning_pairs(2);
        assert_eq!(p, vec![(0b01, 0b10)]);
        for (e, h) in spanning_pairs(4) {
            assert_eq!(e | h, 0b1111);
            assert!(!is_inert_pair(e, h));
        }
        // (3^n - 2^(n+1) + 1) / 2 incomparable unordered pairs spanning U
        assert_eq!(spanning_pairs(4).len(), 25);
    }

    #[test]
    fn neq_both_methods() {
        for (n, expected) in [(2, 1), (4, 2)] {
            let a = neq(n).unwrap();
            for method in [RhoMethod::LambdaSearch, RhoMethod::SetCover] {
                assert_eq!(rho(&a, &stars(n), method, false).value, expected);
                assert_eq!(rho(&a, &stars(n), method, true).value, expected);
            }
        }
    }

    #[test]
    fn rectangles_are_zero() {
        let space = Arc::new(make_generators(SpaceKind::Rectangles { n: 2 }).unwrap());
        for bits in 1..15 {
            let g = Subset::from_word(4, bits);
            for method in [RhoMethod::LambdaSearch, RhoMethod::SetCover] {
                assert_eq!(rho(&g, &space, method, false).value, 0);
            }
        }
    }

    #[test]
    fn cyclic_through_rho() {
        let a = neq(2).unwrap();
        let r = solve_cyclic_intersections(&a, &stars(2), &SearchBudget::default()).unwrap();
        assert_eq!((r.status, r.value), (Status::Exact, 1));
        assert!(r.verify(&[a]).unwrap());
    }

    #[test]
    fn separating_bipartitions() {
        for (n, expected) in [(2, 1), (3, 2), (4, 2), (5, 3), (8, 3)] {
            let r = solve_rho_can_neq(n, &SearchBudget::with_depth(8)).unwrap();
            assert_eq!((r.status, r.value), (Status::Exact, expected), "N = {n}");
            assert!(r.verify(&[neq(n).unwrap()]).unwrap());
        }
    }

    #[test]
    fn bipartition_witness_is_a_full_cover_for_small_n() {
        for n in [2, 3, 4] {
            let r = solve_rho_can_neq(n, &SearchBudget::with_depth(8)).unwrap();
            let Witness::Lambda { space, target, lambda } = &r.witness else { panic!() };
            assert!(verify_lambda(target, space, lambda, VerifyMode::Closure).unwrap().valid);
        }
    }

    #[test]
    fn trivial_targets_rejected() {
        let s = stars(2);
        assert_eq!(
            solve_rho(&Subset::full(4), &s, RhoMethod::LambdaSearch, false, &SearchBudget::default()).unwrap_err(),
            Error::TrivialTarget
        );
    }
}
