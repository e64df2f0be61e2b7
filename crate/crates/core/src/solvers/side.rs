use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

use super::{finiteness_test, state_key, words, ComplexityResult, Measure, Meter, Refuted, SearchBudget, Status, Witness};
use crate::constructions::{Builder, Construction, Op, Ref};
use crate::sets::{DiscreteSpace, Subset};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Intersections,
    Unions,
}

/// Family members: the reduced generators followed by the produced intersections.
const MEMBER_CAP: usize = 64;

/// Unions of the reduced generators; moves range over pairs of these.
pub const CLOSURE_CAP: usize = 1 << 12;

/// All distinct non-empty unions of the members, in a fixed insertion order,
/// each with the member mask that first produced it.
#[derive(Clone)]
struct Closure {
    sets: Vec<(u64, u64)>,
    index: HashMap<u64, usize>,
}

impl Closure {
    fn new() -> Self {
        Self {
            sets: Vec::new(),
            index: HashMap::new(),
        }
    }

    fn add_member(&mut self, z: u64, bit: u64) {
        let existing = self.sets.len();
        let push = |s: u64, m: u64, c: &mut Self| {
            if let std::collections::hash_map::Entry::Vacant(e) = c.index.entry(s) {
                e.insert(c.sets.len());
                c.sets.push((s, m));
            }
        };
        push(z, bit, self);
        for k in 0..existing {
            let (s, m) = self.sets[k];
            push(s | z, m | bit, self);
        }
    }

    fn contains(&self, s: u64) -> bool {
        self.index.contains_key(&s)
    }
}

#[derive(Clone, Copy)]
struct Produced {
    z: u64,
    x: u64,
    y: u64,
}

struct Search<'a> {
    a: u64,
    meter: &'a Meter,
    refuted: &'a Refuted,
}

struct Node {
    members: Vec<u64>,
    closure: Closure,
    produced: Vec<Produced>,
}

impl Node {
    fn with(&self, p: Produced) -> Node {
        let mut members = self.members.clone();
        let mut closure = self.closure.clone();
        closure.add_member(p.z, 1 << members.len());
        members.push(p.z);
        let mut produced = self.produced.clone();
        produced.push(p);
        Node {
            members,
            closure,
            produced,
        }
    }

    fn zs(&self) -> Vec<u64> {
        self.produced.iter().map(|p| p.z).collect()
    }
}

impl Search<'_> {
    fn union_below(&self, members: &[u64], bound: u64) -> (u64, u64) {
        members
            .iter()
            .enumerate()
            .filter(|(_, &s)| s & !bound == 0)
            .fold((0, 0), |(u, m), (k, &s)| (u | s, m | 1 << k))
    }

    fn expressible(&self, members: &[u64]) -> bool {
        if self.a == 0 {
            members.contains(&0)
        } else {
            self.union_below(members, self.a).0 == self.a
        }
    }

    /// One more intersection suffices iff some closure set `X ⊇ missing` meets the
    /// largest closure set `Y` with `X ∩ Y ⊆ A` in a superset of `missing`.
    fn last_level(&self, node: &Node) -> Option<Produced> {
        let missing = self.a & !self.union_below(&node.members, self.a).0;
        node.closure.sets.iter().find_map(|&(x, xm)| {
            if missing & !x != 0 {
                return None;
            }
            let (y, ym) = self.union_below(&node.members, self.a | !x);
            (ym != 0 && missing & !y == 0).then_some(Produced { z: x & y, x: xm, y: ym })
        })
    }

    fn moves(&self, node: &Node) -> Vec<Produced> {
        let sets = &node.closure.sets;
        let mut seen = HashMap::new();
        let mut out = Vec::new();
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                let z = sets[i].0 & sets[j].0;
                if (z == 0 && self.a != 0) || node.closure.contains(z) || seen.contains_key(&z) {
                    continue;
                }
                seen.insert(z, ());
                out.push(Produced {
                    z,
                    x: sets[i].1,
                    y: sets[j].1,
                });
            }
        }
        out
    }

    fn dfs(&self, node: &Node, left: usize) -> Option<Option<Vec<Produced>>> {
        if !self.meter.tick() {
            return None;
        }
        if self.expressible(&node.members) {
            return Some(Some(node.produced.clone()));
        }
        if left == 0 {
            return Some(None);
        }
        if left == 1 {
            return Some(self.last_level(node).map(|p| {
                let mut v = node.produced.clone();
                v.push(p);
                v
            }));
        }
        let zs = node.zs();
        for p in self.moves(node) {
            let key = state_key(&zs, p.z);
            if self.refuted.contains(&key) {
                continue;
            }
            match self.dfs(&node.with(p), left - 1) {
                Some(Some(found)) => return Some(Some(found)),
                Some(None) => self.refuted.insert(key),
                None => return None,
            }
        }
        Some(None)
    }

    fn run(&self, root: &Node, depth: usize) -> Option<Option<Vec<Produced>>> {
        if depth <= 1 || self.expressible(&root.members) {
            return self.dfs(root, depth);
        }
        let results: Vec<_> = self
            .moves(root)
            .into_par_iter()
            .map(|p| self.dfs(&root.with(p), depth - 1))
            .collect();
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
}

/// Distinct generators, without ones that are unions of other generators.
/// `∅` is kept only when it is the target.
fn reduce(gens: &[u64], a: u64) -> Vec<(u64, usize)> {
    let mut distinct: Vec<(u64, usize)> = Vec::new();
    for (k, &g) in gens.iter().enumerate() {
        if (g != 0 || a == 0) && !distinct.iter().any(|d| d.0 == g) {
            distinct.push((g, k));
        }
    }
    let all = distinct.clone();
    distinct.retain(|&(g, _)| {
        g == 0 || all.iter().filter(|&&(s, _)| s != g && s & !g == 0).fold(0, |u, &(s, _)| u | s) != g
    });
    distinct
}

fn build_witness(
    space: &Arc<DiscreteSpace>,
    base: &[(u64, usize)],
    produced: &[Produced],
    a: u64,
) -> Result<Construction> {
    let mut b = Builder::default();
    let mut refs: Vec<Option<Ref>> = base.iter().map(|&(_, k)| Some(Ref::Generator(k))).collect();
    let mut values: Vec<u64> = base.iter().map(|&(g, _)| g).collect();
    let union_of = |b: &mut Builder, refs: &[Option<Ref>], mask: u64| {
        b.union_all((0..refs.len()).filter(|k| mask >> k & 1 == 1).map(|k| refs[k]))
    };
    for p in produced {
        let x = union_of(&mut b, &refs, p.x);
        let y = union_of(&mut b, &refs, p.y);
        refs.push(b.apply(Op::Intersection, x, y));
        values.push(p.z);
    }
    let mask = values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s & !a == 0 && (a != 0 || s == 0))
        .fold(0u64, |m, (k, _)| m | 1 << k);
    let out = union_of(&mut b, &refs, mask).ok_or_else(|| Error::Construction("empty witness".into()))?;
    b.finish(space.clone(), out)
}

/// `D∩` or `D∪`: the fewest operations of one kind, the other kind being free.
///
/// `D∪` is solved as `D∩` of the complement over the complemented family.
pub fn solve_side_count(a: &Subset, space: &Arc<DiscreteSpace>, side: Side, budget: &SearchBudget) -> Result<ComplexityResult> {
    match side {
        Side::Intersections => solve_intersections(a, space, budget, Measure::DCap),
        Side::Unions => {
            let dual_space = Arc::new(space.complemented());
            let mut r = solve_intersections(&a.complement(), &dual_space, budget, Measure::DCup)?;
            if let Witness::Construction(c) = &r.witness {
                r.witness = Witness::Construction(c.dual(space.clone())?);
            }
            Ok(r)
        }
    }
}

fn solve_intersections(a: &Subset, space: &Arc<DiscreteSpace>, budget: &SearchBudget, measure: Measure) -> Result<ComplexityResult> {
    let (gens, aw) = words(space, a)?;
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
    let base = reduce(&gens, aw);
    if base.len() + budget.max_depth > MEMBER_CAP {
        return Err(Error::Cap {
            what: "family size plus depth",
            value: base.len() + budget.max_depth,
            limit: MEMBER_CAP,
        });
    }
    let mut closure = Closure::new();
    for (k, &(g, _)) in base.iter().enumerate() {
        closure.add_member(g, 1 << k);
    }
    if closure.sets.len() > CLOSURE_CAP {
        return Err(Error::Cap {
            what: "union closure of the generators",
            value: closure.sets.len(),
            limit: CLOSURE_CAP,
        });
    }
    let root = Node {
        members: base.iter().map(|&(g, _)| g).collect(),
        closure,
        produced: Vec::new(),
    };
    for depth in 0..=budget.max_depth {
        let refuted = Refuted::new();
        let search = Search {
            a: aw,
            meter: &meter,
            refuted: &refuted,
        };
        match search.run(&root, depth) {
            Some(Some(produced)) => {
                let witness = build_witness(space, &base, &produced, aw)?;
                debug_assert_eq!(witness.cost().intersections, produced.len());
                return Ok(ComplexityResult {
                    measure,
                    status: Status::Exact,
                    value: produced.len(),
                    witness: Witness::Construction(witness),
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
                });
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

#[cfg(test)]
mod tests {

    use super::*;
    use crate::spaces::{chessboard, make_generators, neq, SpaceKind};

    fn stars(n: usize) -> Arc<DiscreteSpace> {
        Arc::new(make_generators(SpaceKind::GraphStars { rows: n, cols: n }).unwrap())
    }

    fn check(a: &Subset, space: &Arc<DiscreteSpace>, side: Side, expected: usize) {
        let r = solve_side_count(a, space, side, &SearchBudget::default()).unwrap();
        assert_eq!((r.status, r.value), (Status::Exact, expected), "{a}");
        assert!(r.verify(std::slice::from_ref(a)).unwrap());
    }

    #[test]
    fn neq_values() {
        check(&neq(2).unwrap(), &stars(2), Side::Intersections, 1);
        check(&neq(4).unwrap(), &stars(4), Side::Intersections, 2);
        check(&neq(2).unwrap(), &stars(2), Side::Unions, 1);
    }

    #[test]
    fn chessboard_needs_one_intersection() {
        check(&chessboard(5, 5).unwrap(), &stars(5), Side::Intersections, 1);
    }

    #[test]
    fn unions_of_stars_are_free() {
        let s = stars(3);
        let a = s.generator(0).union(s.generator(4));
        check(&a, &s, Side::Intersections, 0);
        check(s.generator(1), &s, Side::Intersections, 0);
    }

    #[test]
    fn redundant_generators_are_dropped() {
        let r = reduce(&[0b011, 0b001, 0b010, 0b001, 0], 0b1);
        assert_eq!(r, vec![(0b001, 1), (0b010, 2)]);
    }

    #[test]
    fn empty_target() {
        // R1 ∩ R2 = ∅
        check(&Subset::empty(4), &stars(2), Side::Intersections, 1);
    }

    #[test]
    fn large_star_families_hit_the_closure_cap() {
        let space = Arc::new(make_generators(SpaceKind::GraphStars { rows: 8, cols: 8 }).unwrap());
        let r = solve_side_count(&neq(8).unwrap(), &space, Side::Intersections, &SearchBudget::default());
        assert!(matches!(r, Err(Error::Cap { .. })));
    }
}
