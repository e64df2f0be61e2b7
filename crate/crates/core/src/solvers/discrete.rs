use std::sync::Arc;

use rayon::prelude::*;

use super::{finiteness_test, state_key, words, ComplexityResult, Measure, Meter, Refuted, SearchBudget, Status, Witness};
use crate::constructions::{Construction, Op, Ref, Step};
use crate::sets::{DiscreteSpace, Subset};
use crate::{Error, Result};

struct Search<'a> {
    /// Distinct generator values, each with its first generator index.
    gens: Vec<(u64, usize)>,
    targets: &'a [u64],
    meter: &'a Meter,
    refuted: &'a Refuted,
}

#[derive(Clone, Default)]
struct Node {
    produced: Vec<u64>,
    steps: Vec<(Op, usize, usize)>,
}

impl Search<'_> {
    fn value(&self, node: &Node, i: usize) -> u64 {
        if i < self.gens.len() {
            self.gens[i].0
        } else {
            node.produced[i - self.gens.len()]
        }
    }

    fn missing(&self, produced: &[u64]) -> usize {
        self.targets.iter().filter(|t| !produced.contains(t)).count()
    }

    /// Candidate next steps in canonical order, one per distinct new value.
    fn moves(&self, node: &Node) -> Vec<(Op, usize, usize, u64)> {
        let avail = self.gens.len() + node.produced.len();
        let mut seen = Vec::new();
        let mut out = Vec::new();
        for i in 0..avail {
            let x = self.value(node, i);
            // a generator that is still a target costs one self-union
            if i < self.gens.len() && self.targets.contains(&x) && !node.produced.contains(&x) && !seen.contains(&x) {
                seen.push(x);
                out.push((Op::Union, i, i, x));
            }
            for j in i + 1..avail {
                let y = self.value(node, j);
                for op in [Op::Union, Op::Intersection] {
                    let v = match op {
                        Op::Union => x | y,
                        Op::Intersection => x & y,
                    };
                    let is_gen = self.gens.iter().any(|g| g.0 == v);
                    let wanted = self.targets.contains(&v);
                    if node.produced.contains(&v) || (is_gen && !wanted) || seen.contains(&v) {
                        continue;
                    }
                    seen.push(v);
                    out.push((op, i, j, v));
                }
            }
        }
        out
    }

    /// `Some(Some(node))` on success, `Some(None)` when refuted, `None` when out of budget.
    fn dfs(&self, node: &mut Node, left: usize) -> Option<Option<Node>> {
        if !self.meter.tick() {
            return None;
        }
        let missing = self.missing(&node.produced);
        if missing == 0 {
            return Some(Some(node.clone()));
        }
        if missing > left {
            return Some(None);
        }
        for (op, i, j, v) in self.moves(node) {
            let key = state_key(&node.produced, v);
            if self.refuted.contains(&key) {
                continue;
            }
            node.produced.push(v);
            node.steps.push((op, i, j));
            let r = self.dfs(node, left - 1);
            node.produced.pop();
            node.steps.pop();
            match r {
                Some(Some(found)) => return Some(Some(found)),
                Some(None) => self.refuted.insert(key),
                None => return None,
            }
        }
        Some(None)
    }

    /// Parallel over the first move; the first success in canonical order wins.
    fn run(&self, depth: usize) -> Option<Option<Node>> {
        let root = Node::default();
        if self.missing(&root.produced) == 0 {
            return Some(Some(root));
        }
        let results: Vec<Option<Option<Node>>> = self
            .moves(&root)
            .into_par_iter()
            .map(|(op, i, j, v)| {
                let mut node = Node {
                    produced: vec![v],
                    steps: vec![(op, i, j)],
                };
                self.dfs(&mut node, depth - 1)
            })
            .collect();
        let mut out = Some(None);
        for r in results {
            match r {
                Some(Some(n)) => return Some(Some(n)),
                Some(None) => {}
                None => out = None,
            }
        }
        out
    }
}

fn build_witness(space: &Arc<DiscreteSpace>, gens: &[(u64, usize)], node: &Node, targets: &[u64]) -> Result<Construction> {
    let r = |i: usize| {
        if i < gens.len() {
            Ref::Generator(gens[i].1)
        } else {
            Ref::Step(i - gens.len())
        }
    };
    let steps = node.steps.iter().map(|&(op, i, j)| Step::new(op, r(i), r(j))).collect();
    let outputs = targets
        .iter()
        .map(|t| node.produced.iter().position(|p| p == t).expect("every target is produced"))
        .collect();
    Construction::with_outputs(space.clone(), steps, outputs)
}

/// `D` for one target: the fewest unions and intersections that end in it.
pub fn solve_discrete(target: &Subset, space: &Arc<DiscreteSpace>, budget: &SearchBudget) -> Result<ComplexityResult> {
    solve(std::slice::from_ref(target), space, budget, Measure::D)
}

/// The fewest steps whose values include every target.
pub fn solve_discrete_multi(targets: &[Subset], space: &Arc<DiscreteSpace>, budget: &SearchBudget) -> Result<ComplexityResult> {
    solve(targets, space, budget, Measure::DMulti)
}

fn solve(targets: &[Subset], space: &Arc<DiscreteSpace>, budget: &SearchBudget, measure: Measure) -> Result<ComplexityResult> {
    if targets.is_empty() {
        return Err(Error::Parameter("no target sets".into()));
    }
    let meter = Meter::new(*budget);
    let mut words_t = Vec::with_capacity(targets.len());
    let mut gens = Vec::new();
    for t in targets {
        let (g, w) = words(space, t)?;
        let f = finiteness_test(t, space)?;
        if !f.is_finite() {
            return Ok(ComplexityResult {
                measure,
                status: Status::Infinite,
                value: 0,
                witness: Witness::NotFinite(f),
                spent: meter.spent(0),
            });
        }
        words_t.push(w);
        gens = g;
    }
    words_t.dedup();
    let mut distinct: Vec<(u64, usize)> = Vec::new();
    for (k, g) in gens.into_iter().enumerate() {
        if !distinct.iter().any(|d| d.0 == g) {
            distinct.push((g, k));
        }
    }
    let mut unique_targets = Vec::new();
    for &t in &words_t {
        if !unique_targets.contains(&t) {
            unique_targets.push(t);
        }
    }
    if unique_targets.len() != targets.len() {
        return Err(Error::Parameter("duplicate target sets".into()));
    }
    for depth in unique_targets.len()..=budget.max_depth {
        let refuted = Refuted::new();
        let search = Search {
            gens: distinct.clone(),
            targets: &unique_targets,
            meter: &meter,
            refuted: &refuted,
        };
        match search.run(depth) {
            Some(Some(node)) => {
                let witness = build_witness(space, &distinct, &node, &unique_targets)?;
                return Ok(ComplexityResult {
                    measure,
                    status: Status::Exact,
                    value: witness.len(),
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
                    spent: meter.spent(depth - 1),
                });
            }
        }
    }
    Ok(ComplexityResult {
        measure,
        status: Status::LowerBoundOnly,
        value: budget.max_depth.max(unique_targets.len() - 1) + 1,
        witness: Witness::None,
        spent: meter.spent(budget.max_depth),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{make_generators, neq, SpaceKind};

    fn stars(n: usize) -> Arc<DiscreteSpace> {
        Arc::new(make_generators(SpaceKind::GraphStars { rows: n, cols: n }).unwrap())
    }

    #[test]
    fn generator_costs_one() {
        let s = stars(2);
        let r = solve_discrete(&s.generator(0).clone(), &s, &SearchBudget::default()).unwrap();
        assert_eq!((r.status, r.value), (Status::Exact, 1));
        assert!(r.verify(&[s.generator(0).clone()]).unwrap());
    }

    #[test]
    fn neq2_needs_three() {
        let s = stars(2);
        let a = neq(2).unwrap();
        let r = solve_discrete(&a, &s, &SearchBudget::default()).unwrap();
        assert_eq!((r.status, r.value), (Status::Exact, 3));
        assert!(r.verify(&[a]).unwrap());
        let Witness::Construction(c) = &r.witness else { panic!() };
        assert_eq!(c.cost().intersections + c.cost().unions, 3);
    }

    #[test]
    fn multi_target_generators() {
        let s = stars(2);
        let targets = [s.generator(0).clone(), s.generator(2).clone()];
        let r = solve_discrete_multi(&targets, &s, &SearchBudget::default()).unwrap();
        assert_eq!((r.status, r.value), (Status::Exact, 2));
        assert!(r.verify(&targets).unwrap());
        let Witness::Construction(c) = &r.witness else { panic!() };
        assert_eq!(c.outputs().len(), 2);
    }

    #[test]
    fn depth_cap_gives_lower_bound() {
        let s = stars(2);
        let r = solve_discrete(&neq(2).unwrap(), &s, &SearchBudget::with_depth(2)).unwrap();
        assert_eq!((r.status, r.value), (Status::LowerBoundOnly, 3));
        assert!(r.verify(&[neq(2).unwrap()]).unwrap());
    }

    #[test]
    fn state_cap_gives_budget_exhausted() {
        let s = stars(2);
        let budget = SearchBudget {
            max_states: 2,
            ..SearchBudget::default()
        };
        let r = solve_discrete(&neq(2).unwrap(), &s, &budget).unwrap();
        assert_eq!(r.status, Status::BudgetExhausted);
        assert!(r.value <= 3);
    }
}
