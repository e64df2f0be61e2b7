use std::sync::Arc;

use super::{CyclicSequence, Ref, Step};
use crate::sets::Subset;
use crate::spaces::{make_generators, SpaceKind};
use crate::{Error, Result};

/// Rules `(a, b, c)` over `[m]`: once `a` and `b` are present, add `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleSet {
    m: usize,
    rules: Vec<(usize, usize, usize)>,
}

impl RuleSet {
    pub fn new(m: usize, rules: impl IntoIterator<Item = (usize, usize, usize)>) -> Result<Self> {
        if m == 0 {
            return Err(Error::Parameter("rule universe must be non-empty".into()));
        }
        let mut rules: Vec<_> = rules.into_iter().collect();
        if let Some(bad) = rules
            .iter()
            .find(|&&(a, b, c)| [a, b, c].iter().any(|&x| x == 0 || x > m))
        {
            return Err(Error::Parameter(format!("rule {bad:?} outside [{m}]")));
        }
        rules.sort_unstable();
        rules.dedup();
        Ok(Self { m, rules })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn rules(&self) -> &[(usize, usize, usize)] {
        &self.rules
    }
}

/// Index of the input point whose bit `i` (1-based, leftmost first) is set iff `i ∈ Y`.
pub fn generation_input(m: usize, y: &Subset) -> Result<usize> {
    if y.len() != m {
        return Err(Error::GroundMismatch {
            expected: m,
            actual: y.len(),
        });
    }
    Ok(y.iter().map(|i| 1 << (m - 1 - i)).sum())
}

/// Direct closure: apply rules until nothing new; accept iff `m` is present.
pub fn simulate_generation(r: &RuleSet, y: &Subset) -> Result<bool> {
    if y.len() != r.m {
        return Err(Error::GroundMismatch {
            expected: r.m,
            actual: y.len(),
        });
    }
    let mut present: Vec<bool> = (0..r.m).map(|i| y.contains(i)).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for &(a, b, c) in &r.rules {
            if present[a - 1] && present[b - 1] && !present[c - 1] {
                present[c - 1] = true;
                changed = true;
            }
        }
    }
    Ok(present[r.m - 1])
}

/// Cyclic circuit over `mono:m` with one intersection gate per rule.
///
/// Gates `f_i = x_i ∪ h_i`, `g_r = f_a ∩ f_b`, and `h_i` the union of the `g_r`
/// producing `i` (the empty generator when no rule produces `i`). The output is `f_m`.
pub fn build_generation_circuit(r: &RuleSet) -> Result<CyclicSequence> {
    let m = r.m;
    let space = Arc::new(make_generators(SpaceKind::MonotoneBasis { n: m })?);
    let empty = Ref::Generator(m);
    let g_base = m;
    let mut gates: Vec<Step> = Vec::with_capacity(2 * m + 2 * r.rules.len());
    // f_i placeholders, patched once h_i is known
    gates.extend((0..m).map(|i| Step::union(Ref::Generator(i), empty)));
    for &(a, b, _) in &r.rules {
        gates.push(Step::intersection(Ref::Step(a - 1), Ref::Step(b - 1)));
    }
    for i in 1..=m {
        let producers: Vec<Ref> = r
            .rules
            .iter()
            .enumerate()
            .filter(|(_, rule)| rule.2 == i)
            .map(|(k, _)| Ref::Step(g_base + k))
            .collect();
        let h = match producers.split_first() {
            None => empty,
            Some((&first, rest)) => rest.iter().fold(first, |acc, &p| {
                gates.push(Step::union(acc, p));
                Ref::Step(gates.len() - 1)
            }),
        };
        gates[i - 1] = Step::union(Ref::Generator(i - 1), h);
    }
    CyclicSequence::new(space, gates, m - 1)
}
