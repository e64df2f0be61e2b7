use std::collections::HashMap;
use std::sync::Arc;

use super::{check_ref, Construction, Cost, Op, Ref, Step};
use crate::sets::{DiscreteSpace, Subset};
use crate::{Error, Result};

/// Gates that may reference any gate, including themselves.
///
/// Evaluation is synchronous from all-empty gates: in round `j` every gate
/// becomes its round `j-1` value united with its operation applied to the
/// round `j-1` operand values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicSequence {
    space: Arc<DiscreteSpace>,
    gates: Vec<Step>,
    output: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalTrace {
    /// `values[j][i]` is gate `i` after round `j`; `values[0]` is all empty.
    pub values: Vec<Vec<Subset>>,
    /// Number of rounds that changed some gate.
    pub rounds: usize,
}

impl EvalTrace {
    pub fn converged(&self) -> &[Subset] {
        self.values.last().expect("round 0 is always present")
    }
}

impl CyclicSequence {
    pub fn new(space: Arc<DiscreteSpace>, gates: Vec<Step>, output: usize) -> Result<Self> {
        if gates.is_empty() {
            return Err(Error::Construction("a cyclic sequence needs at least one gate".into()));
        }
        let m = space.family().len();
        for g in &gates {
            check_ref(g.left, m, gates.len())?;
            check_ref(g.right, m, gates.len())?;
        }
        if output >= gates.len() {
            return Err(Error::Construction(format!("output s{} does not exist", output + 1)));
        }
        Ok(Self { space, gates, output })
    }

    /// Embeds an acyclic construction, with its last output as the output gate.
    pub fn from_construction(c: &Construction) -> Self {
        Self {
            space: c.space().clone(),
            gates: c.steps().to_vec(),
            output: *c.outputs().last().expect("non-empty outputs"),
        }
    }

    pub fn space(&self) -> &Arc<DiscreteSpace> {
        &self.space
    }

    pub fn gates(&self) -> &[Step] {
        &self.gates
    }

    pub fn output(&self) -> usize {
        self.output
    }

    pub fn cost(&self) -> Cost {
        Cost::of_steps(&self.gates)
    }

    fn operand<'a>(&'a self, values: &'a [Subset], r: Ref) -> &'a Subset {
        match r {
            Ref::Generator(k) => self.space.generator(k),
            Ref::Step(k) => &values[k],
        }
    }

    /// Runs rounds until nothing changes; returns the output value and the trace.
    pub fn evaluate(&self) -> (Subset, EvalTrace) {
        let n = self.space.size();
        let mut values = vec![vec![Subset::empty(n); self.gates.len()]];
        loop {
            let prev = values.last().unwrap();
            let next: Vec<Subset> = self
                .gates
                .iter()
                .enumerate()
                .map(|(i, g)| {
                    let fresh = g.op.apply(self.operand(prev, g.left), self.operand(prev, g.right));
                    prev[i].union(&fresh)
                })
                .collect();
            if next == *prev {
                break;
            }
            values.push(next);
        }
        let rounds = values.len() - 1;
        assert!(
            rounds <= self.gates.len(),
            "evaluation took {rounds} rounds with {} gates",
            self.gates.len()
        );
        for w in values.windows(2) {
            assert!(w[0].iter().zip(&w[1]).all(|(a, b)| a.is_subset(b)), "non-monotone trace");
        }
        let value = values[rounds][self.output].clone();
        (value, EvalTrace { values, rounds })
    }

    /// Unrolls the converged rounds into an acyclic construction with the same value.
    ///
    /// Each round contributes at most one intersection per intersection gate.
    /// Fails when the output is empty, which no non-empty step list can express
    /// symbolically here.
    pub fn unfold(&self) -> Result<Construction> {
        let (_, trace) = self.evaluate();
        let mut b = Builder::default();
        let mut current: Vec<Option<Ref>> = vec![None; self.gates.len()];
        for _ in 0..trace.rounds {
            let operand = |r: Ref| match r {
                Ref::Generator(_) => Some(r),
                Ref::Step(k) => current[k],
            };
            let next: Vec<Option<Ref>> = self
                .gates
                .iter()
                .enumerate()
                .map(|(i, g)| {
                    let fresh = b.apply(g.op, operand(g.left), operand(g.right));
                    b.apply(Op::Union, current[i], fresh)
                })
                .collect();
            current = next;
        }
        let out = current[self.output]
            .ok_or_else(|| Error::Construction("cyclic output is empty".into()))?;
        b.finish(self.space.clone(), out)
    }
}

/// Hash-consed step list over optional operands, where `None` stands for `∅`.
#[derive(Default)]
pub(crate) struct Builder {
    steps: Vec<Step>,
    memo: HashMap<Step, usize>,
}

impl Builder {
    pub(crate) fn apply(&mut self, op: Op, x: Option<Ref>, y: Option<Ref>) -> Option<Ref> {
        match (op, x, y) {
            (Op::Intersection, None, _) | (Op::Intersection, _, None) => None,
            (Op::Union, None, r) | (Op::Union, r, None) => r,
            (_, Some(a), Some(b)) if a == b => Some(a),
            (_, Some(a), Some(b)) => {
                let step = Step::new(op, a.min(b), a.max(b));
                let next = self.steps.len();
                let idx = *self.memo.entry(step).or_insert(next);
                if idx == next {
                    self.steps.push(step);
                }
                Some(Ref::Step(idx))
            }
        }
    }

    pub(crate) fn union_all(&mut self, refs: impl IntoIterator<Item = Option<Ref>>) -> Option<Ref> {
        refs.into_iter().fold(None, |acc, r| self.apply(Op::Union, acc, r))
    }

    /// Keeps only the steps `out` depends on; a bare generator becomes a self-union.
    pub(crate) fn finish(mut self, space: Arc<DiscreteSpace>, out: Ref) -> Result<Construction> {
        let last = match out {
            Ref::Generator(_) => {
                self.steps.push(Step::union(out, out));
                self.steps.len() - 1
            }
            Ref::Step(k) => k,
        };
        let mut live = vec![false; last + 1];
        live[last] = true;
        for i in (0..=last).rev() {
            if live[i] {
                for r in [self.steps[i].left, self.steps[i].right] {
                    if let Ref::Step(k) = r {
                        live[k] = true;
                    }
                }
            }
        }
        let mut index = vec![usize::MAX; last + 1];
        let mut steps = Vec::new();
        for i in 0..=last {
            if live[i] {
                let map = |r: Ref| match r {
                    Ref::Step(k) => Ref::Step(index[k]),
                    g => g,
                };
                let s = self.steps[i];
                let step = Step::new(s.op, map(s.left), map(s.right));
                index[i] = steps.len();
                steps.push(step);
            }
        }
        Construction::new(space, steps)
    }
}
