//! Straight-line and cyclic constructions over a discrete space.

mod certificate;
mod cyclic;
mod extract;
mod generation;

use std::fmt;
use std::sync::Arc;

use crate::sets::{DiscreteSpace, Subset};
use crate::{Error, Result};

pub use certificate::{parse_certificate, Certificate};
pub use cyclic::{CyclicSequence, EvalTrace};
pub use extract::{extract_lambda, Computation};
pub use generation::{build_generation_circuit, generation_input, simulate_generation, RuleSet};

pub(crate) use certificate::descriptor as certificate_descriptor;
pub(crate) use cyclic::Builder;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    Union,
    Intersection,
}

impl Op {
    pub fn apply(self, x: &Subset, y: &Subset) -> Subset {
        match self {
            Op::Union => x.union(y),
            Op::Intersection => x.intersection(y),
        }
    }

    pub fn dual(self) -> Op {
        match self {
            Op::Union => Op::Intersection,
            Op::Intersection => Op::Union,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Op::Union => 'U',
            Op::Intersection => 'I',
        }
    }
}

/// Operand of a step: a generator or a step (both 0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ref {
    Generator(usize),
    Step(usize),
}

impl fmt::Display for Ref {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ref::Generator(k) => write!(f, "g{}", k + 1),
            Ref::Step(k) => write!(f, "s{}", k + 1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Step {
    pub op: Op,
    pub left: Ref,
    pub right: Ref,
}

impl Step {
    pub fn new(op: Op, left: Ref, right: Ref) -> Self {
        Self { op, left, right }
    }

    pub fn union(left: Ref, right: Ref) -> Self {
        Self::new(Op::Union, left, right)
    }

    pub fn intersection(left: Ref, right: Ref) -> Self {
        Self::new(Op::Intersection, left, right)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, serde::Serialize)]
pub struct Cost {
    pub total: usize,
    pub intersections: usize,
    pub unions: usize,
}

impl Cost {
    pub fn of_steps<'a>(steps: impl IntoIterator<Item = &'a Step>) -> Self {
        let mut cost = Cost::default();
        for s in steps {
            cost.total += 1;
            match s.op {
                Op::Union => cost.unions += 1,
                Op::Intersection => cost.intersections += 1,
            }
        }
        cost
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.total, self.intersections, self.unions)
    }
}

/// An acyclic sequence of unions and intersections.
///
/// `outputs` marks the steps whose values are the constructed sets; by
/// default it is the last step only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Construction {
    space: Arc<DiscreteSpace>,
    steps: Vec<Step>,
    outputs: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub value: Subset,
    pub cost: Cost,
}

pub(crate) fn check_ref(r: Ref, generators: usize, steps: usize) -> Result<()> {
    match r {
        Ref::Generator(k) if k >= generators => Err(Error::Construction(format!(
            "dangling reference {r}: the space has {generators} generators"
        ))),
        Ref::Step(k) if k >= steps => Err(Error::Construction(format!(
            "dangling reference {r}: only {steps} steps"
        ))),
        _ => Ok(()),
    }
}

impl Construction {
    pub fn new(space: Arc<DiscreteSpace>, steps: Vec<Step>) -> Result<Self> {
        let last = steps.len().checked_sub(1);
        Self::with_outputs(space, steps, last.into_iter().collect())
    }

    pub fn with_outputs(space: Arc<DiscreteSpace>, steps: Vec<Step>, outputs: Vec<usize>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::Construction("a construction needs at least one step".into()));
        }
        let m = space.family().len();
        for (i, step) in steps.iter().enumerate() {
            for r in [step.left, step.right] {
                check_ref(r, m, steps.len())?;
                if let Ref::Step(k) = r {
                    if k >= i {
                        return Err(Error::Construction(format!(
                            "step s{} references {r}, which is not an earlier step",
                            i + 1
                        )));
                    }
                }
            }
        }
        if outputs.is_empty() {
            return Err(Error::Construction("no output step".into()));
        }
        if let Some(&bad) = outputs.iter().find(|&&o| o >= steps.len()) {
            return Err(Error::Construction(format!("output s{} does not exist", bad + 1)));
        }
        Ok(Self { space, steps, outputs })
    }

    /// One union of the listed generators (a self-union for a single generator).
    pub fn union_of_generators(space: Arc<DiscreteSpace>, generators: &[usize]) -> Result<Self> {
        let (&first, rest) = generators
            .split_first()
            .ok_or_else(|| Error::Construction("empty generator list".into()))?;
        let mut steps = Vec::new();
        let mut acc = Ref::Generator(first);
        if rest.is_empty() {
            steps.push(Step::union(acc, acc));
        }
        for &g in rest {
            steps.push(Step::union(acc, Ref::Generator(g)));
            acc = Ref::Step(steps.len() - 1);
        }
        Self::new(space, steps)
    }

    pub fn space(&self) -> &Arc<DiscreteSpace> {
        &self.space
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn cost(&self) -> Cost {
        Cost::of_steps(&self.steps)
    }

    fn operand<'a>(&'a self, values: &'a [Subset], r: Ref) -> &'a Subset {
        match r {
            Ref::Generator(k) => self.space.generator(k),
            Ref::Step(k) => &values[k],
        }
    }

    /// Values of every step, in order.
    pub fn step_values(&self) -> Vec<Subset> {
        let mut values: Vec<Subset> = Vec::with_capacity(self.steps.len());
        for step in &self.steps {
            let v = step.op.apply(self.operand(&values, step.left), self.operand(&values, step.right));
            values.push(v);
        }
        values
    }

    /// Value of the last step and the cost of the whole sequence.
    pub fn evaluate(&self) -> Evaluation {
        Evaluation {
            value: self.step_values().pop().expect("non-empty"),
            cost: self.cost(),
        }
    }

    /// Values at the marked output steps.
    pub fn output_values(&self) -> Vec<Subset> {
        let values = self.step_values();
        self.outputs.iter().map(|&o| values[o].clone()).collect()
    }

    /// Operand values of every intersection step.
    pub fn intersection_operands(&self) -> Vec<(Subset, Subset)> {
        let values = self.step_values();
        self.steps
            .iter()
            .filter(|s| s.op == Op::Intersection)
            .map(|s| {
                (
                    self.operand(&values, s.left).clone(),
                    self.operand(&values, s.right).clone(),
                )
            })
            .collect()
    }

    /// The same steps over the relativized family `{B ∩ U}`.
    pub fn relativize(&self, u: &Subset) -> Result<Self> {
        Ok(Self {
            space: Arc::new(self.space.relativize(u)?),
            steps: self.steps.clone(),
            outputs: self.outputs.clone(),
        })
    }

    /// The same steps with `∪` and `∩` exchanged, over `space`.
    ///
    /// Over the complemented family this computes the complement of the original value.
    pub fn dual(&self, space: Arc<DiscreteSpace>) -> Result<Self> {
        let steps = self
            .steps
            .iter()
            .map(|s| Step::new(s.op.dual(), s.left, s.right))
            .collect();
        Self::with_outputs(space, steps, self.outputs.clone())
    }

    /// Concatenates a construction of `E` with a construction over the family
    /// extended by `E` as its last generator.
    pub fn chain(first: &Construction, second: &Construction) -> Result<Construction> {
        let base = first.space.family();
        let extended = second.space.family();
        if extended.len() != base.len() + 1
            || (0..base.len()).any(|k| base.get(k) != extended.get(k))
        {
            return Err(Error::Construction(
                "second construction must use the first family plus one generator".into(),
            ));
        }
        if first.evaluate().value != *extended.get(base.len()) {
            return Err(Error::Construction(
                "the extra generator differs from the value of the first construction".into(),
            ));
        }
        let offset = first.steps.len();
        let e = Ref::Step(offset - 1);
        let remap = |r: Ref| match r {
            Ref::Generator(k) if k == base.len() => e,
            Ref::Generator(k) => Ref::Generator(k),
            Ref::Step(k) => Ref::Step(k + offset),
        };
        let mut steps = first.steps.clone();
        steps.extend(
            second
                .steps
                .iter()
                .map(|s| Step::new(s.op, remap(s.left), remap(s.right))),
        );
        let outputs = second.outputs.iter().map(|o| o + offset).collect();
        Construction::with_outputs(first.space.clone(), steps, outputs)
    }

    /// Pulls this construction back along an injection `inj: Γ₁ → Γ₂`.
    ///
    /// `inj[x]` is the image of element `x` of `target`'s ground set. Every
    /// generator used here needs a preimage over `target`: either a generator
    /// of `target` or a construction evaluating to `inj⁻¹(B)`.
    pub fn transform_by_injection(
        &self,
        target: Arc<DiscreteSpace>,
        inj: &[usize],
        preimages: &[Option<Preimage>],
    ) -> Result<Construction> {
        let n2 = self.space.size();
        if inj.len() != target.size() {
            return Err(Error::GroundMismatch {
                expected: target.size(),
                actual: inj.len(),
            });
        }
        let mut seen = vec![false; n2];
        for &y in inj {
            if y >= n2 || std::mem::replace(&mut seen[y], true) {
                return Err(Error::Parameter("map is not an injection into the ground set".into()));
            }
        }
        if preimages.len() != self.space.family().len() {
            return Err(Error::Parameter(format!(
                "expected {} preimage entries, got {}",
                self.space.family().len(),
                preimages.len()
            )));
        }
        let pull = |s: &Subset| {
            Subset::from_indices(target.size(), (0..inj.len()).filter(|&x| s.contains(inj[x])))
                .expect("indices in range")
        };
        let mut used = vec![false; preimages.len()];
        for s in &self.steps {
            for r in [s.left, s.right] {
                if let Ref::Generator(k) = r {
                    used[k] = true;
                }
            }
        }
        let mut steps = Vec::new();
        let mut gen_ref = vec![None; preimages.len()];
        for (k, pre) in preimages.iter().enumerate() {
            if !used[k] {
                continue;
            }
            let expected = pull(self.space.generator(k));
            let r = match pre {
                None => {
                    return Err(Error::Construction(format!(
                        "no preimage for generator {}",
                        self.space.family().name(k)
                    )))
                }
                Some(Preimage::Generator(j)) => {
                    check_ref(Ref::Generator(*j), target.family().len(), 0)?;
                    if *target.generator(*j) != expected {
                        return Err(Error::Construction(format!(
                            "generator g{} is not the preimage of {}",
                            j + 1,
                            self.space.family().name(k)
                        )));
                    }
                    Ref::Generator(*j)
                }
                Some(Preimage::Built(c)) => {
                    if c.space.family() != target.family() {
                        return Err(Error::Construction(
                            "preimage construction over a different space".into(),
                        ));
                    }
                    if c.evaluate().value != expected {
                        return Err(Error::Construction(format!(
                            "preimage construction for {} has the wrong value",
                            self.space.family().name(k)
                        )));
                    }
                    let offset = steps.len();
                    steps.extend(c.steps.iter().map(|s| {
                        let shift = |r: Ref| match r {
                            Ref::Step(i) => Ref::Step(i + offset),
                            g => g,
                        };
                        Step::new(s.op, shift(s.left), shift(s.right))
                    }));
                    Ref::Step(steps.len() - 1)
                }
            };
            gen_ref[k] = Some(r);
        }
        let offset = steps.len();
        let remap = |r: Ref| match r {
            Ref::Generator(k) => gen_ref[k].expect("used generator has a preimage"),
            Ref::Step(i) => Ref::Step(i + offset),
        };
        steps.extend(
            self.steps
                .iter()
                .map(|s| Step::new(s.op, remap(s.left), remap(s.right))),
        );
        let outputs = self.outputs.iter().map(|o| o + offset).collect();
        Construction::with_outputs(target, steps, outputs)
    }

    /// Builds a construction from named operands (generator names or `s<k>`).
    pub fn from_named(space: Arc<DiscreteSpace>, steps: &[(char, &str, &str)]) -> Result<Self> {
        let resolve = |name: &str| -> Result<Ref> {
            if let Some(k) = (0..space.family().len()).find(|&k| space.family().name(k) == name) {
                return Ok(Ref::Generator(k));
            }
            certificate::parse_ref(name)
        };
        let steps = steps
            .iter()
            .map(|&(op, l, r)| {
                let op = certificate::parse_op(&op.to_string())?;
                Ok(Step::new(op, resolve(l)?, resolve(r)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(space, steps)
    }
}

/// How a generator of the outer space is obtained over the inner space.
#[derive(Clone, Debug)]
pub enum Preimage {
    Generator(usize),
    Built(Construction),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{chessboard, make_generators, neq, SpaceKind, CHESSBOARD_STEPS};

    fn stars(n: usize) -> Arc<DiscreteSpace> {
        Arc::new(make_generators(SpaceKind::GraphStars { rows: n, cols: n }).unwrap())
    }

    fn neq2_construction() -> Construction {
        // (R1 ∪ C1) ∩ (R2 ∪ C2)
        Construction::new(
            stars(2),
            vec![
                Step::union(Ref::Generator(0), Ref::Generator(2)),
                Step::union(Ref::Generator(1), Ref::Generator(3)),
                Step::intersection(Ref::Step(0), Ref::Step(1)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn chessboard_construction_cost() {
        let c = Construction::from_named(stars(5), &CHESSBOARD_STEPS).unwrap();
        let e = c.evaluate();
        assert_eq!(e.value, chessboard(5, 5).unwrap());
        assert_eq!(
            e.cost,
            Cost {
                total: 9,
                intersections: 2,
                unions: 7
            }
        );
    }

    #[test]
    fn self_union_of_a_generator() {
        let c = Construction::union_of_generators(stars(2), &[0]).unwrap();
        let e = c.evaluate();
        assert_eq!(&e.value, c.space().generator(0));
        assert_eq!(e.cost, Cost { total: 1, intersections: 0, unions: 1 });
    }

    #[test]
    fn neq2_by_hand() {
        let e = neq2_construction().evaluate();
        assert_eq!(e.value, neq(2).unwrap());
        assert_eq!(e.cost, Cost { total: 3, intersections: 1, unions: 2 });
    }

    #[test]
    fn invalid_references_rejected() {
        let s = stars(2);
        let dangling = Construction::new(s.clone(), vec![Step::union(Ref::Generator(4), Ref::Generator(0))]);
        assert!(matches!(dangling, Err(Error::Construction(_))));
        let forward = Construction::new(
            s.clone(),
            vec![
                Step::union(Ref::Step(1), Ref::Generator(0)),
                Step::union(Ref::Generator(1), Ref::Generator(0)),
            ],
        );
        assert!(matches!(forward, Err(Error::Construction(_))));
        let selfref = Construction::new(s.clone(), vec![Step::union(Ref::Step(0), Ref::Generator(0))]);
        assert!(selfref.is_err());
        assert!(Construction::new(s, vec![]).is_err());
    }

    #[test]
    fn relativization_examples() {
        let c = Construction::from_named(stars(5), &CHESSBOARD_STEPS).unwrap();
        let u = chessboard(5, 5).unwrap().complement();
        assert!(c.relativize(&u).unwrap().evaluate().value.is_empty());
        let full = Subset::full(25);
        assert_eq!(c.relativize(&full).unwrap().evaluate(), c.evaluate());
        let diag = neq(2).unwrap().complement();
        assert!(neq2_construction().relativize(&diag).unwrap().evaluate().value.is_empty());
    }

    #[test]
    fn multi_output_values() {
        let c = Construction::with_outputs(
            stars(2),
            vec![
                Step::union(Ref::Generator(0), Ref::Generator(0)),
                Step::union(Ref::Generator(2), Ref::Generator(2)),
            ],
            vec![0, 1],
        )
        .unwrap();
        let vals = c.output_values();
        assert_eq!(&vals[0], c.space().generator(0));
        assert_eq!(&vals[1], c.space().generator(2));
    }

    #[test]
    fn chain_adds_costs() {
        let s = stars(2);
        let first = Construction::new(s.clone(), vec![Step::union(Ref::Generator(0), Ref::Generator(2))]).unwrap();
        let e = first.evaluate().value;
        let mut members = s.family().members().to_vec();
        members.push(("E".into(), e));
        let ext = crate::sets::GeneratorFamily::new(s.ground(), members).unwrap();
        let ext = Arc::new(DiscreteSpace::new(s.ground().clone(), ext).unwrap());
        let second = Construction::new(
            ext,
            vec![
                Step::union(Ref::Generator(1), Ref::Generator(3)),
                Step::intersection(Ref::Generator(4), Ref::Step(0)),
            ],
        )
        .unwrap();
        let chained = Construction::chain(&first, &second).unwrap();
        assert_eq!(chained.evaluate().value, neq(2).unwrap());
        assert_eq!(chained.cost().total, first.cost().total + second.cost().total);
        assert_eq!(chained.cost().intersections, 1);
    }

    #[test]
    fn identity_injection_keeps_the_construction() {
        let c = neq2_construction();
        let inj: Vec<usize> = (0..4).collect();
        let pre: Vec<_> = (0..4).map(|k| Some(Preimage::Generator(k))).collect();
        let t = c.transform_by_injection(c.space().clone(), &inj, &pre).unwrap();
        assert_eq!(t, c);
        let mut missing = pre.clone();
        missing[0] = None;
        assert!(c.transform_by_injection(c.space().clone(), &inj, &missing).is_err());
        let mut wrong = pre;
        wrong[0] = Some(Preimage::Generator(1));
        assert!(c.transform_by_injection(c.space().clone(), &inj, &wrong).is_err());
    }
}
