use std::collections::HashMap;
use std::sync::Arc;

use super::{verify_lambda, Lambda, VerifyMode};
use crate::constructions::{Builder, Construction, CyclicSequence, Op, Ref, Step};
use crate::sets::{DiscreteSpace, Subset};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompileTarget {
    Cyclic,
    Acyclic,
}

#[derive(Clone, Debug)]
pub enum Compiled {
    Cyclic(CyclicSequence),
    Acyclic(Construction),
}

impl Compiled {
    pub fn value(&self) -> Subset {
        match self {
            Compiled::Cyclic(s) => s.evaluate().0,
            Compiled::Acyclic(c) => c.evaluate().value,
        }
    }

    pub fn intersections(&self) -> usize {
        match self {
            Compiled::Cyclic(s) => s.cost().intersections,
            Compiled::Acyclic(c) => c.cost().intersections,
        }
    }
}

/// Where a working set comes from. Equal sets with different origins stay distinct.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OmegaTag {
    /// `B_k ∩ U`.
    Generator(usize),
    /// `E_i`.
    PairLeft(usize),
    /// `H_i`.
    PairRight(usize),
    /// `E_i ∩ H_i`.
    PairMeet(usize),
    Empty,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OmegaEntry {
    pub tag: OmegaTag,
    /// Local mask over `U`.
    pub set: u64,
}

/// Values of one stage, indexed like the working-set list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageValues {
    /// `S_C`: elements `w` whose closure contains `C` so far.
    pub s: Vec<Subset>,
    /// `T_C`: elements `w` for which `C` itself has been added so far.
    pub t: Vec<Subset>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompileTrace {
    pub omega: Vec<OmegaEntry>,
    /// Stages `1..=|λ|+1`.
    pub stages: Vec<StageValues>,
}

fn build_omega(space: &DiscreteSpace, lambda: &Lambda) -> Vec<OmegaEntry> {
    let u = lambda.universe();
    let mut omega: Vec<OmegaEntry> = space
        .family()
        .sets()
        .enumerate()
        .map(|(k, b)| OmegaEntry {
            tag: OmegaTag::Generator(k),
            set: u.to_local(b),
        })
        .collect();
    for (i, &(e, h)) in lambda.pairs().iter().enumerate() {
        omega.push(OmegaEntry {
            tag: OmegaTag::PairLeft(i),
            set: e,
        });
        omega.push(OmegaEntry {
            tag: OmegaTag::PairRight(i),
            set: h,
        });
        omega.push(OmegaEntry {
            tag: OmegaTag::PairMeet(i),
            set: e & h,
        });
    }
    omega.push(OmegaEntry {
        tag: OmegaTag::Empty,
        set: 0,
    });
    omega
}

/// `below[c]` lists the entries whose set is contained in entry `c`'s set.
fn containment(omega: &[OmegaEntry]) -> Vec<Vec<usize>> {
    omega
        .iter()
        .map(|c| {
            (0..omega.len())
                .filter(|&d| omega[d].set & !c.set == 0)
                .collect()
        })
        .collect()
}

fn stage_values(space: &DiscreteSpace, lambda: &Lambda, omega: &[OmegaEntry], below: &[Vec<usize>]) -> Vec<StageValues> {
    let n = space.size();
    let sum = |t: &[Subset], c: usize| {
        below[c]
            .iter()
            .fold(Subset::empty(n), |acc, &d| acc.union(&t[d]))
    };
    let index_of = |tag: OmegaTag| omega.iter().position(|o| o.tag == tag).expect("tag present");
    let mut t: Vec<Subset> = omega
        .iter()
        .map(|o| match o.tag {
            OmegaTag::Generator(k) => space.generator(k).clone(),
            _ => Subset::empty(n),
        })
        .collect();
    let mut s: Vec<Subset> = (0..omega.len()).map(|c| sum(&t, c)).collect();
    let mut stages = vec![StageValues {
        s: s.clone(),
        t: t.clone(),
    }];
    for _ in 0..lambda.len() {
        let next_t: Vec<Subset> = omega
            .iter()
            .enumerate()
            .map(|(c, o)| match o.tag {
                OmegaTag::PairMeet(i) => {
                    let e = &s[index_of(OmegaTag::PairLeft(i))];
                    let h = &s[index_of(OmegaTag::PairRight(i))];
                    t[c].union(&e.intersection(h))
                }
                _ => t[c].clone(),
            })
            .collect();
        t = next_t;
        s = (0..omega.len()).map(|c| sum(&t, c)).collect();
        stages.push(StageValues {
            s: s.clone(),
            t: t.clone(),
        });
    }
    stages
}

/// Turns a valid pair family into a circuit computing `a`.
///
/// The cyclic target has exactly one intersection gate per pair. The acyclic
/// target unrolls `|λ| + 1` stages and has at most `|λ|²` intersections.
pub fn compile_lambda(
    a: &Subset,
    space: &Arc<DiscreteSpace>,
    lambda: &Lambda,
    target: CompileTarget,
) -> Result<(Compiled, CompileTrace)> {
    let check = verify_lambda(a, space, lambda, VerifyMode::Closure)?;
    if let Some(w) = check.witness {
        return Err(Error::InvalidLambda(format!("closure check fails: {w:?}")));
    }
    let omega = build_omega(space, lambda);
    let below = containment(&omega);
    let stages = stage_values(space, lambda, &omega, &below);
    let empty = omega.len() - 1;
    assert_eq!(&stages.last().expect("stage 1").s[empty], a, "stage recurrence misses the target");
    let compiled = match target {
        CompileTarget::Acyclic => Compiled::Acyclic(compile_acyclic(space, lambda, &omega, &below)?),
        CompileTarget::Cyclic => Compiled::Cyclic(compile_cyclic(space, lambda, &omega, &below)?),
    };
    assert_eq!(&compiled.value(), a, "compiled circuit evaluates to the wrong set");
    let t = lambda.len();
    match &compiled {
        Compiled::Cyclic(s) => assert_eq!(s.cost().intersections, t),
        Compiled::Acyclic(c) => assert!(c.cost().intersections <= t * t),
    }
    Ok((compiled, CompileTrace { omega, stages }))
}

fn compile_acyclic(
    space: &Arc<DiscreteSpace>,
    lambda: &Lambda,
    omega: &[OmegaEntry],
    below: &[Vec<usize>],
) -> Result<Construction> {
    let mut b = Builder::default();
    let pair_entry = |tag| omega.iter().position(|o: &OmegaEntry| o.tag == tag).expect("tag present");
    let mut t: Vec<Option<Ref>> = omega
        .iter()
        .map(|o| match o.tag {
            OmegaTag::Generator(k) => Some(Ref::Generator(k)),
            _ => None,
        })
        .collect();
    let sum = |b: &mut Builder, t: &[Option<Ref>]| -> Vec<Option<Ref>> {
        below.iter().map(|ds| b.union_all(ds.iter().map(|&d| t[d]))).collect()
    };
    let mut s = sum(&mut b, &t);
    for _ in 0..lambda.len() {
        let mut next = t.clone();
        for (c, o) in omega.iter().enumerate() {
            if let OmegaTag::PairMeet(i) = o.tag {
                let e = s[pair_entry(OmegaTag::PairLeft(i))];
                let h = s[pair_entry(OmegaTag::PairRight(i))];
                let meet = b.apply(Op::Intersection, e, h);
                next[c] = b.apply(Op::Union, t[c], meet);
            }
        }
        t = next;
        s = sum(&mut b, &t);
    }
    let out = s[omega.len() - 1].ok_or_else(|| Error::Construction("compiled output is empty".into()))?;
    b.finish(space.clone(), out)
}

/// Union gates appended after the intersection gates, shared by operand pair.
struct CyclicGates {
    gates: Vec<Step>,
    memo: HashMap<(Ref, Ref), Ref>,
    empty: Option<Ref>,
}

impl CyclicGates {
    fn union(&mut self, x: Ref, y: Ref) -> Ref {
        let key = (x.min(y), x.max(y));
        if let Some(&r) = self.memo.get(&key) {
            return r;
        }
        let r = Ref::Step(self.gates.len());
        self.gates.push(Step::union(key.0, key.1));
        self.memo.insert(key, r);
        r
    }

    fn chain(&mut self, refs: &[Ref]) -> Option<Ref> {
        let mut acc: Option<Ref> = None;
        for &r in refs {
            acc = Some(match acc {
                None => r,
                Some(a) if a == r => a,
                Some(a) => self.union(a, r),
            });
        }
        acc
    }

    /// A gate that stays empty: `e = e ∪ e`.
    fn empty(&mut self) -> Ref {
        *self.empty.get_or_insert_with(|| {
            let r = Ref::Step(self.gates.len());
            self.gates.push(Step::union(r, r));
            r
        })
    }
}

fn compile_cyclic(
    space: &Arc<DiscreteSpace>,
    lambda: &Lambda,
    omega: &[OmegaEntry],
    below: &[Vec<usize>],
) -> Result<CyclicSequence> {
    let t = lambda.len();
    let t_ref = |c: usize| match omega[c].tag {
        OmegaTag::Generator(k) => Some(Ref::Generator(k)),
        OmegaTag::PairMeet(i) => Some(Ref::Step(i)),
        _ => None,
    };
    // Gates 0..t are the meets; their operands are patched in below.
    let mut g = CyclicGates {
        gates: vec![Step::intersection(Ref::Step(0), Ref::Step(0)); t],
        memo: HashMap::new(),
        empty: None,
    };
    let s_ref = |g: &mut CyclicGates, c: usize| -> Option<Ref> {
        let refs: Vec<Ref> = below[c].iter().filter_map(|&d| t_ref(d)).collect();
        g.chain(&refs)
    };
    let position = |tag| omega.iter().position(|o: &OmegaEntry| o.tag == tag).expect("tag present");
    for i in 0..t {
        let e = s_ref(&mut g, position(OmegaTag::PairLeft(i)));
        let h = s_ref(&mut g, position(OmegaTag::PairRight(i)));
        let e = e.unwrap_or_else(|| g.empty());
        let h = h.unwrap_or_else(|| g.empty());
        g.gates[i] = Step::intersection(e, h);
    }
    let out = s_ref(&mut g, omega.len() - 1).ok_or_else(|| Error::Construction("compiled output is empty".into()))?;
    let output = match out {
        Ref::Step(k) => k,
        Ref::Generator(_) => {
            g.gates.push(Step::union(out, out));
            g.gates.len() - 1
        }
    };
    CyclicSequence::new(space.clone(), g.gates, output)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::Universe;
    use crate::spaces::{make_generators, neq, SpaceKind};

    fn neq2() -> (Arc<DiscreteSpace>, Subset, Lambda) {
        let space = Arc::new(make_generators(SpaceKind::GraphStars { rows: 2, cols: 2 }).unwrap());
        let a = neq(2).unwrap();
        let u = Arc::new(Universe::new(a.complement()).unwrap());
        let lambda = Lambda::new(u, [(0b01, 0b10)]).unwrap();
        (space, a, lambda)
    }

    #[test]
    fn neq2_cyclic_has_one_gate_per_pair() {
        let (space, a, lambda) = neq2();
        let (c, trace) = compile_lambda(&a, &space, &lambda, CompileTarget::Cyclic).unwrap();
        let Compiled::Cyclic(s) = c else { panic!() };
        assert_eq!(s.cost().intersections, 1);
        assert_eq!(s.evaluate().0, a);
        assert_eq!(trace.omega.len(), 4 + 3 + 1);
        assert_eq!(trace.stages.len(), 2);
    }

    #[test]
    fn neq2_acyclic_has_one_intersection() {
        let (space, a, lambda) = neq2();
        let (c, trace) = compile_lambda(&a, &space, &lambda, CompileTarget::Acyclic).unwrap();
        let Compiled::Acyclic(c) = c else { panic!() };
        assert_eq!(c.cost().intersections, 1);
        assert_eq!(c.evaluate().value, a);
        // stage 1 reaches nothing, stage 2 reaches exactly A
        let empty = trace.omega.len() - 1;
        assert!(trace.stages[0].s[empty].is_empty());
        assert_eq!(trace.stages[1].s[empty], a);
    }

    #[test]
    fn stages_follow_the_recurrence() {
        let (space, _, lambda) = neq2();
        let (_, trace) = compile_lambda(&neq(2).unwrap(), &space, &lambda, CompileTarget::Acyclic).unwrap();
        for st in &trace.stages {
            for (c, oc) in trace.omega.iter().enumerate() {
                let expected = trace
                    .omega
                    .iter()
                    .enumerate()
                    .filter(|(_, od)| od.set & !oc.set == 0)
                    .fold(Subset::empty(4), |acc, (d, _)| acc.union(&st.t[d]));
                assert_eq!(st.s[c], expected);
            }
        }
        for w in trace.stages.windows(2) {
            assert!(w[0].s.iter().zip(&w[1].s).all(|(x, y)| x.is_subset(y)));
        }
    }

    #[test]
    fn duplicate_relativizations_stay_distinct() {
        let (space, a, lambda) = neq2();
        let (_, trace) = compile_lambda(&a, &space, &lambda, CompileTarget::Cyclic).unwrap();
        let gens = trace
            .omega
            .iter()
            .filter(|o| matches!(o.tag, OmegaTag::Generator(_)))
            .count();
        assert_eq!(gens, 4);
    }

    #[test]
    fn invalid_lambda_is_refused() {
        let (space, a, lambda) = neq2();
        let empty = Lambda::empty(lambda.universe().clone());
        assert!(matches!(
            compile_lambda(&a, &space, &empty, CompileTarget::Cyclic),
            Err(Error::InvalidLambda(_))
        ));
    }

    #[test]
    fn empty_lambda_compiles_to_a_union() {
        let space = Arc::new(make_generators(SpaceKind::GraphStars { rows: 2, cols: 2 }).unwrap());
        let a = space.generator(0).union(space.generator(3));
        let u = Arc::new(Universe::new(a.complement()).unwrap());
        let lambda = Lambda::empty(u);
        for target in [CompileTarget::Cyclic, CompileTarget::Acyclic] {
            let (c, _) = compile_lambda(&a, &space, &lambda, target).unwrap();
            assert_eq!(c.value(), a);
            assert_eq!(c.intersections(), 0);
        }
    }
}
