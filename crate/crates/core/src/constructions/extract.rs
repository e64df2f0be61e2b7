use std::sync::Arc;

use super::{Construction, CyclicSequence, Op, Ref};
use crate::fusion::{Lambda, Universe};
use crate::sets::{DiscreteSpace, Subset};
use crate::{Error, Result};

/// Anything whose value and intersection operands can be read off.
pub trait Computation {
    fn space(&self) -> &Arc<DiscreteSpace>;
    fn value(&self) -> Subset;
    /// Operand values of every intersection, at the computed (converged) values.
    fn intersection_operands(&self) -> Vec<(Subset, Subset)>;
}

impl Computation for Construction {
    fn space(&self) -> &Arc<DiscreteSpace> {
        Construction::space(self)
    }

    fn value(&self) -> Subset {
        self.evaluate().value
    }

    fn intersection_operands(&self) -> Vec<(Subset, Subset)> {
        Construction::intersection_operands(self)
    }
}

impl Computation for CyclicSequence {
    fn space(&self) -> &Arc<DiscreteSpace> {
        CyclicSequence::space(self)
    }

    fn value(&self) -> Subset {
        self.evaluate().0
    }

    fn intersection_operands(&self) -> Vec<(Subset, Subset)> {
        let (_, trace) = self.evaluate();
        let fixed = trace.converged();
        let get = |r: Ref| match r {
            Ref::Generator(k) => self.space().generator(k).clone(),
            Ref::Step(k) => fixed[k].clone(),
        };
        self.gates()
            .iter()
            .filter(|g| g.op == Op::Intersection)
            .map(|g| (get(g.left), get(g.right)))
            .collect()
    }
}

/// The pairs `(X ∩ U, Y ∩ U)` over every intersection `X ∩ Y` of `source`, with `U = Aᶜ`.
pub fn extract_lambda(source: &impl Computation, a: &Subset) -> Result<Lambda> {
    if a.len() != source.space().size() {
        return Err(Error::GroundMismatch {
            expected: source.space().size(),
            actual: a.len(),
        });
    }
    if a.is_empty() || a.is_full() {
        return Err(Error::TrivialTarget);
    }
    if source.value() != *a {
        return Err(Error::WrongValue);
    }
    let universe = Arc::new(Universe::new(a.complement())?);
    let pairs = source
        .intersection_operands()
        .into_iter()
        .map(|(x, y)| (universe.to_local(&x), universe.to_local(&y)))
        .collect::<Vec<_>>();
    Lambda::new(universe, pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::Step;
    use crate::spaces::{chessboard, make_generators, neq, SpaceKind, CHESSBOARD_STEPS};

    fn stars(n: usize) -> Arc<DiscreteSpace> {
        Arc::new(make_generators(SpaceKind::GraphStars { rows: n, cols: n }).unwrap())
    }

    #[test]
    fn neq2_pair_is_the_diagonal() {
        let c = Construction::new(
            stars(2),
            vec![
                Step::union(Ref::Generator(0), Ref::Generator(2)),
                Step::union(Ref::Generator(1), Ref::Generator(3)),
                Step::intersection(Ref::Step(0), Ref::Step(1)),
            ],
        )
        .unwrap();
        let lambda = extract_lambda(&c, &neq(2).unwrap()).unwrap();
        // U = {(1,1), (2,2)} in local order
        assert_eq!(lambda.pairs(), &[(0b01, 0b10)]);
    }

    #[test]
    fn chessboard_intersections_relativize_to_one_pair() {
        let c = Construction::from_named(stars(5), &CHESSBOARD_STEPS).unwrap();
        let lambda = extract_lambda(&c, &chessboard(5, 5).unwrap()).unwrap();
        // both intersections split U into its even-even and odd-odd cells
        assert_eq!(c.intersection_operands().len(), 2);
        assert_eq!(lambda.len(), 1);
        assert_eq!(lambda.universe().size(), 13);
    }

    #[test]
    fn union_only_gives_empty_family() {
        let c = Construction::union_of_generators(stars(2), &[0, 2]).unwrap();
        let a = c.evaluate().value;
        assert!(extract_lambda(&c, &a).unwrap().is_empty());
    }

    #[test]
    fn errors() {
        let c = Construction::union_of_generators(stars(2), &[0, 2]).unwrap();
        assert_eq!(extract_lambda(&c, &neq(2).unwrap()).unwrap_err(), Error::WrongValue);
        assert_eq!(extract_lambda(&c, &Subset::full(4)).unwrap_err(), Error::TrivialTarget);
    }

    #[test]
    fn cyclic_uses_converged_operands() {
        // g1 = (g1 ∪ R1) loops; g2 = g1 ∩ C2
        let s = CyclicSequence::new(
            stars(2),
            vec![
                Step::union(Ref::Step(0), Ref::Generator(0)),
                Step::intersection(Ref::Step(0), Ref::Generator(3)),
            ],
            1,
        )
        .unwrap();
        let a = s.evaluate().0;
        assert_eq!(a.count(), 1);
        let lambda = extract_lambda(&s, &a).unwrap();
        assert_eq!(lambda.len(), 1);
    }
}
