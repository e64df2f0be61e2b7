use std::sync::Arc;

use serde::Serialize;

use crate::fusion::{compile_lambda, CompileTarget, Compiled, Lambda};
use crate::sets::{DiscreteSpace, Subset};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub kind: &'static str,
    pub value: u64,
    pub parameters: Vec<(&'static str, u64)>,
}

fn ceil_log2(x: u64) -> u64 {
    if x <= 1 {
        0
    } else {
        64 - u64::from((x - 1).leading_zeros())
    }
}

/// Largest `s ≥ 0` with `3·s·⌈log₂(m + s)⌉ < k`: some subset of a `k`-element
/// ground set needs at least `s` operations over any `m` generators.
pub fn counting_bound(k: u64, m: u64) -> Result<BoundsReport> {
    if k == 0 || m == 0 {
        return Err(Error::Parameter("k and m must be positive".into()));
    }
    let holds = |s: u64| 3 * s * ceil_log2(m + s) < k;
    let mut s = 0;
    while holds(s + 1) {
        s += 1;
    }
    Ok(BoundsReport {
        kind: "counting",
        value: s,
        parameters: vec![("k", k), ("m", m)],
    })
}

/// Total operation count of the acyclic construction compiled from `lambda`.
pub fn cubic_bound(a: &Subset, space: &Arc<DiscreteSpace>, lambda: &Lambda) -> Result<BoundsReport> {
    let (compiled, _) = compile_lambda(a, space, lambda, CompileTarget::Acyclic)?;
    let Compiled::Acyclic(c) = compiled else { unreachable!("acyclic target") };
    let cost = c.cost();
    Ok(BoundsReport {
        kind: "cubic",
        value: cost.total as u64,
        parameters: vec![
            ("t", lambda.len() as u64),
            ("m", space.family().len() as u64),
            ("intersections", cost.intersections as u64),
            ("unions", cost.unions as u64),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::Universe;
    use crate::spaces::{make_generators, neq, SpaceKind};

    #[test]
    fn counting_examples() {
        assert_eq!(counting_bound(25, 10).unwrap().value, 2);
        assert_eq!(counting_bound(4, 4).unwrap().value, 0);
        assert!(counting_bound(0, 4).is_err());
    }

    #[test]
    fn log_rounding() {
        assert_eq!(ceil_log2(12), 4);
        assert_eq!(ceil_log2(16), 4);
        assert_eq!(ceil_log2(17), 5);
        assert_eq!(ceil_log2(2), 1);
    }

    #[test]
    fn cubic_for_neq2() {
        let space = Arc::new(make_generators(SpaceKind::GraphStars { rows: 2, cols: 2 }).unwrap());
        let a = neq(2).unwrap();
        let lambda = Lambda::new(Arc::new(Universe::new(a.complement()).unwrap()), [(0b01, 0b10)]).unwrap();
        let r = cubic_bound(&a, &space, &lambda).unwrap();
        assert_eq!(r.value, 3);
    }
}
