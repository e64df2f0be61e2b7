use std::fmt::Write as _;
use std::sync::Arc;

use super::{full_mask, Universe};
use crate::constructions::certificate_descriptor;
use crate::sets::{DiscreteSpace, Subset};
use crate::spaces::{space_from_descriptor, GraphFunctionBijection};
use crate::{Error, Result};

/// A set of unordered pairs `(E, H)` of subsets of `U`.
///
/// Pairs are stored as `(min, max)` local masks, sorted and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lambda {
    universe: Arc<Universe>,
    pairs: Vec<(u64, u64)>,
}

/// A pair that no semi-filter can fail to preserve: one side contains the
/// other, or one side is empty.
pub fn is_inert_pair(e: u64, h: u64) -> bool {
    e & !h == 0 || h & !e == 0
}

impl Lambda {
    pub fn new(universe: Arc<Universe>, pairs: impl IntoIterator<Item = (u64, u64)>) -> Result<Self> {
        let full = universe.full_mask();
        let mut out = Vec::new();
        for (e, h) in pairs {
            if (e | h) & !full != 0 {
                return Err(Error::UniverseMismatch(format!(
                    "pair member outside a universe of {} elements",
                    universe.size()
                )));
            }
            out.push((e.min(h), e.max(h)));
        }
        out.sort_unstable();
        out.dedup();
        Ok(Self { universe, pairs: out })
    }

    pub fn empty(universe: Arc<Universe>) -> Self {
        Self {
            universe,
            pairs: Vec::new(),
        }
    }

    /// Builds the family from pairs of ground-set subsets (each must lie in `U`).
    pub fn from_subsets(universe: Arc<Universe>, pairs: &[(Subset, Subset)]) -> Result<Self> {
        let mut masks = Vec::with_capacity(pairs.len());
        for (e, h) in pairs {
            for s in [e, h] {
                if !s.checked_is_subset(universe.set())? {
                    return Err(Error::UniverseMismatch("pair member is not a subset of U".into()));
                }
            }
            masks.push((universe.to_local(e), universe.to_local(h)));
        }
        Self::new(universe, masks)
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn pairs(&self) -> &[(u64, u64)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn global_pairs(&self) -> Vec<(Subset, Subset)> {
        self.pairs
            .iter()
            .map(|&(e, h)| (self.universe.to_global(e), self.universe.to_global(h)))
            .collect()
    }

    fn local_bits(&self, mask: u64) -> String {
        (0..self.universe.size())
            .map(|k| if mask >> k & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    /// `lambda <space> <target bits> <count>` followed by two lines per pair,
    /// each a 0/1 string over `U` in local order.
    pub fn to_certificate(&self, space: &DiscreteSpace, target: &Subset) -> Result<String> {
        if target.complement() != *self.universe.set() {
            return Err(Error::UniverseMismatch("U is not the complement of the target".into()));
        }
        let mut out = format!(
            "lambda {} {} {}\n",
            certificate_descriptor(space)?,
            target,
            self.len()
        );
        for &(e, h) in &self.pairs {
            writeln!(out, "{}", self.local_bits(e)).unwrap();
            writeln!(out, "{}", self.local_bits(h)).unwrap();
        }
        Ok(out)
    }

    pub fn parse_certificate(text: &str) -> Result<(Arc<DiscreteSpace>, Subset, Lambda)> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty certificate".into()))?;
        let ["lambda", space, target, count] = header.split_whitespace().collect::<Vec<_>>()[..] else {
            return Err(Error::Parse(format!("malformed lambda header {header:?}")));
        };
        let space = Arc::new(space_from_descriptor(space)?);
        let target = space.parse_subset(target)?;
        let count: usize = count
            .parse()
            .map_err(|_| Error::Parse(format!("malformed pair count {count:?}")))?;
        let universe = Arc::new(Universe::new(target.complement())?);
        let mut read = |what: &str| -> Result<u64> {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing {what} line")))?
                .trim();
            if line.len() != universe.size() {
                return Err(Error::Parse(format!(
                    "pair line has {} characters, U has {} elements",
                    line.len(),
                    universe.size()
                )));
            }
            line.bytes().enumerate().try_fold(0u64, |acc, (k, b)| match b {
                b'1' => Ok(acc | 1 << k),
                b'0' => Ok(acc),
                _ => Err(Error::Parse(format!("bad character in pair line {line:?}"))),
            })
        };
        let mut pairs = Vec::with_capacity(count);
        for _ in 0..count {
            let e = read("E")?;
            let h = read("H")?;
            pairs.push((e, h));
        }
        if lines.next().is_some() {
            return Err(Error::Parse("trailing lines after the last pair".into()));
        }
        let lambda = Lambda::new(universe, pairs)?;
        if lambda.len() != count {
            return Err(Error::Parse("duplicate pairs in certificate".into()));
        }
        Ok((space, target, lambda))
    }
}

/// Pulls a pair family over `f⁻¹(0) ⊆ {0,1}^{2n}` back to the grid through φ.
pub fn induce_lambda(lambda: &Lambda, phi: &GraphFunctionBijection) -> Result<Lambda> {
    let side = phi.side();
    if lambda.universe().ground_size() != side * side {
        return Err(Error::UniverseMismatch(format!(
            "pairs live over {} points, φ needs {}",
            lambda.universe().ground_size(),
            side * side
        )));
    }
    let universe = Arc::new(Universe::new(phi.preimage(lambda.universe().set())?)?);
    let pull = |mask: u64| -> Result<u64> {
        let global = phi.preimage(&lambda.universe().to_global(mask))?;
        Ok(universe.to_local(&global) & full_mask(universe.size()))
    };
    let pairs = lambda
        .pairs()
        .iter()
        .map(|&(e, h)| Ok((pull(e)?, pull(h)?)))
        .collect::<Result<Vec<_>>>()?;
    Lambda::new(universe, pairs)
}
