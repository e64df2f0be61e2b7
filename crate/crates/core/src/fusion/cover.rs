use std::sync::Arc;

use super::{enumerate_semifilters, full_mask, is_above, is_inert_pair, SemiFilter, Universe};
use crate::sets::{DiscreteSpace, Subset};
use crate::spaces::SpaceKind;
use crate::{Error, Result};

/// Largest universe for which the cover graph is materialized.
pub const COVER_GRAPH_CAP: usize = 4;

/// Bipartite graph between candidate pairs and the semi-filters above some
/// element of the target. A pair is adjacent to a filter it is not preserved by.
#[derive(Clone, Debug)]
pub struct CoverGraph {
    pub universe: Arc<Universe>,
    pub pairs: Vec<(u64, u64)>,
    /// Each filter with the first target element it is above.
    pub filters: Vec<(SemiFilter, usize)>,
    /// `incidence[p][f]`.
    pub incidence: Vec<Vec<bool>>,
}

impl CoverGraph {
    pub fn covers(&self, pair: usize, filter: usize) -> bool {
        self.incidence[pair][filter]
    }

    pub fn edge_count(&self) -> usize {
        self.incidence.iter().map(|row| row.iter().filter(|&&b| b).count()).sum()
    }
}

/// All non-inert unordered pairs of subsets of a universe of `size` elements.
pub(crate) fn all_candidate_pairs(size: usize) -> Vec<(u64, u64)> {
    let full = full_mask(size);
    let mut out = Vec::new();
    for e in 1..=full {
        for h in e + 1..=full {
            if !is_inert_pair(e, h) {
                out.push((e, h));
            }
        }
    }
    out
}

pub fn build_cover_graph(a: &Subset, space: &DiscreteSpace) -> Result<CoverGraph> {
    if a.len() != space.size() {
        return Err(Error::GroundMismatch {
            expected: space.size(),
            actual: a.len(),
        });
    }
    if a.is_empty() || a.is_full() {
        return Err(Error::TrivialTarget);
    }
    let universe = Arc::new(Universe::new(a.complement())?);
    if universe.size() > COVER_GRAPH_CAP {
        return Err(Error::Cap {
            what: "cover graph universe",
            value: universe.size(),
            limit: COVER_GRAPH_CAP,
        });
    }
    let members: Vec<usize> = a.iter().collect();
    let mut filters = Vec::new();
    for f in enumerate_semifilters(universe.size(), false)? {
        for &w in &members {
            if is_above(f, w, space, &universe)? {
                filters.push((f.clone(), w));
                break;
            }
        }
    }
    let pairs = all_candidate_pairs(universe.size());
    let incidence = pairs
        .iter()
        .map(|&(e, h)| filters.iter().map(|(f, _)| !f.preserves_pair(e, h)).collect())
        .collect();
    Ok(CoverGraph {
        universe,
        pairs,
        filters,
        incidence,
    })
}

/// An edge `(u, v)` with its filter.
pub type CanonicalFilter = ((usize, usize), SemiFilter);

/// The filters `𝓕_e` generated by `R_u ∩ Ḡ` and `C_v ∩ Ḡ` for each edge
/// `e = (u, v)` of `G` (1-based), over the universe `Ḡ`. Edges where either set
/// is empty are skipped.
pub fn canonical_filters(g: &Subset, space: &DiscreteSpace) -> Result<(Arc<Universe>, Vec<CanonicalFilter>)> {
    let Some(SpaceKind::GraphStars { rows, .. }) = space.kind() else {
        return Err(Error::Parameter("canonical filters need a star space".into()));
    };
    if g.len() != space.size() {
        return Err(Error::GroundMismatch {
            expected: space.size(),
            actual: g.len(),
        });
    }
    if g.is_empty() || g.is_full() {
        return Err(Error::TrivialTarget);
    }
    let universe = Arc::new(Universe::new(g.complement())?);
    let mut out = Vec::new();
    for w in g.iter() {
        let (u, v) = space.ground().grid_coords(w).expect("star spaces live on grids");
        let r = universe.to_local(space.generator(u - 1));
        let c = universe.to_local(space.generator(rows + v - 1));
        if r != 0 && c != 0 {
            let f = SemiFilter::upward_closure(universe.size(), [r, c]).expect("non-empty generators");
            out.push(((u, v), f));
        }
    }
    Ok((universe, out))
}

/// `E, H ∈ 𝓕` and `E ∩ H ∉ 𝓕`.
pub fn covers_canonical(pair: (u64, u64), f: &SemiFilter) -> bool {
    let (e, h) = pair;
    f.contains(e) && f.contains(h) && !f.contains(e & h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{make_generators, neq};

    #[test]
    fn neq2_graph() {
        let space = make_generators(SpaceKind::GraphStars { rows: 2, cols: 2 }).unwrap();
        let g = build_cover_graph(&neq(2).unwrap(), &space).unwrap();
        assert_eq!(g.filters.len(), 1);
        assert_eq!(g.filters[0].0.minimal(), &[0b01, 0b10]);
        assert_eq!(g.pairs, vec![(0b01, 0b10)]);
        assert!(g.covers(0, 0));
    }

    #[test]
    fn rectangles_have_no_filters() {
        let space = make_generators(SpaceKind::Rectangles { n: 2 }).unwrap();
        let g = build_cover_graph(&Subset::parse_bits("0110").unwrap(), &space).unwrap();
        assert!(g.filters.is_empty());
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn candidate_pairs_are_non_inert() {
        let p = all_candidate_pairs(3);
        assert!(p.iter().all(|&(e, h)| !is_inert_pair(e, h) && e < h));
        // incomparable ordered pairs of non-empty subsets of a 3-set, halved
        assert_eq!(p.len(), 9);
    }

    #[test]
    fn neq2_canonical() {
        let space = make_generators(SpaceKind::GraphStars { rows: 2, cols: 2 }).unwrap();
        let (u, fs) = canonical_filters(&neq(2).unwrap(), &space).unwrap();
        assert_eq!(u.size(), 2);
        assert_eq!(fs.len(), 2);
        assert!(covers_canonical((0b01, 0b10), &fs[0].1));
        assert!(!covers_canonical((0b11, 0), &fs[0].1));
    }
}
