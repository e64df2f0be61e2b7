//! Ground sets, bit-vector subsets and generator families.
//!
//! Element order is canonical per ground-set kind: row-major for grids and
//! `num(w)` for hypercube strings (`w₁` is the most significant bit). Subsets
//! serialize as 0/1 strings in that order.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::spaces::SpaceKind;
use crate::{Error, Result};

const WORD: usize = 64;

/// How element indices map to coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroundKind {
    Plain,
    /// `[rows] × [cols]`, element `(i, j)` at index `(i-1)·cols + (j-1)`.
    Grid { rows: usize, cols: usize },
    /// `{0,1}^bits`, string `w` at index `num(w)`.
    Hypercube { bits: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundSet {
    kind: GroundKind,
    labels: Vec<String>,
}

impl GroundSet {
    pub fn plain(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidGround("ground set must be non-empty".into()));
        }
        let mut sorted: Vec<&String> = labels.iter().collect();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidGround("labels must be distinct".into()));
        }
        Ok(Self {
            kind: GroundKind::Plain,
            labels,
        })
    }

    /// Plain ground set `{1, …, size}`.
    pub fn indexed(size: usize) -> Result<Self> {
        Self::plain((1..=size).map(|i| i.to_string()).collect())
    }

    pub fn grid(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidGround("grid dimensions must be positive".into()));
        }
        let labels = (1..=rows)
            .flat_map(|i| (1..=cols).map(move |j| format!("({i},{j})")))
            .collect();
        Ok(Self {
            kind: GroundKind::Grid { rows, cols },
            labels,
        })
    }

    pub fn hypercube(bits: usize) -> Result<Self> {
        if bits == 0 || bits > 24 {
            return Err(Error::InvalidGround(format!(
                "hypercube dimension {bits} outside 1..=24"
            )));
        }
        let labels = (0..1usize << bits).map(|x| bit_string(x, bits)).collect();
        Ok(Self {
            kind: GroundKind::Hypercube { bits },
            labels,
        })
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn kind(&self) -> GroundKind {
        self.kind
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        match self.kind {
            GroundKind::Hypercube { bits } => {
                (label.len() == bits && label.bytes().all(|b| b == b'0' || b == b'1'))
                    .then(|| num(label))
            }
            _ => self.labels.iter().position(|l| l == label),
        }
    }

    /// Index of grid cell `(i, j)` (1-based).
    pub fn grid_index(&self, i: usize, j: usize) -> Result<usize> {
        match self.kind {
            GroundKind::Grid { rows, cols } if (1..=rows).contains(&i) && (1..=cols).contains(&j) => {
                Ok((i - 1) * cols + (j - 1))
            }
            GroundKind::Grid { rows, cols } => Err(Error::Parameter(format!(
                "cell ({i},{j}) outside {rows}x{cols} grid"
            ))),
            _ => Err(Error::Parameter("ground set is not a grid".into())),
        }
    }

    /// 1-based coordinates of a grid element.
    pub fn grid_coords(&self, index: usize) -> Option<(usize, usize)> {
        match self.kind {
            GroundKind::Grid { cols, .. } if index < self.size() => {
                Some((index / cols + 1, index % cols + 1))
            }
            _ => None,
        }
    }
}

/// `w` as an integer with `w₁` the most significant bit.
pub fn num(w: &str) -> usize {
    w.bytes().fold(0, |acc, b| (acc << 1) | usize::from(b == b'1'))
}

/// The `bits`-character string encoding `x`, most significant bit first.
pub fn bit_string(x: usize, bits: usize) -> String {
    (0..bits)
        .rev()
        .map(|k| if (x >> k) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// A fixed-length bit vector over a ground set.
///
/// Sets of up to 64 elements live in a single inline word.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset {
    len: usize,
    words: SmallVec<[u64; 1]>,
}

impl Subset {
    pub fn empty(len: usize) -> Self {
        Self {
            len,
            words: SmallVec::from_elem(0, len.div_ceil(WORD).max(1)),
        }
    }

    pub fn full(len: usize) -> Self {
        let mut s = Self::empty(len);
        for w in s.words.iter_mut() {
            *w = !0;
        }
        s.trim();
        s
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut s = Self::empty(len);
        for i in indices {
            if i >= len {
                return Err(Error::Parameter(format!("element {i} outside ground set of size {len}")));
            }
            s.insert(i);
        }
        Ok(s)
    }

    /// Single-word constructor; bits at positions `>= len` are dropped.
    pub fn from_word(len: usize, word: u64) -> Self {
        assert!(len <= WORD, "from_word needs a ground set of at most 64 elements");
        let mut s = Self::empty(len);
        s.words[0] = word;
        s.trim();
        s
    }

    /// The single-word representation, when the ground set has at most 64 elements.
    pub fn as_word(&self) -> Option<u64> {
        (self.len <= WORD).then(|| self.words[0])
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.len
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.len && (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len, "element {i} outside ground set of size {}", self.len);
        self.words[i / WORD] |= 1 << (i % WORD);
    }

    pub fn remove(&mut self, i: usize) {
        if i < self.len {
            self.words[i / WORD] &= !(1 << (i % WORD));
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                (w != 0).then(|| {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    k * WORD + b
                })
            })
        })
    }

    fn trim(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            let last = self.words.len() - 1;
            self.words[last] &= (1u64 << rem) - 1;
        }
        if self.len == 0 {
            self.words[0] = 0;
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.len == other.len {
            Ok(())
        } else {
            Err(Error::GroundMismatch {
                expected: self.len,
                actual: other.len,
            })
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        assert_eq!(self.len, other.len, "subsets over different ground sets");
        Self {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// Element-wise union. Panics on a ground-set mismatch; see [`Subset::checked_union`].
    pub fn union(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> Self {
        let mut s = Self {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        s.trim();
        s
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        assert_eq!(self.len, other.len, "subsets over different ground sets");
        self.words.iter().zip(&other.words).all(|(&a, &b)| a & !b == 0)
    }

    pub fn checked_union(&self, other: &Self) -> Result<Self> {
        self.check(other).map(|_| self.union(other))
    }

    pub fn checked_intersection(&self, other: &Self) -> Result<Self> {
        self.check(other).map(|_| self.intersection(other))
    }

    pub fn checked_is_subset(&self, other: &Self) -> Result<bool> {
        self.check(other).map(|_| self.is_subset(other))
    }

    /// `self ∩ u`.
    pub fn relativize(&self, u: &Self) -> Result<Self> {
        self.checked_intersection(u)
    }

    pub fn to_bit_string(&self) -> String {
        (0..self.len).map(|i| if self.contains(i) { '1' } else { '0' }).collect()
    }

    /// Parses a 0/1 string; whitespace is ignored.
    pub fn parse_bits(text: &str) -> Result<Self> {
        let bits: Vec<u8> = text.bytes().filter(|b| !b.is_ascii_whitespace()).collect();
        if bits.is_empty() {
            return Err(Error::Parse("empty bit string".into()));
        }
        let mut s = Self::empty(bits.len());
        for (i, b) in bits.iter().enumerate() {
            match b {
                b'1' => s.insert(i),
                b'0' => {}
                other => {
                    return Err(Error::Parse(format!(
                        "unexpected character {:?} in bit string",
                        *other as char
                    )))
                }
            }
        }
        Ok(s)
    }

    /// Parses a `rows`-line matrix of 0/1 characters (row `i` on line `i`).
    pub fn parse_matrix(text: &str, rows: usize, cols: usize) -> Result<Self> {
        let lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        if lines.len() != rows {
            return Err(Error::Parse(format!("expected {rows} matrix rows, found {}", lines.len())));
        }
        let mut joined = String::with_capacity(rows * cols);
        for (i, line) in lines.iter().enumerate() {
            let row: String = line.chars().filter(|c| !c.is_whitespace()).collect();
            if row.len() != cols {
                return Err(Error::Parse(format!(
                    "matrix row {} has {} columns, expected {cols}",
                    i + 1,
                    row.len()
                )));
            }
            joined.push_str(&row);
        }
        Self::parse_bits(&joined)
    }

    /// Matrix text form for grid ground sets.
    pub fn to_matrix(&self, cols: usize) -> String {
        let bits = self.to_bit_string();
        bits.as_bytes()
            .chunks(cols)
            .map(|c| std::str::from_utf8(c).unwrap())
            .collect::<Vec<_>>()
            .join("\n")
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subset({})", self.to_bit_string())
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetOp {
    Union,
    Intersection,
    Complement,
    IsSubset,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetValue {
    Set(Subset),
    Bool(bool),
}

/// Checked set algebra over a shared ground set.
pub fn set_algebra(op: SetOp, x: &Subset, y: Option<&Subset>) -> Result<SetValue> {
    let second = || y.ok_or_else(|| Error::Parameter("binary operation needs two operands".into()));
    Ok(match op {
        SetOp::Union => SetValue::Set(x.checked_union(second()?)?),
        SetOp::Intersection => SetValue::Set(x.checked_intersection(second()?)?),
        SetOp::IsSubset => SetValue::Bool(x.checked_is_subset(second()?)?),
        SetOp::Complement => SetValue::Set(x.complement()),
    })
}

/// An ordered, named family of generators over one ground set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorFamily {
    ground_size: usize,
    members: Vec<(String, Subset)>,
    covers_ground: bool,
    waived: bool,
}

impl GeneratorFamily {
    /// Builds a family whose union must equal the ground set.
    pub fn new(ground: &GroundSet, members: Vec<(String, Subset)>) -> Result<Self> {
        let family = Self::build(ground.size(), members, false)?;
        if !family.covers_ground {
            let union = family.union();
            let element = (0..ground.size()).find(|&i| !union.contains(i)).unwrap();
            return Err(Error::Uncovered { element });
        }
        Ok(family)
    }

    /// Builds a family without requiring coverage; the result is tagged as waived.
    pub fn new_uncovered(ground: &GroundSet, members: Vec<(String, Subset)>) -> Result<Self> {
        Self::build(ground.size(), members, true)
    }

    fn build(ground_size: usize, members: Vec<(String, Subset)>, waived: bool) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptyFamily);
        }
        for (_, s) in &members {
            if s.len() != ground_size {
                return Err(Error::GroundMismatch {
                    expected: ground_size,
                    actual: s.len(),
                });
            }
        }
        let mut union = Subset::empty(ground_size);
        for (_, s) in &members {
            union = union.union(s);
        }
        Ok(Self {
            ground_size,
            covers_ground: union.is_full(),
            members,
            waived,
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn covers_ground(&self) -> bool {
        self.covers_ground
    }

    /// True when the family was built with the coverage requirement waived.
    pub fn coverage_waived(&self) -> bool {
        self.waived
    }

    pub fn members(&self) -> &[(String, Subset)] {
        &self.members
    }

    pub fn get(&self, k: usize) -> &Subset {
        &self.members[k].1
    }

    pub fn name(&self, k: usize) -> &str {
        &self.members[k].0
    }

    pub fn sets(&self) -> impl Iterator<Item = &Subset> + '_ {
        self.members.iter().map(|(_, s)| s)
    }

    pub fn union(&self) -> Subset {
        self.sets()
            .fold(Subset::empty(self.ground_size), |acc, s| acc.union(s))
    }

    /// Indices of the generators containing element `w`.
    pub fn containing(&self, w: usize) -> impl Iterator<Item = usize> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter(move |(_, (_, s))| s.contains(w))
            .map(|(k, _)| k)
    }

    /// `B_U = {B ∩ U}` with names and order preserved.
    pub fn relativize(&self, u: &Subset) -> Result<Self> {
        let members = self
            .members
            .iter()
            .map(|(n, s)| Ok((n.clone(), s.relativize(u)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::build(self.ground_size, members, true)
    }
}

/// A ground set together with its generator family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteSpace {
    ground: GroundSet,
    family: GeneratorFamily,
    kind: Option<SpaceKind>,
}

impl DiscreteSpace {
    pub fn new(ground: GroundSet, family: GeneratorFamily) -> Result<Self> {
        if family.ground_size() != ground.size() {
            return Err(Error::GroundMismatch {
                expected: ground.size(),
                actual: family.ground_size(),
            });
        }
        Ok(Self {
            ground,
            family,
            kind: None,
        })
    }

    pub(crate) fn with_kind(mut self, kind: SpaceKind) -> Self {
        self.kind = Some(kind);
        self
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn family(&self) -> &GeneratorFamily {
        &self.family
    }

    pub fn generator(&self, k: usize) -> &Subset {
        self.family.get(k)
    }

    pub fn size(&self) -> usize {
        self.ground.size()
    }

    /// The standard space this was built from, if any.
    pub fn kind(&self) -> Option<SpaceKind> {
        self.kind
    }

    pub fn descriptor(&self) -> Option<String> {
        self.kind.map(|k| k.to_string())
    }

    pub fn relativize(&self, u: &Subset) -> Result<Self> {
        Ok(Self {
            ground: self.ground.clone(),
            family: self.family.relativize(u)?,
            kind: None,
        })
    }

    /// The same ground set with every generator complemented.
    pub fn complemented(&self) -> Self {
        let members = self
            .family
            .members()
            .iter()
            .map(|(n, s)| (format!("~{n}"), s.complement()))
            .collect();
        Self {
            ground: self.ground.clone(),
            family: GeneratorFamily::build(self.size(), members, true).expect("non-empty family"),
            kind: None,
        }
    }

    pub fn into_shared(self) -> Arc<Self> {
        Arc::new(self)
    }

    /// Parses a subset in canonical 0/1 form, or as a row-per-line matrix on grids.
    pub fn parse_subset(&self, text: &str) -> Result<Subset> {
        let s = match (self.ground.kind(), text.trim().contains('\n')) {
            (GroundKind::Grid { rows, cols }, true) => Subset::parse_matrix(text, rows, cols)?,
            _ => Subset::parse_bits(text)?,
        };
        if s.len() != self.size() {
            return Err(Error::GroundMismatch {
                expected: self.size(),
                actual: s.len(),
            });
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_set(rows: usize, cols: usize, cells: &[(usize, usize)]) -> Subset {
        let g = GroundSet::grid(rows, cols).unwrap();
        Subset::from_indices(g.size(), cells.iter().map(|&(i, j)| g.grid_index(i, j).unwrap()))
            .unwrap()
    }

    #[test]
    fn union_with_empty_is_identity() {
        let x = Subset::parse_bits("0110").unwrap();
        assert_eq!(x.union(&Subset::empty(4)), x);
    }

    #[test]
    fn intersection_with_complement_is_empty() {
        let x = Subset::parse_bits("01101").unwrap();
        assert!(x.intersection(&x.complement()).is_empty());
    }

    #[test]
    fn row_meets_column_in_one_cell() {
        let r1 = grid_set(2, 2, &[(1, 1), (1, 2)]);
        let c2 = grid_set(2, 2, &[(1, 2), (2, 2)]);
        assert_eq!(r1.intersection(&c2), grid_set(2, 2, &[(1, 2)]));
    }

    #[test]
    fn relativize_row_to_diagonal() {
        let r1 = grid_set(2, 2, &[(1, 1), (1, 2)]);
        let diag = grid_set(2, 2, &[(1, 1), (2, 2)]);
        assert_eq!(r1.relativize(&diag).unwrap(), grid_set(2, 2, &[(1, 1)]));
        assert_eq!(r1.relativize(&Subset::full(4)).unwrap(), r1);
    }

    #[test]
    fn mismatched_grounds_are_rejected() {
        let a = Subset::empty(4);
        let b = Subset::empty(5);
        assert!(matches!(
            set_algebra(SetOp::Union, &a, Some(&b)),
            Err(Error::GroundMismatch { .. })
        ));
        assert!(a.relativize(&b).is_err());
    }

    #[test]
    fn multiword_subsets() {
        let mut s = Subset::empty(130);
        s.insert(0);
        s.insert(64);
        s.insert(129);
        assert_eq!(s.count(), 3);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 64, 129]);
        let c = s.complement();
        assert_eq!(c.count(), 127);
        assert!(c.union(&s).is_full());
        assert_eq!(Subset::parse_bits(&s.to_bit_string()).unwrap(), s);
        assert!(s.as_word().is_none());
        assert_eq!(Subset::from_word(5, 0b1111_1111).count(), 5);
    }

    #[test]
    fn matrix_form_round_trips() {
        let s = grid_set(2, 3, &[(1, 2), (2, 3)]);
        assert_eq!(s.to_matrix(3), "010\n001");
        assert_eq!(Subset::parse_matrix("010\n001\n", 2, 3).unwrap(), s);
        assert!(Subset::parse_matrix("01\n001", 2, 3).is_err());
        assert!(Subset::parse_bits("01x").is_err());
    }

    #[test]
    fn hypercube_labels_follow_num() {
        let g = GroundSet::hypercube(3).unwrap();
        assert_eq!(g.label(0), "000");
        assert_eq!(g.label(6), "110");
        assert_eq!(g.index_of("011"), Some(3));
        assert_eq!(num("10"), 2);
        assert_eq!(bit_string(2, 2), "10");
    }

    #[test]
    fn grid_labels_are_row_major() {
        let g = GroundSet::grid(2, 3).unwrap();
        assert_eq!(g.label(4), "(2,2)");
        assert_eq!(g.grid_index(2, 3).unwrap(), 5);
        assert_eq!(g.grid_coords(3), Some((2, 1)));
        assert!(g.grid_index(3, 1).is_err());
    }

    #[test]
    fn ground_set_invariants() {
        assert!(GroundSet::plain(vec![]).is_err());
        assert!(GroundSet::plain(vec!["a".into(), "a".into()]).is_err());
        assert!(GroundSet::grid(0, 2).is_err());
    }

    #[test]
    fn coverage_is_enforced_or_tagged() {
        let g = GroundSet::indexed(2).unwrap();
        let b1 = Subset::parse_bits("01").unwrap();
        assert_eq!(
            GeneratorFamily::new(&g, vec![("B1".into(), b1.clone())]),
            Err(Error::Uncovered { element: 0 })
        );
        let f = GeneratorFamily::new_uncovered(&g, vec![("B1".into(), b1)]).unwrap();
        assert!(!f.covers_ground());
        assert!(f.coverage_waived());
        assert_eq!(GeneratorFamily::new(&g, vec![]), Err(Error::EmptyFamily));
    }

    #[test]
    fn exhaustive_lattice_laws_small() {
        // every pair and triple of subsets of a 3-element set
        let all: Vec<Subset> = (0..8u64).map(|w| Subset::from_word(3, w)).collect();
        for x in &all {
            assert_eq!(&x.complement().complement(), x);
            assert_eq!(&x.union(x), x);
            assert_eq!(&x.intersection(x), x);
            for y in &all {
                assert_eq!(x.union(y), y.union(x));
                assert_eq!(x.intersection(y), y.intersection(x));
                assert_eq!(x.is_subset(y), x.union(y) == *y);
                for z in &all {
                    assert_eq!(x.union(&y.union(z)), x.union(y).union(z));
                    assert_eq!(x.intersection(&y.intersection(z)), x.intersection(y).intersection(z));
                }
            }
        }
    }
}
