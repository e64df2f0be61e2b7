//! Standard discrete spaces, the grid/hypercube bijection and named example sets.

use std::fmt;
use std::str::FromStr;

use crate::sets::{bit_string, num, DiscreteSpace, GeneratorFamily, GroundKind, GroundSet, Subset};
use crate::{Error, Result};

/// Largest ground set a standard space may have.
pub const MAX_GROUND: usize = 1 << 16;
pub const MAX_CLIQUE_SIDE: usize = 12;
pub const MAX_RECT_SIDE: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    /// `{0,1}^n` with the `2n` literals.
    BooleanBasis { n: usize },
    /// `{0,1}^n` with the `n` positive literals, `∅` and the full set.
    MonotoneBasis { n: usize },
    /// `[rows] × [cols]` with row stars then column stars.
    GraphStars { rows: usize, cols: usize },
    /// `[rows] × [cols]` with every union of rows and every union of columns.
    CliqueFamily { rows: usize, cols: usize },
    /// `[n] × [n]` with every combinatorial rectangle.
    Rectangles { n: usize },
    /// `[n]^d` with one generator per (coordinate, value).
    TensorStars { n: usize, d: usize },
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SpaceKind::BooleanBasis { n } => write!(f, "bool:{n}"),
            SpaceKind::MonotoneBasis { n } => write!(f, "mono:{n}"),
            SpaceKind::GraphStars { rows, cols } => write!(f, "stars:{rows}x{cols}"),
            SpaceKind::CliqueFamily { rows, cols } => write!(f, "clique:{rows}x{cols}"),
            SpaceKind::Rectangles { n } => write!(f, "rect:{n}"),
            SpaceKind::TensorStars { n, d } => write!(f, "tensor:{n}^{d}"),
        }
    }
}

fn parse_pos(s: &str) -> Result<usize> {
    match s.trim().parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(Error::Parse(format!("expected a positive integer, got {s:?}"))),
    }
}

fn parse_pair(s: &str, sep: char) -> Result<(usize, usize)> {
    let (a, b) = s
        .split_once(sep)
        .ok_or_else(|| Error::Parse(format!("expected <a>{sep}<b>, got {s:?}")))?;
    Ok((parse_pos(a)?, parse_pos(b)?))
}

impl FromStr for SpaceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (tag, params) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("unknown space descriptor {s:?}")))?;
        Ok(match tag {
            "bool" => SpaceKind::BooleanBasis { n: parse_pos(params)? },
            "mono" => SpaceKind::MonotoneBasis { n: parse_pos(params)? },
            "stars" => {
                let (rows, cols) = parse_pair(params, 'x')?;
                SpaceKind::GraphStars { rows, cols }
            }
            "clique" => {
                let (rows, cols) = parse_pair(params, 'x')?;
                SpaceKind::CliqueFamily { rows, cols }
            }
            "rect" => SpaceKind::Rectangles { n: parse_pos(params)? },
            "tensor" => {
                let (n, d) = parse_pair(params, '^')?;
                SpaceKind::TensorStars { n, d }
            }
            _ => return Err(Error::Parse(format!("unknown space descriptor {s:?}"))),
        })
    }
}

fn cap(what: &'static str, value: usize, limit: usize) -> Result<()> {
    if value > limit {
        Err(Error::Cap { what, value, limit })
    } else {
        Ok(())
    }
}

fn mask_label(prefix: &str, mask: usize, n: usize) -> String {
    let items: Vec<String> = (0..n)
        .filter(|k| mask >> k & 1 == 1)
        .map(|k| (k + 1).to_string())
        .collect();
    format!("{prefix}{{{}}}", items.join(","))
}

/// Builds the space for `kind` with generators in canonical order.
pub fn make_generators(kind: SpaceKind) -> Result<DiscreteSpace> {
    let (ground, members) = match kind {
        SpaceKind::BooleanBasis { n } | SpaceKind::MonotoneBasis { n } => {
            cap("hypercube dimension", n, 16)?;
            let ground = GroundSet::hypercube(n)?;
            let size = ground.size();
            let literal = |i: usize| {
                // v_i is bit position n - i of the index
                Subset::from_indices(size, (0..size).filter(|x| x >> (n - i) & 1 == 1)).unwrap()
            };
            let mut members: Vec<(String, Subset)> =
                (1..=n).map(|i| (format!("x{i}"), literal(i))).collect();
            if matches!(kind, SpaceKind::BooleanBasis { .. }) {
                members.extend((1..=n).map(|i| (format!("~x{i}"), literal(i).complement())));
            } else {
                members.push(("0".into(), Subset::empty(size)));
                members.push(("1".into(), Subset::full(size)));
            }
            (ground, members)
        }
        SpaceKind::GraphStars { rows, cols } => {
            cap("ground size", rows.saturating_mul(cols), MAX_GROUND)?;
            let ground = GroundSet::grid(rows, cols)?;
            let mut members: Vec<(String, Subset)> = (1..=rows)
                .map(|i| (format!("R{i}"), row_union(&ground, 1 << (i - 1))))
                .collect();
            members.extend((1..=cols).map(|j| (format!("C{j}"), col_union(&ground, 1 << (j - 1)))));
            (ground, members)
        }
        SpaceKind::CliqueFamily { rows, cols } => {
            cap("clique side", rows.max(cols), MAX_CLIQUE_SIDE)?;
            let ground = GroundSet::grid(rows, cols)?;
            let mut members: Vec<(String, Subset)> = (0..1usize << rows)
                .map(|s| (mask_label("W", s, rows), row_union(&ground, s)))
                .collect();
            members.extend(
                (0..1usize << cols).map(|t| (mask_label("Z", t, cols), col_union(&ground, t))),
            );
            (ground, members)
        }
        SpaceKind::Rectangles { n } => {
            cap("rectangle side", n, MAX_RECT_SIDE)?;
            let ground = GroundSet::grid(n, n)?;
            let mut members = Vec::with_capacity(1 << (2 * n));
            for u in 0..1usize << n {
                for v in 0..1usize << n {
                    let rect = row_union(&ground, u).intersection(&col_union(&ground, v));
                    members.push((format!("{}x{}", mask_label("", u, n), mask_label("", v, n)), rect));
                }
            }
            (ground, members)
        }
        SpaceKind::TensorStars { n, d } => {
            let size = (0..d).try_fold(1usize, |acc, _| acc.checked_mul(n));
            let size = size.unwrap_or(usize::MAX);
            cap("ground size", size, MAX_GROUND)?;
            let coords = |mut x: usize| {
                let mut c = vec![0; d];
                for k in (0..d).rev() {
                    c[k] = x % n + 1;
                    x /= n;
                }
                c
            };
            let labels = (0..size)
                .map(|x| {
                    let c: Vec<String> = coords(x).iter().map(|v| v.to_string()).collect();
                    format!("({})", c.join(","))
                })
                .collect();
            let ground = GroundSet::plain(labels)?;
            let mut members = Vec::with_capacity(n * d);
            for k in 0..d {
                for a in 1..=n {
                    let set = Subset::from_indices(size, (0..size).filter(|&x| coords(x)[k] == a))?;
                    members.push((format!("x{}={a}", k + 1), set));
                }
            }
            (ground, members)
        }
    };
    let family = GeneratorFamily::new(&ground, members)?;
    Ok(DiscreteSpace::new(ground, family)?.with_kind(kind))
}

/// Parses a descriptor such as `stars:4x4` and builds the space.
pub fn space_from_descriptor(descriptor: &str) -> Result<DiscreteSpace> {
    make_generators(descriptor.parse()?)
}

fn grid_dims(ground: &GroundSet) -> Result<(usize, usize)> {
    match ground.kind() {
        GroundKind::Grid { rows, cols } => Ok((rows, cols)),
        _ => Err(Error::Parameter("expected a grid ground set".into())),
    }
}

/// Union of the rows `i` with bit `i-1` set in `mask`.
pub fn row_union(ground: &GroundSet, mask: usize) -> Subset {
    let (_, cols) = grid_dims(ground).expect("grid ground set");
    Subset::from_indices(ground.size(), (0..ground.size()).filter(|x| mask >> (x / cols) & 1 == 1))
        .unwrap()
}

/// Union of the columns `j` with bit `j-1` set in `mask`.
pub fn col_union(ground: &GroundSet, mask: usize) -> Subset {
    let (_, cols) = grid_dims(ground).expect("grid ground set");
    Subset::from_indices(ground.size(), (0..ground.size()).filter(|x| mask >> (x % cols) & 1 == 1))
        .unwrap()
}

/// φ between `[2ⁿ] × [2ⁿ]` and `{0,1}^{2n}`: `φ(u,v) = binary(u)binary(v)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GraphFunctionBijection {
    n: usize,
}

impl GraphFunctionBijection {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > 8 {
            return Err(Error::Parameter(format!("bijection parameter n={n} outside 1..=8")));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Side length `N = 2ⁿ`.
    pub fn side(&self) -> usize {
        1 << self.n
    }

    /// The `n`-bit string of `u - 1`.
    pub fn binary(&self, u: usize) -> Result<String> {
        if !(1..=self.side()).contains(&u) {
            return Err(Error::Parameter(format!("coordinate {u} outside [{}]", self.side())));
        }
        Ok(bit_string(u - 1, self.n))
    }

    pub fn forward(&self, u: usize, v: usize) -> Result<String> {
        Ok(self.binary(u)? + &self.binary(v)?)
    }

    pub fn backward(&self, w: &str) -> Result<(usize, usize)> {
        if w.len() != 2 * self.n || !w.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::Parameter(format!(
                "expected a {}-bit string, got {w:?}",
                2 * self.n
            )));
        }
        let (a, b) = w.split_at(self.n);
        Ok((num(a) + 1, num(b) + 1))
    }

    /// Image of a subset of the grid as a subset of the hypercube.
    pub fn image(&self, g: &Subset) -> Result<Subset> {
        let side = self.side();
        self.check_len(g, side * side)?;
        let cube = 1usize << (2 * self.n);
        let mut out = Subset::empty(cube);
        for x in g.iter() {
            out.insert(num(&self.forward(x / side + 1, x % side + 1)?));
        }
        Ok(out)
    }

    /// Preimage of a subset of the hypercube as a subset of the grid.
    pub fn preimage(&self, f: &Subset) -> Result<Subset> {
        let side = self.side();
        self.check_len(f, side * side)?;
        let mut out = Subset::empty(side * side);
        for x in f.iter() {
            let (u, v) = self.backward(&bit_string(x, 2 * self.n))?;
            out.insert((u - 1) * side + (v - 1));
        }
        Ok(out)
    }

    fn check_len(&self, s: &Subset, expected: usize) -> Result<()> {
        if s.len() == expected {
            Ok(())
        } else {
            Err(Error::GroundMismatch {
                expected,
                actual: s.len(),
            })
        }
    }
}

/// `f_G` with `f_G⁻¹(1) = φ(G)`, for `G` over a square grid of side `2ⁿ`.
pub fn function_from_graph(side: usize, g: &Subset) -> Result<Subset> {
    if !side.is_power_of_two() || side < 2 {
        return Err(Error::Parameter(format!("grid side {side} is not a power of two ≥ 2")));
    }
    GraphFunctionBijection::new(side.trailing_zeros() as usize)?.image(g)
}

/// Star indices whose union equals `set`, if `set` is a union of rows or a
/// union of columns of a `graph_stars` space.
pub fn star_decomposition(space: &DiscreteSpace, set: &Subset) -> Option<Vec<usize>> {
    let (rows, cols) = match space.kind()? {
        SpaceKind::GraphStars { rows, cols } => (rows, cols),
        _ => return None,
    };
    let full_rows: Vec<usize> = (0..rows)
        .filter(|&r| space.generator(r).is_subset(set))
        .collect();
    let union_rows = full_rows
        .iter()
        .fold(Subset::empty(set.len()), |acc, &r| acc.union(space.generator(r)));
    if !full_rows.is_empty() && union_rows == *set {
        return Some(full_rows);
    }
    let full_cols: Vec<usize> = (rows..rows + cols)
        .filter(|&c| space.generator(c).is_subset(set))
        .collect();
    let union_cols = full_cols
        .iter()
        .fold(Subset::empty(set.len()), |acc, &c| acc.union(space.generator(c)));
    (!full_cols.is_empty() && union_cols == *set).then_some(full_cols)
}

/// `{(u,v) ∈ [n]×[n] : u ≠ v}`.
pub fn neq(n: usize) -> Result<Subset> {
    let ground = GroundSet::grid(n, n)?;
    Subset::from_indices(ground.size(), (0..ground.size()).filter(|x| x / n != x % n))
}

/// Cells `(i, j)` with `i + j` odd: the shaded cells of the 5×5 example.
pub fn chessboard(rows: usize, cols: usize) -> Result<Subset> {
    let ground = GroundSet::grid(rows, cols)?;
    Subset::from_indices(
        ground.size(),
        (0..ground.size()).filter(|x| (x / cols + 1 + x % cols + 1) % 2 == 1),
    )
}

/// One step of [`chessboard_steps`]: operator and two operands, each either a
/// generator name or a 1-based step number.
pub type NamedStep = (char, &'static str, &'static str);

/// `((R2∪R4) ∩ (C1∪C3∪C5)) ∪ ((C2∪C4) ∩ (R1∪R3∪R5))` over `stars:5x5`, nine steps.
pub const CHESSBOARD_STEPS: [NamedStep; 9] = [
    ('U', "R2", "R4"),
    ('U', "C1", "C3"),
    ('U', "s2", "C5"),
    ('I', "s1", "s3"),
    ('U', "C2", "C4"),
    ('U', "R1", "R3"),
    ('U', "s6", "R5"),
    ('I', "s5", "s7"),
    ('U', "s4", "s8"),
];

/// `F` over `{0,1}^{1+n}` with `F(1,z) = f(z)` and `F(0,z) = ¬f(z)`; the new bit is leftmost.
pub fn duality(f: &Subset, space: &DiscreteSpace) -> Result<Subset> {
    let n = match space.kind() {
        Some(SpaceKind::BooleanBasis { n }) => n,
        _ => return Err(Error::Parameter("duality needs a bool:n space".into())),
    };
    if f.len() != space.size() {
        return Err(Error::GroundMismatch {
            expected: space.size(),
            actual: f.len(),
        });
    }
    let half = 1usize << n;
    let neg = f.complement();
    Subset::from_indices(2 * half, neg.iter().chain(f.iter().map(|z| half + z)))
}

/// Resolves a catalog name (`neq:N`, `chess:NxM`) against a space.
pub fn catalog_target(name: &str, space: &DiscreteSpace) -> Result<Subset> {
    let (tag, params) = name
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("unknown catalog name {name:?}")))?;
    let set = match tag {
        "neq" => neq(parse_pos(params)?)?,
        "chess" => {
            let (r, c) = parse_pair(params, 'x')?;
            chessboard(r, c)?
        }
        _ => return Err(Error::Parse(format!("unknown catalog name {name:?}"))),
    };
    if set.len() != space.size() {
        return Err(Error::GroundMismatch {
            expected: space.size(),
            actual: set.len(),
        });
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(space: &DiscreteSpace, i: usize, j: usize) -> usize {
        space.ground().grid_index(i, j).unwrap()
    }

    #[test]
    fn descriptors_round_trip() {
        for d in ["stars:4x3", "bool:2", "mono:3", "clique:2x2", "rect:2", "tensor:3^2"] {
            assert_eq!(d.parse::<SpaceKind>().unwrap().to_string(), d);
        }
        assert!("stars:4".parse::<SpaceKind>().is_err());
        assert!("cube:3".parse::<SpaceKind>().is_err());
        assert!("bool:0".parse::<SpaceKind>().is_err());
    }

    #[test]
    fn graph_stars_layout() {
        let s = make_generators(SpaceKind::GraphStars { rows: 2, cols: 2 }).unwrap();
        assert_eq!(s.family().len(), 4);
        let r1 = Subset::from_indices(4, [cell(&s, 1, 1), cell(&s, 1, 2)]).unwrap();
        assert_eq!(s.generator(0), &r1);
        assert_eq!(s.family().name(2), "C1");
    }

    #[test]
    fn boolean_basis_layout() {
        let s = make_generators(SpaceKind::BooleanBasis { n: 2 }).unwrap();
        assert_eq!(s.family().len(), 4);
        let b1: Vec<&str> = s.generator(0).iter().map(|x| s.ground().label(x)).collect();
        assert_eq!(b1, ["10", "11"]);
        assert_eq!(s.generator(2), &s.generator(0).complement());
    }

    #[test]
    fn monotone_basis_has_constants() {
        let s = make_generators(SpaceKind::MonotoneBasis { n: 2 }).unwrap();
        assert_eq!(s.family().len(), 4);
        assert!(s.generator(2).is_empty());
        assert!(s.generator(3).is_full());
    }

    #[test]
    fn rectangles_and_cliques() {
        let r = make_generators(SpaceKind::Rectangles { n: 2 }).unwrap();
        assert_eq!(r.family().len(), 16);
        let c = make_generators(SpaceKind::CliqueFamily { rows: 2, cols: 3 }).unwrap();
        assert_eq!(c.family().len(), 4 + 8);
        assert!(matches!(
            make_generators(SpaceKind::Rectangles { n: 5 }),
            Err(Error::Cap { .. })
        ));
        assert!(matches!(
            make_generators(SpaceKind::CliqueFamily { rows: 13, cols: 2 }),
            Err(Error::Cap { .. })
        ));
    }

    #[test]
    fn tensor_stars_fix_one_coordinate() {
        let s = make_generators(SpaceKind::TensorStars { n: 3, d: 2 }).unwrap();
        assert_eq!(s.family().len(), 6);
        for k in 0..6 {
            assert_eq!(s.generator(k).count(), 3);
        }
        // the first three partition the ground set
        let u = s.generator(0).union(s.generator(1)).union(s.generator(2));
        assert!(u.is_full());
        assert!(s.generator(0).intersection(s.generator(1)).is_empty());
        assert!(matches!(
            make_generators(SpaceKind::TensorStars { n: 17, d: 4 }),
            Err(Error::Cap { .. })
        ));
    }

    #[test]
    fn phi_examples() {
        let phi = GraphFunctionBijection::new(2).unwrap();
        assert_eq!(phi.forward(2, 3).unwrap(), "0110");
        assert_eq!(phi.backward("0000").unwrap(), (1, 1));
        assert_eq!(GraphFunctionBijection::new(1).unwrap().forward(1, 2).unwrap(), "01");
        assert!(phi.forward(5, 1).is_err());
        assert!(phi.backward("011").is_err());
        for u in 1..=4 {
            for v in 1..=4 {
                assert_eq!(phi.backward(&phi.forward(u, v).unwrap()).unwrap(), (u, v));
            }
        }
    }

    #[test]
    fn function_from_graph_examples() {
        assert!(function_from_graph(2, &Subset::empty(4)).unwrap().is_empty());
        let g = Subset::from_indices(4, [1]).unwrap();
        let f = function_from_graph(2, &g).unwrap();
        assert_eq!(f.iter().map(|x| bit_string(x, 2)).collect::<Vec<_>>(), ["01"]);
        let f = function_from_graph(2, &neq(2).unwrap()).unwrap();
        assert_eq!(f.iter().map(|x| bit_string(x, 2)).collect::<Vec<_>>(), ["01", "10"]);
        assert!(function_from_graph(3, &Subset::empty(9)).is_err());
    }

    #[test]
    fn literal_preimages_are_star_unions() {
        for n in 1..=3 {
            let phi = GraphFunctionBijection::new(n).unwrap();
            let side = phi.side();
            let stars = make_generators(SpaceKind::GraphStars { rows: side, cols: side }).unwrap();
            let cube = make_generators(SpaceKind::BooleanBasis { n: 2 * n }).unwrap();
            for k in 0..cube.family().len() {
                let pre = phi.preimage(cube.generator(k)).unwrap();
                let stars_used = star_decomposition(&stars, &pre).expect("union of stars");
                let rebuilt = stars_used
                    .iter()
                    .fold(Subset::empty(pre.len()), |acc, &s| acc.union(stars.generator(s)));
                assert_eq!(rebuilt, pre);
            }
        }
    }

    #[test]
    fn catalog_sets() {
        let n2 = neq(2).unwrap();
        assert_eq!(n2.iter().collect::<Vec<_>>(), [1, 2]);
        let chess = chessboard(5, 5).unwrap();
        assert_eq!(chess.count(), 12);
        let s = make_generators(SpaceKind::GraphStars { rows: 5, cols: 5 }).unwrap();
        assert!(chess.contains(cell(&s, 1, 2)));
        assert!(!chess.contains(cell(&s, 1, 1)));
        assert_eq!(catalog_target("chess:5x5", &s).unwrap(), chess);
        assert!(catalog_target("neq:4", &s).is_err());
        assert!(catalog_target("nope:4", &s).is_err());
    }

    #[test]
    fn duality_doubles_the_cube() {
        let s = make_generators(SpaceKind::BooleanBasis { n: 2 }).unwrap();
        let f = Subset::parse_bits("0110").unwrap();
        let big = duality(&f, &s).unwrap();
        assert_eq!(big.to_bit_string(), "10010110");
        let stars = make_generators(SpaceKind::GraphStars { rows: 2, cols: 2 }).unwrap();
        assert!(duality(&f, &stars).is_err());
    }
}
