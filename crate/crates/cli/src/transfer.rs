//! Moving sets and constructions between `stars:NxN` and `bool:2n` through φ.

use std::sync::Arc;

use setfusion::constructions::{Construction, Preimage, Ref, Step};
use setfusion::sets::{bit_string, num, DiscreteSpace, Subset};
use setfusion::spaces::{make_generators, star_decomposition, GraphFunctionBijection, SpaceKind};

use crate::input::{fail, InputError};

pub struct Pair {
    pub phi: GraphFunctionBijection,
    pub grid: Arc<DiscreteSpace>,
    pub cube: Arc<DiscreteSpace>,
}

impl Pair {
    pub fn new(n: usize) -> Result<Self, InputError> {
        let phi = GraphFunctionBijection::new(n)?;
        let side = phi.side();
        Ok(Self {
            phi,
            grid: Arc::new(make_generators(SpaceKind::GraphStars { rows: side, cols: side })?),
            cube: Arc::new(make_generators(SpaceKind::BooleanBasis { n: 2 * n })?),
        })
    }

    /// Cube point of each grid cell.
    fn cell_to_point(&self) -> Result<Vec<usize>, InputError> {
        let side = self.phi.side();
        (0..side * side)
            .map(|x| Ok(num(&self.phi.forward(x / side + 1, x % side + 1)?)))
            .collect()
    }

    /// Grid cell of each cube point.
    fn point_to_cell(&self) -> Result<Vec<usize>, InputError> {
        let side = self.phi.side();
        (0..self.cube.size())
            .map(|x| {
                let (u, v) = self.phi.backward(&bit_string(x, 2 * self.phi.n()))?;
                Ok((u - 1) * side + (v - 1))
            })
            .collect()
    }

    /// A grid construction of `G` becomes a cube construction of `φ(G)`; each
    /// star is rebuilt as the meet of the literals fixing its coordinate.
    pub fn forward(&self, c: &Construction) -> Result<Construction, InputError> {
        if c.space().kind() != self.grid.kind() {
            return fail(format!("expected a construction over {}", self.grid.kind().unwrap()));
        }
        let n = self.phi.n();
        let side = self.phi.side();
        let literal = |pos: usize, bit: bool| if bit { pos } else { 2 * n + pos };
        let star = |k: usize| -> Result<Preimage, InputError> {
            let (offset, coord) = if k < side { (0, k) } else { (n, k - side) };
            let bits = bit_string(coord, n);
            let lits: Vec<usize> = bits.bytes().enumerate().map(|(i, b)| literal(offset + i, b == b'1')).collect();
            if let [single] = lits[..] {
                return Ok(Preimage::Generator(single));
            }
            let mut steps = vec![Step::intersection(Ref::Generator(lits[0]), Ref::Generator(lits[1]))];
            for &l in &lits[2..] {
                steps.push(Step::intersection(Ref::Step(steps.len() - 1), Ref::Generator(l)));
            }
            Ok(Preimage::Built(Construction::new(self.cube.clone(), steps)?))
        };
        let preimages = (0..self.grid.family().len()).map(|k| star(k).map(Some)).collect::<Result<Vec<_>, _>>()?;
        Ok(c.transform_by_injection(self.cube.clone(), &self.point_to_cell()?, &preimages)?)
    }

    /// A cube construction of `F` becomes a grid construction of `φ⁻¹(F)`;
    /// each literal is a union of stars.
    pub fn backward(&self, c: &Construction) -> Result<Construction, InputError> {
        if c.space().kind() != self.cube.kind() {
            return fail(format!("expected a construction over {}", self.cube.kind().unwrap()));
        }
        let inj = self.cell_to_point()?;
        let preimages = self
            .cube
            .family()
            .sets()
            .map(|lit| {
                let pulled = Subset::from_indices(self.grid.size(), (0..inj.len()).filter(|&x| lit.contains(inj[x])))?;
                let stars = star_decomposition(&self.grid, &pulled)
                    .ok_or_else(|| InputError("literal is not a union of stars".into()))?;
                Ok(Some(match stars[..] {
                    [single] => Preimage::Generator(single),
                    _ => Preimage::Built(Construction::union_of_generators(self.grid.clone(), &stars)?),
                }))
            })
            .collect::<Result<Vec<_>, InputError>>()?;
        Ok(c.transform_by_injection(self.grid.clone(), &inj, &preimages)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use setfusion::spaces::neq;

    fn neq2(grid: &Arc<DiscreteSpace>) -> Construction {
        Construction::new(
            grid.clone(),
            vec![
                Step::union(Ref::Generator(0), Ref::Generator(2)),
                Step::union(Ref::Generator(1), Ref::Generator(3)),
                Step::intersection(Ref::Step(0), Ref::Step(1)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn forward_and_back_preserve_values() {
        for n in [1, 2] {
            let p = Pair::new(n).unwrap();
            let c = if n == 1 {
                neq2(&p.grid)
            } else {
                Construction::union_of_generators(p.grid.clone(), &[0, 5]).unwrap()
            };
            let g = c.evaluate().value;
            let f = p.forward(&c).unwrap();
            assert_eq!(f.evaluate().value, p.phi.image(&g).unwrap());
            let back = p.backward(&f).unwrap();
            assert_eq!(back.evaluate().value, g);
        }
    }

    #[test]
    fn neq2_keeps_its_intersection_count() {
        let p = Pair::new(1).unwrap();
        let f = p.forward(&neq2(&p.grid)).unwrap();
        assert_eq!(f.cost().intersections, 1);
        assert_eq!(p.phi.preimage(&f.evaluate().value).unwrap(), neq(2).unwrap());
    }

    #[test]
    fn wrong_space_is_rejected() {
        let p = Pair::new(1).unwrap();
        assert!(p.backward(&neq2(&p.grid)).is_err());
    }
}
