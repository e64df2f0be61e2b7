//! Text certificates.
//!
//! ```text
//! construction stars:2x2 3
//! 1 U g1 g3
//! 2 U g2 g4
//! 3 I s1 s2
//! ```
//!
//! Cyclic sequences use the `cyclic` header and always end with `output s<k>`.
//! Constructions list `output` lines only when the outputs differ from the
//! last step. Pair families use the `lambda` header, see [`crate::fusion::Lambda`].

use std::fmt::Write as _;
use std::sync::Arc;

use super::{Construction, CyclicSequence, Op, Ref, Step};
use crate::fusion::Lambda;
use crate::sets::{DiscreteSpace, Subset};
use crate::spaces::space_from_descriptor;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub enum Certificate {
    Construction(Construction),
    Cyclic(CyclicSequence),
    Lambda {
        space: Arc<DiscreteSpace>,
        target: Subset,
        lambda: Lambda,
    },
}

impl Certificate {
    pub fn to_text(&self) -> Result<String> {
        match self {
            Certificate::Construction(c) => c.to_certificate(),
            Certificate::Cyclic(c) => c.to_certificate(),
            Certificate::Lambda { space, target, lambda } => lambda.to_certificate(space, target),
        }
    }

    pub fn space(&self) -> &Arc<DiscreteSpace> {
        match self {
            Certificate::Construction(c) => c.space(),
            Certificate::Cyclic(c) => c.space(),
            Certificate::Lambda { space, .. } => space,
        }
    }
}

pub(crate) fn descriptor(space: &DiscreteSpace) -> Result<String> {
    space
        .descriptor()
        .ok_or_else(|| Error::Parameter("only standard spaces can be written as certificates".into()))
}

pub(crate) fn parse_op(s: &str) -> Result<Op> {
    match s {
        "U" => Ok(Op::Union),
        "I" => Ok(Op::Intersection),
        _ => Err(Error::Parse(format!("unknown operation {s:?}"))),
    }
}

pub(crate) fn parse_ref(s: &str) -> Result<Ref> {
    let bad = || Error::Parse(format!("malformed reference {s:?}"));
    let (kind, idx) = s.split_at(s.char_indices().nth(1).map_or(s.len(), |(i, _)| i));
    let k: usize = idx.parse().map_err(|_| bad())?;
    if k == 0 {
        return Err(bad());
    }
    match kind {
        "g" => Ok(Ref::Generator(k - 1)),
        "s" => Ok(Ref::Step(k - 1)),
        _ => Err(bad()),
    }
}

fn write_steps(out: &mut String, steps: &[Step]) {
    for (i, s) in steps.iter().enumerate() {
        writeln!(out, "{} {} {} {}", i + 1, s.op.symbol(), s.left, s.right).unwrap();
    }
}

fn parse_output(line: &str) -> Result<usize> {
    match line.split_whitespace().collect::<Vec<_>>()[..] {
        ["output", r] => match parse_ref(r)? {
            Ref::Step(k) => Ok(k),
            Ref::Generator(_) => Err(Error::Parse("output must name a step".into())),
        },
        _ => Err(Error::Parse(format!("expected `output s<k>`, got {line:?}"))),
    }
}

struct Body {
    space: Arc<DiscreteSpace>,
    steps: Vec<Step>,
    outputs: Vec<usize>,
}

fn parse_body<'a>(space: &str, count: &str, lines: impl Iterator<Item = &'a str>) -> Result<Body> {
    let space = Arc::new(space_from_descriptor(space)?);
    let count: usize = count
        .parse()
        .map_err(|_| Error::Parse(format!("malformed step count {count:?}")))?;
    let mut lines = lines.filter(|l| !l.trim().is_empty());
    let mut steps = Vec::with_capacity(count);
    for i in 0..count {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("expected {count} steps, found {i}")))?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [idx, op, l, r] = fields[..] else {
            return Err(Error::Parse(format!("malformed step line {line:?}")));
        };
        if idx.parse::<usize>().ok() != Some(i + 1) {
            return Err(Error::Parse(format!("step {} is numbered {idx:?}", i + 1)));
        }
        steps.push(Step::new(parse_op(op)?, parse_ref(l)?, parse_ref(r)?));
    }
    let outputs = lines.map(parse_output).collect::<Result<Vec<_>>>()?;
    Ok(Body { space, steps, outputs })
}

/// Parses any certificate kind, dispatching on the header keyword.
pub fn parse_certificate(text: &str) -> Result<Certificate> {
    let mut lines = text.lines();
    let header = lines
        .by_ref()
        .find(|l| !l.trim().is_empty())
        .ok_or_else(|| Error::Parse("empty certificate".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    match fields[..] {
        ["construction", space, count] => {
            let b = parse_body(space, count, lines)?;
            let outputs = if b.outputs.is_empty() {
                vec![b.steps.len().saturating_sub(1)]
            } else {
                b.outputs
            };
            Ok(Certificate::Construction(Construction::with_outputs(b.space, b.steps, outputs)?))
        }
        ["cyclic", space, count] => {
            let b = parse_body(space, count, lines)?;
            let [output] = b.outputs[..] else {
                return Err(Error::Parse("cyclic certificate needs exactly one output line".into()));
            };
            Ok(Certificate::Cyclic(CyclicSequence::new(b.space, b.steps, output)?))
        }
        ["lambda", ..] => {
            let (space, target, lambda) = Lambda::parse_certificate(text)?;
            Ok(Certificate::Lambda { space, target, lambda })
        }
        _ => Err(Error::Parse(format!("unknown certificate header {header:?}"))),
    }
}

impl Construction {
    pub fn to_certificate(&self) -> Result<String> {
        let mut out = format!("construction {} {}\n", descriptor(self.space())?, self.len());
        write_steps(&mut out, self.steps());
        if self.outputs() != [self.len() - 1] {
            for &o in self.outputs() {
                writeln!(out, "output s{}", o + 1).unwrap();
            }
        }
        Ok(out)
    }
}

impl CyclicSequence {
    pub fn to_certificate(&self) -> Result<String> {
        let mut out = format!("cyclic {} {}\n", descriptor(self.space())?, self.gates().len());
        write_steps(&mut out, self.gates());
        writeln!(out, "output s{}", self.output() + 1).unwrap();
        Ok(out)
    }
}
