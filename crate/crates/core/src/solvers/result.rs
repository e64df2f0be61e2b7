use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::{BudgetSpent, FinitenessWitness};
use crate::constructions::{Construction, CyclicSequence};
use crate::fusion::{canonical_filters, covers_canonical, verify_lambda, Lambda, VerifyMode};
use crate::sets::{DiscreteSpace, Subset};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measure {
    D,
    DMulti,
    DCap,
    DCup,
    Rho,
    RhoUltra,
    RhoCanNeq,
    DCircCap,
}

impl Measure {
    pub fn tag(self) -> &'static str {
        match self {
            Measure::D => "D",
            Measure::DMulti => "D_multi",
            Measure::DCap => "D∩",
            Measure::DCup => "D∪",
            Measure::Rho => "ρ",
            Measure::RhoUltra => "ρ_ultra",
            Measure::RhoCanNeq => "ρ_can_neq",
            Measure::DCircCap => "D°∩",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Exact,
    /// Every depth up to the depth cap was refuted; `value` is a lower bound.
    LowerBoundOnly,
    Infinite,
    /// States or time ran out; `value` is a lower bound.
    BudgetExhausted,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Exact => "exact",
            Status::LowerBoundOnly => "lower_bound_only",
            Status::Infinite => "infinite",
            Status::BudgetExhausted => "budget_exhausted",
        })
    }
}

#[derive(Clone, Debug)]
pub enum Witness {
    None,
    Construction(Construction),
    Cyclic(CyclicSequence),
    Lambda {
        space: Arc<DiscreteSpace>,
        target: Subset,
        lambda: Lambda,
    },
    NotFinite(FinitenessWitness),
}

impl Witness {
    /// Certificate text, when the witness has one.
    pub fn certificate(&self) -> Option<Result<String>> {
        match self {
            Witness::Construction(c) => Some(c.to_certificate()),
            Witness::Cyclic(c) => Some(c.to_certificate()),
            Witness::Lambda { space, target, lambda } => Some(lambda.to_certificate(space, target)),
            Witness::None | Witness::NotFinite(_) => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ComplexityResult {
    pub measure: Measure,
    pub status: Status,
    pub value: usize,
    pub witness: Witness,
    pub spent: BudgetSpent,
}

impl ComplexityResult {
    pub fn is_exact(&self) -> bool {
        self.status == Status::Exact
    }

    /// Re-checks the witness against the targets: it must compute them (or
    /// cover them) at exactly the reported cost.
    pub fn verify(&self, targets: &[Subset]) -> Result<bool> {
        Ok(match &self.witness {
            Witness::None => self.status != Status::Exact,
            Witness::NotFinite(_) => self.status == Status::Infinite,
            Witness::Construction(c) => {
                let cost = c.cost();
                let counted = match self.measure {
                    Measure::D | Measure::DMulti => cost.total,
                    Measure::DCap => cost.intersections,
                    Measure::DCup => cost.unions,
                    _ => return Ok(false),
                };
                counted == self.value && c.output_values() == targets
            }
            Witness::Cyclic(s) => {
                let [a] = targets else { return Ok(false) };
                s.cost().intersections == self.value && s.evaluate().0 == *a
            }
            Witness::Lambda { space, target, lambda } => {
                let [a] = targets else { return Ok(false) };
                if a != target || lambda.len() != self.value {
                    return Ok(false);
                }
                match self.measure {
                    Measure::Rho => verify_lambda(a, space, lambda, VerifyMode::Closure)?.valid,
                    Measure::RhoUltra => verify_lambda(a, space, lambda, VerifyMode::EnumerateUltra)?.valid,
                    Measure::RhoCanNeq => {
                        let (_, filters) = canonical_filters(a, space)?;
                        filters
                            .iter()
                            .all(|(_, f)| lambda.pairs().iter().any(|&p| covers_canonical(p, f)))
                    }
                    _ => false,
                }
            }
        })
    }
}
