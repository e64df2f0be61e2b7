use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{solve_rho, solve_side_count, RhoMethod, SearchBudget, Side, Status};
use crate::sets::Subset;
use crate::spaces::{make_generators, SpaceKind};
use crate::{Error, Result};

pub const ASYMPTOTIC_NOTE: &str =
    "linear growth of the cover complexity of random graphs is an asymptotic statement and is not checked here";

#[derive(Clone, Debug, Serialize)]
pub struct GraphSample {
    pub n: usize,
    /// Row-major 0/1 string.
    pub graph: String,
    pub rho: usize,
    pub rho_status: Status,
    pub dcap: usize,
    pub dcap_status: Status,
    /// `1 ≤ ρ ≤ D∩ ≤ ρ²` and `D∩ ≤ N`, with both values exact.
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub seed: u64,
    pub samples: Vec<GraphSample>,
    /// `(N, ρ, D∩) → count`.
    pub distribution: BTreeMap<String, usize>,
    pub violations: usize,
    pub note: &'static str,
}

/// Samples uniform non-trivial graphs on `[N] × [N]` for each `N` and solves
/// `ρ` and `D∩` over stars exactly.
pub fn random_graph_experiment(sizes: &[usize], samples: usize, seed: u64, budget: &SearchBudget) -> Result<ExperimentReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for &n in sizes {
        if !(2..=3).contains(&n) {
            return Err(Error::Parameter(format!("random-graph experiment runs at N = 2 or 3, not {n}")));
        }
        let space = Arc::new(make_generators(SpaceKind::GraphStars { rows: n, cols: n })?);
        let cells = n * n;
        for _ in 0..samples {
            let g = loop {
                let word: u64 = rng.gen::<u64>() & ((1 << cells) - 1);
                let g = Subset::from_word(cells, word);
                if !g.is_empty() && !g.is_full() {
                    break g;
                }
            };
            let rho = solve_rho(&g, &space, RhoMethod::LambdaSearch, false, budget)?;
            let dcap = solve_side_count(&g, &space, Side::Intersections, budget)?;
            let exact = rho.is_exact() && dcap.is_exact();
            let (r, d) = (rho.value, dcap.value);
            out.push(GraphSample {
                n,
                graph: g.to_bit_string(),
                rho: r,
                rho_status: rho.status,
                dcap: d,
                dcap_status: dcap.status,
                holds: exact && 1 <= r && r <= d && d <= r * r && d <= n,
            });
        }
    }
    let mut distribution = BTreeMap::new();
    for s in &out {
        *distribution
            .entry(format!("N={} rho={} dcap={}", s.n, s.rho, s.dcap))
            .or_insert(0) += 1;
    }
    Ok(ExperimentReport {
        seed,
        violations: out.iter().filter(|s| !s.holds).count(),
        samples: out,
        distribution,
        note: ASYMPTOTIC_NOTE,
    })
}
