use std::sync::Arc;

use proptest::prelude::*;
use setfusion::constructions::{extract_lambda, Construction, Op, Ref, Step};
use setfusion::fusion::{
    closure_gw, compile_lambda, covers_canonical, enumerate_semifilters, is_above, is_inert_pair, ClosureState,
    CompileTarget, Lambda, SemiFilter, Universe, VerifyMode,
};
use setfusion::fusion::verify_lambda;
use setfusion::sets::{DiscreteSpace, Subset};
use setfusion::solvers::{
    solve_discrete, solve_rho, solve_side_count, RhoMethod, SearchBudget, Side, Status,
};
use setfusion::spaces::{make_generators, SpaceKind};

fn spaces() -> Vec<Arc<DiscreteSpace>> {
    [
        SpaceKind::GraphStars { rows: 2, cols: 2 },
        SpaceKind::GraphStars { rows: 2, cols: 3 },
        SpaceKind::BooleanBasis { n: 2 },
        SpaceKind::Rectangles { n: 2 },
    ]
    .into_iter()
    .map(|k| Arc::new(make_generators(k).unwrap()))
    .collect()
}

fn space() -> impl Strategy<Value = Arc<DiscreteSpace>> {
    prop::sample::select(spaces())
}

/// A space and a non-trivial target with `|Aᶜ| ≤ 4`.
fn target() -> impl Strategy<Value = (Arc<DiscreteSpace>, Subset)> {
    space().prop_flat_map(|s| {
        let n = s.size();
        (Just(s), 1u64..(1 << n) - 1)
            .prop_filter("complement fits the enumerator", move |(_, w)| n - w.count_ones() as usize <= 4)
            .prop_map(move |(s, w)| (s, Subset::from_word(n, w)))
    })
}

fn instance() -> impl Strategy<Value = (Arc<DiscreteSpace>, Subset, Lambda)> {
    target().prop_flat_map(|(s, a)| {
        let universe = Arc::new(Universe::new(a.complement()).unwrap());
        let full = universe.full_mask();
        let pair = (0..=full, 0..=full);
        (Just(s), Just(a), Just(universe), prop::collection::vec(pair, 0..4))
            .prop_map(|(s, a, u, pairs)| (s, a, Lambda::new(u, pairs).unwrap()))
    })
}

fn construction() -> impl Strategy<Value = Construction> {
    space().prop_flat_map(|s| {
        let m = s.family().len();
        prop::collection::vec((any::<bool>(), any::<prop::sample::Index>(), any::<prop::sample::Index>()), 1..7)
            .prop_map(move |raw| {
                let steps = raw
                    .iter()
                    .enumerate()
                    .map(|(i, (union, l, r))| {
                        let pick = |ix: &prop::sample::Index| {
                            let k = ix.index(m + i);
                            if k < m { Ref::Generator(k) } else { Ref::Step(k - m) }
                        };
                        Step::new(if *union { Op::Union } else { Op::Intersection }, pick(l), pick(r))
                    })
                    .collect();
                Construction::new(s.clone(), steps).unwrap()
            })
    })
}

fn small_budget() -> SearchBudget {
    SearchBudget::with_depth(4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn subset_lattice_laws(n in 1usize..70, a in any::<u128>(), b in any::<u128>()) {
        let mk = |w: u128| Subset::from_indices(n, (0..n).filter(|&i| w >> (i % 128) & 1 == 1)).unwrap();
        let (x, y) = (mk(a), mk(b));
        prop_assert_eq!(x.union(&y), y.union(&x));
        prop_assert_eq!(x.intersection(&x.union(&y)), x.clone());
        prop_assert_eq!(x.union(&y).complement(), x.complement().intersection(&y.complement()));
        prop_assert!(x.intersection(&y).is_subset(&x));
        prop_assert_eq!(x.complement().complement(), x);
    }

    #[test]
    fn verification_modes_agree((space, a, lambda) in instance()) {
        let c = verify_lambda(&a, &space, &lambda, VerifyMode::Closure).unwrap();
        let e = verify_lambda(&a, &space, &lambda, VerifyMode::Enumerate).unwrap();
        prop_assert_eq!(c.valid, e.valid);
    }

    #[test]
    fn closure_is_least_preserving_filter((space, a, lambda) in instance()) {
        let u = lambda.universe().clone();
        let filters = enumerate_semifilters(u.size(), false).unwrap();
        for w in 0..space.size() {
            let c = closure_gw(w, &space, &lambda).unwrap();
            let above: Vec<&SemiFilter> = filters
                .iter()
                .filter(|f| is_above(f, w, &space, &u).unwrap() && f.preserves(&lambda).unwrap())
                .collect();
            match c.state {
                ClosureState::Empty => prop_assert!(above.is_empty()),
                ClosureState::Filter(g) => {
                    prop_assert!(g.preserves(&lambda).unwrap());
                    prop_assert!(is_above(&g, w, &space, &u).unwrap());
                    prop_assert!(above.iter().all(|f| g.is_subfamily_of(f)));
                }
                ClosureState::Degenerate => prop_assert!(!above.is_empty()),
            }
            prop_assert!(c.rounds <= lambda.len());
        }
        let _ = a;
    }

    #[test]
    fn inert_pairs_change_nothing((space, a, lambda) in instance(), e in any::<u64>(), h in any::<u64>()) {
        let full = lambda.universe().full_mask();
        let (e, h) = (e & full, h & full);
        let inert = if is_inert_pair(e, h) { (e, h) } else { (e, e | h) };
        let mut pairs = lambda.pairs().to_vec();
        pairs.push(inert);
        let extended = Lambda::new(lambda.universe().clone(), pairs).unwrap();
        let before = verify_lambda(&a, &space, &lambda, VerifyMode::Closure).unwrap().valid;
        let after = verify_lambda(&a, &space, &extended, VerifyMode::Closure).unwrap().valid;
        prop_assert_eq!(before, after);
    }

    #[test]
    fn extraction_round_trip(c in construction()) {
        let a = c.evaluate().value;
        prop_assume!(!a.is_empty() && !a.is_full());
        let lambda = extract_lambda(&c, &a).unwrap();
        prop_assert!(lambda.len() <= c.cost().intersections);
        prop_assert!(verify_lambda(&a, c.space(), &lambda, VerifyMode::Closure).unwrap().valid);
        for t in [CompileTarget::Cyclic, CompileTarget::Acyclic] {
            let (compiled, _) = compile_lambda(&a, c.space(), &lambda, t).unwrap();
            prop_assert_eq!(compiled.value(), a.clone());
            prop_assert!(compiled.intersections() <= lambda.len() * lambda.len().max(1));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sandwich_and_additivity((space, a) in target()) {
        let budget = small_budget();
        let dcap = solve_side_count(&a, &space, Side::Intersections, &budget).unwrap();
        let dcup = solve_side_count(&a, &space, Side::Unions, &budget).unwrap();
        let rho = solve_rho(&a, &space, RhoMethod::LambdaSearch, false, &budget).unwrap();
        let rho_cover = solve_rho(&a, &space, RhoMethod::SetCover, false, &budget).unwrap();
        prop_assert_eq!(rho.status, rho_cover.status);
        if rho.status == Status::Exact {
            prop_assert_eq!(rho.value, rho_cover.value);
            prop_assert!(rho.verify(std::slice::from_ref(&a)).unwrap());
        }
        if rho.is_exact() && dcap.is_exact() {
            prop_assert!(rho.value <= dcap.value && dcap.value <= rho.value * rho.value);
        }
        let d = solve_discrete(&a, &space, &budget).unwrap();
        if d.is_exact() && dcap.is_exact() && dcup.is_exact() {
            prop_assert!(d.value >= dcap.value + dcup.value);
            prop_assert!(d.verify(std::slice::from_ref(&a)).unwrap());
        }
    }

    #[test]
    fn solvers_are_deterministic_across_pools((space, a) in target()) {
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                let budget = small_budget();
                let r = solve_rho(&a, &space, RhoMethod::LambdaSearch, false, &budget).unwrap();
                let d = solve_side_count(&a, &space, Side::Intersections, &budget).unwrap();
                format!("{:?} {} {:?} | {:?} {} {:?}", r.status, r.value, r.witness, d.status, d.value, d.witness)
            })
        };
        prop_assert_eq!(run(1), run(4));
    }
}

/// Bipartition pairs over the diagonal cover the canonical filter of edge
/// `(u, v)` exactly when they split `u` from `v`.
#[test]
fn canonical_cover_is_separation() {
    for n in 2..=8usize {
        let space = make_generators(SpaceKind::GraphStars { rows: n, cols: n }).unwrap();
        let g = setfusion::spaces::neq(n).unwrap();
        let (universe, filters) = setfusion::fusion::canonical_filters(&g, &space).unwrap();
        assert_eq!(universe.size(), n);
        let full = universe.full_mask();
        for m in 0..=full {
            for ((u, v), f) in &filters {
                let split = (m >> (u - 1) & 1) != (m >> (v - 1) & 1);
                assert_eq!(covers_canonical((m, full & !m), f), split, "n={n} m={m:b} edge ({u},{v})");
            }
        }
    }
}

#[test]
fn enumerated_families_are_semi_filters() {
    for size in 1..=4 {
        let full = (1u64 << size) - 1;
        let all = enumerate_semifilters(size, false).unwrap();
        let ultra = enumerate_semifilters(size, true).unwrap();
        for f in all {
            assert!(!f.contains(0));
            for s in 0..=full {
                for t in 0..=full {
                    if f.contains(s) && s & !t == 0 {
                        assert!(f.contains(t));
                    }
                }
            }
            let is_ultra = (0..=full).all(|s| f.contains(s) || f.contains(full & !s));
            assert_eq!(ultra.contains(f), is_ultra);
        }
    }
}
