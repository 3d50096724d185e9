mod common;

use std::collections::HashMap;

use lierem_core::algebras::{verify_closure, AlgebraSpec};
use lierem_core::analysis::{generic_rank, rank_at_points};
use lierem_core::catalog;
use lierem_core::jet::{algebra_dims, MultiIndex};
use lierem_core::linalg::rank;
use lierem_core::sample::Sampler;
use lierem_core::syntax::{parse_expr, parse_field};
use lierem_core::{CoordId, JetSpec, RatExpr, Rational};
use num_traits::Zero;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn prolongation_is_well_defined(v in common::generator_combo(), a in any::<usize>(), path in prop::collection::vec(0usize..3, 1..=3)) {
        common::well_defined(&v, a, &path)?;
    }

    #[test]
    fn prolongation_is_linear(((a, b, r), c1, c2) in (common::generator_pair(), -3i64..=3, -3i64..=3)) {
        common::linear(&a, &b, c1, c2, r)?;
    }

    #[test]
    fn prolongation_preserves_brackets((a, b, r) in common::generator_pair()) {
        common::morphism(&a, &b, r)?;
    }

    #[test]
    fn ring_axioms(a in common::ratexpr(), b in common::ratexpr(), c in common::ratexpr()) {
        common::ring_axioms(&a, &b, &c)?;
    }

    #[test]
    fn derivations(a in common::ratexpr(), b in common::ratexpr(), v in common::field_22()) {
        common::derivation_law(&a, &b, &v)?;
    }

    #[test]
    fn normal_form_is_idempotent(e in common::ratexpr()) {
        let (num, den) = e.clone().into_parts();
        prop_assert_eq!(RatExpr::new(num, den).unwrap(), e);
    }

    #[test]
    fn substitution_commutes_with_evaluation(e in common::ratexpr(), s in common::ratexpr(), seed in 0u64..1000) {
        let sp = JetSpec::new(2, 2, 2).unwrap();
        let mut sampler = Sampler::new(seed, 0);
        let point = sampler.point(sp.coords());
        let target = CoordId::x(1);
        // substitute x[1] := s and evaluate, versus evaluating with x[1] set to s(point)
        let (Ok(sv), Ok(sub)) = (s.evaluate(&point), e.substitute(&HashMap::from([(target, s.clone())]))) else {
            return Ok(());
        };
        let mut moved = point.clone();
        moved.insert(target, sv);
        // a pole on one side only is possible after cancellation
        if let (Ok(l), Ok(r)) = (sub.evaluate(&point), e.evaluate(&moved)) {
            prop_assert_eq!(l, r);
        }
    }

    #[test]
    fn parser_round_trip(e in common::ratexpr()) {
        let sp = JetSpec::new(2, 2, 2).unwrap();
        prop_assert_eq!(parse_expr(&e.to_string(), &sp).unwrap(), e);
    }

    #[test]
    fn field_round_trip(v in common::generator_combo()) {
        prop_assert_eq!(parse_field(&v.to_string(), &JetSpec::new(v.n(), v.m(), 1).unwrap()).unwrap(), v);
    }

    #[test]
    fn canonical_index_ignores_order(raw in prop::collection::vec(1usize..=4, 1..=5), seed in any::<u64>()) {
        let mut shuffled = raw.clone();
        let k = shuffled.len().max(1);
        shuffled.rotate_left((seed as usize) % k);
        shuffled.reverse();
        let a = MultiIndex::new(&raw, 4).unwrap();
        prop_assert_eq!(&a, &MultiIndex::new(&shuffled, 4).unwrap());
        prop_assert_eq!(&a, &MultiIndex::new(&a.to_vec(), 4).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn more_samples_never_lower_rank(((n, m), proj) in (common::small_shape(), any::<bool>()), r in 1usize..=2, seed in 0u64..50) {
        let alg = common::algebra(n, m, proj);
        let few = generic_rank(&alg, r, 2, seed).unwrap();
        let many = generic_rank(&alg, r, 4, seed).unwrap();
        prop_assert!(many.generic_rank >= few.generic_rank);
        prop_assert!(few.per_sample.iter().all(|s| s.rank <= few.generic_rank));
    }

    #[test]
    fn more_generators_never_lower_rank(((n, m), proj) in (common::small_shape(), any::<bool>()), keep in prop::collection::vec(any::<bool>(), 24), seed in 0u64..50) {
        let alg = common::algebra(n, m, proj);
        let sub: Vec<_> = alg.generators().iter().zip(keep.iter().cycle()).filter(|(_, k)| **k).map(|(g, _)| g.clone()).collect();
        prop_assume!(!sub.is_empty());
        let sub = AlgebraSpec::custom(n, m, sub).unwrap();
        let sp = JetSpec::new(n, m, 2).unwrap();
        let pts: Vec<_> = (0..2).map(|k| Sampler::new(seed, k).point(sp.coords())).collect();
        let small = rank_at_points(&sub, 2, &pts).unwrap();
        let big = rank_at_points(&alg, 2, &pts).unwrap();
        prop_assert!(small.iter().zip(&big).all(|(s, b)| s <= b), "{:?} vs {:?}", small, big);
    }

    #[test]
    fn algebras_are_transitive(((n, m), proj) in (common::small_shape(), any::<bool>()), seed in any::<u64>()) {
        let alg = common::algebra(n, m, proj);
        let sp = JetSpec::new(n, m, 1).unwrap();
        let point = Sampler::new(seed, 0).point(sp.base_coords());
        let rows: Vec<Vec<_>> = sp
            .base_coords()
            .iter()
            .map(|c| alg.generators().iter().map(|g| g.component(*c).map_or_else(|| Ok(Rational::zero()), |e| e.evaluate(&point)).unwrap()).collect())
            .collect();
        prop_assert_eq!(rank(&rows), n + m);
    }
}

#[test]
fn generator_counts() {
    for n in 1..=4 {
        for m in 1..=3 {
            let (aff, proj) = algebra_dims(n, m);
            assert_eq!(common::algebra(n, m, false).dim(), aff);
            assert_eq!(common::algebra(n, m, true).dim(), proj);
        }
    }
}

#[test]
fn structure_constants_are_integers() {
    for (n, m) in [(1, 1), (2, 1), (1, 2), (2, 2), (3, 1)] {
        for proj in [false, true] {
            let c = verify_closure(&common::algebra(n, m, proj)).unwrap();
            assert!(c.values().flatten().all(|q| q.is_integer()), "({n},{m}) projective={proj}");
        }
    }
}

#[test]
fn jet_dimension_is_strictly_increasing() {
    let dim = |n, m, r| JetSpec::new(n, m, r).unwrap().dimension();
    for n in 1..=4 {
        for m in 1..=3 {
            for r in 1..=3 {
                let d = dim(n, m, r);
                assert!(dim(n + 1, m, r) > d && dim(n, m + 1, r) > d && dim(n, m, r + 1) > d);
                let coords = JetSpec::new(n, m, r).unwrap().coords();
                let distinct: std::collections::BTreeSet<_> = coords.iter().collect();
                assert_eq!((coords.len(), distinct.len()), (d, d));
            }
        }
    }
}

#[test]
fn catalog_charts_are_sound() {
    for name in catalog::NAMES.iter().map(|s| if *s == "det_hessian(n)" { "det_hessian(3)" } else { s }) {
        let e = catalog::get(name).unwrap();
        if let Some(chart) = e.system.param() {
            for d in e.system.deltas() {
                assert!(chart.restrict(d).unwrap().is_zero(), "{name}: {d}");
            }
        }
    }
}

#[test]
fn hierarchy_counts_and_dims() {
    for n in 2..=4 {
        for m in 2..=3 {
            let s = catalog::strongnm2_system(n, m).unwrap();
            let count = (m - 1) * (n * n + n - 2) / 2;
            assert_eq!(s.deltas().len(), count);
            assert_eq!(s.equation_dim(), s.spec().dimension() - count);
        }
    }
}
