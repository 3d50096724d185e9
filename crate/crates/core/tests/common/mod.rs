//! Shared oracles and strategies for the integration tests.
#![allow(dead_code)]

use lierem_core::algebras::{affine_generators, projective_generators, AlgebraSpec};
use lierem_core::poly::int;
use lierem_core::vfield::{prolong, prolong_along, prolonged_bracket, VectorField};
use lierem_core::{CoordId, JetSpec, RatExpr};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

pub fn x(i: usize) -> RatExpr {
    RatExpr::var(CoordId::x(i))
}

pub fn u0(a: usize) -> RatExpr {
    RatExpr::var(CoordId::u(a))
}

pub fn u(a: usize, j: &[usize]) -> RatExpr {
    RatExpr::var(CoordId::d(a, j))
}

fn delta(a: usize, b: usize) -> RatExpr {
    RatExpr::int(i64::from(a == b))
}

/// Hand-written second prolongations of the four linear generator classes,
/// compared with the engine coefficient by coefficient. Returns one line
/// per mismatch.
pub fn displayed_prolongation_mismatches(n: usize, m: usize) -> Vec<String> {
    let sp = JetSpec::new(n, m, 2).unwrap();
    let mut bad = Vec::new();
    let mut check = |label: String, v: VectorField, want: &dyn Fn(CoordId) -> RatExpr| {
        let p = prolong(&v, 2).unwrap();
        for c in sp.coords() {
            let got = p.coeff(c).unwrap();
            let w = want(c);
            if got != &w {
                bad.push(format!("{label}: coefficient on {c} is {got}, expected {w}"));
            }
        }
    };
    let base = |v: &VectorField, c: CoordId| v.component(c).cloned().unwrap_or_else(RatExpr::zero);
    for i in 1..=n {
        // x_j ∂/∂x_i
        for j in 1..=n {
            let v = VectorField::single(n, m, CoordId::x(i), x(j)).unwrap();
            let vv = v.clone();
            check(format!("x{j} d/dx{i}"), v, &|c| match c {
                CoordId::D(g, jj) if jj.len() == 1 => {
                    let k = jj.to_vec()[0];
                    -&(&delta(j, k) * &u(g as usize, &[i]))
                }
                CoordId::D(g, jj) => {
                    let (k, l) = (jj.to_vec()[0], jj.to_vec()[1]);
                    let g = g as usize;
                    -&(&(&delta(j, l) * &u(g, &[i, k])) + &(&delta(j, k) * &u(g, &[i, l])))
                }
                _ => base(&vv, c),
            });
        }
        for beta in 1..=m {
            // u_β ∂/∂x_i
            let v = VectorField::single(n, m, CoordId::x(i), u0(beta)).unwrap();
            let vv = v.clone();
            check(format!("u{beta} d/dx{i}"), v, &|c| match c {
                CoordId::D(g, jj) if jj.len() == 1 => {
                    let k = jj.to_vec()[0];
                    -&(&u(g as usize, &[i]) * &u(beta, &[k]))
                }
                CoordId::D(g, jj) => {
                    let (k, l) = (jj.to_vec()[0], jj.to_vec()[1]);
                    let g = g as usize;
                    let t1 = &u(g, &[i]) * &u(beta, &[k, l]);
                    let t2 = &u(beta, &[k]) * &u(g, &[i, l]);
                    let t3 = &u(beta, &[l]) * &u(g, &[i, k]);
                    -&(&(&t1 + &t2) + &t3)
                }
                _ => base(&vv, c),
            });
            // x_i ∂/∂u_β
            let v = VectorField::single(n, m, CoordId::u(beta), x(i)).unwrap();
            let vv = v.clone();
            check(format!("x{i} d/du{beta}"), v, &|c| match c {
                CoordId::D(g, jj) if jj.len() == 1 => &delta(beta, g as usize) * &delta(i, jj.to_vec()[0]),
                CoordId::D(..) => RatExpr::zero(),
                _ => base(&vv, c),
            });
        }
    }
    for beta in 1..=m {
        for gamma in 1..=m {
            // u_γ ∂/∂u_β
            let v = VectorField::single(n, m, CoordId::u(beta), u0(gamma)).unwrap();
            let vv = v.clone();
            check(format!("u{gamma} d/du{beta}"), v, &|c| match c {
                CoordId::D(mu, jj) => &delta(beta, mu as usize) * &u(gamma, &jj.to_vec()),
                _ => base(&vv, c),
            });
        }
    }
    bad
}

/// Shapes of `ℝ³` and `ℝ⁴`.
pub fn small_shape() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![Just((2, 1)), Just((1, 2)), Just((3, 1)), Just((2, 2))]
}

pub fn algebra(n: usize, m: usize, projective: bool) -> AlgebraSpec {
    if projective {
        projective_generators(n, m).unwrap()
    } else {
        affine_generators(n, m).unwrap()
    }
}

/// A random combination of up to three generators with small integer
/// coefficients, together with its shape.
pub fn generator_combo() -> impl Strategy<Value = VectorField> {
    (small_shape(), any::<bool>())
        .prop_flat_map(|((n, m), proj)| {
            let dim = algebra(n, m, proj).dim();
            (Just((n, m, proj)), prop::collection::vec((0..dim, -3i64..=3), 1..=3))
        })
        .prop_map(|((n, m, proj), picks)| {
            let alg = algebra(n, m, proj);
            picks.iter().fold(VectorField::zero(n, m), |acc, &(k, c)| acc.add(&alg.generators()[k].scale(&int(c))))
        })
}

/// A generator pair from the same algebra plus an order `r ≤ 3`.
pub fn generator_pair() -> impl Strategy<Value = (VectorField, VectorField, usize)> {
    (small_shape(), any::<bool>())
        .prop_flat_map(|((n, m), proj)| {
            let dim = algebra(n, m, proj).dim();
            (Just((n, m, proj)), 0..dim, 0..dim, 1usize..=3)
        })
        .prop_map(|((n, m, proj), a, b, r)| {
            let alg = algebra(n, m, proj);
            (alg.generators()[a].clone(), alg.generators()[b].clone(), r)
        })
}

pub fn well_defined(v: &VectorField, alpha_seed: usize, path: &[usize]) -> Result<(), TestCaseError> {
    let n = v.n();
    let alpha = alpha_seed % v.m() + 1;
    let path: Vec<usize> = path.iter().map(|j| j % n + 1).collect();
    let direct = prolong_along(v, alpha, &path).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let p = prolong(v, path.len()).unwrap();
    let c = CoordId::d(alpha, &path);
    prop_assert_eq!(&direct, p.coeff(c).unwrap(), "path {:?}", path);
    let mut rev = path.clone();
    rev.reverse();
    prop_assert_eq!(direct, prolong_along(v, alpha, &rev).unwrap());
    Ok(())
}

pub fn linear(a: &VectorField, b: &VectorField, c1: i64, c2: i64, r: usize) -> Result<(), TestCaseError> {
    let combo = a.scale(&int(c1)).add(&b.scale(&int(c2)));
    let pc = prolong(&combo, r).unwrap();
    let pa = prolong(a, r).unwrap();
    let pb = prolong(b, r).unwrap();
    for (c, e) in pc.coeffs() {
        let want = &pa.coeff(c).unwrap().scale(&int(c1)) + &pb.coeff(c).unwrap().scale(&int(c2));
        prop_assert_eq!(e, &want, "coordinate {}", c);
    }
    Ok(())
}

pub fn morphism(a: &VectorField, b: &VectorField, r: usize) -> Result<(), TestCaseError> {
    let lhs = prolonged_bracket(&prolong(a, r).unwrap(), &prolong(b, r).unwrap()).unwrap();
    let rhs = prolong(&a.bracket(b).unwrap(), r).unwrap();
    for (c, e) in &lhs {
        prop_assert_eq!(e, rhs.coeff(*c).unwrap(), "coordinate {}", c);
    }
    Ok(())
}

/// Expressions over a few coordinates of `J²(ℝ³, 2)`, with quotients.
pub fn ratexpr() -> impl Strategy<Value = RatExpr> {
    let leaf = prop_oneof![
        (-4i64..=4).prop_map(RatExpr::int),
        prop_oneof![
            Just(CoordId::x(1)),
            Just(CoordId::x(2)),
            Just(CoordId::u(1)),
            Just(CoordId::d(1, &[1])),
            Just(CoordId::d(1, &[1, 2])),
        ]
        .prop_map(RatExpr::var),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| &a + &b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| &a - &b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| &a * &b),
            (inner.clone(), inner).prop_map(|(a, b)| if b.is_zero() { a } else { a.checked_div(&b).unwrap() }),
        ]
    })
}

pub fn ring_axioms(a: &RatExpr, b: &RatExpr, c: &RatExpr) -> Result<(), TestCaseError> {
    prop_assert_eq!(a + b, b + a);
    prop_assert_eq!(a * b, b * a);
    prop_assert_eq!(&(a + b) + c, a + &(b + c));
    prop_assert_eq!(&(a * b) * c, a * &(b * c));
    prop_assert_eq!(a * &(b + c), &(a * b) + &(a * c));
    let same = a.clone();
    prop_assert!((a - &same).is_zero());
    prop_assert_eq!(a * &RatExpr::one(), a.clone());
    prop_assert_eq!(a + &RatExpr::zero(), a.clone());
    if !b.is_zero() {
        prop_assert_eq!(&a.checked_div(b).unwrap() * b, a.clone());
    }
    Ok(())
}

pub fn derivation_law(a: &RatExpr, b: &RatExpr, v: &VectorField) -> Result<(), TestCaseError> {
    for c in [CoordId::x(1), CoordId::u(1), CoordId::d(1, &[1, 2])] {
        let lhs = (a * b).differentiate(c);
        let rhs = &(&a.differentiate(c) * b) + &(a * &b.differentiate(c));
        prop_assert_eq!(lhs, rhs);
    }
    let p = prolong(v, 2).unwrap();
    let lhs = p.apply(&(a * b)).unwrap();
    let rhs = &(a * &p.apply(b).unwrap()) + &(b * &p.apply(a).unwrap());
    prop_assert_eq!(lhs, rhs);
    Ok(())
}

/// Fields over `(n, m) = (2, 2)` for the derivation law (the expression
/// strategy uses `x[2]`, `u[1]` and `u[1;1,2]`).
pub fn field_22() -> impl Strategy<Value = VectorField> {
    let alg = projective_generators(2, 2).unwrap();
    let dim = alg.dim();
    (0..dim).prop_map(move |k| alg.generators()[k].clone())
}

/// Runs a property with a fixed seed outside the test harness.
pub fn run_property<S: Strategy>(
    cases: u32,
    seed: u8,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<u32, String> {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32]));
    runner.run(&strategy, test).map(|_| cases).map_err(|e| e.to_string())
}
