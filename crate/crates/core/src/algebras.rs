//! Affine and projective algebras of `ℝ^{n+m}` and closure checks.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::gcd::lcm;
use crate::jet::CoordId;
use crate::linalg;
use crate::poly::{Monomial, Poly, Rational};
use crate::ratexpr::RatExpr;
use crate::vfield::VectorField;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AlgebraKind {
    Affine,
    Projective,
    Custom,
}

impl fmt::Display for AlgebraKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlgebraKind::Affine => "affine",
            AlgebraKind::Projective => "projective",
            AlgebraKind::Custom => "custom",
        })
    }
}

/// A finite list of linearly independent generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraSpec {
    kind: AlgebraKind,
    n: usize,
    m: usize,
    generators: Vec<VectorField>,
}

/// Structure constants: `[g_i, g_j] = Σ_k c[k] g_k` for `i < j`.
pub type StructureConstants = BTreeMap<(usize, usize), Vec<Rational>>;

fn base_coords(n: usize, m: usize) -> Vec<CoordId> {
    (1..=n).map(CoordId::x).chain((1..=m).map(CoordId::u)).collect()
}

fn check_counts(n: usize, m: usize) -> Result<()> {
    if n == 0 || m == 0 || n > 255 || m > u16::MAX as usize {
        return Err(Error::InvalidSpec(format!("need n, m ≥ 1, got n={n}, m={m}")));
    }
    Ok(())
}

/// Translations, then `a ∂/∂b` with target `b` outer and source `a` inner.
pub fn affine_generators(n: usize, m: usize) -> Result<AlgebraSpec> {
    check_counts(n, m)?;
    let coords = base_coords(n, m);
    let mut gens = Vec::with_capacity(coords.len() * (coords.len() + 1));
    for &c in &coords {
        gens.push(VectorField::single(n, m, c, RatExpr::one())?);
    }
    for &target in &coords {
        for &source in &coords {
            gens.push(VectorField::single(n, m, target, RatExpr::var(source))?);
        }
    }
    Ok(AlgebraSpec { kind: AlgebraKind::Affine, n, m, generators: gens })
}

/// Affine generators followed by `a (Σ x_i ∂/∂x_i + Σ u_α ∂/∂u_α)`.
pub fn projective_generators(n: usize, m: usize) -> Result<AlgebraSpec> {
    let mut alg = affine_generators(n, m)?;
    let coords = base_coords(n, m);
    for &a in &coords {
        let av = RatExpr::var(a);
        let xi = (1..=n).map(|i| &av * &RatExpr::var(CoordId::x(i))).collect();
        let eta = (1..=m).map(|b| &av * &RatExpr::var(CoordId::u(b))).collect();
        alg.generators.push(VectorField::new(n, m, xi, eta)?);
    }
    alg.kind = AlgebraKind::Projective;
    Ok(alg)
}

impl AlgebraSpec {
    /// A user-supplied algebra; generators must be independent over ℚ.
    pub fn custom(n: usize, m: usize, generators: Vec<VectorField>) -> Result<AlgebraSpec> {
        check_counts(n, m)?;
        for g in &generators {
            if g.n() != n || g.m() != m {
                return Err(Error::InvalidShape(format!("generator {g} not over n={n}, m={m}")));
            }
        }
        let (rows, _) = coefficient_matrix(&generators, None);
        if linalg::rank(&rows) < generators.len() {
            return Err(Error::DependentGenerators);
        }
        Ok(AlgebraSpec { kind: AlgebraKind::Custom, n, m, generators })
    }

    pub fn kind(&self) -> AlgebraKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn generators(&self) -> &[VectorField] {
        &self.generators
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    /// Coefficients expressing `v` in the span of the generators.
    pub fn expand(&self, v: &VectorField) -> Option<Vec<Rational>> {
        let (rows, rhs) = coefficient_matrix(&self.generators, Some(v));
        linalg::solve(&rows, &rhs)
    }
}

/// Linear system `Σ c_k g_k = target` over the basis of (component,
/// monomial) pairs, after clearing a common denominator. Without a target
/// the right-hand side is zero.
fn coefficient_matrix(gens: &[VectorField], target: Option<&VectorField>) -> (Vec<Vec<Rational>>, Vec<Rational>) {
    let all: Vec<&VectorField> = gens.iter().chain(target).collect();
    let mut common = Poly::one();
    for f in &all {
        for (_, e) in f.components() {
            if !e.den().is_one() {
                common = lcm(&common, e.den());
            }
        }
    }
    let mut index: HashMap<(usize, Monomial), usize> = HashMap::new();
    let mut cols: Vec<Vec<(usize, Rational)>> = Vec::with_capacity(all.len());
    for f in &all {
        let mut col = Vec::new();
        for (slot, (_, e)) in f.components().enumerate() {
            if e.is_zero() {
                continue;
            }
            let scaled = e.num() * &common.exact_div(e.den()).expect("lcm divisible");
            for (mono, q) in scaled.terms() {
                let next = index.len();
                let row = *index.entry((slot, mono.clone())).or_insert(next);
                col.push((row, q.clone()));
            }
        }
        cols.push(col);
    }
    let mut rows = vec![vec![Rational::zero(); gens.len()]; index.len()];
    let mut rhs = vec![Rational::zero(); index.len()];
    for (k, col) in cols.into_iter().enumerate() {
        for (row, q) in col {
            if k < gens.len() {
                rows[row][k] = q;
            } else {
                rhs[row] = q;
            }
        }
    }
    (rows, rhs)
}

/// Expresses every bracket `[g_i, g_j]`, `i < j`, in the generators.
/// Fails with `NotClosed(i, j)` at the first pair leaving the span.
pub fn verify_closure(a: &AlgebraSpec) -> Result<StructureConstants> {
    let mut out = BTreeMap::new();
    let g = &a.generators;
    for i in 0..g.len() {
        for j in i + 1..g.len() {
            let b = g[i].bracket(&g[j])?;
            let c = if b.is_zero() {
                vec![Rational::zero(); g.len()]
            } else {
                a.expand(&b).ok_or(Error::NotClosed(i, j))?
            };
            out.insert((i, j), c);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::algebra_dims;
    use crate::poly::int;

    fn x(i: usize) -> RatExpr {
        RatExpr::var(CoordId::x(i))
    }

    #[test]
    fn counts() {
        assert_eq!(affine_generators(2, 1).unwrap().dim(), 12);
        assert_eq!(affine_generators(2, 2).unwrap().dim(), 20);
        assert_eq!(projective_generators(2, 2).unwrap().dim(), 24);
        assert_eq!(projective_generators(3, 2).unwrap().dim(), 35);
        assert_eq!(projective_generators(2, 1).unwrap().dim(), 15);
        for n in 1..=4 {
            for m in 1..=3 {
                let (a, p) = algebra_dims(n, m);
                assert_eq!(affine_generators(n, m).unwrap().dim(), a);
                assert_eq!(projective_generators(n, m).unwrap().dim(), p);
            }
        }
    }

    #[test]
    fn order_for_one_one() {
        let a = affine_generators(1, 1).unwrap();
        let shown: Vec<String> = a.generators().iter().map(ToString::to_string).collect();
        assert_eq!(shown, ["x[1]: 1", "u[1]: 1", "x[1]: x[1]", "x[1]: u[1]", "u[1]: x[1]", "u[1]: u[1]"]);
    }

    #[test]
    fn affine_closure_and_example_bracket() {
        let a = affine_generators(1, 1).unwrap();
        let sc = verify_closure(&a).unwrap();
        // [x∂u, u∂x] = x∂x − u∂u
        let c = &sc[&(3, 4)];
        let want: Vec<Rational> = [0, 0, -1, 0, 0, 1].iter().map(|&v| int(v)).collect();
        assert_eq!(c, &want);
        for v in sc.values().flatten() {
            assert!(v.is_integer());
        }
    }

    #[test]
    fn projective_closure() {
        let sc = verify_closure(&projective_generators(2, 1).unwrap()).unwrap();
        assert!(sc.values().flatten().all(|v| v.is_integer()));
    }

    #[test]
    fn custom_not_closed() {
        let g1 = VectorField::single(1, 1, CoordId::x(1), RatExpr::one()).unwrap();
        let g2 = VectorField::single(1, 1, CoordId::x(1), &x(1) * &x(1)).unwrap();
        let alg = AlgebraSpec::custom(1, 1, vec![g1, g2]).unwrap();
        assert_eq!(verify_closure(&alg), Err(Error::NotClosed(0, 1)));
    }

    #[test]
    fn custom_dependence_detected() {
        let g1 = VectorField::single(1, 1, CoordId::x(1), x(1)).unwrap();
        let g2 = g1.scale(&int(3));
        assert_eq!(AlgebraSpec::custom(1, 1, vec![g1, g2]), Err(Error::DependentGenerators));
    }

    #[test]
    fn custom_with_rational_components() {
        let one = RatExpr::one();
        let inv = one.checked_div(&x(1)).unwrap();
        let g1 = VectorField::single(1, 1, CoordId::x(1), inv.clone()).unwrap();
        let g2 = VectorField::single(1, 1, CoordId::x(1), one).unwrap();
        let alg = AlgebraSpec::custom(1, 1, vec![g1, g2]).unwrap();
        assert_eq!(alg.dim(), 2);
        let target = VectorField::single(1, 1, CoordId::x(1), inv.scale(&int(5))).unwrap();
        assert_eq!(alg.expand(&target), Some(vec![int(5), int(0)]));
    }
}
