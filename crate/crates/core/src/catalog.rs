//! Named equations with their charts, expected ranks, and the surface
//! invariants `k`, `κ`.

use std::collections::BTreeMap;

use crate::algebras::AlgebraKind;
use crate::analysis::{Parametrization, PdeSystem};
use crate::error::{Error, Result};
use crate::jet::{CoordId, JetSpec};
use crate::poly::{Point, Poly, Rational};
use crate::ratexpr::RatExpr;
use crate::sample::Sampler;
use crate::syntax::parse_expr;

/// Reference values for a catalog equation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expected {
    /// Algebra that characterizes the equation.
    pub algebra: AlgebraKind,
    pub generic_rank: usize,
    pub on_manifold_rank: usize,
    pub equation_dim: usize,
    /// Algebras admitted as symmetries.
    pub admits: Vec<AlgebraKind>,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub system: PdeSystem,
    pub expected: Expected,
    /// Known inconsistencies in reference formulas, surfaced in reports.
    pub warnings: Vec<String>,
}

/// Stable catalog identifiers; `det_hessian(n)` takes any `n ≥ 2`.
pub const NAMES: [&str; 7] = ["ma2", "det_hessian(n)", "strong222", "strong322", "strong232", "mov3", "strong223"];

const MA2: &str = "u[1;1,1]*u[1;2,2] - u[1;1,2]^2";

const MOV: &str = "u[1;1,1]^3*u[1;2,2,2]^2 + u[1;2,2]^3*u[1;1,1,1]^2 \
    + 6*u[1;1,1]*u[1;1,2]*u[1;2,2]*u[1;1,1,1]*u[1;2,2,2] \
    - 6*u[1;1,2]*u[1;2,2]^2*u[1;1,1,1]*u[1;1,1,2] \
    - 6*u[1;1,1]*u[1;2,2]^2*u[1;1,1,1]*u[1;1,2,2] \
    - 6*u[1;1,1]^2*u[1;1,2]*u[1;1,2,2]*u[1;2,2,2] \
    - 6*u[1;1,1]^2*u[1;2,2]*u[1;1,1,2]*u[1;2,2,2] \
    - 8*u[1;1,2]^3*u[1;1,1,1]*u[1;2,2,2] \
    + 9*u[1;1,1]*u[1;2,2]^2*u[1;1,1,2]^2 \
    + 9*u[1;1,1]^2*u[1;2,2]*u[1;1,2,2]^2 \
    + 12*u[1;1,2]^2*u[1;2,2]*u[1;1,1,1]*u[1;1,2,2] \
    + 12*u[1;1,1]*u[1;1,2]^2*u[1;1,1,2]*u[1;2,2,2] \
    - 18*u[1;1,1]*u[1;1,2]*u[1;2,2]*u[1;1,1,2]*u[1;1,2,2]";

const STRONG222: [&str; 2] = ["u[1;1,1]*u[2;1,2] - u[1;1,2]*u[2;1,1]", "u[1;1,1]*u[2;2,2] - u[1;2,2]*u[2;1,1]"];

const STRONG322: [&str; 5] = [
    "u[1;1,1]*u[2;1,2] - u[1;1,2]*u[2;1,1]",
    "u[1;1,1]*u[2;1,3] - u[1;1,3]*u[2;1,1]",
    "u[1;1,1]*u[2;2,2] - u[1;2,2]*u[2;1,1]",
    "u[1;1,1]*u[2;2,3] - u[1;2,3]*u[2;1,1]",
    "u[1;1,1]*u[2;3,3] - u[1;3,3]*u[2;1,1]",
];

const STRONG232: [&str; 4] = [
    "u[1;1,1]*u[2;1,2] - u[1;1,2]*u[2;1,1]",
    "u[1;1,1]*u[2;2,2] - u[1;2,2]*u[2;1,1]",
    "u[2;1,1]*u[3;1,2] - u[2;1,2]*u[3;1,1]",
    "u[2;1,1]*u[3;2,2] - u[2;2,2]*u[3;1,1]",
];

const STRONG223: [&str; 2] = [
    "(u[1;2,2]*u[2;1,2] - u[1;1,2]*u[2;2,2])*((u[1;2,2]*u[2;1,1] - u[1;1,2]*u[2;1,2])^2 \
        - (u[1;1,1]*u[1;2,2] - u[1;1,2]^2)*(u[2;1,1]*u[2;2,2] - u[2;1,2]^2))*u[1;1,1,1] \
     + 3*(u[1;1,1]*u[2;1,2] - u[1;1,2]*u[2;1,1])*(u[1;1,2]*u[2;1,2] - u[1;2,2]*u[2;1,1]) \
        *(u[1;1,2]*u[2;2,2] - u[1;2,2]*u[2;1,2])*u[1;1,1,2] \
     + 3*(u[1;1,1]*u[2;1,2] - u[1;1,2]*u[2;1,1])^2*(u[1;2,2]*u[2;1,2] - u[1;1,2]*u[2;2,2])*u[1;1,2,2] \
     + (u[1;1,1]*u[2;1,2] - u[1;1,2]*u[2;1,1])^2*(u[1;1,1]*u[2;2,2] - u[1;1,2]*u[2;1,2])*u[1;2,2,2] \
     + (u[1;1,1]*u[1;2,2] - u[1;1,2]^2)*(u[1;2,2]*u[2;1,1] - u[1;1,1]*u[2;2,2]) \
        *(u[1;1,2]*u[2;2,2] - u[1;2,2]*u[2;1,2])*u[2;1,1,1] \
     + 3*(u[1;1,2]^2 - u[1;1,1]*u[1;2,2])*(u[1;1,2]*u[2;1,1] - u[1;1,1]*u[2;1,2]) \
        *(u[1;1,2]*u[2;2,2] - u[1;2,2]*u[2;1,2])*u[2;1,1,2] \
     + (u[1;1,2]^2 - u[1;1,1]*u[1;2,2])*(u[1;1,2]*u[2;1,1] - u[1;1,1]*u[2;1,2])^2*u[2;2,2,2]",
    "3*(u[1;2,2]*u[2;1,2] - u[1;1,2]*u[2;2,2])^2*(u[2;1,1]*u[2;2,2] - u[2;1,2]^2)*u[1;1,1,2] \
     + 3*(u[1;1,1]*u[2;2,2] - u[1;2,2]*u[2;1,1])*(u[1;2,2]*u[2;1,2] - u[1;1,2]*u[2;2,2]) \
        *(u[2;1,1]*u[2;2,2] - u[2;1,2]^2)*u[1;1,2,2] \
     + (u[2;1,1]*u[2;2,2] - u[2;1,2]^2)*((u[1;1,1]*u[2;2,2] - u[1;2,2]*u[2;1,1])^2 \
        + (u[1;1,2]*u[2;2,2] - u[1;2,2]*u[2;1,2])*(u[1;1,2]*u[2;1,1] - u[1;1,1]*u[2;1,2]))*u[1;2,2,2] \
     + (u[1;2,2]*u[2;1,2] - u[1;1,2]*u[2;2,2])^3*u[2;1,1,1] \
     + 3*(u[1;1,2]*u[2;1,2] - u[1;2,2]*u[2;1,1])*(u[1;2,2]*u[2;1,2] - u[1;1,2]*u[2;2,2])^2*u[2;1,1,2] \
     + 3*(u[1;2,2]*u[2;1,2] - u[1;1,2]*u[2;2,2])*((u[1;2,2]*u[2;1,1] - u[1;1,2]*u[2;1,2])^2 \
        - (u[1;1,1]*u[1;2,2] - u[1;1,2]^2)*(u[2;1,1]*u[2;2,2] - u[2;1,2]^2))*u[2;1,2,2] \
     + ((u[1;1,2]*u[2;1,2] - u[1;2,2]*u[2;1,1])^3 \
        - (u[1;1,1]*u[2;2,2] + u[1;1,2]*u[2;1,2] - 2*u[1;2,2]*u[2;1,1]) \
        *(u[1;1,1]*u[1;2,2] - u[1;1,2]^2)*(u[2;1,1]*u[2;2,2] - u[2;1,2]^2))*u[2;2,2,2]",
];

/// `W = 1 + Σ u_{α,i}² + (u_{1,1}u_{2,2} + u_{1,2}u_{2,1})²`.
const GM_W: &str = "1 + u[1;1]^2 + u[1;2]^2 + u[2;1]^2 + u[2;2]^2 + (u[1;1]*u[2;2] + u[1;2]*u[2;1])^2";

const GM_K_NUM: &str = "4*(u[1;1,1]*u[2;1,2] - u[1;1,2]*u[2;1,1])*(u[1;1,2]*u[2;2,2] - u[1;2,2]*u[2;1,2]) \
    - (u[1;1,1]*u[2;2,2] - u[1;2,2]*u[2;1,1])^2";

const GM_KAPPA_NUM: &str = "(1 + u[1;1]^2 + u[2;1]^2)*(u[1;1,2]*u[2;2,2] - u[1;2,2]*u[2;1,2]) \
    + (1 + u[1;2]^2 + u[2;2]^2)*(u[1;1,1]*u[2;1,2] - u[1;1,2]*u[2;1,1]) \
    - (u[1;1]*u[1;2] - u[2;1]*u[2;2])*(u[1;1,1]*u[2;2,2] - u[1;2,2]*u[2;1,1])";

fn spec(n: usize, m: usize, r: usize) -> JetSpec {
    JetSpec::new(n, m, r).expect("catalog specs are valid")
}

fn parse_all(src: &[&str], sp: &JetSpec) -> Vec<RatExpr> {
    src.iter().map(|s| parse_expr(s, sp).expect("catalog transcription parses")).collect()
}

/// `c = −b/a` for `e = a·c + b` linear in `c`.
fn solve_linear(e: &Poly, c: CoordId) -> Result<RatExpr> {
    let cs = e.coefficients_in(c);
    if cs.len() != 2 {
        return Err(Error::InvalidShape(format!("equation is not linear in {c}")));
    }
    RatExpr::from(-&cs[0]).checked_div(&RatExpr::from(cs[1].clone()))
}

fn det(m: &[Vec<RatExpr>]) -> RatExpr {
    // cofactor expansion along the first row; sizes here are tiny
    match m.len() {
        0 => RatExpr::one(),
        1 => m[0][0].clone(),
        n => {
            let mut acc = RatExpr::zero();
            for j in 0..n {
                let minor: Vec<Vec<RatExpr>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, e)| e.clone()).collect())
                    .collect();
                let t = &m[0][j] * &det(&minor);
                acc = if j % 2 == 0 { &acc + &t } else { &acc - &t };
            }
            acc
        }
    }
}

/// `det(u_{1,ij})` on `J²(ℝ^{n+1}, n)`.
pub fn hessian_determinant(n: usize) -> Result<RatExpr> {
    if n < 2 {
        return Err(Error::InvalidShape(format!("det_hessian needs n >= 2, got {n}")));
    }
    let h: Vec<Vec<RatExpr>> =
        (1..=n).map(|i| (1..=n).map(|j| RatExpr::var(CoordId::d(1, &[i, j]))).collect()).collect();
    Ok(det(&h))
}

/// `Δ_{α,β;i,j,p,q} = u_{α,ij} u_{β,pq} − u_{α,pq} u_{β,ij}`.
pub fn strongnm2_delta(alpha: usize, beta: usize, ij: [usize; 2], pq: [usize; 2]) -> RatExpr {
    let u = |a: usize, j: [usize; 2]| RatExpr::var(CoordId::d(a, &j));
    &(&u(alpha, ij) * &u(beta, pq)) - &(&u(alpha, pq) * &u(beta, ij))
}

/// Chart `u_{β,pq} = u_{β,11} u_{1,pq} / u_{1,11}` (β ≥ 2, (p,q) ≠ (1,1)).
fn strongnm2_chart(sp: &JetSpec) -> Result<Parametrization> {
    let u11 = RatExpr::var(CoordId::d(1, &[1, 1]));
    let mut solved = BTreeMap::new();
    for beta in 2..=sp.m {
        for p in 1..=sp.n {
            for q in p..=sp.n {
                if (p, q) == (1, 1) {
                    continue;
                }
                let num = &RatExpr::var(CoordId::d(beta, &[1, 1])) * &RatExpr::var(CoordId::d(1, &[p, q]));
                solved.insert(CoordId::d(beta, &[p, q]), num.checked_div(&u11)?);
            }
        }
    }
    Parametrization::new(sp, solved, vec![])
}

/// `(m−1)(n²+n−2)/2` equations `Δ_{α,α+1;1,1,p,q}`, `p ≤ q`, `(p,q) ≠ (1,1)`.
pub fn strongnm2_system(n: usize, m: usize) -> Result<PdeSystem> {
    if n < 2 || m < 2 {
        return Err(Error::InvalidShape(format!("hierarchy needs n, m >= 2, got n={n}, m={m}")));
    }
    let sp = JetSpec::new(n, m, 2)?;
    let mut deltas = Vec::new();
    for alpha in 1..m {
        for p in 1..=n {
            for q in p..=n {
                if (p, q) != (1, 1) {
                    deltas.push(strongnm2_delta(alpha, alpha + 1, [1, 1], [p, q]));
                }
            }
        }
    }
    PdeSystem::new(sp, deltas)?.with_name(format!("strong{n}{m}2")).with_param(strongnm2_chart(&sp)?)
}

/// Closed-form dimension `n² + 2n + 3m − 2 + mn(1−n)/2` quoted for the
/// hierarchy; it disagrees with `jet_dim − equations` and is only reported.
pub fn hierarchy_dim_formula(n: usize, m: usize) -> i64 {
    let (n, m) = (n as i64, m as i64);
    n * n + 2 * n + 3 * m - 2 + m * n * (1 - n) / 2
}

/// Notes on reference formulas for the hierarchy, as reported alongside it.
pub fn hierarchy_warnings(sys: &PdeSystem) -> Vec<String> {
    let (n, m) = (sys.spec().n, sys.spec().m);
    let mut w = Vec::new();
    let d = hierarchy_dim_formula(n, m);
    if d != sys.equation_dim() as i64 {
        w.push(format!(
            "closed-form dimension n^2+2n+3m-2+mn(1-n)/2 gives {d} for (n,m)=({n},{m}), \
             but jet_dim - equations = {}; using {}",
            sys.equation_dim(),
            sys.equation_dim()
        ));
    }
    w.push(
        "derived consequence is checked as u[a;i,j]*u[b;p,q] - u[a;p,q]*u[b;i,j]; \
         the variant with u[b+1;i,j] in the second product is not an identity"
            .to_string(),
    );
    w
}

fn nm2_entry(name: &str, n: usize, m: usize) -> Result<CatalogEntry> {
    let transcribed = match (n, m) {
        (2, 2) => &STRONG222[..],
        (3, 2) => &STRONG322[..],
        (2, 3) => &STRONG232[..],
        _ => unreachable!("only the named members are transcribed"),
    };
    let sp = spec(n, m, 2);
    let system = PdeSystem::new(sp, parse_all(transcribed, &sp))?.with_name(name).with_param(strongnm2_chart(&sp)?)?;
    let eq = system.equation_dim();
    let warnings = hierarchy_warnings(&system);
    Ok(CatalogEntry {
        name: name.to_string(),
        expected: Expected {
            algebra: AlgebraKind::Affine,
            generic_rank: sp.dimension(),
            on_manifold_rank: eq,
            equation_dim: eq,
            admits: vec![AlgebraKind::Affine, AlgebraKind::Projective],
        },
        system,
        warnings,
    })
}

/// The two equations of `strong223` solved for `u_{2,111}` (the second
/// equation has no `u_{1,111}` term), then `u_{1,111}`.
fn strong223_chart(sp: &JetSpec, deltas: &[RatExpr]) -> Result<Parametrization> {
    let c1 = CoordId::d(1, &[1, 1, 1]);
    let c2 = CoordId::d(2, &[1, 1, 1]);
    let v2 = solve_linear(deltas[1].num(), c2)?;
    let first = deltas[0].substitute(&[(c2, v2.clone())].into_iter().collect())?;
    let v1 = solve_linear(first.num(), c1)?;
    Parametrization::new(sp, BTreeMap::from([(c1, v1), (c2, v2)]), vec![])
}

/// Looks up a catalog equation by name.
pub fn get(name: &str) -> Result<CatalogEntry> {
    let unknown = || Error::UnknownName(name.to_string());
    match name {
        "ma2" => {
            let sp = spec(2, 1, 2);
            let d = parse_expr(MA2, &sp)?;
            let chart = Parametrization::new(
                &sp,
                BTreeMap::from([(CoordId::d(1, &[2, 2]), solve_linear(d.num(), CoordId::d(1, &[2, 2]))?)]),
                vec![],
            )?;
            Ok(CatalogEntry {
                name: name.into(),
                system: PdeSystem::new(sp, vec![d])?.with_name(name).with_param(chart)?,
                expected: Expected {
                    algebra: AlgebraKind::Affine,
                    generic_rank: 8,
                    on_manifold_rank: 7,
                    equation_dim: 7,
                    admits: vec![AlgebraKind::Affine, AlgebraKind::Projective],
                },
                warnings: Vec::new(),
            })
        }
        "strong222" => nm2_entry(name, 2, 2),
        "strong322" => nm2_entry(name, 3, 2),
        "strong232" => nm2_entry(name, 2, 3),
        "mov3" => {
            let sp = spec(2, 1, 3);
            let d = parse_expr(MOV, &sp)?;
            let terms = d.num().len();
            Ok(CatalogEntry {
                name: name.into(),
                system: PdeSystem::new(sp, vec![d])?.with_name(name),
                expected: Expected {
                    algebra: AlgebraKind::Affine,
                    generic_rank: 12,
                    on_manifold_rank: 11,
                    equation_dim: 11,
                    admits: vec![AlgebraKind::Affine, AlgebraKind::Projective],
                },
                warnings: vec![format!(
                    "MOV polynomial has {terms} terms, matching its 13-entry coefficient list; a 14-term count is inconsistent with it"
                )],
            })
        }
        "strong223" => {
            let sp = spec(2, 2, 3);
            let deltas = parse_all(&STRONG223, &sp);
            let chart = strong223_chart(&sp, &deltas)?;
            Ok(CatalogEntry {
                name: name.into(),
                system: PdeSystem::new(sp, deltas)?.with_name(name).with_param(chart)?,
                expected: Expected {
                    algebra: AlgebraKind::Projective,
                    generic_rank: 22,
                    on_manifold_rank: 20,
                    equation_dim: 20,
                    admits: vec![AlgebraKind::Projective],
                },
                warnings: Vec::new(),
            })
        }
        _ => {
            let n = name
                .strip_prefix("det_hessian")
                .map(|s| s.trim_start_matches(['(', '_']).trim_end_matches(')'))
                .and_then(|s| s.parse::<usize>().ok())
                .ok_or_else(unknown)?;
            det_hessian(n)
        }
    }
}

fn det_hessian(n: usize) -> Result<CatalogEntry> {
    let sp = JetSpec::new(n, 1, 2)?;
    let d = hessian_determinant(n)?;
    let last = CoordId::d(1, &[n, n]);
    let chart = Parametrization::new(&sp, BTreeMap::from([(last, solve_linear(d.num(), last)?)]), vec![])?;
    let jet = sp.dimension();
    let name = format!("det_hessian({n})");
    let mut warnings = Vec::new();
    let bound = (n + 1) * (n + 2);
    if bound != jet {
        warnings.push(format!(
            "maximal rank quoted as (n+1)(n+2) = {bound}, but the rank cannot exceed jet_dim = {jet}; reporting the sampled rank"
        ));
    }
    Ok(CatalogEntry {
        system: PdeSystem::new(sp, vec![d])?.with_name(&name).with_param(chart)?,
        name,
        expected: Expected {
            algebra: AlgebraKind::Affine,
            generic_rank: jet,
            on_manifold_rank: jet - 1,
            equation_dim: jet - 1,
            admits: vec![AlgebraKind::Affine],
        },
        warnings,
    })
}

/// Point of `J³(ℝ³, 2)` on the MOV equation: `u_{,12} = u_{,112} =
/// u_{,122} = 0`, `u_{,11} = a`, `u_{,22} = −a`, `u_{,111} = u_{,222} = t`,
/// all other coordinates drawn from `sampler`.
pub fn mov_point_family(a: &Rational, t: &Rational, sampler: &mut Sampler) -> Result<Point> {
    use num_traits::Zero;
    if a.is_zero() {
        return Err(Error::InvalidShape("mov_point_family needs a != 0".into()));
    }
    let fixed: [(&[usize], Rational); 7] = [
        (&[1, 2], Rational::zero()),
        (&[1, 1, 2], Rational::zero()),
        (&[1, 2, 2], Rational::zero()),
        (&[1, 1], a.clone()),
        (&[2, 2], -a.clone()),
        (&[1, 1, 1], t.clone()),
        (&[2, 2, 2], t.clone()),
    ];
    let mut p = sampler.point(spec(2, 1, 3).coords());
    for (j, v) in fixed {
        p.insert(CoordId::d(1, j), v);
    }
    Ok(p)
}

/// Numerators and denominators of `k` and `κ` on `J²(ℝ⁴, 2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceInvariants {
    pub k_num: RatExpr,
    pub k_den: RatExpr,
    pub kappa_num: RatExpr,
    pub kappa_den: RatExpr,
}

impl SurfaceInvariants {
    /// `(k, κ)` at a point.
    pub fn evaluate(&self, p: &Point) -> Result<(Rational, Rational)> {
        let k = self.k_num.evaluate(p)? / self.k_den.evaluate(p)?;
        let kappa = self.kappa_num.evaluate(p)? / self.kappa_den.evaluate(p)?;
        Ok((k, kappa))
    }
}

pub fn ganchev_milousheva() -> SurfaceInvariants {
    let sp = spec(2, 2, 2);
    let w = parse_expr(GM_W, &sp).expect("transcription parses");
    SurfaceInvariants {
        k_num: parse_expr(GM_K_NUM, &sp).expect("transcription parses"),
        k_den: w.pow(3),
        kappa_num: parse_expr(GM_KAPPA_NUM, &sp).expect("transcription parses"),
        kappa_den: w.pow(2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::int;
    use num_traits::Zero;

    fn u(a: usize, j: &[usize]) -> RatExpr {
        RatExpr::var(CoordId::d(a, j))
    }

    fn coeff_multiset(p: &Poly) -> Vec<i64> {
        let mut v: Vec<i64> = p.terms().iter().map(|(_, q)| i64::try_from(q.to_integer()).unwrap()).collect();
        v.sort();
        v
    }

    #[test]
    fn every_entry_builds_and_parametrizes() {
        for name in [
            "ma2",
            "det_hessian(2)",
            "det_hessian(3)",
            "det_hessian_4",
            "strong222",
            "strong322",
            "strong232",
            "mov3",
            "strong223",
        ] {
            let e = get(name).unwrap();
            if let Some(p) = e.system.param() {
                for d in e.system.deltas() {
                    assert!(p.restrict(d).unwrap().is_zero(), "{name}");
                }
            }
            assert_eq!(e.system.equation_dim(), e.expected.equation_dim, "{name}");
        }
        assert!(matches!(get("nope"), Err(Error::UnknownName(_))));
        assert!(matches!(get("det_hessian(1)"), Err(Error::InvalidShape(_))));
    }

    #[test]
    fn strong222_deltas() {
        let e = get("strong222").unwrap();
        let want = [
            &(&u(1, &[1, 1]) * &u(2, &[1, 2])) - &(&u(1, &[1, 2]) * &u(2, &[1, 1])),
            &(&u(1, &[1, 1]) * &u(2, &[2, 2])) - &(&u(1, &[2, 2]) * &u(2, &[1, 1])),
        ];
        assert_eq!(e.system.deltas(), &want[..]);
        assert_eq!(e.system.jacobian_rank(0).unwrap(), 2);
    }

    #[test]
    fn hierarchy_matches_transcriptions() {
        for (name, n, m) in [("strong222", 2, 2), ("strong322", 3, 2), ("strong232", 2, 3)] {
            let h = strongnm2_system(n, m).unwrap();
            assert_eq!(h.deltas(), get(name).unwrap().system.deltas(), "{name}");
        }
        assert!(matches!(strongnm2_system(1, 2), Err(Error::InvalidShape(_))));
    }

    #[test]
    fn hierarchy_counts() {
        for n in 2..=4 {
            for m in 2..=3 {
                let s = strongnm2_system(n, m).unwrap();
                assert_eq!(s.deltas().len(), (m - 1) * (n * n + n - 2) / 2);
                assert_eq!(s.equation_dim(), s.spec().dimension() - s.deltas().len());
            }
        }
        assert_eq!(hierarchy_dim_formula(2, 2), 10);
    }

    #[test]
    fn derived_consequence_holds_on_chart() {
        for (n, m) in [(2, 2), (3, 2), (2, 3), (3, 3)] {
            let s = strongnm2_system(n, m).unwrap();
            let p = s.param().unwrap();
            for a in 1..=m {
                for b in 1..=m {
                    for i in 1..=n {
                        for j in i..=n {
                            for q1 in 1..=n {
                                for q2 in q1..=n {
                                    let d = strongnm2_delta(a, b, [i, j], [q1, q2]);
                                    assert!(p.restrict(&d).unwrap().is_zero());
                                }
                            }
                        }
                    }
                }
            }
            // the β+1 variant is not a consequence
            if m >= 3 {
                let bad = &(&u(1, &[1, 2]) * &u(2, &[2, 2])) - &(&u(1, &[2, 2]) * &u(3, &[1, 2]));
                assert!(!p.restrict(&bad).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn mov_checksum() {
        let e = get("mov3").unwrap();
        let p = e.system.deltas()[0].num();
        assert_eq!(p.len(), 13);
        assert_eq!(coeff_multiset(p), vec![-18, -8, -6, -6, -6, -6, 1, 1, 6, 9, 9, 12, 12]);
        assert_eq!(p.total_degree(), 5);
    }

    #[test]
    fn mov_family_on_equation() {
        let mov = get("mov3").unwrap().system.deltas()[0].clone();
        let mut s = Sampler::new(0, 0);
        for (a, t) in [(1, 1), (2, 0), (1, 3), (-3, 5)] {
            let p = mov_point_family(&int(a), &int(t), &mut s).unwrap();
            assert!(mov.evaluate(&p).unwrap().is_zero());
        }
        assert!(mov_point_family(&int(0), &int(1), &mut s).is_err());
    }

    /// Independent transcription of strong223 built from named minors.
    fn strong223_by_hand() -> Vec<RatExpr> {
        let a = |i: &[usize]| u(1, i);
        let b = |i: &[usize]| u(2, i);
        let (a11, a12, a22) = (a(&[1, 1]), a(&[1, 2]), a(&[2, 2]));
        let (b11, b12, b22) = (b(&[1, 1]), b(&[1, 2]), b(&[2, 2]));
        let m = |p: &RatExpr, q: &RatExpr, r: &RatExpr, s: &RatExpr| &(p * q) - &(r * s);
        let ha = m(&a11, &a22, &a12, &a12);
        let hb = m(&b11, &b22, &b12, &b12);
        let p = m(&a22, &b12, &a12, &b22); // a22 b12 − a12 b22
        let q = m(&a11, &b12, &a12, &b11); // a11 b12 − a12 b11
        let r = m(&a22, &b11, &a12, &b12); // a22 b11 − a12 b12
        let s = m(&a11, &b22, &a22, &b11); // a11 b22 − a22 b11
        let t = m(&a11, &b22, &a12, &b12); // a11 b22 − a12 b12
        let three = RatExpr::int(3);
        let c = |e: RatExpr, j: &[usize], al: usize| &e * &u(al, j);
        let eq1 = [
            c(&p * &(&r.pow(2) - &(&ha * &hb)), &[1, 1, 1], 1),
            c(&(&three * &q) * &(&(-&r) * &(-&p)), &[1, 1, 2], 1),
            c(&(&three * &q.pow(2)) * &p, &[1, 2, 2], 1),
            c(&q.pow(2) * &t, &[2, 2, 2], 1),
            c(&(&ha * &(-&s)) * &(-&p), &[1, 1, 1], 2),
            c(&(&(&three * &(-&ha)) * &(-&q)) * &(-&p), &[1, 1, 2], 2),
            c(&(-&ha) * &q.pow(2), &[2, 2, 2], 2),
        ];
        let eq2 = [
            c(&(&three * &p.pow(2)) * &hb, &[1, 1, 2], 1),
            c(&(&(&three * &s) * &p) * &hb, &[1, 2, 2], 1),
            c(&hb * &(&s.pow(2) + &(&(-&p) * &(-&q))), &[2, 2, 2], 1),
            c(p.pow(3), &[1, 1, 1], 2),
            c(&(&three * &(-&r)) * &p.pow(2), &[1, 1, 2], 2),
            c(&(&three * &p) * &(&r.pow(2) - &(&ha * &hb)), &[1, 2, 2], 2),
            c(
                &(-&r).pow(3)
                    - &(&(&(&a11 * &b22) + &(&(&a12 * &b12) - &(&RatExpr::int(2) * &(&a22 * &b11)))) * &(&ha * &hb)),
                &[2, 2, 2],
                2,
            ),
        ];
        let sum = |v: &[RatExpr]| v.iter().fold(RatExpr::zero(), |acc, e| &acc + e);
        vec![sum(&eq1), sum(&eq2)]
    }

    #[test]
    fn strong223_transcriptions_agree() {
        let e = get("strong223").unwrap();
        assert_eq!(e.system.deltas(), &strong223_by_hand()[..]);
        assert_eq!(e.system.deltas().len(), 2);
        assert_eq!(e.system.spec(), &spec(2, 2, 3));
        assert_eq!(e.system.jacobian_rank(1).unwrap(), 2);
        assert!(e.system.deltas()[1].num().degree_in(CoordId::d(1, &[1, 1, 1])) == 0);
    }

    #[test]
    fn surface_invariants() {
        let gm = ganchev_milousheva();
        let chart = get("strong222").unwrap().system.param().unwrap().clone();
        assert!(chart.restrict(&gm.k_num).unwrap().is_zero());
        assert!(chart.restrict(&gm.kappa_num).unwrap().is_zero());

        let sp = spec(2, 2, 2);
        let mut flat: Point = sp.coords().into_iter().map(|c| (c, Rational::zero())).collect();
        let mut s = Sampler::new(3, 0);
        for c in sp.coords().into_iter().filter(|c| c.order() < 2) {
            flat.insert(c, s.rational());
        }
        assert_eq!(gm.evaluate(&flat).unwrap(), (Rational::zero(), Rational::zero()));

        let mut p: Point = sp.coords().into_iter().map(|c| (c, Rational::zero())).collect();
        p.insert(CoordId::d(1, &[1, 1]), int(1));
        p.insert(CoordId::d(2, &[2, 2]), int(1));
        assert_eq!(gm.k_num.evaluate(&p).unwrap(), int(-1));
    }
}
