//! Symmetry residuals, distribution ranks, rank-drop loci and verdicts.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::Zero;
use rayon::prelude::*;

use crate::algebras::AlgebraSpec;
use crate::error::{Error, Result};
use crate::jet::{CoordId, JetSpec};
use crate::linalg;
use crate::numfield::{rank_mod, UPoly};
use crate::poly::{Point, Poly, Rational};
use crate::ratexpr::RatExpr;
use crate::sample::{point_hash, Sampler};
use crate::sqfree::{split_by_contents, squarefree_factors};
use crate::vfield::{ProlongationCache, VectorField};

/// Consecutive failed draws tolerated before giving up on a sample.
pub const MAX_RESAMPLES: usize = 100;

/// Default number of random points per rank computation.
pub const DEFAULT_SAMPLES: usize = 5;

/// Explicit solved form of a system in one chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parametrization {
    free: Vec<CoordId>,
    solved: BTreeMap<CoordId, RatExpr>,
    excluded: Vec<Poly>,
}

impl Parametrization {
    /// `solved` maps coordinates to expressions in the remaining (free)
    /// coordinates; `excluded` lists polynomials that must not vanish.
    /// Denominators of solved expressions are excluded automatically.
    pub fn new(spec: &JetSpec, solved: BTreeMap<CoordId, RatExpr>, mut excluded: Vec<Poly>) -> Result<Self> {
        for (c, e) in &solved {
            if !spec.contains(c) {
                return Err(Error::IndexOutOfRange(c.to_string()));
            }
            if let Some(bad) = e.vars().into_iter().find(|v| solved.contains_key(v) || !spec.contains(v)) {
                return Err(Error::InvalidShape(format!("solved value of {c} mentions {bad}")));
            }
            if !e.den().is_constant() && !excluded.contains(e.den()) {
                excluded.push(e.den().clone());
            }
        }
        let free = spec.coords().into_iter().filter(|c| !solved.contains_key(c)).collect();
        Ok(Parametrization { free, solved, excluded })
    }

    pub fn free(&self) -> &[CoordId] {
        &self.free
    }

    pub fn solved(&self) -> &BTreeMap<CoordId, RatExpr> {
        &self.solved
    }

    pub fn excluded(&self) -> &[Poly] {
        &self.excluded
    }

    pub fn bindings(&self) -> HashMap<CoordId, RatExpr> {
        self.solved.iter().map(|(c, e)| (*c, e.clone())).collect()
    }

    /// Restriction of `e` to the chart.
    pub fn restrict(&self, e: &RatExpr) -> Result<RatExpr> {
        e.substitute(&self.bindings())
    }

    /// Random point of the chart: free values drawn, solved values computed.
    pub fn sample_point(&self, sampler: &mut Sampler) -> Result<Point> {
        'draw: for _ in 0..MAX_RESAMPLES {
            let mut p = sampler.point(self.free.iter().copied());
            for ex in &self.excluded {
                if ex.eval(&p)?.is_zero() {
                    continue 'draw;
                }
            }
            let mut vals = Vec::with_capacity(self.solved.len());
            for (c, e) in &self.solved {
                match e.evaluate(&p) {
                    Ok(v) => vals.push((*c, v)),
                    Err(Error::EvaluationPole) => continue 'draw,
                    Err(e) => return Err(e),
                }
            }
            p.extend(vals);
            return Ok(p);
        }
        Err(Error::PersistentPole(0))
    }
}

/// `Δ_1 = … = Δ_q = 0` on `J^r`.
#[derive(Clone, Debug)]
pub struct PdeSystem {
    spec: JetSpec,
    deltas: Vec<RatExpr>,
    name: Option<String>,
    param: Option<Parametrization>,
}

impl PdeSystem {
    pub fn new(spec: JetSpec, deltas: Vec<RatExpr>) -> Result<Self> {
        if deltas.is_empty() {
            return Err(Error::InvalidShape("a system needs at least one equation".into()));
        }
        for d in &deltas {
            if d.is_zero() {
                return Err(Error::ZeroPolynomial);
            }
            if let Some(c) = d.vars().into_iter().find(|c| !spec.contains(c)) {
                return Err(Error::IndexOutOfRange(format!("{c} outside {spec:?}")));
            }
        }
        Ok(PdeSystem { spec, deltas, name: None, param: None })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// Attaches a chart; every equation must restrict to zero.
    pub fn with_param(mut self, param: Parametrization) -> Result<Self> {
        for (i, d) in self.deltas.iter().enumerate() {
            if !param.restrict(d)?.is_zero() {
                return Err(Error::InvalidShape(format!("equation {} does not vanish on the chart", i + 1)));
            }
        }
        self.param = Some(param);
        Ok(self)
    }

    pub fn spec(&self) -> &JetSpec {
        &self.spec
    }

    pub fn deltas(&self) -> &[RatExpr] {
        &self.deltas
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn param(&self) -> Option<&Parametrization> {
        self.param.as_ref()
    }

    /// `dim J^r − q`, assuming independent equations.
    pub fn equation_dim(&self) -> usize {
        self.spec.dimension() - self.deltas.len()
    }

    /// Rank of the Jacobian of the equations at a random chart point.
    pub fn jacobian_rank(&self, seed: u64) -> Result<usize> {
        let param = self.param.as_ref().ok_or(Error::MissingParametrization)?;
        let p = param.sample_point(&mut Sampler::new(seed, 0))?;
        let coords = self.spec.coords();
        let mut rows = Vec::new();
        for d in &self.deltas {
            let row = coords.iter().map(|&c| d.differentiate(c).evaluate(&p)).collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(linalg::rank(&rows))
    }
}

fn check_shape(alg: &AlgebraSpec, spec: &JetSpec) -> Result<()> {
    if alg.n() != spec.n || alg.m() != spec.m {
        return Err(Error::InvalidShape(format!(
            "algebra over n={}, m={} used with a system over n={}, m={}",
            alg.n(),
            alg.m(),
            spec.n,
            spec.m
        )));
    }
    Ok(())
}

/// `Ξ^(r)(Δ_i)` for each equation, off-shell.
pub fn symmetry_residual(sys: &PdeSystem, v: &VectorField) -> Result<Vec<RatExpr>> {
    if v.n() != sys.spec.n || v.m() != sys.spec.m {
        return Err(Error::InvalidShape("field and system over different bases".into()));
    }
    let p = ProlongationCache::global().get(v, sys.spec.r)?;
    sys.deltas.iter().map(|d| p.apply(d)).collect()
}

/// Whether `v` is a point symmetry of the system.
///
/// Uses the chart when present. A single equation without a chart is
/// handled exactly: the residual must be divisible by the squarefree part
/// of the equation.
pub fn is_admitted(sys: &PdeSystem, v: &VectorField) -> Result<bool> {
    let res = symmetry_residual(sys, v)?;
    if let Some(param) = &sys.param {
        for r in &res {
            if !param.restrict(r)?.is_zero() {
                return Ok(false);
            }
        }
        return Ok(true);
    }
    if sys.deltas.len() != 1 {
        return Err(Error::MissingParametrization);
    }
    let radical = squarefree_factors(sys.deltas[0].num())?.into_iter().fold(Poly::one(), |acc, (f, _)| &acc * &f);
    Ok(res[0].is_zero() || res[0].num().exact_div(&radical).is_some())
}

/// Rows are generators, columns the coordinates of `J^r` in canonical order.
pub fn distribution_matrix(alg: &AlgebraSpec, r: usize) -> Result<Vec<Vec<RatExpr>>> {
    let spec = JetSpec::new(alg.n(), alg.m(), r)?;
    let coords = spec.coords();
    alg.generators()
        .iter()
        .map(|g| {
            let p = ProlongationCache::global().get(g, r)?;
            Ok(coords.iter().map(|c| p.coeff(*c).cloned().unwrap_or_else(RatExpr::zero)).collect())
        })
        .collect()
}

/// Rank at one sampled point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleRank {
    pub seed_index: usize,
    pub point_hash: u64,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankReport {
    pub generic_rank: usize,
    pub on_manifold_rank: Option<usize>,
    pub samples: usize,
    pub seed: u64,
    pub per_sample: Vec<SampleRank>,
    pub on_manifold_per_sample: Vec<SampleRank>,
    pub jet_dim: usize,
    pub algebra_dim: usize,
}

fn evaluate_matrix(m: &[Vec<RatExpr>], p: &Point) -> Result<Vec<Vec<Rational>>> {
    m.iter().map(|row| row.iter().map(|e| e.evaluate(p)).collect()).collect()
}

/// Rank of `m` at a point drawn by `draw`, redrawing on poles.
fn rank_at_sample<F>(m: &[Vec<RatExpr>], k: usize, seed: u64, mut draw: F) -> Result<SampleRank>
where
    F: FnMut(&mut Sampler) -> Result<Point>,
{
    let mut s = Sampler::new(seed, k as u64);
    for _ in 0..MAX_RESAMPLES {
        let p = draw(&mut s)?;
        match evaluate_matrix(m, &p) {
            Ok(vals) => return Ok(SampleRank { seed_index: k, point_hash: point_hash(&p), rank: linalg::rank(&vals) }),
            Err(Error::EvaluationPole) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::PersistentPole(k))
}

fn max_rank(s: &[SampleRank]) -> usize {
    s.iter().map(|s| s.rank).max().unwrap_or(0)
}

fn generic_samples(m: &[Vec<RatExpr>], spec: &JetSpec, samples: usize, seed: u64) -> Result<Vec<SampleRank>> {
    let coords = spec.coords();
    (0..samples).into_par_iter().map(|k| rank_at_sample(m, k, seed, |s| Ok(s.point(coords.iter().copied())))).collect()
}

/// Maximum exact rank over `samples` random rational points of `J^r`.
pub fn generic_rank(alg: &AlgebraSpec, r: usize, samples: usize, seed: u64) -> Result<RankReport> {
    let spec = JetSpec::new(alg.n(), alg.m(), r)?;
    let m = distribution_matrix(alg, r)?;
    let per_sample = generic_samples(&m, &spec, samples.max(1), seed)?;
    Ok(RankReport {
        generic_rank: max_rank(&per_sample),
        on_manifold_rank: None,
        samples: samples.max(1),
        seed,
        per_sample,
        on_manifold_per_sample: Vec::new(),
        jet_dim: spec.dimension(),
        algebra_dim: alg.dim(),
    })
}

/// Generic rank together with the rank on the equation manifold.
///
/// Chart points come from the system's parametrization. A single equation
/// without a chart is sampled at algebraic points: all coordinates but one
/// are drawn at random and the last is a root of the resulting univariate
/// polynomial, with ranks computed in the corresponding number field.
pub fn rank_on_manifold(alg: &AlgebraSpec, sys: &PdeSystem, samples: usize, seed: u64) -> Result<RankReport> {
    check_shape(alg, &sys.spec)?;
    let samples = samples.max(1);
    let mut report = generic_rank(alg, sys.spec.r, samples, seed)?;
    let m = distribution_matrix(alg, sys.spec.r)?;
    let on: Vec<SampleRank> = if let Some(param) = &sys.param {
        (0..samples)
            .into_par_iter()
            .map(|k| rank_at_sample(&m, k, seed, |s| param.sample_point(s)))
            .collect::<Result<_>>()?
    } else if sys.deltas.len() == 1 {
        (0..samples)
            .into_par_iter()
            .map(|k| hypersurface_rank(&m, sys.deltas[0].num(), &sys.spec, k, seed))
            .collect::<Result<_>>()?
    } else {
        return Err(Error::MissingParametrization);
    };
    report.on_manifold_rank = Some(max_rank(&on));
    report.on_manifold_per_sample = on;
    Ok(report)
}

/// Point of a hypersurface over `ℚ[t]/(f)`: rational values for every
/// coordinate except `var`, which is a root of `f`.
struct AlgebraicPoint {
    point: Point,
    var: CoordId,
    f: UPoly,
}

fn algebraic_point(h: &Poly, spec: &JetSpec, sampler: &mut Sampler) -> Result<AlgebraicPoint> {
    let vars = h.vars();
    let var = vars
        .iter()
        .copied()
        .min_by_key(|&c| (h.degree_in(c), std::cmp::Reverse(c)))
        .ok_or_else(|| Error::InvalidShape("constant hypersurface".into()))?;
    let deg = h.degree_in(var) as usize;
    for _ in 0..MAX_RESAMPLES {
        let point = sampler.point(spec.coords().into_iter().filter(|&c| c != var));
        let Some(f) = UPoly::from_poly(&h.eval_partial(&point), var) else { continue };
        if f.degree() == Some(deg) && f.is_squarefree() {
            return Ok(AlgebraicPoint { point, var, f });
        }
    }
    Err(Error::PersistentPole(0))
}

/// Entry of the matrix as an element of `ℚ[t]/(f)`; `None` at a pole.
fn entry_mod(e: &RatExpr, at: &AlgebraicPoint) -> Option<UPoly> {
    let num = UPoly::from_poly(&e.num().eval_partial(&at.point), at.var)?;
    if e.den().is_constant() {
        let c = e.den().constant_value()?;
        return Some(num.mul(&UPoly::constant(c.recip())));
    }
    let den = UPoly::from_poly(&e.den().eval_partial(&at.point), at.var)?;
    if den.is_zero() {
        return None;
    }
    let (g, inv) = den.gcd_ext(&at.f);
    if g.degree() != Some(0) {
        return None;
    }
    Some(num.mul(&inv).rem(&at.f))
}

fn hypersurface_rank(m: &[Vec<RatExpr>], h: &Poly, spec: &JetSpec, k: usize, seed: u64) -> Result<SampleRank> {
    let mut s = Sampler::new(seed, k as u64);
    'draw: for _ in 0..MAX_RESAMPLES {
        let at = algebraic_point(h, spec, &mut s)?;
        let mut rows = Vec::with_capacity(m.len());
        for row in m {
            let mut out = Vec::with_capacity(row.len());
            for e in row {
                match entry_mod(e, &at) {
                    Some(v) => out.push(v),
                    None => continue 'draw,
                }
            }
            rows.push(out);
        }
        let mut tagged = at.point.clone();
        tagged.insert(at.var, Rational::zero());
        let hash = point_hash(&tagged) ^ at.f.coeffs().iter().fold(0u64, |a, c| a.rotate_left(7) ^ c.numer().bits());
        return Ok(SampleRank { seed_index: k, point_hash: hash, rank: rank_mod(&rows, &at.f) });
    }
    Err(Error::PersistentPole(k))
}

/// Settings for locus extraction.
#[derive(Clone, Debug)]
pub struct LocusOptions {
    /// Size guard on intermediate entries, in terms.
    pub max_terms: usize,
    /// Points per candidate factor when confirming a rank drop.
    pub samples: usize,
    pub seed: u64,
}

impl Default for LocusOptions {
    fn default() -> Self {
        LocusOptions { max_terms: 20_000, samples: 3, seed: 0 }
    }
}

/// A confirmed component of the rank-drop locus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocusFactor {
    pub factor: Poly,
    /// Largest rank seen at sampled points of the factor's zero set.
    pub rank_on: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Locus {
    pub generic_rank: usize,
    pub factors: Vec<LocusFactor>,
    /// Candidate factors of the final pivot on which the rank stays generic.
    pub rejected: Vec<Poly>,
}

/// Hypersurfaces on which the distribution rank falls below generic.
///
/// Symbolic fraction-free elimination yields a maximal nonvanishing minor;
/// its squarefree factors, split along variable contents, are the
/// candidates, and each is kept only if the exact rank at sampled points
/// of its zero set is strictly below the generic rank.
pub fn rank_drop_locus(alg: &AlgebraSpec, r: usize, opts: &LocusOptions) -> Result<Locus> {
    let spec = JetSpec::new(alg.n(), alg.m(), r)?;
    let m = distribution_matrix(alg, r)?;
    let poly_rows: Vec<Vec<Poly>> = m
        .iter()
        .map(|row| {
            let common = row.iter().fold(Poly::one(), |acc, e| crate::gcd::lcm(&acc, e.den()));
            row.iter().map(|e| e.num() * &common.exact_div(e.den()).expect("lcm divisible")).collect()
        })
        .collect();
    let elim = linalg::symbolic_bareiss(poly_rows, opts.max_terms)?;
    let generic = elim.rank;
    let mut candidates: Vec<Poly> = Vec::new();
    if let Some(last) = elim.final_pivot().filter(|p| !p.is_constant()) {
        for (f, _) in squarefree_factors(last)? {
            for piece in split_by_contents(&f) {
                let piece = piece.primitive();
                if !candidates.contains(&piece) {
                    candidates.push(piece);
                }
            }
        }
    }
    let mut factors = Vec::new();
    let mut rejected = Vec::new();
    for c in candidates {
        let ranks = (0..opts.samples.max(1))
            .into_par_iter()
            .map(|k| hypersurface_rank(&m, &c, &spec, k, opts.seed))
            .collect::<Result<Vec<_>>>()?;
        let on = max_rank(&ranks);
        if on < generic {
            factors.push(LocusFactor { factor: c, rank_on: on });
        } else {
            rejected.push(c);
        }
    }
    Ok(Locus { generic_rank: generic, factors, rejected })
}

/// Maximum rank at the given points.
pub fn rank_at_points(alg: &AlgebraSpec, r: usize, points: &[Point]) -> Result<Vec<usize>> {
    let m = distribution_matrix(alg, r)?;
    points.iter().map(|p| Ok(linalg::rank(&evaluate_matrix(&m, p)?))).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Conclusion {
    Strong,
    Weak,
    Inconclusive,
    FailsNecessary,
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Conclusion::Strong => "strong",
            Conclusion::Weak => "weak",
            Conclusion::Inconclusive => "inconclusive",
            Conclusion::FailsNecessary => "fails-necessary",
        })
    }
}

/// How the off-manifold rank condition was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Evidence {
    /// Rank exceeded the equation dimension at every random sample.
    Sampled,
    /// Additionally, the only rank-drop component is the equation itself.
    LocusFactorization,
}

impl fmt::Display for Evidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Evidence::Sampled => "proved on samples",
            Evidence::LocusFactorization => "proved by locus factorization",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub equation_dim: usize,
    pub algebra_dim: usize,
    pub jet_dim: usize,
    pub necessary_strong: bool,
    pub necessary_weak: bool,
    /// Indices of generators that are not symmetries.
    pub not_admitted: Vec<usize>,
    pub generic_rank: Option<usize>,
    pub on_manifold_rank: Option<usize>,
    pub rank_off_manifold_exceeds_dim: bool,
    pub rank_on_manifold_equals_dim: bool,
    pub evidence: Option<Evidence>,
    pub conclusion: Conclusion,
}

/// Checks the dimension conditions, admittance of every generator and the
/// two rank conditions. With `locus`, the off-manifold condition is also
/// checked by extracting the rank-drop locus.
pub fn verdict(
    alg: &AlgebraSpec,
    sys: &PdeSystem,
    samples: usize,
    seed: u64,
    locus: Option<&LocusOptions>,
) -> Result<Verdict> {
    check_shape(alg, &sys.spec)?;
    let jet_dim = sys.spec.dimension();
    let equation_dim = sys.equation_dim();
    let algebra_dim = alg.dim();
    let mut v = Verdict {
        equation_dim,
        algebra_dim,
        jet_dim,
        necessary_strong: algebra_dim > equation_dim,
        necessary_weak: algebra_dim >= equation_dim,
        not_admitted: Vec::new(),
        generic_rank: None,
        on_manifold_rank: None,
        rank_off_manifold_exceeds_dim: false,
        rank_on_manifold_equals_dim: false,
        evidence: None,
        conclusion: Conclusion::FailsNecessary,
    };
    if !v.necessary_weak {
        return Ok(v);
    }
    let admitted = alg.generators().par_iter().map(|g| is_admitted(sys, g)).collect::<Result<Vec<_>>>()?;
    v.not_admitted = admitted.iter().enumerate().filter(|(_, a)| !**a).map(|(i, _)| i).collect();
    let report = rank_on_manifold(alg, sys, samples, seed)?;
    v.generic_rank = Some(report.generic_rank);
    v.on_manifold_rank = report.on_manifold_rank;
    v.rank_off_manifold_exceeds_dim = report.generic_rank > equation_dim;
    v.rank_on_manifold_equals_dim = report.on_manifold_rank == Some(equation_dim);
    if v.rank_off_manifold_exceeds_dim {
        v.evidence = Some(Evidence::Sampled);
        if let (Some(opts), [delta]) = (locus, sys.deltas.as_slice()) {
            let l = rank_drop_locus(alg, sys.spec.r, opts)?;
            let target = delta.num().primitive();
            if l.factors.len() == 1 && l.factors[0].factor == target {
                v.evidence = Some(Evidence::LocusFactorization);
            }
        }
    }
    let admitted_all = v.not_admitted.is_empty();
    v.conclusion =
        if admitted_all && v.rank_on_manifold_equals_dim && v.rank_off_manifold_exceeds_dim && v.necessary_strong {
            Conclusion::Strong
        } else if admitted_all && v.rank_on_manifold_equals_dim {
            Conclusion::Weak
        } else {
            Conclusion::Inconclusive
        };
    Ok(v)
}

/// Coordinates mentioned anywhere in the system.
pub fn system_vars(sys: &PdeSystem) -> BTreeSet<CoordId> {
    sys.deltas.iter().flat_map(|d| d.vars()).collect()
}
