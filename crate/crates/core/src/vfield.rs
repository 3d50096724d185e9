//! Point vector fields, the truncated total derivative and prolongation.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::jet::{sorted_indices, CoordId, JetSpec, MultiIndex};
use crate::poly::Rational;
use crate::ratexpr::RatExpr;

/// `Σ ξ_i ∂/∂x_i + Σ η_α ∂/∂u_α` with components in base coordinates only.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VectorField {
    n: usize,
    m: usize,
    xi: Vec<RatExpr>,
    eta: Vec<RatExpr>,
}

impl VectorField {
    pub fn new(n: usize, m: usize, xi: Vec<RatExpr>, eta: Vec<RatExpr>) -> Result<Self> {
        if xi.len() != n || eta.len() != m {
            return Err(Error::InvalidShape(format!(
                "expected {n} xi and {m} eta components, got {} and {}",
                xi.len(),
                eta.len()
            )));
        }
        for e in xi.iter().chain(&eta) {
            for c in e.vars() {
                if !c.is_base() {
                    return Err(Error::JetCoordinateInBase(c));
                }
                let ok = match c {
                    CoordId::X(i) => (i as usize) >= 1 && (i as usize) <= n,
                    CoordId::U(a) => (a as usize) >= 1 && (a as usize) <= m,
                    CoordId::D(..) => false,
                };
                if !ok {
                    return Err(Error::IndexOutOfRange(format!("{c} in a field over n={n}, m={m}")));
                }
            }
        }
        Ok(VectorField { n, m, xi, eta })
    }

    pub fn zero(n: usize, m: usize) -> Self {
        VectorField { n, m, xi: vec![RatExpr::zero(); n], eta: vec![RatExpr::zero(); m] }
    }

    /// `coeff · ∂/∂target` for a base coordinate `target`.
    pub fn single(n: usize, m: usize, target: CoordId, coeff: RatExpr) -> Result<Self> {
        let mut v = VectorField::zero(n, m);
        *v.component_mut(target)? = coeff;
        VectorField::new(n, m, v.xi, v.eta)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn xi(&self) -> &[RatExpr] {
        &self.xi
    }

    pub fn eta(&self) -> &[RatExpr] {
        &self.eta
    }

    /// Component on a base coordinate.
    pub fn component(&self, c: CoordId) -> Option<&RatExpr> {
        match c {
            CoordId::X(i) => self.xi.get((i as usize).checked_sub(1)?),
            CoordId::U(a) => self.eta.get((a as usize).checked_sub(1)?),
            CoordId::D(..) => None,
        }
    }

    fn component_mut(&mut self, c: CoordId) -> Result<&mut RatExpr> {
        let slot = match c {
            CoordId::X(i) => (i as usize).checked_sub(1).and_then(|k| self.xi.get_mut(k)),
            CoordId::U(a) => (a as usize).checked_sub(1).and_then(|k| self.eta.get_mut(k)),
            CoordId::D(..) => return Err(Error::JetCoordinateInBase(c)),
        };
        slot.ok_or_else(|| Error::IndexOutOfRange(c.to_string()))
    }

    /// `(coordinate, component)` pairs, `x` first.
    pub fn components(&self) -> impl Iterator<Item = (CoordId, &RatExpr)> {
        self.xi
            .iter()
            .enumerate()
            .map(|(i, e)| (CoordId::x(i + 1), e))
            .chain(self.eta.iter().enumerate().map(|(a, e)| (CoordId::u(a + 1), e)))
    }

    pub fn is_zero(&self) -> bool {
        self.components().all(|(_, e)| e.is_zero())
    }

    /// Derivative of `f` along this field.
    pub fn act(&self, f: &RatExpr) -> RatExpr {
        let mut acc = RatExpr::zero();
        for c in f.vars() {
            if let Some(k) = self.component(c) {
                if !k.is_zero() {
                    acc = &acc + &(k * &f.differentiate(c));
                }
            }
        }
        acc
    }

    pub fn scale(&self, q: &Rational) -> VectorField {
        VectorField {
            n: self.n,
            m: self.m,
            xi: self.xi.iter().map(|e| e.scale(q)).collect(),
            eta: self.eta.iter().map(|e| e.scale(q)).collect(),
        }
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        VectorField {
            n: self.n,
            m: self.m,
            xi: self.xi.iter().zip(&other.xi).map(|(a, b)| a + b).collect(),
            eta: self.eta.iter().zip(&other.eta).map(|(a, b)| a + b).collect(),
        }
    }

    /// Lie bracket `[self, other]`.
    pub fn bracket(&self, other: &VectorField) -> Result<VectorField> {
        if self.n != other.n || self.m != other.m {
            return Err(Error::InvalidShape("bracket of fields over different bases".into()));
        }
        let comp = |c: CoordId| -> RatExpr {
            let a = self.act(other.component(c).unwrap());
            let b = other.act(self.component(c).unwrap());
            &a - &b
        };
        let xi = (1..=self.n).map(|i| comp(CoordId::x(i))).collect();
        let eta = (1..=self.m).map(|a| comp(CoordId::u(a))).collect();
        Ok(VectorField { n: self.n, m: self.m, xi, eta })
    }
}

/// Prints in the field grammar, e.g. `x[1]: x[2]; u[1]: u[1]`.
impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, e) in self.components() {
            if e.is_zero() {
                continue;
            }
            if !first {
                f.write_str("; ")?;
            }
            first = false;
            write!(f, "{c}: {e}")?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Total derivative `D/Dx_i` on `J^r`.
///
/// Fails with `OrderOverflow` when `e` mentions a coordinate of order `r`.
pub fn total_derivative(e: &RatExpr, i: usize, spec: &JetSpec) -> Result<RatExpr> {
    if i == 0 || i > spec.n {
        return Err(Error::IndexOutOfRange(format!("x index {i} outside 1..={}", spec.n)));
    }
    let mut acc = RatExpr::zero();
    for c in e.vars() {
        if c.order() >= spec.r {
            return Err(Error::OrderOverflow(c));
        }
        let factor = match c {
            CoordId::X(j) if j as usize == i => None,
            CoordId::X(_) => continue,
            _ => Some(RatExpr::var(c.raised(i).expect("order below MAX_ORDER"))),
        };
        let de = e.differentiate(c);
        acc = match factor {
            None => &acc + &de,
            Some(f) => &acc + &(&f * &de),
        };
    }
    Ok(acc)
}

/// The lift of a base field to `J^r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProlongedField {
    base: VectorField,
    spec: JetSpec,
    coeffs: BTreeMap<CoordId, RatExpr>,
}

impl ProlongedField {
    pub fn base(&self) -> &VectorField {
        &self.base
    }

    pub fn order(&self) -> usize {
        self.spec.r
    }

    pub fn spec(&self) -> &JetSpec {
        &self.spec
    }

    /// Coefficient of `∂/∂c`.
    pub fn coeff(&self, c: CoordId) -> Option<&RatExpr> {
        self.coeffs.get(&c)
    }

    /// Coefficients in canonical coordinate order.
    pub fn coeffs(&self) -> impl Iterator<Item = (CoordId, &RatExpr)> {
        self.coeffs.iter().map(|(c, e)| (*c, e))
    }

    /// `Σ_c coeff_c ∂e/∂c`.
    pub fn apply(&self, e: &RatExpr) -> Result<RatExpr> {
        let mut acc = RatExpr::zero();
        for c in e.vars() {
            if c.order() > self.spec.r {
                return Err(Error::OrderOverflow(c));
            }
            let k =
                self.coeffs.get(&c).ok_or_else(|| Error::IndexOutOfRange(format!("{c} outside {:?}", self.spec)))?;
            if k.is_zero() {
                continue;
            }
            acc = &acc + &(k * &e.differentiate(c));
        }
        Ok(acc)
    }
}

/// Prolongs `v` to order `r` by the recursion
/// `η_[α,J∪j] = D_j η_[α,J] − Σ_ℓ (D_j ξ_ℓ) u_{α,J∪ℓ}`, building each
/// multi-index in sorted order.
pub fn prolong(v: &VectorField, r: usize) -> Result<ProlongedField> {
    let spec = JetSpec::new(v.n, v.m, r)?;
    // D_j ξ_ℓ, indexed [ℓ-1][j-1]
    let dxi: Vec<Vec<RatExpr>> =
        v.xi.iter()
            .map(|xi| (1..=v.n).map(|j| total_derivative(xi, j, &spec)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;

    let mut coeffs: BTreeMap<CoordId, RatExpr> = BTreeMap::new();
    for (c, e) in v.components() {
        coeffs.insert(c, e.clone());
    }
    for k in 1..=r {
        for alpha in 1..=v.m {
            for raw in sorted_indices(v.n, k) {
                let j = *raw.last().unwrap();
                let target = CoordId::D(alpha as u16, MultiIndex::new(&raw, v.n)?);
                let prev_coord = if k == 1 {
                    CoordId::u(alpha)
                } else {
                    CoordId::D(alpha as u16, MultiIndex::new(&raw[..k - 1], v.n)?)
                };
                let eta = step(&coeffs[&prev_coord], prev_coord, j, &dxi, &spec)?;
                coeffs.insert(target, eta);
            }
        }
    }
    Ok(ProlongedField { base: v.clone(), spec, coeffs })
}

/// One recursion step from the coefficient on `prev` (a `U` or `D`
/// coordinate) in direction `j`.
fn step(prev_eta: &RatExpr, prev: CoordId, j: usize, dxi: &[Vec<RatExpr>], spec: &JetSpec) -> Result<RatExpr> {
    let mut eta = total_derivative(prev_eta, j, spec)?;
    for (l, row) in dxi.iter().enumerate() {
        let d = &row[j - 1];
        if d.is_zero() {
            continue;
        }
        let u = RatExpr::var(prev.raised(l + 1).expect("order below MAX_ORDER"));
        eta = &eta - &(d * &u);
    }
    Ok(eta)
}

/// Coefficient `η_[α,path]` computed by applying the recursion along
/// `path` in the given (not necessarily sorted) order.
pub fn prolong_along(v: &VectorField, alpha: usize, path: &[usize]) -> Result<RatExpr> {
    let spec = JetSpec::new(v.n, v.m, path.len().max(1))?;
    if alpha == 0 || alpha > v.m {
        return Err(Error::IndexOutOfRange(format!("dependent index {alpha}")));
    }
    let dxi: Vec<Vec<RatExpr>> =
        v.xi.iter()
            .map(|xi| (1..=v.n).map(|j| total_derivative(xi, j, &spec)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
    let mut eta = v.eta[alpha - 1].clone();
    let mut prev = CoordId::u(alpha);
    for &j in path {
        if j == 0 || j > v.n {
            return Err(Error::IndexOutOfRange(format!("x index {j}")));
        }
        eta = step(&eta, prev, j, &dxi, &spec)?;
        prev = prev.raised(j).expect("order below MAX_ORDER");
    }
    Ok(eta)
}

/// Coefficients of the bracket `[a, b]` of two prolonged fields of equal
/// order, over every coordinate of their jet space.
pub fn prolonged_bracket(a: &ProlongedField, b: &ProlongedField) -> Result<BTreeMap<CoordId, RatExpr>> {
    if a.spec != b.spec {
        return Err(Error::InvalidShape("prolonged fields of different shape".into()));
    }
    let mut out = BTreeMap::new();
    for (c, bc) in b.coeffs() {
        let ac = a.coeff(c).expect("same coordinates");
        let v = &a.apply(bc)? - &b.apply(ac)?;
        out.insert(c, v);
    }
    Ok(out)
}

/// Memoized prolongations keyed by `(field, order)`; safe for concurrent
/// use. Concurrent writers compute identical values, so last write wins.
#[derive(Default)]
pub struct ProlongationCache {
    map: RwLock<HashMap<(VectorField, usize), Arc<ProlongedField>>>,
}

impl ProlongationCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Process-wide cache.
    pub fn global() -> &'static ProlongationCache {
        static CACHE: OnceLock<ProlongationCache> = OnceLock::new();
        CACHE.get_or_init(ProlongationCache::new)
    }

    pub fn get(&self, v: &VectorField, r: usize) -> Result<Arc<ProlongedField>> {
        let key = (v.clone(), r);
        if let Some(p) = self.map.read().expect("cache lock").get(&key) {
            return Ok(Arc::clone(p));
        }
        let p = Arc::new(prolong(v, r)?);
        self.map.write().expect("cache lock").insert(key, Arc::clone(&p));
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
