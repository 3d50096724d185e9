//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Terms are kept sorted in decreasing graded-lexicographic order over the
//! global coordinate order of [`CoordId`], with no zero coefficients, so
//! structural equality is mathematical equality.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::jet::CoordId;

pub type Rational = BigRational;

/// A point: values for some set of coordinates.
pub type Point = HashMap<CoordId, Rational>;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Power product of coordinates. Exponents are positive; variables are
/// stored in increasing coordinate order.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    vars: SmallVec<[(CoordId, u32); 4]>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(c: CoordId) -> Self {
        Self::var_pow(c, 1)
    }

    pub fn var_pow(c: CoordId, e: u32) -> Self {
        let mut vars = SmallVec::new();
        if e > 0 {
            vars.push((c, e));
        }
        Monomial { vars }
    }

    /// Builds from arbitrary `(coord, exponent)` pairs, merging repeats.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (CoordId, u32)>) -> Self {
        let mut map: BTreeMap<CoordId, u32> = BTreeMap::new();
        for (c, e) in pairs {
            *map.entry(c).or_default() += e;
        }
        Monomial { vars: map.into_iter().filter(|&(_, e)| e > 0).collect() }
    }

    pub fn is_one(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.vars.iter().map(|&(_, e)| e).sum()
    }

    pub fn degree_in(&self, c: CoordId) -> u32 {
        self.vars.iter().find(|(v, _)| *v == c).map_or(0, |&(_, e)| e)
    }

    pub fn iter(&self) -> impl Iterator<Item = (CoordId, u32)> + '_ {
        self.vars.iter().copied()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.vars, &other.vars);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial { vars: out }
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = SmallVec::with_capacity(self.vars.len());
        let mut j = 0;
        let b = &other.vars;
        for &(v, e) in &self.vars {
            if j < b.len() && b[j].0 < v {
                return None;
            }
            if j < b.len() && b[j].0 == v {
                if b[j].1 > e {
                    return None;
                }
                if e > b[j].1 {
                    out.push((v, e - b[j].1));
                }
                j += 1;
            } else {
                out.push((v, e));
            }
        }
        if j < b.len() {
            return None;
        }
        Some(Monomial { vars: out })
    }

    /// Componentwise minimum.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = SmallVec::new();
        let (a, b) = (&self.vars, &other.vars);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1.min(b[j].1)));
                    i += 1;
                    j += 1;
                }
            }
        }
        Monomial { vars: out }
    }

    /// Removes the given variable entirely.
    pub fn without(&self, c: CoordId) -> Monomial {
        Monomial { vars: self.vars.iter().copied().filter(|&(v, _)| v != c).collect() }
    }
}

impl Ord for Monomial {
    /// Graded lexicographic; earlier coordinates are more significant.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let (a, b) = (&self.vars, &other.vars);
        for (x, y) in a.iter().zip(b.iter()) {
            if x.0 != y.0 {
                // the side holding the earlier variable is larger
                return if x.0 < y.0 { Ordering::Greater } else { Ordering::Less };
            }
            if x.1 != y.1 {
                return x.1.cmp(&y.1);
            }
        }
        a.len().cmp(&b.len())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        for (k, (c, e)) in self.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if e == 1 {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Sparse polynomial over `Q`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: Vec<(Monomial, Rational)>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(q: Rational) -> Self {
        if q.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(Monomial::one(), q)] }
        }
    }

    pub fn int(n: i64) -> Self {
        Poly::constant(int(n))
    }

    pub fn var(c: CoordId) -> Self {
        Poly::term(Monomial::var(c), Rational::one())
    }

    pub fn term(m: Monomial, q: Rational) -> Self {
        if q.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(m, q)] }
        }
    }

    /// Normalizes arbitrary terms: merges equal monomials, drops zeros, sorts.
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut map: HashMap<Monomial, Rational> = HashMap::new();
        for (m, q) in terms {
            *map.entry(m).or_insert_with(Rational::zero) += q;
        }
        Self::from_map(map)
    }

    fn from_map(map: HashMap<Monomial, Rational>) -> Self {
        let mut terms: Vec<_> = map.into_iter().filter(|(_, q)| !q.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Poly { terms }
    }

    /// Terms in decreasing monomial order.
    pub fn terms(&self) -> &[(Monomial, Rational)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    /// Value of a constant polynomial.
    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(m, q)] if m.is_one() => Some(q.clone()),
            _ => None,
        }
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn leading(&self) -> Option<&(Monomial, Rational)> {
        self.terms.first()
    }

    pub fn leading_coeff(&self) -> Rational {
        self.terms.first().map_or_else(Rational::zero, |t| t.1.clone())
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, c: CoordId) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree_in(c)).max().unwrap_or(0)
    }

    /// Variables occurring, in coordinate order.
    pub fn vars(&self) -> BTreeSet<CoordId> {
        self.terms.iter().flat_map(|(m, _)| m.iter().map(|(c, _)| c)).collect()
    }

    pub fn max_order(&self) -> usize {
        self.vars().iter().map(|c| c.order()).max().unwrap_or(0)
    }

    pub fn scale(&self, q: &Rational) -> Poly {
        if q.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * q)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial, q: &Rational) -> Poly {
        if q.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(t, c)| (t.mul(m), c * q)).collect() }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Partial derivative.
    pub fn derivative(&self, c: CoordId) -> Poly {
        let mut terms = Vec::new();
        for (m, q) in &self.terms {
            let e = m.degree_in(c);
            if e == 0 {
                continue;
            }
            let mut vars: SmallVec<[(CoordId, u32); 4]> = SmallVec::new();
            for (v, ev) in m.iter() {
                if v == c {
                    if ev > 1 {
                        vars.push((v, ev - 1));
                    }
                } else {
                    vars.push((v, ev));
                }
            }
            terms.push((Monomial { vars }, q * Rational::from_integer(BigInt::from(e))));
        }
        // dividing every surviving monomial by c preserves grlex order
        Poly { terms }
    }

    /// Exact value at a point binding every occurring coordinate.
    pub fn eval(&self, point: &Point) -> Result<Rational> {
        let mut acc = Rational::zero();
        for (m, q) in &self.terms {
            let mut t = q.clone();
            for (c, e) in m.iter() {
                let v = point.get(&c).ok_or(Error::UnboundCoordinate(c))?;
                t *= pow_rat(v, e);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Substitutes rational values for the bound coordinates only.
    pub fn eval_partial(&self, point: &Point) -> Poly {
        let mut out: HashMap<Monomial, Rational> = HashMap::new();
        for (m, q) in &self.terms {
            let mut t = q.clone();
            let mut rest: SmallVec<[(CoordId, u32); 4]> = SmallVec::new();
            for (c, e) in m.iter() {
                match point.get(&c) {
                    Some(v) => t *= pow_rat(v, e),
                    None => rest.push((c, e)),
                }
            }
            if !t.is_zero() {
                *out.entry(Monomial { vars: rest }).or_insert_with(Rational::zero) += t;
            }
        }
        Poly::from_map(out)
    }

    /// Coefficients with respect to `c`: entry `k` multiplies `c^k`.
    pub fn coefficients_in(&self, c: CoordId) -> Vec<Poly> {
        let d = self.degree_in(c) as usize;
        let mut buckets: Vec<Vec<(Monomial, Rational)>> = vec![Vec::new(); d + 1];
        for (m, q) in &self.terms {
            let e = m.degree_in(c) as usize;
            buckets[e].push((m.without(c), q.clone()));
        }
        buckets
            .into_iter()
            .map(|mut t| {
                t.sort_unstable_by(|a, b| b.0.cmp(&a.0));
                Poly { terms: t }
            })
            .collect()
    }

    /// Leading coefficient with respect to `c`.
    pub fn lc_in(&self, c: CoordId) -> Poly {
        self.coefficients_in(c).pop().unwrap_or_else(Poly::zero)
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        let Some((first, _)) = it.next() else { return Monomial::one() };
        it.fold(first.clone(), |acc, (m, _)| acc.gcd(m))
    }

    /// Positive rational `c` such that `self / c` has coprime integer
    /// coefficients.
    pub fn content(&self) -> Rational {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for (_, q) in &self.terms {
            num = num.gcd(q.numer());
            den = den.lcm(q.denom());
        }
        if num.is_zero() {
            return Rational::one();
        }
        Rational::new(num, den)
    }

    /// Integer-coefficient primitive representative with positive leading
    /// coefficient.
    pub fn primitive(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = self.content();
        if self.leading_coeff().is_negative() {
            c = -c;
        }
        self.scale(&c.recip())
    }

    /// Scales so the leading coefficient is 1.
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(&self.leading_coeff().recip())
    }

    /// Exact quotient, or `None` when `divisor` does not divide `self`.
    pub fn exact_div(&self, divisor: &Poly) -> Option<Poly> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if let Some(c) = divisor.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        let (lm, lc) = divisor.leading().unwrap();
        if divisor.is_monomial() {
            let inv = lc.recip();
            let mut terms = Vec::with_capacity(self.terms.len());
            for (m, q) in &self.terms {
                terms.push((m.div(lm)?, q * &inv));
            }
            return Some(Poly { terms });
        }
        if self.total_degree() < divisor.total_degree() {
            return None;
        }
        let lc_inv = lc.recip();
        let mut rem: BTreeMap<Monomial, Rational> = self.terms.iter().cloned().collect();
        let mut quot = Vec::new();
        while let Some((m, q)) = rem.pop_last() {
            let tm = m.div(lm)?;
            let tq = q * &lc_inv;
            for (dm, dq) in &divisor.terms[1..] {
                let pm = dm.mul(&tm);
                let pq = dq * &tq;
                match rem.entry(pm) {
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        *e.get_mut() -= pq;
                        if e.get().is_zero() {
                            e.remove();
                        }
                    }
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(-pq);
                    }
                }
            }
            quot.push((tm, tq));
        }
        Some(Poly { terms: quot })
    }

    /// Replaces coordinates by polynomials, simultaneously.
    pub fn compose(&self, bindings: &HashMap<CoordId, Poly>) -> Poly {
        let mut cache: HashMap<(CoordId, u32), Poly> = HashMap::new();
        let mut acc: HashMap<Monomial, Rational> = HashMap::new();
        for (m, q) in &self.terms {
            let mut fixed: SmallVec<[(CoordId, u32); 4]> = SmallVec::new();
            let mut prod = Poly::constant(q.clone());
            for (c, e) in m.iter() {
                match bindings.get(&c) {
                    Some(p) => {
                        let pe = cache.entry((c, e)).or_insert_with(|| p.pow(e));
                        prod = &prod * &*pe;
                    }
                    None => fixed.push((c, e)),
                }
            }
            let fm = Monomial { vars: fixed };
            for (pm, pq) in prod.terms {
                *acc.entry(pm.mul(&fm)).or_insert_with(Rational::zero) += pq;
            }
        }
        Poly::from_map(acc)
    }

    fn merge(&self, other: &Poly, negate_other: bool) -> Poly {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let q = if negate_other { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0.clone(), q));
                    j += 1;
                }
                Ordering::Equal => {
                    let q = if negate_other { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !q.is_zero() {
                        out.push((a[i].0.clone(), q));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        for t in &b[j..] {
            let q = if negate_other { -&t.1 } else { t.1.clone() };
            out.push((t.0.clone(), q));
        }
        Poly { terms: out }
    }

    fn product(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if other.terms.len() == 1 {
            let (m, q) = &other.terms[0];
            return self.mul_monomial(m, q);
        }
        if self.terms.len() == 1 {
            let (m, q) = &self.terms[0];
            return other.mul_monomial(m, q);
        }
        let mut acc: HashMap<Monomial, Rational> = HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, qa) in &self.terms {
            for (mb, qb) in &other.terms {
                let q = qa * qb;
                match acc.entry(ma.mul(mb)) {
                    std::collections::hash_map::Entry::Occupied(mut e) => *e.get_mut() += q,
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(q);
                    }
                }
            }
        }
        Poly::from_map(acc)
    }
}

pub(crate) fn pow_rat(v: &Rational, e: u32) -> Rational {
    match e {
        0 => Rational::one(),
        1 => v.clone(),
        _ => num_traits::pow(v.clone(), e as usize),
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.merge(rhs, false)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.merge(rhs, true)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.product(rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, q)| (m.clone(), -q)).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $f(self, rhs: Poly) -> Poly {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $f(self, rhs: &Poly) -> Poly {
                (&self).$f(rhs)
            }
        }
        impl $tr<Poly> for &Poly {
            type Output = Poly;
            fn $f(self, rhs: Poly) -> Poly {
                self.$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl From<CoordId> for Poly {
    fn from(c: CoordId) -> Self {
        Poly::var(c)
    }
}

impl From<i64> for Poly {
    fn from(n: i64) -> Self {
        Poly::int(n)
    }
}

pub(crate) fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Prints in the input grammar, e.g. `u[1;1,1]*u[1;2,2] - u[1;1,2]^2`.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, q)) in self.terms.iter().enumerate() {
            let neg = q.is_negative();
            let a = q.abs();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.is_one() {
                f.write_str(&fmt_rational(&a))?;
                continue;
            }
            if !a.is_one() {
                write!(f, "{}*", fmt_rational(&a))?;
            }
            write!(f, "{m:?}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
