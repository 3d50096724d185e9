//! Exact rational functions over jet coordinates.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::gcd::gcd;
use crate::jet::CoordId;
use crate::poly::{Monomial, Point, Poly, Rational};

/// `num / den` in lowest terms with a monic denominator. Zero is `0/1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatExpr {
    num: Poly,
    den: Poly,
}

impl RatExpr {
    pub fn zero() -> Self {
        RatExpr { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        RatExpr { num: Poly::one(), den: Poly::one() }
    }

    pub fn constant(q: Rational) -> Self {
        RatExpr { num: Poly::constant(q), den: Poly::one() }
    }

    pub fn int(n: i64) -> Self {
        RatExpr::from(Poly::int(n))
    }

    pub fn var(c: CoordId) -> Self {
        RatExpr::from(Poly::var(c))
    }

    /// Normalizes `num / den`.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalize(num, den))
    }

    fn normalize(num: Poly, den: Poly) -> Self {
        debug_assert!(!den.is_zero());
        if num.is_zero() {
            return RatExpr::zero();
        }
        if let Some(c) = den.constant_value() {
            return RatExpr { num: num.scale(&c.recip()), den: Poly::one() };
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.exact_div(&g).expect("gcd divides"), den.exact_div(&g).expect("gcd divides"))
        };
        Self::make_monic(num, den)
    }

    fn make_monic(num: Poly, den: Poly) -> Self {
        let lc = den.leading_coeff();
        if lc.is_one() {
            RatExpr { num, den }
        } else {
            let inv = lc.recip();
            RatExpr { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn into_parts(self) -> (Poly, Poly) {
        (self.num, self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        self.is_polynomial().then_some(&self.num)
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_polynomial() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn vars(&self) -> BTreeSet<CoordId> {
        let mut v = self.num.vars();
        v.extend(self.den.vars());
        v
    }

    /// Highest derivative order among the occurring coordinates.
    pub fn max_order(&self) -> usize {
        self.vars().iter().map(|c| c.order()).max().unwrap_or(0)
    }

    pub fn scale(&self, q: &Rational) -> RatExpr {
        if q.is_zero() {
            return RatExpr::zero();
        }
        RatExpr { num: self.num.scale(q), den: self.den.clone() }
    }

    pub fn recip(&self) -> Result<RatExpr> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::make_monic(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, other: &RatExpr) -> Result<RatExpr> {
        Ok(self * &other.recip()?)
    }

    pub fn pow(&self, k: u32) -> RatExpr {
        RatExpr { num: self.num.pow(k), den: self.den.pow(k) }
    }

    /// Partial derivative by the quotient rule.
    pub fn differentiate(&self, c: CoordId) -> RatExpr {
        let dn = self.num.derivative(c);
        if self.den.is_one() {
            return RatExpr { num: dn, den: Poly::one() };
        }
        let dd = self.den.derivative(c);
        if dd.is_zero() {
            return Self::normalize(dn, self.den.clone());
        }
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        Self::normalize(num, self.den.pow(2))
    }

    /// Exact value; `EvaluationPole` if the denominator vanishes.
    pub fn evaluate(&self, point: &Point) -> Result<Rational> {
        let d = self.den.eval(point)?;
        if d.is_zero() {
            return Err(Error::EvaluationPole);
        }
        Ok(self.num.eval(point)? / d)
    }

    /// Simultaneous substitution of coordinates by expressions.
    pub fn substitute(&self, bindings: &HashMap<CoordId, RatExpr>) -> Result<RatExpr> {
        let (nn, nd) = substitute_poly(&self.num, bindings);
        if self.den.is_one() {
            return RatExpr::new(nn, nd).map_err(|_| Error::SubstitutionPole);
        }
        let (dn, dd) = substitute_poly(&self.den, bindings);
        if dn.is_zero() {
            return Err(Error::SubstitutionPole);
        }
        if nn.is_zero() {
            return Ok(RatExpr::zero());
        }
        let num = &nn * &dd;
        let den = &nd * &dn;
        Ok(Self::normalize(num, den))
    }

    /// Substitutes rational values for some coordinates.
    pub fn eval_partial(&self, point: &Point) -> Result<RatExpr> {
        let den = self.den.eval_partial(point);
        if den.is_zero() {
            return Err(Error::EvaluationPole);
        }
        Ok(Self::normalize(self.num.eval_partial(point), den))
    }
}

/// `p(bindings)` as an unreduced fraction `(numerator, denominator)`.
///
/// Terms are grouped by their bound part, and bindings sharing a
/// denominator share one power of it in the common denominator.
pub fn substitute_poly(p: &Poly, bindings: &HashMap<CoordId, RatExpr>) -> (Poly, Poly) {
    let bound: BTreeSet<CoordId> = p.vars().into_iter().filter(|c| bindings.contains_key(c)).collect();
    if bound.is_empty() {
        return (p.clone(), Poly::one());
    }
    // denominator groups
    let mut group_of: HashMap<CoordId, usize> = HashMap::new();
    let mut group_dens: Vec<Poly> = Vec::new();
    for c in &bound {
        let d = bindings[c].den();
        let gi = match group_dens.iter().position(|g| g == d) {
            Some(i) => i,
            None => {
                group_dens.push(d.clone());
                group_dens.len() - 1
            }
        };
        group_of.insert(*c, gi);
    }
    // split p = Σ_b b(bound) * P_b(free)
    let mut parts: HashMap<Monomial, Vec<(Monomial, Rational)>> = HashMap::new();
    for (m, q) in p.terms() {
        let mut b = Vec::new();
        let mut f = Vec::new();
        for (c, e) in m.iter() {
            if bound.contains(&c) {
                b.push((c, e));
            } else {
                f.push((c, e));
            }
        }
        parts.entry(Monomial::from_pairs(b)).or_default().push((Monomial::from_pairs(f), q.clone()));
    }
    let group_degree =
        |b: &Monomial, g: usize| -> u32 { b.iter().filter(|(c, _)| group_of[c] == g).map(|(_, e)| e).sum() };
    let max_deg: Vec<u32> =
        (0..group_dens.len()).map(|g| parts.keys().map(|b| group_degree(b, g)).max().unwrap_or(0)).collect();

    let mut num_pow: HashMap<(CoordId, u32), Poly> = HashMap::new();
    let mut den_pow: HashMap<(usize, u32), Poly> = HashMap::new();
    let mut acc: Vec<(Monomial, Rational)> = Vec::new();
    for (b, free_terms) in &parts {
        let mut prod = Poly::one();
        for (c, e) in b.iter() {
            let nc = num_pow.entry((c, e)).or_insert_with(|| bindings[&c].num().pow(e));
            prod = &prod * &*nc;
        }
        for (g, d) in group_dens.iter().enumerate() {
            let k = max_deg[g] - group_degree(b, g);
            if k > 0 && !d.is_one() {
                let dk = den_pow.entry((g, k)).or_insert_with(|| d.pow(k));
                prod = &prod * &*dk;
            }
        }
        let free = Poly::from_terms(free_terms.iter().cloned());
        acc.extend((&prod * &free).terms().iter().cloned());
    }
    let mut den = Poly::one();
    for (g, d) in group_dens.iter().enumerate() {
        if max_deg[g] > 0 && !d.is_one() {
            den = &den * &d.pow(max_deg[g]);
        }
    }
    (Poly::from_terms(acc), den)
}

impl From<Poly> for RatExpr {
    fn from(p: Poly) -> Self {
        RatExpr { num: p, den: Poly::one() }
    }
}

impl From<CoordId> for RatExpr {
    fn from(c: CoordId) -> Self {
        RatExpr::var(c)
    }
}

impl From<i64> for RatExpr {
    fn from(n: i64) -> Self {
        RatExpr::int(n)
    }
}

fn add_impl(a: &RatExpr, b: &RatExpr, negate: bool) -> RatExpr {
    let bn = if negate { -&b.num } else { b.num.clone() };
    if a.den == b.den {
        let num = &a.num + &bn;
        if a.den.is_one() {
            return RatExpr { num, den: Poly::one() };
        }
        return RatExpr::normalize(num, a.den.clone());
    }
    if a.is_zero() {
        return RatExpr { num: bn, den: b.den.clone() };
    }
    if b.is_zero() {
        return a.clone();
    }
    let g = gcd(&a.den, &b.den);
    let ad = a.den.exact_div(&g).expect("gcd divides");
    let bd = b.den.exact_div(&g).expect("gcd divides");
    let num = &(&a.num * &bd) + &(&bn * &ad);
    if num.is_zero() {
        return RatExpr::zero();
    }
    let den = &a.den * &bd;
    if g.is_one() {
        return RatExpr::make_monic(num, den);
    }
    let h = gcd(&num, &g);
    if h.is_one() {
        RatExpr::make_monic(num, den)
    } else {
        RatExpr::make_monic(num.exact_div(&h).unwrap(), den.exact_div(&h).unwrap())
    }
}

impl Add for &RatExpr {
    type Output = RatExpr;
    fn add(self, rhs: &RatExpr) -> RatExpr {
        add_impl(self, rhs, false)
    }
}

impl Sub for &RatExpr {
    type Output = RatExpr;
    fn sub(self, rhs: &RatExpr) -> RatExpr {
        add_impl(self, rhs, true)
    }
}

impl Mul for &RatExpr {
    type Output = RatExpr;
    fn mul(self, rhs: &RatExpr) -> RatExpr {
        if self.is_zero() || rhs.is_zero() {
            return RatExpr::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RatExpr { num: &self.num * &rhs.num, den: Poly::one() };
        }
        let g1 = gcd(&self.num, &rhs.den);
        let g2 = gcd(&rhs.num, &self.den);
        let an = self.num.exact_div(&g1).unwrap();
        let bd = rhs.den.exact_div(&g1).unwrap();
        let bn = rhs.num.exact_div(&g2).unwrap();
        let ad = self.den.exact_div(&g2).unwrap();
        RatExpr::make_monic(&an * &bn, &ad * &bd)
    }
}

impl Neg for &RatExpr {
    type Output = RatExpr;
    fn neg(self) -> RatExpr {
        RatExpr { num: -&self.num, den: self.den.clone() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for RatExpr {
            type Output = RatExpr;
            fn $f(self, rhs: RatExpr) -> RatExpr {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&RatExpr> for RatExpr {
            type Output = RatExpr;
            fn $f(self, rhs: &RatExpr) -> RatExpr {
                (&self).$f(rhs)
            }
        }
        impl $tr<RatExpr> for &RatExpr {
            type Output = RatExpr;
            fn $f(self, rhs: RatExpr) -> RatExpr {
                self.$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for RatExpr {
    type Output = RatExpr;
    fn neg(self) -> RatExpr {
        -&self
    }
}

impl fmt::Display for RatExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let wrap = |p: &Poly| {
            if p.len() == 1 && p.terms()[0].1.is_integer() && p.terms()[0].1 >= Rational::zero() {
                p.to_string()
            } else {
                format!("({p})")
            }
        };
        // `a/x*y` would parse as `(a/x)*y`, so only bare variables stay unwrapped
        let den = if self.den.len() == 1 && self.den.terms()[0].1.is_one() && self.den.total_degree() == 1 {
            self.den.to_string()
        } else {
            format!("({})", self.den)
        };
        write!(f, "{}/{}", wrap(&self.num), den)
    }
}

impl fmt::Debug for RatExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat};

    fn x(i: usize) -> RatExpr {
        RatExpr::var(CoordId::x(i))
    }

    fn ud(a: usize, j: &[usize]) -> RatExpr {
        RatExpr::var(CoordId::d(a, j))
    }

    #[test]
    fn additive_inverse() {
        let a = x(1).checked_div(&x(2)).unwrap();
        let b = (-&x(1)).checked_div(&x(2)).unwrap();
        assert!((&a + &b).is_zero());
        assert_eq!(&a + &b, RatExpr::zero());
    }

    #[test]
    fn gcd_cancellation() {
        let num = &(&x(1) * &x(1)) - &(&x(2) * &x(2));
        let den = &x(1) - &x(2);
        assert_eq!(num.checked_div(&den).unwrap(), &x(1) + &x(2));
    }

    #[test]
    fn rational_coefficients() {
        let a = x(1).scale(&rat(1, 2));
        let b = x(1).scale(&rat(2, 3));
        assert_eq!(&a * &b, (&x(1) * &x(1)).scale(&rat(1, 3)));
    }

    #[test]
    fn division_by_zero() {
        assert_eq!(x(1).checked_div(&RatExpr::zero()), Err(Error::DivisionByZero));
        assert!(RatExpr::new(Poly::one(), Poly::zero()).is_err());
    }

    #[test]
    fn derivatives() {
        let p = &(&x(1) * &x(1)) * &x(2);
        assert_eq!(p.differentiate(CoordId::x(1)), (&x(1) * &x(2)).scale(&int(2)));
        let inv = RatExpr::one().checked_div(&x(1)).unwrap();
        let expected = -&RatExpr::one().checked_div(&(&x(1) * &x(1))).unwrap();
        assert_eq!(inv.differentiate(CoordId::x(1)), expected);
        let q = &ud(1, &[1, 1]) * &ud(2, &[2, 2]);
        assert_eq!(q.differentiate(CoordId::d(1, &[1, 1])), ud(2, &[2, 2]));
    }

    #[test]
    fn substitution() {
        let e = &(&ud(1, &[1, 1]) * &ud(2, &[2, 2])) - &(&ud(1, &[2, 2]) * &ud(2, &[1, 1]));
        let mut b = HashMap::new();
        b.insert(CoordId::d(2, &[2, 2]), (&ud(2, &[1, 1]) * &ud(1, &[2, 2])).checked_div(&ud(1, &[1, 1])).unwrap());
        assert!(e.substitute(&b).unwrap().is_zero());

        let s = &x(1) + &x(2);
        let mut sw = HashMap::new();
        sw.insert(CoordId::x(1), x(2));
        sw.insert(CoordId::x(2), x(1));
        assert_eq!(s.substitute(&sw).unwrap(), s);

        let inv = RatExpr::one().checked_div(&x(1)).unwrap();
        let mut z = HashMap::new();
        z.insert(CoordId::x(1), RatExpr::zero());
        assert_eq!(inv.substitute(&z), Err(Error::SubstitutionPole));
    }

    #[test]
    fn substitution_with_rational_bindings() {
        // (x1 + x2^2) with x1 -> 1/x3, x2 -> x3/(x3 + 1)
        let e = &x(1) + &(&x(2) * &x(2));
        let mut b = HashMap::new();
        b.insert(CoordId::x(1), RatExpr::one().checked_div(&x(3)).unwrap());
        b.insert(CoordId::x(2), x(3).checked_div(&(&x(3) + &RatExpr::one())).unwrap());
        let got = e.substitute(&b).unwrap();
        let want = &b[&CoordId::x(1)] + &(&b[&CoordId::x(2)] * &b[&CoordId::x(2)]);
        assert_eq!(got, want);
    }

    #[test]
    fn evaluation() {
        let ma = &(&ud(1, &[1, 1]) * &ud(1, &[2, 2])) - &(&ud(1, &[1, 2]) * &ud(1, &[1, 2]));
        let mut p = Point::new();
        for j in [[1, 1], [2, 2], [1, 2]] {
            p.insert(CoordId::d(1, &j), int(2));
        }
        assert_eq!(ma.evaluate(&p).unwrap(), int(0));

        let q = x(1).checked_div(&x(2)).unwrap();
        let mut p = Point::new();
        p.insert(CoordId::x(1), int(3));
        p.insert(CoordId::x(2), int(2));
        assert_eq!(q.evaluate(&p).unwrap(), rat(3, 2));
        p.insert(CoordId::x(2), int(0));
        assert_eq!(q.evaluate(&p), Err(Error::EvaluationPole));

        let mut p = Point::new();
        p.insert(CoordId::x(2), int(1));
        assert_eq!(x(1).evaluate(&p), Err(Error::UnboundCoordinate(CoordId::x(1))));
    }

    #[test]
    fn denominator_is_monic() {
        let e = x(1).checked_div(&x(2).scale(&int(-3))).unwrap();
        assert!(e.den().leading_coeff().is_one());
        assert_eq!(e.num(), &Poly::var(CoordId::x(1)).scale(&rat(-1, 3)));
    }
}
