//! Multivariate polynomial gcd over `Q`.
//!
//! Cheap cases are settled first: monomial content, a modular degree test
//! that certifies coprimality variable by variable, and trial division.
//! Everything else goes through the recursive subresultant PRS.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use crate::jet::CoordId;
use crate::poly::{Monomial, Poly, Rational};

/// Monic gcd; `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a == b {
        return a.monic();
    }
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let mg = ma.gcd(&mb);
    let a1 = strip_monomial(a, &ma);
    let b1 = strip_monomial(b, &mb);
    let g = gcd_no_monomial(&a1, &b1);
    g.mul_monomial(&mg, &Rational::one()).monic()
}

/// Least common multiple, monic.
pub fn lcm(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() || b.is_zero() {
        return Poly::zero();
    }
    let g = gcd(a, b);
    (a * &b.exact_div(&g).expect("gcd divides")).monic()
}

fn strip_monomial(p: &Poly, m: &Monomial) -> Poly {
    if m.is_one() {
        p.clone()
    } else {
        p.exact_div(&Poly::term(m.clone(), Rational::one())).expect("monomial content divides")
    }
}

fn gcd_no_monomial(a: &Poly, b: &Poly) -> Poly {
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    let va = a.vars();
    let vb = b.vars();
    let shared: Vec<CoordId> = va.intersection(&vb).copied().collect();
    if shared.is_empty() {
        return Poly::one();
    }
    // A monomial without monomial content is a constant, handled above; so
    // both sides have at least two terms here.
    let mut candidates = Vec::new();
    let mut rng = SplitMix(0x9e37_79b9_7f4a_7c15 ^ (a.len() as u64) << 17 ^ b.len() as u64);
    let all: BTreeSet<CoordId> = va.union(&vb).copied().collect();
    for &x in &shared {
        match modular_gcd_degree(a, b, x, &all, &mut rng) {
            Some(0) => {}
            _ => candidates.push(x),
        }
    }
    if candidates.is_empty() {
        return Poly::one();
    }
    if a.len() >= b.len() {
        if a.exact_div(b).is_some() {
            return b.monic();
        }
    } else if b.exact_div(a).is_some() {
        return a.monic();
    }
    subresultant_gcd(a, b, &candidates)
}

/// Content with respect to `x`: gcd of the coefficients of powers of `x`.
pub fn content_in(p: &Poly, x: CoordId) -> Poly {
    let coeffs = p.coefficients_in(x);
    let mut nonzero: Vec<Poly> = coeffs.into_iter().filter(|c| !c.is_zero()).collect();
    if nonzero.is_empty() {
        return Poly::zero();
    }
    nonzero.sort_by_key(|c| c.len());
    let mut g = nonzero[0].monic();
    for c in &nonzero[1..] {
        if g.is_one() {
            break;
        }
        g = gcd(&g, c);
    }
    g
}

fn subresultant_gcd(a: &Poly, b: &Poly, candidates: &[CoordId]) -> Poly {
    // main variable: lowest combined degree among the possible gcd variables
    let x = *candidates.iter().min_by_key(|&&c| a.degree_in(c) + b.degree_in(c)).expect("nonempty");
    let ca = content_in(a, x);
    let cb = content_in(b, x);
    let c = gcd(&ca, &cb);
    let mut pa = a.exact_div(&ca).expect("content divides");
    let mut pb = b.exact_div(&cb).expect("content divides");
    if pa.degree_in(x) < pb.degree_in(x) {
        std::mem::swap(&mut pa, &mut pb);
    }
    let g = subresultant_prs(pa, pb, x);
    if g.degree_in(x) == 0 {
        return c.monic();
    }
    let cg = content_in(&g, x);
    let pg = g.exact_div(&cg).expect("content divides");
    (&pg * &c).monic()
}

/// Last nonzero subresultant remainder of primitive `a`, `b` with
/// `deg_x a >= deg_x b`.
fn subresultant_prs(mut a: Poly, mut b: Poly, x: CoordId) -> Poly {
    let mut g = Poly::one();
    let mut h = Poly::one();
    loop {
        let da = a.degree_in(x);
        let db = b.degree_in(x);
        let delta = da - db;
        let r = pseudo_remainder(&a, &b, x);
        if r.is_zero() {
            return b;
        }
        if r.degree_in(x) == 0 {
            return Poly::one();
        }
        let divisor = &g * &h.pow(delta);
        a = b;
        b = r.exact_div(&divisor).expect("subresultant division is exact");
        g = a.lc_in(x);
        h = if delta == 0 { h } else { g.pow(delta).exact_div(&h.pow(delta - 1)).expect("subresultant h is exact") };
    }
}

/// `lc_x(b)^(deg a - deg b + 1) · a mod b`, as a polynomial in `x`.
pub fn pseudo_remainder(a: &Poly, b: &Poly, x: CoordId) -> Poly {
    let db = b.degree_in(x);
    let lcb = b.lc_in(x);
    let mut r = a.clone();
    let mut steps = (a.degree_in(x) + 1).saturating_sub(db);
    let one = Rational::one();
    while !r.is_zero() && r.degree_in(x) >= db {
        let dr = r.degree_in(x);
        let lcr = r.lc_in(x);
        let shift = Monomial::var_pow(x, dr - db);
        r = &(&lcb * &r) - &(&lcr * &b.mul_monomial(&shift, &one));
        steps -= 1;
    }
    if steps > 0 {
        r = &lcb.pow(steps) * &r;
    }
    r
}

const P: u64 = (1u64 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn addmod(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= P {
        s - P
    } else {
        s
    }
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    acc
}

fn invmod(a: u64) -> u64 {
    powmod(a, P - 2)
}

fn bigint_mod(n: &BigInt) -> u64 {
    let p = BigInt::from(P);
    let r = ((n % &p) + &p) % &p;
    r.to_u64().expect("reduced")
}

fn rational_mod(q: &Rational) -> Option<u64> {
    let d = bigint_mod(q.denom());
    if d == 0 {
        return None;
    }
    Some(mulmod(bigint_mod(q.numer()), invmod(d)))
}

struct SplitMix(u64);

impl SplitMix {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
}

/// Specializes every variable except `x` to random residues mod `P`.
fn specialize(p: &Poly, x: CoordId, values: &std::collections::HashMap<CoordId, u64>) -> Option<Vec<u64>> {
    let d = p.degree_in(x) as usize;
    let mut out = vec![0u64; d + 1];
    for (m, q) in p.terms() {
        let mut t = rational_mod(q)?;
        let mut e_x = 0;
        for (c, e) in m.iter() {
            if c == x {
                e_x = e as usize;
            } else {
                t = mulmod(t, powmod(values[&c], e as u64));
            }
        }
        out[e_x] = addmod(out[e_x], t);
    }
    Some(out)
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn univariate_gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        // a mod b
        let inv = invmod(*b.last().unwrap());
        while a.len() >= b.len() {
            let f = mulmod(*a.last().unwrap(), inv);
            let shift = a.len() - b.len();
            for (i, &bi) in b.iter().enumerate() {
                let s = mulmod(f, bi);
                a[shift + i] = addmod(a[shift + i], P - s);
            }
            trim(&mut a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// Upper bound on `deg_x gcd(a, b)` from one modular specialization, or
/// `None` when the specialization is unlucky (a leading coefficient or a
/// denominator vanishes mod `P`).
fn modular_gcd_degree(a: &Poly, b: &Poly, x: CoordId, vars: &BTreeSet<CoordId>, rng: &mut SplitMix) -> Option<usize> {
    let values: std::collections::HashMap<CoordId, u64> =
        vars.iter().filter(|&&c| c != x).map(|&c| (c, rng.next() % P)).collect();
    let sa = specialize(a, x, &values)?;
    let sb = specialize(b, x, &values)?;
    if sa.last().copied().unwrap_or(0) == 0 || sb.last().copied().unwrap_or(0) == 0 {
        return None;
    }
    Some(univariate_gcd_degree(sa, sb))
}

/// Whether `a` and `b` share no nonconstant factor.
pub fn coprime(a: &Poly, b: &Poly) -> bool {
    gcd(a, b).is_constant()
}
