//! Squarefree decomposition and variable-content splitting.

use crate::error::{Error, Result};
use crate::gcd::{content_in, gcd};
use crate::jet::CoordId;
use crate::poly::{Poly, Rational};

use num_traits::One;

/// Squarefree decomposition: pairwise coprime squarefree factors with
/// multiplicities whose product equals `p` up to a rational constant.
/// Factors are primitive with positive leading coefficient.
pub fn squarefree_factors(p: &Poly) -> Result<Vec<(Poly, u32)>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut out = Vec::new();
    sqf_into(&p.primitive(), &mut out);
    for (f, _) in out.iter_mut() {
        *f = f.primitive();
    }
    out.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| b.0.leading().map(|t| &t.0).cmp(&a.0.leading().map(|t| &t.0))));
    Ok(out)
}

fn sqf_into(p: &Poly, out: &mut Vec<(Poly, u32)>) {
    if p.is_constant() {
        return;
    }
    let mc = p.monomial_content();
    for (c, e) in mc.iter() {
        out.push((Poly::var(c), e));
    }
    let p = if mc.is_one() {
        p.clone()
    } else {
        p.exact_div(&Poly::term(mc, Rational::one())).expect("monomial content divides")
    };
    if p.is_constant() {
        return;
    }
    let x = main_variable(&p);
    let c = content_in(&p, x);
    let pp = p.exact_div(&c).expect("content divides");
    yun(&pp, x, out);
    sqf_into(&c, out);
}

fn main_variable(p: &Poly) -> CoordId {
    p.vars().into_iter().min_by_key(|&c| p.degree_in(c)).expect("nonconstant")
}

/// Yun's algorithm for a polynomial primitive in `x`.
fn yun(f: &Poly, x: CoordId, out: &mut Vec<(Poly, u32)>) {
    let df = f.derivative(x);
    let a0 = gcd(f, &df);
    let mut b = f.exact_div(&a0).expect("gcd divides");
    let c = df.exact_div(&a0).expect("gcd divides");
    let mut d = &c - &b.derivative(x);
    let mut i = 1;
    while !b.is_constant() {
        let a = gcd(&b, &d);
        if !a.is_constant() {
            out.push((a.clone(), i));
        }
        b = b.exact_div(&a).expect("gcd divides");
        let c = d.exact_div(&a).expect("gcd divides");
        d = &c - &b.derivative(x);
        i += 1;
    }
}

/// Splits `p` along its contents with respect to each variable, so every
/// returned piece involves all of its variables in each irreducible factor.
pub fn split_by_contents(p: &Poly) -> Vec<Poly> {
    if p.is_constant() {
        return Vec::new();
    }
    for x in p.vars() {
        let c = content_in(p, x);
        if !c.is_constant() {
            let rest = p.exact_div(&c).expect("content divides");
            let mut out = split_by_contents(&c);
            out.extend(split_by_contents(&rest));
            return out;
        }
    }
    vec![p.primitive()]
}
