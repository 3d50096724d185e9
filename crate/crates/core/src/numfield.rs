//! Exact rank at algebraic points: arithmetic in `ℚ[t]/(f)` for squarefree
//! `f`, splitting `f` whenever a zero divisor turns up.

use num_traits::{One, Zero};

use crate::jet::CoordId;
use crate::poly::{Poly, Rational};

/// Dense univariate polynomial, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPoly(Vec<Rational>);

impl UPoly {
    pub fn new(mut c: Vec<Rational>) -> Self {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        UPoly(c)
    }

    pub fn zero() -> Self {
        UPoly(Vec::new())
    }

    pub fn constant(q: Rational) -> Self {
        UPoly::new(vec![q])
    }

    /// From a polynomial whose only variable (if any) is `t`.
    pub fn from_poly(p: &Poly, t: CoordId) -> Option<Self> {
        let cs = p.coefficients_in(t);
        let mut out = Vec::with_capacity(cs.len());
        for c in cs {
            if c.is_zero() {
                out.push(Rational::zero());
            } else {
                out.push(c.constant_value()?);
            }
        }
        Some(UPoly::new(out))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    fn lead(&self) -> &Rational {
        self.0.last().expect("nonzero")
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn add(&self, o: &UPoly) -> UPoly {
        let n = self.0.len().max(o.0.len());
        let z = Rational::zero();
        UPoly::new((0..n).map(|i| self.0.get(i).unwrap_or(&z) + o.0.get(i).unwrap_or(&z)).collect())
    }

    pub fn sub(&self, o: &UPoly) -> UPoly {
        let n = self.0.len().max(o.0.len());
        let z = Rational::zero();
        UPoly::new((0..n).map(|i| self.0.get(i).unwrap_or(&z) - o.0.get(i).unwrap_or(&z)).collect())
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut c = vec![Rational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        UPoly::new(c)
    }

    pub fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (UPoly::zero(), self.clone());
        }
        let inv = d.lead().recip();
        let mut q = vec![Rational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let f = &r[k + dd] * &inv;
            if f.is_zero() {
                continue;
            }
            for (i, c) in d.0.iter().enumerate() {
                r[k + i] -= &f * c;
            }
            q[k] = f;
        }
        r.truncate(dd);
        (UPoly::new(q), UPoly::new(r))
    }

    pub fn rem(&self, d: &UPoly) -> UPoly {
        self.div_rem(d).1
    }

    fn monic(&self) -> UPoly {
        let inv = self.lead().recip();
        UPoly(self.0.iter().map(|c| c * &inv).collect())
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::new(self.0.iter().enumerate().skip(1).map(|(i, c)| c * Rational::from_integer(i.into())).collect())
    }

    /// Monic gcd `g` together with `s` such that `s·self ≡ g (mod o)`.
    pub fn gcd_ext(&self, o: &UPoly) -> (UPoly, UPoly) {
        let (mut r0, mut r1) = (o.clone(), self.rem(o));
        let (mut s0, mut s1) = (UPoly::zero(), UPoly::constant(Rational::one()));
        if r1.is_zero() {
            return (o.monic(), UPoly::zero());
        }
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = s0.sub(&q.mul(&s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        let inv = r0.lead().recip();
        let scale = UPoly::constant(inv);
        (r0.mul(&scale), s0.mul(&scale))
    }

    pub fn gcd(&self, o: &UPoly) -> UPoly {
        if self.is_zero() {
            return if o.is_zero() { UPoly::zero() } else { o.monic() };
        }
        self.gcd_ext(o).0
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree() == Some(0)
    }
}

/// Rank of a matrix over `ℚ[t]/(f)` at every root of squarefree `f` of
/// positive degree; when roots disagree, the maximum.
pub fn rank_mod(matrix: &[Vec<UPoly>], f: &UPoly) -> usize {
    let reduced: Vec<Vec<UPoly>> = matrix.iter().map(|r| r.iter().map(|e| e.rem(f)).collect()).collect();
    match eliminate(reduced, f) {
        Ok(r) => r,
        Err(g) => {
            let (h, _) = f.div_rem(&g);
            rank_mod(matrix, &g).max(rank_mod(matrix, &h))
        }
    }
}

/// Gaussian elimination over the ring; `Err(g)` exposes a proper factor.
fn eliminate(mut a: Vec<Vec<UPoly>>, f: &UPoly) -> Result<usize, UPoly> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][col].is_zero()) else { continue };
        let (g, inv) = a[p][col].gcd_ext(f);
        if g.degree() != Some(0) {
            return Err(g);
        }
        a.swap(r, p);
        let pivot_row: Vec<UPoly> = a[r].iter().map(|e| e.mul(&inv).rem(f)).collect();
        for row in a.iter_mut().skip(r + 1) {
            if row[col].is_zero() {
                continue;
            }
            let k = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row).skip(col) {
                if !pv.is_zero() {
                    *v = v.sub(&k.mul(pv)).rem(f);
                }
            }
        }
        a[r] = pivot_row;
        r += 1;
    }
    Ok(r)
}
