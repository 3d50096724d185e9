//! Exact matrix rank, rational solving and symbolic fraction-free elimination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::poly::{Poly, Rational};

/// Rank of an integer matrix by fraction-free (Bareiss) elimination.
pub fn bareiss_rank(mut a: Vec<Vec<BigInt>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut r = 0;
    for col in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][col].is_zero()) else { continue };
        a.swap(r, p);
        let (top, rest) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let piv = &pivot_row[col];
        for row in rest.iter_mut() {
            let f = std::mem::take(&mut row[col]);
            for j in col + 1..cols {
                let v = piv * &row[j] - &f * &pivot_row[j];
                row[j] = v / &prev;
            }
        }
        prev = piv.clone();
        r += 1;
    }
    r
}

/// Clears denominators row by row; row scaling preserves rank.
pub fn integer_rows(a: &[Vec<Rational>]) -> Vec<Vec<BigInt>> {
    a.iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            row.iter().map(|q| q.numer() * (&l / q.denom())).collect()
        })
        .collect()
}

/// Exact rank of a rational matrix.
pub fn rank(a: &[Vec<Rational>]) -> usize {
    bareiss_rank(integer_rows(a))
}

/// Solves `a·x = b` exactly. Returns `None` if inconsistent; free unknowns
/// are set to zero.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, v)| {
            let mut r = row.clone();
            r.push(v.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][col].recip();
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][cols].clone();
    }
    Some(x)
}

/// Outcome of symbolic elimination: the rank over the rational function
/// field and the successive pivots, each a minor of the input.
#[derive(Clone, Debug)]
pub struct SymbolicElimination {
    pub rank: usize,
    pub pivots: Vec<Poly>,
}

impl SymbolicElimination {
    /// The last pivot: a maximal nonvanishing minor.
    pub fn final_pivot(&self) -> Option<&Poly> {
        self.pivots.last()
    }
}

/// Fraction-free elimination over polynomial entries with full pivoting:
/// the pivot is the nonzero entry of lowest total degree, then fewest
/// terms. Fails with `Intractable` when an entry exceeds `max_terms`.
pub fn symbolic_bareiss(mut a: Vec<Vec<Poly>>, max_terms: usize) -> Result<SymbolicElimination> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut prev = Poly::one();
    let mut pivots = Vec::new();
    for k in 0..rows.min(cols) {
        let mut best: Option<(u32, usize, usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(k) {
            for (j, e) in row.iter().enumerate().skip(k) {
                if e.is_zero() {
                    continue;
                }
                let key = (e.total_degree(), e.len(), i, j);
                if best.as_ref().is_none_or(|b| (key.0, key.1) < (b.0, b.1)) {
                    best = Some(key);
                }
            }
        }
        let Some((_, _, pi, pj)) = best else { break };
        a.swap(k, pi);
        for row in a.iter_mut() {
            row.swap(k, pj);
        }
        let (top, rest) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        let piv = &pivot_row[k];
        rest.par_iter_mut().try_for_each(|row| -> Result<()> {
            let f = std::mem::take(&mut row[k]);
            for j in k + 1..cols {
                let num = &(piv * &row[j]) - &(&f * &pivot_row[j]);
                let q = num.exact_div(&prev).ok_or_else(|| Error::Intractable("inexact Bareiss division".into()))?;
                if q.len() > max_terms {
                    return Err(Error::Intractable(format!("entry with {} terms", q.len())));
                }
                row[j] = q;
            }
            Ok(())
        })?;
        prev = piv.clone();
        pivots.push(prev.clone());
    }
    Ok(SymbolicElimination { rank: pivots.len(), pivots })
}
