//! Jet-space geometry: coordinates of `J^r(R^{n+m}, n)`, symmetric
//! multi-indices and the dimension formulas.
//!
//! All indices are 1-based. The total order on [`CoordId`] is the global
//! coordinate enumeration: independent variables, then dependent variables,
//! then derivative coordinates by order, dependent index and lexicographic
//! multi-index. Monomial orders in [`crate::poly`] are built on top of it.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Largest supported jet order.
pub const MAX_ORDER: usize = 8;

/// Sorted multi-index `j_1 <= ... <= j_k` of a derivative coordinate.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    len: u8,
    idx: [u8; MAX_ORDER],
}

impl MultiIndex {
    /// Sorts `raw`, checking every entry lies in `1..=n`.
    pub fn new(raw: &[usize], n: usize) -> Result<Self> {
        if raw.is_empty() || raw.len() > MAX_ORDER {
            return Err(Error::IndexOutOfRange(format!("multi-index length {} outside 1..={MAX_ORDER}", raw.len())));
        }
        let mut idx = [0u8; MAX_ORDER];
        for (slot, &j) in idx.iter_mut().zip(raw) {
            if j == 0 || j > n || j > u8::MAX as usize {
                return Err(Error::IndexOutOfRange(format!("index {j} outside 1..={n}")));
            }
            *slot = j as u8;
        }
        idx[..raw.len()].sort_unstable();
        Ok(MultiIndex { len: raw.len() as u8, idx })
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn entries(&self) -> impl Iterator<Item = usize> + '_ {
        self.idx[..self.len()].iter().map(|&j| j as usize)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.entries().collect()
    }

    /// `J ∪ {i}`, canonicalized. Returns `None` past [`MAX_ORDER`].
    pub fn with(&self, i: usize) -> Option<MultiIndex> {
        if self.len() >= MAX_ORDER || i == 0 || i > u8::MAX as usize {
            return None;
        }
        let mut out = *self;
        out.idx[out.len()] = i as u8;
        out.len += 1;
        let len = out.len();
        out.idx[..len].sort_unstable();
        Some(out)
    }

    /// Single-entry index `(i)`.
    pub fn single(i: usize) -> MultiIndex {
        let mut idx = [0u8; MAX_ORDER];
        idx[0] = i as u8;
        MultiIndex { len: 1, idx }
    }

    /// Removes one occurrence of `i`; `None` if absent.
    pub fn without(&self, i: usize) -> Option<MultiIndex> {
        let pos = self.entries().position(|j| j == i)?;
        let mut v = self.to_vec();
        v.remove(pos);
        if v.is_empty() {
            return None;
        }
        let mut idx = [0u8; MAX_ORDER];
        for (slot, j) in idx.iter_mut().zip(&v) {
            *slot = *j as u8;
        }
        Some(MultiIndex { len: v.len() as u8, idx })
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_vec())
    }
}

/// A coordinate of the jet space.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoordId {
    /// Independent variable `x_i`.
    X(u16),
    /// Dependent variable `u_α`.
    U(u16),
    /// Derivative `u_{α,J}`.
    D(u16, MultiIndex),
}

impl CoordId {
    pub fn x(i: usize) -> CoordId {
        CoordId::X(i as u16)
    }

    pub fn u(alpha: usize) -> CoordId {
        CoordId::U(alpha as u16)
    }

    /// Derivative coordinate `u_{α,J}`; panics on an invalid index. Use
    /// [`JetSpec::coord`] for checked construction.
    pub fn d(alpha: usize, raw: &[usize]) -> CoordId {
        let n = raw.iter().copied().max().unwrap_or(1);
        CoordId::D(alpha as u16, MultiIndex::new(raw, n).expect("valid multi-index"))
    }

    /// Derivative order; zero for base coordinates.
    pub fn order(&self) -> usize {
        match self {
            CoordId::X(_) | CoordId::U(_) => 0,
            CoordId::D(_, j) => j.len(),
        }
    }

    pub fn is_base(&self) -> bool {
        self.order() == 0
    }

    /// Dependent index of `U` and `D` coordinates.
    pub fn alpha(&self) -> Option<usize> {
        match self {
            CoordId::X(_) => None,
            CoordId::U(a) | CoordId::D(a, _) => Some(*a as usize),
        }
    }

    /// The coordinate `D_i` maps this one to under the contact structure:
    /// `u_α ↦ u_{α,i}`, `u_{α,J} ↦ u_{α,J∪i}`. `None` for `x`.
    pub fn raised(&self, i: usize) -> Option<CoordId> {
        match self {
            CoordId::X(_) => None,
            CoordId::U(a) => Some(CoordId::D(*a, MultiIndex::single(i))),
            CoordId::D(a, j) => j.with(i).map(|j| CoordId::D(*a, j)),
        }
    }

    fn sort_key(&self) -> (u8, usize, u16, MultiIndex, u16) {
        let zero = MultiIndex { len: 0, idx: [0; MAX_ORDER] };
        match *self {
            CoordId::X(i) => (0, 0, 0, zero, i),
            CoordId::U(a) => (1, 0, a, zero, 0),
            CoordId::D(a, j) => (2, j.len(), a, j, 0),
        }
    }
}

impl Ord for CoordId {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for CoordId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CoordId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoordId::X(i) => write!(f, "x[{i}]"),
            CoordId::U(a) => write!(f, "u[{a}]"),
            CoordId::D(a, j) => {
                write!(f, "u[{a};")?;
                for (k, e) in j.entries().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{e}")?;
                }
                f.write_str("]")
            }
        }
    }
}

impl fmt::Debug for CoordId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Shape of a jet space: `n` independent variables, `m` dependent
/// variables, order `r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct JetSpec {
    pub n: usize,
    pub m: usize,
    pub r: usize,
}

impl JetSpec {
    pub fn new(n: usize, m: usize, r: usize) -> Result<Self> {
        if n == 0 || m == 0 || r == 0 {
            return Err(Error::InvalidSpec(format!("n={n}, m={m}, r={r}: all must be >= 1")));
        }
        if r > MAX_ORDER || n > u8::MAX as usize || m > u16::MAX as usize {
            return Err(Error::InvalidSpec(format!(
                "n={n}, m={m}, r={r} exceeds supported bounds (n<=255, r<={MAX_ORDER})"
            )));
        }
        Ok(JetSpec { n, m, r })
    }

    /// Same base with a different order.
    pub fn with_order(&self, r: usize) -> Result<Self> {
        JetSpec::new(self.n, self.m, r)
    }

    /// `n + m·C(n+r, r)`.
    pub fn dimension(&self) -> usize {
        self.n + self.m * binomial(self.n + self.r, self.r)
    }

    /// Checked `u_{α,J}` for this spec.
    pub fn coord(&self, alpha: usize, raw: &[usize]) -> Result<CoordId> {
        if alpha == 0 || alpha > self.m {
            return Err(Error::IndexOutOfRange(format!("dependent index {alpha} outside 1..={}", self.m)));
        }
        let j = self.canonicalize_index(raw)?;
        Ok(CoordId::D(alpha as u16, j))
    }

    /// Sorts a raw derivative index after bounds checking against `n` and `r`.
    pub fn canonicalize_index(&self, raw: &[usize]) -> Result<MultiIndex> {
        if raw.len() > self.r {
            return Err(Error::IndexOutOfRange(format!("derivative order {} exceeds jet order {}", raw.len(), self.r)));
        }
        MultiIndex::new(raw, self.n)
    }

    /// Whether `c` is a coordinate of this jet space.
    pub fn contains(&self, c: &CoordId) -> bool {
        match *c {
            CoordId::X(i) => i >= 1 && (i as usize) <= self.n,
            CoordId::U(a) => a >= 1 && (a as usize) <= self.m,
            CoordId::D(a, j) => {
                a >= 1 && (a as usize) <= self.m && j.len() <= self.r && j.entries().all(|e| e >= 1 && e <= self.n)
            }
        }
    }

    /// All coordinates in canonical order.
    pub fn coords(&self) -> Vec<CoordId> {
        let mut out = Vec::with_capacity(self.dimension());
        out.extend((1..=self.n).map(CoordId::x));
        out.extend((1..=self.m).map(CoordId::u));
        for k in 1..=self.r {
            let indices = sorted_indices(self.n, k);
            for alpha in 1..=self.m {
                for j in &indices {
                    out.push(CoordId::D(alpha as u16, MultiIndex::new(j, self.n).unwrap()));
                }
            }
        }
        out
    }

    /// Base coordinates `x_1..x_n, u_1..u_m`.
    pub fn base_coords(&self) -> Vec<CoordId> {
        (1..=self.n).map(CoordId::x).chain((1..=self.m).map(CoordId::u)).collect()
    }
}

/// Non-decreasing sequences of length `k` over `1..=n`, lexicographic.
pub fn sorted_indices(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in start..=n {
            cur.push(j);
            go(n, k, j, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, k, 1, &mut Vec::with_capacity(k), &mut out);
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k.min(n));
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Dimensions of the affine and projective algebras of `R^{n+m}`:
/// `((n+m)(n+m+1), (n+m+1)^2 - 1)`.
pub fn algebra_dims(n: usize, m: usize) -> (usize, usize) {
    let d = n + m;
    (d * (d + 1), (d + 1) * (d + 1) - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, m: usize, r: usize) -> JetSpec {
        JetSpec::new(n, m, r).unwrap()
    }

    #[test]
    fn dimensions() {
        assert_eq!(spec(2, 2, 2).dimension(), 14);
        assert_eq!(spec(3, 2, 2).dimension(), 23);
        assert_eq!(spec(2, 1, 3).dimension(), 12);
        assert_eq!(spec(2, 2, 3).dimension(), 22);
        assert_eq!(spec(2, 3, 2).dimension(), 20);
        assert_eq!(spec(3, 1, 3).dimension(), 23);
    }

    #[test]
    fn binomial_small() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(5, 5), 1);
    }

    #[test]
    fn enumeration_order() {
        let c = spec(1, 1, 1).coords();
        assert_eq!(c, vec![CoordId::x(1), CoordId::u(1), CoordId::d(1, &[1])]);

        let c = spec(2, 1, 2).coords();
        assert_eq!(c.len(), 8);
        assert_eq!(&c[5..], &[CoordId::d(1, &[1, 1]), CoordId::d(1, &[1, 2]), CoordId::d(1, &[2, 2])]);
        assert_eq!(spec(3, 1, 3).coords().len(), 23);

        // enumeration is sorted under the global order
        let c = spec(3, 2, 3).coords();
        assert!(c.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn canonicalization() {
        let s = spec(3, 1, 3);
        assert_eq!(s.canonicalize_index(&[2, 1]).unwrap().to_vec(), vec![1, 2]);
        assert_eq!(s.canonicalize_index(&[3, 1, 1]).unwrap().to_vec(), vec![1, 1, 3]);
        assert!(matches!(s.canonicalize_index(&[0, 1]), Err(Error::IndexOutOfRange(_))));
        assert!(matches!(s.canonicalize_index(&[4]), Err(Error::IndexOutOfRange(_))));
        assert!(matches!(s.canonicalize_index(&[1, 1, 1, 1]), Err(Error::IndexOutOfRange(_))));
    }

    #[test]
    fn algebra_dimensions() {
        assert_eq!(algebra_dims(2, 2), (20, 24));
        assert_eq!(algebra_dims(3, 2), (30, 35));
        assert_eq!(algebra_dims(2, 1), (12, 15));
        assert_eq!(algebra_dims(2, 1).0, spec(2, 1, 3).dimension());
    }

    #[test]
    fn invalid_spec() {
        assert!(JetSpec::new(0, 1, 1).is_err());
        assert!(JetSpec::new(1, 0, 1).is_err());
        assert!(JetSpec::new(1, 1, 0).is_err());
        assert!(JetSpec::new(1, 1, MAX_ORDER + 1).is_err());
    }

    #[test]
    fn raising() {
        assert_eq!(CoordId::u(2).raised(1), Some(CoordId::d(2, &[1])));
        assert_eq!(CoordId::d(1, &[2]).raised(1), Some(CoordId::d(1, &[1, 2])));
        assert_eq!(CoordId::x(1).raised(1), None);
    }

    #[test]
    fn display() {
        assert_eq!(CoordId::d(1, &[2, 1]).to_string(), "u[1;1,2]");
        assert_eq!(CoordId::x(3).to_string(), "x[3]");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn dimension_strictly_increasing(n in 1usize..6, m in 1usize..4, r in 1usize..5) {
                let d = spec(n, m, r).dimension();
                prop_assert!(spec(n + 1, m, r).dimension() > d);
                prop_assert!(spec(n, m + 1, r).dimension() > d);
                prop_assert!(spec(n, m, r + 1).dimension() > d);
            }

            #[test]
            fn enumeration_distinct(n in 1usize..5, m in 1usize..3, r in 1usize..4) {
                let s = spec(n, m, r);
                let c = s.coords();
                let set: std::collections::HashSet<_> = c.iter().collect();
                prop_assert_eq!(set.len(), s.dimension());
                prop_assert!(c.iter().all(|c| s.contains(c)));
            }

            #[test]
            fn canonicalize_order_insensitive(raw in proptest::collection::vec(1usize..5, 1..5), seed in any::<u64>()) {
                let s = spec(4, 1, 4);
                let mut shuffled = raw.clone();
                let len = shuffled.len();
                shuffled.rotate_left((seed as usize) % len);
                shuffled.reverse();
                let a = s.canonicalize_index(&raw).unwrap();
                let b = s.canonicalize_index(&shuffled).unwrap();
                prop_assert_eq!(a, b);
                prop_assert_eq!(s.canonicalize_index(&a.to_vec()).unwrap(), a);
            }
        }
    }
}
