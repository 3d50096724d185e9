//! Text format for expressions, vector fields, systems and charts.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' factor | base ('^' posint)?
//! base   := int | coord | '(' expr ')'
//! coord  := 'x[' int ']' | 'u[' int ']' | 'u[' int ';' int (',' int)* ']'
//! field  := entry (';' entry)*       entry := ('x[' int ']' | 'u[' int ']') ':' expr
//! ```
//!
//! `u[α; j1,…,jk]` is the derivative of `u_α` along `x_j1 … x_jk`, indices
//! in any order. Whitespace is insignificant. Printing via `Display` on
//! [`RatExpr`] and [`VectorField`] produces text this parser accepts.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::jet::{CoordId, JetSpec};
use crate::poly::Rational;
use crate::ratexpr::RatExpr;
use crate::vfield::VectorField;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    spec: &'a JetSpec,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, spec: &'a JetSpec) -> Self {
        Parser { src: src.as_bytes(), pos: 0, spec }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::SyntaxError { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn digits(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse().expect("digit run parses"))
    }

    fn small(&mut self) -> Result<usize> {
        let at = self.pos;
        let v = self.digits()?;
        usize::try_from(v).map_err(|_| Error::SyntaxError { pos: at, msg: "index too large".into() })
    }

    fn expr(&mut self) -> Result<RatExpr> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RatExpr> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'*') {
                acc = &acc * &self.factor()?;
            } else if self.peek() == Some(b'/') {
                let at = self.pos;
                self.pos += 1;
                let d = self.factor()?;
                acc =
                    acc.checked_div(&d).map_err(|_| Error::SyntaxError { pos: at, msg: "division by zero".into() })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<RatExpr> {
        if self.eat(b'-') {
            return Ok(-&self.factor()?);
        }
        let b = self.base()?;
        if self.eat(b'^') {
            let at = self.pos;
            let k = self.small()?;
            if k == 0 {
                return Err(Error::SyntaxError { pos: at, msg: "exponent must be positive".into() });
            }
            let k = u32::try_from(k).map_err(|_| Error::SyntaxError { pos: at, msg: "exponent too large".into() })?;
            return Ok(b.pow(k));
        }
        Ok(b)
    }

    fn base(&mut self) -> Result<RatExpr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => Ok(RatExpr::constant(Rational::from_integer(self.digits()?))),
            Some(b'x' | b'u') => Ok(RatExpr::var(self.coord()?)),
            Some(c) => self.err(format!("unexpected '{}'", c as char)),
            None => self.err("unexpected end of input"),
        }
    }

    fn coord(&mut self) -> Result<CoordId> {
        let kind = self.src[self.pos];
        self.pos += 1;
        self.expect(b'[')?;
        let at = self.pos;
        let a = self.small()?;
        let c = if kind == b'u' && self.eat(b';') {
            let mut raw = vec![self.small()?];
            while self.eat(b',') {
                raw.push(self.small()?);
            }
            self.spec.coord(a, &raw)?
        } else if kind == b'x' {
            if a == 0 || a > self.spec.n {
                return Err(Error::IndexOutOfRange(format!("x[{a}] at {at} outside 1..={}", self.spec.n)));
            }
            CoordId::x(a)
        } else {
            if a == 0 || a > self.spec.m {
                return Err(Error::IndexOutOfRange(format!("u[{a}] at {at} outside 1..={}", self.spec.m)));
            }
            CoordId::u(a)
        };
        self.expect(b']')?;
        Ok(c)
    }

    fn finish(&mut self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            self.err("trailing input")
        }
    }
}

/// Parses an expression over the coordinates of `spec`.
pub fn parse_expr(s: &str, spec: &JetSpec) -> Result<RatExpr> {
    let mut p = Parser::new(s, spec);
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

/// Parses a coordinate such as `u[1;2,1]`.
pub fn parse_coord(s: &str, spec: &JetSpec) -> Result<CoordId> {
    let mut p = Parser::new(s, spec);
    match p.peek() {
        Some(b'x' | b'u') => {}
        _ => return p.err("expected a coordinate"),
    }
    let c = p.coord()?;
    p.finish()?;
    Ok(c)
}

/// Parses a vector field; omitted components are zero.
pub fn parse_field(s: &str, spec: &JetSpec) -> Result<VectorField> {
    let mut p = Parser::new(s, spec);
    let mut xi = vec![RatExpr::zero(); spec.n];
    let mut eta = vec![RatExpr::zero(); spec.m];
    let mut seen = Vec::new();
    if p.eat(b'0') {
        p.finish()?;
        return VectorField::new(spec.n, spec.m, xi, eta);
    }
    loop {
        if !matches!(p.peek(), Some(b'x' | b'u')) {
            return p.err("expected 'x[i]:' or 'u[a]:'");
        }
        let at = p.pos;
        let target = p.coord()?;
        if !target.is_base() {
            return Err(Error::SyntaxError { pos: at, msg: format!("{target} is not a base coordinate") });
        }
        if seen.contains(&target) {
            return Err(Error::SyntaxError { pos: at, msg: format!("duplicate component {target}") });
        }
        seen.push(target);
        p.expect(b':')?;
        let e = p.expr()?;
        if let Some(c) = e.vars().into_iter().find(|c| !c.is_base()) {
            return Err(Error::JetCoordinateInBase(c));
        }
        match target {
            CoordId::X(i) => xi[i as usize - 1] = e,
            CoordId::U(a) => eta[a as usize - 1] = e,
            CoordId::D(..) => unreachable!(),
        }
        if !p.eat(b';') {
            break;
        }
    }
    p.finish()?;
    VectorField::new(spec.n, spec.m, xi, eta)
}

/// Non-empty lines with `#` comments removed, with 1-based line numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn at_line<T>(line: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::SyntaxError { pos, msg } => Error::SyntaxError { pos, msg: format!("line {line}: {msg}") },
        other => other,
    })
}

/// One equation per line.
pub fn parse_system(text: &str, spec: &JetSpec) -> Result<Vec<RatExpr>> {
    lines(text).map(|(n, l)| at_line(n, parse_expr(l, spec))).collect()
}

/// One field per line.
pub fn parse_fields(text: &str, spec: &JetSpec) -> Result<Vec<VectorField>> {
    lines(text).map(|(n, l)| at_line(n, parse_field(l, spec))).collect()
}

/// Lines `coord = expr` giving a chart's solved coordinates.
pub fn parse_solved(text: &str, spec: &JetSpec) -> Result<BTreeMap<CoordId, RatExpr>> {
    let mut out = BTreeMap::new();
    for (n, l) in lines(text) {
        let Some((lhs, rhs)) = l.split_once('=') else {
            return Err(Error::SyntaxError { pos: 0, msg: format!("line {n}: expected 'coordinate = expression'") });
        };
        let c = at_line(n, parse_coord(lhs.trim(), spec))?;
        let e = at_line(n, parse_expr(rhs, spec))?;
        if out.insert(c, e).is_some() {
            return Err(Error::SyntaxError { pos: 0, msg: format!("line {n}: {c} solved twice") });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn s(n: usize, m: usize, r: usize) -> JetSpec {
        JetSpec::new(n, m, r).unwrap()
    }

    #[test]
    fn monge_ampere() {
        let e = parse_expr("u[1;1,1]*u[1;2,2] - u[1;1,2]^2", &s(2, 1, 2)).unwrap();
        let u = |j: &[usize]| RatExpr::var(CoordId::d(1, j));
        assert_eq!(e, &(&u(&[1, 1]) * &u(&[2, 2])) - &u(&[1, 2]).pow(2));
    }

    #[test]
    fn index_symmetry_and_ranges() {
        let sp = s(2, 2, 2);
        assert_eq!(parse_expr("u[1;2,1]", &sp).unwrap(), parse_expr("u[1;1,2]", &sp).unwrap());
        assert!(matches!(parse_expr("u[3;1]", &sp), Err(Error::IndexOutOfRange(_))));
        assert!(matches!(parse_expr("x[3]", &sp), Err(Error::IndexOutOfRange(_))));
        assert!(matches!(parse_expr("u[1;1,1,1]", &sp), Err(Error::IndexOutOfRange(_))));
    }

    #[test]
    fn arithmetic() {
        let sp = s(2, 1, 1);
        let e = parse_expr("1/2*x[1] + (x[2] - 3)^2 / x[1]", &sp).unwrap();
        let x1 = RatExpr::var(CoordId::x(1));
        let x2 = RatExpr::var(CoordId::x(2));
        let want = &x1.scale(&rat(1, 2)) + (&x2 - &RatExpr::int(3)).pow(2).checked_div(&x1).unwrap();
        assert_eq!(e, want);
        assert_eq!(parse_expr("-x[1]^2", &sp).unwrap(), -&x1.pow(2));
    }

    #[test]
    fn syntax_errors_carry_position() {
        let sp = s(1, 1, 1);
        assert_eq!(
            parse_expr("x[1] +", &sp),
            Err(Error::SyntaxError { pos: 6, msg: "unexpected end of input".into() })
        );
        assert!(matches!(parse_expr("x[1]^0", &sp), Err(Error::SyntaxError { .. })));
        assert!(matches!(parse_expr("x[1] x[1]", &sp), Err(Error::SyntaxError { pos: 5, .. })));
        assert!(matches!(parse_expr("1/0", &sp), Err(Error::SyntaxError { pos: 1, .. })));
    }

    #[test]
    fn fields() {
        let sp = s(2, 1, 1);
        let f = parse_field("x[1]: x[2]", &sp).unwrap();
        assert_eq!(f, VectorField::single(2, 1, CoordId::x(1), RatExpr::var(CoordId::x(2))).unwrap());
        let sp1 = s(1, 1, 1);
        let g = parse_field("x[1]: x[1]*x[1]; u[1]: x[1]*u[1]", &sp1).unwrap();
        let x = RatExpr::var(CoordId::x(1));
        let u = RatExpr::var(CoordId::u(1));
        assert_eq!(g, VectorField::new(1, 1, vec![&x * &x], vec![&x * &u]).unwrap());
        assert_eq!(parse_field("u[1]: u[1;1]", &sp1), Err(Error::JetCoordinateInBase(CoordId::d(1, &[1]))));
        assert!(matches!(parse_field("x[1]: 1; x[1]: 2", &sp1), Err(Error::SyntaxError { .. })));
    }

    #[test]
    fn round_trip() {
        let sp = s(2, 2, 2);
        for src in ["u[1;1,1]*u[2;1,2] - u[1;1,2]*u[2;1,1]", "(x[1] + 1/3)/(u[2]^2 - x[2])", "-7/2", "0"] {
            let e = parse_expr(src, &sp).unwrap();
            assert_eq!(parse_expr(&e.to_string(), &sp).unwrap(), e, "{src} printed as {e}");
        }
        let f = parse_field("x[2]: x[1]*u[1]; u[2]: -u[1]/x[1]", &sp).unwrap();
        assert_eq!(parse_field(&f.to_string(), &sp).unwrap(), f);
    }

    #[test]
    fn files() {
        let sp = s(2, 1, 2);
        let sys = parse_system("# MA\nu[1;1,1]*u[1;2,2] - u[1;1,2]^2\n\n", &sp).unwrap();
        assert_eq!(sys.len(), 1);
        let solved = parse_solved("u[1;2,2] = u[1;1,2]^2/u[1;1,1]  # chart\n", &sp).unwrap();
        assert_eq!(solved.len(), 1);
        let err = parse_system("x[1]\nx[1] +\n", &sp).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }
}
