//! Text grammar for polynomials.
//!
//! ```text
//! expr    := ['+'|'-'] term (('+'|'-') term)*
//! term    := unary (('*'|'/') unary)*
//! unary   := ('+'|'-') unary | power
//! power   := atom ['^' integer]
//! atom    := integer | 'i' | variable | '(' expr ')'
//! ```
//!
//! Division is only allowed by nonzero constants, which is how rational
//! literals such as `3/4` are written. Whitespace is ignored.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use super::{GaussianRational, Monomial, MultiPoly, UniPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{name}` at byte {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("division by a non-constant or zero expression at byte {pos}")]
    BadDivision { pos: usize },
    #[error("non-homogeneous polynomial: found degrees {degrees:?}")]
    NonHomogeneous { degrees: Vec<u32> },
}

/// Variable context for [`parse_poly`].
#[derive(Debug, Clone)]
pub enum Variables {
    /// Homogeneous polynomial in the listed variables.
    Homogeneous(Vec<String>),
    /// Polynomial in a single variable, any degree.
    Univariate(String),
}

impl Variables {
    /// `x0..xn`
    pub fn projective(n: usize) -> Self {
        Variables::Homogeneous(MultiPoly::default_names(n + 1))
    }

    /// `z`
    pub fn z() -> Self {
        Variables::Univariate("z".into())
    }

    fn names(&self) -> Vec<&str> {
        match self {
            Variables::Homogeneous(v) => v.iter().map(String::as_str).collect(),
            Variables::Univariate(v) => vec![v.as_str()],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParsedPoly {
    Multi(MultiPoly),
    Uni(UniPoly),
}

pub fn parse_poly(text: &str, vars: &Variables) -> Result<ParsedPoly, ParseError> {
    let sparse = Parser::new(text, vars.names()).parse()?;
    match vars {
        Variables::Homogeneous(names) => homogeneous(sparse, names.len()).map(ParsedPoly::Multi),
        Variables::Univariate(_) => Ok(ParsedPoly::Uni(univariate(sparse))),
    }
}

pub fn parse_homogeneous(text: &str, vars: &[String]) -> Result<MultiPoly, ParseError> {
    let names: Vec<&str> = vars.iter().map(String::as_str).collect();
    let sparse = Parser::new(text, names).parse()?;
    homogeneous(sparse, vars.len())
}

/// Parses a polynomial in `z`.
pub fn parse_univariate(text: &str) -> Result<UniPoly, ParseError> {
    Parser::new(text, vec!["z"]).parse().map(univariate)
}

type Sparse = BTreeMap<Vec<u32>, GaussianRational>;

fn homogeneous(sparse: Sparse, nvars: usize) -> Result<MultiPoly, ParseError> {
    let mut degrees: Vec<u32> = sparse.keys().map(|e| e.iter().sum()).collect();
    degrees.sort_unstable();
    degrees.dedup();
    if degrees.len() > 1 {
        return Err(ParseError::NonHomogeneous { degrees });
    }
    let degree = degrees.first().copied().unwrap_or(0);
    Ok(MultiPoly::from_terms(nvars, degree, sparse.into_iter().map(|(e, c)| (Monomial::new(e), c)))
        .expect("terms checked homogeneous"))
}

fn univariate(sparse: Sparse) -> UniPoly {
    let deg = sparse.keys().map(|e| e[0] as usize).max().unwrap_or(0);
    let mut coeffs = vec![GaussianRational::zero(); deg + 1];
    for (e, c) in sparse {
        coeffs[e[0] as usize] = c;
    }
    UniPoly::from_coeffs(coeffs)
}

fn sparse_add(a: &mut Sparse, b: Sparse, sign: bool) {
    for (e, c) in b {
        let c = if sign { c } else { -c };
        let entry = a.entry(e.clone()).or_insert_with(GaussianRational::zero);
        *entry += &c;
        if entry.is_zero() {
            a.remove(&e);
        }
    }
}

fn sparse_mul(a: &Sparse, b: &Sparse) -> Sparse {
    let mut out = Sparse::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            let term = BTreeMap::from([(e, ca * cb)]);
            sparse_add(&mut out, term, true);
        }
    }
    out
}

fn sparse_constant(nvars: usize, c: GaussianRational) -> Sparse {
    let mut s = Sparse::new();
    if !c.is_zero() {
        s.insert(vec![0; nvars], c);
    }
    s
}

/// Returns the constant value if the polynomial has no variable terms.
fn as_constant(s: &Sparse) -> Option<GaussianRational> {
    match s.len() {
        0 => Some(GaussianRational::zero()),
        1 => s.iter().next().filter(|(e, _)| e.iter().all(|x| *x == 0)).map(|(_, c)| c.clone()),
        _ => None,
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: Vec<&'a str>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, vars: Vec<&'a str>) -> Self {
        Parser { src: text.as_bytes(), pos: 0, vars }
    }

    fn nvars(&self) -> usize {
        self.vars.len()
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { pos: self.pos, msg: msg.into() })
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

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn parse(mut self) -> Result<Sparse, ParseError> {
        if self.peek().is_none() {
            return self.err("empty expression");
        }
        let e = self.expr()?;
        if let Some(c) = self.peek() {
            return self.err(format!("unexpected `{}`", c as char));
        }
        Ok(e)
    }

    fn expr(&mut self) -> Result<Sparse, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                let t = self.term()?;
                sparse_add(&mut acc, t, true);
            } else if self.eat(b'-') {
                let t = self.term()?;
                sparse_add(&mut acc, t, false);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Sparse, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                let f = self.unary()?;
                acc = sparse_mul(&acc, &f);
            } else if self.peek() == Some(b'/') {
                let pos = self.pos;
                self.pos += 1;
                let f = self.unary()?;
                let c = as_constant(&f).filter(|c| !c.is_zero()).ok_or(ParseError::BadDivision { pos })?;
                let inv = c.inv().unwrap();
                acc = acc.into_iter().map(|(e, v)| (e, &v * &inv)).collect();
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Sparse, ParseError> {
        if self.eat(b'-') {
            let u = self.unary()?;
            return Ok(u.into_iter().map(|(e, c)| (e, -c)).collect());
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Sparse, ParseError> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            self.pos = start;
            return self.err("expected a non-negative integer exponent");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let e: u32 = match text.parse() {
            Ok(e) if e <= 1000 => e,
            _ => {
                self.pos = start;
                return self.err("exponent too large");
            }
        };
        let mut acc = sparse_constant(self.nvars(), GaussianRational::one());
        for _ in 0..e {
            acc = sparse_mul(&acc, &base);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Sparse, ParseError> {
        match self.peek() {
            None => self.err("unexpected end of input"),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return self.err("expected `)`");
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let n: num_bigint::BigInt = text.parse().unwrap();
                let c = GaussianRational::real(num_rational::BigRational::from_integer(n));
                Ok(sparse_constant(self.nvars(), c))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                if let Some(idx) = self.vars.iter().position(|v| *v == name) {
                    let mut e = vec![0; self.nvars()];
                    e[idx] = 1;
                    return Ok(BTreeMap::from([(e, GaussianRational::one())]));
                }
                if name == "i" {
                    return Ok(sparse_constant(self.nvars(), GaussianRational::i()));
                }
                Err(ParseError::UnknownVariable { name: name.to_string(), pos: start })
            }
            Some(c) => self.err(format!("unexpected `{}`", c as char)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn proj(n: usize) -> Vec<String> {
        MultiPoly::default_names(n + 1)
    }

    #[test]
    fn reads_quadric() {
        let q = parse_homogeneous("x0*x3 - x1*x2", &proj(3)).unwrap();
        assert_eq!(q.len(), 2);
        assert_eq!(q.degree(), 2);
    }

    #[test]
    fn reads_univariate() {
        assert_eq!(parse_univariate("z^3").unwrap(), UniPoly::from_ints(&[0, 0, 0, 1]));
        let p = parse_univariate("(z - 1)*(z + 1) + 3/2*i").unwrap();
        assert_eq!(p.coeff(0), &GaussianRational::from_int(-1) + &GaussianRational::from_parts((0, 1), (3, 2)));
        match parse_poly("z^2", &Variables::z()).unwrap() {
            ParsedPoly::Uni(u) => assert_eq!(u.degree(), Some(2)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_non_homogeneous() {
        let e = parse_homogeneous("x0^2 + x1", &proj(1)).unwrap_err();
        assert_eq!(e, ParseError::NonHomogeneous { degrees: vec![1, 2] });
    }

    #[test]
    fn error_positions() {
        assert_eq!(
            parse_homogeneous("x0 + y", &proj(1)).unwrap_err(),
            ParseError::UnknownVariable { name: "y".into(), pos: 5 }
        );
        assert!(matches!(parse_univariate("z +* 2"), Err(ParseError::Syntax { pos: 3, .. })));
        assert!(matches!(parse_univariate("(z"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_univariate("z / z"), Err(ParseError::BadDivision { pos: 2 })));
        assert!(matches!(parse_univariate("z / 0"), Err(ParseError::BadDivision { .. })));
        assert!(matches!(parse_univariate(""), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_univariate("z^"), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn precedence() {
        // -z^2 is -(z^2); 2*3/4 is 3/2.
        assert_eq!(parse_univariate("-z^2").unwrap(), UniPoly::from_ints(&[0, 0, -1]));
        assert_eq!(parse_univariate("2*3/4").unwrap(), UniPoly::constant(GaussianRational::from_ratio(3, 2)));
        assert_eq!(parse_univariate("i^2").unwrap(), UniPoly::from_ints(&[-1]));
        assert_eq!(parse_univariate("z - z").unwrap(), UniPoly::zero());
    }
}
