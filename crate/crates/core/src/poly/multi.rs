use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::{GaussianRational, PolyError, UniPoly};

/// Exponent vector ordered by graded reverse lexicographic order with
/// `x0 > x1 > … > xn`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, if `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        self.divides(other)
            .then(|| Monomial(other.0.iter().zip(&self.0).map(|(b, a)| b - a).collect()))
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Indices of the variables that occur.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, e)| **e > 0).map(|(i, _)| i)
    }

    /// All monomials of total degree `d` in `nvars` variables, in descending
    /// grevlex order.
    pub fn all_of_degree(nvars: usize, d: u32) -> Vec<Monomial> {
        fn rec(prefix: &mut Vec<u32>, left: u32, nvars: usize, out: &mut Vec<Monomial>) {
            if prefix.len() + 1 == nvars {
                prefix.push(left);
                out.push(Monomial(prefix.clone()));
                prefix.pop();
                return;
            }
            for e in (0..=left).rev() {
                prefix.push(e);
                rec(prefix, left - e, nvars, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if nvars == 0 {
            if d == 0 {
                out.push(Monomial(Vec::new()));
            }
            return out;
        }
        rec(&mut Vec::with_capacity(nvars), d, nvars, &mut out);
        out.sort_by(|a, b| b.cmp(a));
        out
    }

    pub fn eval_uni(&self, components: &[UniPoly]) -> UniPoly {
        self.0
            .iter()
            .zip(components)
            .filter(|(e, _)| **e > 0)
            .fold(UniPoly::one(), |acc, (e, f)| &acc * &f.pow(*e))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        // Smaller exponent in the last differing variable is larger.
        for (a, b) in self.0.iter().zip(&other.0).rev() {
            match a.cmp(b) {
                Ordering::Equal => continue,
                ord => return ord.reverse(),
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Writes `x0^2*x3`; the constant monomial prints as `1`.
pub(crate) fn fmt_monomial(m: &Monomial, names: &[String], f: &mut impl fmt::Write) -> fmt::Result {
    let mut first = true;
    for (i, e) in m.0.iter().enumerate() {
        if *e == 0 {
            continue;
        }
        if !first {
            f.write_char('*')?;
        }
        first = false;
        match e {
            1 => write!(f, "{}", names[i])?,
            _ => write!(f, "{}^{}", names[i], e)?,
        }
    }
    if first {
        f.write_char('1')?;
    }
    Ok(())
}

/// Homogeneous polynomial in `x0..xn` with exact coefficients.
///
/// Terms are kept in ascending grevlex order, so the leading term is the last
/// entry. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiPoly {
    nvars: usize,
    degree: u32,
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl MultiPoly {
    pub fn zero(nvars: usize, degree: u32) -> Self {
        MultiPoly { nvars, degree, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: GaussianRational) -> Self {
        MultiPoly::from_terms(nvars, 0, [(Monomial::one(nvars), c)]).unwrap()
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        MultiPoly::monomial(Monomial::var(nvars, i), GaussianRational::one())
    }

    pub fn monomial(m: Monomial, c: GaussianRational) -> Self {
        let nvars = m.nvars();
        let degree = m.degree();
        MultiPoly::from_terms(nvars, degree, [(m, c)]).unwrap()
    }

    /// Builds a homogeneous polynomial of the declared degree, merging
    /// repeated monomials.
    pub fn from_terms(
        nvars: usize,
        degree: u32,
        terms: impl IntoIterator<Item = (Monomial, GaussianRational)>,
    ) -> Result<Self, PolyError> {
        let mut p = MultiPoly::zero(nvars, degree);
        for (m, c) in terms {
            if m.nvars() != nvars {
                return Err(PolyError::Arity { expected: nvars, found: m.nvars() });
            }
            if m.degree() != degree && !c.is_zero() {
                return Err(PolyError::NonHomogeneous { expected: degree, found: m.degree() });
            }
            p.add_term(m, &c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> GaussianRational {
        self.terms.get(m).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &GaussianRational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.keys().next_back()
    }

    fn add_term(&mut self, m: Monomial, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub(crate) fn pop_leading(&mut self) -> Option<(Monomial, GaussianRational)> {
        self.terms.pop_last()
    }

    pub(crate) fn push_term(&mut self, m: Monomial, c: GaussianRational) {
        debug_assert_eq!(m.degree(), self.degree);
        self.add_term(m, &c);
    }

    /// `self -= c · m · g`, in place.
    pub fn sub_scaled(&mut self, g: &MultiPoly, c: &GaussianRational, m: &Monomial) {
        for (gm, gc) in &g.terms {
            let t = -(gc * c);
            self.add_term(gm.mul(m), &t);
        }
        if self.terms.is_empty() {
            self.degree = g.degree + m.degree();
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> MultiPoly {
        let mut p = MultiPoly::zero(self.nvars, self.degree);
        if !c.is_zero() {
            p.terms = self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect();
        }
        p
    }

    /// Scales so that the leading coefficient is one.
    pub fn monic(&self) -> MultiPoly {
        match self.leading_term() {
            None => self.clone(),
            Some((_, lc)) => self.scale(&lc.inv().unwrap()),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            degree: self.degree + m.degree(),
            terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect(),
        }
    }

    pub fn add(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.check_compatible(other)?;
        let mut p = self.clone();
        for (m, c) in &other.terms {
            p.add_term(m.clone(), c);
        }
        if self.is_zero() {
            p.degree = other.degree;
        }
        Ok(p)
    }

    pub fn sub(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.add(&other.scale(&-GaussianRational::one()))
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, other.nvars, "multiplying polynomials in different rings");
        let mut p = MultiPoly::zero(self.nvars, self.degree + other.degree);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                p.add_term(ma.mul(mb), &(ca * cb));
            }
        }
        p
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut acc = MultiPoly::constant(self.nvars, GaussianRational::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    fn check_compatible(&self, other: &MultiPoly) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            return Err(PolyError::Arity { expected: self.nvars, found: other.nvars });
        }
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(PolyError::NonHomogeneous { expected: self.degree, found: other.degree });
        }
        Ok(())
    }

    /// Sum of the moduli of the coefficients.
    pub fn coefficient_norm(&self) -> f64 {
        self.terms.values().map(GaussianRational::abs_f64).sum()
    }

    /// Exact substitution `x_i ← components[i]`.
    pub fn compose(&self, components: &[UniPoly]) -> Result<UniPoly, PolyError> {
        if components.len() != self.nvars {
            return Err(PolyError::Arity { expected: self.nvars, found: components.len() });
        }
        // Cache powers per variable: the same powers recur across terms.
        let mut powers: Vec<Vec<UniPoly>> = components.iter().map(|f| vec![UniPoly::one(), f.clone()]).collect();
        let mut out = UniPoly::zero();
        for (m, c) in &self.terms {
            let mut t = UniPoly::constant(c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let pw = &mut powers[i];
                while pw.len() <= e as usize {
                    let next = &pw[pw.len() - 1] * &components[i];
                    pw.push(next);
                }
                t = &t * &pw[e as usize];
            }
            out = &out + &t;
        }
        Ok(out)
    }

    pub fn eval(&self, point: &[GaussianRational]) -> GaussianRational {
        let mut acc = GaussianRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m.exponents()) {
                if e > 0 {
                    t = &t * &x.pow(e);
                }
            }
            acc += &t;
        }
        acc
    }

    pub fn default_names(nvars: usize) -> Vec<String> {
        (0..nvars).map(|i| format!("x{i}")).collect()
    }

    /// Renders with the given variable names in the polynomial grammar.
    pub fn display_with(&self, names: &[String]) -> String {
        use std::fmt::Write;
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = (c.im().is_zero() && c.re().is_negative()) || (c.re().is_zero() && c.im().is_negative());
            let c = if negative { -c } else { c.clone() };
            match (k, negative) {
                (0, true) => s.push('-'),
                (0, false) => {}
                (_, true) => s.push_str(" - "),
                (_, false) => s.push_str(" + "),
            }
            if m.degree() == 0 {
                write!(s, "{c}").unwrap();
            } else if c.is_one() {
                fmt_monomial(m, names, &mut s).unwrap();
            } else {
                write!(s, "{c}*").unwrap();
                fmt_monomial(m, names, &mut s).unwrap();
            }
        }
        s
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&MultiPoly::default_names(self.nvars)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(e: &[u32]) -> Monomial {
        Monomial::new(e.to_vec())
    }

    #[test]
    fn grevlex_order() {
        // x0 > x1 > x2
        assert!(m(&[1, 0, 0]) > m(&[0, 1, 0]));
        assert!(m(&[0, 1, 0]) > m(&[0, 0, 1]));
        // x1^2 > x0*x2 in grevlex (x2 is the last variable)
        assert!(m(&[0, 2, 0]) > m(&[1, 0, 1]));
        // degree first
        assert!(m(&[0, 0, 2]) > m(&[1, 0, 0]));
        let all = Monomial::all_of_degree(2, 2);
        assert_eq!(all, vec![m(&[2, 0]), m(&[1, 1]), m(&[0, 2])]);
        assert_eq!(Monomial::all_of_degree(4, 3).len(), 20);
    }

    #[test]
    fn compose_substitutes_exactly() {
        let x0 = MultiPoly::var(2, 0);
        let x1 = MultiPoly::var(2, 1);
        let q = x0.mul(&x0).add(&x1.mul(&x1)).unwrap();
        let f = [UniPoly::one(), UniPoly::z()];
        assert_eq!(q.compose(&f).unwrap(), UniPoly::from_ints(&[1, 0, 1]));
        assert!(matches!(q.compose(&f[..1]), Err(PolyError::Arity { .. })));
    }

    #[test]
    fn homogeneity_is_enforced() {
        let r = MultiPoly::from_terms(2, 2, [(m(&[2, 0]), GaussianRational::one()), (m(&[0, 1]), GaussianRational::one())]);
        assert!(matches!(r, Err(PolyError::NonHomogeneous { .. })));
        let a = MultiPoly::var(2, 0);
        assert!(a.add(&a.mul(&a)).is_err());
    }
}
