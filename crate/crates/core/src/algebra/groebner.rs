use std::collections::BTreeSet;

use super::AlgebraError;
use crate::poly::{Monomial, MultiPoly};

/// Reduced Gröbner basis of a homogeneous ideal under grevlex.
#[derive(Clone, Debug, PartialEq)]
pub struct GroebnerBasis {
    nvars: usize,
    generators: Vec<MultiPoly>,
}

impl GroebnerBasis {
    pub fn generators(&self) -> &[MultiPoly] {
        &self.generators
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn leading_monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.generators.iter().filter_map(MultiPoly::leading_monomial)
    }

    /// The unit ideal (contains a nonzero constant).
    pub fn is_unit(&self) -> bool {
        self.generators.iter().any(|g| g.degree() == 0 && !g.is_zero())
    }

    /// Full normal form of `f` modulo the basis.
    pub fn normal_form(&self, f: &MultiPoly) -> MultiPoly {
        normal_form(f, &self.generators)
    }

    pub fn contains(&self, f: &MultiPoly) -> bool {
        self.normal_form(f).is_zero()
    }

    /// A monomial is standard when no leading monomial divides it.
    pub fn is_standard(&self, m: &Monomial) -> bool {
        !self.leading_monomials().any(|lm| lm.divides(m))
    }
}

pub(crate) fn normal_form(f: &MultiPoly, basis: &[MultiPoly]) -> MultiPoly {
    let mut f = f.clone();
    let mut rem = MultiPoly::zero(f.nvars(), f.degree());
    while let Some((lm, lc)) = f.leading_term().map(|(m, c)| (m.clone(), c.clone())) {
        let reducer = basis.iter().find_map(|g| {
            let (glm, glc) = g.leading_term()?;
            glm.quotient_of(&lm).map(|q| (g, glc, q))
        });
        match reducer {
            Some((g, glc, q)) => {
                let c = &lc / glc;
                f.sub_scaled(g, &c, &q);
            }
            None => {
                f.pop_leading();
                rem.push_term(lm, lc);
            }
        }
    }
    rem
}

/// Buchberger's algorithm with the normal selection strategy and the
/// coprime-leading-monomial criterion, followed by interreduction.
pub fn groebner(gens: &[MultiPoly]) -> Result<GroebnerBasis, AlgebraError> {
    let nvars = match gens.first() {
        Some(g) => g.nvars(),
        None => return Err(AlgebraError::NoVariables),
    };
    if let Some(bad) = gens.iter().find(|g| g.nvars() != nvars) {
        return Err(AlgebraError::RingMismatch { expected: nvars, found: bad.nvars() });
    }
    Ok(groebner_in(nvars, gens))
}

/// As [`groebner`], for a ring with `nvars` variables (allows an empty list).
pub fn groebner_in(nvars: usize, gens: &[MultiPoly]) -> GroebnerBasis {
    let mut basis: Vec<MultiPoly> = gens.iter().filter(|g| !g.is_zero()).map(MultiPoly::monic).collect();
    // Pairs ordered by (degree of lcm, indices): the normal strategy.
    let mut pairs: BTreeSet<(u32, usize, usize)> = BTreeSet::new();
    for j in 0..basis.len() {
        for i in 0..j {
            push_pair(&basis, &mut pairs, i, j);
        }
    }
    while let Some(pair) = pairs.pop_first() {
        let (_, i, j) = pair;
        let s = s_polynomial(&basis[i], &basis[j]);
        let r = normal_form(&s, &basis);
        if r.is_zero() {
            continue;
        }
        basis.push(r.monic());
        let k = basis.len() - 1;
        for i in 0..k {
            push_pair(&basis, &mut pairs, i, k);
        }
    }
    GroebnerBasis { nvars, generators: interreduce(basis) }
}

fn push_pair(basis: &[MultiPoly], pairs: &mut BTreeSet<(u32, usize, usize)>, i: usize, j: usize) {
    let a = basis[i].leading_monomial().unwrap();
    let b = basis[j].leading_monomial().unwrap();
    if a.is_coprime(b) {
        return;
    }
    pairs.insert((a.lcm(b).degree(), i, j));
}

pub(crate) fn s_polynomial(f: &MultiPoly, g: &MultiPoly) -> MultiPoly {
    let (fm, fc) = f.leading_term().unwrap();
    let (gm, gc) = g.leading_term().unwrap();
    let l = fm.lcm(gm);
    let mut s = f.mul_monomial(&fm.quotient_of(&l).unwrap()).scale(&fc.inv().unwrap());
    s.sub_scaled(g, &gc.inv().unwrap(), &gm.quotient_of(&l).unwrap());
    s
}

fn interreduce(basis: Vec<MultiPoly>) -> Vec<MultiPoly> {
    // Drop elements whose leading monomial is divisible by another's.
    let mut minimal: Vec<MultiPoly> = Vec::new();
    for (i, g) in basis.iter().enumerate() {
        let lm = g.leading_monomial().unwrap();
        let redundant = basis.iter().enumerate().any(|(j, h)| {
            let hm = h.leading_monomial().unwrap();
            j != i && hm.divides(lm) && (hm != lm || j < i)
        });
        if !redundant {
            minimal.push(g.clone());
        }
    }
    let mut reduced: Vec<MultiPoly> = (0..minimal.len())
        .map(|i| {
            let others: Vec<MultiPoly> =
                minimal.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, g)| g.clone()).collect();
            normal_form(&minimal[i], &others).monic()
        })
        .filter(|g| !g.is_zero())
        .collect();
    reduced.sort_by(|a, b| b.leading_monomial().cmp(&a.leading_monomial()));
    reduced
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_homogeneous;

    fn gens(n: usize, src: &[&str]) -> Vec<MultiPoly> {
        let names = MultiPoly::default_names(n + 1);
        src.iter().map(|s| parse_homogeneous(s, &names).unwrap()).collect()
    }

    #[test]
    fn principal_ideal_is_its_own_basis() {
        let g = gens(3, &["x0*x3 - x1*x2"]);
        let gb = groebner(&g).unwrap();
        assert_eq!(gb.generators().len(), 1);
        assert_eq!(gb.generators()[0], g[0].monic());
    }

    #[test]
    fn coordinate_ideal() {
        let gb = groebner(&gens(2, &["x0", "x1"])).unwrap();
        assert_eq!(gb.generators(), &gens(2, &["x0", "x1"])[..]);
    }

    #[test]
    fn twisted_cubic_basis_is_reduced_and_closed() {
        let gb = groebner(&gens(3, &["x0*x2 - x1^2", "x1*x3 - x2^2", "x0*x3 - x1*x2"])).unwrap();
        let g = gb.generators();
        for i in 0..g.len() {
            for j in 0..g.len() {
                if i != j {
                    let s = s_polynomial(&g[i], &g[j]);
                    assert!(normal_form(&s, g).is_zero());
                    // reduced: no term of g[j] divisible by LM(g[i])
                    let lm = g[i].leading_monomial().unwrap();
                    assert!(g[j].terms().all(|(m, _)| !lm.divides(m)));
                }
            }
        }
    }
}
