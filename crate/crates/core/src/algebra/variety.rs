use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;

use super::{groebner_in, AlgebraError, GroebnerBasis};
use crate::poly::{GaussianRational, Monomial, MultiPoly};

/// Projective dimension, with `Empty` ordered below every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProjectiveDim {
    Empty,
    Finite(usize),
}

impl ProjectiveDim {
    pub fn is_empty(self) -> bool {
        self == ProjectiveDim::Empty
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            ProjectiveDim::Empty => None,
            ProjectiveDim::Finite(k) => Some(k),
        }
    }
}

impl fmt::Display for ProjectiveDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjectiveDim::Empty => f.write_str("-inf"),
            ProjectiveDim::Finite(k) => write!(f, "{k}"),
        }
    }
}

/// Zero set in `P^n` of a homogeneous ideal, together with its Gröbner basis.
#[derive(Clone, Debug)]
pub struct Variety {
    ambient_dim: usize,
    generators: Vec<MultiPoly>,
    groebner: GroebnerBasis,
    dim: ProjectiveDim,
    hilbert_cache: BTreeMap<u32, usize>,
}

impl Variety {
    /// `V(gens) ⊂ P^n`. An empty generator list gives all of `P^n`.
    pub fn new(ambient_dim: usize, generators: Vec<MultiPoly>) -> Result<Self, AlgebraError> {
        let nvars = ambient_dim + 1;
        if let Some(bad) = generators.iter().find(|g| g.nvars() != nvars) {
            return Err(AlgebraError::RingMismatch { expected: nvars, found: bad.nvars() });
        }
        let groebner = groebner_in(nvars, &generators);
        let dim = dim_of_basis(&groebner);
        let top = generators.iter().map(MultiPoly::degree).max().unwrap_or(1) + ambient_dim as u32 + 1;
        let hilbert_cache = (0..=top).map(|d| (d, count_standard(&groebner, d))).collect();
        Ok(Variety { ambient_dim, generators, groebner, dim, hilbert_cache })
    }

    pub fn projective_space(ambient_dim: usize) -> Self {
        Variety::new(ambient_dim, Vec::new()).expect("no generators")
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn nvars(&self) -> usize {
        self.ambient_dim + 1
    }

    pub fn generators(&self) -> &[MultiPoly] {
        &self.generators
    }

    pub fn groebner(&self) -> &GroebnerBasis {
        &self.groebner
    }

    pub fn dim(&self) -> ProjectiveDim {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.dim.is_empty()
    }

    /// `H_V(d)`: the number of standard monomials of degree `d`.
    pub fn hilbert_function(&self, d: u32) -> usize {
        match self.hilbert_cache.get(&d) {
            Some(h) => *h,
            None => count_standard(&self.groebner, d),
        }
    }

    /// Standard monomials of degree `d` in descending grevlex order.
    pub fn standard_monomials(&self, d: u32) -> Vec<Monomial> {
        Monomial::all_of_degree(self.nvars(), d).into_iter().filter(|m| self.groebner.is_standard(m)).collect()
    }

    /// Representatives `[v_0, …, v_M]` of a basis of degree-`d` forms modulo
    /// the ideal.
    pub fn basis_of_id(&self, d: u32) -> Vec<MultiPoly> {
        self.standard_monomials(d).into_iter().map(|m| MultiPoly::monomial(m, GaussianRational::one())).collect()
    }

    /// Coordinates of `[q]` in the basis returned by [`Variety::basis_of_id`].
    pub fn coordinates_in_id(&self, q: &MultiPoly, d: u32) -> Result<Vec<GaussianRational>, AlgebraError> {
        if q.nvars() != self.nvars() {
            return Err(AlgebraError::RingMismatch { expected: self.nvars(), found: q.nvars() });
        }
        if q.degree() != d {
            return Err(AlgebraError::DegreeMismatch { expected: d, found: q.degree() });
        }
        let nf = self.groebner.normal_form(q);
        Ok(self.standard_monomials(d).iter().map(|m| nf.coeff(m)).collect())
    }

    pub fn contains(&self, q: &MultiPoly) -> bool {
        self.groebner.contains(q)
    }

    /// The variety cut out by the ideal plus `extra`.
    pub fn intersect(&self, extra: &[MultiPoly]) -> Result<Variety, AlgebraError> {
        let mut gens = self.generators.clone();
        gens.extend(extra.iter().cloned());
        Variety::new(self.ambient_dim, gens)
    }
}

/// Projective dimension of `V(gens) ⊂ P^n`.
pub fn projective_dim(ambient_dim: usize, gens: &[MultiPoly]) -> Result<ProjectiveDim, AlgebraError> {
    let nvars = ambient_dim + 1;
    if let Some(bad) = gens.iter().find(|g| g.nvars() != nvars) {
        return Err(AlgebraError::RingMismatch { expected: nvars, found: bad.nvars() });
    }
    Ok(dim_of_basis(&groebner_in(nvars, gens)))
}

fn count_standard(gb: &GroebnerBasis, d: u32) -> usize {
    Monomial::all_of_degree(gb.nvars(), d).iter().filter(|m| gb.is_standard(m)).count()
}

/// Krull dimension of `S/in(I)` is the largest set of variables containing the
/// support of no leading monomial; the projective dimension is one less.
fn dim_of_basis(gb: &GroebnerBasis) -> ProjectiveDim {
    let nvars = gb.nvars();
    let supports: Vec<u64> =
        gb.leading_monomials().map(|m| m.support().fold(0u64, |acc, i| acc | (1 << i))).collect();
    let mut best = 0usize;
    let mut any = false;
    for set in 0u64..(1u64 << nvars) {
        let size = set.count_ones() as usize;
        if (any && size <= best) || supports.iter().any(|s| s & !set == 0) {
            continue;
        }
        best = size;
        any = true;
    }
    match best {
        0 => ProjectiveDim::Empty,
        k => ProjectiveDim::Finite(k - 1),
    }
}
