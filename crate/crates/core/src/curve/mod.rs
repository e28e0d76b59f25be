//! Polynomial curves into a projective variety and their associated maps.

mod tower;

use std::sync::Arc;

use num_complex::Complex64;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{AlgebraError, Variety};
use crate::poly::{linalg, Divisor, GaussianRational, Monomial, MultiPoly, PolyError, UniPoly};

pub use tower::WedgeTower;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurveError {
    #[error("curve has {found} components, ambient space needs {expected}")]
    Arity { expected: usize, found: usize },
    #[error("components share a common factor of degree {degree}")]
    NotReduced { degree: usize },
    #[error("all components are zero")]
    AllZero,
    #[error("curve is constant")]
    Constant,
    #[error("curve leaves the variety: generator {index} does not vanish on it")]
    OffVariety { index: usize },
    #[error("curve is degenerate over degree-{degree} forms; {witness} vanishes on it")]
    Degenerate { degree: u32, witness: String },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Reduced representation `(f_0, …, f_n)` of a polynomial curve lying on a
/// variety.
#[derive(Clone, Debug)]
pub struct Curve {
    components: Vec<UniPoly>,
    variety: Arc<Variety>,
}

impl Curve {
    /// Validates arity, reducedness, membership in the variety and that the
    /// curve is not constant.
    pub fn new(components: Vec<UniPoly>, variety: Arc<Variety>) -> Result<Self, CurveError> {
        let curve = Curve::new_allow_constant(components, variety)?;
        if curve.is_constant() {
            return Err(CurveError::Constant);
        }
        Ok(curve)
    }

    /// As [`Curve::new`] but accepts constant maps.
    pub fn new_allow_constant(components: Vec<UniPoly>, variety: Arc<Variety>) -> Result<Self, CurveError> {
        if components.len() != variety.nvars() {
            return Err(CurveError::Arity { expected: variety.nvars(), found: components.len() });
        }
        let g = UniPoly::gcd_all(&components);
        if g.is_zero() {
            return Err(CurveError::AllZero);
        }
        if !g.is_constant() {
            return Err(CurveError::NotReduced { degree: g.degree().unwrap() });
        }
        for (index, gen) in variety.generators().iter().enumerate() {
            if !gen.compose(&components)?.is_zero() {
                return Err(CurveError::OffVariety { index });
            }
        }
        Ok(Curve { components, variety })
    }

    pub fn components(&self) -> &[UniPoly] {
        &self.components
    }

    pub fn variety(&self) -> &Arc<Variety> {
        &self.variety
    }

    /// All components proportional to one polynomial, hence constant as a map.
    pub fn is_constant(&self) -> bool {
        let pivot = self.components.iter().find(|c| !c.is_zero()).unwrap();
        self.components.iter().all(|c| {
            let cross = &(c * &UniPoly::constant(pivot.coeff(pivot.valuation().unwrap())))
                - &(pivot * &UniPoly::constant(c.coeff(pivot.valuation().unwrap())));
            cross.is_zero()
        })
    }

    pub fn degree(&self) -> usize {
        self.components.iter().filter_map(UniPoly::degree).max().unwrap_or(0)
    }

    /// `Q(f̃)`.
    pub fn compose(&self, q: &MultiPoly) -> Result<UniPoly, CurveError> {
        Ok(q.compose(&self.components)?)
    }

    /// `‖f̃(z)‖`.
    pub fn norm(&self, z: Complex64) -> f64 {
        self.components.iter().map(|c| c.eval_complex(z).norm_sqr()).sum::<f64>().sqrt()
    }

    /// Rank test on the images of a basis of degree-`d` forms modulo `I(V)`.
    /// On failure returns a nonzero class `Q` with `Q(f̃) ≡ 0`.
    pub fn nondegeneracy_check(&self, d: u32) -> Result<Result<(), MultiPoly>, CurveError> {
        let basis = self.variety.basis_of_id(d);
        let images: Vec<UniPoly> = basis.iter().map(|v| v.compose(&self.components)).collect::<Result<_, _>>()?;
        match linear_relation(&images) {
            None => Ok(Ok(())),
            Some(a) => {
                let mut q = MultiPoly::zero(self.variety.nvars(), d);
                for (ai, v) in a.iter().zip(&basis) {
                    q = q.add(&v.scale(ai)).expect("same degree");
                }
                Ok(Err(q))
            }
        }
    }
}

/// A nonzero `a` with `Σ a_i p_i ≡ 0`, scaled so its first nonzero entry is 1.
pub fn linear_relation(ps: &[UniPoly]) -> Option<Vec<GaussianRational>> {
    let len = ps.iter().filter_map(UniPoly::degree).max().map_or(0, |d| d + 1);
    let rows: Vec<Vec<GaussianRational>> = (0..len).map(|k| ps.iter().map(|p| p.coeff(k)).collect()).collect();
    let mut a = if len == 0 {
        let mut v = vec![GaussianRational::zero(); ps.len()];
        v[0] = GaussianRational::one();
        v
    } else {
        linalg::kernel(&rows, ps.len()).into_iter().next()?
    };
    let lead = a.iter().find(|c| !c.is_zero())?.inv().unwrap();
    for c in a.iter_mut() {
        *c = &*c * &lead;
    }
    Some(a)
}

/// Basis images, their associated maps and the Wronskian for a fixed degree.
#[derive(Debug)]
pub struct AssociatedData {
    degree: u32,
    basis: Vec<MultiPoly>,
    tower: WedgeTower,
    wronskian: UniPoly,
    wronskian_divisor: Option<Divisor>,
}

impl AssociatedData {
    pub fn new(curve: &Curve, degree: u32) -> Result<Self, CurveError> {
        let basis = curve.variety.basis_of_id(degree);
        let images: Vec<UniPoly> = basis.iter().map(|v| curve.compose(v)).collect::<Result<_, _>>()?;
        let wronskian = crate::poly::wronskian(&images)?;
        let wronskian_divisor = if wronskian.is_zero() { None } else { Some(Divisor::of(&wronskian)?) };
        Ok(AssociatedData { degree, basis, tower: WedgeTower::new(images), wronskian, wronskian_divisor })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// `M = H_V(d) − 1`.
    pub fn truncation(&self) -> usize {
        self.basis.len() - 1
    }

    pub fn basis(&self) -> &[MultiPoly] {
        &self.basis
    }

    pub fn basis_monomials(&self) -> Vec<Monomial> {
        self.basis.iter().map(|v| v.leading_monomial().unwrap().clone()).collect()
    }

    pub fn images(&self) -> &[UniPoly] {
        self.tower.components()
    }

    pub fn derivative_table(&self) -> &[Vec<UniPoly>] {
        self.tower.derivative_table()
    }

    pub fn tower(&self) -> &WedgeTower {
        &self.tower
    }

    pub fn wronskian(&self) -> &UniPoly {
        &self.wronskian
    }

    /// `None` when the curve is degenerate (`W ≡ 0`).
    pub fn wronskian_divisor(&self) -> Option<&Divisor> {
        self.wronskian_divisor.as_ref()
    }

    pub fn is_nondegenerate(&self) -> bool {
        !self.wronskian.is_zero()
    }

    pub fn norm_fp(&self, p: isize, z: Complex64) -> f64 {
        self.tower.norm(p, z)
    }

    pub fn curvature_h(&self, p: usize, z: Complex64) -> Option<f64> {
        self.tower.curvature(p, z)
    }

    /// `φ_p(Q)(z)` with `a` the coordinates of `[Q]`, normalised to unit
    /// length internally.
    pub fn contact_function(&self, p: usize, a: &[Complex64], z: Complex64) -> Option<f64> {
        self.tower.contact(p, a, z)
    }
}

/// Coordinates of `[Q]` as complex numbers scaled to unit Euclidean norm.
pub fn unit_coordinates(a: &[GaussianRational]) -> Vec<Complex64> {
    let v: Vec<Complex64> = a.iter().map(GaussianRational::to_complex).collect();
    let norm = v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
    v.into_iter().map(|c| c / norm).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_homogeneous;

    fn p(c: &[i64]) -> UniPoly {
        UniPoly::from_ints(c)
    }

    fn variety(n: usize, src: &[&str]) -> Arc<Variety> {
        let names = MultiPoly::default_names(n + 1);
        Arc::new(Variety::new(n, src.iter().map(|s| parse_homogeneous(s, &names).unwrap()).collect()).unwrap())
    }

    #[test]
    fn validation() {
        let p2 = variety(2, &[]);
        assert!(Curve::new(vec![p(&[1]), p(&[0, 1]), p(&[0, 0, 1])], p2.clone()).is_ok());
        assert!(matches!(Curve::new(vec![p(&[0, 1]), p(&[0, 0, 1]), p(&[0, 1])], p2.clone()), Err(CurveError::NotReduced { degree: 1 })));
        assert!(matches!(Curve::new(vec![p(&[1]), p(&[2]), p(&[3])], p2.clone()), Err(CurveError::Constant)));
        assert!(Curve::new_allow_constant(vec![p(&[1]), p(&[2]), p(&[3])], p2.clone()).is_ok());
        assert!(matches!(Curve::new(vec![p(&[1]), p(&[0, 1])], p2), Err(CurveError::Arity { .. })));
        let quadric = variety(3, &["x0*x3 - x1*x2"]);
        assert!(Curve::new(vec![p(&[1]), p(&[0, 1]), p(&[0, 0, 1]), p(&[0, 0, 0, 1])], quadric.clone()).is_ok());
        assert!(matches!(
            Curve::new(vec![p(&[1]), p(&[0, 1]), p(&[0, 0, 1]), p(&[0, 0, 0, 0, 1])], quadric),
            Err(CurveError::OffVariety { index: 0 })
        ));
    }

    #[test]
    fn nondegeneracy_examples() {
        let p2 = variety(2, &[]);
        let c = Curve::new(vec![p(&[1]), p(&[0, 1]), p(&[0, 0, 1])], p2.clone()).unwrap();
        assert_eq!(c.nondegeneracy_check(1).unwrap(), Ok(()));
        let c = Curve::new(vec![p(&[1]), p(&[0, 1]), p(&[1, 1])], p2.clone()).unwrap();
        let w = c.nondegeneracy_check(1).unwrap().unwrap_err();
        assert_eq!(w.to_string(), "x0 + x1 - x2");
        assert!(c.compose(&w).unwrap().is_zero());
        // A conic is degenerate over quadrics.
        let c = Curve::new(vec![p(&[1]), p(&[0, 1]), p(&[0, 0, 1])], p2).unwrap();
        assert!(c.nondegeneracy_check(2).unwrap().is_err());
    }

    #[test]
    fn associated_wronskian_matches_direct() {
        let quadric = variety(3, &["x0*x3 - x1*x2"]);
        let c = Curve::new(vec![p(&[1]), p(&[0, 1]), p(&[0, 0, 1]), p(&[0, 0, 0, 1])], quadric).unwrap();
        let data = AssociatedData::new(&c, 1).unwrap();
        assert_eq!(data.truncation(), 3);
        assert_eq!(data.wronskian(), &crate::poly::wronskian(data.images()).unwrap());
        assert_eq!(data.wronskian(), &p(&[12]));
        assert_eq!(data.tower().minors(3)[0], *data.wronskian());
        assert_eq!(data.derivative_table()[0], data.images());
    }
}
