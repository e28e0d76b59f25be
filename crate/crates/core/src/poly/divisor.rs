use std::sync::Arc;

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::{GaussianRational, PolyError, UniPoly};

/// One distinct zero of a polynomial.
#[derive(Clone, Debug)]
pub struct DivisorPoint {
    /// Monic square-free exact factor that has this point as a simple root.
    /// Every root of `factor` carries the same multiplicity.
    pub factor: Arc<UniPoly>,
    /// Isolated numeric location. Exactly `0` when `factor == z`.
    pub root: Complex64,
    pub multiplicity: u32,
}

impl DivisorPoint {
    pub fn modulus(&self) -> f64 {
        self.root.norm()
    }

    pub fn is_origin(&self) -> bool {
        self.root == Complex64::zero()
    }
}

/// Zero divisor of a nonzero univariate polynomial.
#[derive(Clone, Debug)]
pub struct Divisor {
    points: Vec<DivisorPoint>,
    source_degree: usize,
}

impl Divisor {
    /// Exact multiplicities from the square-free decomposition; roots of each
    /// square-free factor are then isolated numerically.
    pub fn of(p: &UniPoly) -> Result<Divisor, PolyError> {
        if p.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let (_, factors) = p.square_free_decomposition();
        let mut points = Vec::new();
        for (factor, mult) in factors {
            // Square-free, so z divides it at most once.
            let (origin, rest) = match factor.valuation() {
                Some(v) if v > 0 => (true, factor.exact_div(&UniPoly::z()).unwrap()),
                _ => (false, factor),
            };
            if origin {
                points.push(DivisorPoint {
                    factor: Arc::new(UniPoly::z()),
                    root: Complex64::zero(),
                    multiplicity: mult,
                });
            }
            if rest.is_constant() {
                continue;
            }
            let rest = Arc::new(rest);
            for root in rest.to_numeric().simple_roots() {
                points.push(DivisorPoint { factor: rest.clone(), root, multiplicity: mult });
            }
        }
        points.sort_by(|a, b| {
            a.modulus()
                .total_cmp(&b.modulus())
                .then(a.root.re.total_cmp(&b.root.re))
                .then(a.root.im.total_cmp(&b.root.im))
        });
        Ok(Divisor { points, source_degree: p.degree().unwrap() })
    }

    pub fn points(&self) -> &[DivisorPoint] {
        &self.points
    }

    pub fn source_degree(&self) -> usize {
        self.source_degree
    }

    /// Total multiplicity; equals the source degree.
    pub fn degree(&self) -> usize {
        self.points.iter().map(|p| p.multiplicity as usize).sum()
    }

    pub fn multiplicity_at_origin(&self) -> u32 {
        self.points.iter().find(|p| p.is_origin()).map_or(0, |p| p.multiplicity)
    }

    /// Smallest `| |a| - r |` over all points, `∞` when empty.
    pub fn distance_to_circle(&self, r: f64) -> f64 {
        self.points.iter().map(|p| (p.modulus() - r).abs()).fold(f64::INFINITY, f64::min)
    }

    /// `Σ_{0<|a|<r} min(M,ν_a)·log(r/|a|) + min(M,ν_0)·log r`; `truncation`
    /// `None` means no truncation.
    pub fn counting(&self, r: f64, truncation: Option<u32>) -> f64 {
        let cap = |m: u32| truncation.map_or(m, |t| m.min(t)) as f64;
        self.points
            .iter()
            .filter(|p| p.modulus() < r)
            .map(|p| if p.is_origin() { cap(p.multiplicity) * r.ln() } else { cap(p.multiplicity) * (r / p.modulus()).ln() })
            .sum()
    }
}

/// Pairwise coprime square-free factorisation shared by several polynomials.
///
/// Every input is `unit · Π elements[k]^exponents[i][k]`, so all roots of an
/// element carry the same multiplicity in each input.
#[derive(Clone, Debug)]
pub struct CoprimeBase {
    elements: Vec<UniPoly>,
    exponents: Vec<Vec<u32>>,
}

impl CoprimeBase {
    pub fn new(polys: &[UniPoly]) -> Result<CoprimeBase, PolyError> {
        let mut elements: Vec<UniPoly> = Vec::new();
        for p in polys {
            if p.is_zero() {
                return Err(PolyError::ZeroPolynomial);
            }
            for (factor, _) in p.square_free_decomposition().1 {
                insert_refining(&mut elements, factor);
            }
        }
        let exponents = polys
            .iter()
            .map(|p| elements.iter().map(|b| multiplicity_of(b, p)).collect())
            .collect();
        Ok(CoprimeBase { elements, exponents })
    }

    pub fn elements(&self) -> &[UniPoly] {
        &self.elements
    }

    /// `exponent(i, k)`: power of element `k` in input `i`.
    pub fn exponent(&self, input: usize, element: usize) -> u32 {
        self.exponents[input][element]
    }
}

fn insert_refining(elements: &mut Vec<UniPoly>, mut a: UniPoly) {
    let mut k = 0;
    while k < elements.len() && !a.is_constant() {
        let g = a.gcd(&elements[k]);
        if g.is_constant() {
            k += 1;
            continue;
        }
        let rest = elements[k].exact_div(&g).unwrap();
        a = a.exact_div(&g).unwrap();
        elements[k] = g;
        if !rest.is_constant() {
            elements.push(rest.monic());
        }
        k += 1;
    }
    if !a.is_constant() {
        elements.push(a.monic());
    }
}

fn multiplicity_of(b: &UniPoly, p: &UniPoly) -> u32 {
    let mut m = 0;
    let mut q = p.clone();
    while let Some(next) = q.exact_div(b) {
        m += 1;
        q = next;
    }
    m
}

/// `Π (z - a_k)^{m_k}` for the given exact roots.
pub fn from_roots(roots: &[(GaussianRational, u32)]) -> UniPoly {
    roots
        .iter()
        .fold(UniPoly::constant(GaussianRational::one()), |acc, (a, m)| &acc * &UniPoly::linear_root(a.clone()).pow(*m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mults(d: &Divisor) -> Vec<(f64, f64, u32)> {
        d.points().iter().map(|p| (p.root.re, p.root.im, p.multiplicity)).collect()
    }

    #[test]
    fn simple_divisors() {
        let d = Divisor::of(&UniPoly::from_ints(&[0, 0, 0, 1])).unwrap();
        assert_eq!(mults(&d), vec![(0.0, 0.0, 3)]);

        let d = Divisor::of(&UniPoly::from_ints(&[1, 0, 1])).unwrap();
        assert_eq!(d.points().len(), 2);
        assert!(d.points().iter().all(|p| p.multiplicity == 1 && (p.modulus() - 1.0).abs() < 1e-14));
        assert!(d.points().iter().any(|p| (p.root.im - 1.0).abs() < 1e-14));

        // z^2 (z - 2)
        let d = Divisor::of(&UniPoly::from_ints(&[0, 0, -2, 1])).unwrap();
        let m = mults(&d);
        assert_eq!(m[0], (0.0, 0.0, 2));
        assert_eq!(m[1].2, 1);
        assert!((m[1].0 - 2.0).abs() < 1e-14);
        assert_eq!(d.degree(), 3);
        assert!(matches!(Divisor::of(&UniPoly::zero()), Err(PolyError::ZeroPolynomial)));
    }

    #[test]
    fn counting_function_closed_form() {
        let e = std::f64::consts::E;
        let d = Divisor::of(&UniPoly::from_ints(&[0, 0, 0, 1])).unwrap();
        assert!((d.counting(e, Some(2)) - 2.0).abs() < 1e-15);
        let d = Divisor::of(&UniPoly::from_ints(&[-2, 1])).unwrap();
        assert_eq!(d.counting(1.5, None), 0.0);
    }

    #[test]
    fn coprime_base_splits_shared_roots() {
        let a = from_roots(&[(GaussianRational::from_int(1), 2), (GaussianRational::from_int(2), 1)]);
        let b = from_roots(&[(GaussianRational::from_int(1), 1), (GaussianRational::from_int(3), 4)]);
        let base = CoprimeBase::new(&[a, b]).unwrap();
        assert_eq!(base.elements().len(), 3);
        let z1 = UniPoly::from_ints(&[-1, 1]);
        let k = base.elements().iter().position(|e| *e == z1).unwrap();
        assert_eq!((base.exponent(0, k), base.exponent(1, k)), (2, 1));
    }
}
