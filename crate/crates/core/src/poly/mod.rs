//! Exact polynomial arithmetic over the Gaussian rationals.

mod divisor;
pub mod linalg;
mod multi;
mod parse;
mod scalar;
mod uni;
mod wronskian;

use thiserror::Error;

pub use divisor::{from_roots, CoprimeBase, Divisor, DivisorPoint};
pub use multi::{Monomial, MultiPoly};
pub use parse::{parse_homogeneous, parse_poly, parse_univariate, ParseError, ParsedPoly, Variables};
pub use scalar::GaussianRational;
pub use uni::{ComplexPoly, UniPoly};
pub use wronskian::{derivative_matrix, determinant, wronskian};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("arity mismatch: expected {expected} components, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("non-homogeneous: expected degree {expected}, found {found}")]
    NonHomogeneous { expected: u32, found: u32 },
    #[error("the zero polynomial has no divisor")]
    ZeroPolynomial,
    #[error("all components are zero")]
    AllZero,
    #[error("empty input")]
    Empty,
}

/// `Q(f_0(z), …, f_n(z))`, exactly.
pub fn compose(q: &MultiPoly, components: &[UniPoly]) -> Result<UniPoly, PolyError> {
    q.compose(components)
}

/// Divides every component by the monic gcd of all of them.
pub fn reduce_representation(components: &[UniPoly]) -> Result<Vec<UniPoly>, PolyError> {
    let g = UniPoly::gcd_all(components);
    if g.is_zero() {
        return Err(PolyError::AllZero);
    }
    Ok(components.iter().map(|f| f.exact_div(&g).expect("gcd divides")).collect())
}

pub fn divisor_of(p: &UniPoly) -> Result<Divisor, PolyError> {
    Divisor::of(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> UniPoly {
        UniPoly::from_ints(c)
    }

    #[test]
    fn reduce_representation_examples() {
        assert_eq!(reduce_representation(&[p(&[0, 1]), p(&[0, 0, 1])]).unwrap(), vec![p(&[1]), p(&[0, 1])]);
        assert_eq!(reduce_representation(&[p(&[-1, 0, 1]), p(&[-1, 1])]).unwrap(), vec![p(&[1, 1]), p(&[1])]);
        assert_eq!(reduce_representation(&[p(&[1]), p(&[0, 1])]).unwrap(), vec![p(&[1]), p(&[0, 1])]);
        assert_eq!(reduce_representation(&[p(&[]), p(&[])]), Err(PolyError::AllZero));
    }

    #[test]
    fn compose_examples() {
        let names = MultiPoly::default_names(2);
        let q = parse_homogeneous("x0*x1", &names).unwrap();
        assert_eq!(compose(&q, &[p(&[1]), p(&[0, 1])]).unwrap(), p(&[0, 1]));
        let q = parse_homogeneous("x0^2 + x1^2", &names).unwrap();
        assert_eq!(compose(&q, &[p(&[1]), p(&[0, 1])]).unwrap(), p(&[1, 0, 1]));
        let q = parse_homogeneous("x0*x3 - x1*x2", &MultiPoly::default_names(4)).unwrap();
        let twisted = [p(&[1]), p(&[0, 1]), p(&[0, 0, 1]), p(&[0, 0, 0, 1])];
        assert!(compose(&q, &twisted).unwrap().is_zero());
    }
}
