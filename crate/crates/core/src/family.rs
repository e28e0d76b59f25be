//! Families of hypersurfaces: distributive constants, subgeneral position and
//! the numerical thresholds of the uniqueness theorem.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{projective_dim, AlgebraError, ProjectiveDim, Variety};
use crate::poly::MultiPoly;

/// Largest family accepted by [`brute_delta_oracle`].
pub const ORACLE_MAX_MEMBERS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("a family needs at least one member")]
    Empty,
    #[error("member {index} is constant")]
    ConstantMember { index: usize },
    #[error("member {index} lies in the ideal of the variety")]
    MemberInIdeal { index: usize },
    #[error("member {index} lives in {found} variables, expected {expected}")]
    RingMismatch { index: usize, expected: usize, found: usize },
    #[error("the variety is empty")]
    EmptyVariety,
    #[error("the variety has dimension 0")]
    ZeroDimensional,
    #[error("members {subset:?} contain a top-dimensional component of the variety")]
    ContainsComponent { subset: Vec<usize> },
    #[error("every member misses the variety; the distributive constant is 0")]
    AllIntersectionsEmpty,
    #[error("subgeneral index {n} outside [{lo}, {hi}]")]
    SubgeneralOutOfRange { n: usize, lo: usize, hi: usize },
    #[error("{q} members exceed the exhaustive limit of {max}")]
    TooLarge { q: usize, max: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Hypersurfaces `Q_1..Q_q` together with their lift to the common degree
/// `d = lcm(deg Q_j)`.
#[derive(Clone, Debug)]
pub struct HypersurfaceFamily {
    members: Vec<MultiPoly>,
    degrees: Vec<u32>,
    lifted_degree: u32,
    lifted_members: Vec<MultiPoly>,
}

impl HypersurfaceFamily {
    pub fn new(members: Vec<MultiPoly>) -> Result<Self, FamilyError> {
        let nvars = members.first().ok_or(FamilyError::Empty)?.nvars();
        for (index, q) in members.iter().enumerate() {
            if q.nvars() != nvars {
                return Err(FamilyError::RingMismatch { index, expected: nvars, found: q.nvars() });
            }
            if q.degree() == 0 || q.is_zero() {
                return Err(FamilyError::ConstantMember { index });
            }
        }
        let degrees: Vec<u32> = members.iter().map(MultiPoly::degree).collect();
        let lifted_degree = degrees.iter().fold(1u32, |acc, d| acc.lcm(d));
        let lifted_members = members.iter().map(|q| q.pow(lifted_degree / q.degree())).collect();
        Ok(HypersurfaceFamily { members, degrees, lifted_degree, lifted_members })
    }

    /// As [`HypersurfaceFamily::new`], also rejecting members that vanish on
    /// `variety`.
    pub fn on_variety(members: Vec<MultiPoly>, variety: &Variety) -> Result<Self, FamilyError> {
        let family = HypersurfaceFamily::new(members)?;
        family.check_not_in(variety)?;
        Ok(family)
    }

    pub fn check_not_in(&self, variety: &Variety) -> Result<(), FamilyError> {
        for (index, q) in self.members.iter().enumerate() {
            if q.nvars() != variety.nvars() {
                return Err(FamilyError::RingMismatch { index, expected: variety.nvars(), found: q.nvars() });
            }
            if variety.contains(q) {
                return Err(FamilyError::MemberInIdeal { index });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[MultiPoly] {
        &self.members
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn lifted_degree(&self) -> u32 {
        self.lifted_degree
    }

    /// `Q_j^{d/d_j}`, all of degree `d`.
    pub fn lifted_members(&self) -> &[MultiPoly] {
        &self.lifted_members
    }

    pub fn nvars(&self) -> usize {
        self.members[0].nvars()
    }
}

/// The distributive constant with a maximising subset. Indices are 0-based.
#[derive(Clone, Debug, PartialEq)]
pub struct DistributiveConstant {
    pub value: BigRational,
    pub witness: Vec<usize>,
    /// Dimensions of `∩_{j∈Γ} D_j ∩ V` for every subset the search visited.
    pub dim_table: BTreeMap<Vec<usize>, ProjectiveDim>,
}

impl DistributiveConstant {
    pub fn to_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }
}

fn subset_dim(variety: &Variety, family: &HypersurfaceFamily, subset: &[usize]) -> Result<ProjectiveDim, FamilyError> {
    let mut gens = variety.generators().to_vec();
    gens.extend(subset.iter().map(|&j| family.members[j].clone()));
    Ok(projective_dim(variety.ambient_dim(), &gens)?)
}

fn variety_dim(variety: &Variety) -> Result<usize, FamilyError> {
    match variety.dim() {
        ProjectiveDim::Empty => Err(FamilyError::EmptyVariety),
        ProjectiveDim::Finite(0) => Err(FamilyError::ZeroDimensional),
        ProjectiveDim::Finite(k) => Ok(k),
    }
}

/// `#Γ / (k − dim)`, or `None` for an empty intersection.
fn ratio(size: usize, k: usize, dim: ProjectiveDim, subset: &[usize]) -> Result<Option<BigRational>, FamilyError> {
    match dim {
        ProjectiveDim::Empty => Ok(None),
        ProjectiveDim::Finite(e) if e >= k => Err(FamilyError::ContainsComponent { subset: subset.to_vec() }),
        ProjectiveDim::Finite(e) => Ok(Some(BigRational::new(BigInt::from(size), BigInt::from(k - e)))),
    }
}

/// Maximum of `#Γ / (k − dim(∩_{j∈Γ} D_j ∩ V))` over nonempty `Γ`, by a
/// depth-first search that uses monotonicity of the dimension to prune.
pub fn distributive_constant(
    family: &HypersurfaceFamily,
    variety: &Variety,
) -> Result<DistributiveConstant, FamilyError> {
    let k = variety_dim(variety)?;
    family.check_not_in(variety)?;
    let q = family.len();
    let mut best: Option<(BigRational, Vec<usize>)> = None;
    let mut dim_table = BTreeMap::new();
    let mut stack: Vec<Vec<usize>> = (0..q).rev().map(|j| vec![j]).collect();
    while let Some(subset) = stack.pop() {
        let dim = subset_dim(variety, family, &subset)?;
        dim_table.insert(subset.clone(), dim);
        let Some(r) = ratio(subset.len(), k, dim, &subset)? else {
            continue;
        };
        if best.as_ref().is_none_or(|(b, _)| r > *b) {
            best = Some((r, subset.clone()));
        }
        let last = *subset.last().unwrap();
        let remaining = q - 1 - last;
        if remaining == 0 {
            continue;
        }
        let e = dim.finite().unwrap();
        let bound = BigRational::new(BigInt::from(subset.len() + remaining), BigInt::from(k - e));
        if best.as_ref().is_some_and(|(b, _)| bound <= *b) {
            continue;
        }
        for j in (last + 1..q).rev() {
            let mut next = subset.clone();
            next.push(j);
            stack.push(next);
        }
    }
    let (value, witness) = best.ok_or(FamilyError::AllIntersectionsEmpty)?;
    Ok(DistributiveConstant { value, witness, dim_table })
}

/// Exhaustive evaluation over all `2^q − 1` subsets with independent
/// dimension computations. Returns 0 when every intersection is empty.
pub fn brute_delta_oracle(family: &HypersurfaceFamily, variety: &Variety) -> Result<BigRational, FamilyError> {
    let q = family.len();
    if q > ORACLE_MAX_MEMBERS {
        return Err(FamilyError::TooLarge { q, max: ORACLE_MAX_MEMBERS });
    }
    let k = variety_dim(variety)?;
    family.check_not_in(variety)?;
    let ratios: Vec<Option<BigRational>> = (1u32..(1 << q))
        .into_par_iter()
        .map(|mask| {
            let subset: Vec<usize> = (0..q).filter(|j| mask & (1 << j) != 0).collect();
            let dim = subset_dim(variety, family, &subset)?;
            ratio(subset.len(), k, dim, &subset)
        })
        .collect::<Result<_, _>>()?;
    Ok(ratios.into_iter().flatten().max().unwrap_or_else(BigRational::zero))
}

/// Every `(N+1)`-subset has empty intersection with `V`; otherwise the first
/// violating subset (0-based, lexicographic).
pub fn check_subgeneral_position(
    family: &HypersurfaceFamily,
    variety: &Variety,
    n: usize,
) -> Result<Result<(), Vec<usize>>, FamilyError> {
    let k = variety_dim(variety)?;
    let q = family.len();
    if n < k || n + 1 > q {
        return Err(FamilyError::SubgeneralOutOfRange { n, lo: k, hi: q.saturating_sub(1) });
    }
    let mut subset: Vec<usize> = (0..=n).collect();
    loop {
        if !subset_dim(variety, family, &subset)?.is_empty() {
            return Ok(Err(subset));
        }
        // Advance to the next combination in lexicographic order.
        let size = subset.len();
        let Some(i) = (0..size).rev().find(|&i| subset[i] < q - size + i) else {
            return Ok(Ok(()));
        };
        subset[i] += 1;
        for j in i + 1..size {
            subset[j] = subset[j - 1] + 1;
        }
    }
}

/// Right-hand sides of the uniqueness theorem's conditions (a) and (b).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniquenessThresholds {
    /// `Δ(2k(H−1)/d + H)`.
    pub a: BigRational,
    /// `2(H−1)/d + ΔH`.
    pub b: BigRational,
}

pub fn thresholds_from(hilbert: usize, d: u32, k: usize, delta: &BigRational) -> UniquenessThresholds {
    let h = BigRational::from_integer(BigInt::from(hilbert));
    let hm1 = BigRational::from_integer(BigInt::from(hilbert as i64 - 1));
    let d = BigRational::from_integer(BigInt::from(d));
    let two = BigRational::from_integer(BigInt::from(2));
    let kk = BigRational::from_integer(BigInt::from(k));
    let a = delta * (&two * &kk * &hm1 / &d + &h);
    let b = &two * &hm1 / &d + delta * &h;
    UniquenessThresholds { a, b }
}

pub fn uniqueness_thresholds(
    variety: &Variety,
    family: &HypersurfaceFamily,
    delta: &BigRational,
) -> Result<UniquenessThresholds, FamilyError> {
    let k = variety_dim(variety)?;
    let d = family.lifted_degree();
    Ok(thresholds_from(variety.hilbert_function(d), d, k, delta))
}

/// `q − Δ(M+1)`: the coefficient of `T_f` in the truncated second main
/// theorem with `M = H − 1`.
pub fn smt_coefficient(q: usize, delta: &BigRational, hilbert: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(q)) - delta * BigRational::from_integer(BigInt::from(hilbert))
}

/// `q − (2N−k+1)H/(k+1)`: the coefficient for families in `N`-subgeneral
/// position, for comparison.
pub fn subgeneral_coefficient(q: usize, n: usize, k: usize, hilbert: usize) -> BigRational {
    let num = BigInt::from((2 * n + 1) as i64 - k as i64) * BigInt::from(hilbert);
    BigRational::from_integer(BigInt::from(q)) - BigRational::new(num, BigInt::from(k + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_homogeneous;

    fn polys(n: usize, src: &[&str]) -> Vec<MultiPoly> {
        let names = MultiPoly::default_names(n + 1);
        src.iter().map(|s| parse_homogeneous(s, &names).unwrap()).collect()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn general_position_hyperplanes() {
        let v = Variety::projective_space(2);
        let fam = HypersurfaceFamily::new(polys(2, &["x0", "x1"])).unwrap();
        let dc = distributive_constant(&fam, &v).unwrap();
        assert_eq!(dc.value, rat(1, 1));
        assert_eq!(brute_delta_oracle(&fam, &v).unwrap(), rat(1, 1));
    }

    #[test]
    fn repeated_line_in_plane() {
        let v = Variety::projective_space(2);
        let fam = HypersurfaceFamily::new(polys(2, &["x0", "x0", "x1"])).unwrap();
        let dc = distributive_constant(&fam, &v).unwrap();
        assert_eq!(dc.value, rat(2, 1));
        assert_eq!(dc.witness, vec![0, 1]);
        assert_eq!(dc.dim_table[&dc.witness], ProjectiveDim::Finite(1));
    }

    #[test]
    fn repeated_family_delta_is_multiplicity() {
        // Three general points of P^1, each repeated twice.
        let v = Variety::projective_space(1);
        let fam = HypersurfaceFamily::new(polys(1, &["x0", "x1", "x0 + x1", "x0", "x1", "x0 + x1"])).unwrap();
        assert_eq!(distributive_constant(&fam, &v).unwrap().value, rat(2, 1));
        assert_eq!(check_subgeneral_position(&fam, &v, 2).unwrap(), Ok(()));
        assert!(check_subgeneral_position(&fam, &v, 1).unwrap().is_err());
    }

    #[test]
    fn subgeneral_position_examples() {
        let v = Variety::projective_space(2);
        let fam = HypersurfaceFamily::new(polys(2, &["x0", "x1", "x2"])).unwrap();
        assert_eq!(check_subgeneral_position(&fam, &v, 2).unwrap(), Ok(()));
        let v1 = Variety::projective_space(1);
        let fam = HypersurfaceFamily::new(polys(1, &["x0", "x0"])).unwrap();
        assert_eq!(check_subgeneral_position(&fam, &v1, 1).unwrap(), Err(vec![0, 1]));
        assert!(matches!(
            check_subgeneral_position(&fam, &v1, 2),
            Err(FamilyError::SubgeneralOutOfRange { .. })
        ));
    }

    #[test]
    fn rejects_members_in_ideal_and_empty_cases() {
        let quadric = Variety::new(3, polys(3, &["x0*x3 - x1*x2"])).unwrap();
        let fam = HypersurfaceFamily::new(polys(3, &["x0*x3 - x1*x2"])).unwrap();
        assert_eq!(distributive_constant(&fam, &quadric), Err(FamilyError::MemberInIdeal { index: 0 }));
        let line = Variety::new(2, polys(2, &["x2"])).unwrap();
        let fam = HypersurfaceFamily::new(polys(2, &["x2 - x0", "x2 - x0"])).unwrap();
        assert!(distributive_constant(&fam, &line).is_ok());
    }

    #[test]
    fn lifting_to_common_degree() {
        let fam = HypersurfaceFamily::new(polys(2, &["x0", "x1^2 - x0*x2", "x0^3 + x2^3"])).unwrap();
        assert_eq!(fam.lifted_degree(), 6);
        assert!(fam.lifted_members().iter().all(|q| q.degree() == 6));
    }

    #[test]
    fn threshold_formulas() {
        let t = thresholds_from(2, 1, 1, &rat(1, 1));
        assert_eq!((t.a, t.b), (rat(4, 1), rat(4, 1)));
        assert_eq!(thresholds_from(2, 1, 1, &rat(2, 1)).a, rat(8, 1));
        assert_eq!(thresholds_from(3, 1, 2, &rat(1, 1)).a, rat(11, 1));
        assert_eq!(smt_coefficient(4, &rat(2, 1), 2), rat(0, 1));
        assert_eq!(subgeneral_coefficient(4, 2, 1, 2), rat(0, 1));
        assert_eq!(smt_coefficient(5, &rat(1, 1), 3), rat(2, 1));
    }
}
