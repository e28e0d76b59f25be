//! Nevanlinna functions by circle quadrature and exact divisor counting, and
//! the checks built on them.

mod checks;
mod exact;
mod report;

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::curve::{AssociatedData, Curve, CurveError};
use crate::family::{distributive_constant, DistributiveConstant, FamilyError, HypersurfaceFamily};
use crate::poly::{Divisor, GaussianRational, MultiPoly, PolyError, UniPoly};

pub use checks::{
    curvature_check, fmt_residual, jensen_residual, lemma31_empirical, sample_points, smt_margin,
    smt_wronskian_margin, sum_product_check, CurvatureOptions, RESIDUAL_SPREAD_TOL, SLOPE_TOL,
};
pub use exact::{
    divisor_inequality_check, lemma41_check, lemma41_sweep, uniqueness_certificate, Lemma41Error, UniquenessOutcome,
};
pub use report::{least_squares_slope, spread, CheckReport, ReportRow, Verdict};

/// Default number of trapezoid nodes on a circle.
pub const DEFAULT_NODES: usize = 4096;

/// A zero closer than this fraction of `r` to the circle `|z| = r` makes the
/// radius unusable.
pub const ZERO_ON_CIRCLE_TOL: f64 = 1e-9;

/// Relative clearance that [`safe_radii`] keeps between circles and zeros.
pub const RADIUS_CLEARANCE: f64 = 0.005;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NevanlinnaError {
    #[error("node count {0} must be a power of two and at least 256")]
    BadNodes(usize),
    #[error("radius {0} must be positive")]
    BadRadius(f64),
    #[error("a zero lies on the circle of radius {r}")]
    ZeroOnCircle { r: f64 },
    #[error("no radius near {r} keeps clear of the zeros")]
    NoSafeRadius { r: f64 },
    #[error("Q{index}(f) vanishes identically")]
    IdenticallyZero { index: usize },
    #[error("curve is degenerate over the lifted degree")]
    Degenerate,
    #[error("curve and family live in different spaces")]
    Mismatch,
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

fn check_nodes(nodes: usize) -> Result<(), NevanlinnaError> {
    if nodes < 256 || !nodes.is_power_of_two() {
        return Err(NevanlinnaError::BadNodes(nodes));
    }
    Ok(())
}

/// Trapezoid average of `g(r e^{iθ})` over `nodes` equally spaced angles.
pub fn circle_mean(r: f64, nodes: usize, g: impl Fn(Complex64) -> f64) -> f64 {
    let step = 2.0 * PI / nodes as f64;
    // Pairwise summation keeps the rounding error at O(log n · ε).
    fn sum(vals: &[f64]) -> f64 {
        if vals.len() <= 16 {
            return vals.iter().sum();
        }
        let (a, b) = vals.split_at(vals.len() / 2);
        sum(a) + sum(b)
    }
    let vals: Vec<f64> = (0..nodes).map(|j| g(Complex64::from_polar(r, step * j as f64))).collect();
    sum(&vals) / nodes as f64
}

/// `T_f(r)`: circle average of `log‖f̃‖`.
pub fn characteristic(curve: &Curve, r: f64, nodes: usize) -> Result<f64, NevanlinnaError> {
    check_nodes(nodes)?;
    if r <= 0.0 {
        return Err(NevanlinnaError::BadRadius(r));
    }
    Ok(circle_mean(r, nodes, |z| curve.norm(z).ln()))
}

fn ensure_clear(divisor: &Divisor, r: f64) -> Result<(), NevanlinnaError> {
    if divisor.distance_to_circle(r) <= ZERO_ON_CIRCLE_TOL * r {
        return Err(NevanlinnaError::ZeroOnCircle { r });
    }
    Ok(())
}

/// `m_f(r, Q)`: circle average of `log(‖f̃‖^d ‖Q‖ / |Q(f̃)|)` with `‖Q‖` the
/// sum of the absolute values of the coefficients.
pub fn proximity(curve: &Curve, q: &MultiPoly, r: f64, nodes: usize) -> Result<f64, NevanlinnaError> {
    check_nodes(nodes)?;
    let composed = curve.compose(q)?;
    if composed.is_zero() {
        return Err(NevanlinnaError::IdenticallyZero { index: 0 });
    }
    ensure_clear(&Divisor::of(&composed)?, r)?;
    let numeric = composed.to_numeric();
    let d = q.degree() as f64;
    let qnorm = q.coefficient_norm().ln();
    Ok(circle_mean(r, nodes, |z| d * curve.norm(z).ln() + qnorm - numeric.eval(z).norm().ln()))
}

/// `N^{[M]}_f(r, Q)` from the exact divisor of `Q(f̃)`; `None` means no truncation.
pub fn counting(curve: &Curve, q: &MultiPoly, r: f64, truncation: Option<u32>) -> Result<f64, NevanlinnaError> {
    let composed = curve.compose(q)?;
    if composed.is_zero() {
        return Err(NevanlinnaError::IdenticallyZero { index: 0 });
    }
    let divisor = Divisor::of(&composed)?;
    ensure_clear(&divisor, r)?;
    Ok(divisor.counting(r, truncation))
}

/// `2^{1}, 2^{1.5}, …, 2^{7}`.
pub fn default_radii() -> Vec<f64> {
    (0..=12).map(|i| 2f64.powf(1.0 + 0.5 * i as f64)).collect()
}

/// Nudges each radius by `r(1 + j/1000)`, `j = 0, 1, −1, …, ±10`, until every
/// zero is at least [`RADIUS_CLEARANCE`]`·r` away from the circle.
pub fn safe_radii(base: &[f64], divisors: &[&Divisor]) -> Result<Vec<f64>, NevanlinnaError> {
    base.iter()
        .map(|&r| {
            let steps = std::iter::once(0).chain((1..=10).flat_map(|j| [j, -j]));
            steps
                .map(|j| r * (1.0 + 0.001 * j as f64))
                .find(|&s| divisors.iter().all(|d| d.distance_to_circle(s) >= RADIUS_CLEARANCE * s))
                .ok_or(NevanlinnaError::NoSafeRadius { r })
        })
        .collect()
}

/// Everything the checks need about a curve and a family, computed once.
#[derive(Debug)]
pub struct Instance {
    pub curve: Curve,
    pub family: HypersurfaceFamily,
    pub delta: DistributiveConstant,
    /// Associated data at the lifted degree `d`.
    pub data: AssociatedData,
    /// Lifted `Q_j(f̃)`.
    pub composed: Vec<UniPoly>,
    pub divisors: Vec<Divisor>,
    /// Coordinates of the lifted `[Q_j]` in the basis of `data`.
    pub coordinates: Vec<Vec<GaussianRational>>,
}

impl Instance {
    pub fn new(curve: Curve, family: HypersurfaceFamily) -> Result<Self, NevanlinnaError> {
        let delta = distributive_constant(&family, curve.variety())?;
        Instance::with_delta(curve, family, delta)
    }

    pub fn with_delta(
        curve: Curve,
        family: HypersurfaceFamily,
        delta: DistributiveConstant,
    ) -> Result<Self, NevanlinnaError> {
        if family.nvars() != curve.variety().nvars() {
            return Err(NevanlinnaError::Mismatch);
        }
        let d = family.lifted_degree();
        let data = AssociatedData::new(&curve, d)?;
        let mut composed = Vec::new();
        let mut divisors = Vec::new();
        let mut coordinates = Vec::new();
        for (index, q) in family.lifted_members().iter().enumerate() {
            let c = curve.compose(q)?;
            if c.is_zero() {
                return Err(NevanlinnaError::IdenticallyZero { index });
            }
            divisors.push(Divisor::of(&c)?);
            composed.push(c);
            coordinates.push(curve.variety().coordinates_in_id(q, d).map_err(CurveError::from)?);
        }
        Ok(Instance { curve, family, delta, data, composed, divisors, coordinates })
    }

    pub fn q(&self) -> usize {
        self.family.len()
    }

    pub fn d(&self) -> u32 {
        self.family.lifted_degree()
    }

    /// Truncation level `M = H_V(d) − 1`.
    pub fn truncation(&self) -> usize {
        self.data.truncation()
    }

    pub fn delta_f64(&self) -> f64 {
        self.delta.value.to_f64().unwrap()
    }

    /// `q − Δ(M+1+ε)`.
    pub fn smt_coefficient(&self, epsilon: f64) -> f64 {
        self.q() as f64 - self.delta_f64() * (self.truncation() as f64 + 1.0 + epsilon)
    }

    /// Divisors of all `Q_j(f̃)` and of the Wronskian, for choosing radii.
    pub fn all_divisors(&self) -> Vec<&Divisor> {
        let mut all: Vec<&Divisor> = self.divisors.iter().collect();
        all.extend(self.data.wronskian_divisor());
        all
    }

    pub fn safe_radii(&self, base: &[f64]) -> Result<Vec<f64>, NevanlinnaError> {
        safe_radii(base, &self.all_divisors())
    }
}
