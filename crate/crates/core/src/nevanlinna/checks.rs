use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    characteristic, check_nodes, circle_mean, ensure_clear, least_squares_slope, safe_radii, spread, CheckReport,
    Instance, NevanlinnaError, Verdict,
};
use crate::curve::{unit_coordinates, Curve, WedgeTower};
use crate::poly::{Divisor, UniPoly};

/// Radius-wise residuals must agree to this spread.
pub const RESIDUAL_SPREAD_TOL: f64 = 1e-6;

/// Margins may trend down in `log r` by at most this slope.
pub const SLOPE_TOL: f64 = 1e-3;

fn log_radii(radii: &[f64]) -> Vec<f64> {
    radii.iter().map(|r| r.ln()).collect()
}

/// `d·T(r) − m(r, Q_j) − N(r, Q_j)` for every lifted member; each series must
/// be constant in `r`.
pub fn fmt_residual(instance: &Instance, radii: &[f64], nodes: usize) -> Result<CheckReport, NevanlinnaError> {
    check_nodes(nodes)?;
    let d = instance.d() as f64;
    let mut report = CheckReport::new("fmt");
    let ts: Vec<f64> = radii.iter().map(|&r| characteristic(&instance.curve, r, nodes)).collect::<Result<_, _>>()?;
    let mut worst = 0.0f64;
    let mut worst_slope = 0.0f64;
    for (j, (q, (composed, divisor))) in
        instance.family.lifted_members().iter().zip(instance.composed.iter().zip(&instance.divisors)).enumerate()
    {
        let numeric = composed.to_numeric();
        let qnorm = q.coefficient_norm().ln();
        let mut residuals = Vec::with_capacity(radii.len());
        for (&r, &t) in radii.iter().zip(&ts) {
            ensure_clear(divisor, r)?;
            let m = circle_mean(r, nodes, |z| d * instance.curve.norm(z).ln() + qnorm - numeric.eval(z).norm().ln());
            let n = divisor.counting(r, None);
            residuals.push(d * t - m - n);
        }
        let mean = residuals.iter().sum::<f64>() / residuals.len() as f64;
        for (&r, &rho) in radii.iter().zip(&residuals) {
            report.push(format!("Q{}", j + 1), r, rho, rho - mean);
        }
        if j == 0 {
            report.fitted_constant = mean;
        }
        worst = worst.max(spread(&residuals));
        let slope = least_squares_slope(&log_radii(radii), &residuals);
        if slope.abs() > worst_slope.abs() {
            worst_slope = slope;
        }
    }
    report.slope_estimate = worst_slope;
    report.verdict = Verdict::from_bool(worst <= RESIDUAL_SPREAD_TOL);
    report.note(format!("max spread {worst:e}"));
    Ok(report)
}

/// `∮ log|p| − N_p(r, 0)` must be constant across radii.
pub fn jensen_residual(p: &UniPoly, radii: &[f64], nodes: usize) -> Result<CheckReport, NevanlinnaError> {
    check_nodes(nodes)?;
    let divisor = Divisor::of(p)?;
    let numeric = p.to_numeric();
    let mut values = Vec::with_capacity(radii.len());
    for &r in radii {
        ensure_clear(&divisor, r)?;
        values.push(circle_mean(r, nodes, |z| numeric.eval(z).norm().ln()) - divisor.counting(r, None));
    }
    let mut report = CheckReport::new("jensen");
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    for (&r, &v) in radii.iter().zip(&values) {
        report.push("", r, v, v - mean);
    }
    report.fitted_constant = mean;
    report.slope_estimate = least_squares_slope(&log_radii(radii), &values);
    let s = spread(&values);
    report.verdict = Verdict::from_bool(s <= RESIDUAL_SPREAD_TOL);
    report.note(format!("spread {s:e}"));
    Ok(report)
}

fn finish_margin_report(report: &mut CheckReport, radii: &[f64], margins: &[f64], coefficient: f64) {
    report.slope_estimate = least_squares_slope(&log_radii(radii), margins);
    report.fitted_constant = -margins.iter().copied().fold(f64::INFINITY, f64::min);
    report.verdict = if coefficient <= 0.0 {
        Verdict::Vacuous
    } else {
        Verdict::from_bool(report.slope_estimate >= -SLOPE_TOL)
    };
    report.note(format!("coefficient q-Δ(M+1+ε) = {coefficient}"));
}

/// `Σ_j (1/d) N^{[M]}(r, Q_j) + Δδ log r − (q − Δ(M+1+ε)) T(r)`, which should
/// stay bounded below: its slope in `log r` must be nonnegative.
pub fn smt_margin(
    instance: &Instance,
    epsilon: f64,
    delta_small: f64,
    radii: &[f64],
    nodes: usize,
) -> Result<CheckReport, NevanlinnaError> {
    let m = instance.truncation() as u32;
    margin_report("smt", instance, epsilon, delta_small, radii, nodes, |r| {
        instance.divisors.iter().map(|d| d.counting(r, Some(m))).sum::<f64>()
    })
}

/// As [`smt_margin`] with untruncated counting functions minus
/// `(Δ/d) N_W(r, 0)`.
pub fn smt_wronskian_margin(
    instance: &Instance,
    epsilon: f64,
    delta_small: f64,
    radii: &[f64],
    nodes: usize,
) -> Result<CheckReport, NevanlinnaError> {
    let w = instance.data.wronskian_divisor().ok_or(NevanlinnaError::Degenerate)?;
    let delta = instance.delta_f64();
    let mut report = margin_report("smt-wronskian", instance, epsilon, delta_small, radii, nodes, |r| {
        instance.divisors.iter().map(|d| d.counting(r, None)).sum::<f64>() - delta * w.counting(r, None)
    })?;
    report.note("Wronskian term taken as −(Δ/d)·N_W(r, 0)");
    Ok(report)
}

fn margin_report(
    name: &str,
    instance: &Instance,
    epsilon: f64,
    delta_small: f64,
    radii: &[f64],
    nodes: usize,
    weighted_counting: impl Fn(f64) -> f64,
) -> Result<CheckReport, NevanlinnaError> {
    if instance.data.wronskian().is_zero() {
        return Err(NevanlinnaError::Degenerate);
    }
    let d = instance.d() as f64;
    let delta = instance.delta_f64();
    let coefficient = instance.smt_coefficient(epsilon);
    let mut report = CheckReport::new(name);
    let mut margins = Vec::with_capacity(radii.len());
    for &r in radii {
        for div in instance.all_divisors() {
            ensure_clear(div, r)?;
        }
        let t = characteristic(&instance.curve, r, nodes)?;
        let margin = weighted_counting(r) / d + delta * delta_small * r.ln() - coefficient * t;
        report.push("", r, t, margin);
        margins.push(margin);
    }
    finish_margin_report(&mut report, radii, &margins, coefficient);
    Ok(report)
}

/// `N_{F_k}(r, 0) + T_{F_k}(r) ≤ (2n+1) T_f(r) + δ log r + O(1)` for the
/// associated maps of `f̃` itself, with the `O(1)` and `O(log T_f)` terms
/// replaced by a fitted constant and the slope criterion.
pub fn lemma31_empirical(
    curve: &Curve,
    k: usize,
    delta_small: f64,
    radii: &[f64],
    nodes: usize,
) -> Result<CheckReport, NevanlinnaError> {
    check_nodes(nodes)?;
    let tower = WedgeTower::new(curve.components().to_vec());
    if k > tower.top() {
        return Err(NevanlinnaError::Invalid(format!("level {k} above {}", tower.top())));
    }
    let mut report = CheckReport::new("lemma31");
    if tower.vanishes(k) {
        report.verdict = Verdict::Vacuous;
        report.note(format!("F_{k} vanishes identically"));
        return Ok(report);
    }
    let g = tower.minor_gcd(k).clone();
    let gnum = g.to_numeric();
    let at_zero: f64 = tower.minors(k).iter().map(|m| m.exact_div(&g).unwrap().coeff(0).to_complex().norm_sqr()).sum();
    let divisor = if g.is_constant() { None } else { Some(Divisor::of(&g)?) };
    let radii = match &divisor {
        Some(d) => safe_radii(radii, &[d])?,
        None => radii.to_vec(),
    };
    let n = curve.components().len() - 1;
    let f0 = curve.norm(Complex64::new(0.0, 0.0)).ln();
    let mut margins = Vec::new();
    for &r in &radii {
        let t_f = characteristic(curve, r, nodes)? - f0;
        let t_k = circle_mean(r, nodes, |z| 0.5 * tower.norm_sqr(k as isize, z).ln() - gnum.eval(z).norm().ln())
            - 0.5 * at_zero.ln();
        let n_k = divisor.as_ref().map_or(0.0, |d| d.counting(r, None));
        let margin = (2 * n + 1) as f64 * t_f + delta_small * r.ln() - n_k - t_k;
        report.push(format!("k={k}"), r, n_k + t_k, margin);
        margins.push(margin);
    }
    finish_margin_report(&mut report, &radii, &margins, 1.0);
    report.details.clear();
    report.note(format!("k={k}, n={n}"));
    Ok(report)
}

/// Uniform points in `|z| ≤ radius`, at least `clearance` away from every
/// point of `avoid`, from a seeded stream.
pub fn sample_points(count: usize, radius: f64, seed: u64, avoid: &[Complex64], clearance: f64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let rho = radius * rng.random::<f64>().sqrt();
        let theta = rng.random::<f64>() * std::f64::consts::TAU;
        let z = Complex64::from_polar(rho, theta);
        if avoid.iter().all(|a| (a - z).norm() >= clearance) {
            out.push(z);
        }
    }
    out
}

#[derive(Clone, Copy, Debug)]
pub struct CurvatureOptions {
    /// Coarser finite-difference step; the stencil is also evaluated at half of it.
    pub step: f64,
    /// Relative tolerance for the Laplacian identity.
    pub tolerance: f64,
    /// Relative tolerance for the telescoping product.
    pub telescoping_tolerance: f64,
}

impl Default for CurvatureOptions {
    fn default() -> Self {
        CurvatureOptions { step: 1e-3, tolerance: 1e-4, telescoping_tolerance: 1e-8 }
    }
}

/// At each point and each `p < top`, compares the finite-difference quarter Laplacian
/// of `log|F_p|²` with `h_p`, and checks
/// `Π_{p<M} h_p^{M−p} = |F_M|² / |F_0|^{2(M+1)}`.
pub fn curvature_check(tower: &WedgeTower, points: &[Complex64], options: CurvatureOptions) -> CheckReport {
    let top = tower.top();
    let mut report = CheckReport::new("curvature");
    if top == 0 {
        report.verdict = Verdict::Vacuous;
        report.note("single component");
        return report;
    }
    // Five-point stencil at steps h and h/2, Richardson-extrapolated.
    let quarter_laplacian = |p: usize, z: Complex64, h: f64| {
        let centre = tower.norm_sqr(p as isize, z);
        let offsets = [Complex64::new(h, 0.0), Complex64::new(-h, 0.0), Complex64::new(0.0, h), Complex64::new(0.0, -h)];
        // Ratios before logarithms keep the cancellation error at O(ε).
        offsets.iter().map(|o| (tower.norm_sqr(p as isize, z + o) / centre).ln()).sum::<f64>() / (4.0 * h * h)
    };
    let h = options.step;
    let mut worst_fd = 0.0f64;
    let mut worst_tel = 0.0f64;
    for &z in points {
        let mut log_product = 0.0;
        for p in 0..top {
            let fd = (4.0 * quarter_laplacian(p, z, h / 2.0) - quarter_laplacian(p, z, h)) / 3.0;
            let exact = tower.curvature(p, z).unwrap_or(f64::NAN);
            let rel = ((fd - exact) / exact).abs();
            worst_fd = worst_fd.max(if rel.is_nan() { f64::INFINITY } else { rel });
            report.push(format!("p={p}"), z.norm(), exact, rel);
            log_product += (top - p) as f64 * exact.ln();
        }
        let target = tower.norm_sqr(top as isize, z).ln() - (top + 1) as f64 * tower.norm_sqr(0, z).ln();
        let tel = (log_product - target).exp_m1().abs();
        worst_tel = worst_tel.max(if tel.is_nan() { f64::INFINITY } else { tel });
        report.push("telescoping", z.norm(), log_product, tel);
    }
    report.fitted_constant = worst_fd;
    report.slope_estimate = worst_tel;
    report.verdict = Verdict::from_bool(worst_fd <= options.tolerance && worst_tel <= options.telescoping_tolerance);
    report.note(format!("max laplacian error {worst_fd:e}, max telescoping error {worst_tel:e}"));
    report
}

/// For `p < M`, `Φ_jp = φ_{p+1}(Q_j) / (φ_p(Q_j) log²(δ/φ_p(Q_j)))` and
/// `R = Σ_j Φ_jp / (Π_j Φ_jp)^{1/(Δ(M−p))}`; records `inf R` and checks
/// `Π_p Φ_jp = (|F_0|²/|F_0(Q_j)|²) Π_p log^{−2}(δ/φ_p(Q_j))`.
pub fn sum_product_check(
    instance: &Instance,
    delta_big: f64,
    points: &[Complex64],
) -> Result<CheckReport, NevanlinnaError> {
    if delta_big <= 1.0 {
        return Err(NevanlinnaError::Invalid(format!("δ must exceed 1, got {delta_big}")));
    }
    if instance.data.wronskian().is_zero() {
        return Err(NevanlinnaError::Degenerate);
    }
    let tower = instance.data.tower();
    let m = instance.truncation();
    let delta = instance.delta_f64();
    let mut report = CheckReport::new("sum-product");
    if m == 0 {
        report.verdict = Verdict::Vacuous;
        report.note("M = 0");
        return Ok(report);
    }
    let units: Vec<Vec<Complex64>> = instance.coordinates.iter().map(|a| unit_coordinates(a)).collect();
    let scales: Vec<f64> = instance
        .coordinates
        .iter()
        .map(|a| a.iter().map(|c| c.to_complex().norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let composed: Vec<_> = instance.composed.iter().map(UniPoly::to_numeric).collect();
    let mut inf_ratio = f64::INFINITY;
    let mut worst_tel = 0.0f64;
    for &z in points {
        let phis: Vec<Vec<f64>> = units
            .iter()
            .map(|a| (0..=m).map(|p| tower.contact(p, a, z).ok_or(NevanlinnaError::Invalid(format!("F_p vanishes at {z}")))).collect())
            .collect::<Result<_, _>>()?;
        for p in 0..m {
            let logs: Vec<f64> = phis
                .iter()
                .map(|phi| (phi[p + 1] / (phi[p] * (delta_big / phi[p]).ln().powi(2))).ln())
                .collect();
            let sum: f64 = logs.iter().map(|l| l.exp()).sum();
            let ratio = sum / (logs.iter().sum::<f64>() / (delta * (m - p) as f64)).exp();
            inf_ratio = inf_ratio.min(ratio);
            report.push(format!("p={p}"), z.norm(), ratio, ratio);
        }
        let f0 = tower.norm_sqr(0, z);
        for (j, phi) in phis.iter().enumerate() {
            let lhs: f64 = (0..m).map(|p| (phi[p + 1] / (phi[p] * (delta_big / phi[p]).ln().powi(2))).ln()).sum();
            let fq = composed[j].eval(z).norm_sqr() / (scales[j] * scales[j]);
            let rhs = (f0 / fq).ln() - 2.0 * (0..m).map(|p| (delta_big / phi[p]).ln().ln()).sum::<f64>();
            let err = (lhs - rhs).exp_m1().abs();
            worst_tel = worst_tel.max(if err.is_nan() { f64::INFINITY } else { err });
        }
    }
    report.fitted_constant = inf_ratio;
    report.slope_estimate = worst_tel;
    report.verdict = Verdict::from_bool(inf_ratio >= 1e-12 && worst_tel <= 1e-8);
    report.note(format!("inf R = {inf_ratio:e}, max telescoping error {worst_tel:e}"));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::algebra::Variety;
    use crate::family::HypersurfaceFamily;
    use crate::nevanlinna::{default_radii, DEFAULT_NODES};
    use crate::poly::{parse_homogeneous, parse_univariate, MultiPoly};

    fn instance(n: usize, variety: &[&str], curve: &[&str], members: &[&str]) -> Instance {
        let names = MultiPoly::default_names(n + 1);
        let v = Arc::new(Variety::new(n, variety.iter().map(|s| parse_homogeneous(s, &names).unwrap()).collect()).unwrap());
        let f = Curve::new(curve.iter().map(|s| parse_univariate(s).unwrap()).collect(), v).unwrap();
        let fam = HypersurfaceFamily::new(members.iter().map(|s| parse_homogeneous(s, &names).unwrap()).collect()).unwrap();
        Instance::new(f, fam).unwrap()
    }

    fn four_points() -> Instance {
        instance(1, &[], &["1", "z"], &["x1", "x1 - x0", "x1 + x0", "x1 - i*x0"])
    }

    #[test]
    fn four_point_margin_slope_matches_closed_form() {
        let inst = four_points();
        assert_eq!(inst.truncation(), 1);
        let radii = inst.safe_radii(&default_radii()).unwrap();
        let report = smt_margin(&inst, 0.1, 0.1, &radii, DEFAULT_NODES).unwrap();
        // Every N^{[1]} equals log r; T = ½log(1+r²).
        let closed: Vec<f64> = radii.iter().map(|r| 4.1 * r.ln() - 1.9 * 0.5 * (1.0 + r * r).ln()).collect();
        let expected = least_squares_slope(&log_radii(&radii), &closed);
        assert!((report.slope_estimate - expected).abs() < 1e-3, "{} vs {expected}", report.slope_estimate);
        assert_eq!(report.verdict, Verdict::Pass);
        let w = smt_wronskian_margin(&inst, 0.1, 0.1, &radii, DEFAULT_NODES).unwrap();
        assert!((w.slope_estimate - expected).abs() < 1e-3);
    }

    #[test]
    fn vacuous_when_coefficient_is_not_positive() {
        let inst = instance(1, &[], &["1", "z"], &["x1", "x1 - x0"]);
        let report = smt_margin(&inst, 0.1, 0.1, &[2.0, 4.0], 256).unwrap();
        assert_eq!(report.verdict, Verdict::Vacuous);
    }

    #[test]
    fn fmt_and_jensen_residuals_are_flat() {
        let inst = instance(2, &[], &["1 + z^3", "z - 2*z^2", "3 + z^2"], &["x0^2 + x1*x2", "x1 - 2*x0 + x2"]);
        let radii = inst.safe_radii(&default_radii()).unwrap();
        let report = fmt_residual(&inst, &radii, DEFAULT_NODES).unwrap();
        assert_eq!(report.verdict, Verdict::Pass, "{}", report.details);
        let p = parse_univariate("z^5 - 3*z^2 + (1+i)*z - 7/2").unwrap();
        let radii = safe_radii(&[2.0, 3.0, 5.0, 8.0], &[&Divisor::of(&p).unwrap()]).unwrap();
        let report = jensen_residual(&p, &radii, DEFAULT_NODES).unwrap();
        assert_eq!(report.verdict, Verdict::Pass, "{}", report.details);
    }

    #[test]
    fn curvature_identity_on_twisted_cubic() {
        let inst = instance(
            3,
            &["x0*x2 - x1^2", "x1*x3 - x2^2", "x0*x3 - x1*x2"],
            &["1", "z", "z^2", "z^3"],
            &["x0 + x3", "x1 - x2"],
        );
        let tower = inst.data.tower();
        let avoid: Vec<Complex64> = (0..=tower.top()).flat_map(|p| tower.singular_points(p).to_vec()).collect();
        let points = sample_points(100, 2.0, 7, &avoid, 1e-2);
        let report = curvature_check(tower, &points, CurvatureOptions::default());
        assert_eq!(report.verdict, Verdict::Pass, "{}", report.details);
    }

    #[test]
    fn curvature_identity_on_conic_over_quadrics() {
        // M = 5 on P^1 embedded by quadrics.
        let inst = instance(1, &[], &["1 - z", "z + z^3"], &["x0^2 + x1^2", "x0*x1"]);
        assert_eq!(inst.truncation(), 2);
        let tower = inst.data.tower();
        let avoid: Vec<Complex64> = (0..=tower.top()).flat_map(|p| tower.singular_points(p).to_vec()).collect();
        let points = sample_points(100, 2.0, 11, &avoid, 1e-2);
        let report = curvature_check(tower, &points, CurvatureOptions::default());
        assert_eq!(report.verdict, Verdict::Pass, "{}", report.details);
    }

    #[test]
    fn sum_product_on_plane_conic() {
        let inst = instance(2, &[], &["1", "z", "z^2"], &["x0", "x1 - x0", "x2 - 3*x1 + x0", "x1 + 2*x2"]);
        let tower = inst.data.tower();
        let mut avoid: Vec<Complex64> = (0..=tower.top()).flat_map(|p| tower.singular_points(p).to_vec()).collect();
        for d in &inst.divisors {
            avoid.extend(d.points().iter().map(|p| p.root));
        }
        let points = sample_points(200, 10.0, 3, &avoid, 1e-2);
        let report = sum_product_check(&inst, 10.0, &points).unwrap();
        assert_eq!(report.verdict, Verdict::Pass, "{}", report.details);
    }

    #[test]
    fn lemma31_on_conic() {
        let v = Arc::new(Variety::projective_space(2));
        let f = Curve::new(["1", "z", "z^2"].iter().map(|s| parse_univariate(s).unwrap()).collect(), v).unwrap();
        let radii: Vec<f64> = (1..=6).map(|i| 2f64.powi(i)).collect();
        for k in 0..=2 {
            let report = lemma31_empirical(&f, k, 0.1, &radii, 1024).unwrap();
            assert_eq!(report.verdict, Verdict::Pass, "k={k}: {}", report.details);
            assert!(report.margins().iter().all(|&m| m > 0.0), "k={k}");
        }
    }
}
