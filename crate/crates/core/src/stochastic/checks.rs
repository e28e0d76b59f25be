use std::f64::consts::PI;

use num_complex::Complex64;

use super::{disc_green_integral, Batch, McConfig, McEstimate, StochasticError};
use crate::curve::WedgeTower;
use crate::nevanlinna::{circle_mean, CheckReport, Verdict, DEFAULT_NODES, ZERO_ON_CIRCLE_TOL};
use crate::poly::{Divisor, UniPoly};

const BAND: f64 = 3.0;

/// Relative tolerance for functionals that are constant along every path,
/// where the standard error is zero and only rounding separates the sides.
const ROUNDING_FLOOR: f64 = 1e-12;

/// Asymptotic 1% critical value of the one-sample Kolmogorov–Smirnov statistic.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.6276 / (n as f64).sqrt()
}

/// Each row passes when `|mean − exact| ≤ max(3·stderr, rel·|exact|)`, with a
/// rounding floor.
pub fn occupation_check(name: &str, r: f64, rows: &[(String, McEstimate, f64)], rel: f64) -> CheckReport {
    let mut report = CheckReport::new(name);
    let mut ok = true;
    for (series, est, exact) in rows {
        let tol = (BAND * est.stderr).max(rel * exact.abs()).max(ROUNDING_FLOOR * (1.0 + exact.abs()));
        let margin = tol - (est.mean - exact).abs();
        ok &= margin >= 0.0;
        report.push(series.clone(), r, est.mean, margin);
        report.note(format!(
            "{series}: mean {:.6} stderr {:.2e} exact {:.6} (n={}, seed={})",
            est.mean, est.stderr, exact, est.n, est.seed
        ));
    }
    report.verdict = Verdict::from_bool(ok);
    report
}

/// `E_0[log|p(X_τ)|]` against Jensen's formula `log|c_v| + N_p(r, 0)`,
/// `c_v` the lowest nonzero coefficient.
pub fn exit_log_check(batch: &Batch, polys: &[(String, UniPoly)]) -> Result<CheckReport, StochasticError> {
    let r = batch.r;
    let mut rows = Vec::with_capacity(polys.len());
    for (label, p) in polys {
        let divisor = Divisor::of(p)?;
        if divisor.distance_to_circle(r) <= ZERO_ON_CIRCLE_TOL * r {
            return Err(StochasticError::ZeroOnCircle { r });
        }
        let lowest = p.coeff(p.valuation().expect("nonzero")).to_complex().norm();
        let exact = lowest.ln() + divisor.counting(r, None);
        let numeric = p.to_numeric();
        rows.push((label.clone(), batch.exit_log(|z| numeric.eval(z)), exact));
    }
    Ok(occupation_check("mc-jensen", r, &rows, 0.0))
}

/// Deterministic `T_{F_k}(r)`: the 2-D Green quadrature of `h_k` and the
/// circle average of `log|F_k/g_k|` minus its value at 0.
pub fn characteristic_reference(tower: &WedgeTower, k: usize, r: f64) -> Vec<(String, f64)> {
    let mut out = vec![("quadrature".to_string(), disc_green_integral(r, |z| tower.curvature(k, z).unwrap_or(0.0)))];
    if !tower.vanishes(k) {
        let g = tower.minor_gcd(k);
        let gnum = g.to_numeric();
        let at_zero: f64 = tower.minors(k).iter().map(|m| m.exact_div(g).unwrap().coeff(0).to_complex().norm_sqr()).sum();
        let circle = circle_mean(r, DEFAULT_NODES, |z| 0.5 * tower.norm_sqr(k as isize, z).ln() - gnum.eval(z).norm().ln())
            - 0.5 * at_zero.ln();
        out.push(("circle".to_string(), circle));
    }
    out
}

/// `T_{F_k}(r)` as `E_0[∫_0^τ h_k(X_s) ds]` against [`characteristic_reference`],
/// within `max(3·stderr, 2%)`.
pub fn mc_characteristic(
    tower: &WedgeTower,
    k: usize,
    r: f64,
    config: McConfig,
) -> Result<(McEstimate, CheckReport), StochasticError> {
    let density = |z: Complex64| tower.curvature(k, z).unwrap_or(0.0);
    let estimate = Batch::simulate(r, config, &[&density])?.occupation(0);
    let rows: Vec<_> =
        characteristic_reference(tower, k, r).into_iter().map(|(label, exact)| (label, estimate, exact)).collect();
    let mut report = occupation_check("mc-characteristic", r, &rows, 0.02);
    report.note(format!("k={k}"));
    Ok((estimate, report))
}

/// Both sides of the exit/occupation inequality for one test function.
#[derive(Clone, Debug)]
pub struct Lemma24Input {
    pub label: String,
    pub r: f64,
    pub delta: f64,
    /// Estimate of `E_0[u(X_τ)]`.
    pub exit: McEstimate,
    /// Estimate of `E_0[∫_0^τ u(X_s) ds]`.
    pub occupation: McEstimate,
}

/// `log E[u(X_τ)] ≤ (1+δ)² log E[∫_0^τ u] + δ log r`, with delta-method
/// bands on the logarithms. A margin inside the band is inconclusive.
pub fn lemma24_check(inputs: &[Lemma24Input]) -> CheckReport {
    let mut report = CheckReport::new("lemma24");
    let (mut any_fail, mut any_unsure) = (false, false);
    for inp in inputs {
        let w = (1.0 + inp.delta).powi(2);
        let lhs = inp.exit.mean.ln();
        let rhs = w * inp.occupation.mean.ln() + inp.delta * inp.r.ln();
        let sl = inp.exit.stderr / inp.exit.mean;
        let sr = w * inp.occupation.stderr / inp.occupation.mean;
        let band = BAND * sl.hypot(sr);
        let margin = rhs - lhs;
        if margin < -band {
            any_fail = true;
        } else if margin <= band {
            any_unsure = true;
        }
        report.push(inp.label.clone(), inp.r, lhs, margin);
        report.note(format!("{}: lhs {lhs:.6} rhs {rhs:.6} band {band:.2e} delta {}", inp.label, inp.delta));
    }
    report.verdict = if any_fail {
        Verdict::Fail
    } else if any_unsure {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    report
}

/// `g(E X) ≤ E g(X) + 3·stderr` for convex `g` on exit functionals, and
/// equality for an affine `g`.
pub fn jensen_expectation_check(batch: &Batch, a: Complex64) -> CheckReport {
    let mut report = CheckReport::new("jensen-expectation");
    let mut ok = true;
    let r = batch.r;
    let mut convex = |label: &str, x: McEstimate, gx: McEstimate, g: fn(f64) -> f64| {
        let margin = gx.mean + BAND * gx.stderr - g(x.mean);
        ok &= margin >= 0.0;
        report.push(label, r, g(x.mean), margin);
    };
    let log_dist = batch.exit_estimate(|z| (z - a).norm().ln());
    let dist = batch.exit_estimate(|z| (z - a).norm());
    convex("exp:log|X-a|", log_dist, dist, f64::exp);
    let re = batch.exit_estimate(|z| z.re);
    let abs_re = batch.exit_estimate(|z| z.re.abs());
    convex("abs:Re X", re, abs_re, f64::abs);
    let tau = batch.exit_time();
    let tau_sq = batch.functional(|s| s.exit_time * s.exit_time);
    convex("square:tau", tau, tau_sq, |x| x * x);
    let affine = batch.functional(|s| 2.0 * s.exit_time + 1.0);
    let gap = (2.0 * tau.mean + 1.0 - affine.mean).abs();
    let margin = affine.stderr - gap;
    ok &= margin >= 0.0;
    report.push("affine:tau", r, affine.mean, margin);
    report.verdict = Verdict::from_bool(ok);
    report
}

/// Kolmogorov–Smirnov test of exit angles against the uniform law, at 1%.
pub fn exit_angle_ks(batch: &Batch) -> CheckReport {
    let mut u: Vec<f64> = batch.samples.iter().map(|s| (s.exit_point.arg() + PI) / (2.0 * PI)).collect();
    u.sort_by(f64::total_cmp);
    let n = u.len() as f64;
    let stat = u
        .iter()
        .enumerate()
        .map(|(i, &x)| ((i + 1) as f64 / n - x).max(x - i as f64 / n))
        .fold(0.0, f64::max);
    let critical = ks_critical_1pct(u.len());
    let mut report = CheckReport::new("mc-exit-ks");
    report.push("ks", batch.r, stat, critical - stat);
    report.verdict = Verdict::from_bool(stat < critical);
    report.note(format!("D = {stat:.5}, 1% critical value {critical:.5}"));
    report
}

/// Each quadrant receives `25% ± 3·stderr` of the exit points.
pub fn quadrant_check(batch: &Batch) -> CheckReport {
    let mut report = CheckReport::new("mc-exit-quadrants");
    let mut ok = true;
    for q in 0..4 {
        let est = batch.exit_estimate(|z| {
            let quadrant = match (z.re >= 0.0, z.im >= 0.0) {
                (true, true) => 0,
                (false, true) => 1,
                (false, false) => 2,
                (true, false) => 3,
            };
            f64::from(u8::from(quadrant == q))
        });
        let margin = BAND * est.stderr - (est.mean - 0.25).abs();
        ok &= margin >= 0.0;
        report.push(format!("Q{}", q + 1), batch.r, est.mean, margin);
    }
    report.verdict = Verdict::from_bool(ok);
    report
}

/// `E[τ_r] = r²/2` for each batch, and `E[τ_r]/r²` equal across batches
/// within combined bands.
pub fn exit_time_check(batches: &[&Batch]) -> CheckReport {
    let mut report = CheckReport::new("mc-exit");
    let mut ok = true;
    let scaled: Vec<(f64, f64)> = batches
        .iter()
        .map(|b| {
            let t = b.exit_time();
            let r2 = b.r * b.r;
            let margin = BAND * t.stderr - (t.mean - r2 / 2.0).abs();
            ok &= margin >= 0.0;
            report.push("tau", b.r, t.mean, margin);
            (t.mean / r2, t.stderr / r2)
        })
        .collect();
    for (i, a) in scaled.iter().enumerate() {
        for b in &scaled[i + 1..] {
            let margin = BAND * a.1.hypot(b.1) - (a.0 - b.0).abs();
            ok &= margin >= 0.0;
        }
    }
    for (b, (ratio, _)) in batches.iter().zip(&scaled) {
        report.push("tau/r^2", b.r, *ratio, 0.0);
    }
    report.verdict = Verdict::from_bool(ok);
    report
}

/// Halving the step policy moves `E[τ_r]` by less than one standard error.
pub fn step_halving_check(coarse: &Batch, fine: &Batch) -> CheckReport {
    let (a, b) = (coarse.exit_time(), fine.exit_time());
    let se = a.stderr.max(b.stderr);
    let mut report = CheckReport::new("mc-step-halving");
    report.push("coarse", coarse.r, a.mean, 0.0);
    report.push("fine", fine.r, b.mean, se - (a.mean - b.mean).abs());
    report.verdict = Verdict::from_bool((a.mean - b.mean).abs() < se);
    report
}
