use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use thiserror::Error;

use super::{CheckReport, Instance, NevanlinnaError, Verdict};
use crate::curve::{Curve, CurveError};
use crate::family::{uniqueness_thresholds, HypersurfaceFamily, UniquenessThresholds};
use crate::poly::{CoprimeBase, UniPoly};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Lemma41Error {
    #[error("exponents must start at 1 and increase strictly")]
    Exponents,
    #[error("need one base per exponent gap")]
    Length,
    #[error("bases must be nonincreasing and at least 1")]
    Bases,
}

/// Checks `a_0^{t_1−t_0} ⋯ a_{n−1}^{t_n−t_{n−1}} ≤ (a_0 ⋯ a_{n−1})^Δ` with
/// `Δ = max_s (t_s − t_0)/s`, comparing logarithms. Returns the slack
/// `log RHS − log LHS`.
pub fn lemma41_check(t: &[i64], a: &[f64]) -> Result<f64, Lemma41Error> {
    if t.first() != Some(&1) || t.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Lemma41Error::Exponents);
    }
    if a.len() + 1 != t.len() {
        return Err(Lemma41Error::Length);
    }
    if a.iter().any(|&x| x.is_nan() || x < 1.0) || a.windows(2).any(|w| w[0] < w[1]) {
        return Err(Lemma41Error::Bases);
    }
    let delta = (1..t.len()).map(|s| (t[s] - t[0]) as f64 / s as f64).fold(0.0, f64::max);
    let lhs: f64 = a.iter().zip(t.windows(2)).map(|(x, w)| (w[1] - w[0]) as f64 * x.ln()).sum();
    let rhs = delta * a.iter().map(|x| x.ln()).sum::<f64>();
    Ok(rhs - lhs)
}

/// Every `1 = t_0 < t_1 < … < t_n ≤ 8` with `1 ≤ n ≤ 4` against every base
/// tuple from `{1, 1.5, 2, 4}^n` sorted into nonincreasing order.
pub fn lemma41_sweep() -> CheckReport {
    const BASES: [f64; 4] = [1.0, 1.5, 2.0, 4.0];
    let mut report = CheckReport::new("lemma41");
    let mut total = 0usize;
    let mut violations = 0usize;
    for n in 1..=4usize {
        let mut cases = 0usize;
        let mut worst = f64::INFINITY;
        for mask in 0u32..(1 << 7) {
            if mask.count_ones() as usize != n {
                continue;
            }
            let t: Vec<i64> = std::iter::once(1).chain((0..7).filter(|b| mask & (1 << b) != 0).map(|b| b + 2)).collect();
            for code in 0..4usize.pow(n as u32) {
                let mut a: Vec<f64> = (0..n).map(|i| BASES[(code >> (2 * i)) & 3]).collect();
                a.sort_by(|x, y| y.total_cmp(x));
                let slack = lemma41_check(&t, &a).expect("well-formed sweep input");
                // Rounding in the logarithms is far below this.
                if slack < -1e-12 {
                    violations += 1;
                }
                worst = worst.min(slack);
                cases += 1;
            }
        }
        total += cases;
        report.push(format!("n={n}"), n as f64, cases as f64, worst);
    }
    report.fitted_constant = report.rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    report.verdict = Verdict::from_bool(violations == 0);
    report.note(format!("{total} cases, {violations} violations"));
    report
}

/// At every zero of some `Q_j(f̃)`, checks
/// `Σ_j ν_j − Δ·ν_W ≤ Σ_j min(M, ν_j)` in exact arithmetic. Points sharing
/// an element of a coprime factor base share all multiplicities, so one test
/// per element covers all of its roots.
pub fn divisor_inequality_check(instance: &Instance) -> Result<CheckReport, NevanlinnaError> {
    let w = instance.data.wronskian();
    if w.is_zero() {
        return Err(NevanlinnaError::Degenerate);
    }
    let mut polys = instance.composed.clone();
    polys.push(w.clone());
    let base = CoprimeBase::new(&polys)?;
    let q = instance.q();
    let m = instance.truncation() as u32;
    let delta = &instance.delta.value;
    let mut report = CheckReport::new("divisor-inequality");
    let mut failures = 0usize;
    let mut points = 0usize;
    for (k, element) in base.elements().iter().enumerate() {
        let nu: Vec<u32> = (0..q).map(|j| base.exponent(j, k)).collect();
        if nu.iter().all(|&e| e == 0) {
            continue;
        }
        let nu_w = base.exponent(q, k);
        let sum: u32 = nu.iter().sum();
        let lhs = BigRational::from_integer(BigInt::from(sum)) - delta * BigRational::from_integer(BigInt::from(nu_w));
        let rhs = BigRational::from_integer(BigInt::from(nu.iter().map(|&e| e.min(m)).sum::<u32>()));
        if lhs > rhs {
            failures += 1;
        }
        let roots = element.degree().unwrap_or(0);
        points += roots;
        let modulus = element.to_numeric().simple_roots().iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        let margin = &rhs - &lhs;
        report.push(format!("deg{roots}"), modulus, lhs.to_f64().unwrap(), margin.to_f64().unwrap());
    }
    report.fitted_constant = report.rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    report.verdict = Verdict::from_bool(failures == 0);
    report.note(format!("{points} zeros, {failures} violations, M={m}, Δ={delta}"));
    Ok(report)
}

/// What the uniqueness theorem says about a pair of curves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UniquenessOutcome {
    /// `f = g` as maps.
    Identical,
    /// Some preimage point of a member is not a coincidence point.
    HypothesisViolated { member: usize },
    /// The hypothesis holds, `f ≠ g`, and `q` does not exceed the applicable threshold.
    Inconclusive,
    /// The hypothesis holds, `f ≠ g`, yet `q` exceeds a threshold.
    Contradiction,
}

/// Computes `H_{st} = f_s g_t − f_t g_s`, tests the sharing hypothesis exactly
/// and compares `q` with both thresholds.
pub fn uniqueness_certificate(
    f: &Curve,
    g: &Curve,
    family: &HypersurfaceFamily,
    delta: &BigRational,
) -> Result<(UniquenessOutcome, UniquenessThresholds, CheckReport), NevanlinnaError> {
    let variety = f.variety();
    if f.components().len() != g.components().len() {
        return Err(NevanlinnaError::Mismatch);
    }
    let d = family.lifted_degree();
    for c in [f, g] {
        if let Err(w) = c.nondegeneracy_check(d)? {
            return Err(CurveError::Degenerate { degree: d, witness: w.to_string() }.into());
        }
    }
    let thresholds = uniqueness_thresholds(variety, family, delta)?;
    let mut report = CheckReport::new("uniqueness");
    let n = f.components().len();
    let mut cross = Vec::new();
    for s in 0..n {
        for t in s + 1..n {
            let (fs, ft) = (&f.components()[s], &f.components()[t]);
            let (gs, gt) = (&g.components()[s], &g.components()[t]);
            cross.push(&(fs * gt) - &(ft * gs));
        }
    }
    let gcd = UniPoly::gcd_all(&cross);
    let q = BigRational::from_integer(BigInt::from(family.len()));
    report.push("threshold-a", d as f64, thresholds.a.to_f64().unwrap(), (&q - &thresholds.a).to_f64().unwrap());
    report.push("threshold-b", d as f64, thresholds.b.to_f64().unwrap(), (&q - &thresholds.b).to_f64().unwrap());
    let outcome = if gcd.is_zero() {
        UniquenessOutcome::Identical
    } else {
        let mut violated = None;
        'members: for (j, member) in family.members().iter().enumerate() {
            for c in [f, g] {
                let image = c.compose(member)?;
                if !image.square_free_part().divides(&gcd) {
                    violated = Some(j);
                    break 'members;
                }
            }
        }
        match violated {
            Some(member) => UniquenessOutcome::HypothesisViolated { member },
            None => {
                // Condition (b) needs f^{-1}(D_i ∩ D_j) = ∅ for all i < j.
                let images: Vec<UniPoly> =
                    family.members().iter().map(|m| f.compose(m)).collect::<Result<_, _>>()?;
                let disjoint = (0..images.len())
                    .all(|i| (i + 1..images.len()).all(|j| images[i].gcd(&images[j]).is_constant()));
                let exceeds = q > thresholds.a || (disjoint && q > thresholds.b);
                if exceeds {
                    UniquenessOutcome::Contradiction
                } else {
                    UniquenessOutcome::Inconclusive
                }
            }
        }
    };
    report.verdict = match outcome {
        UniquenessOutcome::Identical => Verdict::Pass,
        UniquenessOutcome::Contradiction => Verdict::Fail,
        UniquenessOutcome::HypothesisViolated { .. } | UniquenessOutcome::Inconclusive => Verdict::Vacuous,
    };
    report.note(format!("{outcome:?}"));
    report.fitted_constant = if gcd.is_zero() { 0.0 } else { gcd.degree().unwrap() as f64 };
    Ok((outcome, thresholds, report))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::algebra::Variety;
    use crate::poly::{parse_homogeneous, MultiPoly};

    #[test]
    fn lemma41_examples() {
        let slack = lemma41_check(&[1, 2, 4], &[4.0, 2.0]).unwrap();
        assert!((slack - (1.5 * 8f64.ln() - 16f64.ln())).abs() < 1e-12);
        assert_eq!(lemma41_check(&[1, 3], &[1.0]).unwrap(), 0.0);
        assert_eq!(lemma41_check(&[1, 1], &[2.0]), Err(Lemma41Error::Exponents));
        assert_eq!(lemma41_check(&[1, 2, 3], &[1.0, 2.0]), Err(Lemma41Error::Bases));
        assert_eq!(lemma41_check(&[1, 2, 3], &[2.0]), Err(Lemma41Error::Length));
    }

    #[test]
    fn lemma41_full_sweep() {
        let report = lemma41_sweep();
        assert_eq!(report.verdict, Verdict::Pass);
        let cases: f64 = report.rows.iter().map(|r| r.value).sum();
        assert_eq!(cases, 11564.0);
    }

    fn line(c: &[i64]) -> Curve {
        Curve::new(vec![UniPoly::from_ints(&[1]), UniPoly::from_ints(c)], Arc::new(Variety::projective_space(1)))
            .unwrap()
    }

    fn points(src: &[&str]) -> HypersurfaceFamily {
        let names = MultiPoly::default_names(2);
        HypersurfaceFamily::new(src.iter().map(|s| parse_homogeneous(s, &names).unwrap()).collect()).unwrap()
    }

    #[test]
    fn uniqueness_outcomes() {
        let fam = points(&["x1", "x1 - x0", "x1 + x0", "x1 - 2*x0", "x1 + 2*x0"]);
        let one = BigRational::from_integer(1.into());
        let (o, t, _) = uniqueness_certificate(&line(&[0, 1]), &line(&[0, 1]), &fam, &one).unwrap();
        assert_eq!(o, UniquenessOutcome::Identical);
        assert_eq!(t.a, BigRational::from_integer(4.into()));
        let (o, _, r) = uniqueness_certificate(&line(&[0, 1]), &line(&[1, 1]), &fam, &one).unwrap();
        assert_eq!(o, UniquenessOutcome::HypothesisViolated { member: 0 });
        assert_eq!(r.verdict, Verdict::Vacuous);
    }
}
