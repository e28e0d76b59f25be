use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::pairwise_sum;

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on
/// `P_n`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n > 0, "need at least one node");
    let mut out = vec![(0.0, 0.0); n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let prev = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - prev) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out[i] = (x, w);
        out[n - 1 - i] = (-x, w);
    }
    out
}

/// `∫_{|y|<r} (1/π) log(r/|y|) ψ(y) dV(y)`.
///
/// Substituting `|y| = r t²` leaves the smooth radial weight `−4 r² t³ log t`;
/// composite Gauss–Legendre in `t`, trapezoid in the angle.
pub fn disc_green_integral(r: f64, psi: impl Fn(Complex64) -> f64) -> f64 {
    const PANELS: usize = 32;
    const ANGLES: usize = 512;
    let rule = gauss_legendre(16);
    let mut radial = Vec::with_capacity(PANELS * rule.len());
    for panel in 0..PANELS {
        let (a, b) = (panel as f64 / PANELS as f64, (panel + 1) as f64 / PANELS as f64);
        for &(x, w) in &rule {
            let t = 0.5 * (a + b) + 0.5 * (b - a) * x;
            let rho = r * t * t;
            let ring: Vec<f64> =
                (0..ANGLES).map(|j| psi(Complex64::from_polar(rho, TAU * j as f64 / ANGLES as f64))).collect();
            let mean = pairwise_sum(&ring) / ANGLES as f64;
            // (1/π)·2π·mean·(−2 log t)·2r²t³ dt
            radial.push(0.5 * (b - a) * w * 8.0 * r * r * t.powi(3) * (-t.ln()) * mean);
        }
    }
    pairwise_sum(&radial)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let rule = gauss_legendre(5);
        let total: f64 = rule.iter().map(|(_, w)| w).sum();
        assert!((total - 2.0).abs() < 1e-14);
        // exact through degree 9
        let x8: f64 = rule.iter().map(|(x, w)| w * x.powi(8)).sum();
        assert!((x8 - 2.0 / 9.0).abs() < 1e-14);
        assert_eq!(gauss_legendre(1), vec![(0.0, 2.0)]);
    }

    #[test]
    fn radial_closed_forms() {
        for r in [0.5, 2.0, 4.0] {
            assert!((disc_green_integral(r, |_| 1.0) - r * r / 2.0).abs() < 1e-10 * r * r);
            let r4 = r.powi(4);
            assert!((disc_green_integral(r, |y| y.norm_sqr()) - r4 / 8.0).abs() < 1e-10 * r4);
        }
        // the line's curvature: ½ log(1 + r²)
        let t = disc_green_integral(2.0, |y| (1.0 + y.norm_sqr()).powi(-2));
        assert!((t - 0.5 * 5f64.ln()).abs() < 1e-9);
    }
}
