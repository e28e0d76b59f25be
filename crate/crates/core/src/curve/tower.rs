use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::poly::{derivative_matrix, determinant, ComplexPoly, Divisor, UniPoly};

/// The associated maps `F_p = G ∧ G' ∧ … ∧ G^{(p)}` of a polynomial map
/// `G = (g_0, …, g_m)`, as exact minors computed on first use.
#[derive(Debug)]
pub struct WedgeTower {
    rows: Vec<Vec<UniPoly>>,
    levels: Vec<OnceLock<Level>>,
}

#[derive(Debug)]
struct Level {
    /// Bitmask of the column subset for each minor.
    masks: Vec<u64>,
    minors: Vec<UniPoly>,
    numeric: Vec<ComplexPoly>,
    gcd: UniPoly,
    singular: OnceLock<Vec<Complex64>>,
}

/// Subsets of `0..n` of size `k` as bitmasks, in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<u64> {
    fn rec(start: usize, n: usize, k: usize, acc: u64, out: &mut Vec<u64>) {
        if k == 0 {
            out.push(acc);
            return;
        }
        for i in start..=n - k {
            rec(i + 1, n, k - 1, acc | (1 << i), out);
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, 0, &mut out);
    out
}

impl WedgeTower {
    pub fn new(components: Vec<UniPoly>) -> Self {
        assert!(!components.is_empty() && components.len() <= 64);
        let levels = (0..components.len()).map(|_| OnceLock::new()).collect();
        WedgeTower { rows: derivative_matrix(&components), levels }
    }

    /// Number of components `m + 1`.
    pub fn width(&self) -> usize {
        self.rows[0].len()
    }

    /// Highest level `m`, where `F_m` has the Wronskian as its only minor.
    pub fn top(&self) -> usize {
        self.width() - 1
    }

    pub fn components(&self) -> &[UniPoly] {
        &self.rows[0]
    }

    /// `derivative_table()[l][i] = g_i^{(l)}`.
    pub fn derivative_table(&self) -> &[Vec<UniPoly>] {
        &self.rows
    }

    fn level(&self, p: usize) -> &Level {
        self.levels[p].get_or_init(|| {
            let masks = subsets(self.width(), p + 1);
            let minors: Vec<UniPoly> = masks
                .iter()
                .map(|&mask| {
                    let cols: Vec<usize> = (0..self.width()).filter(|i| mask & (1 << i) != 0).collect();
                    let m = self.rows[..=p].iter().map(|row| cols.iter().map(|&c| row[c].clone()).collect()).collect();
                    determinant(m)
                })
                .collect();
            let numeric = minors.iter().map(UniPoly::to_numeric).collect();
            let gcd = UniPoly::gcd_all(&minors);
            Level { masks, minors, numeric, gcd, singular: OnceLock::new() }
        })
    }

    /// Minors of `F_p` indexed by the `(p+1)`-subsets in lexicographic order.
    pub fn minors(&self, p: usize) -> &[UniPoly] {
        &self.level(p).minors
    }

    /// Monic gcd of the minors of `F_p`; zero when `F_p ≡ 0`.
    pub fn minor_gcd(&self, p: usize) -> &UniPoly {
        &self.level(p).gcd
    }

    /// Zeros of `F_p`, the roots of [`WedgeTower::minor_gcd`].
    pub fn singular_points(&self, p: usize) -> &[Complex64] {
        let level = self.level(p);
        level.singular.get_or_init(|| {
            if level.gcd.is_zero() || level.gcd.is_constant() {
                return Vec::new();
            }
            Divisor::of(&level.gcd).map(|d| d.points().iter().map(|pt| pt.root).collect()).unwrap_or_default()
        })
    }

    /// Whether `F_p ≡ 0`, i.e. the components are linearly dependent to order `p`.
    pub fn vanishes(&self, p: usize) -> bool {
        self.level(p).gcd.is_zero()
    }

    /// `|F_p|²(z)`, with `|F_{-1}| = 1` and `F_p = 0` above the top level.
    pub fn norm_sqr(&self, p: isize, z: Complex64) -> f64 {
        if p < 0 {
            return 1.0;
        }
        let p = p as usize;
        if p > self.top() {
            return 0.0;
        }
        self.level(p).numeric.iter().map(|m| m.eval(z).norm_sqr()).sum()
    }

    pub fn norm(&self, p: isize, z: Complex64) -> f64 {
        self.norm_sqr(p, z).sqrt()
    }

    /// `h_p = |F_{p-1}|²|F_{p+1}|²/|F_p|⁴`.
    pub fn curvature(&self, p: usize, z: Complex64) -> Option<f64> {
        let p = p as isize;
        let mid = self.norm_sqr(p, z);
        if mid == 0.0 {
            return None;
        }
        Some(self.norm_sqr(p - 1, z) * self.norm_sqr(p + 1, z) / (mid * mid))
    }

    /// `|F_p ∨ a|²` for a coefficient vector `a`, where
    /// `(F_p ∨ a)_J = Σ_{l∉J} a_l · ε(l, J) · A_{J∪{l}}` and `ε(l, J)` is the
    /// sign of moving `l` to the front of `J ∪ {l}`.
    pub fn interior_norm_sqr(&self, p: usize, a: &[Complex64], z: Complex64) -> f64 {
        assert_eq!(a.len(), self.width());
        let level = self.level(p);
        let mut acc: BTreeMap<u64, Complex64> = BTreeMap::new();
        for (&mask, poly) in level.masks.iter().zip(&level.numeric) {
            let value = poly.eval(z);
            let mut position = 0;
            for (l, &al) in a.iter().enumerate() {
                if mask & (1 << l) == 0 {
                    continue;
                }
                let sign = if position % 2 == 0 { 1.0 } else { -1.0 };
                *acc.entry(mask & !(1 << l)).or_default() += al * value * sign;
                position += 1;
            }
        }
        // Ordered keys keep the sum bit-identical across runs.
        acc.values().map(Complex64::norm_sqr).sum()
    }

    /// `φ_p = |F_p ∨ a|² / (|F_p|² |a|²)`; `None` where `F_p` vanishes.
    pub fn contact(&self, p: usize, a: &[Complex64], z: Complex64) -> Option<f64> {
        let norm = self.norm_sqr(p as isize, z);
        let a_norm: f64 = a.iter().map(Complex64::norm_sqr).sum();
        if norm == 0.0 || a_norm == 0.0 {
            return None;
        }
        Some(self.interior_norm_sqr(p, a, z) / (norm * a_norm))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> UniPoly {
        UniPoly::from_ints(c)
    }

    #[test]
    fn line_tower() {
        let t = WedgeTower::new(vec![p(&[1]), p(&[0, 1])]);
        let z = Complex64::new(0.3, -1.2);
        assert!((t.norm_sqr(0, z) - (1.0 + z.norm_sqr())).abs() < 1e-14);
        assert!((t.norm(1, z) - 1.0).abs() < 1e-15);
        assert_eq!(t.norm(-1, z), 1.0);
        let h = t.curvature(0, z).unwrap();
        assert!((h - 1.0 / (1.0 + z.norm_sqr()).powi(2)).abs() < 1e-15);
        assert_eq!(t.curvature(1, z), Some(0.0));
    }

    #[test]
    fn contact_anchor_cases() {
        let t = WedgeTower::new(vec![p(&[1]), p(&[0, 1]), p(&[0, 0, 1])]);
        let a = [Complex64::new(1.0, 0.0), Complex64::new(-2.0, 0.0), Complex64::new(0.5, 0.25)];
        let z = Complex64::new(0.7, 0.4);
        let q = a[0] + a[1] * z + a[2] * z * z;
        let a_norm: f64 = a.iter().map(Complex64::norm_sqr).sum();
        let phi0 = t.contact(0, &a, z).unwrap();
        assert!((phi0 - q.norm_sqr() / (t.norm_sqr(0, z) * a_norm)).abs() < 1e-14);
        assert!((t.contact(2, &a, z).unwrap() - 1.0).abs() < 1e-14);
        let phi1 = t.contact(1, &a, z).unwrap();
        assert!((0.0..=1.0).contains(&phi1));
    }

    #[test]
    fn subset_enumeration() {
        assert_eq!(subsets(3, 2), vec![0b011, 0b101, 0b110]);
        assert_eq!(subsets(4, 4), vec![0b1111]);
        assert_eq!(subsets(5, 2).len(), 10);
    }
}
