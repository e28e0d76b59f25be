//! Planar Brownian motion from the origin until it leaves a disc, and Monte
//! Carlo estimators built on the exit data.

mod checks;
mod quadrature;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::poly::PolyError;

pub use checks::{
    characteristic_reference, exit_angle_ks, exit_log_check, exit_time_check, jensen_expectation_check, ks_critical_1pct, lemma24_check,
    mc_characteristic, occupation_check, quadrant_check, step_halving_check, Lemma24Input,
};
pub use quadrature::{disc_green_integral, gauss_legendre};

/// Integrand accumulated along a path.
pub type Integrand<'a> = &'a (dyn Fn(Complex64) -> f64 + Sync);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StochasticError {
    #[error("radius {0} must be positive")]
    BadRadius(f64),
    #[error("need at least two samples, got {0}")]
    TooFewSamples(usize),
    #[error("sample {index} did not exit within {cap} steps")]
    StepCap { index: u64, cap: u64 },
    #[error("worker pool: {0}")]
    Pool(String),
    #[error("a zero lies on the circle |z| = {r}")]
    ZeroOnCircle { r: f64 },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Euler step `h = clamp(scale · (r − |X|)² / r, min_step, max_step)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StepPolicy {
    pub min_step: f64,
    pub scale: f64,
    pub max_step: f64,
    pub max_steps: u64,
}

impl Default for StepPolicy {
    fn default() -> Self {
        StepPolicy { min_step: 1e-6, scale: 0.01, max_step: 1e-3, max_steps: 50_000_000 }
    }
}

impl StepPolicy {
    pub fn step(&self, r: f64, x: Complex64) -> f64 {
        let dist = r - x.norm();
        (self.scale * dist * dist / r).min(self.max_step).max(self.min_step)
    }

    /// All three step parameters halved.
    pub fn halved(&self) -> StepPolicy {
        StepPolicy { min_step: self.min_step / 2.0, scale: self.scale / 2.0, max_step: self.max_step / 2.0, ..*self }
    }
}

/// One path's exit data.
#[derive(Clone, Debug, PartialEq)]
pub struct ExitSample {
    pub exit_point: Complex64,
    pub exit_time: f64,
    /// `∫_0^τ ψ_i(X_s) ds` for each registered integrand, by the midpoint rule.
    pub occupation: Vec<f64>,
    pub steps: u64,
}

/// The random stream of sample `index`: independent of how samples are
/// distributed over workers.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Simulates standard planar Brownian motion (each coordinate has variance
/// `t`) from 0 until `|X| ≥ r`, interpolating the last step linearly to the
/// circle.
pub fn sample_exit<R: Rng>(
    r: f64,
    rng: &mut R,
    policy: &StepPolicy,
    integrands: &[Integrand<'_>],
) -> Result<ExitSample, u64> {
    let mut x = Complex64::new(0.0, 0.0);
    let mut t = 0.0;
    let mut occupation = vec![0.0; integrands.len()];
    for steps in 1..=policy.max_steps {
        let h = policy.step(r, x);
        let sd = h.sqrt();
        let dx: f64 = rng.sample(StandardNormal);
        let dy: f64 = rng.sample(StandardNormal);
        let next = x + Complex64::new(sd * dx, sd * dy);
        if next.norm_sqr() < r * r {
            let mid = (x + next) * 0.5;
            for (acc, psi) in occupation.iter_mut().zip(integrands) {
                *acc += psi(mid) * h;
            }
            x = next;
            t += h;
            continue;
        }
        // |x + λ·d| = r with λ ∈ (0, 1].
        let d = next - x;
        let a = d.norm_sqr();
        let b = (x.conj() * d).re;
        let c = x.norm_sqr() - r * r;
        let lambda = ((-b + (b * b - a * c).sqrt()) / a).clamp(0.0, 1.0);
        let exit = x + d * lambda;
        let mid = (x + exit) * 0.5;
        for (acc, psi) in occupation.iter_mut().zip(integrands) {
            *acc += psi(mid) * h * lambda;
        }
        return Ok(ExitSample { exit_point: exit, exit_time: t + lambda * h, occupation, steps });
    }
    Err(policy.max_steps)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McConfig {
    pub samples: usize,
    pub seed: u64,
    /// Worker threads; results do not depend on it.
    pub workers: usize,
    pub policy: StepPolicy,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig { samples: 100_000, seed: 20240601, workers: 1, policy: StepPolicy::default() }
    }
}

/// Mean with its standard error, tagged with what reproduces it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
    pub seed: u64,
}

/// Sum in a fixed pairwise order so results are bit-identical run to run.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let (a, b) = values.split_at(values.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

impl McEstimate {
    pub fn from_values(values: &[f64], seed: u64) -> McEstimate {
        let n = values.len();
        let mean = pairwise_sum(values) / n as f64;
        let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
        let var = pairwise_sum(&dev) / (n as f64 - 1.0);
        McEstimate { mean, stderr: (var / n as f64).sqrt(), n, seed }
    }

    /// `|mean − target| ≤ k · stderr`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.stderr
    }
}

/// Exit data of `config.samples` paths in a disc of radius `r`.
#[derive(Clone, Debug)]
pub struct Batch {
    pub r: f64,
    pub config: McConfig,
    pub samples: Vec<ExitSample>,
}

impl Batch {
    pub fn simulate(r: f64, config: McConfig, integrands: &[Integrand<'_>]) -> Result<Batch, StochasticError> {
        if r.is_nan() || r <= 0.0 {
            return Err(StochasticError::BadRadius(r));
        }
        if config.samples < 2 {
            return Err(StochasticError::TooFewSamples(config.samples));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers.max(1))
            .build()
            .map_err(|e| StochasticError::Pool(e.to_string()))?;
        let samples = pool.install(|| {
            (0..config.samples as u64)
                .into_par_iter()
                .map(|index| {
                    let mut rng = sample_rng(config.seed, index);
                    sample_exit(r, &mut rng, &config.policy, integrands)
                        .map_err(|cap| StochasticError::StepCap { index, cap })
                })
                .collect::<Result<Vec<_>, _>>()
        })?;
        Ok(Batch { r, config, samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Estimate of `E_0[g(X_τ)]`.
    pub fn exit_estimate(&self, g: impl Fn(Complex64) -> f64 + Sync) -> McEstimate {
        let values: Vec<f64> = self.samples.par_iter().map(|s| g(s.exit_point)).collect();
        McEstimate::from_values(&values, self.config.seed)
    }

    /// Estimate of `E_0[τ]`.
    pub fn exit_time(&self) -> McEstimate {
        self.functional(|s| s.exit_time)
    }

    /// Estimate of `E_0[∫_0^τ ψ_i(X_s) ds]` for registered integrand `i`.
    pub fn occupation(&self, i: usize) -> McEstimate {
        self.functional(|s| s.occupation[i])
    }

    pub fn functional(&self, g: impl Fn(&ExitSample) -> f64) -> McEstimate {
        let values: Vec<f64> = self.samples.iter().map(g).collect();
        McEstimate::from_values(&values, self.config.seed)
    }

    /// Estimate of `E_0[log|u(X_τ)|]`.
    pub fn exit_log(&self, u: impl Fn(Complex64) -> Complex64 + Sync) -> McEstimate {
        self.exit_estimate(|z| u(z).norm().ln())
    }
}

/// `E_0[log|u(X_{τ_r})|]` from a fresh batch.
pub fn mc_exit_log(
    u: impl Fn(Complex64) -> Complex64 + Sync,
    r: f64,
    config: McConfig,
) -> Result<McEstimate, StochasticError> {
    Ok(Batch::simulate(r, config, &[])?.exit_log(u))
}

/// `E_0[∫_0^{τ_r} ψ(X_t) dt]` from a fresh batch.
pub fn mc_occupation(psi: Integrand<'_>, r: f64, config: McConfig) -> Result<McEstimate, StochasticError> {
    Ok(Batch::simulate(r, config, &[psi])?.occupation(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(samples: usize, workers: usize) -> McConfig {
        McConfig { samples, seed: 42, workers, policy: StepPolicy::default() }
    }

    #[test]
    fn exit_lands_on_circle() {
        let mut rng = sample_rng(1, 0);
        let s = sample_exit(2.0, &mut rng, &StepPolicy::default(), &[]).unwrap();
        assert!((s.exit_point.norm() - 2.0).abs() < 1e-12);
        assert!(s.exit_time > 0.0);
    }

    #[test]
    fn step_cap_is_reported() {
        let policy = StepPolicy { max_steps: 3, ..StepPolicy::default() };
        let config = McConfig { policy, ..small(4, 1) };
        assert!(matches!(Batch::simulate(2.0, config, &[]), Err(StochasticError::StepCap { .. })));
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let psi = |z: Complex64| z.norm_sqr();
        let a = Batch::simulate(1.0, small(2000, 1), &[&psi]).unwrap();
        let b = Batch::simulate(1.0, small(2000, 8), &[&psi]).unwrap();
        assert_eq!(a.samples, b.samples);
        assert_eq!(a.occupation(0), b.occupation(0));
    }

    #[test]
    fn estimate_statistics() {
        let e = McEstimate::from_values(&[1.0, 2.0, 3.0, 4.0], 0);
        assert_eq!(e.mean, 2.5);
        assert!((e.stderr - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert!(e.within(2.5, 0.0));
    }

    #[test]
    fn occupation_of_one_is_exit_time() {
        let one = |_: Complex64| 1.0;
        let b = Batch::simulate(1.0, small(200, 1), &[&one]).unwrap();
        for s in &b.samples {
            assert!((s.occupation[0] - s.exit_time).abs() < 1e-12);
        }
    }
}
