//! Closed-form error analysis of the averaging estimator `u = mean(m_n)`
//! for a single subcarrier observed as `m_n = h exp(j Z_n) + w_n`, with
//! Gaussian `Z_n ~ N(mu, xi^2)` and `w_n ~ CN(0, sigma^2)`, plus a Monte Carlo
//! counterpart for validation. All angles and variances are in radians.

use rayon::prelude::*;

use crate::angle::deg_to_rad;
use crate::error::{Error, Result};
use crate::keystream::{derive_seed, CounterStream, UniformSource};
use crate::obfuscation::{sample_phase, DistributionSpec};
use crate::phy::C64;

/// Modified Cramer-Rao bound on the channel estimate, `sigma^2 / N`.
pub fn mcrb(noise_var: f64, n: u64) -> f64 {
    noise_var / n as f64
}

/// Squared bias `|h|^2 (1 + e^{-xi^2} - 2 cos(mu) e^{-xi^2/2})`. The
/// legitimate receiver, which removes the mean, corresponds to `mu = 0`.
pub fn bias_sq(h_sq: f64, variance: f64, mean: f64) -> f64 {
    h_sq * (1.0 + (-variance).exp() - 2.0 * mean.cos() * (-variance / 2.0).exp())
}

/// `|h|^2/N - |h|^2 e^{-xi^2}/N + sigma^2/N`.
pub fn estimator_variance(h_sq: f64, noise_var: f64, variance: f64, n: u64) -> f64 {
    let n = n as f64;
    h_sq / n - h_sq * (-variance).exp() / n + noise_var / n
}

/// Inputs of the closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryInput {
    pub h_sq: f64,
    pub noise_var: f64,
    /// Phase-rotation variance, rad².
    pub variance: f64,
    /// Phase-rotation mean, radians.
    pub mean: f64,
    pub n: u64,
}

impl TheoryInput {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.h_sq, self.noise_var, self.variance, self.mean]
            .iter()
            .all(|x| x.is_finite());
        if !finite || self.h_sq < 0.0 || self.noise_var < 0.0 || self.variance < 0.0 {
            return Err(Error::invalid(format!("invalid theory input {self:?}")));
        }
        if self.n == 0 {
            return Err(Error::invalid("N must be at least 1"));
        }
        Ok(())
    }
}

/// Mean squared error: squared bias plus variance.
pub fn estimator_mse(input: &TheoryInput) -> f64 {
    bias_sq(input.h_sq, input.variance, input.mean)
        + estimator_variance(input.h_sq, input.noise_var, input.variance, input.n)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McrbBounds {
    pub magnitude: f64,
    pub phase: f64,
    /// Bound on the rotation itself; zero when `xi^2 = 0` or `sigma^2 = 0`.
    pub rotation: f64,
}

/// `sigma^2/(2N)`, `sigma^2/(2N|h|^2)` and `1/(2N|h|^2/sigma^2 + N/xi^2)`.
pub fn mcrb_bounds(h_sq: f64, noise_var: f64, variance: f64, n: u64) -> Result<McrbBounds> {
    if !(h_sq > 0.0) {
        return Err(Error::invalid("phase bound needs |h|^2 > 0"));
    }
    if n == 0 {
        return Err(Error::invalid("N must be at least 1"));
    }
    let n = n as f64;
    Ok(McrbBounds {
        magnitude: noise_var / (2.0 * n),
        phase: noise_var / (2.0 * n * h_sq),
        rotation: 1.0 / (2.0 * n * h_sq / noise_var + n / variance),
    })
}

/// Monte Carlo estimates of the estimator's error terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalStats {
    pub bias_sq: f64,
    pub variance: f64,
    pub mse: f64,
}

/// Simulates `trials` independent captures of `n` measurements of `h` with
/// rotations from `spec` (scalar mean) and noise of variance `noise_var`.
pub fn empirical_estimator_stats(
    h: C64,
    noise_var: f64,
    spec: &DistributionSpec,
    n: u64,
    trials: u64,
    seed: u64,
) -> Result<EmpiricalStats> {
    if trials < 100 {
        return Err(Error::invalid(format!("need at least 100 trials, got {trials}")));
    }
    if n == 0 {
        return Err(Error::invalid("N must be at least 1"));
    }
    if !(noise_var >= 0.0) {
        return Err(Error::invalid("noise variance must be >= 0"));
    }
    let scale = (noise_var / 2.0).sqrt();
    // Per-trial error `u - h`, accumulated as the mean of `m_n - h` so the
    // degenerate case is exactly zero.
    let errors: Vec<C64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut s = CounterStream::new(derive_seed(seed, t));
            let mut sum = C64::new(0.0, 0.0);
            for _ in 0..n {
                let z = deg_to_rad(sample_phase(spec, &mut s));
                let (a, b) = s.next_normal_pair();
                sum += h * (C64::from_polar(1.0, z) - 1.0) + C64::new(a * scale, b * scale);
            }
            sum / n as f64
        })
        .collect();
    let count = trials as f64;
    let bias = errors.iter().sum::<C64>() / count;
    let mse = errors.iter().map(|e| e.norm_sqr()).sum::<f64>() / count;
    let bias_sq = bias.norm_sqr();
    Ok(EmpiricalStats {
        bias_sq,
        variance: mse - bias_sq,
        mse,
    })
}
