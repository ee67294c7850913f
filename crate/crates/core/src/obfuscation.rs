//! Keyed per-frame phase obfuscation of OFDM pilots.
//!
//! A frame's pattern `z` rotates subcarrier `k` by `z_k` degrees. `z_k` is a
//! mean (zero in naive mode, a secret per-subcarrier value in RF-Veil mode)
//! plus jitter drawn from the configured law with variance `xi^2` rad². The
//! receiver regenerates `z` from the shared key and the frame's sync index and
//! multiplies the CSI by `exp(-j z_k)`.
//!
//! Averaging many obfuscated estimates converges to `E[exp(jZ)] * h`. For a
//! symmetric zero-mean law that factor is real and positive, so the phase of
//! `h` survives; a nonzero secret mean makes it complex and hides the phase.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use crate::angle::{deg_to_rad, rad_to_deg};
use crate::error::{Error, Result};
use crate::keystream::{mix64, CounterStream, UniformSource};
use crate::phy::{CsiVector, SubcarrierLayout, C64};

const JITTER_DOMAIN: u64 = 1;
const MEANS_DOMAIN: u64 = 2;

/// Range of the secret per-subcarrier means, degrees.
pub const RFVEIL_MEAN_RANGE_DEG: (f64, f64) = (-25.0, 40.0);

/// Laplacian expectations integrate over the mean +/- this many standard
/// deviations.
const LAPLACE_TRUNCATION_SD: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DistributionKind {
    Uniform,
    Gaussian,
    Laplacian,
    Triangular,
}

impl DistributionKind {
    pub const ALL: [DistributionKind; 4] = [
        DistributionKind::Uniform,
        DistributionKind::Gaussian,
        DistributionKind::Laplacian,
        DistributionKind::Triangular,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Uniform => "uniform",
            Self::Gaussian => "gaussian",
            Self::Laplacian => "laplacian",
            Self::Triangular => "triangular",
        }
    }
}

impl fmt::Display for DistributionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DistributionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown distribution kind `{s}`")))
    }
}

/// Randomization law for the per-subcarrier rotation.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionSpec {
    kind: DistributionKind,
    variance: f64,
    mean_deg: f64,
    per_subcarrier_means: Option<Vec<f64>>,
}

impl DistributionSpec {
    /// Scalar-mean law. `variance` is in rad², `mean_deg` in degrees.
    pub fn new(kind: DistributionKind, variance: f64, mean_deg: f64) -> Result<Self> {
        if !(variance >= 0.0) || !variance.is_finite() {
            return Err(Error::invalid(format!(
                "variance must be finite and >= 0, got {variance}"
            )));
        }
        if !mean_deg.is_finite() {
            return Err(Error::invalid("mean must be finite"));
        }
        Ok(Self {
            kind,
            variance,
            mean_deg,
            per_subcarrier_means: None,
        })
    }

    /// Symmetric zero-mean law.
    pub fn naive(kind: DistributionKind, variance: f64) -> Result<Self> {
        Self::new(kind, variance, 0.0)
    }

    /// Law with secret per-subcarrier means derived from `key`.
    pub fn rfveil(
        kind: DistributionKind,
        variance: f64,
        key: SecretKey,
        layout: &SubcarrierLayout,
    ) -> Result<Self> {
        Self::naive(kind, variance)?.with_means(rfveil_means(key, layout))
    }

    pub fn with_means(mut self, means_deg: Vec<f64>) -> Result<Self> {
        if means_deg.iter().any(|m| !m.is_finite()) {
            return Err(Error::invalid("per-subcarrier means must be finite"));
        }
        self.per_subcarrier_means = Some(means_deg);
        Ok(self)
    }

    pub fn kind(&self) -> DistributionKind {
        self.kind
    }

    /// Variance in rad².
    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn mean_deg(&self) -> f64 {
        self.mean_deg
    }

    pub fn per_subcarrier_means(&self) -> Option<&[f64]> {
        self.per_subcarrier_means.as_deref()
    }

    /// Mean for subcarrier `k`, degrees.
    pub fn mean_at(&self, k: usize) -> f64 {
        match &self.per_subcarrier_means {
            Some(m) => m[k],
            None => self.mean_deg,
        }
    }

    /// Half-width of the uniform support, radians.
    pub fn uniform_half_width(&self) -> f64 {
        (3.0 * self.variance).sqrt()
    }
}

/// One zero-mean draw of the law, radians.
fn sample_centered(kind: DistributionKind, variance: f64, stream: &mut impl UniformSource) -> f64 {
    let sd = variance.sqrt();
    match kind {
        DistributionKind::Uniform => (3.0f64).sqrt() * sd * (2.0 * stream.next_f64() - 1.0),
        DistributionKind::Gaussian => sd * stream.next_normal_pair().0,
        DistributionKind::Laplacian => {
            let b = sd / SQRT_2;
            let u = stream.next_open01() - 0.5;
            -b * u.signum() * (1.0 - 2.0 * u.abs()).ln()
        }
        DistributionKind::Triangular => {
            let a = (6.0f64).sqrt() * sd;
            let u = stream.next_open01();
            if u < 0.5 {
                a * ((2.0 * u).sqrt() - 1.0)
            } else {
                a * (1.0 - (2.0 * (1.0 - u)).sqrt())
            }
        }
    }
}

/// One draw with the spec's law and scalar mean, degrees.
pub fn sample_phase(spec: &DistributionSpec, stream: &mut impl UniformSource) -> f64 {
    spec.mean_deg + rad_to_deg(sample_centered(spec.kind, spec.variance, stream))
}

/// 128-bit pre-shared key.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SecretKey(pub u128);

impl fmt::Debug for SecretKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SecretKey({:08x}..)", (self.0 >> 96) as u32)
    }
}

impl SecretKey {
    /// Draws a nonzero key.
    pub fn generate(stream: &mut impl UniformSource) -> Self {
        loop {
            let k = (u128::from(stream.next_u64()) << 64) | u128::from(stream.next_u64());
            if k != 0 {
                return Self(k);
            }
        }
    }

    pub fn low32(self) -> u32 {
        self.0 as u32
    }

    /// Non-secret tag identifying the key in logs and patterns.
    pub fn tag(self) -> u64 {
        mix64(mix64(self.0 as u64) ^ (self.0 >> 64) as u64)
    }
}

/// Secret per-subcarrier means, uniform in [-25, 40] degrees, derived from
/// the key alone so they stay fixed for the session.
pub fn rfveil_means(key: SecretKey, layout: &SubcarrierLayout) -> Vec<f64> {
    let (lo, hi) = RFVEIL_MEAN_RANGE_DEG;
    let mut s = CounterStream::keyed(key.0, 0, MEANS_DOMAIN);
    (0..layout.count()).map(|_| lo + (hi - lo) * s.next_f64()).collect()
}

/// Per-subcarrier rotation for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ObfuscationPattern {
    z_deg: Vec<f64>,
    key_tag: u64,
    sync_index: u32,
}

impl ObfuscationPattern {
    /// Pattern from explicit angles, not tied to any key.
    pub fn from_degrees(z_deg: Vec<f64>) -> Self {
        Self {
            z_deg,
            key_tag: 0,
            sync_index: 0,
        }
    }

    pub fn zero(len: usize) -> Self {
        Self::from_degrees(vec![0.0; len])
    }

    pub fn degrees(&self) -> &[f64] {
        &self.z_deg
    }

    pub fn len(&self) -> usize {
        self.z_deg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z_deg.is_empty()
    }

    pub fn key_tag(&self) -> u64 {
        self.key_tag
    }

    pub fn sync_index(&self) -> u32 {
        self.sync_index
    }

    pub fn negated(&self) -> Self {
        Self {
            z_deg: self.z_deg.iter().map(|z| -z).collect(),
            ..self.clone()
        }
    }

    fn rotate(&self, values: &[C64], sign: f64) -> Result<Vec<C64>> {
        if values.len() != self.z_deg.len() {
            return Err(Error::invalid(format!(
                "pattern has {} entries, symbol {}",
                self.z_deg.len(),
                values.len()
            )));
        }
        Ok(values
            .iter()
            .zip(&self.z_deg)
            .map(|(s, z)| s * C64::from_polar(1.0, sign * deg_to_rad(*z)))
            .collect())
    }

    /// Writes `subcarrier,z_deg` rows keyed by the layout's index vector.
    pub fn write_csv<W: std::io::Write>(&self, layout: &SubcarrierLayout, out: W) -> Result<()> {
        if layout.count() != self.len() {
            return Err(Error::invalid("layout and pattern lengths differ"));
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["subcarrier", "z_deg"])?;
        for (v, z) in layout.index_vector().iter().zip(&self.z_deg) {
            w.write_record([v.to_string(), z.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Deterministic pattern for `(key, index)`: per-subcarrier mean plus jitter
/// from a stream keyed by both.
pub fn generate_pattern(
    key: SecretKey,
    index: u32,
    spec: &DistributionSpec,
    layout: &SubcarrierLayout,
) -> ObfuscationPattern {
    let k_total = layout.count();
    if let Some(m) = spec.per_subcarrier_means() {
        assert_eq!(m.len(), k_total, "per-subcarrier means do not match layout");
    }
    let mut s = CounterStream::keyed(key.0, u64::from(index), JITTER_DOMAIN);
    let z_deg = (0..k_total)
        .map(|k| spec.mean_at(k) + rad_to_deg(sample_centered(spec.kind, spec.variance, &mut s)))
        .collect();
    ObfuscationPattern {
        z_deg,
        key_tag: key.tag(),
        sync_index: index,
    }
}

/// Multiplies subcarrier `k` by `exp(j z_k)`.
pub fn apply_pattern(symbol: &[C64], pattern: &ObfuscationPattern) -> Result<Vec<C64>> {
    pattern.rotate(symbol, 1.0)
}

/// Multiplies CSI entry `k` by `exp(-j z_k)`.
pub fn revert_pattern(csi: &CsiVector, pattern: &ObfuscationPattern) -> Result<CsiVector> {
    CsiVector::new(pattern.rotate(csi.values(), -1.0)?)
}

/// `E[exp(jZ)]` for the given law, mean in degrees.
///
/// Gaussian uses the characteristic function; the other laws integrate the
/// centered density numerically and rotate by the mean.
pub fn expected_rotation_with_mean(kind: DistributionKind, variance: f64, mean_deg: f64) -> C64 {
    let shift = C64::from_polar(1.0, deg_to_rad(mean_deg));
    if variance == 0.0 {
        return shift;
    }
    let sd = variance.sqrt();
    let centered = match kind {
        DistributionKind::Gaussian => return shift * (-variance / 2.0).exp(),
        DistributionKind::Uniform => {
            let r = 3.0f64.sqrt() * sd;
            characteristic(|_| 1.0 / (2.0 * r), r)
        }
        DistributionKind::Triangular => {
            let a = 6.0f64.sqrt() * sd;
            characteristic(|x: f64| (a - x.abs()) / (a * a), a)
        }
        DistributionKind::Laplacian => {
            let b = sd / SQRT_2;
            let t = LAPLACE_TRUNCATION_SD * sd;
            let mass = 1.0 - (-t / b).exp();
            characteristic(|x: f64| (-x.abs() / b).exp() / (2.0 * b * mass), t)
        }
    };
    shift * centered
}

/// `E[exp(jZ)]` under the spec's scalar mean.
pub fn expected_rotation(spec: &DistributionSpec) -> C64 {
    expected_rotation_with_mean(spec.kind, spec.variance, spec.mean_deg)
}

/// `E[exp(jZ_k)]` for each subcarrier of a spec with per-subcarrier means,
/// or a single entry for a scalar-mean spec.
pub fn expected_rotations(spec: &DistributionSpec) -> Vec<C64> {
    match spec.per_subcarrier_means() {
        Some(m) => m
            .iter()
            .map(|&mu| expected_rotation_with_mean(spec.kind, spec.variance, mu))
            .collect(),
        None => vec![expected_rotation(spec)],
    }
}

/// `int_{-half}^{half} pdf(x) exp(jx) dx`, split at the origin so kinks at
/// zero fall on an interval boundary.
fn characteristic(pdf: impl Fn(f64) -> f64 + Copy, half: f64) -> C64 {
    let re = |x: f64| pdf(x) * x.cos();
    let im = |x: f64| pdf(x) * x.sin();
    C64::new(
        adaptive_simpson(re, -half, 0.0, 1e-12) + adaptive_simpson(re, 0.0, half, 1e-12),
        adaptive_simpson(im, -half, 0.0, 1e-12) + adaptive_simpson(im, 0.0, half, 1e-12),
    )
}

fn adaptive_simpson(f: impl Fn(f64) -> f64 + Copy, a: f64, b: f64, tol: f64) -> f64 {
    fn step(
        f: impl Fn(f64) -> f64 + Copy,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 40)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Robustness {
    /// Averaging recovers the true phase.
    Naive,
    /// The expected rotation carries a nonzero phase on some subcarrier.
    Robust,
}

/// Robust iff `|Im E[exp(jZ)]| > 1e-6` on at least one subcarrier.
pub fn check_robustness(spec: &DistributionSpec) -> Robustness {
    if expected_rotations(spec).iter().any(|b| b.im.abs() > 1e-6) {
        Robustness::Robust
    } else {
        Robustness::Naive
    }
}
