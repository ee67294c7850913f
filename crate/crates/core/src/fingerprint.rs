//! Radiometric fingerprints: nonlinear per-subcarrier phase error.
//!
//! A device rotates subcarrier `k` by `360 * slope * v_k + offset + eps_k`
//! degrees. The affine part comes from timing and sampling offsets and is
//! not device specific; extraction removes it by least squares and keeps the
//! mean-centered residual `eps`.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::io::{Read, Write};

use crate::angle::{abs_wrap_deg, deg_to_rad, rad_to_deg};
use crate::error::{Error, Result};
use crate::keystream::{CounterStream, UniformSource};
use crate::phy::{CsiVector, SubcarrierLayout, C64};

const DEVICE_DOMAIN: u64 = 0x4445_5649_4345;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DeviceId(pub u64);

impl fmt::Display for DeviceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dev{}", self.0)
    }
}

/// One sinusoidal term of a synthetic phase error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinusoidComponent {
    pub amplitude_deg: f64,
    /// Cycles across the band.
    pub cycles: f64,
    pub phase_deg: f64,
}

/// Per-subcarrier phase values in degrees.
///
/// Extracted fingerprints are mean-centered; arbitrary vectors are accepted
/// so callers can build test cases and offsets.
#[derive(Debug, Clone, PartialEq)]
pub struct Fingerprint(Vec<f64>);

impl Fingerprint {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Writes `subcarrier,epsilon_deg` rows keyed by the layout's index vector.
    pub fn write_csv<W: Write>(&self, layout: &SubcarrierLayout, out: W) -> Result<()> {
        if layout.count() != self.len() {
            return Err(Error::invalid("layout and fingerprint lengths differ"));
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["subcarrier", "epsilon_deg"])?;
        for (v, e) in layout.index_vector().iter().zip(&self.0) {
            w.write_record([v.to_string(), e.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads `subcarrier,epsilon_deg` rows in file order.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let mut values = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let e = rec
                .get(1)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::invalid(format!("bad fingerprint row {rec:?}")))?;
            values.push(e);
        }
        Ok(Self(values))
    }
}

/// Affine phase error shared by all devices: `360 * slope * v_k + offset_deg`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LinearErrorSpec {
    /// Cycles per unit of subcarrier index.
    pub slope: f64,
    pub offset_deg: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviceProfile {
    id: DeviceId,
    epsilon: Vec<f64>,
    components: Vec<SinusoidComponent>,
}

impl DeviceProfile {
    /// Profile whose error is the mean-centered sum of `components`, evaluated
    /// at list position `k` as `a * sin(2 pi f k / K + phi)`.
    pub fn from_components(
        id: DeviceId,
        components: Vec<SinusoidComponent>,
        layout: &SubcarrierLayout,
    ) -> Self {
        let k_total = layout.count() as f64;
        let mut epsilon: Vec<f64> = (0..layout.count())
            .map(|k| {
                components
                    .iter()
                    .map(|c| {
                        c.amplitude_deg
                            * (TAU * c.cycles * k as f64 / k_total + deg_to_rad(c.phase_deg)).sin()
                    })
                    .sum()
            })
            .collect();
        let mean = epsilon.iter().sum::<f64>() / k_total;
        for e in &mut epsilon {
            *e -= mean;
        }
        Self {
            id,
            epsilon,
            components,
        }
    }

    pub fn id(&self) -> DeviceId {
        self.id
    }

    /// Raw per-subcarrier error in degrees (mean-centered).
    pub fn epsilon(&self) -> &[f64] {
        &self.epsilon
    }

    pub fn components(&self) -> &[SinusoidComponent] {
        &self.components
    }

    /// The fingerprint a noiseless receiver extracts for this device: the
    /// error with its least-squares affine part removed.
    pub fn fingerprint(&self, layout: &SubcarrierLayout) -> Fingerprint {
        let rad: Vec<f64> = self.epsilon.iter().map(|&e| deg_to_rad(e)).collect();
        Fingerprint(remove_affine(&rad, layout.index_vector()))
    }
}

/// Synthetic device with three random sinusoidal error terms, deterministic
/// in `seed`. The device id is the seed.
pub fn synth_device(seed: u64, layout: &SubcarrierLayout) -> DeviceProfile {
    let mut s = CounterStream::keyed(u128::from(seed), 0, DEVICE_DOMAIN);
    let components = (0..3)
        .map(|_| SinusoidComponent {
            amplitude_deg: 5.0 + 15.0 * s.next_f64(),
            cycles: 1.0 + 3.0 * s.next_f64(),
            phase_deg: 360.0 * s.next_f64(),
        })
        .collect();
    DeviceProfile::from_components(DeviceId(seed), components, layout)
}

/// Rotates each subcarrier by the device's total phase error.
pub fn embed_fingerprint(
    freq: &[C64],
    profile: &DeviceProfile,
    linear: &LinearErrorSpec,
    layout: &SubcarrierLayout,
) -> Result<Vec<C64>> {
    if freq.len() != profile.epsilon.len() || freq.len() != layout.count() {
        return Err(Error::invalid(format!(
            "symbol has {} subcarriers, profile {}, layout {}",
            freq.len(),
            profile.epsilon.len(),
            layout.count()
        )));
    }
    Ok(freq
        .iter()
        .zip(&profile.epsilon)
        .zip(layout.index_vector())
        .map(|((s, e), &v)| {
            let deg = 360.0 * linear.slope * v as f64 + linear.offset_deg + e;
            s * C64::from_polar(1.0, deg_to_rad(deg))
        })
        .collect())
}

/// Sequential unwrap: adds multiples of `2 pi` so that consecutive samples
/// never jump by more than `pi`.
pub fn unwrap_phase(phases: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(phases.len());
    let mut shift = 0.0;
    let mut prev: Option<f64> = None;
    for &p in phases {
        if let Some(q) = prev {
            let d = p - q;
            if d > PI {
                shift -= TAU * ((d + PI) / TAU).floor();
            } else if d < -PI {
                shift += TAU * ((-d + PI) / TAU).floor();
            }
        }
        out.push(p + shift);
        prev = Some(p);
    }
    out
}

/// Removes the least-squares line in `index` from radian phases, returning
/// the residual in degrees.
fn remove_affine(phase: &[f64], index: &[i32]) -> Vec<f64> {
    let n = phase.len() as f64;
    let x: Vec<f64> = index.iter().map(|&v| TAU * v as f64).collect();
    let mx = x.iter().sum::<f64>() / n;
    let my = phase.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (xi, yi) in x.iter().zip(phase) {
        sxy += (xi - mx) * (yi - my);
        sxx += (xi - mx) * (xi - mx);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let resid: Vec<f64> = phase.iter().zip(&x).map(|(y, xi)| y - slope * xi).collect();
    let q = resid.iter().sum::<f64>() / n;
    resid.into_iter().map(|r| rad_to_deg(r - q)).collect()
}

/// Phase, unwrap, least-squares slope removal and mean removal.
pub fn extract_fingerprint(csi: &CsiVector, layout: &SubcarrierLayout) -> Result<Fingerprint> {
    if csi.len() != layout.count() {
        return Err(Error::invalid(format!(
            "CSI has {} entries, layout {}",
            csi.len(),
            layout.count()
        )));
    }
    if csi.len() < 4 {
        return Err(Error::invalid("fingerprint extraction needs K >= 4"));
    }
    if csi.values().iter().any(|h| !(h.re.is_finite() && h.im.is_finite())) {
        return Err(Error::invalid("CSI contains non-finite values"));
    }
    Ok(extract_from_phases(&csi.phases(), layout))
}

/// Extraction starting from per-subcarrier phases in radians.
pub fn extract_from_phases(phases: &[f64], layout: &SubcarrierLayout) -> Fingerprint {
    Fingerprint(remove_affine(&unwrap_phase(phases), layout.index_vector()))
}

fn check_lengths(a: &Fingerprint, b: &Fingerprint) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "fingerprint lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

/// Mean absolute wrapped difference in degrees.
pub fn mae(a: &Fingerprint, b: &Fingerprint) -> Result<f64> {
    check_lengths(a, b)?;
    if a.is_empty() {
        return Ok(0.0);
    }
    let sum: f64 = a.0.iter().zip(&b.0).map(|(x, y)| abs_wrap_deg(x - y)).sum();
    Ok(sum / a.len() as f64)
}

/// Euclidean norm of the wrapped difference in degrees.
pub fn euclidean(a: &Fingerprint, b: &Fingerprint) -> Result<f64> {
    check_lengths(a, b)?;
    Ok(a.0
        .iter()
        .zip(&b.0)
        .map(|(x, y)| abs_wrap_deg(x - y).powi(2))
        .sum::<f64>()
        .sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    #[default]
    Mae,
    Euclidean,
}

impl Metric {
    pub fn distance(self, a: &Fingerprint, b: &Fingerprint) -> Result<f64> {
        match self {
            Metric::Mae => mae(a, b),
            Metric::Euclidean => euclidean(a, b),
        }
    }
}

/// Default authentication threshold, degrees of MAE.
pub const DEFAULT_THRESHOLD_DEG: f64 = 4.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Match(DeviceId),
    Reject,
}

/// Closest reference and its distance; ties go to the lowest device id.
pub fn nearest(
    candidate: &Fingerprint,
    references: &[(DeviceId, Fingerprint)],
    metric: Metric,
) -> Result<Option<(DeviceId, f64)>> {
    let mut best: Option<(DeviceId, f64)> = None;
    for (id, fp) in references {
        let d = metric.distance(candidate, fp)?;
        best = match best {
            Some((bid, bd)) if bd < d || (bd == d && bid < *id) => Some((bid, bd)),
            _ => Some((*id, d)),
        };
    }
    Ok(best)
}

/// Nearest reference if within `threshold`, otherwise reject.
pub fn classify(
    candidate: &Fingerprint,
    references: &[(DeviceId, Fingerprint)],
    threshold: f64,
    metric: Metric,
) -> Result<Classification> {
    if references.is_empty() {
        return Err(Error::invalid("no reference fingerprints"));
    }
    Ok(match nearest(candidate, references, metric)? {
        Some((id, d)) if d <= threshold => Classification::Match(id),
        _ => Classification::Reject,
    })
}
