//! OFDM pilot path: subcarrier layout, multipath channel, noise, demodulation,
//! CSI estimation and per-subcarrier capacity.
//!
//! The transform pair is unitary (`1/sqrt(K)` both ways). Subcarrier list
//! position `k` is bin `k` of a `K`-point DFT; the index vector `v` only labels
//! subcarriers for fingerprint regression.

mod channel;
mod ofdm;
mod qam;

pub use channel::{transmit, ChannelModel, ChannelPreset, NoiseSpec};
pub use ofdm::{frequency_to_time, strip_cp, time_to_frequency, Ofdm};
pub use qam::Modulation;

pub use rustfft::num_complex;
use rustfft::num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Subcarrier count and the index vector `[-K/2, ..., -1, 1, ..., K/2]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubcarrierLayout {
    index: Vec<i32>,
}

impl SubcarrierLayout {
    pub fn new(count: usize) -> Result<Self> {
        if count < 2 || count % 2 != 0 {
            return Err(Error::invalid(format!(
                "subcarrier count must be even and >= 2, got {count}"
            )));
        }
        let half = (count / 2) as i32;
        let index = (-half..=-1).chain(1..=half).collect();
        Ok(Self { index })
    }

    /// 52 subcarriers (802.11a).
    pub fn ieee80211a() -> Self {
        Self::new(52).expect("52 is a valid layout")
    }

    /// 56 subcarriers (802.11ac 20 MHz).
    pub fn ieee80211ac() -> Self {
        Self::new(56).expect("56 is a valid layout")
    }

    pub fn count(&self) -> usize {
        self.index.len()
    }

    pub fn index_vector(&self) -> &[i32] {
        &self.index
    }

    /// Default cyclic prefix length, `K/4`.
    pub fn default_cp_len(&self) -> usize {
        self.count() / 4
    }
}

/// Known pilot symbols, one per subcarrier, each of unit magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotSequence(Vec<C64>);

impl PilotSequence {
    pub fn new(symbols: Vec<C64>) -> Result<Self> {
        if let Some(k) = symbols.iter().position(|s| (s.norm() - 1.0).abs() > 1e-12) {
            return Err(Error::invalid(format!(
                "pilot {k} has magnitude {}, expected 1",
                symbols[k].norm()
            )));
        }
        Ok(Self(symbols))
    }

    /// BPSK pilots alternating +1, -1 along the index vector.
    pub fn alternating(layout: &SubcarrierLayout) -> Self {
        Self(
            (0..layout.count())
                .map(|k| if k % 2 == 0 { C64::new(1.0, 0.0) } else { C64::new(-1.0, 0.0) })
                .collect(),
        )
    }

    pub fn all_ones(layout: &SubcarrierLayout) -> Self {
        Self(vec![C64::new(1.0, 0.0); layout.count()])
    }

    pub fn symbols(&self) -> &[C64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Per-subcarrier complex channel estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct CsiVector(Vec<C64>);

impl CsiVector {
    pub fn new(values: Vec<C64>) -> Result<Self> {
        if let Some(k) = values.iter().position(|h| !(h.re.is_finite() && h.im.is_finite())) {
            return Err(Error::invalid(format!("CSI entry {k} is not finite")));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[C64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<C64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Four-quadrant phase per subcarrier, radians in (-pi, pi].
    pub fn phases(&self) -> Vec<f64> {
        self.0.iter().map(|h| h.im.atan2(h.re)).collect()
    }
}

/// Least-squares channel estimate `h_k = y_k conj(s_k) / |s_k|^2`.
pub fn estimate_csi(received: &[C64], pilots: &PilotSequence) -> Result<CsiVector> {
    if received.len() != pilots.len() {
        return Err(Error::invalid(format!(
            "received {} symbols for {} pilots",
            received.len(),
            pilots.len()
        )));
    }
    let values = received
        .iter()
        .zip(pilots.symbols())
        .enumerate()
        .map(|(k, (y, s))| {
            let p = s.norm_sqr();
            if p == 0.0 {
                Err(Error::invalid(format!("pilot {k} has zero magnitude")))
            } else {
                Ok(y * s.conj() / p)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    CsiVector::new(values)
}

/// Shannon capacity per subcarrier, `log2(1 + |h_k|^2 / sigma^2)` bits/s/Hz.
pub fn channel_capacity(csi: &CsiVector, noise_var: f64) -> Result<Vec<f64>> {
    if !(noise_var > 0.0) {
        return Err(Error::invalid(format!(
            "noise variance must be positive, got {noise_var}"
        )));
    }
    Ok(csi
        .values()
        .iter()
        .map(|h| (h.norm_sqr() / noise_var).ln_1p() / std::f64::consts::LN_2)
        .collect())
}

/// End-to-end pilot path: OFDM modulation, channel, noise, demodulation.
#[derive(Debug, Clone)]
pub struct Link {
    pub ofdm: Ofdm,
    pub channel: ChannelModel,
    pub noise_var: f64,
}

impl Link {
    pub fn new(ofdm: Ofdm, channel: ChannelModel, noise_var: f64) -> Result<Self> {
        if channel.len() > ofdm.cp_len() {
            return Err(Error::Precondition(format!(
                "{} channel taps exceed cyclic prefix {}",
                channel.len(),
                ofdm.cp_len()
            )));
        }
        if !(noise_var >= 0.0) {
            return Err(Error::invalid("noise variance must be >= 0"));
        }
        Ok(Self {
            ofdm,
            channel,
            noise_var,
        })
    }

    /// Sends one frequency-domain OFDM symbol and returns the demodulated
    /// received symbol. Deterministic in `noise_seed`.
    pub fn observe(&self, freq: &[C64], noise_seed: u64) -> Result<Vec<C64>> {
        let time = self.ofdm.modulate(freq)?;
        let noise = NoiseSpec::new(self.noise_var, noise_seed)?;
        let rx = transmit(&time, &self.channel, &noise, self.ofdm.cp_len())?;
        self.ofdm.demodulate(&rx)
    }

    /// Observes a pilot symbol and estimates CSI from it.
    pub fn observe_csi(
        &self,
        tx_pilot: &[C64],
        pilots: &PilotSequence,
        noise_seed: u64,
    ) -> Result<CsiVector> {
        let y = self.observe(tx_pilot, noise_seed)?;
        estimate_csi(&y, pilots)
    }
}
