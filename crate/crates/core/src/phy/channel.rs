use std::f64::consts::TAU;

use super::C64;
use crate::error::{Error, Result};
use crate::keystream::{CounterStream, UniformSource};

/// Multipath channel: complex taps frozen for `hold_frames` frames.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel {
    taps: Vec<C64>,
    hold_frames: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelPreset {
    /// Single unit tap.
    Flat,
    /// Three taps with magnitudes 1, 0.5, 0.25 and random phases.
    Indoor,
}

impl ChannelPreset {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "flat" => Some(Self::Flat),
            "indoor" => Some(Self::Indoor),
            _ => None,
        }
    }

    pub fn build(self, seed: u64) -> ChannelModel {
        match self {
            Self::Flat => ChannelModel::flat(),
            Self::Indoor => ChannelModel::indoor(&mut CounterStream::new(seed)),
        }
    }
}

impl ChannelModel {
    pub fn new(taps: Vec<C64>) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::invalid("channel needs at least one tap"));
        }
        if taps.iter().all(|c| c.norm_sqr() == 0.0) {
            return Err(Error::invalid("channel taps are all zero"));
        }
        if taps.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::invalid("channel taps must be finite"));
        }
        Ok(Self {
            taps,
            hold_frames: 1,
        })
    }

    pub fn flat() -> Self {
        Self::flat_with_phase(0.0)
    }

    /// Single unit-magnitude tap rotated by `phase` radians.
    pub fn flat_with_phase(phase: f64) -> Self {
        Self {
            taps: vec![C64::from_polar(1.0, phase)],
            hold_frames: 1,
        }
    }

    pub fn indoor(stream: &mut impl UniformSource) -> Self {
        let taps = [1.0, 0.5, 0.25]
            .iter()
            .map(|&m| C64::from_polar(m, TAU * stream.next_f64()))
            .collect();
        Self {
            taps,
            hold_frames: 1,
        }
    }

    pub fn with_hold_frames(mut self, frames: u32) -> Self {
        self.hold_frames = frames.max(1);
        self
    }

    pub fn hold_frames(&self) -> u32 {
        self.hold_frames
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    pub fn taps(&self) -> &[C64] {
        &self.taps
    }

    /// Unnormalized DFT of the zero-padded taps: the per-subcarrier gain of a
    /// CP-protected `size`-point OFDM symbol.
    pub fn frequency_response(&self, size: usize) -> Vec<C64> {
        (0..size)
            .map(|k| {
                self.taps
                    .iter()
                    .enumerate()
                    .map(|(n, c)| {
                        let idx = (k * n) % size;
                        c * C64::from_polar(1.0, -TAU * idx as f64 / size as f64)
                    })
                    .sum()
            })
            .collect()
    }
}

/// Additive circularly-symmetric complex Gaussian noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub variance: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(variance: f64, seed: u64) -> Result<Self> {
        if !(variance >= 0.0) || !variance.is_finite() {
            return Err(Error::invalid(format!(
                "noise variance must be finite and >= 0, got {variance}"
            )));
        }
        Ok(Self { variance, seed })
    }

    pub fn none() -> Self {
        Self {
            variance: 0.0,
            seed: 0,
        }
    }

    /// Noise variance for unit signal power at `snr_db`.
    pub fn from_snr_db(snr_db: f64, seed: u64) -> Result<Self> {
        Self::new(10f64.powf(-snr_db / 10.0), seed)
    }
}

/// Passes `time` through the channel: linear convolution truncated to the
/// input length, plus i.i.d. complex Gaussian noise of variance `sigma^2`
/// per sample.
pub fn transmit(
    time: &[C64],
    channel: &ChannelModel,
    noise: &NoiseSpec,
    cp_len: usize,
) -> Result<Vec<C64>> {
    if channel.len() > cp_len {
        return Err(Error::Precondition(format!(
            "{} channel taps exceed cyclic prefix {cp_len}",
            channel.len()
        )));
    }
    let taps = channel.taps();
    let mut out: Vec<C64> = (0..time.len())
        .map(|n| {
            taps.iter()
                .enumerate()
                .take(n + 1)
                .map(|(j, c)| c * time[n - j])
                .sum()
        })
        .collect();
    if noise.variance > 0.0 {
        let scale = (noise.variance / 2.0).sqrt();
        let mut stream = CounterStream::new(noise.seed);
        for y in &mut out {
            let (a, b) = stream.next_normal_pair();
            *y += C64::new(a * scale, b * scale);
        }
    }
    Ok(out)
}
