use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use super::C64;
use crate::error::{Error, Result};

/// Unitary `K`-point OFDM modem with a cyclic prefix of `L` samples.
///
/// FFT plans are built once and shared, so cloning is cheap.
#[derive(Clone)]
pub struct Ofdm {
    size: usize,
    cp_len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scale: f64,
}

impl fmt::Debug for Ofdm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Ofdm")
            .field("size", &self.size)
            .field("cp_len", &self.cp_len)
            .finish()
    }
}

impl Ofdm {
    pub fn new(size: usize, cp_len: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            size,
            cp_len,
            forward: planner.plan_fft_forward(size),
            inverse: planner.plan_fft_inverse(size),
            scale: 1.0 / (size as f64).sqrt(),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn cp_len(&self) -> usize {
        self.cp_len
    }

    /// Inverse transform of one symbol with the last `L` samples prepended.
    pub fn modulate(&self, freq: &[C64]) -> Result<Vec<C64>> {
        if freq.len() != self.size {
            return Err(Error::invalid(format!(
                "expected {} subcarriers, got {}",
                self.size,
                freq.len()
            )));
        }
        let mut body = freq.to_vec();
        self.inverse.process(&mut body);
        for x in &mut body {
            *x *= self.scale;
        }
        let mut out = Vec::with_capacity(self.size + self.cp_len);
        out.extend_from_slice(&body[self.size - self.cp_len..]);
        out.extend_from_slice(&body);
        Ok(out)
    }

    /// Drops the cyclic prefix and applies the forward transform.
    pub fn demodulate(&self, samples: &[C64]) -> Result<Vec<C64>> {
        let mut body = strip_cp(samples, self.cp_len)?;
        if body.len() != self.size {
            return Err(Error::invalid(format!(
                "expected {} samples after CP removal, got {}",
                self.size,
                body.len()
            )));
        }
        self.forward.process(&mut body);
        for x in &mut body {
            *x *= self.scale;
        }
        Ok(body)
    }

    /// Forward unitary transform of a CP-free body.
    pub fn forward(&self, time: &[C64]) -> Result<Vec<C64>> {
        if time.len() != self.size {
            return Err(Error::invalid(format!(
                "expected {} samples, got {}",
                self.size,
                time.len()
            )));
        }
        let mut body = time.to_vec();
        self.forward.process(&mut body);
        for x in &mut body {
            *x *= self.scale;
        }
        Ok(body)
    }
}

/// One-shot modulation: unitary inverse DFT plus cyclic prefix of `cp_len`.
pub fn frequency_to_time(freq: &[C64], cp_len: usize) -> Result<Vec<C64>> {
    if freq.is_empty() || cp_len > freq.len() {
        return Err(Error::invalid(format!(
            "cyclic prefix {cp_len} invalid for {} subcarriers",
            freq.len()
        )));
    }
    Ofdm::new(freq.len(), cp_len).modulate(freq)
}

/// Unitary forward DFT of a CP-free time-domain body.
pub fn time_to_frequency(time: &[C64]) -> Result<Vec<C64>> {
    if time.is_empty() {
        return Err(Error::invalid("empty time-domain symbol"));
    }
    Ofdm::new(time.len(), 0).forward(time)
}

pub fn strip_cp(samples: &[C64], cp_len: usize) -> Result<Vec<C64>> {
    if samples.len() < cp_len {
        return Err(Error::invalid(format!(
            "{} samples shorter than cyclic prefix {cp_len}",
            samples.len()
        )));
    }
    Ok(samples[cp_len..].to_vec())
}
