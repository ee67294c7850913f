//! Monte Carlo experiments behind the `rfveil-lab` CLI.
//!
//! Each experiment turns a [`Config`] into one or more CSV tables. Trials
//! draw everything from `derive_seed(root, trial)`, run in parallel, and are
//! collected in trial order, so output bytes depend only on the config.

mod config;
mod crb;
mod impersonation;
mod mae;
mod throughput;
mod tracking;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub use config::{Config, ObfuscationMode};
pub use tracking::{run_schedule, Schedule};

use crate::error::{Error, Result};
use crate::fingerprint::{embed_fingerprint, extract_fingerprint, DeviceProfile, Fingerprint, LinearErrorSpec};
use crate::keystream::UniformSource;
use crate::phy::{estimate_csi, ChannelModel, ChannelPreset, Link, Ofdm, PilotSequence, SubcarrierLayout};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    NaiveMae,
    RfveilMae,
    Throughput,
    Impersonation,
    Tracking,
    Crb,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::NaiveMae,
        Experiment::RfveilMae,
        Experiment::Throughput,
        Experiment::Impersonation,
        Experiment::Tracking,
        Experiment::Crb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::NaiveMae => "naive-mae",
            Self::RfveilMae => "rfveil-mae",
            Self::Throughput => "throughput",
            Self::Impersonation => "impersonation",
            Self::Tracking => "tracking",
            Self::Crb => "crb",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| {
            let names: Vec<_> = Self::ALL.iter().map(|e| e.name()).collect();
            Error::config("experiment", format!("unknown experiment `{s}` ({})", names.join(", ")))
        })
    }
}

/// One CSV output.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// File stem; written as `<name>.csv`.
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: impl Into<String>, header: &[&'static str]) -> Self {
        Self {
            name: name.into(),
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| *h == name)
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner()
            .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
    }

    pub fn write_to(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(format!("{}.csv", self.name));
        fs::write(&path, self.to_csv()?)?;
        Ok(path)
    }
}

/// Checks experiment-specific constraints on an otherwise valid config.
pub fn validate(experiment: Experiment, cfg: &Config) -> Result<()> {
    let want = match experiment {
        Experiment::NaiveMae => Some(ObfuscationMode::Naive),
        Experiment::RfveilMae => Some(ObfuscationMode::RfVeil),
        _ => None,
    };
    if let (Some(want), Some(got)) = (want, cfg.mode) {
        if want != got {
            return Err(Error::config(
                "mode",
                format!("experiment {experiment} requires mode {want:?}, got {got:?}"),
            ));
        }
    }
    Ok(())
}

pub fn run(experiment: Experiment, cfg: &Config) -> Result<Vec<Table>> {
    validate(experiment, cfg)?;
    match experiment {
        Experiment::NaiveMae => Ok(vec![mae::run(cfg, false)?]),
        Experiment::RfveilMae => Ok(vec![mae::run(cfg, true)?]),
        Experiment::Throughput => Ok(vec![throughput::run(cfg)?]),
        Experiment::Impersonation => Ok(vec![impersonation::run(cfg)?]),
        Experiment::Tracking => tracking::run(cfg),
        Experiment::Crb => Ok(vec![crb::run(cfg)?]),
    }
}

/// Sample mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub(crate) fn noise_var(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

/// Link with the configured channel preset; flat channels get a random
/// common phase.
pub(crate) fn random_link(
    layout: &SubcarrierLayout,
    preset: ChannelPreset,
    snr_db: f64,
    stream: &mut impl UniformSource,
) -> Result<Link> {
    let channel = match preset {
        ChannelPreset::Flat => ChannelModel::flat_with_phase(std::f64::consts::TAU * stream.next_f64()),
        ChannelPreset::Indoor => ChannelModel::indoor(stream),
    };
    Link::new(
        Ofdm::new(layout.count(), layout.default_cp_len()),
        channel,
        noise_var(snr_db),
    )
}

/// Small device-level affine phase error, fixed for the device.
pub(crate) fn random_linear(stream: &mut impl UniformSource) -> LinearErrorSpec {
    LinearErrorSpec {
        slope: 0.01 * (2.0 * stream.next_f64() - 1.0),
        offset_deg: 360.0 * stream.next_f64(),
    }
}

/// Fingerprint a noiseless receiver extracts from `device` over `link`.
pub(crate) fn clean_fingerprint(
    device: &DeviceProfile,
    linear: &LinearErrorSpec,
    link: &Link,
    pilots: &PilotSequence,
    layout: &SubcarrierLayout,
) -> Result<Fingerprint> {
    let clean = Link {
        noise_var: 0.0,
        ..link.clone()
    };
    let tx = embed_fingerprint(pilots.symbols(), device, linear, layout)?;
    extract_fingerprint(&estimate_csi(&clean.observe(&tx, 0)?, pilots)?, layout)
}
