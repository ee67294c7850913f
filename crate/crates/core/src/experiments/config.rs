//! Flat `key = value` experiment configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Lists are
//! comma-separated. Unknown keys, duplicate keys and malformed values are
//! errors naming the offending key.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fingerprint::DEFAULT_THRESHOLD_DEG;
use crate::obfuscation::DistributionKind;
use crate::phy::{ChannelPreset, Modulation, SubcarrierLayout};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObfuscationMode {
    /// Symmetric zero-mean randomization.
    Naive,
    /// Randomization with secret per-subcarrier means.
    RfVeil,
    /// RF-Veil randomization with a transmitter-local key.
    Standalone,
}

impl FromStr for ObfuscationMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "naive" => Ok(Self::Naive),
            "rfveil" => Ok(Self::RfVeil),
            "standalone" => Ok(Self::Standalone),
            _ => Err(format!("unknown mode `{s}` (naive, rfveil, standalone)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Config {
    pub seed: u64,
    pub trials: usize,
    pub layout: SubcarrierLayout,
    pub kinds: Vec<DistributionKind>,
    /// Rotation variances, rad².
    pub xi2: Vec<f64>,
    pub n_grid: Vec<usize>,
    snr_db: Option<Vec<f64>>,
    pub mode: Option<ObfuscationMode>,
    pub channel: ChannelPreset,
    pub threshold_deg: f64,
    /// Frames per grid point in the throughput experiment.
    pub frames: usize,
    pub mcs: Vec<Modulation>,
    /// Forgery attempts per grid point in the impersonation experiment.
    pub attempts: usize,
    /// Victim frames the impersonator averages before forging.
    pub sniff_frames: usize,
    pub window_s: f64,
    pub duration_s: f64,
    /// Monte Carlo trials for the estimator-theory overlays.
    pub mc_trials: usize,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: 1,
            trials: 50,
            layout: SubcarrierLayout::ieee80211ac(),
            kinds: DistributionKind::ALL.to_vec(),
            xi2: vec![0.1, 0.4, 0.7, 1.0],
            n_grid: vec![100, 500, 1000, 2000, 5000, 10000],
            snr_db: None,
            mode: None,
            channel: ChannelPreset::Flat,
            threshold_deg: DEFAULT_THRESHOLD_DEG,
            frames: 10_000,
            mcs: vec![
                Modulation::Bpsk,
                Modulation::Qpsk,
                Modulation::Qam16,
                Modulation::Qam64,
            ],
            attempts: 1000,
            sniff_frames: 1,
            window_s: 10.0,
            duration_s: 600.0,
            mc_trials: 10_000,
        }
    }
}

const KEYS: &[&str] = &[
    "seed",
    "trials",
    "layout",
    "kinds",
    "xi2",
    "n",
    "snr_db",
    "mode",
    "channel",
    "threshold_deg",
    "frames",
    "mcs",
    "attempts",
    "sniff_frames",
    "window_s",
    "duration_s",
    "mc_trials",
];

fn list<T>(field: &str, value: &str, parse: impl Fn(&str) -> Option<T>) -> Result<Vec<T>> {
    let items: Vec<&str> = value.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if items.is_empty() {
        return Err(Error::config(field, "list must not be empty"));
    }
    items
        .into_iter()
        .map(|s| parse(s).ok_or_else(|| Error::config(field, format!("invalid entry `{s}`"))))
        .collect()
}

fn positive(field: &str, value: &str) -> Result<usize> {
    match value.parse::<i64>() {
        Ok(v) if v > 0 => Ok(v as usize),
        Ok(_) => Err(Error::config(field, format!("must be positive, got {value}"))),
        Err(_) => Err(Error::config(field, format!("expected an integer, got `{value}`"))),
    }
}

fn positive_f64(field: &str, value: &str) -> Result<f64> {
    match value.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(Error::config(field, format!("expected a positive number, got `{value}`"))),
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Config::default();
        let mut seen: Vec<&str> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::config(
                    format!("line {}", lineno + 1),
                    format!("expected key = value, got `{line}`"),
                ));
            };
            let (key, value) = (key.trim(), value.trim());
            let Some(&known) = KEYS.iter().find(|k| **k == key) else {
                return Err(Error::config(key, "unknown key"));
            };
            if seen.contains(&known) {
                return Err(Error::config(key, "duplicate key"));
            }
            seen.push(known);
            cfg.set(known, value)?;
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| Error::config(key, format!("expected u64, got `{value}`")))?
            }
            "trials" => self.trials = positive(key, value)?,
            "layout" => {
                self.layout = match value {
                    "80211a" => SubcarrierLayout::ieee80211a(),
                    "80211ac" => SubcarrierLayout::ieee80211ac(),
                    _ => return Err(Error::config(key, format!("unknown layout `{value}` (80211a, 80211ac)"))),
                }
            }
            "kinds" => self.kinds = list(key, value, |s| s.parse().ok())?,
            "xi2" => {
                self.xi2 = list(key, value, |s| {
                    s.parse::<f64>().ok().filter(|v| *v >= 0.0 && v.is_finite())
                })?
            }
            "n" => {
                self.n_grid = list(key, value, |s| s.parse::<usize>().ok().filter(|v| *v > 0))?
            }
            "snr_db" => {
                self.snr_db = Some(list(key, value, |s| {
                    s.parse::<f64>().ok().filter(|v| !v.is_nan() && *v != f64::NEG_INFINITY)
                })?)
            }
            "mode" => self.mode = Some(value.parse().map_err(|e: String| Error::config(key, e))?),
            "channel" => {
                self.channel = ChannelPreset::parse(value)
                    .ok_or_else(|| Error::config(key, format!("unknown channel `{value}` (flat, indoor)")))?
            }
            "threshold_deg" => self.threshold_deg = positive_f64(key, value)?,
            "frames" => self.frames = positive(key, value)?,
            "mcs" => self.mcs = list(key, value, Modulation::parse)?,
            "attempts" => self.attempts = positive(key, value)?,
            "sniff_frames" => self.sniff_frames = positive(key, value)?,
            "window_s" => self.window_s = positive_f64(key, value)?,
            "duration_s" => self.duration_s = positive_f64(key, value)?,
            "mc_trials" => {
                self.mc_trials = positive(key, value)?;
                if self.mc_trials < 100 {
                    return Err(Error::config(key, "needs at least 100 trials"));
                }
            }
            _ => unreachable!("key list and setter disagree on `{key}`"),
        }
        Ok(())
    }

    /// SNR grid, or `default` when the config does not set one.
    pub fn snr_grid(&self, default: &[f64]) -> Vec<f64> {
        self.snr_db.clone().unwrap_or_else(|| default.to_vec())
    }

    /// Sorted, deduplicated measurement-count grid.
    pub fn sorted_n_grid(&self) -> Vec<usize> {
        let mut n = self.n_grid.clone();
        n.sort_unstable();
        n.dedup();
        n
    }

    /// Randomization used where a single defended configuration is needed:
    /// the first listed kind at the largest listed variance.
    pub fn defense_law(&self) -> (DistributionKind, f64) {
        let xi2 = self.xi2.iter().copied().fold(0.0, f64::max);
        (self.kinds[0], xi2)
    }
}
