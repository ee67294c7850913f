//! Presence tracking of devices that randomize their link-layer address.
//!
//! Each scheduled device sends about one frame per second while present and
//! changes its address every minute. The tracker knows every device's
//! fingerprint and runs the windowed majority vote of
//! [`track_presence`](crate::attack::track_presence) on the sniffed CSI.

use std::collections::BTreeMap;

use super::{clean_fingerprint, random_linear, random_link, Config, Table};
use crate::attack::{jaccard, track_presence, Interval, SniffedFrame};
use crate::error::Result;
use crate::fingerprint::{embed_fingerprint, synth_device, DeviceId, Metric};
use crate::keystream::{derive_seed, mix64, CounterStream, UniformSource};
use crate::phy::{estimate_csi, PilotSequence};
use crate::protocol::{SessionConfig, SessionState};

const ADDRESS_PERIOD_S: f64 = 60.0;

/// On-air intervals per device.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Schedule {
    pub devices: Vec<Vec<Interval>>,
}

impl Schedule {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Five devices with overlapping on/off periods over `duration_s`, edges
    /// snapped to multiples of `window_s`.
    pub fn scripted(duration_s: f64, window_s: f64) -> Self {
        let snap = |f: f64| ((f * duration_s / window_s).round() * window_s).min(duration_s);
        let spans: [&[(f64, f64)]; 5] = [
            &[(0.0, 1.0)],
            &[(0.0, 1.0 / 3.0), (2.0 / 3.0, 1.0)],
            &[(1.0 / 6.0, 7.0 / 12.0)],
            &[(1.0 / 3.0, 0.5), (0.75, 11.0 / 12.0)],
            &[(0.5, 1.0)],
        ];
        Self {
            devices: spans
                .iter()
                .map(|s| {
                    s.iter()
                        .map(|&(a, b)| Interval {
                            start_s: snap(a),
                            end_s: snap(b),
                        })
                        .filter(|i| i.length() > 0.0)
                        .collect()
                })
                .collect(),
        }
    }
}

/// Outcome of tracking one schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackingResult {
    pub ids: Vec<DeviceId>,
    pub estimated: BTreeMap<DeviceId, Vec<Interval>>,
    /// Per scheduled device, agreement of estimate and schedule.
    pub jaccard: Vec<f64>,
}

/// Simulates the schedule with plain or standalone-obfuscated transmitters
/// and tracks it.
pub fn run_schedule(cfg: &Config, schedule: &Schedule, obfuscate: bool, snr_db: f64) -> Result<TrackingResult> {
    let layout = &cfg.layout;
    let pilots = PilotSequence::alternating(layout);
    let (kind, xi2) = cfg.defense_law();
    let session_cfg = SessionConfig::new(layout.clone(), kind, xi2);
    let mut references = Vec::new();
    let mut frames: Vec<SniffedFrame> = Vec::new();
    let mut ids = Vec::new();
    for (d, spans) in schedule.devices.iter().enumerate() {
        let mut s = CounterStream::new(derive_seed(cfg.seed, 1_000_000 + d as u64));
        let device = synth_device(s.next_u64(), layout);
        let linear = random_linear(&mut s);
        let link = random_link(layout, cfg.channel, snr_db, &mut s)?;
        let mut session = SessionState::standalone(s.next_u64(), &session_cfg)?;
        let noise_root = s.next_u64();
        let base = embed_fingerprint(pilots.symbols(), &device, &linear, layout)?;
        references.push((device.id(), clean_fingerprint(&device, &linear, &link, &pilots, layout)?));
        ids.push(device.id());
        let mut frame_no = 0u64;
        for span in spans {
            let mut t = span.start_s;
            while t < span.end_s {
                let time_s = t + s.next_f64() * (span.end_s - t).min(1.0);
                let received = if obfuscate {
                    session.tx_frame(&device, &linear, &link, noise_root)?.freq_symbols
                } else {
                    link.observe(&base, derive_seed(noise_root, frame_no))?
                };
                let epoch = (time_s / ADDRESS_PERIOD_S).floor() as u64;
                frames.push(SniffedFrame {
                    time_s,
                    address: mix64(device.id().0 ^ mix64(epoch)),
                    csi: estimate_csi(&received, &pilots)?,
                });
                frame_no += 1;
                t += 1.0;
            }
        }
    }
    frames.sort_by(|a, b| a.time_s.total_cmp(&b.time_s).then(a.address.cmp(&b.address)));
    references.sort_by_key(|(id, _)| *id);
    let estimated = track_presence(&frames, &references, cfg.threshold_deg, cfg.window_s, Metric::Mae, layout)?;
    let jaccard = ids
        .iter()
        .zip(&schedule.devices)
        .map(|(id, truth)| jaccard(truth, estimated.get(id).map(Vec::as_slice).unwrap_or(&[])))
        .collect();
    Ok(TrackingResult { ids, estimated, jaccard })
}

/// `tracking` (`mode,device,series,start_s,end_s`) and `tracking_jaccard`
/// (`mode,device,jaccard`).
pub(super) fn run(cfg: &Config) -> Result<Vec<Table>> {
    let snr_db = cfg.snr_grid(&[20.0])[0];
    let schedule = Schedule::scripted(cfg.duration_s, cfg.window_s);
    let mut intervals = Table::new("tracking", &["mode", "device", "series", "start_s", "end_s"]);
    let mut scores = Table::new("tracking_jaccard", &["mode", "device", "jaccard"]);
    for (mode, obfuscate) in [("plain", false), ("standalone", true)] {
        let r = run_schedule(cfg, &schedule, obfuscate, snr_db)?;
        for (d, id) in r.ids.iter().enumerate() {
            let estimate = r.estimated.get(id).cloned().unwrap_or_default();
            for (series, list) in [("truth", &schedule.devices[d]), ("estimate", &estimate)] {
                for i in list {
                    intervals.push(vec![
                        mode.to_string(),
                        d.to_string(),
                        series.to_string(),
                        i.start_s.to_string(),
                        i.end_s.to_string(),
                    ]);
                }
            }
            scores.push(vec![mode.to_string(), d.to_string(), r.jaccard[d].to_string()]);
        }
    }
    Ok(vec![intervals, scores])
}
