//! Adversary side: averaging attack on captured CSI, fingerprint restoration,
//! impersonation offsets and presence tracking.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use crate::angle::{rad_to_deg, wrap_deg};
use crate::error::{Error, Result};
use crate::fingerprint::{
    classify, extract_fingerprint, Classification, DeviceId, Fingerprint, Metric,
};
use crate::phy::{CsiVector, SubcarrierLayout, C64};

/// `N` captured CSI vectors of equal length `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementMatrix {
    columns: Vec<CsiVector>,
}

impl MeasurementMatrix {
    pub fn new(columns: Vec<CsiVector>) -> Result<Self> {
        let Some(first) = columns.first() else {
            return Err(Error::invalid("measurement matrix needs at least one column"));
        };
        let k = first.len();
        if let Some(n) = columns.iter().position(|c| c.len() != k) {
            return Err(Error::invalid(format!(
                "column {n} has {} entries, expected {k}",
                columns[n].len()
            )));
        }
        Ok(Self { columns })
    }

    pub fn columns(&self) -> &[CsiVector] {
        &self.columns
    }

    /// Number of measurements `N`.
    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn subcarriers(&self) -> usize {
        self.columns[0].len()
    }

    /// Writes `frame,subcarrier,re,im` rows, subcarrier being list position.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["frame", "subcarrier", "re", "im"])?;
        for (n, col) in self.columns.iter().enumerate() {
            for (k, h) in col.values().iter().enumerate() {
                w.write_record([n.to_string(), k.to_string(), h.re.to_string(), h.im.to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reads rows written by [`MeasurementMatrix::write_csv`]. Frames and
    /// subcarriers must be dense and start at zero.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let mut cells: BTreeMap<(usize, usize), C64> = BTreeMap::new();
        for rec in r.records() {
            let rec = rec?;
            let field = |i: usize| {
                rec.get(i)
                    .map(str::trim)
                    .ok_or_else(|| Error::invalid(format!("short measurement row {rec:?}")))
            };
            let parse_usize = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| Error::invalid(format!("bad index `{s}`")))
            };
            let parse_f64 = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::invalid(format!("bad value `{s}`")))
            };
            let n = parse_usize(field(0)?)?;
            let k = parse_usize(field(1)?)?;
            let h = C64::new(parse_f64(field(2)?)?, parse_f64(field(3)?)?);
            if cells.insert((n, k), h).is_some() {
                return Err(Error::invalid(format!("duplicate cell frame {n} subcarrier {k}")));
            }
        }
        let frames = cells.keys().map(|(n, _)| n + 1).max().unwrap_or(0);
        let width = cells.keys().map(|(_, k)| k + 1).max().unwrap_or(0);
        if frames * width != cells.len() {
            return Err(Error::invalid("measurement CSV is not a dense matrix"));
        }
        let columns = (0..frames)
            .map(|n| CsiVector::new((0..width).map(|k| cells[&(n, k)]).collect()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(columns)
    }
}

/// Running per-subcarrier sum, so estimates for every prefix length of one
/// capture can be read off without re-summing.
#[derive(Debug, Clone)]
pub struct BisonAccumulator {
    sum: Vec<C64>,
    count: usize,
}

impl BisonAccumulator {
    pub fn new(subcarriers: usize) -> Self {
        Self {
            sum: vec![C64::new(0.0, 0.0); subcarriers],
            count: 0,
        }
    }

    pub fn push(&mut self, csi: &CsiVector) -> Result<()> {
        if csi.len() != self.sum.len() {
            return Err(Error::invalid(format!(
                "measurement has {} entries, expected {}",
                csi.len(),
                self.sum.len()
            )));
        }
        for (s, h) in self.sum.iter_mut().zip(csi.values()) {
            *s += h;
        }
        self.count += 1;
        Ok(())
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Mean of the measurements pushed so far.
    pub fn estimate(&self) -> Result<CsiVector> {
        if self.count == 0 {
            return Err(Error::invalid("no measurements accumulated"));
        }
        let n = self.count as f64;
        CsiVector::new(self.sum.iter().map(|s| s / n).collect())
    }
}

/// Per-subcarrier mean of the measurements: the maximum-likelihood channel
/// estimate when the obfuscation averages out.
pub fn bison_estimate(m: &MeasurementMatrix) -> Result<CsiVector> {
    let mut acc = BisonAccumulator::new(m.subcarriers());
    for c in m.columns() {
        acc.push(c)?;
    }
    acc.estimate()
}

/// Four-quadrant phase of each estimate entry in degrees; an exactly zero
/// entry has no phase.
pub fn estimate_phase(estimate: &CsiVector) -> Result<Vec<f64>> {
    estimate
        .values()
        .iter()
        .enumerate()
        .map(|(index, h)| {
            if h.re == 0.0 && h.im == 0.0 {
                Err(Error::DegenerateSubcarrier { index })
            } else {
                Ok(rad_to_deg(h.im.atan2(h.re)))
            }
        })
        .collect()
}

pub fn bison_phase(m: &MeasurementMatrix) -> Result<Vec<f64>> {
    estimate_phase(&bison_estimate(m)?)
}

/// Fingerprint extracted from an averaged estimate.
pub fn restore_from_estimate(estimate: &CsiVector, layout: &SubcarrierLayout) -> Result<Fingerprint> {
    estimate_phase(estimate)?;
    extract_fingerprint(estimate, layout)
}

pub fn restore_fingerprint(m: &MeasurementMatrix, layout: &SubcarrierLayout) -> Result<Fingerprint> {
    restore_from_estimate(&bison_estimate(m)?, layout)
}

/// Per-subcarrier rotation that turns the attacker's fingerprint into the
/// victim's, degrees.
pub fn forge_offsets(victim: &Fingerprint, own: &Fingerprint) -> Result<Vec<f64>> {
    if victim.len() != own.len() {
        return Err(Error::invalid(format!(
            "fingerprint lengths differ: {} vs {}",
            victim.len(),
            own.len()
        )));
    }
    Ok(victim
        .values()
        .iter()
        .zip(own.values())
        .map(|(v, o)| wrap_deg(v - o))
        .collect())
}

/// A frame overheard by the tracker.
#[derive(Debug, Clone, PartialEq)]
pub struct SniffedFrame {
    pub time_s: f64,
    /// Link-layer source address as seen on air (possibly randomized).
    pub address: u64,
    pub csi: CsiVector,
}

/// Half-open time interval `[start_s, end_s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub start_s: f64,
    pub end_s: f64,
}

impl Interval {
    pub fn length(&self) -> f64 {
        (self.end_s - self.start_s).max(0.0)
    }
}

/// Default presence window, seconds.
pub const DEFAULT_WINDOW_S: f64 = 10.0;

/// Presence intervals per device.
///
/// Frames fall into windows `[i w, (i+1) w)`. Within a window, the frames
/// from each source address are classified; a device is present in the
/// window if at least half of some address's frames classify as it.
/// Consecutive present windows merge into one interval.
pub fn track_presence(
    frames: &[SniffedFrame],
    references: &[(DeviceId, Fingerprint)],
    threshold: f64,
    window_s: f64,
    metric: Metric,
    layout: &SubcarrierLayout,
) -> Result<BTreeMap<DeviceId, Vec<Interval>>> {
    if !(window_s > 0.0) {
        return Err(Error::invalid(format!("window must be positive, got {window_s}")));
    }
    if frames.windows(2).any(|w| w[1].time_s < w[0].time_s) {
        return Err(Error::invalid("frame stream must be time-sorted"));
    }
    // (window, address) -> (frames, votes per device)
    let mut groups: BTreeMap<(i64, u64), (usize, BTreeMap<DeviceId, usize>)> = BTreeMap::new();
    for f in frames {
        let w = (f.time_s / window_s).floor() as i64;
        let entry = groups.entry((w, f.address)).or_default();
        entry.0 += 1;
        let fp = extract_fingerprint(&f.csi, layout)?;
        if let Classification::Match(id) = classify(&fp, references, threshold, metric)? {
            *entry.1.entry(id).or_default() += 1;
        }
    }
    let mut present: BTreeMap<DeviceId, Vec<i64>> = BTreeMap::new();
    for ((w, _), (total, votes)) in &groups {
        for (id, n) in votes {
            if 2 * n >= *total {
                let list = present.entry(*id).or_default();
                if list.last() != Some(w) {
                    list.push(*w);
                }
            }
        }
    }
    let mut out = BTreeMap::new();
    for (id, mut windows) in present {
        windows.sort_unstable();
        windows.dedup();
        let mut intervals: Vec<Interval> = Vec::new();
        for w in windows {
            let start = w as f64 * window_s;
            let end = (w + 1) as f64 * window_s;
            match intervals.last_mut() {
                Some(last) if last.end_s == start => last.end_s = end,
                _ => intervals.push(Interval {
                    start_s: start,
                    end_s: end,
                }),
            }
        }
        out.insert(id, intervals);
    }
    Ok(out)
}

fn total_length(a: &[Interval]) -> f64 {
    union(a).iter().map(Interval::length).sum()
}

fn union(a: &[Interval]) -> Vec<Interval> {
    let mut v: Vec<Interval> = a.iter().copied().filter(|i| i.length() > 0.0).collect();
    v.sort_by(|x, y| x.start_s.total_cmp(&y.start_s));
    let mut out: Vec<Interval> = Vec::new();
    for i in v {
        match out.last_mut() {
            Some(last) if i.start_s <= last.end_s => last.end_s = last.end_s.max(i.end_s),
            _ => out.push(i),
        }
    }
    out
}

/// Length of the intersection over length of the union; two empty interval
/// sets agree perfectly.
pub fn jaccard(a: &[Interval], b: &[Interval]) -> f64 {
    let (ua, ub) = (union(a), union(b));
    let mut inter = 0.0;
    for x in &ua {
        for y in &ub {
            inter += (x.end_s.min(y.end_s) - x.start_s.max(y.start_s)).max(0.0);
        }
    }
    let uni = total_length(&ua) + total_length(&ub) - inter;
    if uni == 0.0 {
        1.0
    } else {
        inter / uni
    }
}
