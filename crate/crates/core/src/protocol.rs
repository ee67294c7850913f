//! RF-Veil session: shared key, XOR-encrypted sync index, per-frame
//! obfuscation, de-obfuscation and fingerprint authentication.
//!
//! The transmitter attaches a strictly increasing 32-bit index to every frame
//! (retransmissions included) and rotates its pilots by the pattern keyed on
//! that index. The receiver decrypts the index, rejects anything not newer
//! than the last accepted frame, reverts the pattern and authenticates the
//! extracted fingerprint against its reference table.

use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};
use crate::fingerprint::{
    embed_fingerprint, extract_fingerprint, mae, nearest, DeviceId, DeviceProfile, Fingerprint,
    LinearErrorSpec, Metric, DEFAULT_THRESHOLD_DEG,
};
use crate::keystream::{derive_seed, CounterStream, UniformSource};
use crate::obfuscation::{
    generate_pattern, revert_pattern, DistributionKind, DistributionSpec, SecretKey,
};
use crate::phy::{estimate_csi, Link, PilotSequence, SubcarrierLayout, C64};

/// Largest initial transmit index, `2^31`.
pub const MAX_INITIAL_INDEX: u32 = 1 << 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Transmitter,
    Receiver,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Key shared with the receiver at association.
    RfVeil,
    /// Transmitter-only obfuscation with a locally generated key.
    Standalone,
}

/// Session parameters common to both ends.
#[derive(Debug, Clone)]
pub struct SessionConfig {
    pub layout: SubcarrierLayout,
    pub pilots: PilotSequence,
    pub kind: DistributionKind,
    /// Jitter variance, rad².
    pub variance: f64,
    /// Add key-derived per-subcarrier means (RF-Veil); zero means otherwise.
    pub secret_means: bool,
    pub threshold_deg: f64,
    pub metric: Metric,
}

impl SessionConfig {
    pub fn new(layout: SubcarrierLayout, kind: DistributionKind, variance: f64) -> Self {
        let pilots = PilotSequence::alternating(&layout);
        Self {
            layout,
            pilots,
            kind,
            variance,
            secret_means: true,
            threshold_deg: DEFAULT_THRESHOLD_DEG,
            metric: Metric::Mae,
        }
    }

    fn spec_for(&self, key: SecretKey) -> Result<DistributionSpec> {
        if self.pilots.len() != self.layout.count() {
            return Err(Error::invalid("pilot sequence does not match layout"));
        }
        if self.secret_means {
            DistributionSpec::rfveil(self.kind, self.variance, key, &self.layout)
        } else {
            DistributionSpec::naive(self.kind, self.variance)
        }
    }
}

#[derive(Debug, Clone)]
pub struct SessionState {
    role: Role,
    mode: Mode,
    key: SecretKey,
    spec: DistributionSpec,
    config: SessionConfig,
    /// Held wide so that index `u32::MAX` can be sent before exhaustion.
    next_tx_index: u64,
    last_rx_index: Option<u32>,
    references: Vec<(DeviceId, Fingerprint)>,
}

/// Transmitted frame: encrypted index plus the received pilot symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct VeilFrame {
    pub encrypted_index: u32,
    pub sender_id: DeviceId,
    pub freq_symbols: Vec<C64>,
    /// Frame check sequence passed.
    pub payload_ok: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RejectReason {
    Fcs,
    Replay,
    UnknownDevice,
    Fingerprint,
}

impl RejectReason {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Fcs => "fcs",
            Self::Replay => "replay",
            Self::UnknownDevice => "unknown-device",
            Self::Fingerprint => "fingerprint",
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Accept(DeviceId),
    Reject(RejectReason),
}

impl Decision {
    pub fn is_accept(self) -> bool {
        matches!(self, Decision::Accept(_))
    }
}

/// Result of processing one received frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RxOutcome {
    pub decision: Decision,
    pub plain_index: u32,
    /// Distance to the claimed sender's reference, when authentication ran.
    pub mae_deg: Option<f64>,
}

pub fn encrypt_index(index: u32, key: SecretKey) -> u32 {
    index ^ key.low32()
}

pub fn decrypt_index(cipher: u32, key: SecretKey) -> u32 {
    cipher ^ key.low32()
}

/// Seconds until the index space starting at `start_index` is exhausted at
/// `rate_pps` frames per second.
pub fn key_renewal_time(rate_pps: f64, start_index: u32) -> Result<f64> {
    if !(rate_pps > 0.0) {
        return Err(Error::invalid(format!("rate must be positive, got {rate_pps}")));
    }
    Ok(((1u64 << 32) - u64::from(start_index)) as f64 / rate_pps)
}

fn initial_index(stream: &mut impl UniformSource) -> u32 {
    (stream.next_u64() % (u64::from(MAX_INITIAL_INDEX) + 1)) as u32
}

/// Establishes a session: both ends get the same key, the transmitter a
/// random initial index in `[0, 2^31]`.
pub fn associate(seed: u64, config: &SessionConfig) -> Result<(SessionState, SessionState)> {
    let mut s = CounterStream::new(seed);
    let key = SecretKey::generate(&mut s);
    let start = initial_index(&mut s);
    let tx = SessionState::new(Role::Transmitter, Mode::RfVeil, key, start, config)?;
    let rx = SessionState::new(Role::Receiver, Mode::RfVeil, key, 0, config)?;
    Ok((tx, rx))
}

impl SessionState {
    fn new(
        role: Role,
        mode: Mode,
        key: SecretKey,
        start: u32,
        config: &SessionConfig,
    ) -> Result<Self> {
        Ok(Self {
            role,
            mode,
            key,
            spec: config.spec_for(key)?,
            config: config.clone(),
            next_tx_index: u64::from(start),
            last_rx_index: None,
            references: Vec::new(),
        })
    }

    /// Transmitter obfuscating with a locally generated key and no receiver.
    pub fn standalone(seed: u64, config: &SessionConfig) -> Result<Self> {
        let mut s = CounterStream::new(seed);
        let key = SecretKey::generate(&mut s);
        let start = initial_index(&mut s);
        Self::new(Role::Transmitter, Mode::Standalone, key, start, config)
    }

    /// Session state for an explicit key, e.g. a peer holding a different
    /// key than the one a frame was sent under.
    pub fn with_key(role: Role, key: SecretKey, start: u32, config: &SessionConfig) -> Result<Self> {
        Self::new(role, Mode::RfVeil, key, start, config)
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn key(&self) -> SecretKey {
        self.key
    }

    pub fn spec(&self) -> &DistributionSpec {
        &self.spec
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    /// Next index to send, or `None` once the space is exhausted.
    pub fn next_tx_index(&self) -> Option<u32> {
        u32::try_from(self.next_tx_index).ok()
    }

    pub fn last_rx_index(&self) -> Option<u32> {
        self.last_rx_index
    }

    pub fn references(&self) -> &[(DeviceId, Fingerprint)] {
        &self.references
    }

    /// Installs or replaces a reference fingerprint.
    pub fn install_reference(&mut self, id: DeviceId, fingerprint: Fingerprint) {
        match self.references.binary_search_by_key(&id, |(d, _)| *d) {
            Ok(i) => self.references[i].1 = fingerprint,
            Err(i) => self.references.insert(i, (id, fingerprint)),
        }
    }

    /// Noiseless enrollment: the receiver learns the fingerprint the device
    /// produces through `link` without any obfuscation.
    pub fn enroll(
        &mut self,
        device: &DeviceProfile,
        linear: &LinearErrorSpec,
        link: &Link,
    ) -> Result<Fingerprint> {
        let layout = &self.config.layout;
        let symbols = embed_fingerprint(self.config.pilots.symbols(), device, linear, layout)?;
        let clean = Link {
            noise_var: 0.0,
            ..link.clone()
        };
        let y = clean.observe(&symbols, 0)?;
        let fp = extract_fingerprint(&estimate_csi(&y, &self.config.pilots)?, layout)?;
        self.install_reference(device.id(), fp.clone());
        Ok(fp)
    }

    /// Sends one pilot symbol from `device` through `link`, consuming one
    /// index. A retransmission is simply another call.
    pub fn tx_frame(
        &mut self,
        device: &DeviceProfile,
        linear: &LinearErrorSpec,
        link: &Link,
        noise_seed: u64,
    ) -> Result<VeilFrame> {
        let index = self.next_tx_index().ok_or(Error::RekeyRequired)?;
        let layout = &self.config.layout;
        let pattern = generate_pattern(self.key, index, &self.spec, layout);
        let symbols = embed_fingerprint(self.config.pilots.symbols(), device, linear, layout)?;
        let symbols = crate::obfuscation::apply_pattern(&symbols, &pattern)?;
        let received = link.observe(&symbols, derive_seed(noise_seed, u64::from(index)))?;
        self.next_tx_index += 1;
        Ok(VeilFrame {
            encrypted_index: encrypt_index(index, self.key),
            sender_id: device.id(),
            freq_symbols: received,
            payload_ok: true,
        })
    }

    /// Checks FCS, replay, sender and fingerprint in that order. Only an
    /// accepted frame advances the replay window.
    pub fn rx_frame(&mut self, frame: &VeilFrame) -> Result<RxOutcome> {
        let plain_index = decrypt_index(frame.encrypted_index, self.key);
        let reject = |reason, mae_deg| RxOutcome {
            decision: Decision::Reject(reason),
            plain_index,
            mae_deg,
        };
        if !frame.payload_ok {
            return Ok(reject(RejectReason::Fcs, None));
        }
        if self.last_rx_index.is_some_and(|last| plain_index <= last) {
            return Ok(reject(RejectReason::Replay, None));
        }
        let Some(claimed) = self
            .references
            .iter()
            .find(|(id, _)| *id == frame.sender_id)
            .map(|(_, fp)| fp)
        else {
            return Ok(reject(RejectReason::UnknownDevice, None));
        };
        let layout = &self.config.layout;
        let pattern = generate_pattern(self.key, plain_index, &self.spec, layout);
        let csi = estimate_csi(&frame.freq_symbols, &self.config.pilots)?;
        let fp = extract_fingerprint(&revert_pattern(&csi, &pattern)?, layout)?;
        let claimed_distance = mae(&fp, claimed)?;
        let winner = nearest(&fp, &self.references, self.config.metric)?;
        match winner {
            Some((id, d)) if id == frame.sender_id && d <= self.config.threshold_deg => {
                self.last_rx_index = Some(plain_index);
                Ok(RxOutcome {
                    decision: Decision::Accept(id),
                    plain_index,
                    mae_deg: Some(claimed_distance),
                })
            }
            _ => Ok(reject(RejectReason::Fingerprint, Some(claimed_distance))),
        }
    }
}

/// One row of the receiver trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub frame_no: u64,
    pub outcome: RxOutcome,
}

/// Writes `frame_no,plain_index,decision,reason,mae_deg` rows.
pub fn write_trace<W: Write>(records: &[TraceRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["frame_no", "plain_index", "decision", "reason", "mae_deg"])?;
    for r in records {
        let (decision, reason) = match r.outcome.decision {
            Decision::Accept(_) => ("ACCEPT", String::new()),
            Decision::Reject(why) => ("REJECT", why.to_string()),
        };
        w.write_record([
            r.frame_no.to_string(),
            r.outcome.plain_index.to_string(),
            decision.to_string(),
            reason,
            r.outcome.mae_deg.map(|m| m.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
