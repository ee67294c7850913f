//! Fingerprint forging against plain and RF-Veil authentication.
//!
//! Plain defense: the attacker overhears `sniff_frames` frames of the victim
//! at the given SNR, averages them, and rotates its own pilots by the
//! difference between that estimate and its own fingerprint.
//!
//! RF-Veil defense: the attacker is given the victim's true fingerprint but
//! not the session key, and sends the forged frame with a random encrypted
//! index under the victim's identity.

use rayon::prelude::*;

use super::{clean_fingerprint, random_linear, random_link, Config, Table};
use crate::attack::{forge_offsets, restore_from_estimate, BisonAccumulator};
use crate::error::Result;
use crate::fingerprint::{
    classify, embed_fingerprint, extract_fingerprint, synth_device, Classification, DeviceId,
    DeviceProfile, Fingerprint,
};
use crate::keystream::{derive_seed, CounterStream, UniformSource};
use crate::obfuscation::{apply_pattern, ObfuscationPattern};
use crate::phy::{estimate_csi, Link, PilotSequence, SubcarrierLayout, C64};
use crate::protocol::{associate, Decision, SessionConfig, VeilFrame};

/// Devices known to the receiver besides victim and attacker.
const BYSTANDERS: usize = 3;

struct Scene {
    victim: DeviceProfile,
    attacker: DeviceProfile,
    devices: Vec<(DeviceProfile, crate::fingerprint::LinearErrorSpec)>,
    link: Link,
    pilots: PilotSequence,
    forge_seed: u64,
    sniff_seed: u64,
    session_seed: u64,
    index_draw: u32,
}

fn scene(cfg: &Config, snr_db: f64, seed: u64) -> Result<Scene> {
    let layout = &cfg.layout;
    let mut s = CounterStream::new(seed);
    let mut ids: Vec<u64> = Vec::new();
    while ids.len() < 2 + BYSTANDERS {
        let id = s.next_u64();
        if !ids.contains(&id) {
            ids.push(id);
        }
    }
    let devices: Vec<_> = ids
        .iter()
        .map(|&id| (synth_device(id, layout), random_linear(&mut s)))
        .collect();
    let link = random_link(layout, cfg.channel, snr_db, &mut s)?;
    Ok(Scene {
        victim: devices[0].0.clone(),
        attacker: devices[1].0.clone(),
        devices,
        link,
        pilots: PilotSequence::alternating(layout),
        forge_seed: s.next_u64(),
        sniff_seed: s.next_u64(),
        session_seed: s.next_u64(),
        index_draw: s.next_u64() as u32,
    })
}

fn forged_symbols(sc: &Scene, victim_fp: &Fingerprint, layout: &SubcarrierLayout) -> Result<Vec<C64>> {
    let (_, attacker_linear) = &sc.devices[1];
    let own = clean_fingerprint(&sc.attacker, attacker_linear, &sc.link, &sc.pilots, layout)?;
    let offsets = ObfuscationPattern::from_degrees(forge_offsets(victim_fp, &own)?);
    let base = embed_fingerprint(sc.pilots.symbols(), &sc.attacker, attacker_linear, layout)?;
    apply_pattern(&base, &offsets)
}

fn references(sc: &Scene, layout: &SubcarrierLayout) -> Result<Vec<(DeviceId, Fingerprint)>> {
    let mut refs = sc
        .devices
        .iter()
        .map(|(d, lin)| Ok((d.id(), clean_fingerprint(d, lin, &sc.link, &sc.pilots, layout)?)))
        .collect::<Result<Vec<_>>>()?;
    refs.sort_by_key(|(id, _)| *id);
    Ok(refs)
}

fn plain_attempt(cfg: &Config, snr_db: f64, seed: u64) -> Result<bool> {
    let layout = &cfg.layout;
    let sc = scene(cfg, snr_db, seed)?;
    let (_, victim_linear) = &sc.devices[0];
    let victim_tx = embed_fingerprint(sc.pilots.symbols(), &sc.victim, victim_linear, layout)?;
    let mut acc = BisonAccumulator::new(layout.count());
    for j in 0..cfg.sniff_frames as u64 {
        let y = sc.link.observe(&victim_tx, derive_seed(sc.sniff_seed, j))?;
        acc.push(&estimate_csi(&y, &sc.pilots)?)?;
    }
    let victim_est = restore_from_estimate(&acc.estimate()?, layout)?;
    let forged = forged_symbols(&sc, &victim_est, layout)?;
    let y = sc.link.observe(&forged, sc.forge_seed)?;
    let fp = extract_fingerprint(&estimate_csi(&y, &sc.pilots)?, layout)?;
    let verdict = classify(&fp, &references(&sc, layout)?, cfg.threshold_deg, Default::default())?;
    Ok(verdict == Classification::Match(sc.victim.id()))
}

fn rfveil_attempt(cfg: &Config, snr_db: f64, seed: u64) -> Result<bool> {
    let layout = &cfg.layout;
    let sc = scene(cfg, snr_db, seed)?;
    let (kind, xi2) = cfg.defense_law();
    let mut session_cfg = SessionConfig::new(layout.clone(), kind, xi2);
    session_cfg.threshold_deg = cfg.threshold_deg;
    let (_, mut rx) = associate(sc.session_seed, &session_cfg)?;
    for (d, lin) in &sc.devices {
        rx.enroll(d, lin, &sc.link)?;
    }
    let (_, victim_linear) = &sc.devices[0];
    let victim_fp = clean_fingerprint(&sc.victim, victim_linear, &sc.link, &sc.pilots, layout)?;
    let forged = forged_symbols(&sc, &victim_fp, layout)?;
    let frame = VeilFrame {
        encrypted_index: sc.index_draw,
        sender_id: sc.victim.id(),
        freq_symbols: sc.link.observe(&forged, sc.forge_seed)?,
        payload_ok: true,
    };
    Ok(rx.rx_frame(&frame)?.decision == Decision::Accept(sc.victim.id()))
}

/// Rows `defense,snr_db,success_rate`.
pub(super) fn run(cfg: &Config) -> Result<Table> {
    let snrs = cfg.snr_grid(&[-10.0, 0.0, 10.0, 20.0, 25.0]);
    let mut table = Table::new("impersonation", &["defense", "snr_db", "success_rate"]);
    for defense in ["plain", "rfveil"] {
        for &snr in &snrs {
            let wins: Vec<bool> = (0..cfg.attempts as u64)
                .into_par_iter()
                .map(|a| {
                    let seed = derive_seed(cfg.seed, a);
                    match defense {
                        "plain" => plain_attempt(cfg, snr, seed),
                        _ => rfveil_attempt(cfg, snr, seed),
                    }
                })
                .collect::<Result<_>>()?;
            let rate = wins.iter().filter(|w| **w).count() as f64 / wins.len() as f64;
            table.push(vec![defense.to_string(), snr.to_string(), rate.to_string()]);
        }
    }
    Ok(table)
}
