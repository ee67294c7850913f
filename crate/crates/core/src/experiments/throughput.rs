//! Symbol error rate with and without obfuscation.
//!
//! Every frame is an LTF pilot symbol followed by one data symbol, sent over
//! a freshly drawn 3-tap indoor channel. The three arms share the channel,
//! data and noise of each frame:
//!
//! * `no`: plain transmission, zero-forcing equalization with the LTF estimate;
//! * `yes`: pilots and data rotated by the frame's pattern; the receiver
//!   equalizes as usual and the rotation cancels;
//! * `wrong-key`: the `yes` frame, but the receiver first "reverts" its CSI
//!   with a pattern from another key, which leaves a residual rotation.

use rayon::prelude::*;

use super::{mean_stderr, noise_var, Config, Table};
use crate::error::Result;
use crate::keystream::{derive_seed, CounterStream, UniformSource};
use crate::obfuscation::{apply_pattern, generate_pattern, revert_pattern, DistributionSpec, SecretKey};
use crate::phy::{estimate_csi, ChannelModel, CsiVector, Link, Modulation, Ofdm, PilotSequence, C64};

pub const ARMS: [&str; 3] = ["no", "yes", "wrong-key"];

fn symbol_errors(received: &[C64], csi: &CsiVector, sent: &[usize], m: Modulation) -> usize {
    received
        .iter()
        .zip(csi.values())
        .zip(sent)
        .filter(|((y, h), s)| m.slice(*y / *h) != **s)
        .count()
}

/// Per-arm symbol error rate for one frame.
fn frame(cfg: &Config, m: Modulation, snr_db: f64, seed: u64) -> Result<[f64; 3]> {
    let layout = &cfg.layout;
    let k = layout.count();
    let pilots = PilotSequence::alternating(layout);
    let (kind, xi2) = cfg.defense_law();
    let mut s = CounterStream::new(seed);
    let channel = ChannelModel::indoor(&mut s);
    let link = Link::new(Ofdm::new(k, layout.default_cp_len()), channel, noise_var(snr_db))?;
    let data: Vec<usize> = (0..k).map(|_| (s.next_u64() % m.order() as u64) as usize).collect();
    let data_syms: Vec<C64> = data.iter().map(|&d| m.map(d)).collect();
    let key = SecretKey::generate(&mut s);
    let wrong = SecretKey::generate(&mut s);
    let index = s.next_u64() as u32;
    let (pilot_seed, data_seed) = (s.next_u64(), s.next_u64());

    let pattern = generate_pattern(key, index, &DistributionSpec::rfveil(kind, xi2, key, layout)?, layout);
    let wrong_pattern =
        generate_pattern(wrong, index, &DistributionSpec::rfveil(kind, xi2, wrong, layout)?, layout);

    let h = estimate_csi(&link.observe(pilots.symbols(), pilot_seed)?, &pilots)?;
    let y = link.observe(&data_syms, data_seed)?;
    let clean = symbol_errors(&y, &h, &data, m);

    let h_obf = estimate_csi(&link.observe(&apply_pattern(pilots.symbols(), &pattern)?, pilot_seed)?, &pilots)?;
    let y_obf = link.observe(&apply_pattern(&data_syms, &pattern)?, data_seed)?;
    let obf = symbol_errors(&y_obf, &h_obf, &data, m);
    let wrong_csi = revert_pattern(&h_obf, &wrong_pattern)?;
    let wrong_errors = symbol_errors(&y_obf, &wrong_csi, &data, m);

    let kf = k as f64;
    Ok([clean as f64 / kf, obf as f64 / kf, wrong_errors as f64 / kf])
}

/// Rows `mcs,snr_db,obfuscated,ser,stderr`.
pub(super) fn run(cfg: &Config) -> Result<Table> {
    let snrs = cfg.snr_grid(&[0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0]);
    let mut table = Table::new("throughput", &["mcs", "snr_db", "obfuscated", "ser", "stderr"]);
    for &m in &cfg.mcs {
        for &snr in &snrs {
            let per_frame: Vec<[f64; 3]> = (0..cfg.frames as u64)
                .into_par_iter()
                .map(|f| frame(cfg, m, snr, derive_seed(cfg.seed, f)))
                .collect::<Result<_>>()?;
            for (arm, name) in ARMS.iter().enumerate() {
                let col: Vec<f64> = per_frame.iter().map(|r| r[arm]).collect();
                let (ser, se) = mean_stderr(&col);
                table.push(vec![
                    m.name().to_string(),
                    snr.to_string(),
                    name.to_string(),
                    ser.to_string(),
                    se.to_string(),
                ]);
            }
        }
    }
    Ok(table)
}
