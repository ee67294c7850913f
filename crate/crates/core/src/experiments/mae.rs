//! Restored-fingerprint error of the averaging attack versus capture size.

use rayon::prelude::*;

use super::{clean_fingerprint, mean_stderr, random_linear, random_link, Config, Table};
use crate::attack::{restore_from_estimate, BisonAccumulator};
use crate::error::Result;
use crate::fingerprint::{mae, synth_device};
use crate::keystream::{derive_seed, CounterStream, UniformSource};
use crate::obfuscation::DistributionKind;
use crate::phy::estimate_csi;
use crate::protocol::{SessionConfig, SessionState};

/// One capture of `max(N)` obfuscated frames from a fresh device; returns
/// the MAE after each prefix length in `n_grid` (ascending).
fn trial(
    cfg: &Config,
    kind: DistributionKind,
    xi2: f64,
    secret_means: bool,
    snr_db: f64,
    n_grid: &[usize],
    seed: u64,
) -> Result<Vec<f64>> {
    let layout = &cfg.layout;
    let mut s = CounterStream::new(seed);
    let device = synth_device(s.next_u64(), layout);
    let linear = random_linear(&mut s);
    let link = random_link(layout, cfg.channel, snr_db, &mut s)?;
    let mut session_cfg = SessionConfig::new(layout.clone(), kind, xi2);
    session_cfg.secret_means = secret_means;
    let mut tx = SessionState::standalone(s.next_u64(), &session_cfg)?;
    let noise_seed = s.next_u64();
    let reference = clean_fingerprint(&device, &linear, &link, &session_cfg.pilots, layout)?;

    let mut acc = BisonAccumulator::new(layout.count());
    let mut out = Vec::with_capacity(n_grid.len());
    let mut next = n_grid.iter().peekable();
    let n_max = *n_grid.last().expect("non-empty grid");
    for n in 1..=n_max {
        let frame = tx.tx_frame(&device, &linear, &link, noise_seed)?;
        acc.push(&estimate_csi(&frame.freq_symbols, &session_cfg.pilots)?)?;
        if next.peek() == Some(&&n) {
            next.next();
            let restored = restore_from_estimate(&acc.estimate()?, layout)?;
            out.push(mae(&restored, &reference)?);
        }
    }
    Ok(out)
}

/// Rows `kind,xi2,N,mae_deg,stderr` for every configured kind and variance.
pub(super) fn run(cfg: &Config, secret_means: bool) -> Result<Table> {
    let n_grid = cfg.sorted_n_grid();
    let snr_db = cfg.snr_grid(&[20.0])[0];
    let mut table = Table::new(
        if secret_means { "rfveil-mae" } else { "naive-mae" },
        &["kind", "xi2", "N", "mae_deg", "stderr"],
    );
    for &kind in &cfg.kinds {
        for &xi2 in &cfg.xi2 {
            let per_trial: Vec<Vec<f64>> = (0..cfg.trials as u64)
                .into_par_iter()
                .map(|t| trial(cfg, kind, xi2, secret_means, snr_db, &n_grid, derive_seed(cfg.seed, t)))
                .collect::<Result<_>>()?;
            for (i, n) in n_grid.iter().enumerate() {
                let column: Vec<f64> = per_trial.iter().map(|r| r[i]).collect();
                let (m, se) = mean_stderr(&column);
                table.push(vec![
                    kind.to_string(),
                    xi2.to_string(),
                    n.to_string(),
                    m.to_string(),
                    se.to_string(),
                ]);
            }
        }
    }
    Ok(table)
}
