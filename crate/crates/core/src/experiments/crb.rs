//! Closed-form bias, variance and MSE curves of the averaging estimator,
//! with Monte Carlo overlays. Rows are `x,series,value`.
//!
//! Series:
//! * `bias_sq_mu_<deg>`: normalized squared bias over `xi^2` in `[0, 1]`;
//! * `mcrb`, `var_xi2_<v>`, `mse_legit_xi2_<v>`, `mse_attacker_xi2_<v>` and
//!   `mse_ratio_xi2_<v>` over `N = 1..100` with `|h|^2 = sigma^2 = 1` and an
//!   attacker facing a 90 degree mean;
//! * `emp_var_xi2_<v>`, `emp_mse_legit_xi2_<v>`, `emp_mse_attacker_xi2_<v>`:
//!   Monte Carlo counterparts on a sparse `N` grid.

use super::{Config, Table};
use crate::analysis::{bias_sq, empirical_estimator_stats, estimator_mse, estimator_variance, mcrb, TheoryInput};
use crate::angle::deg_to_rad;
use crate::error::Result;
use crate::keystream::derive_seed;
use crate::obfuscation::{DistributionKind, DistributionSpec};
use crate::phy::C64;

pub const BIAS_MU_DEG: [f64; 9] = [0.0, 1.0, 2.0, 5.0, 10.0, 20.0, 45.0, 90.0, 180.0];
pub const ATTACKER_MU_DEG: f64 = 90.0;
pub const EMPIRICAL_N: [u64; 7] = [1, 2, 5, 10, 20, 50, 100];

fn row(table: &mut Table, x: impl ToString, series: &str, value: f64) {
    table.push(vec![x.to_string(), series.to_string(), value.to_string()]);
}

pub(super) fn run(cfg: &Config) -> Result<Table> {
    let mut t = Table::new("crb", &["x", "series", "value"]);
    for mu in BIAS_MU_DEG {
        let name = format!("bias_sq_mu_{mu}");
        for i in 0..=100 {
            let xi2 = i as f64 / 100.0;
            row(&mut t, xi2, &name, bias_sq(1.0, xi2, deg_to_rad(mu)));
        }
    }
    let (h_sq, noise) = (1.0, 1.0);
    for n in 1..=100u64 {
        row(&mut t, n, "mcrb", mcrb(noise, n));
    }
    for (j, &xi2) in cfg.xi2.iter().enumerate() {
        for n in 1..=100u64 {
            let legit = TheoryInput {
                h_sq,
                noise_var: noise,
                variance: xi2,
                mean: 0.0,
                n,
            };
            let attacker = TheoryInput {
                mean: deg_to_rad(ATTACKER_MU_DEG),
                ..legit
            };
            let (l, a) = (estimator_mse(&legit), estimator_mse(&attacker));
            row(&mut t, n, &format!("var_xi2_{xi2}"), estimator_variance(h_sq, noise, xi2, n));
            row(&mut t, n, &format!("mse_legit_xi2_{xi2}"), l);
            row(&mut t, n, &format!("mse_attacker_xi2_{xi2}"), a);
            row(&mut t, n, &format!("mse_ratio_xi2_{xi2}"), a / l);
        }
        let legit = DistributionSpec::naive(DistributionKind::Gaussian, xi2)?;
        let attacker = DistributionSpec::new(DistributionKind::Gaussian, xi2, ATTACKER_MU_DEG)?;
        for (i, n) in EMPIRICAL_N.into_iter().enumerate() {
            let seed = derive_seed(derive_seed(cfg.seed, j as u64), i as u64);
            let h = C64::new(1.0, 0.0);
            let l = empirical_estimator_stats(h, noise, &legit, n, cfg.mc_trials as u64, seed)?;
            let a = empirical_estimator_stats(h, noise, &attacker, n, cfg.mc_trials as u64, seed)?;
            row(&mut t, n, &format!("emp_var_xi2_{xi2}"), l.variance);
            row(&mut t, n, &format!("emp_mse_legit_xi2_{xi2}"), l.mse);
            row(&mut t, n, &format!("emp_mse_attacker_xi2_{xi2}"), a.mse);
        }
    }
    Ok(t)
}
