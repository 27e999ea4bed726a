//! Matched-filter output assembly for the single-path (AWGN) model.
//!
//! Every pulse of every user contributes its autocorrelation value at the
//! exact real-valued lag against every template pulse it can reach, so the
//! decision statistic is free of time-discretization error. Unlike the
//! closed-form analysis, the self-interference of the user of interest at
//! neighboring chips is physically included.

use crate::bep::SystemConfig;
use crate::mc::draw::{awgn_reach_chips, SymbolDraw};
use crate::pulse::PulseModel;

/// Additive parts of the matched-filter output for one symbol.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MfComponents {
    /// Pulses of the user of interest hitting their own template frames.
    pub desired: f64,
    /// The user of interest's pulses spilling into other template frames.
    pub self_interference: f64,
    /// All interferer contributions.
    pub mai: f64,
    /// Correlator output noise, variance N_f * sigma_n^2.
    pub noise: f64,
}

impl MfComponents {
    pub fn total(&self) -> f64 {
        self.desired + self.self_interference + self.mai + self.noise
    }
}

/// Assemble the matched-filter output from one symbol's randomness.
pub fn mf_output_awgn(
    draw: &SymbolDraw,
    cfg: &SystemConfig,
    pulse: &PulseModel,
) -> MfComponents {
    let n_f = i64::from(cfg.frames_per_symbol);
    let n_c = i64::from(cfg.chips_per_frame);
    let tc = pulse.chip_duration();
    let reach = awgn_reach_chips(pulse);

    let mut out = MfComponents::default();
    let template = &draw.users[0];
    for j in 0..n_f {
        let slot_j = template.slot(j);
        let t_chip = j * n_c + i64::from(template.th_codes[slot_j]);
        let d1 = f64::from(template.polarity[slot_j]);

        for (k, user) in draw.users.iter().enumerate() {
            let energy = if k == 0 {
                cfg.desired_energy
            } else {
                cfg.interferer_energies[k - 1]
            };
            if energy == 0.0 {
                continue;
            }
            let scale = (energy / n_f as f64).sqrt() * d1;
            let off = user.offset_chips;
            let f_lo = (t_chip - reach - off - (n_c - 1)).div_euclid(n_c);
            let f_hi = (t_chip + reach - off).div_euclid(n_c);
            for f in f_lo..=f_hi {
                let slot = user.slot(f);
                let p_chip = f * n_c + i64::from(user.th_codes[slot]) + off;
                let lag = (p_chip - t_chip) as f64 * tc + user.tx_jitter[slot];
                let r = pulse.autocorr(lag);
                if r == 0.0 {
                    continue;
                }
                let contribution = scale
                    * f64::from(user.polarity[slot])
                    * f64::from(user.bit_for_frame(f, n_f))
                    * r;
                if k == 0 {
                    if f == j {
                        out.desired += contribution;
                    } else {
                        out.self_interference += contribution;
                    }
                } else {
                    out.mai += contribution;
                }
            }
        }
    }
    out.noise = draw.noise_z * (n_f as f64 * cfg.noise_psd).sqrt();
    out
}
