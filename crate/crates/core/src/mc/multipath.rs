//! Rake correlator output assembly for the multipath downlink model.
//!
//! Each received pulse is a sum of channel paths; each template frame is a
//! sum of jittered Rake fingers. Every (path, finger) pair within
//! correlation reach contributes its autocorrelation value at the exact
//! real-valued lag. The noise variance uses the realized template energy of
//! the drawn template jitters.

use crate::bep::SystemConfig;
use crate::error::{Error, Result};
use crate::mc::draw::{multipath_reach_chips, SymbolDraw};
use crate::pulse::{MultipathChannel, PulseModel, RakeWeights};

/// Additive parts of the Rake correlator output for one symbol.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RakeComponents {
    /// Pulses of the user of interest against their own template frames.
    pub desired: f64,
    /// Inter-frame interference: the user of interest's multipath spill
    /// into other template frames.
    pub ifi: f64,
    /// All interferer contributions.
    pub mai: f64,
    /// Correlator output noise, variance sigma_n^2 * sum_j E_{v_j}.
    pub noise: f64,
}

impl RakeComponents {
    pub fn total(&self) -> f64 {
        self.desired + self.ifi + self.mai + self.noise
    }
}

/// Assemble the Rake correlator output from one symbol's randomness.
/// Users are symbol-synchronized (downlink); the channel span must fit in
/// one frame.
pub fn rake_output_multipath(
    draw: &SymbolDraw,
    cfg: &SystemConfig,
    channel: &MultipathChannel,
    rake: &RakeWeights,
    pulse: &PulseModel,
) -> Result<RakeComponents> {
    let m_span = channel.chip_span();
    if m_span > cfg.chips_per_frame as usize {
        return Err(Error::DelaySpreadExceedsFrame {
            m: m_span,
            nc: cfg.chips_per_frame as usize,
        });
    }
    let n_f = i64::from(cfg.frames_per_symbol);
    let n_c = i64::from(cfg.chips_per_frame);
    let tc = pulse.chip_duration();
    let corr_reach = pulse.corr_reach();
    let reach = multipath_reach_chips(pulse, m_span);
    let gains = channel.gains();
    let delays = channel.delays();
    let betas = rake.weights();
    let num_fingers = betas.len();
    debug_assert_eq!(draw.template_jitter.len(), n_f as usize * num_fingers);

    let mut out = RakeComponents::default();
    let mut template_energy_sum = 0.0;
    let template = &draw.users[0];
    for j in 0..n_f {
        let slot_j = template.slot(j);
        let t_chip = j * n_c + i64::from(template.th_codes[slot_j]);
        let d1 = f64::from(template.polarity[slot_j]);
        let eh = &draw.template_jitter[j as usize * num_fingers..][..num_fingers];

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
            let f_lo = (t_chip - reach - (n_c - 1)).div_euclid(n_c);
            let f_hi = (t_chip + reach).div_euclid(n_c);
            for f in f_lo..=f_hi {
                let slot = user.slot(f);
                let p_chip = f * n_c + i64::from(user.th_codes[slot]);
                let base = (p_chip - t_chip) as f64 * tc + user.tx_jitter[slot];
                let phi = cross_corr(
                    pulse, gains, delays, betas, eh, base, corr_reach, tc,
                );
                if phi == 0.0 {
                    continue;
                }
                let contribution = scale
                    * f64::from(user.polarity[slot])
                    * f64::from(user.bit_for_frame(f, n_f))
                    * phi;
                if k == 0 {
                    if f == j {
                        out.desired += contribution;
                    } else {
                        out.ifi += contribution;
                    }
                } else {
                    out.mai += contribution;
                }
            }
        }

        template_energy_sum += template_frame_energy(pulse, delays, betas, eh, corr_reach, tc);
    }
    out.noise = draw.noise_z * (cfg.noise_psd * template_energy_sum).sqrt();
    Ok(out)
}

/// sum_p sum_l alpha_p beta_l R(base + tau_p - tau_l - eh_l), pruned to the
/// fingers within correlation reach of each path (delays are sorted).
#[allow(clippy::too_many_arguments)]
fn cross_corr(
    pulse: &PulseModel,
    gains: &[f64],
    delays: &[f64],
    betas: &[f64],
    eh: &[f64],
    base: f64,
    corr_reach: f64,
    chip_duration: f64,
) -> f64 {
    // template jitter is bounded by one chip, so pad the search window
    let pad = corr_reach + chip_duration;
    let mut acc = 0.0;
    for (p, &alpha) in gains.iter().enumerate() {
        if alpha == 0.0 {
            continue;
        }
        let tp = base + delays[p];
        let start = delays.partition_point(|&t| t < tp - pad);
        for l in start..delays.len() {
            let d = tp - delays[l];
            if d < -pad {
                break;
            }
            let r = pulse.autocorr(d - eh[l]);
            if r != 0.0 {
                acc += alpha * betas[l] * r;
            }
        }
    }
    acc
}

/// Realized energy of one template frame given its finger jitters.
fn template_frame_energy(
    pulse: &PulseModel,
    delays: &[f64],
    betas: &[f64],
    eh: &[f64],
    corr_reach: f64,
    chip_duration: f64,
) -> f64 {
    let pad = corr_reach + 2.0 * chip_duration;
    let mut acc = 0.0;
    for (l, &bl) in betas.iter().enumerate() {
        let tl = delays[l] + eh[l];
        let start = delays.partition_point(|&t| t < delays[l] - pad);
        for m in start..betas.len() {
            if delays[m] > delays[l] + pad {
                break;
            }
            let r = pulse.autocorr(tl - delays[m] - eh[m]);
            if r != 0.0 {
                acc += bl * betas[m] * r;
            }
        }
    }
    acc
}
