//! Brute-force enumeration of the MAI statistics for tiny instances.
//!
//! For a jitter-free two-user system, every random quantity is discrete:
//! time-hopping codes, polarity codes, information bits, and (for
//! chip-synchronous users) the chip offset. Summing over all equiprobable
//! outcomes gives the exact conditional mean and variance of the
//! (normalized) interference term, against which the Gaussian
//! approximations can be measured.

use crate::bep::{Coding, Sync, SystemConfig};
use crate::error::{Error, Result};
use crate::pulse::PulseModel;

/// Hard cap on the number of enumerated outcomes.
pub const MAX_OUTCOMES: u128 = 1 << 24;

/// Exact statistics of the normalized per-interferer MAI, conditioned on the
/// interferer's current bit being +1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnumerationResult {
    pub outcomes: u128,
    pub mai_mean_given_bit: f64,
    pub mai_var_given_bit: f64,
    /// Exact BEP of the decision statistic (self-interference excluded),
    /// present when the noise density is positive.
    pub exact_bep: Option<f64>,
}

/// Enumerate all outcomes of a two-user, jitter-free configuration.
///
/// The returned interference is in the normalized units of the analysis:
/// the raw correlator contribution divided by sqrt(E_2 / N_f).
pub fn enumerate_exact(cfg: &SystemConfig, pulse: &PulseModel) -> Result<EnumerationResult> {
    cfg.validate(pulse.chip_duration())?;
    if cfg.num_users != 2 {
        return Err(Error::EnumerationUnsupported("exactly one interferer"));
    }
    if !cfg.tx_jitter.is_none() {
        return Err(Error::EnumerationUnsupported("zero transmitter jitter"));
    }

    let n = i64::from(cfg.total_gain);
    let n_f = i64::from(cfg.frames_per_symbol);
    let n_c = i64::from(cfg.chips_per_frame);
    let tc = pulse.chip_duration();
    // no jitter: the exact correlation reach in whole chips
    let reach = (pulse.corr_reach() / tc).ceil() as i64;
    let coded = cfg.coding == Coding::Coded;

    // correlation value per chip offset
    let r_table: Vec<f64> = (-reach..=reach)
        .map(|o| pulse.autocorr(o as f64 * tc))
        .collect();
    let corr = |offset: i64| -> f64 {
        if offset.abs() > reach {
            0.0
        } else {
            r_table[(offset + reach) as usize]
        }
    };

    let offsets: Vec<i64> = match cfg.sync {
        Sync::Symbol => vec![0],
        Sync::Chip => (0..n).collect(),
    };

    // budget check across all offset values
    let mut total: u128 = 0;
    for &off in &offsets {
        let (f_lo, f_hi) = window(n, n_c, reach, off);
        let frames = (f_hi - f_lo + 1) as u32;
        let syms = (f_hi.div_euclid(n_f) - f_lo.div_euclid(n_f)) as u32; // enumerated bits
        let mut count: u128 = (n_c as u128).pow(frames + n_f as u32);
        if coded {
            count = count.saturating_mul(1u128 << (frames + n_f as u32));
        }
        count = count.saturating_mul(1u128 << syms);
        total = total.saturating_add(count);
        if total > MAX_OUTCOMES {
            return Err(Error::EnumerationTooLarge(total));
        }
    }

    let sigma_noise = (n_f as f64 * cfg.noise_psd).sqrt();
    let desired = (cfg.desired_energy * n_f as f64).sqrt();
    let mai_scale = (cfg.interferer_energies[0] / n_f as f64).sqrt();
    let want_bep = cfg.noise_psd > 0.0;

    let mut mean = 0.0;
    let mut second = 0.0;
    let mut bep = 0.0;
    for &off in &offsets {
        let (f_lo, f_hi) = window(n, n_c, reach, off);
        let frames = (f_hi - f_lo + 1) as usize;
        let sym_lo = f_lo.div_euclid(n_f);
        let syms = (f_hi.div_euclid(n_f) - sym_lo + 1) as usize;

        // digit layout: template codes, interferer codes, polarities
        // (coded only), then the interferer's adjacent bits
        let mut radices: Vec<u32> = Vec::new();
        radices.extend(std::iter::repeat(n_c as u32).take(n_f as usize + frames));
        if coded {
            radices.extend(std::iter::repeat(2).take(n_f as usize + frames));
        }
        radices.extend(std::iter::repeat(2).take(syms - 1));

        let per_outcome = 1.0 / (offsets.len() as f64 * size_of(&radices));
        let mut digits = vec![0u32; radices.len()];
        let mut bits = vec![1i8; syms];
        let current_sym = (-sym_lo) as usize;
        loop {
            // decode adjacent bits; the conditioned bit stays +1
            {
                let bit_digits = &digits[radices.len() - (syms - 1)..];
                let mut bi = 0;
                for (s, b) in bits.iter_mut().enumerate() {
                    if s == current_sym {
                        continue;
                    }
                    *b = if bit_digits[bi] == 0 { 1 } else { -1 };
                    bi += 1;
                }
            }
            let c1 = &digits[..n_f as usize];
            let c2 = &digits[n_f as usize..n_f as usize + frames];
            let (d1, d2): (&[u32], &[u32]) = if coded {
                let base = n_f as usize + frames;
                (
                    &digits[base..base + n_f as usize],
                    &digits[base + n_f as usize..base + n_f as usize + frames],
                )
            } else {
                (&[], &[])
            };

            let mut a = 0.0;
            for m in 0..n_f {
                let t_chip = m * n_c + i64::from(c1[m as usize]);
                let pol1 = if coded && d1[m as usize] == 1 { -1.0 } else { 1.0 };
                let lo = ((t_chip - reach - off - (n_c - 1)).div_euclid(n_c)).max(f_lo);
                let hi = ((t_chip + reach - off).div_euclid(n_c)).min(f_hi);
                for f in lo..=hi {
                    let idx = (f - f_lo) as usize;
                    let p_chip = f * n_c + i64::from(c2[idx]) + off;
                    let r = corr(p_chip - t_chip);
                    if r == 0.0 {
                        continue;
                    }
                    let pol2 = if coded && d2[idx] == 1 { -1.0 } else { 1.0 };
                    let bit = f64::from(bits[(f.div_euclid(n_f) - sym_lo) as usize]);
                    a += pol1 * pol2 * bit * r;
                }
            }

            mean += per_outcome * a;
            second += per_outcome * a * a;
            if want_bep {
                // average over the conditioned bit's sign by symmetry
                let shift = mai_scale * a;
                bep += per_outcome
                    * 0.5
                    * (crate::bep::q_function((desired + shift) / sigma_noise)
                        + crate::bep::q_function((desired - shift) / sigma_noise));
            }

            if !advance(&mut digits, &radices) {
                break;
            }
        }
    }

    Ok(EnumerationResult {
        outcomes: total,
        mai_mean_given_bit: mean,
        mai_var_given_bit: (second - mean * mean).max(0.0),
        exact_bep: want_bep.then_some(bep),
    })
}

/// Interferer frame range whose pulses can reach a template chip in [0, N).
fn window(n: i64, n_c: i64, reach: i64, off: i64) -> (i64, i64) {
    (
        (-reach - off - (n_c - 1)).div_euclid(n_c),
        (n - 1 + reach - off).div_euclid(n_c),
    )
}

fn size_of(radices: &[u32]) -> f64 {
    radices.iter().map(|&r| r as f64).product()
}

fn advance(digits: &mut [u32], radices: &[u32]) -> bool {
    for (d, &r) in digits.iter_mut().zip(radices) {
        *d += 1;
        if *d < r {
            return true;
        }
        *d = 0;
    }
    false
}
