//! Closed-form BEP approximations for the four AWGN configurations and the
//! coded multipath system, plus the Gaussian tail function and the MAI
//! variance expressions used to compare synchronization modes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jitter::{JitterMoments, JitterSpec};
use crate::multipath_stats::MultipathExpectations;
use crate::pulse::MultipathChannel;

/// Per-frame polarity randomization on or off.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coding {
    Coded,
    Uncoded,
}

/// User alignment: equal delays, or offsets by an integer number of chips.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sync {
    Symbol,
    Chip,
}

impl std::fmt::Display for Coding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Coding::Coded => "coded",
            Coding::Uncoded => "uncoded",
        })
    }
}

impl std::fmt::Display for Sync {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sync::Symbol => "symbol",
            Sync::Chip => "chip",
        })
    }
}

/// Full link parameterization at one (N_f, N_c) split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Total processing gain N = N_f * N_c.
    pub total_gain: u32,
    /// Pulses per information symbol, N_f.
    pub frames_per_symbol: u32,
    /// Chips per frame, N_c.
    pub chips_per_frame: u32,
    /// Number of users including the user of interest.
    pub num_users: u32,
    /// Bit energy of the user of interest, E_1.
    pub desired_energy: f64,
    /// Bit energies E_2..E_{N_u}, one per interferer.
    pub interferer_energies: Vec<f64>,
    /// Noise spectral density sigma_n^2.
    pub noise_psd: f64,
    pub coding: Coding,
    pub sync: Sync,
    /// Transmitter timing jitter, shared by all users.
    pub tx_jitter: JitterSpec,
}

impl SystemConfig {
    pub fn validate(&self, chip_duration: f64) -> Result<()> {
        if self.frames_per_symbol == 0 || self.chips_per_frame == 0 {
            return Err(Error::InvalidParameter(
                "frames_per_symbol and chips_per_frame must be positive".into(),
            ));
        }
        if self.total_gain != self.frames_per_symbol * self.chips_per_frame {
            return Err(Error::InvalidParameter(format!(
                "total_gain {} != frames_per_symbol {} * chips_per_frame {}",
                self.total_gain, self.frames_per_symbol, self.chips_per_frame
            )));
        }
        if self.num_users == 0 {
            return Err(Error::InvalidParameter("num_users must be >= 1".into()));
        }
        if self.interferer_energies.len() != self.num_users as usize - 1 {
            return Err(Error::InvalidParameter(format!(
                "expected {} interferer energies, got {}",
                self.num_users - 1,
                self.interferer_energies.len()
            )));
        }
        if !(self.desired_energy >= 0.0) {
            return Err(Error::InvalidParameter(
                "desired_energy must be nonnegative".into(),
            ));
        }
        if self.interferer_energies.iter().any(|&e| !(e >= 0.0)) {
            return Err(Error::InvalidParameter(
                "interferer energies must be nonnegative".into(),
            ));
        }
        if !(self.noise_psd >= 0.0) {
            return Err(Error::InvalidParameter(
                "noise_psd must be nonnegative".into(),
            ));
        }
        self.tx_jitter.validate(chip_duration)
    }

    /// The same configuration at a different (N_f, N_c) split of N.
    pub fn with_split(&self, frames_per_symbol: u32) -> Result<Self> {
        if frames_per_symbol == 0 || self.total_gain % frames_per_symbol != 0 {
            return Err(Error::InvalidParameter(format!(
                "N_f = {frames_per_symbol} does not divide N = {}",
                self.total_gain
            )));
        }
        let mut cfg = self.clone();
        cfg.frames_per_symbol = frames_per_symbol;
        cfg.chips_per_frame = self.total_gain / frames_per_symbol;
        Ok(cfg)
    }

    /// The common interferer energy E; errors when interferers disagree.
    pub fn equal_interferer_energy(&self) -> Result<f64> {
        let Some(&first) = self.interferer_energies.first() else {
            return Ok(0.0);
        };
        if self.interferer_energies.iter().any(|&e| e != first) {
            return Err(Error::UnequalInterfererEnergies);
        }
        Ok(first)
    }

    pub fn total_interferer_energy(&self) -> f64 {
        self.interferer_energies.iter().sum()
    }
}

/// Additive decomposition of a squared BEP denominator.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BepTerms {
    /// Variance of the desired-signal part caused by transmitter jitter.
    pub jitter_term: f64,
    /// Multiple-access interference variance.
    pub mai_term: f64,
    /// Inter-frame interference variance (multipath only).
    pub ifi_term: Option<f64>,
    /// Receiver noise variance.
    pub noise_term: f64,
}

impl BepTerms {
    /// The squared denominator of the Q argument.
    pub fn denominator_sq(&self) -> f64 {
        self.jitter_term + self.mai_term + self.ifi_term.unwrap_or(0.0) + self.noise_term
    }
}

/// A BEP value with its denominator decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BepResult {
    pub bep: f64,
    pub terms: BepTerms,
}

/// Gaussian tail probability Q(x) = P{Z > x} for standard normal Z.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

fn q_of_ratio(numerator: f64, denominator_sq: f64) -> f64 {
    if denominator_sq <= 0.0 {
        return if numerator > 0.0 {
            0.0
        } else if numerator < 0.0 {
            1.0
        } else {
            0.5
        };
    }
    q_function(numerator / denominator_sq.sqrt())
}

fn require_coding(cfg: &SystemConfig, coding: Coding, what: &str) -> Result<()> {
    if cfg.coding != coding {
        return Err(Error::AnalyticUnsupported(format!(
            "{what} applies to {coding} systems only"
        )));
    }
    Ok(())
}

/// Coded-system BEP in AWGN; identical for symbol and chip synchronization.
///
/// `moments` holds one entry per user; entry 0 belongs to the user of
/// interest (its mu and var enter the numerator and jitter term) and
/// entries 1.. supply the interferers' gamma2 values.
pub fn bep_coded_awgn(cfg: &SystemConfig, moments: &[JitterMoments]) -> Result<BepResult> {
    require_coding(cfg, Coding::Coded, "the coded AWGN formula")?;
    if moments.len() != cfg.num_users as usize {
        return Err(Error::InvalidParameter(format!(
            "expected {} moment sets, got {}",
            cfg.num_users,
            moments.len()
        )));
    }
    let n = f64::from(cfg.total_gain);
    let n_f = f64::from(cfg.frames_per_symbol);
    let e1 = cfg.desired_energy;
    let m1 = &moments[0];

    let mai: f64 = cfg
        .interferer_energies
        .iter()
        .zip(&moments[1..])
        .map(|(&e_k, m_k)| e_k * m_k.gamma2)
        .sum::<f64>()
        / n;
    let terms = BepTerms {
        jitter_term: e1 * m1.var / n_f,
        mai_term: mai,
        ifi_term: None,
        noise_term: cfg.noise_psd,
    };
    Ok(BepResult {
        bep: q_of_ratio(e1.sqrt() * m1.mu, terms.denominator_sq()),
        terms,
    })
}

/// MAI variance of an uncoded symbol-synchronous system with N_u - 1 equal
/// energy interferers sharing the given jitter moments.
pub fn sigma2_mai_symb(cfg: &SystemConfig, m: &JitterMoments) -> Result<f64> {
    let e = cfg.equal_interferer_energy()?;
    let n_f = f64::from(cfg.frames_per_symbol);
    let n_c = f64::from(cfg.chips_per_frame);
    let n_u = f64::from(cfg.num_users);
    Ok((e * (n_u - 1.0) / n_c) * (m.gamma2 + (n_f - 1.0) / n_c * m.gamma1 * m.gamma1))
}

/// MAI variance of the matching chip-synchronous system; at most
/// [`sigma2_mai_symb`], with equality exactly at N_f = 1.
pub fn sigma2_mai_chip(cfg: &SystemConfig, m: &JitterMoments) -> Result<f64> {
    let e = cfg.equal_interferer_energy()?;
    let n = f64::from(cfg.total_gain);
    let n_f = f64::from(cfg.frames_per_symbol);
    let n_c = f64::from(cfg.chips_per_frame);
    let n_u = f64::from(cfg.num_users);
    let coherent = (n_f - 1.0) * (2.0 * n_c * n_c * (n_f - 1.0) + 1.0) / (3.0 * n * n_c * n_c);
    Ok((e * (n_u - 1.0) / n_c) * (m.gamma2 + coherent * m.gamma1 * m.gamma1))
}

/// Uncoded multiuser BEP with symbol-synchronized, equal-energy interferers.
pub fn bep_uncoded_symbol_sync(cfg: &SystemConfig, m: &JitterMoments) -> Result<BepResult> {
    require_coding(cfg, Coding::Uncoded, "the uncoded symbol-sync formula")?;
    let e = cfg.equal_interferer_energy()?;
    let n = f64::from(cfg.total_gain);
    let n_c = f64::from(cfg.chips_per_frame);
    let n_u = f64::from(cfg.num_users);
    let e1 = cfg.desired_energy;

    let g1sq = m.gamma1 * m.gamma1;
    let terms = BepTerms {
        jitter_term: e1 * m.var * n_c / n,
        mai_term: (n_u - 1.0) * e * (m.gamma2 / n + g1sq / (n_c * n_c) - g1sq / (n * n_c)),
        ifi_term: None,
        noise_term: cfg.noise_psd,
    };
    Ok(BepResult {
        bep: q_of_ratio(e1.sqrt() * m.mu, terms.denominator_sq()),
        terms,
    })
}

/// Uncoded two-user BEP, symbol-synchronized: the MAI shifts the decision
/// statistic by +-(sqrt(E_2)/N_c) gamma1 depending on the interferer's bit,
/// so the result averages two Q terms.
pub fn bep_uncoded_two_user(cfg: &SystemConfig, m: &JitterMoments) -> Result<BepResult> {
    require_coding(cfg, Coding::Uncoded, "the uncoded two-user formula")?;
    if cfg.num_users != 2 {
        return Err(Error::NotTwoUsers(cfg.num_users as usize));
    }
    let e1 = cfg.desired_energy;
    let e2 = cfg.interferer_energies[0];
    let n = f64::from(cfg.total_gain);
    let n_c = f64::from(cfg.chips_per_frame);

    let terms = BepTerms {
        jitter_term: e1 * m.var * n_c / n,
        mai_term: (e2 / n) * (m.gamma2 - m.gamma1 * m.gamma1 / n_c),
        ifi_term: None,
        noise_term: cfg.noise_psd,
    };
    let shift = e2.sqrt() / n_c * m.gamma1;
    let mean = e1.sqrt() * m.mu;
    let d2 = terms.denominator_sq();
    let bep = 0.5 * q_of_ratio(mean + shift, d2) + 0.5 * q_of_ratio(mean - shift, d2);
    Ok(BepResult { bep, terms })
}

/// Uncoded multiuser BEP with chip-synchronized, equal-energy interferers.
pub fn bep_uncoded_chip_sync(cfg: &SystemConfig, m: &JitterMoments) -> Result<BepResult> {
    require_coding(cfg, Coding::Uncoded, "the uncoded chip-sync formula")?;
    let e = cfg.equal_interferer_energy()?;
    let n = f64::from(cfg.total_gain);
    let n_c = f64::from(cfg.chips_per_frame);
    let n_u = f64::from(cfg.num_users);
    let e1 = cfg.desired_energy;

    let coherent =
        (n - n_c) * (2.0 * n_c * (n - n_c) + 1.0) / (3.0 * n * n * n_c * n_c * n_c);
    let terms = BepTerms {
        jitter_term: e1 * m.var * n_c / n,
        mai_term: (n_u - 1.0) * e * (m.gamma2 / n + coherent * m.gamma1 * m.gamma1),
        ifi_term: None,
        noise_term: cfg.noise_psd,
    };
    Ok(BepResult {
        bep: q_of_ratio(e1.sqrt() * m.mu, terms.denominator_sq()),
        terms,
    })
}

/// Coded multipath BEP for a symbol-synchronized downlink with a Rake
/// receiver. `expectations` must come from
/// [`crate::multipath_stats::multipath_expectations`] with the same channel,
/// Rake weights, and jitter settings.
pub fn bep_multipath_coded(
    cfg: &SystemConfig,
    channel: &MultipathChannel,
    expectations: &MultipathExpectations,
) -> Result<BepResult> {
    require_coding(cfg, Coding::Coded, "the multipath formula")?;
    let m_span = channel.chip_span();
    if m_span > cfg.chips_per_frame as usize {
        return Err(Error::DelaySpreadExceedsFrame {
            m: m_span,
            nc: cfg.chips_per_frame as usize,
        });
    }
    let n = f64::from(cfg.total_gain);
    let n_c = f64::from(cfg.chips_per_frame);
    let e1 = cfg.desired_energy;

    let terms = BepTerms {
        jitter_term: e1 * n_c / n * expectations.var_phi,
        mai_term: cfg.total_interferer_energy() / n * expectations.sigma2_mai,
        ifi_term: Some(e1 / (n_c * n) * expectations.sigma2_ifi),
        noise_term: expectations.mean_template_energy * cfg.noise_psd,
    };
    Ok(BepResult {
        bep: q_of_ratio(e1.sqrt() * expectations.mean_phi, terms.denominator_sq()),
        terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jitter::compute_moments;
    use crate::pulse::PulseModel;

    fn fig_cfg(n_f: u32, coding: Coding, sync: Sync, jitter: JitterSpec) -> SystemConfig {
        SystemConfig {
            total_gain: 512,
            frames_per_symbol: n_f,
            chips_per_frame: 512 / n_f,
            num_users: 10,
            desired_energy: 1.0,
            interferer_energies: vec![1.0; 9],
            noise_psd: 0.1,
            coding,
            sync,
            tx_jitter: jitter,
        }
    }

    #[test]
    fn q_function_anchors() {
        assert_eq!(q_function(0.0), 0.5);
        for x in [0.3, 1.0, 2.5, 5.0] {
            assert!((q_function(x) + q_function(-x) - 1.0).abs() < 1e-14);
        }
        // value frozen from a high-precision erfc evaluation
        assert!((q_function(2.9163) - 1.7710e-3).abs() < 1e-6);
        assert!(q_function(1.0) > q_function(1.5));
    }

    #[test]
    fn coded_awgn_zero_jitter_matches_closed_form() {
        let p = PulseModel::default_uwb();
        let m = compute_moments(&JitterSpec::None, &p).unwrap();
        // with no jitter gamma2 = 1 + R(T_c)^2 ~ 1, so the BEP is close to
        // Q(1/sqrt(9/512 + 0.1)) for every split of N
        let expected = q_function(1.0 / (9.0 / 512.0 + 0.1f64).sqrt());
        let mut values = Vec::new();
        for n_f in [1u32, 2, 8, 64, 512] {
            let cfg = fig_cfg(n_f, Coding::Coded, Sync::Symbol, JitterSpec::None);
            let r = bep_coded_awgn(&cfg, &vec![m; 10]).unwrap();
            assert!((r.bep - expected).abs() / expected < 1e-4, "{}", r.bep);
            values.push(r.bep);
        }
        for w in values.windows(2) {
            assert!((w[0] - w[1]).abs() / w[0] < 1e-15, "split must not matter");
        }
        assert!((expected - 1.77088e-3).abs() < 1e-7);
    }

    #[test]
    fn coded_awgn_single_user_is_matched_filter_bound() {
        let p = PulseModel::default_uwb();
        let m = compute_moments(&JitterSpec::None, &p).unwrap();
        let cfg = SystemConfig {
            num_users: 1,
            interferer_energies: vec![],
            ..fig_cfg(64, Coding::Coded, Sync::Symbol, JitterSpec::None)
        };
        let r = bep_coded_awgn(&cfg, &[m]).unwrap();
        assert!((r.bep - q_function((1.0f64 / 0.1).sqrt())).abs() < 1e-16);
    }

    #[test]
    fn coded_awgn_monotone_in_frames_under_jitter() {
        let p = PulseModel::default_uwb();
        let m = compute_moments(&JitterSpec::uniform(25e-12), &p).unwrap();
        let mut prev = f64::INFINITY;
        for n_f in [1u32, 2, 4, 8, 16, 32, 64, 128, 256, 512] {
            let cfg = fig_cfg(n_f, Coding::Coded, Sync::Symbol, JitterSpec::uniform(25e-12));
            let bep = bep_coded_awgn(&cfg, &vec![m; 10]).unwrap().bep;
            assert!(bep <= prev, "BEP must not increase with N_f");
            prev = bep;
        }
    }

    #[test]
    fn uncoded_symbol_sync_vanishing_collision_limit() {
        let p = PulseModel::default_uwb();
        let m = compute_moments(&JitterSpec::None, &p).unwrap();
        let mut cfg = fig_cfg(1, Coding::Uncoded, Sync::Symbol, JitterSpec::None);
        cfg.total_gain = 1 << 20;
        cfg.chips_per_frame = 1 << 20;
        let r = bep_uncoded_symbol_sync(&cfg, &m).unwrap();
        let bound = q_function((1.0f64 / 0.1).sqrt());
        assert!(r.terms.mai_term < 1e-5);
        assert!((r.bep - bound).abs() / bound < 1e-2);
    }

    #[test]
    fn uncoded_symbol_sync_single_frame_mai() {
        let p = PulseModel::default_uwb();
        let m = compute_moments(&JitterSpec::uniform(25e-12), &p).unwrap();
        let cfg = fig_cfg(1, Coding::Uncoded, Sync::Symbol, JitterSpec::uniform(25e-12));
        let r = bep_uncoded_symbol_sync(&cfg, &m).unwrap();
        // at N_f = 1 the coherent-accumulation adjustments cancel:
        // gamma1^2/N_c^2 - gamma1^2/(N N_c) = 0 since N = N_c
        let expected = 9.0 * m.gamma2 / 512.0;
        assert!((r.terms.mai_term - expected).abs() < 1e-15);
        // consistency with the variance form: mai_term = (N_c/N) sigma2
        let s = sigma2_mai_symb(&cfg, &m).unwrap();
        let n_c = f64::from(cfg.chips_per_frame);
        assert!((r.terms.mai_term - n_c / 512.0 * s).abs() < 1e-15);
    }

    #[test]
    fn two_user_collapses_without_interferer() {
        let p = PulseModel::default_uwb();
        let m = compute_moments(&JitterSpec::uniform(25e-12), &p).unwrap();
        let mut cfg = fig_cfg(64, Coding::Uncoded, Sync::Symbol, JitterSpec::uniform(25e-12));
        cfg.num_users = 2;
        cfg.interferer_energies = vec![0.0];
        let r = bep_uncoded_two_user(&cfg, &m).unwrap();
        // D^2 = E1 var N_c / N + sigma_n^2 with N_c = 8, N = 512
        let single = q_function(m.mu / (m.var * 8.0 / 512.0 + 0.1f64).sqrt());
        assert!((r.bep - single).abs() / single < 1e-12);
    }

    #[test]
    fn two_user_unit_snr_anchor() {
        let p = PulseModel::default_uwb();
        let m = compute_moments(&JitterSpec::None, &p).unwrap();
        let mut cfg = fig_cfg(64, Coding::Uncoded, Sync::Symbol, JitterSpec::None);
        cfg.num_users = 2;
        cfg.interferer_energies = vec![0.0];
        cfg.noise_psd = 1.0;
        let r = bep_uncoded_two_user(&cfg, &m).unwrap();
        assert!((r.bep - q_function(1.0)).abs() < 1e-15);
        assert!((q_function(1.0) - 0.15865525393145707).abs() < 1e-14);
    }

    #[test]
    fn chip_sync_variance_never_exceeds_symbol_sync() {
        let p = PulseModel::default_uwb();
        let m = compute_moments(&JitterSpec::uniform(25e-12), &p).unwrap();
        for n_f in [1u32, 2, 4, 8, 16, 32, 64, 128, 256, 512] {
            let cfg = fig_cfg(n_f, Coding::Uncoded, Sync::Chip, JitterSpec::uniform(25e-12));
            let symb = sigma2_mai_symb(&cfg, &m).unwrap();
            let chip = sigma2_mai_chip(&cfg, &m).unwrap();
            if n_f == 1 {
                assert!((symb - chip).abs() < 1e-15 * symb);
            } else {
                assert!(chip < symb, "N_f = {n_f}");
            }
            // the printed chip-sync BEP denominator equals (N_c/N) sigma2
            let r = bep_uncoded_chip_sync(&cfg, &m).unwrap();
            let n_c = f64::from(cfg.chips_per_frame);
            assert!(
                (r.terms.mai_term - n_c / 512.0 * chip).abs() < 1e-12 * r.terms.mai_term.max(1e-30)
            );
        }
    }

    #[test]
    fn terms_sum_to_denominator() {
        let t = BepTerms {
            jitter_term: 0.1,
            mai_term: 0.2,
            ifi_term: Some(0.05),
            noise_term: 0.3,
        };
        assert!((t.denominator_sq() - 0.65).abs() < 1e-15);
    }

    #[test]
    fn unequal_interferers_rejected() {
        let p = PulseModel::default_uwb();
        let m = compute_moments(&JitterSpec::None, &p).unwrap();
        let mut cfg = fig_cfg(8, Coding::Uncoded, Sync::Symbol, JitterSpec::None);
        cfg.interferer_energies[3] = 2.0;
        assert!(matches!(
            bep_uncoded_symbol_sync(&cfg, &m),
            Err(Error::UnequalInterfererEnergies)
        ));
        assert!(matches!(
            bep_uncoded_chip_sync(&cfg, &m),
            Err(Error::UnequalInterfererEnergies)
        ));
    }

    #[test]
    fn config_validation() {
        let mut cfg = fig_cfg(8, Coding::Coded, Sync::Symbol, JitterSpec::None);
        assert!(cfg.validate(0.25e-9).is_ok());
        cfg.total_gain = 500;
        assert!(cfg.validate(0.25e-9).is_err());
        let cfg = fig_cfg(8, Coding::Coded, Sync::Symbol, JitterSpec::None);
        let split = cfg.with_split(128).unwrap();
        assert_eq!(split.chips_per_frame, 4);
        assert!(cfg.with_split(3).is_err());
    }
}
