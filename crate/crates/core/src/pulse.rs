//! Received UWB pulse, its closed-form autocorrelation, and the
//! channel/template cross-correlation used by the multipath analysis.
//!
//! The receiver statistics in this crate are assembled entirely from
//! correlation values; the pulse waveform itself is never sampled onto a
//! time grid outside of test oracles.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Normalized lag beyond which the autocorrelation is treated as exactly
/// zero. The envelope decays as exp(-pi (lag/tau)^2), which is below 1e-80
/// at 8 tau.
pub const CORR_CUTOFF_TAUS: f64 = 8.0;

/// Second-derivative-Gaussian received pulse with unit energy.
///
/// `tau` is the pulse shape parameter and `chip_duration` the chip
/// interval T_c. The normalized autocorrelation is
/// R(d) = [1 - 4 pi (d/tau)^2 + (4 pi^2 / 3)(d/tau)^4] exp(-pi (d/tau)^2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseModel {
    tau: f64,
    chip_duration: f64,
}

impl PulseModel {
    pub fn new(tau: f64, chip_duration: f64) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "pulse tau must be positive, got {tau}"
            )));
        }
        if !(chip_duration > 0.0) || !chip_duration.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "chip duration must be positive, got {chip_duration}"
            )));
        }
        Ok(Self { tau, chip_duration })
    }

    /// The standard simulation setup: tau = 0.125 ns, T_c = 0.25 ns.
    pub fn default_uwb() -> Self {
        Self {
            tau: 0.125e-9,
            chip_duration: 0.25e-9,
        }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn chip_duration(&self) -> f64 {
        self.chip_duration
    }

    /// Absolute lag (seconds) beyond which correlations are exactly zero.
    pub fn corr_reach(&self) -> f64 {
        CORR_CUTOFF_TAUS * self.tau
    }

    /// Normalized pulse autocorrelation phi_w at the given lag (seconds).
    ///
    /// Even in the lag, equal to 1 at lag 0, and clipped to exactly zero
    /// for |lag| >= 8 tau.
    pub fn autocorr(&self, lag: f64) -> f64 {
        let x = lag / self.tau;
        if x.abs() >= CORR_CUTOFF_TAUS {
            return 0.0;
        }
        let x2 = x * x;
        (1.0 - 4.0 * PI * x2 + (4.0 * PI * PI / 3.0) * x2 * x2) * (-PI * x2).exp()
    }
}

/// Tapped-delay-line multipath channel h(t) = sum_l alpha_l delta(t - tau_l).
///
/// The last delay is an integer multiple of the chip interval,
/// tau_{L-1} = (M - 1) T_c; `chip_span` stores that M.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipathChannel {
    gains: Vec<f64>,
    delays: Vec<f64>,
    chip_span: usize,
}

impl MultipathChannel {
    pub fn new(gains: Vec<f64>, delays: Vec<f64>, chip_duration: f64) -> Result<Self> {
        if gains.is_empty() || gains.len() != delays.len() {
            return Err(Error::InvalidParameter(format!(
                "channel needs matching non-empty gains/delays, got {} gains and {} delays",
                gains.len(),
                delays.len()
            )));
        }
        if delays[0] != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "first path delay must be 0, got {}",
                delays[0]
            )));
        }
        if delays.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter(
                "path delays must be nondecreasing".into(),
            ));
        }
        let last = *delays.last().unwrap();
        let m = (last / chip_duration).round() as usize + 1;
        let snapped = (m - 1) as f64 * chip_duration;
        if (last - snapped).abs() > 1e-9 * chip_duration {
            return Err(Error::InvalidParameter(format!(
                "last path delay {last:.4e} s is not an integer multiple of the chip duration"
            )));
        }
        Ok(Self {
            gains,
            delays,
            chip_span: m,
        })
    }

    /// Channel with one path per chip: delays l * T_c for l = 0..L-1.
    pub fn chip_spaced(gains: Vec<f64>, chip_duration: f64) -> Result<Self> {
        let delays = (0..gains.len()).map(|l| l as f64 * chip_duration).collect();
        Self::new(gains, delays, chip_duration)
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    pub fn delays(&self) -> &[f64] {
        &self.delays
    }

    pub fn num_paths(&self) -> usize {
        self.gains.len()
    }

    /// M: the channel spans chips 0..M-1.
    pub fn chip_span(&self) -> usize {
        self.chip_span
    }
}

/// Rake combining coefficients beta_l, one per channel path, together with
/// the mean template energy per frame E_v.
#[derive(Debug, Clone, PartialEq)]
pub struct RakeWeights {
    weights: Vec<f64>,
    template_energy: f64,
}

impl RakeWeights {
    pub fn new(weights: Vec<f64>, channel: &MultipathChannel, pulse: &PulseModel) -> Result<Self> {
        if weights.len() != channel.num_paths() {
            return Err(Error::FingerMismatch {
                expected: channel.num_paths(),
                got: weights.len(),
            });
        }
        let template_energy = template_energy(&weights, channel.delays(), pulse);
        Ok(Self {
            weights,
            template_energy,
        })
    }

    /// Maximal ratio combining: beta_l = alpha_l.
    pub fn mrc(channel: &MultipathChannel, pulse: &PulseModel) -> Self {
        Self::new(channel.gains().to_vec(), channel, pulse).expect("gains match their own channel")
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn num_fingers(&self) -> usize {
        self.weights.len()
    }

    /// E_v evaluated at zero template jitter.
    pub fn template_energy(&self) -> f64 {
        self.template_energy
    }
}

/// Energy of one template frame, sum_{p,q} beta_p beta_q phi_w(tau_p - tau_q).
pub(crate) fn template_energy(weights: &[f64], delays: &[f64], pulse: &PulseModel) -> f64 {
    let mut e = 0.0;
    for (&bp, &dp) in weights.iter().zip(delays) {
        for (&bq, &dq) in weights.iter().zip(delays) {
            e += bp * bq * pulse.autocorr(dp - dq);
        }
    }
    e
}

/// Channel/template cross-correlation: the double-sum expansion of
/// int u(t) v(t + shift) dt,
///
///   sum_l sum_p alpha_l beta_p phi_w(tau_p + eps_p - tau_l + shift),
///
/// with one template-jitter entry `eps_p` per Rake finger.
pub fn cross_corr_uv(
    pulse: &PulseModel,
    channel: &MultipathChannel,
    rake: &RakeWeights,
    template_jitter: &[f64],
    shift: f64,
) -> Result<f64> {
    if template_jitter.len() != rake.num_fingers() {
        return Err(Error::FingerMismatch {
            expected: rake.num_fingers(),
            got: template_jitter.len(),
        });
    }
    let mut acc = 0.0;
    for ((&beta, &tau_p), &eps) in rake
        .weights()
        .iter()
        .zip(channel.delays())
        .zip(template_jitter)
    {
        let base = tau_p + eps + shift;
        for (&alpha, &tau_l) in channel.gains().iter().zip(channel.delays()) {
            acc += alpha * beta * pulse.autocorr(base - tau_l);
        }
    }
    Ok(acc)
}
