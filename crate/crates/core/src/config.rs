//! JSON experiment configuration for custom (non-preset) runs.
//!
//! The schema mirrors the library types field for field; anything omitted
//! falls back to the standard pulse, the default power-of-two
//! factorization sweep, and maximal ratio combining.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bep::{Coding, Sync, SystemConfig};
use crate::error::{Error, Result};
use crate::jitter::{JitterSpec, TemplateCase, TemplateJitterCase};
use crate::pulse::{MultipathChannel, PulseModel, RakeWeights};
use crate::sweep::{default_factorizations, MultipathScenario, SweepRequest};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseConfig {
    pub tau: f64,
    pub chip_duration: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultipathConfig {
    pub gains: Vec<f64>,
    /// Path delays in seconds; defaults to one path per chip.
    #[serde(default)]
    pub delays: Option<Vec<f64>>,
    /// Rake combining coefficients; defaults to maximal ratio combining.
    #[serde(default)]
    pub rake_weights: Option<Vec<f64>>,
    pub template_case: TemplateCase,
    pub template_jitter: JitterSpec,
}

/// On-disk experiment description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub total_gain: u32,
    pub num_users: u32,
    pub desired_energy: f64,
    pub interferer_energies: Vec<f64>,
    pub noise_psd: f64,
    pub coding: Coding,
    pub sync: Sync,
    pub tx_jitter: JitterSpec,
    #[serde(default)]
    pub pulse: Option<PulseConfig>,
    /// N_f values to sweep; defaults to all power-of-two splits.
    #[serde(default)]
    pub factorizations: Option<Vec<u32>>,
    #[serde(default)]
    pub multipath: Option<MultipathConfig>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Validate and convert into a sweep request (evaluators, seed, and
    /// symbol budget are left at their defaults for the caller to fill in).
    pub fn resolve(&self) -> Result<SweepRequest> {
        let pulse = match &self.pulse {
            Some(p) => PulseModel::new(p.tau, p.chip_duration)?,
            None => PulseModel::default_uwb(),
        };

        let factorizations = match &self.factorizations {
            Some(n_fs) => {
                if n_fs.is_empty() {
                    return Err(Error::Config("factorizations must not be empty".into()));
                }
                n_fs
                    .iter()
                    .map(|&n_f| {
                        if n_f == 0 || self.total_gain % n_f != 0 {
                            Err(Error::Config(format!(
                                "N_f = {n_f} does not divide total_gain = {}",
                                self.total_gain
                            )))
                        } else {
                            Ok((n_f, self.total_gain / n_f))
                        }
                    })
                    .collect::<Result<Vec<_>>>()?
            }
            None => default_factorizations(self.total_gain),
        };
        let first_split = factorizations[0].0;

        let base = SystemConfig {
            total_gain: self.total_gain,
            frames_per_symbol: first_split,
            chips_per_frame: self.total_gain / first_split,
            num_users: self.num_users,
            desired_energy: self.desired_energy,
            interferer_energies: self.interferer_energies.clone(),
            noise_psd: self.noise_psd,
            coding: self.coding,
            sync: self.sync,
            tx_jitter: self.tx_jitter,
        };
        base.validate(pulse.chip_duration())
            .map_err(|e| Error::Config(e.to_string()))?;

        let multipath = match &self.multipath {
            Some(mp) => {
                let channel = match &mp.delays {
                    Some(delays) => MultipathChannel::new(
                        mp.gains.clone(),
                        delays.clone(),
                        pulse.chip_duration(),
                    )?,
                    None => MultipathChannel::chip_spaced(mp.gains.clone(), pulse.chip_duration())?,
                };
                let rake = match &mp.rake_weights {
                    Some(w) => RakeWeights::new(w.clone(), &channel, &pulse)?,
                    None => RakeWeights::mrc(&channel, &pulse),
                };
                mp.template_jitter
                    .validate(pulse.chip_duration())
                    .map_err(|e| Error::Config(e.to_string()))?;
                Some(MultipathScenario {
                    channel,
                    rake,
                    template_case: TemplateJitterCase::new(mp.template_case, mp.template_jitter),
                })
            }
            None => None,
        };

        let mut req = SweepRequest::new(base, pulse);
        req.factorizations = factorizations;
        req.multipath = multipath;
        Ok(req)
    }
}
