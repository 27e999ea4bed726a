//! Built-in experiment presets covering the reference link scenarios:
//! the fixed-N trade-off sweep in AWGN (fig4), its SNR sweep (fig5), the
//! uniform-versus-Gaussian jitter comparison (fig6), and the coded
//! multipath downlink with both template-jitter structures (fig7).

use crate::bep::{Coding, Sync, SystemConfig};
use crate::jitter::{JitterSpec, TemplateCase, TemplateJitterCase};
use crate::pulse::{MultipathChannel, PulseModel, RakeWeights};
use crate::sweep::{MultipathScenario, SweepRequest};

/// Ten-path channel gains of the multipath preset (delays l * T_c).
pub const FIG7_GAINS: [f64; 10] = [
    0.4653, 0.5817, 0.2327, -0.4536, 0.3490, 0.2217, -0.1163, 0.0233, -0.0116, -0.0023,
];

/// Jitter variance shared by both families in the fig6 comparison (s^2).
pub const FIG6_JITTER_VARIANCE: f64 = 208.3e-24;

/// One labeled sweep; `variant` distinguishes rows within a preset (noise
/// level, jitter family, or template case) and fills the CSV `case` column.
#[derive(Debug, Clone)]
pub struct ExperimentRun {
    pub preset: &'static str,
    pub variant: String,
    pub request: SweepRequest,
}

const MODES: [(Coding, Sync); 4] = [
    (Coding::Coded, Sync::Symbol),
    (Coding::Coded, Sync::Chip),
    (Coding::Uncoded, Sync::Symbol),
    (Coding::Uncoded, Sync::Chip),
];

fn awgn_base(coding: Coding, sync: Sync, noise_psd: f64, tx_jitter: JitterSpec) -> SystemConfig {
    SystemConfig {
        total_gain: 512,
        frames_per_symbol: 1,
        chips_per_frame: 512,
        num_users: 10,
        desired_energy: 1.0,
        interferer_energies: vec![1.0; 9],
        noise_psd,
        coding,
        sync,
        tx_jitter,
    }
}

/// All four (coding, sync) combinations at N = 512, ten unit-energy users,
/// sigma_n^2 = 0.1, uniform 25 ps jitter.
pub fn fig4() -> Vec<ExperimentRun> {
    let pulse = PulseModel::default_uwb();
    MODES
        .iter()
        .map(|&(coding, sync)| ExperimentRun {
            preset: "fig4",
            variant: String::new(),
            request: SweepRequest::new(
                awgn_base(coding, sync, 0.1, JitterSpec::uniform(25e-12)),
                pulse,
            ),
        })
        .collect()
}

/// The fig4 setup swept over noise levels.
pub fn fig5() -> Vec<ExperimentRun> {
    let pulse = PulseModel::default_uwb();
    let mut runs = Vec::new();
    for &noise in &[0.5, 0.1, 0.01] {
        for &(coding, sync) in &MODES {
            runs.push(ExperimentRun {
                preset: "fig5",
                variant: format!("sigma_n2={noise}"),
                request: SweepRequest::new(
                    awgn_base(coding, sync, noise, JitterSpec::uniform(25e-12)),
                    pulse,
                ),
            });
        }
    }
    runs
}

/// The fig4 setup with uniform versus truncated-Gaussian jitter of equal
/// variance.
pub fn fig6() -> Vec<ExperimentRun> {
    let pulse = PulseModel::default_uwb();
    let families = [
        ("uniform", JitterSpec::uniform(fig6_uniform_half_width())),
        (
            "gaussian",
            JitterSpec::truncated_gaussian(FIG6_JITTER_VARIANCE.sqrt(), pulse.chip_duration()),
        ),
    ];
    let mut runs = Vec::new();
    for (label, jitter) in families {
        for &(coding, sync) in &MODES {
            runs.push(ExperimentRun {
                preset: "fig6",
                variant: label.to_string(),
                request: SweepRequest::new(awgn_base(coding, sync, 0.1, jitter), pulse),
            });
        }
    }
    runs
}

/// Uniform half-width with variance [`FIG6_JITTER_VARIANCE`] (~25 ps).
pub fn fig6_uniform_half_width() -> f64 {
    (3.0 * FIG6_JITTER_VARIANCE).sqrt()
}

/// The ten-path coded multipath downlink: MRC Rake, uniform 20 ps jitter at
/// transmitter and template, E_1 = 1 and nine interferers at E = 5,
/// sigma_n^2 = 0.01, template-jitter cases 1 and 2.
pub fn fig7() -> Vec<ExperimentRun> {
    let pulse = PulseModel::default_uwb();
    let (channel, rake) = fig7_channel(&pulse);
    let jitter = JitterSpec::uniform(20e-12);
    let base = SystemConfig {
        total_gain: 512,
        frames_per_symbol: 16,
        chips_per_frame: 32,
        num_users: 10,
        desired_energy: 1.0,
        interferer_energies: vec![5.0; 9],
        noise_psd: 0.01,
        coding: Coding::Coded,
        sync: Sync::Symbol,
        tx_jitter: jitter,
    };
    [TemplateCase::Case1, TemplateCase::Case2]
        .iter()
        .map(|&case| {
            let mut request = SweepRequest::new(base.clone(), pulse);
            // the channel spans 10 chips, so frames must hold at least that
            request.factorizations.retain(|&(_, n_c)| n_c as usize >= channel.chip_span());
            request.multipath = Some(MultipathScenario {
                channel: channel.clone(),
                rake: rake.clone(),
                template_case: TemplateJitterCase::new(case, jitter),
            });
            ExperimentRun {
                preset: "fig7",
                variant: match case {
                    TemplateCase::Case1 => "case1".to_string(),
                    TemplateCase::Case2 => "case2".to_string(),
                    TemplateCase::Case3 => "case3".to_string(),
                },
                request,
            }
        })
        .collect()
}

/// The fig7 channel and its MRC Rake weights.
pub fn fig7_channel(pulse: &PulseModel) -> (MultipathChannel, RakeWeights) {
    let channel = MultipathChannel::chip_spaced(FIG7_GAINS.to_vec(), pulse.chip_duration())
        .expect("static channel is valid");
    let rake = RakeWeights::mrc(&channel, pulse);
    (channel, rake)
}
