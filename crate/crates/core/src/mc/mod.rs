//! Correlation-level Monte Carlo engine.
//!
//! The engine simulates the decision statistic symbol by symbol: it draws
//! all randomness (bits, codes, jitters, offsets), assembles the correlator
//! output from closed-form correlation values, applies the sign decision,
//! and counts errors. Work is split into a fixed number of partitions with
//! independent RNG substreams, so results are bit-identical for a given
//! (seed, partition count) regardless of how many worker threads run them.

mod awgn;
mod draw;
mod enumerate;
mod multipath;
mod rng;

pub use awgn::{mf_output_awgn, MfComponents};
pub use draw::{SymbolDraw, SymbolSampler, UserDraw, OFFSET_BLOCK_SYMBOLS};
pub use enumerate::{enumerate_exact, EnumerationResult};
pub use multipath::{rake_output_multipath, RakeComponents};

use rayon::prelude::*;

use crate::bep::{Coding, Sync, SystemConfig};
use crate::error::{Error, Result};
use crate::jitter::TemplateJitterCase;
use crate::pulse::{MultipathChannel, PulseModel, RakeWeights};

/// Default number of RNG partitions; independent of the worker thread count.
pub const DEFAULT_PARTITIONS: u32 = 64;

/// Independent seed for one sweep point, a pure function of the sweep seed
/// and the split, so sweep results do not depend on point ordering.
pub fn derive_point_seed(seed: u64, n_f: u32) -> u64 {
    rng::splitmix64(seed ^ u64::from(n_f).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// One Monte Carlo experiment description.
#[derive(Debug, Clone)]
pub struct TrialPlan {
    pub cfg: SystemConfig,
    pub pulse: PulseModel,
    pub channel: Option<MultipathChannel>,
    pub rake: Option<RakeWeights>,
    pub template_case: Option<TemplateJitterCase>,
    pub num_symbols: u64,
    pub seed: u64,
    pub num_partitions: u32,
}

impl TrialPlan {
    /// Single-path (AWGN) experiment.
    pub fn awgn(cfg: SystemConfig, pulse: PulseModel, num_symbols: u64, seed: u64) -> Self {
        Self {
            cfg,
            pulse,
            channel: None,
            rake: None,
            template_case: None,
            num_symbols,
            seed,
            num_partitions: DEFAULT_PARTITIONS,
        }
    }

    /// Multipath downlink experiment with a Rake receiver.
    pub fn multipath(
        cfg: SystemConfig,
        pulse: PulseModel,
        channel: MultipathChannel,
        rake: RakeWeights,
        template_case: TemplateJitterCase,
        num_symbols: u64,
        seed: u64,
    ) -> Self {
        Self {
            cfg,
            pulse,
            channel: Some(channel),
            rake: Some(rake),
            template_case: Some(template_case),
            num_symbols,
            seed,
            num_partitions: DEFAULT_PARTITIONS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.cfg.validate(self.pulse.chip_duration())?;
        if self.num_symbols == 0 {
            return Err(Error::InvalidParameter(
                "num_symbols must be at least 1".into(),
            ));
        }
        if self.num_partitions == 0 {
            return Err(Error::InvalidParameter(
                "num_partitions must be at least 1".into(),
            ));
        }
        match (&self.channel, &self.rake, &self.template_case) {
            (None, None, None) => Ok(()),
            (Some(ch), Some(rake), Some(case)) => {
                if rake.num_fingers() != ch.num_paths() {
                    return Err(Error::FingerMismatch {
                        expected: ch.num_paths(),
                        got: rake.num_fingers(),
                    });
                }
                if ch.chip_span() > self.cfg.chips_per_frame as usize {
                    return Err(Error::DelaySpreadExceedsFrame {
                        m: ch.chip_span(),
                        nc: self.cfg.chips_per_frame as usize,
                    });
                }
                if self.cfg.sync != Sync::Symbol {
                    return Err(Error::InvalidParameter(
                        "the multipath model assumes symbol-synchronized downlink users".into(),
                    ));
                }
                if self.cfg.coding != Coding::Coded {
                    return Err(Error::InvalidParameter(
                        "the multipath model is defined for coded systems".into(),
                    ));
                }
                case.spec.validate(self.pulse.chip_duration())
            }
            _ => Err(Error::InvalidParameter(
                "channel, rake, and template_case must be given together".into(),
            )),
        }
    }

    fn symbols_for_partition(&self, partition: u32) -> u64 {
        let p = u64::from(self.num_partitions);
        self.num_symbols / p + u64::from(u64::from(partition) < self.num_symbols % p)
    }
}

/// Error-counting result of a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub errors: u64,
    pub symbols: u64,
    pub bep_hat: f64,
    pub std_err: f64,
}

impl McEstimate {
    fn from_counts(errors: u64, symbols: u64) -> Self {
        let bep_hat = errors as f64 / symbols as f64;
        Self {
            errors,
            symbols,
            bep_hat,
            std_err: (bep_hat * (1.0 - bep_hat) / symbols as f64).sqrt(),
        }
    }
}

/// Run the experiment and count bit errors. The tie y = 0 decides +1.
pub fn run(plan: &TrialPlan) -> Result<McEstimate> {
    plan.validate()?;
    let counts: Result<Vec<(u64, u64)>> = (0..plan.num_partitions)
        .into_par_iter()
        .map(|partition| {
            let symbols = plan.symbols_for_partition(partition);
            let mut sampler = SymbolSampler::new(plan, partition)?;
            let mut errors = 0u64;
            for _ in 0..symbols {
                let draw = sampler.next_draw();
                let y = match (&plan.channel, &plan.rake) {
                    (Some(channel), Some(rake)) => {
                        rake_output_multipath(draw, &plan.cfg, channel, rake, &plan.pulse)?
                            .total()
                    }
                    _ => mf_output_awgn(draw, &plan.cfg, &plan.pulse).total(),
                };
                let bit = draw.desired_bit();
                if (bit > 0 && y < 0.0) || (bit < 0 && y >= 0.0) {
                    errors += 1;
                }
            }
            Ok((errors, symbols))
        })
        .collect();
    let (errors, symbols) = counts?
        .into_iter()
        .fold((0, 0), |(e, s), (pe, ps)| (e + pe, s + ps));
    Ok(McEstimate::from_counts(errors, symbols))
}
