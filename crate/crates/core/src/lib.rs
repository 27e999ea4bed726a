//! Time-hopping impulse-radio UWB link analysis.
//!
//! The crate computes closed-form bit-error-probability approximations for
//! coded and uncoded time-hopping IR-UWB links under timing jitter, and
//! verifies them with a correlation-level Monte Carlo engine. Its central
//! object of study is the trade-off between the pulse-combining gain N_f
//! (pulses per symbol) and the pulse-spreading gain N_c (chips per frame)
//! at a fixed total processing gain N = N_f * N_c.

pub mod bep;
pub mod cli;
pub mod config;
pub mod error;
pub mod jitter;
pub mod mc;
pub mod multipath_stats;
pub mod preset;
pub mod pulse;
mod quad;
pub mod sweep;

pub use bep::{BepResult, BepTerms, Coding, Sync, SystemConfig};
pub use error::{Error, Result};
pub use jitter::{JitterMoments, JitterSpec, TemplateCase, TemplateJitterCase};
pub use multipath_stats::MultipathExpectations;
pub use pulse::{MultipathChannel, PulseModel, RakeWeights};
