//! Sweeping the (N_f, N_c) factorizations of a fixed total processing gain
//! and locating the split that minimizes the BEP.

use crate::bep::{
    self, BepResult, Coding, Sync, SystemConfig,
};
use crate::error::{Error, Result};
use crate::jitter::{compute_moments, TemplateJitterCase};
use crate::mc::{self, McEstimate, TrialPlan};
use crate::multipath_stats::{multipath_expectations, MultipathExpectations};
use crate::pulse::{MultipathChannel, PulseModel, RakeWeights};

/// Channel, combiner, and template-jitter description for multipath sweeps.
#[derive(Debug, Clone)]
pub struct MultipathScenario {
    pub channel: MultipathChannel,
    pub rake: RakeWeights,
    pub template_case: TemplateJitterCase,
}

/// Which evaluators to run at each factorization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Evaluators {
    pub analytic: bool,
    pub monte_carlo: bool,
}

/// A full sweep description over factorizations of one total gain N.
#[derive(Debug, Clone)]
pub struct SweepRequest {
    /// Template configuration; its (N_f, N_c) split is replaced per point.
    pub base: SystemConfig,
    pub pulse: PulseModel,
    /// (N_f, N_c) pairs, each multiplying to the base total gain.
    pub factorizations: Vec<(u32, u32)>,
    pub evaluators: Evaluators,
    pub mc_symbols: u64,
    pub seed: u64,
    pub num_partitions: u32,
    pub multipath: Option<MultipathScenario>,
}

impl SweepRequest {
    pub fn new(base: SystemConfig, pulse: PulseModel) -> Self {
        let factorizations = default_factorizations(base.total_gain);
        Self {
            base,
            pulse,
            factorizations,
            evaluators: Evaluators {
                analytic: true,
                monte_carlo: false,
            },
            mc_symbols: 0,
            seed: 0,
            num_partitions: mc::DEFAULT_PARTITIONS,
            multipath: None,
        }
    }
}

/// All power-of-two splits N_f = 1, 2, 4, ..., N (requires N a power of two).
pub fn default_factorizations(total_gain: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    let mut n_f = 1u32;
    loop {
        if total_gain % n_f == 0 {
            out.push((n_f, total_gain / n_f));
        }
        if n_f >= total_gain {
            break;
        }
        n_f = n_f.saturating_mul(2);
    }
    out
}

/// One evaluated factorization.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub n_f: u32,
    pub n_c: u32,
    pub analytic: Option<BepResult>,
    pub mc: Option<McEstimate>,
}

/// Sweep result: evaluated points plus the minimizing splits.
#[derive(Debug, Clone)]
pub struct BepCurve {
    pub points: Vec<SweepPoint>,
    pub argmin_analytic: Option<(u32, u32)>,
    pub argmin_mc: Option<(u32, u32)>,
}

/// Evaluate every factorization with the selected evaluators.
///
/// Monte Carlo points get independent seeds derived from the request seed
/// and N_f alone, so the curve does not depend on the order of the
/// factorization list.
pub fn sweep(req: &SweepRequest) -> Result<BepCurve> {
    if req.factorizations.is_empty() {
        return Err(Error::InvalidParameter(
            "factorization list must not be empty".into(),
        ));
    }
    for &(n_f, n_c) in &req.factorizations {
        if n_f == 0 || n_f.checked_mul(n_c) != Some(req.base.total_gain) {
            return Err(Error::InvalidParameter(format!(
                "factorization ({n_f}, {n_c}) does not multiply to N = {}",
                req.base.total_gain
            )));
        }
    }
    if req.evaluators.monte_carlo && req.mc_symbols == 0 {
        return Err(Error::InvalidParameter(
            "Monte Carlo evaluation needs mc_symbols >= 1".into(),
        ));
    }

    // inputs that do not depend on the split are computed once
    let moments = compute_moments(&req.base.tx_jitter, &req.pulse)?;
    let expectations: Option<MultipathExpectations> = match (&req.multipath, req.evaluators.analytic)
    {
        (Some(mp), true) => Some(multipath_expectations(
            &req.base.tx_jitter,
            &req.pulse,
            &mp.channel,
            &mp.rake,
            &mp.template_case,
        )?),
        _ => None,
    };

    let mut points = Vec::with_capacity(req.factorizations.len());
    for &(n_f, _) in &req.factorizations {
        let cfg = req.base.with_split(n_f)?;
        let analytic = if req.evaluators.analytic {
            Some(analytic_point(&cfg, req, &moments, expectations.as_ref())?)
        } else {
            None
        };
        let mc = if req.evaluators.monte_carlo {
            let mut plan = match &req.multipath {
                Some(mp) => TrialPlan::multipath(
                    cfg.clone(),
                    req.pulse,
                    mp.channel.clone(),
                    mp.rake.clone(),
                    mp.template_case,
                    req.mc_symbols,
                    point_seed(req.seed, n_f),
                ),
                None => TrialPlan::awgn(
                    cfg.clone(),
                    req.pulse,
                    req.mc_symbols,
                    point_seed(req.seed, n_f),
                ),
            };
            plan.num_partitions = req.num_partitions;
            Some(mc::run(&plan)?)
        } else {
            None
        };
        points.push(SweepPoint {
            n_f,
            n_c: cfg.chips_per_frame,
            analytic,
            mc,
        });
    }

    let argmin_analytic = argmin(&points, |p| p.analytic.as_ref().map(|r| r.bep));
    let argmin_mc = argmin(&points, |p| p.mc.as_ref().map(|m| m.bep_hat));
    Ok(BepCurve {
        points,
        argmin_analytic,
        argmin_mc,
    })
}

fn analytic_point(
    cfg: &SystemConfig,
    req: &SweepRequest,
    moments: &crate::jitter::JitterMoments,
    expectations: Option<&MultipathExpectations>,
) -> Result<BepResult> {
    match (&req.multipath, cfg.coding, cfg.sync) {
        (Some(mp), Coding::Coded, Sync::Symbol) => {
            bep::bep_multipath_coded(cfg, &mp.channel, expectations.expect("computed above"))
        }
        (Some(_), _, _) => Err(Error::AnalyticUnsupported(
            "multipath closed forms cover coded symbol-synchronized downlinks only".into(),
        )),
        (None, Coding::Coded, _) => {
            bep::bep_coded_awgn(cfg, &vec![*moments; cfg.num_users as usize])
        }
        (None, Coding::Uncoded, Sync::Symbol) => bep::bep_uncoded_symbol_sync(cfg, moments),
        (None, Coding::Uncoded, Sync::Chip) => bep::bep_uncoded_chip_sync(cfg, moments),
    }
}

/// Minimizing split; ties resolved toward larger N_f.
fn argmin<F: Fn(&SweepPoint) -> Option<f64>>(
    points: &[SweepPoint],
    value: F,
) -> Option<(u32, u32)> {
    let mut order: Vec<&SweepPoint> = points.iter().collect();
    order.sort_by_key(|p| p.n_f);
    let mut best: Option<((u32, u32), f64)> = None;
    for p in order {
        let Some(v) = value(p) else { continue };
        match best {
            Some((_, bv)) if v > bv => {}
            _ => best = Some(((p.n_f, p.n_c), v)),
        }
    }
    best.map(|(split, _)| split)
}

/// Per-point Monte Carlo seed, a pure function of (sweep seed, N_f).
fn point_seed(seed: u64, n_f: u32) -> u64 {
    crate::mc::derive_point_seed(seed, n_f)
}
