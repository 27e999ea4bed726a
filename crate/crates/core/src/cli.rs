//! Command-line front end: resolves a preset or a JSON config into sweep
//! requests, runs the selected evaluators, and writes one CSV of results.
//!
//! The CSV is byte-identical across runs with the same inputs and seed,
//! regardless of `--workers`: worker threads only split fixed RNG
//! partitions, and every float is printed with 9 significant digits.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use crate::bep::{Coding, Sync};
use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::jitter::TemplateCase;
use crate::preset::{self, ExperimentRun};
use crate::sweep::{sweep, SweepRequest};

pub const CSV_HEADER: &str = "preset,coding,sync,case,N,N_f,N_c,analytic_bep,mc_bep,mc_std_err,jitter_term,mai_term,ifi_term,noise_term,seed,symbols";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetName {
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    /// User-supplied JSON config (requires --config).
    Custom,
}

#[derive(Debug, Parser)]
#[command(
    name = "uwb-link",
    about = "BEP trade-off curves for time-hopping impulse-radio UWB links"
)]
pub struct Args {
    /// Experiment preset to run.
    #[arg(long, value_enum)]
    pub preset: PresetName,

    /// JSON experiment config; only valid with --preset custom.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Comma-separated evaluator list: analytic, mc.
    #[arg(long, default_value = "analytic")]
    pub evaluators: String,

    /// Monte Carlo symbols per sweep point.
    #[arg(long, default_value_t = 100_000)]
    pub symbols: u64,

    /// Master RNG seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads for the Monte Carlo engine.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,

    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parse process arguments, run, and return the exit status.
pub fn main_entry() -> i32 {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Execute the experiment described by already-parsed arguments.
pub fn run(args: &Args) -> Result<()> {
    let evaluators = parse_evaluators(&args.evaluators)?;
    if evaluators.monte_carlo && args.symbols == 0 {
        return Err(Error::InvalidParameter(
            "Monte Carlo evaluation needs --symbols >= 1".into(),
        ));
    }
    if args.workers == 0 {
        return Err(Error::InvalidParameter(
            "--workers must be at least 1".into(),
        ));
    }

    let runs = resolve_runs(args)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;

    let mut csv = String::new();
    csv.push_str(CSV_HEADER);
    csv.push('\n');
    for run in &runs {
        let mut request = run.request.clone();
        request.evaluators = evaluators;
        request.mc_symbols = if evaluators.monte_carlo {
            args.symbols
        } else {
            0
        };
        request.seed = args.seed;

        let mut point_evaluators = evaluators;
        if evaluators.analytic && !analytic_supported(&request) {
            eprintln!(
                "warning: no closed form for {} {} with this multipath setup; \
                 analytic columns left empty for preset={} case={}",
                request.base.coding, request.base.sync, run.preset, run.variant
            );
            point_evaluators.analytic = false;
        }
        request.evaluators = point_evaluators;

        let curve = pool.install(|| sweep(&request))?;
        for point in &curve.points {
            write_row(&mut csv, run, &request, point);
        }
    }

    match &args.out {
        Some(path) => std::fs::write(path, csv)?,
        None => {
            let stdout = std::io::stdout();
            stdout.lock().write_all(csv.as_bytes())?;
        }
    }
    Ok(())
}

fn resolve_runs(args: &Args) -> Result<Vec<ExperimentRun>> {
    if args.preset != PresetName::Custom && args.config.is_some() {
        return Err(Error::InvalidParameter(
            "--config is only valid with --preset custom".into(),
        ));
    }
    match args.preset {
        PresetName::Fig4 => Ok(preset::fig4()),
        PresetName::Fig5 => Ok(preset::fig5()),
        PresetName::Fig6 => Ok(preset::fig6()),
        PresetName::Fig7 => Ok(preset::fig7()),
        PresetName::Custom => {
            let path = args.config.as_ref().ok_or_else(|| {
                Error::InvalidParameter("--preset custom requires --config".into())
            })?;
            let request = ExperimentConfig::load(path)?.resolve()?;
            Ok(vec![ExperimentRun {
                preset: "custom",
                variant: String::new(),
                request,
            }])
        }
    }
}

fn parse_evaluators(list: &str) -> Result<crate::sweep::Evaluators> {
    let mut ev = crate::sweep::Evaluators::default();
    for item in list.split(',') {
        match item.trim() {
            "analytic" => ev.analytic = true,
            "mc" => ev.monte_carlo = true,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown evaluator {other:?}; expected analytic or mc"
                )))
            }
        }
    }
    if !ev.analytic && !ev.monte_carlo {
        return Err(Error::InvalidParameter(
            "at least one evaluator must be selected".into(),
        ));
    }
    Ok(ev)
}

/// Closed forms exist for all single-path setups, and for multipath only in
/// the coded symbol-synchronized downlink with template-jitter case 1 or 2.
fn analytic_supported(request: &SweepRequest) -> bool {
    match &request.multipath {
        None => true,
        Some(mp) => {
            request.base.coding == Coding::Coded
                && request.base.sync == Sync::Symbol
                && mp.template_case.case_id != TemplateCase::Case3
        }
    }
}

fn write_row(
    csv: &mut String,
    run: &ExperimentRun,
    request: &SweepRequest,
    point: &crate::sweep::SweepPoint,
) {
    let sci = |v: f64| format!("{:.8e}", v);
    let opt = |v: Option<f64>| v.map(&sci).unwrap_or_default();

    let (analytic_bep, jitter_term, mai_term, ifi_term, noise_term) = match &point.analytic {
        Some(r) => (
            sci(r.bep),
            sci(r.terms.jitter_term),
            sci(r.terms.mai_term),
            opt(r.terms.ifi_term),
            sci(r.terms.noise_term),
        ),
        None => Default::default(),
    };
    let (mc_bep, mc_std_err, symbols) = match &point.mc {
        Some(m) => (sci(m.bep_hat), sci(m.std_err), m.symbols.to_string()),
        None => Default::default(),
    };

    csv.push_str(&format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
        run.preset,
        request.base.coding,
        request.base.sync,
        run.variant,
        request.base.total_gain,
        point.n_f,
        point.n_c,
        analytic_bep,
        mc_bep,
        mc_std_err,
        jitter_term,
        mai_term,
        ifi_term,
        noise_term,
        request.seed,
        symbols,
    ));
}
