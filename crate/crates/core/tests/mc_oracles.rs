//! Statistical oracles for the Monte Carlo engine: the sampled correlator
//! components must reproduce the closed-form interference statistics, and
//! tiny instances must match exhaustive enumeration.

use uwb_link::bep::{bep_coded_awgn, sigma2_mai_chip, sigma2_mai_symb};
use uwb_link::jitter::compute_moments;
use uwb_link::mc::{
    self, enumerate_exact, mf_output_awgn, rake_output_multipath, SymbolSampler, TrialPlan,
    OFFSET_BLOCK_SYMBOLS,
};
use uwb_link::multipath_stats::multipath_expectations;
use uwb_link::{
    Coding, JitterSpec, MultipathChannel, PulseModel, RakeWeights, Sync, SystemConfig,
    TemplateCase, TemplateJitterCase,
};

fn awgn_cfg(n_f: u32, coding: Coding, sync: Sync, jitter: JitterSpec) -> SystemConfig {
    SystemConfig {
        total_gain: 128,
        frames_per_symbol: n_f,
        chips_per_frame: 128 / n_f,
        num_users: 2,
        desired_energy: 1.0,
        interferer_energies: vec![1.0],
        noise_psd: 0.1,
        coding,
        sync,
        tx_jitter: jitter,
    }
}

/// Mean and standard error from block means, valid when samples within one
/// offset block are correlated (chip-sync offsets persist across a block).
fn mean_se_blocked(samples: &[f64]) -> (f64, f64) {
    let block = OFFSET_BLOCK_SYMBOLS as usize;
    let means: Vec<f64> = samples
        .chunks(block)
        .filter(|c| c.len() == block)
        .map(|c| c.iter().sum::<f64>() / c.len() as f64)
        .collect();
    let n = means.len() as f64;
    let mean = means.iter().sum::<f64>() / n;
    let var = means.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn assert_within(label: &str, analytic: f64, sampled: f64, se: f64) {
    println!("{label}: analytic = {analytic:+.6e}, sampled = {sampled:+.6e} (se {se:.2e})");
    assert!(
        (analytic - sampled).abs() <= 4.0 * se + 1e-12,
        "{label}: |{analytic} - {sampled}| > 4 se = {:.3e}",
        4.0 * se
    );
}

fn sample_awgn_components(
    cfg: &SystemConfig,
    symbols: usize,
    seed: u64,
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let pulse = PulseModel::default_uwb();
    let plan = TrialPlan::awgn(cfg.clone(), pulse, symbols as u64, seed);
    let mut sampler = SymbolSampler::new(&plan, 0).unwrap();
    let mut mai = Vec::with_capacity(symbols);
    let mut desired_times_bit = Vec::with_capacity(symbols);
    let mut mai_times_interferer_bit = Vec::with_capacity(symbols);
    for _ in 0..symbols {
        let draw = sampler.next_draw();
        let out = mf_output_awgn(draw, cfg, &pulse);
        mai.push(out.mai);
        desired_times_bit.push(out.desired * f64::from(draw.desired_bit()));
        let b2 = f64::from(draw.users[1].bit_for_frame(0, i64::from(cfg.frames_per_symbol)));
        mai_times_interferer_bit.push(out.mai * b2);
    }
    (mai, desired_times_bit, mai_times_interferer_bit)
}

#[test]
fn coded_mai_is_zero_mean_with_closed_form_variance() {
    let jitter = JitterSpec::uniform(25e-12);
    let pulse = PulseModel::default_uwb();
    let m = compute_moments(&jitter, &pulse).unwrap();
    let cfg = awgn_cfg(16, Coding::Coded, Sync::Symbol, jitter);
    let (mai, desired, _) = sample_awgn_components(&cfg, 150_000, 11);

    // normalized per-interferer MAI: a = mai / sqrt(E_2 / N_f)
    let scale = (16.0f64).sqrt();
    let a: Vec<f64> = mai.iter().map(|&x| x * scale).collect();
    let (mean, se) = mean_se_blocked(&a);
    assert_within("coded MAI mean", 0.0, mean, se);

    let a2: Vec<f64> = a.iter().map(|&x| x * x).collect();
    let (var, var_se) = mean_se_blocked(&a2);
    assert_within("coded MAI variance (gamma2 N_f/N_c)", m.gamma2 * 16.0 / 8.0, var, var_se);

    let (d, d_se) = mean_se_blocked(&desired);
    assert_within("desired mean (sqrt(E1 N_f) mu)", 16.0f64.sqrt() * m.mu, d, d_se);
}

#[test]
fn uncoded_conditional_mean_and_variances_match_closed_forms() {
    let jitter = JitterSpec::uniform(25e-12);
    let pulse = PulseModel::default_uwb();
    let m = compute_moments(&jitter, &pulse).unwrap();

    // symbol-sync: conditional mean (N_f/N_c) gamma1 and overall variance
    let cfg = awgn_cfg(16, Coding::Uncoded, Sync::Symbol, jitter);
    let (mai, _, mai_b) = sample_awgn_components(&cfg, 250_000, 12);
    let scale = (16.0f64).sqrt();
    let ab: Vec<f64> = mai_b.iter().map(|&x| x * scale).collect();
    let (cond_mean, se) = mean_se_blocked(&ab);
    assert_within(
        "uncoded symbol-sync conditional mean ((N_f/N_c) gamma1)",
        16.0 / 8.0 * m.gamma1,
        cond_mean,
        se,
    );
    let mai2: Vec<f64> = mai.iter().map(|&x| x * x).collect();
    let (var, var_se) = mean_se_blocked(&mai2);
    assert_within(
        "uncoded symbol-sync MAI variance",
        sigma2_mai_symb(&cfg, &m).unwrap(),
        var,
        var_se,
    );

    // chip-sync: the random offset shrinks the overall variance
    let cfg = awgn_cfg(16, Coding::Uncoded, Sync::Chip, jitter);
    let (mai, _, _) = sample_awgn_components(&cfg, 400_000, 13);
    let mai2: Vec<f64> = mai.iter().map(|&x| x * x).collect();
    let (var_chip, var_se) = mean_se_blocked(&mai2);
    assert_within(
        "uncoded chip-sync MAI variance",
        sigma2_mai_chip(&cfg, &m).unwrap(),
        var_chip,
        var_se,
    );
    assert!(var_chip < var, "chip-sync variance must be smaller");
}

fn fig_channel(pulse: &PulseModel) -> (MultipathChannel, RakeWeights) {
    let gains = vec![
        0.4653, 0.5817, 0.2327, -0.4536, 0.3490, 0.2217, -0.1163, 0.0233, -0.0116, -0.0023,
    ];
    let channel = MultipathChannel::chip_spaced(gains, pulse.chip_duration()).unwrap();
    let rake = RakeWeights::mrc(&channel, pulse);
    (channel, rake)
}

#[test]
fn multipath_ifi_variance_matches_closed_form_without_jitter() {
    let pulse = PulseModel::default_uwb();
    let (channel, rake) = fig_channel(&pulse);
    let cfg = SystemConfig {
        total_gain: 512,
        frames_per_symbol: 16,
        chips_per_frame: 32,
        num_users: 1,
        desired_energy: 1.0,
        interferer_energies: vec![],
        noise_psd: 0.0,
        coding: Coding::Coded,
        sync: Sync::Symbol,
        tx_jitter: JitterSpec::None,
    };
    let case = TemplateJitterCase::zero();
    let exp = multipath_expectations(&JitterSpec::None, &pulse, &channel, &rake, &case).unwrap();

    let plan = TrialPlan::multipath(
        cfg.clone(),
        pulse,
        channel.clone(),
        rake.clone(),
        case,
        100_000,
        21,
    );
    let mut sampler = SymbolSampler::new(&plan, 0).unwrap();
    let mut ifi2 = Vec::with_capacity(100_000);
    for _ in 0..100_000 {
        let draw = sampler.next_draw();
        let out = rake_output_multipath(draw, &cfg, &channel, &rake, &pulse).unwrap();
        ifi2.push(out.ifi * out.ifi);
    }
    let (var, se) = mean_se_blocked(&ifi2);
    // Per symbol the first and last frames lack a same-symbol neighbor, so
    // the adjacent-frame cross-covariance enters 2 (1 - 1/N_f) times instead
    // of the twice assumed by the asymptotic form:
    // Var(IFI) = E_1 (sigma2_ifi - (2/N_f) ifi_cross) / N_c^2
    let exact = (exp.sigma2_ifi - 2.0 / 16.0 * exp.ifi_cross) / (32.0 * 32.0);
    assert_within("multipath IFI variance (edge-corrected)", exact, var, se);
    // the asymptotic closed form carries only an O(1/N_f) relative error
    let asymptotic = exp.sigma2_ifi / (32.0 * 32.0);
    println!(
        "asymptotic IFI variance = {asymptotic:.6e}, relative gap = {:.2e}",
        (asymptotic - var).abs() / var
    );
    assert!((asymptotic - var).abs() / var < 2.0 / 16.0);
}

#[test]
fn multipath_components_match_closed_forms_in_full_configuration() {
    let pulse = PulseModel::default_uwb();
    let (channel, rake) = fig_channel(&pulse);
    let jitter = JitterSpec::uniform(20e-12);
    let case = TemplateJitterCase::new(TemplateCase::Case1, jitter);
    let cfg = SystemConfig {
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
    let exp = multipath_expectations(&jitter, &pulse, &channel, &rake, &case).unwrap();

    let symbols = 60_000usize;
    let plan = TrialPlan::multipath(
        cfg.clone(),
        pulse,
        channel.clone(),
        rake.clone(),
        case,
        symbols as u64,
        22,
    );
    let mut sampler = SymbolSampler::new(&plan, 0).unwrap();
    let mut mai2 = Vec::with_capacity(symbols);
    let mut ifi2 = Vec::with_capacity(symbols);
    let mut desired = Vec::with_capacity(symbols);
    for _ in 0..symbols {
        let draw = sampler.next_draw();
        let out = rake_output_multipath(draw, &cfg, &channel, &rake, &pulse).unwrap();
        mai2.push(out.mai * out.mai);
        ifi2.push(out.ifi * out.ifi);
        desired.push(out.desired * f64::from(draw.desired_bit()));
    }

    // Var(MAI) = (sum_k E_k) sigma2_mai / N_c over independent interferers
    let (mai_var, mai_se) = mean_se_blocked(&mai2);
    assert_within(
        "multipath MAI variance",
        45.0 * exp.sigma2_mai / 32.0,
        mai_var,
        mai_se,
    );
    let (ifi_var, ifi_se) = mean_se_blocked(&ifi2);
    // edge-corrected per-symbol variance, as in the single-user test above
    assert_within(
        "multipath IFI variance",
        (exp.sigma2_ifi - 2.0 / 16.0 * exp.ifi_cross) / (32.0 * 32.0),
        ifi_var,
        ifi_se,
    );
    let (d, d_se) = mean_se_blocked(&desired);
    assert_within(
        "multipath desired mean (sqrt(E1 N_f) E{phi})",
        16.0f64.sqrt() * exp.mean_phi,
        d,
        d_se,
    );
}

#[test]
fn enumeration_matches_closed_forms_on_tiny_instances() {
    let pulse = PulseModel::default_uwb();
    let m = compute_moments(&JitterSpec::None, &pulse).unwrap();

    // coded, N_c = 2, N_f = 2: polarity randomization zeroes the mean and
    // the variance is essentially gamma2 N_f / N_c
    let mut cfg = SystemConfig {
        total_gain: 4,
        frames_per_symbol: 2,
        chips_per_frame: 2,
        num_users: 2,
        desired_energy: 1.0,
        interferer_energies: vec![1.0],
        noise_psd: 0.1,
        coding: Coding::Coded,
        sync: Sync::Symbol,
        tx_jitter: JitterSpec::None,
    };
    let r = enumerate_exact(&cfg, &pulse).unwrap();
    println!(
        "coded 2x2: outcomes = {}, mean = {:+.3e}, var = {:.9e} (closed form {:.9e})",
        r.outcomes,
        r.mai_mean_given_bit,
        r.mai_var_given_bit,
        m.gamma2 * 2.0 / 2.0
    );
    assert!(r.mai_mean_given_bit.abs() < 1e-12);
    let coded_var = m.gamma2 * 2.0 / 2.0;
    assert!((r.mai_var_given_bit - coded_var).abs() / coded_var < 1e-2);

    // uncoded symbol-sync, N_c = 4, N_f = 2: conditional mean vs the
    // asymptotic (N_f/N_c) gamma1; exact agreement is not expected, only a
    // small gap
    cfg.total_gain = 8;
    cfg.chips_per_frame = 4;
    cfg.coding = Coding::Uncoded;
    let r = enumerate_exact(&cfg, &pulse).unwrap();
    let cond_mean = 2.0 / 4.0 * m.gamma1;
    println!(
        "uncoded 2x4: mean = {:.9e}, closed form = {:.9e}, gap = {:.2e}",
        r.mai_mean_given_bit,
        cond_mean,
        (r.mai_mean_given_bit - cond_mean).abs()
    );
    assert!((r.mai_mean_given_bit - cond_mean).abs() / cond_mean < 5e-2);

    // uncoded chip-sync, N_c = 2, N_f = 2: overall variance vs closed form
    cfg.total_gain = 4;
    cfg.chips_per_frame = 2;
    cfg.sync = Sync::Chip;
    let r = enumerate_exact(&cfg, &pulse).unwrap();
    // overall (bit-averaged) variance: E[a^2] since the unconditional mean
    // is zero by bit symmetry; the enumeration conditions on b = +1 so add
    // the conditional mean back
    let overall = r.mai_var_given_bit + r.mai_mean_given_bit * r.mai_mean_given_bit;
    // sigma2_mai_chip is in correlator-output units; a is normalized by
    // sqrt(E/N_f), so multiply by N_f/E
    let chip_var = sigma2_mai_chip(&cfg, &m).unwrap() * 2.0;
    println!(
        "uncoded chip-sync 2x2: overall var = {:.9e}, closed form = {:.9e}, gap = {:+.2e}",
        overall,
        chip_var,
        overall - chip_var
    );
    assert!((overall - chip_var).abs() / chip_var < 0.25);
}

#[test]
fn sampled_conditional_mean_matches_enumeration() {
    // N_c = 2, N_f = 2, uncoded symbol-sync: the Monte Carlo conditional MAI
    // mean must agree with exhaustive enumeration
    let pulse = PulseModel::default_uwb();
    let cfg = SystemConfig {
        total_gain: 4,
        frames_per_symbol: 2,
        chips_per_frame: 2,
        num_users: 2,
        desired_energy: 1.0,
        interferer_energies: vec![1.0],
        noise_psd: 0.0,
        coding: Coding::Uncoded,
        sync: Sync::Symbol,
        tx_jitter: JitterSpec::None,
    };
    let exact = enumerate_exact(&cfg, &pulse).unwrap();
    let (_, _, mai_b) = sample_awgn_components(&cfg, 200_000, 31);
    let scale = (2.0f64).sqrt();
    let ab: Vec<f64> = mai_b.iter().map(|&x| x * scale).collect();
    let (mean, se) = mean_se_blocked(&ab);
    assert_within("conditional MAI mean vs enumeration", exact.mai_mean_given_bit, mean, se);
}

#[test]
fn exact_bep_brackets_the_gaussian_approximation() {
    // two-user uncoded symbol-sync at desk scale: report the gap between the
    // exact enumerated BEP and the Gaussian-approximation closed form
    let pulse = PulseModel::default_uwb();
    let m = compute_moments(&JitterSpec::None, &pulse).unwrap();
    let cfg = SystemConfig {
        total_gain: 8,
        frames_per_symbol: 2,
        chips_per_frame: 4,
        num_users: 2,
        desired_energy: 1.0,
        interferer_energies: vec![1.0],
        noise_psd: 0.5,
        coding: Coding::Uncoded,
        sync: Sync::Symbol,
        tx_jitter: JitterSpec::None,
    };
    let exact = enumerate_exact(&cfg, &pulse).unwrap().exact_bep.unwrap();
    let approx = uwb_link::bep::bep_uncoded_two_user(&cfg, &m).unwrap().bep;
    println!("exact BEP = {exact:.6e}, two-user closed form = {approx:.6e}");
    assert!(exact > 0.0 && exact < 0.5);
    assert!((exact - approx).abs() / exact < 0.25, "{exact} vs {approx}");
}

#[test]
fn enumeration_rejects_unsupported_and_oversized_instances() {
    let pulse = PulseModel::default_uwb();
    let mut cfg = awgn_cfg(16, Coding::Coded, Sync::Symbol, JitterSpec::None);
    cfg.num_users = 3;
    cfg.interferer_energies = vec![1.0, 1.0];
    assert!(enumerate_exact(&cfg, &pulse).is_err());

    let mut cfg = awgn_cfg(16, Coding::Coded, Sync::Symbol, JitterSpec::uniform(25e-12));
    assert!(enumerate_exact(&cfg, &pulse).is_err());
    cfg.tx_jitter = JitterSpec::None;
    assert!(matches!(
        enumerate_exact(&cfg, &pulse),
        Err(uwb_link::Error::EnumerationTooLarge(_))
    ));
}

#[test]
fn run_is_deterministic_and_handles_degenerate_energies() {
    let pulse = PulseModel::default_uwb();
    let cfg = awgn_cfg(8, Coding::Coded, Sync::Chip, JitterSpec::uniform(25e-12));
    let plan = TrialPlan::awgn(cfg, pulse, 30_000, 99);
    let a = mc::run(&plan).unwrap();
    let b = mc::run(&plan).unwrap();
    assert_eq!(a.errors, b.errors);
    assert_eq!(a.bep_hat, b.bep_hat);
    assert!(a.errors > 0);

    // E_1 = 0: the decision is pure noise, bep_hat ~ 0.5
    let mut cfg = awgn_cfg(8, Coding::Coded, Sync::Symbol, JitterSpec::None);
    cfg.desired_energy = 0.0;
    let r = mc::run(&TrialPlan::awgn(cfg, pulse, 30_000, 5)).unwrap();
    assert!((r.bep_hat - 0.5).abs() <= 4.0 * r.std_err, "{}", r.bep_hat);

    // noiseless single user: no errors at all
    let mut cfg = awgn_cfg(8, Coding::Coded, Sync::Symbol, JitterSpec::None);
    cfg.num_users = 1;
    cfg.interferer_energies = vec![];
    cfg.noise_psd = 0.0;
    let r = mc::run(&TrialPlan::awgn(cfg, pulse, 20_000, 5)).unwrap();
    assert_eq!(r.errors, 0);
}

#[test]
fn shrinking_jitter_converges_to_zero_jitter_analytic() {
    // many interferers so the Gaussian approximation behind the closed form
    // is accurate; with one interferer its own bias exceeds the Monte Carlo
    // noise floor and the comparison would test the model, not the engine
    let pulse = PulseModel::default_uwb();
    let mut cfg = awgn_cfg(16, Coding::Coded, Sync::Symbol, JitterSpec::uniform(1e-12));
    cfg.num_users = 10;
    cfg.interferer_energies = vec![1.0; 9];
    let m0 = compute_moments(&JitterSpec::None, &pulse).unwrap();
    let mut zero_cfg = cfg.clone();
    zero_cfg.tx_jitter = JitterSpec::None;
    let analytic = bep_coded_awgn(&zero_cfg, &vec![m0; 10]).unwrap().bep;
    let r = mc::run(&TrialPlan::awgn(cfg, pulse, 150_000, 44)).unwrap();
    println!("1 ps jitter MC = {:.4e} (se {:.2e}), zero-jitter analytic = {analytic:.4e}", r.bep_hat, r.std_err);
    assert!((r.bep_hat - analytic).abs() <= 3.0 * r.std_err);
}

#[test]
fn uncoded_symbol_sync_error_rate_dominates_chip_sync() {
    let pulse = PulseModel::default_uwb();
    let jitter = JitterSpec::uniform(25e-12);
    let symbol = mc::run(&TrialPlan::awgn(
        awgn_cfg(16, Coding::Uncoded, Sync::Symbol, jitter),
        pulse,
        200_000,
        77,
    ))
    .unwrap();
    let chip = mc::run(&TrialPlan::awgn(
        awgn_cfg(16, Coding::Uncoded, Sync::Chip, jitter),
        pulse,
        200_000,
        77,
    ))
    .unwrap();
    println!(
        "uncoded MC: symbol = {:.4e}, chip = {:.4e}",
        symbol.bep_hat, chip.bep_hat
    );
    let slack = 2.0 * (symbol.std_err.hypot(chip.std_err));
    assert!(chip.bep_hat <= symbol.bep_hat + slack);
}
