//! Per-symbol randomness: bits, time-hopping codes, polarity codes,
//! jitters, user offsets, and the noise deviate.
//!
//! Each simulated symbol is drawn independently with enough guard frames on
//! both sides that every cross-frame and cross-symbol interference term is
//! physically present: an interferer frame is generated whenever any of its
//! pulse positions can reach a template chip of the current symbol.

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::bep::{Coding, Sync};
use crate::error::Result;
use crate::jitter::TemplateCase;
use crate::mc::rng::{stream, Category};
use crate::mc::TrialPlan;
use crate::pulse::PulseModel;

/// Symbols between redraws of the chip-synchronous user offsets.
pub const OFFSET_BLOCK_SYMBOLS: u64 = 1024;

/// Chips beyond which an AWGN pulse cannot touch a template chip,
/// including one chip of slack for the transmitter jitter.
pub(crate) fn awgn_reach_chips(pulse: &PulseModel) -> i64 {
    (pulse.corr_reach() / pulse.chip_duration()).ceil() as i64 + 1
}

/// Same bound for a multipath channel spanning `chip_span` chips, with
/// slack for transmitter plus template jitter.
pub(crate) fn multipath_reach_chips(pulse: &PulseModel, chip_span: usize) -> i64 {
    (pulse.corr_reach() / pulse.chip_duration()).ceil() as i64 + chip_span as i64 - 1 + 2
}

/// One user's randomness for the frames that can interact with the
/// current symbol's template. Frame indices are relative to the symbol
/// start; index `f` maps to vector slot `f - frame_lo`.
#[derive(Debug, Clone, Default)]
pub struct UserDraw {
    /// Chip offset Delta_2 of this user's stream (0 for the user of
    /// interest and for symbol-synchronous systems).
    pub offset_chips: i64,
    pub frame_lo: i64,
    pub th_codes: Vec<u32>,
    pub polarity: Vec<i8>,
    pub tx_jitter: Vec<f64>,
    /// First symbol index with a drawn bit.
    pub sym_lo: i64,
    pub bits: Vec<i8>,
}

impl UserDraw {
    #[inline]
    pub fn slot(&self, frame: i64) -> usize {
        (frame - self.frame_lo) as usize
    }

    /// Information bit modulating the given frame.
    #[inline]
    pub fn bit_for_frame(&self, frame: i64, frames_per_symbol: i64) -> i8 {
        self.bits[(frame.div_euclid(frames_per_symbol) - self.sym_lo) as usize]
    }
}

/// All randomness of one simulated symbol. `users[0]` is the user of
/// interest; its bit for symbol 0 is the transmitted bit under test.
#[derive(Debug, Clone, Default)]
pub struct SymbolDraw {
    pub users: Vec<UserDraw>,
    /// Template jitter, `frames_per_symbol * num_fingers` entries in frame-major
    /// order; empty in AWGN mode.
    pub template_jitter: Vec<f64>,
    /// Standard normal deviate for the correlator output noise.
    pub noise_z: f64,
}

impl SymbolDraw {
    /// The transmitted bit of the user of interest.
    pub fn desired_bit(&self) -> i8 {
        self.users[0].bits[(-self.users[0].sym_lo) as usize]
    }
}

/// Deterministic generator of [`SymbolDraw`]s for one partition.
pub struct SymbolSampler {
    plan: TrialPlan,
    reach_chips: i64,
    num_fingers: usize,
    bits_rng: ChaCha12Rng,
    codes_rng: ChaCha12Rng,
    polarity_rng: ChaCha12Rng,
    jitter_rng: ChaCha12Rng,
    offsets_rng: ChaCha12Rng,
    template_rng: ChaCha12Rng,
    noise_rng: ChaCha12Rng,
    draw: SymbolDraw,
    block_pos: u64,
}

impl SymbolSampler {
    pub fn new(plan: &TrialPlan, partition: u32) -> Result<Self> {
        plan.validate()?;
        let reach_chips = match &plan.channel {
            Some(ch) => multipath_reach_chips(&plan.pulse, ch.chip_span()),
            None => awgn_reach_chips(&plan.pulse),
        };
        let num_fingers = plan.rake.as_ref().map_or(0, |r| r.num_fingers());
        let seed = plan.seed;
        let p = u64::from(partition);
        let mut draw = SymbolDraw::default();
        draw.users
            .resize_with(plan.cfg.num_users as usize, UserDraw::default);
        Ok(Self {
            plan: plan.clone(),
            reach_chips,
            num_fingers,
            bits_rng: stream(seed, p, Category::Bits),
            codes_rng: stream(seed, p, Category::ThCodes),
            polarity_rng: stream(seed, p, Category::Polarity),
            jitter_rng: stream(seed, p, Category::TxJitter),
            offsets_rng: stream(seed, p, Category::Offsets),
            template_rng: stream(seed, p, Category::TemplateJitter),
            noise_rng: stream(seed, p, Category::Noise),
            draw,
            block_pos: 0,
        })
    }

    /// Draw the next symbol's randomness. The returned reference stays
    /// valid until the next call.
    pub fn next_draw(&mut self) -> &SymbolDraw {
        if self.block_pos % OFFSET_BLOCK_SYMBOLS == 0 {
            self.redraw_offsets();
        }
        self.block_pos += 1;

        let cfg = &self.plan.cfg;
        let n = i64::from(cfg.total_gain);
        let n_f = i64::from(cfg.frames_per_symbol);
        let n_c = i64::from(cfg.chips_per_frame);
        let coded = cfg.coding == Coding::Coded;
        let reach = self.reach_chips;

        for user in &mut self.draw.users {
            // frames whose pulses can reach a template chip in [0, N - 1]
            let off = user.offset_chips;
            let frame_lo = (-reach - off - (n_c - 1)).div_euclid(n_c);
            let frame_hi = (n - 1 + reach - off).div_euclid(n_c);
            let frames = (frame_hi - frame_lo + 1) as usize;
            user.frame_lo = frame_lo;
            user.sym_lo = frame_lo.div_euclid(n_f);
            let sym_hi = frame_hi.div_euclid(n_f);
            let syms = (sym_hi - user.sym_lo + 1) as usize;

            user.bits.clear();
            user.bits
                .extend((0..syms).map(|_| if self.bits_rng.gen::<bool>() { 1i8 } else { -1 }));
            user.th_codes.clear();
            user.th_codes
                .extend((0..frames).map(|_| self.codes_rng.gen_range(0..n_c as u32)));
            user.polarity.clear();
            if coded {
                user.polarity.extend(
                    (0..frames).map(|_| if self.polarity_rng.gen::<bool>() { 1i8 } else { -1 }),
                );
            } else {
                user.polarity.extend(std::iter::repeat(1i8).take(frames));
            }
            user.tx_jitter.clear();
            user.tx_jitter
                .extend((0..frames).map(|_| cfg.tx_jitter.sample(&mut self.jitter_rng)));
        }

        self.draw.template_jitter.clear();
        if let Some(case) = &self.plan.template_case {
            let l = self.num_fingers;
            let total = cfg.frames_per_symbol as usize * l;
            match case.case_id {
                TemplateCase::Case1 => {
                    self.draw
                        .template_jitter
                        .extend((0..total).map(|_| case.spec.sample(&mut self.template_rng)));
                }
                TemplateCase::Case2 => {
                    for _ in 0..cfg.frames_per_symbol {
                        let v = case.spec.sample(&mut self.template_rng);
                        self.draw
                            .template_jitter
                            .extend(std::iter::repeat(v).take(l));
                    }
                }
                TemplateCase::Case3 => {
                    let per_finger: Vec<f64> = (0..l)
                        .map(|_| case.spec.sample(&mut self.template_rng))
                        .collect();
                    for _ in 0..cfg.frames_per_symbol {
                        self.draw.template_jitter.extend_from_slice(&per_finger);
                    }
                }
            }
        }

        self.draw.noise_z = Distribution::<f64>::sample(&StandardNormal, &mut self.noise_rng);
        &self.draw
    }

    pub fn draw(&self) -> &SymbolDraw {
        &self.draw
    }

    fn redraw_offsets(&mut self) {
        let cfg = &self.plan.cfg;
        let chip_sync = cfg.sync == Sync::Chip;
        let n = i64::from(cfg.total_gain);
        for (k, user) in self.draw.users.iter_mut().enumerate() {
            user.offset_chips = if k > 0 && chip_sync {
                self.offsets_rng.gen_range(0..n)
            } else {
                0
            };
        }
    }
}
