//! Joint jitter expectations of the channel/template cross-correlation,
//! feeding the coded multipath BEP formula: the mean and variance of
//! phi_uv at the desired lag, the IFI variance sum, and the per-interferer
//! MAI variance sum.
//!
//! All expectations run over the transmitter jitter and the template jitter
//! jointly. The template-jitter sharing structure matters: with one draw per
//! (frame, finger) the fingers decorrelate, while one draw per frame keeps
//! all fingers of a frame moving together.

use crate::error::{Error, Result};
use crate::jitter::{JitterSpec, TemplateCase, TemplateJitterCase};
use crate::pulse::{MultipathChannel, PulseModel, RakeWeights};

/// Node count per smooth sub-interval for the nested quadratures here.
/// The integrands are analytic over the (tens of picoseconds wide) jitter
/// support, so this is far past convergence while keeping the 2-D and 3-D
/// nested integrals cheap.
const NESTED_NODES: usize = 64;

/// The four scalar functionals of the multipath BEP denominator plus the
/// mean template energy per frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultipathExpectations {
    pub case: TemplateCase,
    /// E{phi_uv(eps)} — mean desired-signal correlation per frame.
    pub mean_phi: f64,
    /// Var{phi_uv(eps)} over transmitter and template jitter.
    pub var_phi: f64,
    /// sum_{j=1..M} j E{[phi_uv(jT_c + eps) + phi_uv(-jT_c + eps')]^2}.
    pub sigma2_ifi: f64,
    /// Cross-covariance component of `sigma2_ifi`:
    /// sum_{j=1..M} j E{phi_uv(jT_c + eps) phi_uv(-jT_c + eps')}.
    ///
    /// `sigma2_ifi` counts every adjacent-frame covariance twice, which is
    /// exact only in the infinite-stream limit; over one symbol the first
    /// and last frames have no same-symbol partner, so the exact per-symbol
    /// IFI variance is (sigma2_ifi - (2/N_f) ifi_cross) E_1 / N_c^2.
    pub ifi_cross: f64,
    /// sum_{j=-M..M} E{[phi_uv(jT_c + eps)]^2}.
    pub sigma2_mai: f64,
    /// Mean energy of one template frame under template jitter.
    pub mean_template_energy: f64,
}

/// Evaluate all multipath expectations by nested Gauss-Legendre quadrature.
///
/// Only the per-(frame, finger) and per-frame template-jitter structures
/// admit closed-form expectations; the per-finger-shared-across-frames
/// structure is Monte Carlo only.
pub fn multipath_expectations(
    tx_jitter: &JitterSpec,
    pulse: &PulseModel,
    channel: &MultipathChannel,
    rake: &RakeWeights,
    template: &TemplateJitterCase,
) -> Result<MultipathExpectations> {
    if template.case_id == TemplateCase::Case3 {
        return Err(Error::Case3Analytic);
    }
    tx_jitter.validate(pulse.chip_duration())?;
    template.spec.validate(pulse.chip_duration())?;
    if rake.num_fingers() != channel.num_paths() {
        return Err(Error::FingerMismatch {
            expected: channel.num_paths(),
            got: rake.num_fingers(),
        });
    }

    let ctx = Ctx {
        pulse,
        channel,
        rake,
        tx_nodes: tx_jitter.weighted_nodes(NESTED_NODES),
        tpl_nodes: template.spec.weighted_nodes(NESTED_NODES),
        per_finger: template.case_id == TemplateCase::Case1,
    };
    let tc = pulse.chip_duration();
    let m_span = channel.chip_span();

    let mean_phi = ctx.expect_single(0.0);
    let var_phi = (ctx.expect_pair(0.0, 0.0, true) - mean_phi * mean_phi).max(0.0);

    let mut sigma2_mai = 0.0;
    for j in -(m_span as i64)..=(m_span as i64) {
        let d = j as f64 * tc;
        sigma2_mai += ctx.expect_pair(d, d, true);
    }

    let mut sigma2_ifi = 0.0;
    let mut ifi_cross = 0.0;
    for j in 1..=m_span as i64 {
        let d = j as f64 * tc;
        // E{[phi(jTc + eps) + phi(-jTc + eps')]^2} with independent
        // transmitter jitters but a shared template frame
        let cross = ctx.expect_pair(d, -d, false);
        let term =
            ctx.expect_pair(d, d, true) + ctx.expect_pair(-d, -d, true) + 2.0 * cross;
        sigma2_ifi += j as f64 * term;
        ifi_cross += j as f64 * cross;
    }

    Ok(MultipathExpectations {
        case: template.case_id,
        mean_phi,
        var_phi,
        sigma2_ifi,
        ifi_cross,
        sigma2_mai,
        mean_template_energy: ctx.mean_template_energy(),
    })
}

struct Ctx<'a> {
    pulse: &'a PulseModel,
    channel: &'a MultipathChannel,
    rake: &'a RakeWeights,
    tx_nodes: Vec<(f64, f64)>,
    tpl_nodes: Vec<(f64, f64)>,
    /// true: one template-jitter draw per finger; false: one per frame.
    per_finger: bool,
}

impl Ctx<'_> {
    /// Channel response seen by finger p: sum_l alpha_l R(tau_p + v - tau_l - delta).
    fn g(&self, p: usize, delta: f64, v: f64) -> f64 {
        let base = self.channel.delays()[p] + v - delta;
        let mut acc = 0.0;
        for (&alpha, &tau_l) in self.channel.gains().iter().zip(self.channel.delays()) {
            acc += alpha * self.pulse.autocorr(base - tau_l);
        }
        acc
    }

    /// phi_uv(delta) with one shared template jitter v for all fingers.
    fn phi_shared(&self, delta: f64, v: f64) -> f64 {
        self.rake
            .weights()
            .iter()
            .enumerate()
            .map(|(p, &beta)| beta * self.g(p, delta, v))
            .sum()
    }

    /// E{phi_uv(d + eps)} — identical for both sharing structures.
    fn expect_single(&self, d: f64) -> f64 {
        let mut acc = 0.0;
        for &(e, we) in &self.tx_nodes {
            for &(v, wv) in &self.tpl_nodes {
                acc += we * wv * self.phi_shared(d + e, v);
            }
        }
        acc
    }

    /// E{phi_uv(d1 + eps1) phi_uv(d2 + eps2)} where both factors share the
    /// template frame. `same_tx` selects eps1 = eps2 versus independent
    /// transmitter jitters.
    fn expect_pair(&self, d1: f64, d2: f64, same_tx: bool) -> f64 {
        match (self.per_finger, same_tx) {
            (false, true) => {
                // shared scalar template jitter, shared tx jitter
                let mut acc = 0.0;
                for &(e, we) in &self.tx_nodes {
                    for &(v, wv) in &self.tpl_nodes {
                        acc += we * wv * self.phi_shared(d1 + e, v) * self.phi_shared(d2 + e, v);
                    }
                }
                acc
            }
            (false, false) => {
                // tx jitters integrate out independently given v
                let mut acc = 0.0;
                for &(v, wv) in &self.tpl_nodes {
                    let mut a = 0.0;
                    let mut b = 0.0;
                    for &(e, we) in &self.tx_nodes {
                        a += we * self.phi_shared(d1 + e, v);
                        b += we * self.phi_shared(d2 + e, v);
                    }
                    acc += wv * a * b;
                }
                acc
            }
            (true, true) => {
                // independent template jitter per finger: cross-finger terms
                // factor through per-finger means; diagonal terms keep the
                // joint second moment
                let betas = self.rake.weights();
                let mut acc = 0.0;
                for &(e, we) in &self.tx_nodes {
                    let mut sum1 = 0.0;
                    let mut sum2 = 0.0;
                    let mut diag = 0.0;
                    for (p, &beta) in betas.iter().enumerate() {
                        let mut m1 = 0.0;
                        let mut m2 = 0.0;
                        let mut m12 = 0.0;
                        for &(v, wv) in &self.tpl_nodes {
                            let g1 = self.g(p, d1 + e, v);
                            let g2 = self.g(p, d2 + e, v);
                            m1 += wv * g1;
                            m2 += wv * g2;
                            m12 += wv * g1 * g2;
                        }
                        sum1 += beta * m1;
                        sum2 += beta * m2;
                        diag += beta * beta * (m12 - m1 * m2);
                    }
                    acc += we * (sum1 * sum2 + diag);
                }
                acc
            }
            (true, false) => {
                // both jitter sources differ across fingers and factors;
                // only the shared per-finger template draw couples them
                let betas = self.rake.weights();
                let mut sum_a = 0.0;
                let mut sum_b = 0.0;
                let mut diag = 0.0;
                for (p, &beta) in betas.iter().enumerate() {
                    let mut ea = 0.0;
                    let mut eb = 0.0;
                    let mut eab = 0.0;
                    for &(v, wv) in &self.tpl_nodes {
                        let mut a = 0.0;
                        let mut b = 0.0;
                        for &(e, we) in &self.tx_nodes {
                            a += we * self.g(p, d1 + e, v);
                            b += we * self.g(p, d2 + e, v);
                        }
                        ea += wv * a;
                        eb += wv * b;
                        eab += wv * a * b;
                    }
                    sum_a += beta * ea;
                    sum_b += beta * eb;
                    diag += beta * beta * (eab - ea * eb);
                }
                sum_a * sum_b + diag
            }
        }
    }

    /// E{int v_j^2}: exact template energy when all fingers share one jitter
    /// draw (the shift cancels pairwise); a double expectation otherwise.
    fn mean_template_energy(&self) -> f64 {
        if !self.per_finger {
            return self.rake.template_energy();
        }
        let betas = self.rake.weights();
        let delays = self.channel.delays();
        let mut acc = 0.0;
        for (p, &bp) in betas.iter().enumerate() {
            for (q, &bq) in betas.iter().enumerate() {
                if p == q {
                    acc += bp * bp;
                    continue;
                }
                let mut e = 0.0;
                for &(v, wv) in &self.tpl_nodes {
                    for &(u, wu) in &self.tpl_nodes {
                        e += wv * wu * self.pulse.autocorr(delays[p] + v - delays[q] - u);
                    }
                }
                acc += bp * bq * e;
            }
        }
        acc
    }
}
