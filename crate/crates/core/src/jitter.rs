//! Timing-jitter distributions and the jitter-moment functionals that
//! parameterize the closed-form BEP expressions.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::pulse::PulseModel;
use crate::quad;

/// Default Gaussian truncation rule: +-min(3.999 sigma, 0.999 T_c).
///
/// The jitter model requires max|eps| < T_c; an untruncated Gaussian
/// violates that, so the tails are clipped and the density renormalized.
pub fn default_gaussian_truncation(std: f64, chip_duration: f64) -> f64 {
    (3.999 * std).min(0.999 * chip_duration)
}

/// Jitter distribution family. All families here are zero-mean.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum JitterSpec {
    /// No jitter: a point mass at zero.
    None,
    /// Uniform on [-half_width, half_width].
    Uniform { half_width: f64 },
    /// Zero-mean Gaussian with the given std, truncated to
    /// [-truncation, truncation] and renormalized.
    TruncatedGaussian { std: f64, truncation: f64 },
}

impl JitterSpec {
    pub fn uniform(half_width: f64) -> Self {
        Self::Uniform { half_width }
    }

    /// Truncated Gaussian with the default truncation rule.
    pub fn truncated_gaussian(std: f64, chip_duration: f64) -> Self {
        Self::TruncatedGaussian {
            std,
            truncation: default_gaussian_truncation(std, chip_duration),
        }
    }

    /// Half-width of the support.
    pub fn support(&self) -> f64 {
        match *self {
            Self::None => 0.0,
            Self::Uniform { half_width } => half_width,
            Self::TruncatedGaussian { truncation, .. } => truncation,
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, Self::None)
    }

    pub fn validate(&self, chip_duration: f64) -> Result<()> {
        match *self {
            Self::None => Ok(()),
            Self::Uniform { half_width } => {
                if !(half_width > 0.0) || !half_width.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "uniform jitter half-width must be positive, got {half_width}"
                    )));
                }
                check_support(half_width, chip_duration)
            }
            Self::TruncatedGaussian { std, truncation } => {
                if !(std > 0.0) || !std.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "gaussian jitter std must be positive, got {std}"
                    )));
                }
                if !(truncation > 0.0) || !truncation.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "gaussian truncation must be positive, got {truncation}"
                    )));
                }
                check_support(truncation, chip_duration)
            }
        }
    }

    /// Probability-weighted quadrature nodes for E{f(eps)}, split at zero.
    /// Weights sum to 1 (up to quadrature rounding).
    pub(crate) fn weighted_nodes(&self, n: usize) -> Vec<(f64, f64)> {
        match *self {
            Self::None => vec![(0.0, 1.0)],
            _ => {
                let mut out = self.half_nodes(n, false);
                out.extend(self.half_nodes(n, true));
                out
            }
        }
    }

    /// Nodes over one side of the support: [-support, 0] or [0, support].
    /// For the degenerate family the half carries probability 1/2 at zero,
    /// the limit of any symmetric family with shrinking support.
    pub(crate) fn half_nodes(&self, n: usize, upper: bool) -> Vec<(f64, f64)> {
        let support = self.support();
        let (a, b) = if upper { (0.0, support) } else { (-support, 0.0) };
        match *self {
            Self::None => vec![(0.0, 0.5)],
            Self::Uniform { half_width } => {
                let density = 1.0 / (2.0 * half_width);
                scaled_rule(a, b, n)
                    .into_iter()
                    .map(|(x, w)| (x, w * density))
                    .collect()
            }
            Self::TruncatedGaussian { std, truncation } => {
                let z = libm::erf(truncation / (std * std::f64::consts::SQRT_2));
                let norm = 1.0 / (std * (2.0 * std::f64::consts::PI).sqrt() * z);
                scaled_rule(a, b, n)
                    .into_iter()
                    .map(|(x, w)| (x, w * norm * (-x * x / (2.0 * std * std)).exp()))
                    .collect()
            }
        }
    }

    /// E{f(eps)} by fixed-order quadrature.
    pub(crate) fn expect<F: FnMut(f64) -> f64>(&self, n: usize, mut f: F) -> f64 {
        self.weighted_nodes(n)
            .into_iter()
            .map(|(x, w)| w * f(x))
            .sum()
    }

    /// Draw one jitter value.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::None => 0.0,
            Self::Uniform { half_width } => rng.gen_range(-half_width..=half_width),
            Self::TruncatedGaussian { std, truncation } => loop {
                let z: f64 = StandardNormal.sample(rng);
                let v = z * std;
                if v.abs() <= truncation {
                    return v;
                }
            },
        }
    }
}

fn check_support(support: f64, chip_duration: f64) -> Result<()> {
    if support >= chip_duration {
        Err(Error::JitterSupport {
            support,
            chip: chip_duration,
        })
    } else {
        Ok(())
    }
}

fn scaled_rule(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let rule = quad::gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    rule.iter()
        .map(|&(x, w)| (mid + half * x, w * half))
        .collect()
}

/// The six jitter functionals of the AWGN analysis:
/// mu = E{phi_w(eps)}, var = Var{phi_w(eps)}, and gamma/beta parameters
/// built from phi_w evaluated at eps and at T_c - |eps|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JitterMoments {
    pub mu: f64,
    pub var: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub beta1: f64,
    pub beta2: f64,
}

/// Evaluate all six moments with the default 128-node rule.
pub fn compute_moments(spec: &JitterSpec, pulse: &PulseModel) -> Result<JitterMoments> {
    compute_moments_with_nodes(spec, pulse, quad::DEFAULT_NODES)
}

/// Same as [`compute_moments`] with an explicit node count per smooth
/// sub-interval; used by the quadrature convergence checks.
pub fn compute_moments_with_nodes(
    spec: &JitterSpec,
    pulse: &PulseModel,
    n: usize,
) -> Result<JitterMoments> {
    spec.validate(pulse.chip_duration())?;
    let tc = pulse.chip_duration();

    let mu = spec.expect(n, |e| pulse.autocorr(e));
    let m2 = spec.expect(n, |e| {
        let r = pulse.autocorr(e);
        r * r
    });
    let var = (m2 - mu * mu).max(0.0);

    let e_edge = spec.expect(n, |e| pulse.autocorr(tc - e.abs()));
    let e_edge2 = spec.expect(n, |e| {
        let r = pulse.autocorr(tc - e.abs());
        r * r
    });
    let cross = spec.expect(n, |e| pulse.autocorr(tc - e.abs()) * pulse.autocorr(e));

    // The two one-sided integrals inside beta1 are evaluated separately and
    // then multiplied.
    let lower: f64 = spec
        .half_nodes(n, false)
        .into_iter()
        .map(|(e, w)| w * pulse.autocorr(tc + e))
        .sum();
    let upper: f64 = spec
        .half_nodes(n, true)
        .into_iter()
        .map(|(e, w)| w * pulse.autocorr(tc - e))
        .sum();

    Ok(JitterMoments {
        mu,
        var,
        gamma1: mu + e_edge,
        gamma2: m2 + e_edge2,
        beta1: 2.0 * cross - 2.0 * e_edge * e_edge + 4.0 * lower * upper,
        beta2: 2.0 * e_edge * e_edge,
    })
}

/// Template-jitter sharing structure across the Rake fingers and frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplateCase {
    /// i.i.d. over all (frame, finger) pairs.
    Case1,
    /// One value per frame shared by all fingers; i.i.d. across frames.
    Case2,
    /// One value per finger shared by all frames; i.i.d. across fingers.
    /// No closed form; Monte Carlo only.
    Case3,
}

/// Jitter at the Rake template: distribution plus sharing structure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemplateJitterCase {
    pub case_id: TemplateCase,
    pub spec: JitterSpec,
}

impl TemplateJitterCase {
    pub fn new(case_id: TemplateCase, spec: JitterSpec) -> Self {
        Self { case_id, spec }
    }

    pub fn zero() -> Self {
        Self {
            case_id: TemplateCase::Case1,
            spec: JitterSpec::None,
        }
    }
}
