//! Tikhonov (von Mises) distributions, mixtures of them, circular moments,
//! the optimal single-component collapse (CMVM) and closed-form KL
//! divergences between components.
//!
//! A Tikhonov pdf on `[0, 2pi)` is
//!
//! ```text
//! t(theta) = exp(Re[z e^{-j theta}]) / (2 pi I0(|z|))
//! ```
//!
//! parameterized by one complex number `z = kappa e^{j mu}`. `kappa = 0` is
//! the uniform circular distribution and every formula here degrades
//! gracefully to it.

use num_complex::Complex64;

use crate::bessel::{self, BesselMode};
use crate::counters;
use crate::math::{log_sum_exp, wrap_2pi, wrap_pi};

/// Concentration cap. Beyond this the pdf is numerically a point mass and the
/// asymptotic Bessel forms start losing the correction terms anyway.
pub const KAPPA_MAX: f64 = 1e6;

/// Tikhonov distribution parameter: a single complex number `z` whose
/// magnitude is the concentration and whose angle is the circular mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TikhonovParam {
    z: Complex64,
}

impl TikhonovParam {
    /// Wrap a complex parameter. Panics on non-finite input; magnitudes above
    /// [`KAPPA_MAX`] are clamped.
    pub fn new(z: Complex64) -> Self {
        assert!(z.re.is_finite() && z.im.is_finite(), "non-finite Tikhonov parameter");
        let n = z.norm();
        if n > KAPPA_MAX {
            Self { z: z * (KAPPA_MAX / n) }
        } else {
            Self { z }
        }
    }

    /// Concentration `kappa` and mean `mu` form.
    pub fn from_polar(kappa: f64, mu: f64) -> Self {
        assert!(kappa >= 0.0 && kappa.is_finite(), "invalid concentration {kappa}");
        Self::new(Complex64::from_polar(kappa.min(KAPPA_MAX), mu))
    }

    /// The uniform circular distribution (`kappa = 0`).
    pub fn uniform() -> Self {
        Self { z: Complex64::new(0.0, 0.0) }
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    /// Concentration `kappa = |z|`.
    pub fn kappa(&self) -> f64 {
        self.z.norm()
    }

    /// Circular mean in `[0, 2pi)`. Zero for the uniform distribution.
    pub fn mean(&self) -> f64 {
        if self.kappa() == 0.0 {
            0.0
        } else {
            wrap_2pi(self.z.arg())
        }
    }

    /// Log pdf at `theta`, exact Bessel normalization.
    pub fn log_pdf(&self, theta: f64) -> f64 {
        let k = self.kappa();
        k * (theta - self.z.arg()).cos()
            - bessel::log_i0(k)
            - core::f64::consts::TAU.ln()
    }
}

/// First circular moment `m = E[e^{j theta}]` of a circular distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircularMoment {
    m: Complex64,
}

impl CircularMoment {
    pub fn new(m: Complex64) -> Self {
        Self { m }
    }

    pub fn as_complex(&self) -> Complex64 {
        self.m
    }

    /// Mean resultant length `|m|`, in `[0, 1]` up to rounding.
    pub fn resultant(&self) -> f64 {
        self.m.norm()
    }

    /// Circular mean angle in `[0, 2pi)`.
    pub fn mean(&self) -> f64 {
        wrap_2pi(self.m.arg())
    }

    /// Circular variance `1 - |m|`.
    pub fn variance(&self) -> f64 {
        1.0 - self.resultant()
    }
}

/// One weighted mixture component. Weights are stored in the log domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Component {
    pub log_weight: f64,
    pub param: TikhonovParam,
}

/// A Tikhonov mixture: the canonical message form of the receiver.
///
/// A mixture is *normalized* when the logsumexp of its weights is zero.
/// Operations that require a normalized input say so and panic otherwise;
/// builders that produce unnormalized weights return them as-is so callers
/// can renormalize in one pass.
#[derive(Debug, Clone, PartialEq)]
pub struct TikhonovMixture {
    components: Vec<Component>,
}

const NORM_TOL: f64 = 1e-9;

impl TikhonovMixture {
    /// Build from components. Panics on an empty component list.
    pub fn new(components: Vec<Component>) -> Self {
        assert!(!components.is_empty(), "empty Tikhonov mixture");
        Self { components }
    }

    /// Single-component mixture with unit weight.
    pub fn singleton(param: TikhonovParam) -> Self {
        Self::new(vec![Component { log_weight: 0.0, param }])
    }

    /// The uniform distribution as an order-1 mixture (`kappa = 0`).
    pub fn uniform() -> Self {
        Self::singleton(TikhonovParam::uniform())
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn order(&self) -> usize {
        self.components.len()
    }

    /// Logsumexp of the weights; zero for a normalized mixture.
    pub fn log_total_weight(&self) -> f64 {
        let lw: Vec<f64> = self.components.iter().map(|c| c.log_weight).collect();
        log_sum_exp(&lw)
    }

    pub fn is_normalized(&self) -> bool {
        self.log_total_weight().abs() <= NORM_TOL
    }

    /// Shift all weights so the mixture is normalized. Panics if the total
    /// weight is zero (all weights `-inf`).
    pub fn normalized(mut self) -> Self {
        let total = self.log_total_weight();
        assert!(
            total > f64::NEG_INFINITY,
            "cannot normalize a zero-weight mixture"
        );
        for c in &mut self.components {
            c.log_weight -= total;
        }
        self
    }

    /// Log pdf of the mixture at `theta`.
    pub fn log_pdf(&self, theta: f64) -> f64 {
        let terms: Vec<f64> = self
            .components
            .iter()
            .map(|c| c.log_weight + c.param.log_pdf(theta))
            .collect();
        log_sum_exp(&terms)
    }

    fn assert_normalized(&self, what: &str) {
        assert!(
            self.is_normalized(),
            "{what} requires a normalized mixture (log total weight = {})",
            self.log_total_weight()
        );
    }
}

/// First circular moment of a normalized Tikhonov mixture:
/// `sum_l alpha_l (I1/I0)(|z_l|) e^{j arg z_l}`.
pub fn circular_moment(mix: &TikhonovMixture) -> CircularMoment {
    mix.assert_normalized("circular_moment");
    moment_with_mode(mix, BesselMode::Exact)
}

fn moment_with_mode(mix: &TikhonovMixture, mode: BesselMode) -> CircularMoment {
    let mut m = Complex64::new(0.0, 0.0);
    for c in mix.components() {
        let k = c.param.kappa();
        if k == 0.0 {
            continue; // uniform component contributes nothing
        }
        let r = match mode {
            BesselMode::Exact => bessel::i1_i0_ratio(k),
            BesselMode::Approx => bessel::ratio_approx(k),
        };
        let w = c.log_weight.exp();
        m += c.param.z() * (w * r / k);
    }
    CircularMoment::new(m)
}

/// Concentration recovery used by [`cmvm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CmvmMode {
    /// Moments via exact Bessel ratios; concentration by numeric inversion of
    /// `I1/I0` (bisection to 1e-10).
    #[default]
    Exact,
    /// Ratios as `1 - 1/(2 kappa)`; concentration from
    /// `1/(2 kappa_hat) = 1 - |m|` (circular variance matching).
    Approx,
    /// As `Approx` but with the further small-spread simplification
    /// `1/kappa_hat = sum_l alpha_l / |z_l|`.
    ApproxGaussian,
}

/// Collapse a normalized mixture to the single Tikhonov distribution closest
/// in KL divergence: match the circular mean and variance.
///
/// Degenerate cases: zero resultant yields the uniform distribution; a
/// resultant implying a concentration above [`KAPPA_MAX`] saturates there.
pub fn cmvm(mix: &TikhonovMixture, mode: CmvmMode) -> TikhonovParam {
    mix.assert_normalized("cmvm");
    counters::cmvm_collapse(mix.order());
    let bessel_mode = match mode {
        CmvmMode::Exact => BesselMode::Exact,
        _ => BesselMode::Approx,
    };
    let m = moment_with_mode(mix, bessel_mode);
    let r = m.resultant();
    // Resultants at rounding scale are symmetric cancellations: uniform.
    if r <= 1e-14 {
        return TikhonovParam::uniform();
    }
    let mu = m.mean();
    let kappa = match mode {
        CmvmMode::Exact => bessel::inv_ratio(r.min(1.0), KAPPA_MAX),
        CmvmMode::Approx => {
            if r >= 1.0 {
                KAPPA_MAX
            } else {
                (0.5 / (1.0 - r)).min(KAPPA_MAX)
            }
        }
        CmvmMode::ApproxGaussian => {
            let mut inv = 0.0;
            for c in mix.components() {
                let k = c.param.kappa();
                if k == 0.0 {
                    return TikhonovParam::uniform();
                }
                inv += c.log_weight.exp() / k;
            }
            if inv <= 1.0 / KAPPA_MAX {
                KAPPA_MAX
            } else {
                1.0 / inv
            }
        }
    };
    TikhonovParam::from_polar(kappa, mu)
}

/// KL divergence evaluation mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KlMode {
    /// Closed form with exact Bessel evaluations (the form itself is exact).
    #[default]
    Exact,
    /// Same form with third-order large-argument Bessel expansions; relative
    /// error below 2% once both concentrations exceed 5. Falls back to exact
    /// below the validity edge.
    Approx,
    /// `|z_b| (1 - cos(angle_a - angle_b))`: the one-line screening form.
    Coarse,
}

/// KL divergence `D(a || b)` in nats between two Tikhonov distributions.
///
/// Exact form: `log(I0(k_b)/I0(k_a)) + (I1/I0)(k_a) (k_a - k_b cos d)` with
/// `d` the angle between the parameters.
pub fn kl_tikhonov(a: &TikhonovParam, b: &TikhonovParam, mode: KlMode) -> f64 {
    let ka = a.kappa();
    let kb = b.kappa();
    // Angle difference; for a uniform side the angle is immaterial because it
    // only enters multiplied by the zero concentration.
    let cos_d = if ka == 0.0 || kb == 0.0 {
        1.0
    } else {
        wrap_pi(a.z().arg() - b.z().arg()).cos()
    };
    match mode {
        KlMode::Exact => {
            counters::kl_eval(KlMode::Exact);
            bessel::log_i0(kb) - bessel::log_i0(ka) + bessel::i1_i0_ratio(ka) * (ka - kb * cos_d)
        }
        KlMode::Approx => {
            counters::kl_eval(KlMode::Approx);
            log_i0_3rd(kb) - log_i0_3rd(ka) + ratio_3rd(ka) * (ka - kb * cos_d)
        }
        KlMode::Coarse => {
            counters::kl_eval(KlMode::Coarse);
            kb * (1.0 - cos_d)
        }
    }
}

/// Validity edge below which the third-order expansions hand off to the exact
/// evaluations (they would diverge toward zero argument).
const APPROX_KL_CUTOFF: f64 = 4.0;

fn log_i0_3rd(k: f64) -> f64 {
    if k < APPROX_KL_CUTOFF {
        return bessel::log_i0(k);
    }
    k - 0.5 * (core::f64::consts::TAU * k).ln() + 1.0 / (8.0 * k) + 1.0 / (16.0 * k * k)
        + 25.0 / (384.0 * k * k * k)
}

fn ratio_3rd(k: f64) -> f64 {
    if k < APPROX_KL_CUTOFF {
        return bessel::i1_i0_ratio(k);
    }
    let k2 = k * k;
    1.0 - 1.0 / (2.0 * k) - 1.0 / (8.0 * k2) - 1.0 / (8.0 * k2 * k) - 25.0 / (128.0 * k2 * k2)
}
