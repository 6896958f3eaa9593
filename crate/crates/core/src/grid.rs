//! Dense circular pdfs on a uniform grid over `[0, 2pi)`.
//!
//! This is the numerical oracle used by the test and validation suites for
//! integrals with no closed form (mixture KL divergences, entropies,
//! convolutions). On a periodic uniform grid the trapezoidal rule coincides
//! with the Riemann sum and is spectrally accurate for the smooth densities
//! handled here.

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::math::wrap_pi;
use crate::tikhonov::TikhonovMixture;

/// Default grid size: comfortably more than ten samples per pdf standard
/// deviation up to concentrations around 1e3.
pub const DEFAULT_GRID: usize = 1 << 14;

/// A nonnegative density sampled on `theta_i = 2 pi i / n`, normalized so
/// `sum(values) * (2 pi / n) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPdf {
    values: Vec<f64>,
}

impl GridPdf {
    /// Sample a raw (possibly unnormalized) nonnegative function and
    /// normalize it.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Self {
        assert!(n >= 8, "grid too small");
        let values: Vec<f64> = (0..n).map(|i| f(TAU * i as f64 / n as f64)).collect();
        let mut pdf = Self { values };
        pdf.normalize();
        pdf
    }

    /// Wrap raw samples (one per grid point) and normalize.
    pub fn from_values(values: Vec<f64>) -> Self {
        assert!(values.len() >= 8, "grid too small");
        let mut pdf = Self { values };
        pdf.normalize();
        pdf
    }

    /// Sample a log-density stably (max-shifted before exponentiation).
    pub fn from_log_fn(n: usize, f: impl Fn(f64) -> f64) -> Self {
        assert!(n >= 8, "grid too small");
        let logs: Vec<f64> = (0..n).map(|i| f(TAU * i as f64 / n as f64)).collect();
        let hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!(hi > f64::NEG_INFINITY, "log-density is -inf everywhere");
        let values = logs.iter().map(|&l| (l - hi).exp()).collect();
        let mut pdf = Self { values };
        pdf.normalize();
        pdf
    }

    /// Sample a normalized Tikhonov mixture.
    pub fn from_mixture(n: usize, mix: &TikhonovMixture) -> Self {
        Self::from_log_fn(n, |theta| mix.log_pdf(theta))
    }

    /// The uniform density.
    pub fn uniform(n: usize) -> Self {
        Self {
            values: vec![1.0 / TAU; n],
        }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn theta(&self, i: usize) -> f64 {
        TAU * i as f64 / self.n() as f64
    }

    fn dtheta(&self) -> f64 {
        TAU / self.n() as f64
    }

    /// Rescale so the density integrates to one. Panics if the mass is zero
    /// or any value is negative.
    pub fn normalize(&mut self) {
        let mass: f64 = self.values.iter().sum::<f64>() * self.dtheta();
        assert!(mass > 0.0, "zero-mass grid pdf");
        assert!(
            self.values.iter().all(|&v| v >= 0.0),
            "negative grid pdf value"
        );
        for v in &mut self.values {
            *v /= mass;
        }
    }

    /// Total mass (should be 1 after normalization).
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.dtheta()
    }

    /// KL divergence `D(self || other)` in nats, computed on the shared grid.
    /// Zero-density points of `self` contribute nothing.
    pub fn kl(&self, other: &GridPdf) -> f64 {
        assert_eq!(self.n(), other.n(), "grid size mismatch");
        let dth = self.dtheta();
        let mut acc = 0.0;
        for (&f, &g) in self.values.iter().zip(&other.values) {
            if f > 0.0 {
                acc += f * (f.ln() - g.ln());
            }
        }
        acc * dth
    }

    /// Differential entropy `-Int f ln f` in nats.
    pub fn entropy(&self) -> f64 {
        let dth = self.dtheta();
        -self
            .values
            .iter()
            .filter(|&&f| f > 0.0)
            .map(|&f| f * f.ln())
            .sum::<f64>()
            * dth
    }

    /// First circular moment `Int f e^{j theta}`.
    pub fn moment(&self) -> Complex64 {
        let dth = self.dtheta();
        let mut m = Complex64::new(0.0, 0.0);
        for (i, &f) in self.values.iter().enumerate() {
            m += Complex64::from_polar(f, self.theta(i));
        }
        m * dth
    }

    /// Total variation distance `max_A |P(A) - Q(A)| = sum |f - g| dtheta / 2`.
    pub fn total_variation(&self, other: &GridPdf) -> f64 {
        assert_eq!(self.n(), other.n(), "grid size mismatch");
        0.5 * self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&f, &g)| (f - g).abs())
            .sum::<f64>()
            * self.dtheta()
    }

    /// Circular convolution with a wrapped Gaussian of standard deviation
    /// `sigma`, wrapping truncated to `|l| <= l_max` copies.
    pub fn convolve_wrapped_normal(&self, sigma: f64, l_max: i32) -> GridPdf {
        assert!(sigma > 0.0, "sigma must be positive");
        let n = self.n();
        let dth = self.dtheta();
        let kernel: Vec<f64> = (0..n)
            .map(|i| wrapped_normal_pdf(wrap_pi(self.theta(i)), sigma, l_max))
            .collect();
        let mut out = vec![0.0; n];
        for (shift, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for i in 0..n {
                // kernel index (shift - i) mod n
                let d = (shift + n - i) % n;
                acc += self.values[i] * kernel[d];
            }
            *o = acc * dth;
        }
        let mut pdf = GridPdf { values: out };
        pdf.normalize();
        pdf
    }
}

/// Wrapped normal density at `theta` (any representative), truncated to
/// `|l| <= l_max` wrap terms.
pub fn wrapped_normal_pdf(theta: f64, sigma: f64, l_max: i32) -> f64 {
    let c = 1.0 / ((TAU).sqrt() * sigma);
    let mut acc = 0.0;
    for l in -l_max..=l_max {
        let d = theta - TAU * l as f64;
        acc += c * (-0.5 * (d / sigma) * (d / sigma)).exp();
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tikhonov::{Component, TikhonovParam};

    #[test]
    fn normalization_and_mass() {
        let pdf = GridPdf::from_fn(1 << 10, |t| 1.0 + 0.5 * t.cos());
        assert!((pdf.mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_entropy() {
        let u = GridPdf::uniform(1 << 10);
        assert!((u.entropy() - TAU.ln()).abs() < 1e-12);
        assert!(u.moment().norm() < 1e-12);
    }

    #[test]
    fn kl_self_is_zero_and_tv_bounds() {
        let mix = TikhonovMixture::new(vec![
            Component {
                log_weight: 0.3f64.ln(),
                param: TikhonovParam::from_polar(4.0, 1.0),
            },
            Component {
                log_weight: 0.7f64.ln(),
                param: TikhonovParam::from_polar(9.0, 4.0),
            },
        ]);
        let f = GridPdf::from_mixture(1 << 12, &mix);
        assert!(f.kl(&f).abs() < 1e-14);
        let u = GridPdf::uniform(1 << 12);
        let tv = f.total_variation(&u);
        assert!(tv > 0.0 && tv <= 1.0);
    }

    #[test]
    fn convolution_preserves_mass_and_shrinks_moment() {
        let mix = TikhonovMixture::singleton(TikhonovParam::from_polar(20.0, 2.0));
        let f = GridPdf::from_mixture(1 << 11, &mix);
        let g = f.convolve_wrapped_normal(0.1, 3);
        assert!((g.mass() - 1.0).abs() < 1e-10);
        // Moments multiply: |m_out| = |m_in| e^{-sigma^2/2}.
        let want = f.moment().norm() * (-0.01f64 / 2.0).exp();
        assert!((g.moment().norm() - want).abs() < 1e-6);
    }
}
