//! Wiener phase-noise channel, MPSK constellations and pilot framing.
//!
//! Received samples follow `r_k = c_k e^{j theta_k} + n_k` where the phase is
//! a Wiener random walk `theta_k = theta_{k-1} + delta_k`,
//! `delta_k ~ N(0, sigma_delta^2)`, `theta_0 ~ U[0, 2pi)`, and `n_k` is
//! circular complex Gaussian noise.
//!
//! Noise convention used throughout the crate: `sigma2` is the per-component
//! (real/imaginary) noise variance, so the total complex noise power is
//! `2 sigma2` and the symbol likelihood carries `2 sigma2` in its exponent
//! denominator.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::TAU;
use thiserror::Error;

use crate::bessel;
use crate::counters;
use crate::math::{log_sum_exp, wrap_2pi};
use crate::tikhonov::{Component, TikhonovMixture, TikhonovParam, KAPPA_MAX};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("noise variance must be positive, got {0}")]
    NonPositiveVariance(f64),
    #[error("modulation order must be a power of two >= 2, got {0}")]
    BadModulationOrder(usize),
    #[error("phase increment deviation must be nonnegative, got {0}")]
    NegativeSigmaDelta(f64),
    #[error("{got} symbols provided for a frame of {want}")]
    SymbolCountMismatch { got: usize, want: usize },
}

/// Gray-labeled MPSK constellation: point `i` sits at angle `2 pi i / M` and
/// carries the binary-reflected Gray label of `i`, so angular neighbours
/// differ in exactly one bit.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    points: Vec<Complex64>,
    /// `labels[position]` = bit pattern transmitted by that point.
    labels: Vec<u32>,
    /// `position_of[label]` inverts `labels`.
    position_of: Vec<usize>,
    bits_per_symbol: u32,
}

impl Constellation {
    pub fn mpsk(m: usize) -> Result<Self, ChannelError> {
        if m < 2 || !m.is_power_of_two() {
            return Err(ChannelError::BadModulationOrder(m));
        }
        let bits = m.trailing_zeros();
        let mut labels = Vec::with_capacity(m);
        let mut position_of = vec![0usize; m];
        let points = (0..m)
            .map(|i| Complex64::from_polar(1.0, TAU * i as f64 / m as f64))
            .collect();
        for i in 0..m {
            let gray = (i ^ (i >> 1)) as u32;
            labels.push(gray);
            position_of[gray as usize] = i;
        }
        Ok(Self {
            points,
            labels,
            position_of,
            bits_per_symbol: bits,
        })
    }

    pub fn order(&self) -> usize {
        self.points.len()
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.bits_per_symbol
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn point(&self, position: usize) -> Complex64 {
        self.points[position]
    }

    /// Bit pattern of the point at `position` (MSB-first packing of the
    /// per-symbol bits).
    pub fn label(&self, position: usize) -> u32 {
        self.labels[position]
    }

    /// Constellation position transmitting the given bit pattern.
    pub fn position_for_label(&self, label: u32) -> usize {
        self.position_of[label as usize]
    }

    /// Map a block of bits (MSB first per symbol) to constellation positions.
    /// Panics unless `bits.len()` is a multiple of the symbol size.
    pub fn map_bits(&self, bits: &[u8]) -> Vec<usize> {
        let b = self.bits_per_symbol as usize;
        assert_eq!(bits.len() % b, 0, "bit count not a multiple of symbol size");
        bits.chunks(b)
            .map(|chunk| {
                let mut label = 0u32;
                for &bit in chunk {
                    debug_assert!(bit <= 1);
                    label = (label << 1) | bit as u32;
                }
                self.position_for_label(label)
            })
            .collect()
    }

    /// Inverse of [`Constellation::map_bits`].
    pub fn unmap_positions(&self, positions: &[usize]) -> Vec<u8> {
        let b = self.bits_per_symbol as usize;
        let mut bits = Vec::with_capacity(positions.len() * b);
        for &p in positions {
            let label = self.labels[p];
            for i in (0..b).rev() {
                bits.push(((label >> i) & 1) as u8);
            }
        }
        bits
    }
}

/// Pilot framing: a preamble of known symbols followed by one pilot every
/// `pilot_period` positions (the last slot of each period).
#[derive(Debug, Clone, PartialEq)]
pub struct FrameConfig {
    /// Total block length in symbols (pilots + data).
    pub block_len: usize,
    /// Period of the interleaved pilots after the preamble; 0 disables them.
    pub pilot_period: usize,
    pub preamble_len: usize,
    /// Constellation position transmitted at every pilot slot.
    pub pilot_symbol: usize,
}

impl FrameConfig {
    /// Smallest frame whose data capacity is exactly `data_symbols`.
    pub fn for_data_symbols(data_symbols: usize, preamble_len: usize, pilot_period: usize) -> Self {
        let mut cfg = Self {
            block_len: preamble_len,
            pilot_period,
            preamble_len,
            pilot_symbol: 0,
        };
        let mut k = preamble_len;
        let mut data = 0usize;
        while data < data_symbols {
            if !cfg.is_pilot(k) {
                data += 1;
            }
            k += 1;
        }
        cfg.block_len = k;
        cfg
    }

    pub fn is_pilot(&self, k: usize) -> bool {
        if k < self.preamble_len {
            return true;
        }
        self.pilot_period > 0
            && (k - self.preamble_len) % self.pilot_period == self.pilot_period - 1
    }

    /// Indices of the data (non-pilot) positions, in order.
    pub fn data_positions(&self) -> Vec<usize> {
        (0..self.block_len).filter(|&k| !self.is_pilot(k)).collect()
    }

    pub fn pilot_count(&self) -> usize {
        (0..self.block_len).filter(|&k| self.is_pilot(k)).count()
    }

    pub fn data_count(&self) -> usize {
        self.block_len - self.pilot_count()
    }

    /// Interleave data symbols with pilots into a full transmit block of
    /// constellation positions. Panics unless the data count matches the
    /// frame capacity.
    pub fn assemble(&self, data_positions_seq: &[usize]) -> Vec<usize> {
        assert_eq!(
            data_positions_seq.len(),
            self.data_count(),
            "data symbol count does not match frame capacity"
        );
        let mut out = Vec::with_capacity(self.block_len);
        let mut it = data_positions_seq.iter();
        for k in 0..self.block_len {
            if self.is_pilot(k) {
                out.push(self.pilot_symbol);
            } else {
                out.push(*it.next().unwrap());
            }
        }
        out
    }
}

/// Convert a requested Eb/N0 (dB) into the per-component noise variance.
///
/// With unit-energy symbols, `K` transmitted symbols (pilot energy included),
/// `D` data symbols carrying `bits_per_symbol` coded bits each at code rate
/// `rate`, the energy per information bit is `K / (rate * D * bits)` and
/// `N0 = 2 sigma2`, giving
///
/// ```text
/// sigma2 = K / (2 * rate * D * bits * 10^(EbN0/10))
/// ```
pub fn ebn0_to_sigma2(ebn0_db: f64, frame: &FrameConfig, rate: f64, bits_per_symbol: u32) -> f64 {
    assert!(rate > 0.0 && rate <= 1.0, "invalid code rate {rate}");
    let ebn0 = 10f64.powf(ebn0_db / 10.0);
    let k = frame.block_len as f64;
    let d = frame.data_count() as f64;
    k / (2.0 * rate * d * bits_per_symbol as f64 * ebn0)
}

/// One simulated transmission: the phase trajectory, the received samples and
/// the channel parameters that generated them.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub theta: Vec<f64>,
    pub received: Vec<Complex64>,
    /// Per-component noise variance.
    pub sigma2: f64,
    /// Phase increment standard deviation (rad/symbol).
    pub sigma_delta: f64,
    pub seed: u64,
}

/// Run `symbols` through the Wiener phase-noise channel. Bit-identical for a
/// fixed seed.
pub fn generate_realization(
    symbols: &[Complex64],
    frame: &FrameConfig,
    sigma2: f64,
    sigma_delta: f64,
    seed: u64,
) -> Result<ChannelRealization, ChannelError> {
    if symbols.len() != frame.block_len {
        return Err(ChannelError::SymbolCountMismatch {
            got: symbols.len(),
            want: frame.block_len,
        });
    }
    if sigma2 <= 0.0 {
        return Err(ChannelError::NonPositiveVariance(sigma2));
    }
    if sigma_delta < 0.0 {
        return Err(ChannelError::NegativeSigmaDelta(sigma_delta));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut theta = Vec::with_capacity(symbols.len());
    let mut phase = rng.gen_range(0.0..TAU);
    let noise_std = sigma2.sqrt();
    let received = symbols
        .iter()
        .map(|&c| {
            theta.push(phase);
            let n = Complex64::new(
                noise_std * rng.sample::<f64, _>(StandardNormal),
                noise_std * rng.sample::<f64, _>(StandardNormal),
            );
            let r = c * Complex64::from_polar(1.0, phase) + n;
            if sigma_delta > 0.0 {
                let step: f64 = rng.sample::<f64, _>(StandardNormal);
                phase = wrap_2pi(phase + sigma_delta * step);
            }
            r
        })
        .collect();
    Ok(ChannelRealization {
        theta,
        received,
        sigma2,
        sigma_delta,
        seed,
    })
}

/// Per-symbol likelihood `e_k(x, theta)` in Tikhonov form.
///
/// `e_k ∝ exp(Re[(r x*/sigma2) e^{-j theta}])` with log-coefficient
/// `-(|r|^2 + |x|^2) / (2 sigma2)`; returns `(log_coefficient, z)` with
/// `z = r x* / sigma2`.
pub fn likelihood_tikhonov(
    r: Complex64,
    x: Complex64,
    sigma2: f64,
) -> Result<(f64, TikhonovParam), ChannelError> {
    if sigma2 <= 0.0 {
        return Err(ChannelError::NonPositiveVariance(sigma2));
    }
    let z = r * x.conj() / sigma2;
    let log_coeff = -(r.norm_sqr() + x.norm_sqr()) / (2.0 * sigma2);
    Ok((log_coeff, TikhonovParam::new(clamp_z(z))))
}

fn clamp_z(z: Complex64) -> Complex64 {
    let n = z.norm();
    if n > KAPPA_MAX {
        z * (KAPPA_MAX / n)
    } else {
        z
    }
}

/// Per-symbol belief over the constellation, stored as normalized
/// log-probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolBelief {
    log_probs: Vec<f64>,
}

impl SymbolBelief {
    /// Uniform belief over `m` symbols.
    pub fn uniform(m: usize) -> Self {
        Self {
            log_probs: vec![-(m as f64).ln(); m],
        }
    }

    /// Certainty on one symbol (pilot belief).
    pub fn indicator(m: usize, position: usize) -> Self {
        assert!(position < m);
        let mut log_probs = vec![f64::NEG_INFINITY; m];
        log_probs[position] = 0.0;
        Self { log_probs }
    }

    /// Normalize arbitrary log scores into a belief. Panics if all scores are
    /// `-inf`.
    pub fn from_log_unnormalized(scores: Vec<f64>) -> Self {
        let total = log_sum_exp(&scores);
        assert!(total > f64::NEG_INFINITY, "all-zero symbol belief");
        Self {
            log_probs: scores.into_iter().map(|s| s - total).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.log_probs.len()
    }

    pub fn log_probs(&self) -> &[f64] {
        &self.log_probs
    }

    pub fn prob(&self, x: usize) -> f64 {
        self.log_probs[x].exp()
    }

    pub fn probs(&self) -> Vec<f64> {
        self.log_probs.iter().map(|l| l.exp()).collect()
    }

    /// Index of the most probable symbol.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &l) in self.log_probs.iter().enumerate() {
            if l > self.log_probs[best] {
                best = i;
            }
        }
        best
    }

    pub fn is_normalized(&self) -> bool {
        log_sum_exp(&self.log_probs).abs() <= 1e-9
    }
}

/// Downward phase message `p_d(theta_k) = sum_x P_d(x) e_k(x, theta)` as an
/// unnormalized Tikhonov mixture: one component per symbol of nonzero
/// belief, with log-weight `log P_d(x) + log_coeff(x) + log I0(|z_x|)`.
///
/// Panics if the belief carries no mass (contract violation).
pub fn pd_message(
    belief: &SymbolBelief,
    r: Complex64,
    sigma2: f64,
    constellation: &Constellation,
) -> TikhonovMixture {
    assert_eq!(
        belief.order(),
        constellation.order(),
        "belief order mismatch"
    );
    assert!(
        belief.log_probs().iter().any(|&l| l > f64::NEG_INFINITY),
        "all-zero symbol belief"
    );
    let mut comps = Vec::new();
    for (x, &lp) in belief.log_probs().iter().enumerate() {
        if lp == f64::NEG_INFINITY {
            continue;
        }
        let (log_coeff, param) =
            likelihood_tikhonov(r, constellation.point(x), sigma2).expect("validated sigma2");
        counters::likelihood_rotation(1);
        counters::expand_components(1);
        comps.push(Component {
            log_weight: lp + log_coeff + bessel::log_i0(param.kappa()),
            param,
        });
    }
    TikhonovMixture::new(comps)
}
