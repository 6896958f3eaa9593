//! Forward/backward Tikhonov-mixture recursions with cycle-slip recovery,
//! the upward symbol likelihoods, and the outer turbo loop with the LDPC
//! decoder.
//!
//! One recursion step at symbol `k` (forward direction):
//!
//! 1. optionally re-anchor on a pilot: `q = phi p + (1 - phi) uniform`
//! 2. expand with the downward symbol belief: each component `z_i` spawns
//!    `Z = z_i + r x*/sigma2` per candidate symbol `x`, weighted by
//!    `P_d(x) I0(|Z|) / I0(|z_i|)`
//! 3. predict through the Wiener increment: `Z -> Z / (1 + |Z| sigma_d^2)`
//! 4. reduce the expanded mixture back to low order.
//!
//! The backward recursion mirrors this on reversed indices. The upward
//! symbol likelihood combines forward and backward messages and the sample
//! likelihood in closed form and, when slip recovery runs, conditions on the
//! per-direction slip confidences (four-group decomposition realized by
//! appending a uniform component weighted `1 - phi` on each side).

use num_complex::Complex64;

use crate::bessel;
use crate::channel::{
    likelihood_tikhonov, ChannelRealization, Constellation, FrameConfig, SymbolBelief,
};
use crate::counters;
use crate::ldpc::{bits_to_symbol_beliefs, decode_bp, symbol_pu_to_bit_llrs, LdpcCode, LlrCombine};
use crate::math::{log_max, log_sum_exp};
use crate::reduction::{reduce_limited, reduce_unbounded, ReductionConfig, SlipConfidence, WeightArith};
use crate::tikhonov::{Component, TikhonovMixture, TikhonovParam};

/// Log-domain shortcut level for the upward-likelihood terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LlrLogApprox {
    /// Exact `log I0` evaluations.
    #[default]
    None,
    /// `log I0(k) ~ k - log(2 pi k)/2` per factor (exact below the validity
    /// edge).
    HalfLog,
    /// `log I0(k) ~ k`.
    Linear,
}

/// Phase-tracking engine configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaConfig {
    pub reduction: ReductionConfig,
    /// Track slip confidences and re-anchor on pilots. Off: confidences stay
    /// at one and the recursion is the pure adaptive-order algorithm.
    pub slip_recovery: bool,
    pub llr_log_approx: LlrLogApprox,
}

impl SpaConfig {
    /// Adaptive unbounded tracking (accuracy-first defaults).
    pub fn unlimited(epsilon: f64) -> Self {
        Self {
            reduction: ReductionConfig {
                epsilon,
                ..ReductionConfig::default_cmvm()
            },
            slip_recovery: false,
            llr_log_approx: LlrLogApprox::None,
        }
    }

    /// Limited-order tracking with slip recovery.
    pub fn limited(l_max: usize, epsilon: f64) -> Self {
        Self {
            reduction: ReductionConfig {
                epsilon,
                ..ReductionConfig::default_cmvm()
            }
            .with_l_max(l_max),
            slip_recovery: true,
            llr_log_approx: LlrLogApprox::None,
        }
    }

    /// Single-component baseline: collapse everything to one component each
    /// step, no slip recovery, cheap approximations. A stand-in for the
    /// classical single-Tikhonov canonical-model receiver, not a port of it.
    pub fn single_component_baseline() -> Self {
        Self {
            reduction: ReductionConfig {
                epsilon: f64::INFINITY,
                kl_mode: crate::tikhonov::KlMode::Coarse,
                cmvm_mode: crate::tikhonov::CmvmMode::Approx,
                ..ReductionConfig::default_cmvm()
            }
            .with_l_max(1),
            slip_recovery: false,
            llr_log_approx: LlrLogApprox::Linear,
        }
    }
}

/// Messages of one recursion direction: `messages[k]` approximates the phase
/// posterior at symbol `k` given that direction's observations, and `phi[k]`
/// its slip confidence.
#[derive(Debug, Clone)]
pub struct DirectionalMessages {
    pub messages: Vec<TikhonovMixture>,
    pub phi: Vec<f64>,
}

impl DirectionalMessages {
    pub fn mean_order(&self) -> f64 {
        self.messages.iter().map(|m| m.order() as f64).sum::<f64>() / self.messages.len() as f64
    }
}

/// Forward and backward halves together.
#[derive(Debug, Clone)]
pub struct MessageSet {
    pub forward: DirectionalMessages,
    pub backward: DirectionalMessages,
}

/// Predict through one Wiener increment: damp every component's
/// concentration, `z -> z / (1 + |z| sigma_delta^2)`. Weights unchanged;
/// never increases concentration.
pub fn predict(mix: &TikhonovMixture, sigma_delta: f64) -> TikhonovMixture {
    if sigma_delta == 0.0 {
        return mix.clone();
    }
    let sd2 = sigma_delta * sigma_delta;
    TikhonovMixture::new(
        mix.components()
            .iter()
            .map(|c| Component {
                log_weight: c.log_weight,
                param: TikhonovParam::new(c.param.z() / (1.0 + c.param.kappa() * sd2)),
            })
            .collect(),
    )
}

/// Expand a phase message with one symbol's downward belief and sample:
/// every (component, candidate symbol) pair spawns `Z = z_i + r x*/sigma2`
/// with log-weight `log a_i + log P_d(x) + log I0(|Z|) - log I0(|z_i|)`,
/// normalized at the end.
pub fn expand(
    mix: &TikhonovMixture,
    belief: &SymbolBelief,
    r: Complex64,
    sigma2: f64,
    constellation: &Constellation,
) -> TikhonovMixture {
    let likes = likelihood_row(belief, r, sigma2, constellation);
    counters::likelihood_rotation(likes.len());
    expand_with(mix, &likes)
}

/// Candidate-symbol likelihood parameters for one sample: `(log P_d(x) +
/// log_coeff(x), z_x)` for every symbol of nonzero belief.
fn likelihood_row(
    belief: &SymbolBelief,
    r: Complex64,
    sigma2: f64,
    constellation: &Constellation,
) -> Vec<(f64, TikhonovParam)> {
    assert_eq!(belief.order(), constellation.order());
    belief
        .log_probs()
        .iter()
        .enumerate()
        .filter(|(_, &lp)| lp > f64::NEG_INFINITY)
        .map(|(x, &lp)| {
            let (log_coeff, param) =
                likelihood_tikhonov(r, constellation.point(x), sigma2).expect("sigma2 > 0");
            (lp + log_coeff, param)
        })
        .collect()
}

fn expand_with(mix: &TikhonovMixture, likes: &[(f64, TikhonovParam)]) -> TikhonovMixture {
    assert!(!likes.is_empty(), "no candidate symbols with nonzero belief");
    let n_out = mix.order() * likes.len();
    counters::expand_components(n_out);
    counters::lse_terms(n_out);
    let mut comps = Vec::with_capacity(n_out);
    for c in mix.components() {
        let log_i0_zi = bessel::log_i0(c.param.kappa());
        for &(lw_x, zx) in likes {
            let z = TikhonovParam::new(c.param.z() + zx.z());
            let log_weight = c.log_weight + lw_x + bessel::log_i0(z.kappa()) - log_i0_zi;
            comps.push(Component { log_weight, param: z });
        }
    }
    TikhonovMixture::new(comps).normalized()
}

/// Mix a message with the uniform distribution at weight `1 - phi` (pilot
/// re-anchor). No-op at full confidence.
fn blend_with_uniform(mix: &TikhonovMixture, phi: f64) -> TikhonovMixture {
    if phi >= 1.0 {
        return mix.clone();
    }
    let mut comps: Vec<Component> = mix
        .components()
        .iter()
        .map(|c| Component {
            log_weight: c.log_weight + phi.ln(),
            param: c.param,
        })
        .collect();
    comps.push(Component {
        log_weight: (1.0 - phi).ln(),
        param: TikhonovParam::uniform(),
    });
    TikhonovMixture::new(comps)
}

/// One reduction step honoring the configured order bound; returns the
/// reduced message and the updated slip confidence.
fn reduce_step(
    mix: &TikhonovMixture,
    cfg: &SpaConfig,
    t: f64,
) -> (TikhonovMixture, f64) {
    match cfg.reduction.l_max {
        None => (
            reduce_unbounded(mix, &cfg.reduction),
            // Nothing is discarded without an order bound.
            t,
        ),
        Some(_) => {
            let (out, phi) = reduce_limited(mix, &cfg.reduction, SlipConfidence::new(t));
            (out, phi.value())
        }
    }
}

/// Directions of the message recursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Direction {
    Forward,
    Backward,
}

/// Shared recursion: the backward pass is the forward pass on the reversed
/// index order.
fn directional_pass(
    realization: &ChannelRealization,
    beliefs: &[SymbolBelief],
    frame: &FrameConfig,
    constellation: &Constellation,
    cfg: &SpaConfig,
    dir: Direction,
) -> DirectionalMessages {
    let k_total = frame.block_len;
    assert_eq!(realization.received.len(), k_total);
    assert_eq!(beliefs.len(), k_total);

    // Map step index 0..K-1 to the symbol index for this direction.
    let sym = |step: usize| match dir {
        Direction::Forward => step,
        Direction::Backward => k_total - 1 - step,
    };

    let mut messages: Vec<TikhonovMixture> = Vec::with_capacity(k_total);
    let mut phi = Vec::with_capacity(k_total);
    messages.push(TikhonovMixture::uniform());
    phi.push(1.0);

    for step in 1..k_total {
        let prev_sym = sym(step - 1);
        let phi_prev = phi[step - 1];
        let (q, t) = if cfg.slip_recovery {
            if frame.is_pilot(prev_sym) {
                (blend_with_uniform(&messages[step - 1], phi_prev), 1.0)
            } else {
                (messages[step - 1].clone(), phi_prev)
            }
        } else {
            (messages[step - 1].clone(), 1.0)
        };
        let expanded = expand(
            &q,
            &beliefs[prev_sym],
            realization.received[prev_sym],
            realization.sigma2,
            constellation,
        );
        let predicted = predict(&expanded, realization.sigma_delta);
        let (reduced, phi_k) = reduce_step(&predicted, cfg, t);
        messages.push(reduced);
        phi.push(phi_k);
    }

    if dir == Direction::Backward {
        messages.reverse();
        phi.reverse();
    }
    DirectionalMessages { messages, phi }
}

/// Forward recursion with cycle-slip recovery: `p_f(theta_0)` uniform,
/// confidence 1 at the start.
pub fn forward_pass(
    realization: &ChannelRealization,
    beliefs: &[SymbolBelief],
    frame: &FrameConfig,
    constellation: &Constellation,
    cfg: &SpaConfig,
) -> DirectionalMessages {
    directional_pass(realization, beliefs, frame, constellation, cfg, Direction::Forward)
}

/// Backward recursion: the mirror of [`forward_pass`] on reversed indices,
/// uniform at `theta_{K-1}`. Output indexed by symbol (not by step).
pub fn backward_pass(
    realization: &ChannelRealization,
    beliefs: &[SymbolBelief],
    frame: &FrameConfig,
    constellation: &Constellation,
    cfg: &SpaConfig,
) -> DirectionalMessages {
    directional_pass(realization, beliefs, frame, constellation, cfg, Direction::Backward)
}

/// Upward symbol likelihood at symbol `k`: for every candidate `x`, a double
/// sum over forward and backward components of
/// `I0(|z_f + z_b + r x*/sigma2|) / (I0(|z_f|) I0(|z_b|))`, with each side
/// augmented by a uniform component at weight `1 - phi` so the four
/// slip-conditioned groups fall out of the same machinery.
pub fn compute_pu(
    msgs: &MessageSet,
    r: Complex64,
    sigma2: f64,
    constellation: &Constellation,
    k: usize,
    cfg: &SpaConfig,
) -> SymbolBelief {
    let fwd = augmented_components(&msgs.forward, k);
    let bwd = augmented_components(&msgs.backward, k);
    let m = constellation.order();

    let luts_per_term = match cfg.llr_log_approx {
        LlrLogApprox::None | LlrLogApprox::HalfLog => 2,
        LlrLogApprox::Linear => 1,
    };
    counters::pu_terms(fwd.len() * bwd.len() * m, luts_per_term);

    let log_env = |kappa: f64| -> f64 {
        match cfg.llr_log_approx {
            LlrLogApprox::None => bessel::log_i0(kappa),
            LlrLogApprox::HalfLog => {
                if kappa < 2.0 {
                    bessel::log_i0(kappa)
                } else {
                    kappa - 0.5 * (core::f64::consts::TAU * kappa).ln()
                }
            }
            LlrLogApprox::Linear => kappa,
        }
    };

    let mut scores = Vec::with_capacity(m);
    for x in 0..m {
        let v = r * constellation.point(x).conj() / sigma2;
        let mut terms = Vec::with_capacity(fwd.len() * bwd.len());
        for &(lw_f, zf) in &fwd {
            for &(lw_b, zb) in &bwd {
                let z_psi = (zf + zb + v).norm();
                terms.push(
                    lw_f + lw_b + log_env(z_psi) - log_env(zf.norm()) - log_env(zb.norm()),
                );
            }
        }
        let score = match cfg.reduction.weight_arith {
            WeightArith::LogSumExp => log_sum_exp(&terms),
            WeightArith::Max => log_max(&terms),
        };
        scores.push(score);
    }
    SymbolBelief::from_log_unnormalized(scores)
}

/// Message components of one direction at symbol `k`, with the uniform
/// slip-hypothesis component appended when confidence is below one.
fn augmented_components(dir: &DirectionalMessages, k: usize) -> Vec<(f64, Complex64)> {
    let phi = dir.phi[k];
    let mut out: Vec<(f64, Complex64)> = dir.messages[k]
        .components()
        .iter()
        .map(|c| (c.log_weight + phi.ln(), c.param.z()))
        .collect();
    if phi < 1.0 {
        out.push(((1.0 - phi).ln(), Complex64::new(0.0, 0.0)));
    }
    out
}

/// Decoder feedback handed to the next phase-tracking iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FeedbackMode {
    /// Posterior minus decoder input (standard turbo practice).
    #[default]
    Extrinsic,
    /// Full decoder posterior.
    Posterior,
}

/// Outer-loop configuration around the phase engine and the LDPC decoder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurboConfig {
    pub spa: SpaConfig,
    /// Inner belief-propagation iterations per outer pass.
    pub ldpc_iters: usize,
    pub feedback: FeedbackMode,
    pub llr_combine: LlrCombine,
    /// Stop outer iterations once the decoder satisfies all checks.
    pub early_stop: bool,
}

impl TurboConfig {
    pub fn new(spa: SpaConfig) -> Self {
        Self {
            spa,
            ldpc_iters: 50,
            feedback: FeedbackMode::Extrinsic,
            llr_combine: LlrCombine::Exact,
            early_stop: true,
        }
    }
}

/// Result of one decoded packet.
#[derive(Debug, Clone)]
pub struct TurboOutput {
    pub info_bits: Vec<u8>,
    pub codeword: Vec<u8>,
    pub converged: bool,
    pub outer_iters_run: usize,
    /// Mean mixture order per outer iteration (forward and backward messages
    /// averaged over all symbols).
    pub gamma_per_iter: Vec<f64>,
    /// Smallest slip confidence seen per outer iteration.
    pub phi_min_per_iter: Vec<f64>,
}

/// Run the full receiver on one packet: alternate phase tracking and LDPC
/// decoding for up to `n_outer` iterations.
///
/// `beliefs` start uniform at data positions and as indicators at pilots;
/// after each decode the data beliefs are replaced by the decoder feedback.
/// A frame with no data positions skips the decoder entirely and returns
/// empty bit vectors.
pub fn run_turbo(
    realization: &ChannelRealization,
    frame: &FrameConfig,
    constellation: &Constellation,
    code: &LdpcCode,
    n_outer: usize,
    cfg: &TurboConfig,
) -> TurboOutput {
    assert!(n_outer >= 1, "need at least one outer iteration");
    let m = constellation.order();
    let data_pos = frame.data_positions();
    let bits_per_sym = constellation.bits_per_symbol() as usize;

    let mut output = TurboOutput {
        info_bits: Vec::new(),
        codeword: Vec::new(),
        converged: data_pos.is_empty(),
        outer_iters_run: 0,
        gamma_per_iter: Vec::new(),
        phi_min_per_iter: Vec::new(),
    };
    if !data_pos.is_empty() {
        assert_eq!(
            code.n(),
            data_pos.len() * bits_per_sym,
            "code length does not fill the frame"
        );
    }

    let mut beliefs: Vec<SymbolBelief> = (0..frame.block_len)
        .map(|k| {
            if frame.is_pilot(k) {
                SymbolBelief::indicator(m, frame.pilot_symbol)
            } else {
                SymbolBelief::uniform(m)
            }
        })
        .collect();

    for _iter in 0..n_outer {
        let forward = forward_pass(realization, &beliefs, frame, constellation, &cfg.spa);
        let backward = backward_pass(realization, &beliefs, frame, constellation, &cfg.spa);
        let msgs = MessageSet { forward, backward };

        output.gamma_per_iter.push(
            0.5 * (msgs.forward.mean_order() + msgs.backward.mean_order()),
        );
        output.phi_min_per_iter.push(
            msgs.forward
                .phi
                .iter()
                .chain(&msgs.backward.phi)
                .copied()
                .fold(1.0, f64::min),
        );
        output.outer_iters_run += 1;

        if data_pos.is_empty() {
            break;
        }

        // Channel LLRs for the decoder.
        let mut channel_llrs = Vec::with_capacity(code.n());
        for &kp in &data_pos {
            let pu = compute_pu(
                &msgs,
                realization.received[kp],
                realization.sigma2,
                constellation,
                kp,
                &cfg.spa,
            );
            channel_llrs.extend(symbol_pu_to_bit_llrs(&pu, constellation, cfg.llr_combine));
        }

        let decoded = decode_bp(code.h(), &channel_llrs, cfg.ldpc_iters);
        output.info_bits = code.encoder().extract_info(&decoded.hard);
        output.codeword = decoded.hard.clone();
        output.converged = decoded.converged;

        if decoded.converged && cfg.early_stop {
            break;
        }

        // Decoder feedback -> downward beliefs for the next pass.
        for (j, &kp) in data_pos.iter().enumerate() {
            let llrs: Vec<f64> = (0..bits_per_sym)
                .map(|b| {
                    let idx = j * bits_per_sym + b;
                    match cfg.feedback {
                        FeedbackMode::Extrinsic => {
                            decoded.posterior_llrs[idx] - channel_llrs[idx]
                        }
                        FeedbackMode::Posterior => decoded.posterior_llrs[idx],
                    }
                })
                .collect();
            beliefs[kp] = bits_to_symbol_beliefs(&llrs, constellation);
        }
    }

    output
}
