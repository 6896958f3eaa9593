//! Reference receivers for accuracy and complexity comparison.
//!
//! The discrete-phase (DP) receiver quantizes the phase onto a uniform grid
//! and runs the exact forward/backward recursions as Riemann sums on the
//! resulting trellis; with enough levels it approaches the true posterior as
//! closely as desired and serves as the accuracy oracle. The
//! single-component baseline is the mixture engine pinned to order one with
//! an infinite clustering threshold (collapse everything each step), no slip
//! recovery, and the cheap approximations; it reproduces the qualitative
//! failure mode of the classical single-Tikhonov canonical-model receiver
//! without reimplementing its exact update.

use num_complex::Complex64;

use crate::channel::{ChannelRealization, Constellation, FrameConfig, SymbolBelief};
use crate::counters;
use crate::grid::wrapped_normal_pdf;
use crate::math::wrap_pi;
use crate::spa::{
    backward_pass, compute_pu, forward_pass, DirectionalMessages, MessageSet, SpaConfig,
};
use std::f64::consts::TAU;

/// Quantization: `q` levels between adjacent constellation points, so an
/// M-PSK trellis has `q * M` levels in `[0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DpConfig {
    pub q: usize,
}

impl DpConfig {
    pub fn new(q: usize) -> Self {
        assert!(q >= 2, "need at least two levels per constellation point");
        Self { q }
    }

    pub fn l_total(&self, m: usize) -> usize {
        self.q * m
    }
}

/// Gridded messages and upward beliefs of one DP run.
#[derive(Debug, Clone)]
pub struct DpMessages {
    pub l_total: usize,
    /// `forward[k][l]`: density at level `l`, normalized to unit mass.
    pub forward: Vec<Vec<f64>>,
    pub backward: Vec<Vec<f64>>,
    pub pu: Vec<SymbolBelief>,
}

/// Wrapping truncation of the increment kernel.
const KERNEL_WRAPS: i32 = 3;

/// Per-symbol likelihood table `e[k][x][l]`, max-shifted per symbol and
/// exponentiated once; shared by the recursions and the upward beliefs.
struct LikelihoodGrid {
    values: Vec<Vec<Vec<f64>>>,
}

impl LikelihoodGrid {
    fn build(realization: &ChannelRealization, constellation: &Constellation, l_total: usize) -> Self {
        let m = constellation.order();
        let dir: Vec<Complex64> = (0..l_total)
            .map(|l| Complex64::from_polar(1.0, -(TAU * l as f64 / l_total as f64)))
            .collect();
        let values = realization
            .received
            .iter()
            .map(|&r| {
                counters::likelihood_rotation(m);
                counters::raw(2 * (m * l_total) as u64, (m * l_total) as u64);
                let mut logs: Vec<Vec<f64>> = (0..m)
                    .map(|x| {
                        let v = r * constellation.point(x).conj() / realization.sigma2;
                        dir.iter().map(|&d| (v * d).re).collect()
                    })
                    .collect();
                let hi = logs
                    .iter()
                    .flatten()
                    .copied()
                    .fold(f64::NEG_INFINITY, f64::max);
                for row in &mut logs {
                    for v in row.iter_mut() {
                        *v = (*v - hi).exp();
                    }
                }
                logs
            })
            .collect();
        Self { values }
    }
}

/// Exact SPA on the quantized phase trellis: forward/backward recursions as
/// Riemann sums with a tabulated wrapped-Gaussian transition kernel, and the
/// upward beliefs as grid sums.
pub fn dp_forward_backward(
    realization: &ChannelRealization,
    beliefs: &[SymbolBelief],
    frame: &FrameConfig,
    constellation: &Constellation,
    dp: &DpConfig,
) -> DpMessages {
    let k_total = frame.block_len;
    assert_eq!(realization.received.len(), k_total);
    assert_eq!(beliefs.len(), k_total);
    let m = constellation.order();
    let l_total = dp.l_total(m);
    assert!(l_total >= 8, "trellis too coarse");
    let dtheta = TAU / l_total as f64;

    let e = LikelihoodGrid::build(realization, constellation, l_total);

    // Downward message on the grid, rebuilt from the current beliefs.
    let pd: Vec<Vec<f64>> = (0..k_total)
        .map(|k| {
            counters::raw((m * l_total) as u64, 0);
            let mut row = vec![0.0; l_total];
            for (x, &lp) in beliefs[k].log_probs().iter().enumerate() {
                if lp == f64::NEG_INFINITY {
                    continue;
                }
                let w = lp.exp();
                for (l, r) in row.iter_mut().enumerate() {
                    *r += w * e.values[k][x][l];
                }
            }
            row
        })
        .collect();

    // Transition kernel over circular offsets; `None` marks the noiseless
    // delta kernel.
    let kernel: Option<Vec<f64>> = if realization.sigma_delta > 0.0 {
        Some(
            (0..l_total)
                .map(|d| {
                    wrapped_normal_pdf(
                        wrap_pi(TAU * d as f64 / l_total as f64),
                        realization.sigma_delta,
                        KERNEL_WRAPS,
                    )
                })
                .collect(),
        )
    } else {
        None
    };

    let normalize = |v: &mut Vec<f64>| {
        let mass: f64 = v.iter().sum::<f64>() * dtheta;
        assert!(mass > 0.0, "zero-mass trellis message");
        for x in v.iter_mut() {
            *x /= mass;
        }
    };

    let step = |prev: &[f64], pd_prev: &[f64]| -> Vec<f64> {
        counters::dp_trellis_step(l_total);
        let mut out = vec![0.0; l_total];
        match &kernel {
            Some(t) => {
                for (lp, o) in out.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for l in 0..l_total {
                        acc += prev[l] * pd_prev[l] * t[(lp + l_total - l) % l_total];
                    }
                    *o = acc * dtheta;
                }
            }
            None => {
                for (o, (p, w)) in out.iter_mut().zip(prev.iter().zip(pd_prev)) {
                    *o = p * w;
                }
            }
        }
        normalize(&mut out);
        out
    };

    let uniform = vec![1.0 / TAU; l_total];
    let mut forward: Vec<Vec<f64>> = Vec::with_capacity(k_total);
    forward.push(uniform.clone());
    for k in 1..k_total {
        let next = step(&forward[k - 1], &pd[k - 1]);
        forward.push(next);
    }
    let mut backward: Vec<Vec<f64>> = vec![uniform; k_total];
    for k in (0..k_total.saturating_sub(1)).rev() {
        backward[k] = step(&backward[k + 1], &pd[k + 1]);
    }

    let pu = (0..k_total)
        .map(|k| {
            counters::raw(2 * (m * l_total) as u64, 0);
            let scores: Vec<f64> = (0..m)
                .map(|x| {
                    let mut acc = 0.0;
                    for l in 0..l_total {
                        acc += forward[k][l] * backward[k][l] * e.values[k][x][l];
                    }
                    (acc * dtheta).max(f64::MIN_POSITIVE).ln()
                })
                .collect();
            SymbolBelief::from_log_unnormalized(scores)
        })
        .collect();

    DpMessages {
        l_total,
        forward,
        backward,
        pu,
    }
}

/// Single-component baseline pass: the mixture engine with order pinned to
/// one and an infinite threshold (every step collapses to one CMVM
/// component), no slip recovery. Returns the messages and per-symbol upward
/// beliefs.
pub fn barb_pass(
    realization: &ChannelRealization,
    beliefs: &[SymbolBelief],
    frame: &FrameConfig,
    constellation: &Constellation,
) -> (MessageSet, Vec<SymbolBelief>) {
    let cfg = SpaConfig::single_component_baseline();
    let msgs = MessageSet {
        forward: forward_pass(realization, beliefs, frame, constellation, &cfg),
        backward: backward_pass(realization, beliefs, frame, constellation, &cfg),
    };
    let pu = (0..frame.block_len)
        .map(|k| {
            compute_pu(
                &msgs,
                realization.received[k],
                realization.sigma2,
                constellation,
                k,
                &cfg,
            )
        })
        .collect();
    (msgs, pu)
}

/// Baseline messages are single-component by construction.
pub fn message_orders(msgs: &DirectionalMessages) -> Vec<usize> {
    msgs.messages.iter().map(|m| m.order()).collect()
}

/// The outer turbo loop with the discrete-phase receiver in place of the
/// mixture engine. Mirrors [`crate::spa::run_turbo`]; the mean-order
/// statistic is not meaningful here and stays empty.
pub fn run_turbo_dp(
    realization: &ChannelRealization,
    frame: &FrameConfig,
    constellation: &Constellation,
    code: &crate::ldpc::LdpcCode,
    n_outer: usize,
    dp: &DpConfig,
    cfg: &crate::spa::TurboConfig,
) -> crate::spa::TurboOutput {
    use crate::ldpc::{bits_to_symbol_beliefs, decode_bp, symbol_pu_to_bit_llrs};
    use crate::spa::{FeedbackMode, TurboOutput};

    assert!(n_outer >= 1);
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
        assert_eq!(code.n(), data_pos.len() * bits_per_sym);
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

    for _ in 0..n_outer {
        let msgs = dp_forward_backward(realization, &beliefs, frame, constellation, dp);
        output.outer_iters_run += 1;
        if data_pos.is_empty() {
            break;
        }

        let mut channel_llrs = Vec::with_capacity(code.n());
        for &kp in &data_pos {
            channel_llrs.extend(symbol_pu_to_bit_llrs(
                &msgs.pu[kp],
                constellation,
                cfg.llr_combine,
            ));
        }
        let decoded = decode_bp(code.h(), &channel_llrs, cfg.ldpc_iters);
        output.info_bits = code.encoder().extract_info(&decoded.hard);
        output.codeword = decoded.hard.clone();
        output.converged = decoded.converged;
        if decoded.converged && cfg.early_stop {
            break;
        }
        for (j, &kp) in data_pos.iter().enumerate() {
            let llrs: Vec<f64> = (0..bits_per_sym)
                .map(|b| {
                    let idx = j * bits_per_sym + b;
                    match cfg.feedback {
                        FeedbackMode::Extrinsic => decoded.posterior_llrs[idx] - channel_llrs[idx],
                        FeedbackMode::Posterior => decoded.posterior_llrs[idx],
                    }
                })
                .collect();
            beliefs[kp] = bits_to_symbol_beliefs(&llrs, constellation);
        }
    }
    output
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::generate_realization;

    fn pilot_beliefs(frame: &FrameConfig, m: usize) -> Vec<SymbolBelief> {
        (0..frame.block_len)
            .map(|k| {
                if frame.is_pilot(k) {
                    SymbolBelief::indicator(m, frame.pilot_symbol)
                } else {
                    SymbolBelief::uniform(m)
                }
            })
            .collect()
    }

    fn tv(a: &SymbolBelief, b: &SymbolBelief) -> f64 {
        0.5 * a
            .probs()
            .iter()
            .zip(b.probs())
            .map(|(x, y)| (x - y).abs())
            .sum::<f64>()
    }

    #[test]
    fn forward_mass_concentrates_on_true_level() {
        let c = Constellation::mpsk(2).unwrap();
        let frame = FrameConfig {
            block_len: 10,
            pilot_period: 1,
            preamble_len: 10,
            pilot_symbol: 0,
        };
        let syms = vec![c.point(0); 10];
        let mut real = generate_realization(&syms, &frame, 1e-20, 0.0, 8).unwrap();
        real.sigma2 = 0.05;
        let dp = DpConfig::new(16);
        let out = dp_forward_backward(&real, &pilot_beliefs(&frame, 2), &frame, &c, &dp);
        let l_total = out.l_total;
        let last = &out.forward[9];
        let argmax = (0..l_total).max_by(|&a, &b| last[a].partial_cmp(&last[b]).unwrap()).unwrap();
        let level_angle = TAU * argmax as f64 / l_total as f64;
        let d = wrap_pi(level_angle - real.theta[0]).abs();
        assert!(d <= TAU / l_total as f64, "level off by {d}");
        // Valid distributions at every index.
        for k in 0..10 {
            let mass: f64 = out.forward[k].iter().sum::<f64>() * TAU / l_total as f64;
            assert!((mass - 1.0).abs() < 1e-9);
            assert!(out.forward[k].iter().all(|&v| v >= 0.0));
            let mass_b: f64 = out.backward[k].iter().sum::<f64>() * TAU / l_total as f64;
            assert!((mass_b - 1.0).abs() < 1e-9);
        }
    }

    // Independent oracle: the same joint sum over quantized phase paths,
    // written as plain unnormalized dense recursions with no shared code.
    fn brute_force_pu(
        real: &ChannelRealization,
        beliefs: &[SymbolBelief],
        c: &Constellation,
        l_total: usize,
    ) -> Vec<SymbolBelief> {
        let k_total = real.received.len();
        let m = c.order();
        let dth = TAU / l_total as f64;
        let angle = |l: usize| TAU * l as f64 / l_total as f64;
        let e = |k: usize, x: usize, l: usize| -> f64 {
            (-(real.received[k] - c.point(x) * Complex64::from_polar(1.0, angle(l))).norm_sqr()
                / (2.0 * real.sigma2))
                .exp()
        };
        let pd = |k: usize, l: usize| -> f64 {
            (0..m).map(|x| beliefs[k].prob(x) * e(k, x, l)).sum()
        };
        let trans = |from: usize, to: usize| -> f64 {
            wrapped_normal_pdf(wrap_pi(angle(to) - angle(from)), real.sigma_delta, KERNEL_WRAPS)
        };
        // Unnormalized joint alpha/beta.
        let mut alpha = vec![vec![0.0f64; l_total]; k_total];
        for l in 0..l_total {
            alpha[0][l] = 1.0 / TAU;
        }
        for k in 1..k_total {
            for to in 0..l_total {
                let mut acc = 0.0;
                for from in 0..l_total {
                    acc += alpha[k - 1][from] * pd(k - 1, from) * trans(from, to);
                }
                alpha[k][to] = acc * dth;
            }
        }
        let mut beta = vec![vec![0.0f64; l_total]; k_total];
        for l in 0..l_total {
            beta[k_total - 1][l] = 1.0 / TAU;
        }
        for k in (0..k_total - 1).rev() {
            for from in 0..l_total {
                let mut acc = 0.0;
                for to in 0..l_total {
                    acc += beta[k + 1][to] * pd(k + 1, to) * trans(from, to);
                }
                beta[k][from] = acc * dth;
            }
        }
        (0..k_total)
            .map(|k| {
                let scores: Vec<f64> = (0..m)
                    .map(|x| {
                        (0..l_total)
                            .map(|l| alpha[k][l] * beta[k][l] * e(k, x, l) * dth)
                            .sum::<f64>()
                            .ln()
                    })
                    .collect();
                SymbolBelief::from_log_unnormalized(scores)
            })
            .collect()
    }

    #[test]
    fn pu_matches_brute_force_path_sum() {
        let c = Constellation::mpsk(2).unwrap();
        let frame = FrameConfig::for_data_symbols(5, 2, 4);
        assert_eq!(frame.block_len, 8);
        let data: Vec<usize> = vec![1, 0, 1, 1, 0];
        let syms: Vec<Complex64> = frame.assemble(&data).iter().map(|&p| c.point(p)).collect();
        let real = generate_realization(&syms, &frame, 0.25, 0.15, 42).unwrap();
        let beliefs = pilot_beliefs(&frame, 2);
        let dp = DpConfig::new(8); // L = 16
        let out = dp_forward_backward(&real, &beliefs, &frame, &c, &dp);
        let oracle = brute_force_pu(&real, &beliefs, &c, 16);
        for k in 0..frame.block_len {
            for x in 0..2 {
                assert!(
                    (out.pu[k].prob(x) - oracle[k].prob(x)).abs() < 1e-9,
                    "k={k} x={x}: {} vs {}",
                    out.pu[k].prob(x),
                    oracle[k].prob(x)
                );
            }
        }
    }

    #[test]
    fn refinement_converges_in_levels() {
        let c = Constellation::mpsk(4).unwrap();
        let frame = FrameConfig::for_data_symbols(12, 3, 5);
        let data: Vec<usize> = (0..12).map(|i| (i * 3 + 1) % 4).collect();
        let syms: Vec<Complex64> = frame.assemble(&data).iter().map(|&p| c.point(p)).collect();
        let real = generate_realization(&syms, &frame, 0.15, 0.08, 17).unwrap();
        let beliefs = pilot_beliefs(&frame, 4);
        let mut worst = Vec::new();
        for q in [32, 64, 128, 256] {
            let out = dp_forward_backward(&real, &beliefs, &frame, &c, &DpConfig::new(q));
            worst.push(out.pu);
        }
        // Successive refinements shrink the change; the last one is tiny.
        let d = |a: &Vec<SymbolBelief>, b: &Vec<SymbolBelief>| {
            a.iter().zip(b).map(|(x, y)| tv(x, y)).fold(0.0f64, f64::max)
        };
        let d1 = d(&worst[0], &worst[1]);
        let d2 = d(&worst[1], &worst[2]);
        let d3 = d(&worst[2], &worst[3]);
        assert!(d2 <= 0.75 * d1 + 1e-12, "d1={d1} d2={d2}");
        assert!(d3 <= 0.75 * d2 + 1e-12, "d2={d2} d3={d3}");
        assert!(d3 <= 1e-3, "not converged: {d3}");
    }

    #[test]
    fn rotation_invariance_one_grid_step() {
        let c = Constellation::mpsk(4).unwrap();
        let frame = FrameConfig::for_data_symbols(10, 2, 4);
        let data: Vec<usize> = (0..10).map(|i| i % 4).collect();
        let syms: Vec<Complex64> = frame.assemble(&data).iter().map(|&p| c.point(p)).collect();
        let real = generate_realization(&syms, &frame, 0.2, 0.1, 23).unwrap();
        let beliefs = pilot_beliefs(&frame, 4);
        let dp = DpConfig::new(8);
        let l_total = dp.l_total(4);
        let out = dp_forward_backward(&real, &beliefs, &frame, &c, &dp);

        let mut rotated = real.clone();
        let rot = Complex64::from_polar(1.0, TAU / l_total as f64);
        for r in rotated.received.iter_mut() {
            *r *= rot;
        }
        let out_rot = dp_forward_backward(&rotated, &beliefs, &frame, &c, &dp);
        for k in 0..frame.block_len {
            for x in 0..4 {
                assert!(
                    (out.pu[k].prob(x) - out_rot.pu[k].prob(x)).abs() < 1e-9,
                    "k={k} x={x}"
                );
            }
        }
    }

    #[test]
    fn baseline_is_single_component_everywhere() {
        let c = Constellation::mpsk(4).unwrap();
        let frame = FrameConfig::for_data_symbols(20, 4, 5);
        let data: Vec<usize> = (0..20).map(|i| (i * 3) % 4).collect();
        let syms: Vec<Complex64> = frame.assemble(&data).iter().map(|&p| c.point(p)).collect();
        let real = generate_realization(&syms, &frame, 0.1, 0.05, 5).unwrap();
        let beliefs = pilot_beliefs(&frame, 4);
        let (msgs, pu) = barb_pass(&real, &beliefs, &frame, &c);
        assert!(message_orders(&msgs.forward).iter().all(|&o| o == 1));
        assert!(message_orders(&msgs.backward).iter().all(|&o| o == 1));
        assert_eq!(pu.len(), frame.block_len);
        assert!(msgs.forward.phi.iter().all(|&p| p == 1.0));
    }

    #[test]
    fn baseline_matches_engine_when_unimodal() {
        // Dense pilots at high SNR keep the full engine unimodal, where the
        // single-component baseline agrees with it.
        let c = Constellation::mpsk(4).unwrap();
        let frame = FrameConfig::for_data_symbols(10, 4, 2);
        let data: Vec<usize> = (0..10).map(|i| (i + 1) % 4).collect();
        let syms: Vec<Complex64> = frame.assemble(&data).iter().map(|&p| c.point(p)).collect();
        let real = generate_realization(&syms, &frame, 0.01, 0.02, 12).unwrap();
        let beliefs = pilot_beliefs(&frame, 4);
        let (_, pu_base) = barb_pass(&real, &beliefs, &frame, &c);

        let cfg = SpaConfig::unlimited(1.0);
        let msgs = MessageSet {
            forward: forward_pass(&real, &beliefs, &frame, &c, &cfg),
            backward: backward_pass(&real, &beliefs, &frame, &c, &cfg),
        };
        for &kp in frame.data_positions().iter() {
            let pu = compute_pu(&msgs, real.received[kp], real.sigma2, &c, kp, &cfg);
            assert!(
                tv(&pu, &pu_base[kp]) < 0.05,
                "baseline diverges at {kp}: {}",
                tv(&pu, &pu_base[kp])
            );
            assert_eq!(pu.argmax(), pu_base[kp].argmax());
        }
    }

    #[test]
    fn antipodal_ambiguity_resolved_by_backward_pilot() {
        // Structural check of the two-sided smoothing: with pilots on both
        // ends, the midpoint posterior is anchored despite BPSK ambiguity.
        let c = Constellation::mpsk(2).unwrap();
        let frame = FrameConfig {
            block_len: 9,
            pilot_period: 4,
            preamble_len: 1,
            pilot_symbol: 0,
        };
        let data: Vec<usize> = vec![1, 0, 1, 1, 0, 1];
        assert_eq!(frame.data_count(), 6);
        let syms: Vec<Complex64> = frame.assemble(&data).iter().map(|&p| c.point(p)).collect();
        let real = generate_realization(&syms, &frame, 0.05, 0.02, 99).unwrap();
        let beliefs = pilot_beliefs(&frame, 2);
        let dp = DpConfig::new(16);
        let out = dp_forward_backward(&real, &beliefs, &frame, &c, &dp);
        for (&k, &p) in frame.data_positions().iter().zip(data.iter()) {
            // Posterior should prefer the transmitted symbol at this SNR.
            assert_eq!(out.pu[k].argmax(), p, "symbol {k}");
        }
    }
}
