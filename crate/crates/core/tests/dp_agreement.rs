//! Message- and symbol-level agreement between the mixture engine and the
//! discrete-phase oracle on desk-scale instances.

use num_complex::Complex64;
use phasemix::baselines::{dp_forward_backward, DpConfig};
use phasemix::channel::{
    ebn0_to_sigma2, generate_realization, Constellation, FrameConfig, SymbolBelief,
};
use phasemix::grid::GridPdf;
use phasemix::spa::{backward_pass, compute_pu, forward_pass, MessageSet, SpaConfig};
use phasemix::tikhonov::TikhonovMixture;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

fn beliefs_for(frame: &FrameConfig, m: usize) -> Vec<SymbolBelief> {
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

/// Discretize a mixture onto the trellis grid as a pmf aligned with the DP
/// message vector.
fn mixture_on_grid(mix: &TikhonovMixture, l_total: usize) -> Vec<f64> {
    let vals: Vec<f64> = (0..l_total)
        .map(|l| mix.log_pdf(TAU * l as f64 / l_total as f64))
        .collect();
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut p: Vec<f64> = vals.iter().map(|&v| (v - hi).exp()).collect();
    let total: f64 = p.iter().sum();
    for v in &mut p {
        *v /= total;
    }
    p
}

fn pmf_kl(f: &[f64], g: &[f64]) -> f64 {
    f.iter()
        .zip(g)
        .filter(|(&a, _)| a > 0.0)
        .map(|(&a, &b)| a * (a.ln() - b.max(1e-300).ln()))
        .sum()
}

fn tv(a: &SymbolBelief, b: &SymbolBelief) -> f64 {
    0.5 * a
        .probs()
        .iter()
        .zip(b.probs())
        .map(|(x, y)| (x - y).abs())
        .sum::<f64>()
}

struct DeskCase {
    frame: FrameConfig,
    constellation: Constellation,
    data: Vec<usize>,
    sigma2: f64,
}

fn qpsk_desk_case(k_total: usize, pilot_every: usize, seed: u64) -> DeskCase {
    let constellation = Constellation::mpsk(4).unwrap();
    let frame = FrameConfig {
        block_len: k_total,
        pilot_period: pilot_every,
        preamble_len: pilot_every,
        pilot_symbol: 0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xD00D);
    let data: Vec<usize> = (0..frame.data_count()).map(|_| rng.gen_range(0..4)).collect();
    let sigma2 = ebn0_to_sigma2(8.0, &frame, 1.0, 2);
    DeskCase {
        frame,
        constellation,
        data,
        sigma2,
    }
}

#[test]
fn forward_messages_close_to_dp_oracle() {
    let case = qpsk_desk_case(64, 8, 7);
    let syms: Vec<Complex64> = case
        .frame
        .assemble(&case.data)
        .iter()
        .map(|&p| case.constellation.point(p))
        .collect();
    let real = generate_realization(&syms, &case.frame, case.sigma2, 0.05, 7).unwrap();
    let beliefs = beliefs_for(&case.frame, 4);
    let cfg = SpaConfig::unlimited(1.0);
    let fwd = forward_pass(&real, &beliefs, &case.frame, &case.constellation, &cfg);
    let dp = dp_forward_backward(
        &real,
        &beliefs,
        &case.frame,
        &case.constellation,
        &DpConfig::new(256),
    );

    let mut ok = 0usize;
    for k in 0..case.frame.block_len {
        let mix_pmf = mixture_on_grid(&fwd.messages[k], dp.l_total);
        let dp_pmf: Vec<f64> = {
            let total: f64 = dp.forward[k].iter().sum();
            dp.forward[k].iter().map(|v| v / total).collect()
        };
        if pmf_kl(&dp_pmf, &mix_pmf) <= 0.1 {
            ok += 1;
        }
    }
    assert!(
        ok * 100 >= case.frame.block_len * 95,
        "only {ok}/{} symbols within 0.1 nats",
        case.frame.block_len
    );
}

#[test]
fn pu_total_variation_small_vs_dp() {
    // Lighter preview of the acceptance run: 3 seeds instead of 20.
    let mut bad = 0usize;
    let mut total = 0usize;
    for seed in [1u64, 2, 3] {
        let case = qpsk_desk_case(64, 8, seed);
        let syms: Vec<Complex64> = case
            .frame
            .assemble(&case.data)
            .iter()
            .map(|&p| case.constellation.point(p))
            .collect();
        let real = generate_realization(&syms, &case.frame, case.sigma2, 0.05, seed).unwrap();
        let beliefs = beliefs_for(&case.frame, 4);
        let cfg = SpaConfig::unlimited(1.0);
        let msgs = MessageSet {
            forward: forward_pass(&real, &beliefs, &case.frame, &case.constellation, &cfg),
            backward: backward_pass(&real, &beliefs, &case.frame, &case.constellation, &cfg),
        };
        let dp = dp_forward_backward(
            &real,
            &beliefs,
            &case.frame,
            &case.constellation,
            &DpConfig::new(256),
        );
        for &kp in &case.frame.data_positions() {
            let pu = compute_pu(
                &msgs,
                real.received[kp],
                real.sigma2,
                &case.constellation,
                kp,
                &cfg,
            );
            total += 1;
            if tv(&pu, &dp.pu[kp]) > 0.02 {
                bad += 1;
            }
        }
    }
    assert!(
        bad * 100 <= total * 5,
        "{bad}/{total} data symbols beyond 0.02 total variation"
    );
}

#[test]
fn tiny_instance_marginal_consistency() {
    // K = 16, QPSK: mixture engine vs fine DP, every symbol within 0.02.
    let case = qpsk_desk_case(16, 4, 21);
    let syms: Vec<Complex64> = case
        .frame
        .assemble(&case.data)
        .iter()
        .map(|&p| case.constellation.point(p))
        .collect();
    let real = generate_realization(&syms, &case.frame, case.sigma2, 0.03, 5).unwrap();
    let beliefs = beliefs_for(&case.frame, 4);
    let cfg = SpaConfig::unlimited(0.5);
    let msgs = MessageSet {
        forward: forward_pass(&real, &beliefs, &case.frame, &case.constellation, &cfg),
        backward: backward_pass(&real, &beliefs, &case.frame, &case.constellation, &cfg),
    };
    let dp = dp_forward_backward(
        &real,
        &beliefs,
        &case.frame,
        &case.constellation,
        &DpConfig::new(256),
    );
    for &kp in &case.frame.data_positions() {
        let pu = compute_pu(
            &msgs,
            real.received[kp],
            real.sigma2,
            &case.constellation,
            kp,
            &cfg,
        );
        let d = tv(&pu, &dp.pu[kp]);
        assert!(d <= 0.02, "symbol {kp}: TV {d}");
    }
}

/// The grid pdf oracle and the trellis agree on what the mixture looks like
/// (sanity hook tying the two discretizations together).
#[test]
fn grid_and_trellis_discretizations_agree() {
    let mix = TikhonovMixture::uniform();
    let g = GridPdf::from_mixture(1 << 10, &mix);
    let t = mixture_on_grid(&mix, 1 << 10);
    for (a, b) in g.values().iter().zip(&t) {
        assert!((a * TAU / 1024.0 - b).abs() < 1e-12);
    }
}
