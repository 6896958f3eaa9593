//! The single-trajectory reduction loop behaves like a first-order PLL at
//! high SNR: per step, the PLL update lands within 0.01 rad of the circular
//! mean of the reduced mixture message.

use phasemix::channel::{generate_realization, Constellation, FrameConfig, SymbolBelief};
use phasemix::math::wrap_pi;
use phasemix::reduction::{pll_step_diagnostic, reduce_unbounded, ReductionConfig};
use phasemix::spa::{expand, predict};
use phasemix::tikhonov::{TikhonovMixture, TikhonovParam};

#[test]
fn pll_tracks_reduction_mean_on_bpsk_pilots() {
    let c = Constellation::mpsk(2).unwrap();
    let steps = 100usize;
    let frame = FrameConfig {
        block_len: steps + 1,
        pilot_period: 1,
        preamble_len: steps + 1,
        pilot_symbol: 0,
    };
    let syms = vec![c.point(0); steps + 1];
    let sigma_delta = 0.01;
    // Eb/N0 = 20 dB for uncoded BPSK: sigma2 = 1 / (2 * 10^2).
    let sigma2 = 0.005;
    let real = generate_realization(&syms, &frame, sigma2, sigma_delta, 61).unwrap();
    let pilot = SymbolBelief::indicator(2, 0);
    let cfg = ReductionConfig {
        epsilon: 1.0,
        ..ReductionConfig::default_cmvm()
    };

    // Bootstrap the tracked state from the first sample.
    let mut state = TikhonovParam::new(real.received[0] * c.point(0).conj() / sigma2);
    for k in 1..=steps {
        let r = real.received[k];
        let mix = TikhonovMixture::singleton(state);
        let expanded = expand(&mix, &pilot, r, sigma2, &c);
        let reduced = reduce_unbounded(&predict(&expanded, sigma_delta), &cfg);
        assert_eq!(reduced.order(), 1);
        let mixture_mean = reduced.components()[0].param.mean();

        let pll_mean = pll_step_diagnostic(&state, r, c.point(0), sigma2, sigma_delta * sigma_delta);
        let diff = wrap_pi(pll_mean - mixture_mean).abs();
        assert!(diff < 0.01, "step {k}: PLL {pll_mean} vs mixture {mixture_mean}");

        state = reduced.components()[0].param;
    }
}
