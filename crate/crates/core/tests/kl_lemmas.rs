//! Numerical checks of the KL divergence inequalities the reduction-accuracy
//! argument rests on, evaluated on shared discretization grids (where they
//! hold exactly up to floating rounding).

use phasemix::grid::GridPdf;
use phasemix::tikhonov::{TikhonovMixture, TikhonovParam};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const N: usize = 1 << 12;
const SLACK: f64 = 1e-9;

fn random_param(rng: &mut ChaCha8Rng) -> TikhonovParam {
    TikhonovParam::from_polar(
        10f64.powf(rng.gen_range(-0.3..1.7)),
        rng.gen_range(0.0..std::f64::consts::TAU),
    )
}

fn random_weights(rng: &mut ChaCha8Rng, order: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..order).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

fn grid_of(param: TikhonovParam) -> GridPdf {
    GridPdf::from_mixture(N, &TikhonovMixture::singleton(param))
}

fn mix_grids(weights: &[f64], parts: &[GridPdf]) -> GridPdf {
    let mut acc = vec![0.0; N];
    for (w, g) in weights.iter().zip(parts) {
        for (a, v) in acc.iter_mut().zip(g.values()) {
            *a += w * v;
        }
    }
    GridPdf::from_values(acc)
}

#[test]
fn lemma_convexity_in_first_argument() {
    // D(sum_i a_i f_i || g) <= sum_i a_i D(f_i || g).
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..60 {
        let order = rng.gen_range(2..=5);
        let weights = random_weights(&mut rng, order);
        let parts: Vec<GridPdf> = (0..order).map(|_| grid_of(random_param(&mut rng))).collect();
        let g = grid_of(random_param(&mut rng));
        let mixture = mix_grids(&weights, &parts);
        let lhs = mixture.kl(&g);
        let rhs: f64 = weights.iter().zip(&parts).map(|(w, f)| w * f.kl(&g)).sum();
        assert!(lhs <= rhs + SLACK, "lhs {lhs} rhs {rhs}");
    }
}

#[test]
fn lemma_shared_component_contraction() {
    // D(a f + (1-a) g || a f + (1-a) h) <= (1-a) D(g || h).
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for _ in 0..60 {
        let a = rng.gen_range(0.02..0.98);
        let f = grid_of(random_param(&mut rng));
        let g = grid_of(random_param(&mut rng));
        let h = grid_of(random_param(&mut rng));
        let m1 = mix_grids(&[a, 1.0 - a], &[f.clone(), g.clone()]);
        let m2 = mix_grids(&[a, 1.0 - a], &[f, h.clone()]);
        let lhs = m1.kl(&m2);
        let rhs = (1.0 - a) * g.kl(&h);
        assert!(lhs <= rhs + SLACK, "lhs {lhs} rhs {rhs} a {a}");
    }
}

#[test]
fn lemma_matched_pairs_bound() {
    // Equal-order mixtures: D(f || g) <= D(alpha || beta) + sum_i a_i D(f_i || g_i).
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for _ in 0..60 {
        let order = rng.gen_range(2..=5);
        let alpha = random_weights(&mut rng, order);
        let beta = random_weights(&mut rng, order);
        let fs: Vec<GridPdf> = (0..order).map(|_| grid_of(random_param(&mut rng))).collect();
        let gs: Vec<GridPdf> = (0..order).map(|_| grid_of(random_param(&mut rng))).collect();
        let f = mix_grids(&alpha, &fs);
        let g = mix_grids(&beta, &gs);
        let lhs = f.kl(&g);
        let weight_kl: f64 = alpha
            .iter()
            .zip(&beta)
            .map(|(a, b)| a * (a / b).ln())
            .sum();
        let pair_kl: f64 = alpha.iter().zip(fs.iter().zip(&gs)).map(|(a, (fi, gi))| a * fi.kl(gi)).sum();
        assert!(
            lhs <= weight_kl + pair_kl + SLACK,
            "lhs {lhs} vs {weight_kl} + {pair_kl}"
        );
    }
}
