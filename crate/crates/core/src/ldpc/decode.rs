//! Sum-product LDPC decoding in the LLR domain.
//!
//! Positive LLR means bit 0 is more likely. Inputs and messages are clamped
//! to [`LLR_CLAMP`] for tanh-domain stability. Exact zeros in the posterior
//! are treated as erasures: a word containing one never counts as converged.

use super::ParityCheckMatrix;

/// Saturation magnitude for channel and message LLRs.
pub const LLR_CLAMP: f64 = 30.0;

/// Decoder output.
#[derive(Debug, Clone)]
pub struct BpResult {
    pub hard: Vec<u8>,
    pub posterior_llrs: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

/// Belief-propagation decode with flooding schedule and early exit on a
/// satisfied syndrome. LLRs must be finite.
pub fn decode_bp(h: &ParityCheckMatrix, bit_llrs: &[f64], max_iters: usize) -> BpResult {
    assert_eq!(bit_llrs.len(), h.n(), "LLR length mismatch");
    assert!(
        bit_llrs.iter().all(|l| l.is_finite()),
        "LLRs must be finite"
    );
    let n = h.n();
    let m = h.m();
    let channel: Vec<f64> = bit_llrs.iter().map(|l| l.clamp(-LLR_CLAMP, LLR_CLAMP)).collect();

    // Edge storage keyed by (check, position-in-row).
    let row_offsets: Vec<usize> = std::iter::once(0)
        .chain((0..m).scan(0usize, |acc, r| {
            *acc += h.row(r).len();
            Some(*acc)
        }))
        .collect();
    let num_edges = row_offsets[m];
    let mut check_to_var = vec![0.0f64; num_edges];
    let mut var_to_check = vec![0.0f64; num_edges];

    // var -> list of edge slots, for the variable-side update.
    let mut var_edges: Vec<Vec<usize>> = vec![Vec::new(); n];
    for r in 0..m {
        for (j, &c) in h.row(r).iter().enumerate() {
            var_edges[c].push(row_offsets[r] + j);
        }
    }

    for (c, edges) in var_edges.iter().enumerate() {
        for &e in edges {
            var_to_check[e] = channel[c];
        }
    }

    let mut posterior = channel.clone();
    let mut hard = vec![0u8; n];
    for iter in 1..=max_iters {
        // Check-node update with prefix/suffix tanh products.
        for r in 0..m {
            let deg = h.row(r).len();
            let base = row_offsets[r];
            let mut t = vec![0.0f64; deg];
            for (j, tj) in t.iter_mut().enumerate() {
                *tj = (0.5 * var_to_check[base + j]).tanh();
            }
            let mut prefix = vec![1.0f64; deg + 1];
            for j in 0..deg {
                prefix[j + 1] = prefix[j] * t[j];
            }
            let mut suffix = 1.0f64;
            for j in (0..deg).rev() {
                let prod = prefix[j] * suffix;
                suffix *= t[j];
                let p = prod.clamp(-(1.0 - 1e-15), 1.0 - 1e-15);
                check_to_var[base + j] = (2.0 * p.atanh()).clamp(-LLR_CLAMP, LLR_CLAMP);
            }
        }

        // Variable-node update and posterior.
        for v in 0..n {
            let total: f64 = channel[v] + var_edges[v].iter().map(|&e| check_to_var[e]).sum::<f64>();
            posterior[v] = total;
            hard[v] = if total < 0.0 { 1 } else { 0 };
            for &e in &var_edges[v] {
                var_to_check[e] = (total - check_to_var[e]).clamp(-LLR_CLAMP, LLR_CLAMP);
            }
        }

        let erased = posterior.iter().any(|&p| p == 0.0);
        if !erased && h.syndrome_ok(&hard) {
            return BpResult {
                hard,
                posterior_llrs: posterior,
                converged: true,
                iterations: iter,
            };
        }
    }

    BpResult {
        hard,
        posterior_llrs: posterior,
        converged: false,
        iterations: max_iters,
    }
}
