//! Bit/symbol belief conversion across the Gray mapping.

use crate::channel::{Constellation, SymbolBelief};
use crate::math::{log_max, log_sum_exp};

/// Marginalization used when turning symbol beliefs into bit LLRs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LlrCombine {
    /// Exact log-sum-exp marginalization.
    #[default]
    Exact,
    /// Max-log approximation.
    MaxLog,
}

/// Turn one symbol's upward belief into per-bit LLRs (positive favors 0),
/// MSB first, matching [`Constellation::map_bits`].
pub fn symbol_pu_to_bit_llrs(
    pu: &SymbolBelief,
    constellation: &Constellation,
    combine: LlrCombine,
) -> Vec<f64> {
    let m = constellation.order();
    assert_eq!(pu.order(), m, "belief order mismatch");
    let bits = constellation.bits_per_symbol() as usize;
    let mut llrs = Vec::with_capacity(bits);
    for b in 0..bits {
        // Bit b counted MSB-first within the label.
        let shift = bits - 1 - b;
        let mut zeros = Vec::new();
        let mut ones = Vec::new();
        for pos in 0..m {
            let bit = (constellation.label(pos) >> shift) & 1;
            let lp = pu.log_probs()[pos];
            if bit == 0 {
                zeros.push(lp);
            } else {
                ones.push(lp);
            }
        }
        let (l0, l1) = match combine {
            LlrCombine::Exact => (log_sum_exp(&zeros), log_sum_exp(&ones)),
            LlrCombine::MaxLog => (log_max(&zeros), log_max(&ones)),
        };
        llrs.push(l0 - l1);
    }
    llrs
}

/// Combine per-bit LLRs (MSB first) into a symbol belief: the product of
/// per-bit probabilities under the Gray labeling.
pub fn bits_to_symbol_beliefs(bit_llrs: &[f64], constellation: &Constellation) -> SymbolBelief {
    let bits = constellation.bits_per_symbol() as usize;
    assert_eq!(bit_llrs.len(), bits, "one LLR per symbol bit expected");
    let m = constellation.order();
    // log p(bit=0) = -softplus(-llr), log p(bit=1) = -softplus(llr).
    let softplus = |x: f64| x.max(0.0) + (-x.abs()).exp().ln_1p();
    let log_p0: Vec<f64> = bit_llrs.iter().map(|&l| -softplus(-l)).collect();
    let log_p1: Vec<f64> = bit_llrs.iter().map(|&l| -softplus(l)).collect();
    let scores: Vec<f64> = (0..m)
        .map(|pos| {
            let label = constellation.label(pos);
            (0..bits)
                .map(|b| {
                    let shift = bits - 1 - b;
                    if (label >> shift) & 1 == 0 {
                        log_p0[b]
                    } else {
                        log_p1[b]
                    }
                })
                .sum()
        })
        .collect();
    SymbolBelief::from_log_unnormalized(scores)
}
