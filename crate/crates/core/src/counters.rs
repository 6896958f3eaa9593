//! Multiply/LUT instrumentation for complexity measurements.
//!
//! Counts follow the usual hardware-style complexity model for this class of
//! receiver: additions, comparisons and control are free; real
//! multiplications and divisions count as MULS; transcendental evaluations
//! (cos, exp, log, the `I0` family) count as LUT operations, assumed
//! table-based. Counter calls are placed at the operation sites with the
//! per-site weights below and hoisted out of inner loops where the trip count
//! is known.
//!
//! | site                                   | muls | luts |
//! |----------------------------------------|------|------|
//! | likelihood rotation `r x* / sigma^2`   | 4    | 0    |
//! | expand, per emitted component          | 2    | 1    |
//! | KL eval, coarse                        | 2    | 1    |
//! | KL eval, approx                        | 4    | 2    |
//! | KL eval, exact                         | 2    | 3    |
//! | CMVM collapse, per input component     | 2    | 1    |
//! | Pu, per (fwd, bwd, symbol) term        | 4    | 1-2  |
//! | log-sum-exp accumulation, per term     | 0    | 1    |
//! | DP trellis step, per direction         | 2 L^2 + L | 0 |
//!
//! The expand weight covers the per-component envelope and the concentration
//! damp of the prediction step (a fixed scaling per component); the CMVM
//! weight covers the ratio-scaled moment accumulation and the weight
//! exponential.
//!
//! Counters are thread-local: a Monte-Carlo worker measures one packet at a
//! time with [`start`]/[`take`]. When no measurement is active every site
//! call is a cheap flag test.

use std::cell::Cell;

use crate::tikhonov::KlMode;

/// A snapshot of counted operations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub muls: u64,
    pub luts: u64,
}

impl OpCounts {
    pub fn add(&mut self, other: OpCounts) {
        self.muls += other.muls;
        self.luts += other.luts;
    }
}

thread_local! {
    static ACTIVE: Cell<bool> = const { Cell::new(false) };
    static MULS: Cell<u64> = const { Cell::new(0) };
    static LUTS: Cell<u64> = const { Cell::new(0) };
}

/// Begin measuring on this thread; resets the running counts.
pub fn start() {
    ACTIVE.with(|a| a.set(true));
    MULS.with(|m| m.set(0));
    LUTS.with(|l| l.set(0));
}

/// Stop measuring and return the counts accumulated since [`start`].
pub fn take() -> OpCounts {
    ACTIVE.with(|a| a.set(false));
    OpCounts {
        muls: MULS.with(|m| m.replace(0)),
        luts: LUTS.with(|l| l.replace(0)),
    }
}

#[inline]
fn bump(muls: u64, luts: u64) {
    ACTIVE.with(|a| {
        if a.get() {
            MULS.with(|m| m.set(m.get() + muls));
            LUTS.with(|l| l.set(l.get() + luts));
        }
    });
}

/// `n` entries of the per-symbol likelihood table `r x* / sigma^2`.
#[inline]
pub fn likelihood_rotation(n: usize) {
    bump(4 * n as u64, 0);
}

/// `n` components emitted by the expand step.
#[inline]
pub fn expand_components(n: usize) {
    bump(2 * n as u64, n as u64);
}

/// One pairwise KL evaluation in the given mode.
#[inline]
pub fn kl_eval(mode: KlMode) {
    match mode {
        KlMode::Coarse => bump(2, 1),
        KlMode::Approx => bump(4, 2),
        KlMode::Exact => bump(2, 3),
    }
}

/// One CMVM collapse over `n` input components.
#[inline]
pub fn cmvm_collapse(n: usize) {
    bump(2 * n as u64, n as u64);
}

/// `n` terms of the upward-likelihood double sum; `luts_per_term` depends on
/// the log-domain approximation level.
#[inline]
pub fn pu_terms(n: usize, luts_per_term: u64) {
    bump(4 * n as u64, luts_per_term * n as u64);
}

/// `n` exponentials spent in a log-sum-exp accumulation.
#[inline]
pub fn lse_terms(n: usize) {
    bump(0, n as u64);
}

/// One discrete-phase trellis step (single direction) on `l_total` levels.
#[inline]
pub fn dp_trellis_step(l_total: usize) {
    let l = l_total as u64;
    bump(2 * l * l + l, 0);
}

/// Raw site: `muls` multiplications and `luts` lookups.
#[inline]
pub fn raw(muls: u64, luts: u64) {
    bump(muls, luts);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_only_when_active() {
        expand_components(10);
        start();
        expand_components(3);
        kl_eval(KlMode::Coarse);
        let c = take();
        assert_eq!(c.muls, 6 + 2);
        assert_eq!(c.luts, 3 + 1);
        expand_components(5);
        start();
        let c2 = take();
        assert_eq!(c2, OpCounts::default());
    }
}
