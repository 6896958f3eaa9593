//! KL-threshold mixture reduction.
//!
//! Both reducers run the same greedy clustering loop: take the heaviest
//! remaining component as the lead, gather every component within the KL
//! threshold of it, collapse the gathered set to one component (CMVM, or the
//! lead itself under the selection strategy), remove it, repeat. The
//! unbounded variant runs until no components remain and its output is within
//! the threshold of the input in KL divergence. The limited variant stops
//! after a maximum number of clusters and accounts for the discarded mass in
//! a running slip confidence: the probability that the surviving trajectory
//! set still contains the true phase trajectory.

use num_complex::Complex64;

use crate::math::{log_add_exp, wrap_2pi, wrap_pi};
use crate::tikhonov::{
    cmvm, kl_tikhonov, CmvmMode, Component, KlMode, TikhonovMixture, TikhonovParam,
};

/// Cluster collapse strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Collapse each cluster with the optimal moment-matching operator.
    #[default]
    Cmvm,
    /// Keep the lead component as the cluster representative (no collapse
    /// arithmetic; trades mixture order for per-cluster work).
    Select,
}

/// Log-domain weight accumulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightArith {
    /// Exact log-sum-exp.
    #[default]
    LogSumExp,
    /// Max approximation of the sum.
    Max,
}

/// Configuration of one reduction pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReductionConfig {
    /// KL threshold in nats. Must be positive (infinity collapses everything
    /// reachable into the first cluster).
    pub epsilon: f64,
    /// Maximum output order; `None` is unbounded.
    pub l_max: Option<usize>,
    pub kl_mode: KlMode,
    pub strategy: Strategy,
    pub weight_arith: WeightArith,
    pub cmvm_mode: CmvmMode,
}

impl ReductionConfig {
    /// Clustering defaults: threshold 4, optimal collapse.
    pub fn default_cmvm() -> Self {
        Self {
            epsilon: 4.0,
            l_max: None,
            kl_mode: KlMode::Exact,
            strategy: Strategy::Cmvm,
            weight_arith: WeightArith::LogSumExp,
            cmvm_mode: CmvmMode::Exact,
        }
    }

    /// Selection defaults: threshold 1, representative selection.
    pub fn default_select() -> Self {
        Self {
            epsilon: 1.0,
            strategy: Strategy::Select,
            ..Self::default_cmvm()
        }
    }

    pub fn with_l_max(mut self, l_max: usize) -> Self {
        assert!(l_max >= 1, "l_max must be at least 1");
        self.l_max = Some(l_max);
        self
    }

    fn validate(&self) {
        assert!(self.epsilon > 0.0, "epsilon must be positive");
        if let Some(l) = self.l_max {
            assert!(l >= 1, "l_max must be at least 1");
        }
    }
}

/// Probability that the tracked trajectory set still includes the true one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlipConfidence(f64);

impl SlipConfidence {
    /// Full confidence: no trajectory has been dropped yet.
    pub fn certain() -> Self {
        Self(1.0)
    }

    pub fn new(phi: f64) -> Self {
        assert!(
            phi > 0.0 && phi <= 1.0,
            "slip confidence out of (0, 1]: {phi}"
        );
        Self(phi)
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Outcome of one greedy clustering pass over the mixture.
struct Clustering {
    /// Emitted clusters: (log cluster weight in the input normalization,
    /// collapsed parameter).
    clusters: Vec<(f64, TikhonovParam)>,
    /// Log of the total emitted mass, in the chosen weight arithmetic.
    log_kept: f64,
}

/// Greedy KL clustering shared by both reducers. `max_clusters` of `None`
/// exhausts the input.
fn cluster(f: &TikhonovMixture, cfg: &ReductionConfig, max_clusters: Option<usize>) -> Clustering {
    let comps = f.components();
    let n = comps.len();
    let mut alive: Vec<bool> = vec![true; n];
    let mut remaining = n;
    let mut clusters = Vec::new();
    let mut log_kept = f64::NEG_INFINITY;
    let mut passes = 0usize;

    while remaining > 0 && max_clusters.map_or(true, |l| clusters.len() < l) {
        passes += 1;
        debug_assert!(passes <= n, "clustering failed to terminate");

        // Heaviest remaining component; ties break to the lowest index via
        // the strict comparison.
        let mut lead = usize::MAX;
        let mut best = f64::NEG_INFINITY;
        for (i, c) in comps.iter().enumerate() {
            if alive[i] && c.log_weight > best {
                best = c.log_weight;
                lead = i;
            }
        }
        if lead == usize::MAX {
            // All remaining weights are -inf; drop them silently.
            break;
        }

        // Gather everything within the threshold of the lead. The lead joins
        // its own cluster (KL = 0). An infinite threshold gathers all.
        let mut idx = Vec::new();
        let mut log_beta = f64::NEG_INFINITY;
        for (i, c) in comps.iter().enumerate() {
            if !alive[i] {
                continue;
            }
            let within = i == lead
                || cfg.epsilon.is_infinite()
                || kl_tikhonov(&c.param, &comps[lead].param, cfg.kl_mode) <= cfg.epsilon;
            if within {
                idx.push(i);
                log_beta = match cfg.weight_arith {
                    WeightArith::LogSumExp => log_add_exp(log_beta, c.log_weight),
                    WeightArith::Max => log_beta.max(c.log_weight),
                };
            }
        }

        let param = match cfg.strategy {
            Strategy::Select => comps[lead].param,
            Strategy::Cmvm => {
                if idx.len() == 1 {
                    comps[lead].param
                } else {
                    let members: Vec<Component> = idx
                        .iter()
                        .map(|&i| Component {
                            log_weight: comps[i].log_weight - log_beta,
                            param: comps[i].param,
                        })
                        .collect();
                    // Members are renormalized by construction under
                    // log-sum-exp; under max arithmetic renormalize properly
                    // so the collapse stays a valid average.
                    let cluster_mix = match cfg.weight_arith {
                        WeightArith::LogSumExp => TikhonovMixture::new(members),
                        WeightArith::Max => TikhonovMixture::new(members).normalized(),
                    };
                    cmvm(&cluster_mix, cfg.cmvm_mode)
                }
            }
        };

        clusters.push((log_beta, param));
        log_kept = match cfg.weight_arith {
            WeightArith::LogSumExp => log_add_exp(log_kept, log_beta),
            WeightArith::Max => log_kept.max(log_beta),
        };
        for i in idx {
            alive[i] = false;
            remaining -= 1;
        }
    }

    Clustering { clusters, log_kept }
}

fn mixture_from_clusters(clusters: Vec<(f64, TikhonovParam)>) -> TikhonovMixture {
    TikhonovMixture::new(
        clusters
            .into_iter()
            .map(|(log_weight, param)| Component { log_weight, param })
            .collect(),
    )
    .normalized()
}

/// Adaptive-order reduction: cluster until the input is exhausted.
///
/// The output is normalized, never of higher order than the input, and its
/// KL divergence from the input is bounded by `cfg.epsilon` (for exact KL
/// decisions; the approximate modes trade that guarantee for speed).
pub fn reduce_unbounded(f: &TikhonovMixture, cfg: &ReductionConfig) -> TikhonovMixture {
    cfg.validate();
    assert!(cfg.l_max.is_none(), "reduce_unbounded requires l_max = None");
    assert!(
        f.is_normalized(),
        "reduce_unbounded requires a normalized input"
    );
    let c = cluster(f, cfg, None);
    if cfg.weight_arith == WeightArith::LogSumExp {
        debug_assert!(c.log_kept.abs() <= 1e-9, "mass leak: {}", c.log_kept);
    }
    mixture_from_clusters(c.clusters)
}

/// Limited-order reduction: stop after `cfg.l_max` clusters, drop the rest,
/// and discount the slip confidence by the kept mass.
///
/// Returns the renormalized surviving mixture and
/// `phi_new = (sum of emitted cluster weights) * phi_prev`, with the cluster
/// weights measured in the input normalization before the discard.
pub fn reduce_limited(
    f: &TikhonovMixture,
    cfg: &ReductionConfig,
    phi_prev: SlipConfidence,
) -> (TikhonovMixture, SlipConfidence) {
    cfg.validate();
    let l_max = cfg.l_max.expect("reduce_limited requires a finite l_max");
    assert!(
        f.is_normalized(),
        "reduce_limited requires a normalized input"
    );
    let c = cluster(f, cfg, Some(l_max));
    // Rounding in the log-domain accumulation can leave the fully-kept case
    // at 1 - O(eps); snap so downstream full-confidence checks stay exact.
    let kept = if c.log_kept.abs() <= 1e-12 {
        1.0
    } else {
        c.log_kept.exp().min(1.0)
    };
    debug_assert!(kept > 0.0, "all mass discarded");
    (
        mixture_from_clusters(c.clusters),
        SlipConfidence::new(kept * phi_prev.value()),
    )
}

/// One step of the first-order PLL that the single-trajectory reduction loop
/// is equivalent to at high SNR: a soft-decision phase detector with an
/// adaptive loop gain set by the running concentration.
///
/// `prev` is the tracked message parameter at the previous symbol, `r` the
/// received sample, `soft_symbol` the (soft) symbol decision and `sigma2` the
/// per-component noise variance. Returns the predicted circular mean in
/// `[0, 2pi)`. The first-order mean update is independent of the phase
/// increment variance (`sigma_delta_sq` enters only the concentration damp,
/// which leaves the mean unchanged); the parameter is accepted so call sites
/// mirror the mixture-path step.
pub fn pll_step_diagnostic(
    prev: &TikhonovParam,
    r: Complex64,
    soft_symbol: Complex64,
    sigma2: f64,
    sigma_delta_sq: f64,
) -> f64 {
    let _ = sigma_delta_sq;
    let theta_prev = prev.mean();
    let gain_denom = (prev.z() + r * soft_symbol.conj() / sigma2).norm();
    if gain_denom == 0.0 || soft_symbol.norm() == 0.0 {
        return theta_prev;
    }
    let gain = r.norm() * soft_symbol.norm() / (gain_denom * sigma2);
    let detector = wrap_pi(r.arg() - soft_symbol.arg() - theta_prev);
    wrap_2pi(theta_prev + gain * detector)
}
