//! Packet-level Monte-Carlo execution and CSV emission.
//!
//! Packets are independent: each one derives its own RNG stream from the
//! base seed, the Eb/N0 index and the packet index, so results are identical
//! regardless of how many workers run them. Aggregation walks packets in
//! index order.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use phasemix::baselines::{dp_forward_backward, run_turbo_dp, DpConfig};
use phasemix::channel::{
    ebn0_to_sigma2, generate_realization, ChannelRealization, Constellation, FrameConfig,
    SymbolBelief,
};
use phasemix::counters;
use phasemix::ldpc::{parse_alist, LdpcCode, LlrCombine};
use phasemix::spa::{
    backward_pass, compute_pu, forward_pass, run_turbo, LlrLogApprox, MessageSet, SpaConfig,
    TurboConfig,
};
use phasemix::reduction::{ReductionConfig, WeightArith};

use crate::complexity::complexity_table;
use crate::config::{Algorithm, SimConfig};

/// Measured operation counts, normalized per channel symbol per outer
/// iteration.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MeasuredCounts {
    pub muls_per_symbol_iter: f64,
    pub luts_per_symbol_iter: f64,
}

/// Aggregated outcome of one (Eb/N0, algorithm) point.
#[derive(Debug, Clone)]
pub struct SnrResult {
    pub ebn0_db: f64,
    pub algo: String,
    pub packets: usize,
    pub pkt_errors: usize,
    pub bit_errors: u64,
    pub info_bits: u64,
    pub per: f64,
    pub per_ci95: f64,
    pub ber: f64,
    pub ber_ci95: f64,
    pub mean_outer_iters: f64,
    /// Mean mixture order per outer iteration (empty for the DP receiver),
    /// with the number of packets that reached each iteration.
    pub gamma_per_iter: Vec<(f64, usize)>,
    pub counts: Option<MeasuredCounts>,
    /// Mean total variation against the DP oracle on first-iteration upward
    /// beliefs (only with `oracle-check`).
    pub oracle_tv_mean: Option<f64>,
    pub wall_ms: u128,
    /// Raised when too few error events were seen for the normal-
    /// approximation interval to be trustworthy.
    pub low_error_count: bool,
}

#[derive(Debug, Clone)]
pub struct SimResult {
    pub rows: Vec<SnrResult>,
    pub block_len: usize,
    pub data_symbols: usize,
}

struct PacketOutcome {
    pkt_error: bool,
    bit_errors: u64,
    info_bits: u64,
    outer_iters: usize,
    gamma_per_iter: Vec<f64>,
    counts: counters::OpCounts,
    oracle_tv: Option<f64>,
}

/// Shared per-run context.
struct RunContext {
    cfg: SimConfig,
    constellation: Constellation,
    frame: FrameConfig,
    code: LdpcCode,
}

impl RunContext {
    fn build(cfg: &SimConfig) -> Result<Self> {
        let constellation = Constellation::mpsk(cfg.mod_order)
            .map_err(|e| anyhow::anyhow!("bad modulation order: {e}"))?;
        let text = std::fs::read_to_string(&cfg.code_path)
            .with_context(|| format!("reading code {}", cfg.code_path.display()))?;
        let h = parse_alist(&text).context("parsing alist")?;
        let code = LdpcCode::new(h);
        if code.encoder().punctured_rows() > 0 {
            eprintln!(
                "warning: parity-check matrix is rank deficient; punctured {} dependent rows",
                code.encoder().punctured_rows()
            );
        }
        let bits = constellation.bits_per_symbol() as usize;
        if code.n() % bits != 0 {
            bail!(
                "code length {} is not a multiple of {} bits per symbol",
                code.n(),
                bits
            );
        }
        let frame = FrameConfig::for_data_symbols(code.n() / bits, cfg.preamble_len, cfg.pilot_period);
        cfg.validate(frame.block_len)
            .map_err(|e| anyhow::anyhow!("invalid config: {e}"))?;
        Ok(Self {
            cfg: cfg.clone(),
            constellation,
            frame,
            code,
        })
    }

    fn spa_config(&self) -> SpaConfig {
        let base_reduction = ReductionConfig {
            epsilon: self.cfg.epsilon,
            kl_mode: self.cfg.kl_mode,
            strategy: self.cfg.strategy,
            weight_arith: WeightArith::LogSumExp,
            ..ReductionConfig::default_cmvm()
        };
        match self.cfg.algo {
            Algorithm::Unlimited => SpaConfig {
                reduction: base_reduction,
                slip_recovery: false,
                llr_log_approx: LlrLogApprox::None,
            },
            Algorithm::Limited { l_max } => SpaConfig {
                reduction: base_reduction.with_l_max(l_max),
                slip_recovery: true,
                llr_log_approx: LlrLogApprox::None,
            },
            Algorithm::Select { l_max } => SpaConfig {
                reduction: ReductionConfig {
                    strategy: phasemix::reduction::Strategy::Select,
                    ..base_reduction
                }
                .with_l_max(l_max),
                slip_recovery: true,
                llr_log_approx: LlrLogApprox::Linear,
            },
            Algorithm::Barb => SpaConfig::single_component_baseline(),
            Algorithm::Dp { .. } => SpaConfig::unlimited(self.cfg.epsilon),
        }
    }

    fn turbo_config(&self) -> TurboConfig {
        let mut t = TurboConfig::new(self.spa_config());
        t.early_stop = self.cfg.early_stop;
        t.llr_combine = match self.cfg.algo {
            Algorithm::Select { .. } | Algorithm::Barb => LlrCombine::MaxLog,
            _ => LlrCombine::Exact,
        };
        t
    }
}

/// Decorrelate packet seeds (splitmix64 finalizer).
fn mix_seed(base: u64, snr_idx: usize, pkt: usize) -> u64 {
    let mut z = base
        .wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(1 + snr_idx as u64))
        .wrapping_add(0x2545_f491_4f6c_dd1du64.wrapping_mul(1 + pkt as u64));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn run_packet(ctx: &RunContext, ebn0_db: f64, snr_idx: usize, pkt: usize) -> PacketOutcome {
    let cfg = &ctx.cfg;
    let seed = mix_seed(cfg.base_seed, snr_idx, pkt);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xface_feed);
    let info: Vec<u8> = (0..ctx.code.k()).map(|_| rng.gen_range(0..2u8)).collect();
    let cw = ctx.code.encoder().encode(&info);
    let data_syms = ctx.constellation.map_bits(&cw);
    let tx: Vec<_> = ctx
        .frame
        .assemble(&data_syms)
        .iter()
        .map(|&p| ctx.constellation.point(p))
        .collect();
    let sigma2 = ebn0_to_sigma2(
        ebn0_db,
        &ctx.frame,
        ctx.code.rate(),
        ctx.constellation.bits_per_symbol(),
    );
    let real = generate_realization(&tx, &ctx.frame, sigma2, cfg.sigma_delta, seed)
        .expect("valid channel parameters");

    if cfg.instrument {
        counters::start();
    }
    let out = match cfg.algo {
        Algorithm::Dp { q } => run_turbo_dp(
            &real,
            &ctx.frame,
            &ctx.constellation,
            &ctx.code,
            cfg.outer_iters,
            &DpConfig::new(q),
            &ctx.turbo_config(),
        ),
        _ => run_turbo(
            &real,
            &ctx.frame,
            &ctx.constellation,
            &ctx.code,
            cfg.outer_iters,
            &ctx.turbo_config(),
        ),
    };
    let counts = if cfg.instrument {
        counters::take()
    } else {
        counters::OpCounts::default()
    };

    let oracle_tv = if cfg.oracle_check {
        Some(oracle_tv(ctx, &real))
    } else {
        None
    };

    let bit_errors = out
        .info_bits
        .iter()
        .zip(&info)
        .filter(|(a, b)| a != b)
        .count() as u64;
    // A packet that never produced bits (converged-degenerate) counts clean.
    let pkt_error = if out.info_bits.is_empty() {
        true
    } else {
        bit_errors > 0
    };
    PacketOutcome {
        pkt_error,
        bit_errors,
        info_bits: info.len() as u64,
        outer_iters: out.outer_iters_run,
        gamma_per_iter: out.gamma_per_iter,
        counts,
        oracle_tv,
    }
}

/// Mean first-iteration total variation between the configured receiver's
/// upward beliefs and the DP oracle at Q = 16.
fn oracle_tv(ctx: &RunContext, real: &ChannelRealization) -> f64 {
    let m = ctx.constellation.order();
    let beliefs: Vec<SymbolBelief> = (0..ctx.frame.block_len)
        .map(|k| {
            if ctx.frame.is_pilot(k) {
                SymbolBelief::indicator(m, ctx.frame.pilot_symbol)
            } else {
                SymbolBelief::uniform(m)
            }
        })
        .collect();
    let dp = dp_forward_backward(
        real,
        &beliefs,
        &ctx.frame,
        &ctx.constellation,
        &DpConfig::new(16),
    );
    let spa_cfg = ctx.spa_config();
    let msgs = MessageSet {
        forward: forward_pass(real, &beliefs, &ctx.frame, &ctx.constellation, &spa_cfg),
        backward: backward_pass(real, &beliefs, &ctx.frame, &ctx.constellation, &spa_cfg),
    };
    let data = ctx.frame.data_positions();
    let mut acc = 0.0;
    for &kp in &data {
        let pu = compute_pu(
            &msgs,
            real.received[kp],
            real.sigma2,
            &ctx.constellation,
            kp,
            &spa_cfg,
        );
        acc += 0.5
            * pu.probs()
                .iter()
                .zip(dp.pu[kp].probs())
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>();
    }
    acc / data.len() as f64
}

fn ci95(p: f64, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    1.96 * (p * (1.0 - p) / n as f64).sqrt()
}

/// Run the whole experiment; returns the aggregated rows and writes
/// `results.csv`, `gamma.csv` and `counts.csv` under the configured output
/// directory.
pub fn run(cfg: &SimConfig) -> Result<SimResult> {
    let ctx = RunContext::build(cfg)?;
    let mut rows = Vec::new();

    for (snr_idx, &ebn0_db) in cfg.ebn0_db.iter().enumerate() {
        let t0 = Instant::now();
        let outcomes: Vec<PacketOutcome> = (0..cfg.packets)
            .into_par_iter()
            .map(|pkt| run_packet(&ctx, ebn0_db, snr_idx, pkt))
            .collect();

        let packets = outcomes.len();
        let pkt_errors = outcomes.iter().filter(|o| o.pkt_error).count();
        let bit_errors: u64 = outcomes.iter().map(|o| o.bit_errors).sum();
        let info_bits: u64 = outcomes.iter().map(|o| o.info_bits).sum();
        let per = pkt_errors as f64 / packets as f64;
        let ber = if info_bits > 0 {
            bit_errors as f64 / info_bits as f64
        } else {
            0.0
        };
        let mean_outer_iters =
            outcomes.iter().map(|o| o.outer_iters as f64).sum::<f64>() / packets as f64;

        // Mean mixture order per iteration over the packets that reached it.
        let max_iters = outcomes.iter().map(|o| o.gamma_per_iter.len()).max().unwrap_or(0);
        let mut gamma_per_iter = Vec::with_capacity(max_iters);
        for i in 0..max_iters {
            let values: Vec<f64> = outcomes
                .iter()
                .filter_map(|o| o.gamma_per_iter.get(i).copied())
                .collect();
            gamma_per_iter.push((
                values.iter().sum::<f64>() / values.len() as f64,
                values.len(),
            ));
        }

        let counts = if cfg.instrument {
            let per_symbol_iter: Vec<(f64, f64)> = outcomes
                .iter()
                .map(|o| {
                    let denom = (ctx.frame.block_len * o.outer_iters) as f64;
                    (o.counts.muls as f64 / denom, o.counts.luts as f64 / denom)
                })
                .collect();
            let n = per_symbol_iter.len() as f64;
            Some(MeasuredCounts {
                muls_per_symbol_iter: per_symbol_iter.iter().map(|c| c.0).sum::<f64>() / n,
                luts_per_symbol_iter: per_symbol_iter.iter().map(|c| c.1).sum::<f64>() / n,
            })
        } else {
            None
        };

        let oracle_tv_mean = if cfg.oracle_check {
            let tvs: Vec<f64> = outcomes.iter().filter_map(|o| o.oracle_tv).collect();
            Some(tvs.iter().sum::<f64>() / tvs.len() as f64)
        } else {
            None
        };

        let low_error_count = pkt_errors > 0 && pkt_errors < 20;
        if low_error_count {
            eprintln!(
                "warning: only {pkt_errors} packet errors at {ebn0_db} dB; confidence interval unreliable (recommend >= 20)"
            );
        }

        rows.push(SnrResult {
            ebn0_db,
            algo: cfg.algo.label(),
            packets,
            pkt_errors,
            bit_errors,
            info_bits,
            per,
            per_ci95: ci95(per, packets),
            ber,
            ber_ci95: ci95(ber, info_bits as usize),
            mean_outer_iters,
            gamma_per_iter,
            counts,
            oracle_tv_mean,
            wall_ms: t0.elapsed().as_millis(),
            low_error_count,
        });
    }

    let result = SimResult {
        rows,
        block_len: ctx.frame.block_len,
        data_symbols: ctx.frame.data_count(),
    };
    write_outputs(cfg, &ctx, &result)?;
    Ok(result)
}

/// CSV schemas (stable, documented):
///
/// - `results.csv`: `ebn0_db,algo,packets,pkt_errors,per,per_ci95,bit_errors,info_bits,ber,ber_ci95,mean_outer_iters,oracle_tv`
/// - `gamma.csv`:   `ebn0_db,algo,iter,mean_order,packets_at_iter`
/// - `counts.csv`:  `ebn0_db,algo,measured_muls,measured_luts,table_muls,table_luts,gamma_mean`
///
/// Wall-clock time is intentionally left out of the files so identical
/// configurations produce identical bytes.
fn write_outputs(cfg: &SimConfig, ctx: &RunContext, result: &SimResult) -> Result<()> {
    std::fs::create_dir_all(&cfg.out_dir)
        .with_context(|| format!("creating {}", cfg.out_dir.display()))?;

    let fmt = |v: f64| -> String {
        if v.is_finite() {
            format!("{v:.6e}")
        } else {
            "inf".into()
        }
    };

    let mut results = String::from(
        "ebn0_db,algo,packets,pkt_errors,per,per_ci95,bit_errors,info_bits,ber,ber_ci95,mean_outer_iters,oracle_tv\n",
    );
    for r in &result.rows {
        let oracle = r.oracle_tv_mean.map(&fmt).unwrap_or_default();
        results.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            fmt(r.ebn0_db),
            r.algo,
            r.packets,
            r.pkt_errors,
            fmt(r.per),
            fmt(r.per_ci95),
            r.bit_errors,
            r.info_bits,
            fmt(r.ber),
            fmt(r.ber_ci95),
            fmt(r.mean_outer_iters),
            oracle,
        ));
    }
    write_file(cfg.out_dir.join("results.csv"), &results)?;

    let mut gamma = String::from("ebn0_db,algo,iter,mean_order,packets_at_iter\n");
    for r in &result.rows {
        for (i, &(mean, n)) in r.gamma_per_iter.iter().enumerate() {
            gamma.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt(r.ebn0_db),
                r.algo,
                i + 1,
                fmt(mean),
                n
            ));
        }
    }
    write_file(cfg.out_dir.join("gamma.csv"), &gamma)?;

    let mut counts = String::from(
        "ebn0_db,algo,measured_muls,measured_luts,table_muls,table_luts,gamma_mean\n",
    );
    for r in &result.rows {
        let Some(c) = r.counts else { continue };
        let gamma_mean = if r.gamma_per_iter.is_empty() {
            1.0
        } else {
            r.gamma_per_iter.iter().map(|&(g, _)| g).sum::<f64>() / r.gamma_per_iter.len() as f64
        };
        let q = match cfg.algo {
            Algorithm::Dp { q } => q,
            _ => 16,
        };
        let table = complexity_table(ctx.constellation.order(), q, &[gamma_mean.max(1.0)]);
        let (t_muls, t_luts) = match cfg.algo {
            Algorithm::Dp { .. } => (table.dp.muls as f64, table.dp.luts as f64),
            Algorithm::Barb => (table.barb.muls as f64, table.barb.luts as f64),
            _ => (table.limited[0].muls, table.limited[0].luts),
        };
        counts.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fmt(r.ebn0_db),
            r.algo,
            fmt(c.muls_per_symbol_iter),
            fmt(c.luts_per_symbol_iter),
            fmt(t_muls),
            fmt(t_luts),
            fmt(gamma_mean),
        ));
    }
    write_file(cfg.out_dir.join("counts.csv"), &counts)?;
    Ok(())
}

fn write_file(path: std::path::PathBuf, content: &str) -> Result<()> {
    let mut f = std::fs::File::create(&path)
        .with_context(|| format!("creating {}", path.display()))?;
    f.write_all(content.as_bytes())
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Convenience wrapper used by tests: run with outputs under a throwaway
/// directory.
pub fn run_to(cfg: &SimConfig, out_dir: &Path) -> Result<SimResult> {
    let mut cfg = cfg.clone();
    cfg.out_dir = out_dir.to_path_buf();
    run(&cfg)
}
