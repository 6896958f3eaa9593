//! Batch Monte-Carlo CLI for the phasemix receiver.
//!
//! ```bash
//! phasemix-sim --algo limited:3 --mod-order 8 --sigma-delta 0.05 \
//!     --ebn0 6,7,8 --packets 200 --code data/peg_96_48.alist --out results
//! ```
//!
//! Every flag can also come from `--config <file>` (same key names); flags
//! given on the command line win.

use anyhow::Result;
use clap::Parser;
use std::path::PathBuf;

use phasemix_sim::config::SimConfig;
use phasemix_sim::runner;

#[derive(Parser, Debug)]
#[command(name = "phasemix-sim", about = "Monte-Carlo runner for Tikhonov-mixture phase tracking with LDPC decoding", version)]
struct Cli {
    /// Key-value config file applied before the flags below.
    #[arg(long)]
    config: Option<PathBuf>,

    /// MPSK order (2, 4, 8, ...).
    #[arg(long = "mod-order")]
    mod_order: Option<usize>,

    /// Phase increment standard deviation, rad/symbol.
    #[arg(long = "sigma-delta")]
    sigma_delta: Option<f64>,

    /// Comma-separated Eb/N0 points in dB.
    #[arg(long)]
    ebn0: Option<String>,

    /// One pilot every this many post-preamble slots (0 disables).
    #[arg(long = "pilot-period")]
    pilot_period: Option<usize>,

    /// Leading pilot block length.
    #[arg(long)]
    preamble: Option<usize>,

    /// unlimited | limited[:L] | select[:L] | dp[:Q] | barb.
    #[arg(long)]
    algo: Option<String>,

    /// Mixture order bound for bare `limited`/`select`.
    #[arg(long = "max-order")]
    max_order: Option<usize>,

    /// KL clustering threshold in nats (or `inf`).
    #[arg(long)]
    epsilon: Option<String>,

    /// exact | approx | coarse.
    #[arg(long = "kl-mode")]
    kl_mode: Option<String>,

    /// cmvm | select.
    #[arg(long)]
    strategy: Option<String>,

    /// Outer (phase/decoder) iterations.
    #[arg(long = "outer-iters")]
    outer_iters: Option<usize>,

    /// Packets per Eb/N0 point.
    #[arg(long)]
    packets: Option<usize>,

    /// Base seed; packets derive their own streams from it.
    #[arg(long)]
    seed: Option<u64>,

    /// Parity-check matrix in alist format.
    #[arg(long)]
    code: Option<PathBuf>,

    /// Output directory for results.csv / gamma.csv / counts.csv.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Measure multiply/LUT counts.
    #[arg(long)]
    instrument: bool,

    /// Cross-check upward beliefs against the DP oracle (first iteration).
    #[arg(long = "oracle-check")]
    oracle_check: bool,

    /// Keep iterating after the decoder converges (for order statistics).
    #[arg(long = "no-early-stop")]
    no_early_stop: bool,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let mut cfg = match &cli.config {
        Some(path) => SimConfig::from_file(path)?,
        None => SimConfig::default(),
    };

    // `max-order` must land before `algo` so an explicit `algo` parameter
    // still wins, and after it so a bare algo picks it up; apply both ways.
    if let Some(v) = cli.max_order {
        cfg.set("max-order", &v.to_string())?;
    }
    if let Some(v) = &cli.algo {
        cfg.set("algo", v)?;
    }
    if let Some(v) = cli.mod_order {
        cfg.set("mod-order", &v.to_string())?;
    }
    if let Some(v) = cli.sigma_delta {
        cfg.set("sigma-delta", &v.to_string())?;
    }
    if let Some(v) = &cli.ebn0 {
        cfg.set("ebn0", v)?;
    }
    if let Some(v) = cli.pilot_period {
        cfg.set("pilot-period", &v.to_string())?;
    }
    if let Some(v) = cli.preamble {
        cfg.set("preamble", &v.to_string())?;
    }
    if let Some(v) = &cli.epsilon {
        cfg.set("epsilon", v)?;
    }
    if let Some(v) = &cli.kl_mode {
        cfg.set("kl-mode", v)?;
    }
    if let Some(v) = &cli.strategy {
        cfg.set("strategy", v)?;
    }
    if let Some(v) = cli.outer_iters {
        cfg.set("outer-iters", &v.to_string())?;
    }
    if let Some(v) = cli.packets {
        cfg.set("packets", &v.to_string())?;
    }
    if let Some(v) = cli.seed {
        cfg.set("seed", &v.to_string())?;
    }
    if let Some(v) = &cli.code {
        cfg.code_path = v.clone();
    }
    if let Some(v) = &cli.out {
        cfg.out_dir = v.clone();
    }
    if cli.instrument {
        cfg.instrument = true;
    }
    if cli.oracle_check {
        cfg.oracle_check = true;
    }
    if cli.no_early_stop {
        cfg.early_stop = false;
    }

    let result = runner::run(&cfg)?;
    println!(
        "block: {} symbols ({} data); algorithm {}",
        result.block_len,
        result.data_symbols,
        cfg.algo.label()
    );
    println!(
        "{:>8} {:>9} {:>11} {:>11} {:>11} {:>11} {:>8}",
        "Eb/N0", "packets", "PER", "+-95%", "BER", "+-95%", "iters"
    );
    for r in &result.rows {
        println!(
            "{:>8.2} {:>9} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e} {:>8.2}",
            r.ebn0_db, r.packets, r.per, r.per_ci95, r.ber, r.ber_ci95, r.mean_outer_iters
        );
        if let Some(c) = r.counts {
            println!(
                "         counts/symbol/iter: {:.1} muls, {:.1} luts",
                c.muls_per_symbol_iter, c.luts_per_symbol_iter
            );
        }
        if let Some(tv) = r.oracle_tv_mean {
            println!("         oracle TV (iter 1): {tv:.4}");
        }
    }
    println!("CSV written under {}", cfg.out_dir.display());
    Ok(())
}
