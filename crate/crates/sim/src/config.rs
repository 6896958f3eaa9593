//! Experiment configuration: a flat key-value file, every key overridable by
//! the CLI flag of the same name.
//!
//! Recognized keys (one `key = value` pair per line, `#` comments):
//!
//! ```text
//! mod-order     = 8            # MPSK order
//! sigma-delta   = 0.05         # phase increment std, rad/symbol
//! ebn0          = 6,7,8        # Eb/N0 points in dB, comma separated
//! pilot-period  = 20           # one pilot every this many post-preamble slots
//! preamble      = 10           # leading pilot block length
//! algo          = limited:3    # unlimited | limited[:L] | select[:L] | dp[:Q] | barb
//! max-order     = 3            # L for bare `limited` / `select`
//! epsilon       = 4.0          # KL clustering threshold, nats
//! kl-mode       = exact        # exact | approx | coarse
//! strategy      = cmvm         # cmvm | select (collapse strategy)
//! outer-iters   = 4
//! packets       = 100
//! seed          = 1
//! code          = data/peg_96_48.alist
//! out           = results      # output directory for the CSV files
//! instrument    = false        # measure multiply/LUT counts
//! oracle-check  = false        # cross-check Pu against the DP oracle
//! early-stop    = true         # stop outer loop on parity satisfaction
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use thiserror::Error;

use phasemix::reduction::Strategy;
use phasemix::tikhonov::KlMode;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config line {line}: expected `key = value`, got {text:?}")]
    BadLine { line: usize, text: String },
    #[error("config line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("bad value for {key}: {value:?} ({why})")]
    BadValue {
        key: &'static str,
        value: String,
        why: String,
    },
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Receiver selection for one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    /// Adaptive unbounded mixture tracking.
    Unlimited,
    /// Order-limited mixture tracking with slip recovery.
    Limited { l_max: usize },
    /// Clustering-free selection variant (order-limited, slip recovery).
    Select { l_max: usize },
    /// Discrete-phase trellis receiver at `q` levels per constellation point.
    Dp { q: usize },
    /// Single-component canonical-model baseline.
    Barb,
}

impl Algorithm {
    /// Parse `unlimited | limited[:L] | select[:L] | dp[:Q] | barb`, with
    /// `default_order` filling in a bare `limited`/`select`.
    pub fn parse(s: &str, default_order: usize) -> Result<Self, ConfigError> {
        let bad = |why: &str| ConfigError::BadValue {
            key: "algo",
            value: s.to_string(),
            why: why.to_string(),
        };
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let parse_arg = |what: &str, dflt: usize| -> Result<usize, ConfigError> {
            match arg {
                None => Ok(dflt),
                Some(a) => a
                    .parse::<usize>()
                    .ok()
                    .filter(|&v| v >= 1)
                    .ok_or_else(|| bad(&format!("bad {what}"))),
            }
        };
        match name {
            "unlimited" => {
                if arg.is_some() {
                    return Err(bad("unlimited takes no parameter"));
                }
                Ok(Self::Unlimited)
            }
            "limited" => Ok(Self::Limited {
                l_max: parse_arg("order", default_order)?,
            }),
            "select" => Ok(Self::Select {
                l_max: parse_arg("order", default_order)?,
            }),
            "dp" => Ok(Self::Dp {
                q: parse_arg("quantization", 16)?,
            }),
            "barb" => {
                if arg.is_some() {
                    return Err(bad("barb takes no parameter"));
                }
                Ok(Self::Barb)
            }
            _ => Err(bad("unknown algorithm")),
        }
    }

    /// Stable label used in CSV rows.
    pub fn label(&self) -> String {
        match self {
            Self::Unlimited => "unlimited".into(),
            Self::Limited { l_max } => format!("limited{l_max}"),
            Self::Select { l_max } => format!("select{l_max}"),
            Self::Dp { q } => format!("dp{q}"),
            Self::Barb => "barb".into(),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// One experiment: an algorithm swept over Eb/N0 points.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub mod_order: usize,
    pub sigma_delta: f64,
    pub ebn0_db: Vec<f64>,
    pub pilot_period: usize,
    pub preamble_len: usize,
    pub algo: Algorithm,
    pub epsilon: f64,
    pub kl_mode: KlMode,
    pub strategy: Strategy,
    pub outer_iters: usize,
    pub packets: usize,
    pub base_seed: u64,
    pub code_path: PathBuf,
    pub out_dir: PathBuf,
    pub instrument: bool,
    pub oracle_check: bool,
    pub early_stop: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            mod_order: 8,
            sigma_delta: 0.05,
            ebn0_db: vec![8.0],
            pilot_period: 20,
            preamble_len: 10,
            algo: Algorithm::Limited { l_max: 3 },
            epsilon: 4.0,
            kl_mode: KlMode::Exact,
            strategy: Strategy::Cmvm,
            outer_iters: 4,
            packets: 100,
            base_seed: 1,
            code_path: PathBuf::from("data/peg_96_48.alist"),
            out_dir: PathBuf::from("results"),
            instrument: false,
            oracle_check: false,
            early_stop: true,
        }
    }
}

/// Largest `K * L_total` product the DP oracle path accepts.
pub const ORACLE_STATE_LIMIT: usize = 1 << 24;

impl SimConfig {
    /// Load a key-value config file over the defaults.
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = Self::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    /// Apply key-value lines on top of the current values.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::BadLine {
                line,
                text: raw.to_string(),
            })?;
            self.set(key.trim(), value.trim())
                .map_err(|e| match e {
                    ConfigError::BadValue { .. } => e,
                    ConfigError::UnknownKey { key, .. } => ConfigError::UnknownKey { line, key },
                    other => other,
                })?;
        }
        Ok(())
    }

    /// Set one key to a textual value (shared by the file parser and the CLI
    /// override path).
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        fn num<T: std::str::FromStr>(key: &'static str, v: &str) -> Result<T, ConfigError> {
            v.parse().map_err(|_| ConfigError::BadValue {
                key,
                value: v.to_string(),
                why: "not parseable".into(),
            })
        }
        match key {
            "mod-order" => self.mod_order = num("mod-order", value)?,
            "sigma-delta" => self.sigma_delta = num("sigma-delta", value)?,
            "ebn0" => {
                let mut pts = Vec::new();
                for part in value.split(',') {
                    pts.push(num::<f64>("ebn0", part.trim())?);
                }
                if pts.is_empty() {
                    return Err(ConfigError::BadValue {
                        key: "ebn0",
                        value: value.into(),
                        why: "empty list".into(),
                    });
                }
                self.ebn0_db = pts;
            }
            "pilot-period" => self.pilot_period = num("pilot-period", value)?,
            "preamble" => self.preamble_len = num("preamble", value)?,
            "algo" => {
                let default_order = match self.algo {
                    Algorithm::Limited { l_max } | Algorithm::Select { l_max } => l_max,
                    _ => 3,
                };
                self.algo = Algorithm::parse(value, default_order)?;
            }
            "max-order" => {
                let l: usize = num("max-order", value)?;
                match &mut self.algo {
                    Algorithm::Limited { l_max } | Algorithm::Select { l_max } => *l_max = l,
                    _ => {}
                }
            }
            "epsilon" => {
                self.epsilon = if value == "inf" {
                    f64::INFINITY
                } else {
                    num("epsilon", value)?
                }
            }
            "kl-mode" => {
                self.kl_mode = match value {
                    "exact" => KlMode::Exact,
                    "approx" => KlMode::Approx,
                    "coarse" => KlMode::Coarse,
                    _ => {
                        return Err(ConfigError::BadValue {
                            key: "kl-mode",
                            value: value.into(),
                            why: "want exact|approx|coarse".into(),
                        })
                    }
                }
            }
            "strategy" => {
                self.strategy = match value {
                    "cmvm" => Strategy::Cmvm,
                    "select" => Strategy::Select,
                    _ => {
                        return Err(ConfigError::BadValue {
                            key: "strategy",
                            value: value.into(),
                            why: "want cmvm|select".into(),
                        })
                    }
                }
            }
            "outer-iters" => self.outer_iters = num("outer-iters", value)?,
            "packets" => self.packets = num("packets", value)?,
            "seed" => self.base_seed = num("seed", value)?,
            "code" => self.code_path = PathBuf::from(value),
            "out" => self.out_dir = PathBuf::from(value),
            "instrument" => self.instrument = parse_bool("instrument", value)?,
            "oracle-check" => self.oracle_check = parse_bool("oracle-check", value)?,
            "early-stop" => self.early_stop = parse_bool("early-stop", value)?,
            other => {
                return Err(ConfigError::UnknownKey {
                    line: 0,
                    key: other.to_string(),
                })
            }
        }
        Ok(())
    }

    /// Check cross-field consistency; called once before a run.
    pub fn validate(&self, block_len: usize) -> Result<(), ConfigError> {
        let fail = |msg: String| Err(ConfigError::Invalid(msg));
        if self.mod_order < 2 || !self.mod_order.is_power_of_two() {
            return fail(format!("mod-order must be a power of two >= 2, got {}", self.mod_order));
        }
        if self.sigma_delta < 0.0 {
            return fail("sigma-delta must be nonnegative".into());
        }
        if self.packets < 1 {
            return fail("packets must be at least 1".into());
        }
        if self.outer_iters < 1 {
            return fail("outer-iters must be at least 1".into());
        }
        if self.epsilon <= 0.0 {
            return fail("epsilon must be positive".into());
        }
        if let Algorithm::Dp { q } = self.algo {
            let l_total = q * self.mod_order;
            if l_total < 8 {
                return fail(format!("dp quantization too coarse: L = {l_total}"));
            }
            if block_len * l_total > ORACLE_STATE_LIMIT {
                return fail(format!(
                    "dp state K * L = {} exceeds the memory bound {}",
                    block_len * l_total,
                    ORACLE_STATE_LIMIT
                ));
            }
        }
        if self.oracle_check {
            let l_total = 16 * self.mod_order;
            if block_len * l_total > ORACLE_STATE_LIMIT {
                return fail("oracle check exceeds the DP memory bound".into());
            }
        }
        Ok(())
    }
}

fn parse_bool(key: &'static str, v: &str) -> Result<bool, ConfigError> {
    match v {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(ConfigError::BadValue {
            key,
            value: v.to_string(),
            why: "want true|false".into(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_algorithms() {
        assert_eq!(Algorithm::parse("unlimited", 3).unwrap(), Algorithm::Unlimited);
        assert_eq!(
            Algorithm::parse("limited:2", 3).unwrap(),
            Algorithm::Limited { l_max: 2 }
        );
        assert_eq!(
            Algorithm::parse("limited", 3).unwrap(),
            Algorithm::Limited { l_max: 3 }
        );
        assert_eq!(Algorithm::parse("dp", 3).unwrap(), Algorithm::Dp { q: 16 });
        assert_eq!(Algorithm::parse("dp:8", 3).unwrap(), Algorithm::Dp { q: 8 });
        assert_eq!(Algorithm::parse("barb", 3).unwrap(), Algorithm::Barb);
        assert!(Algorithm::parse("quux", 3).is_err());
        assert!(Algorithm::parse("limited:0", 3).is_err());
    }

    #[test]
    fn file_text_round_trip() {
        let mut cfg = SimConfig::default();
        cfg.apply_text(
            "# comment\nmod-order = 4\nebn0 = 5, 6.5 ,8\nalgo = select:2\nepsilon = 1.0\npackets = 7\ninstrument = true\n",
        )
        .unwrap();
        assert_eq!(cfg.mod_order, 4);
        assert_eq!(cfg.ebn0_db, vec![5.0, 6.5, 8.0]);
        assert_eq!(cfg.algo, Algorithm::Select { l_max: 2 });
        assert_eq!(cfg.epsilon, 1.0);
        assert_eq!(cfg.packets, 7);
        assert!(cfg.instrument);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_lines() {
        let mut cfg = SimConfig::default();
        assert!(matches!(
            cfg.apply_text("frobnicate = 1\n"),
            Err(ConfigError::UnknownKey { .. })
        ));
        assert!(matches!(
            cfg.apply_text("no equals sign\n"),
            Err(ConfigError::BadLine { .. })
        ));
    }

    #[test]
    fn validation_catches_dp_memory_bound() {
        let mut cfg = SimConfig::default();
        cfg.algo = Algorithm::Dp { q: 4096 };
        assert!(cfg.validate(4096).is_err());
        cfg.algo = Algorithm::Dp { q: 16 };
        assert!(cfg.validate(64).is_ok());
    }
}
