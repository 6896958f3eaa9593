//! Monte-Carlo experiment runner for the phasemix receiver: configuration,
//! packet-level simulation across Eb/N0 points, operation-count
//! instrumentation against the closed-form complexity table, and CSV
//! emission for plotting.

pub mod complexity;
pub mod config;
pub mod runner;

pub use complexity::{complexity_table, ComplexityTable};
pub use config::{Algorithm, ConfigError, SimConfig};
pub use runner::{run, MeasuredCounts, SimResult, SnrResult};
