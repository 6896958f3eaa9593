//! Tikhonov-mixture message passing for joint carrier-phase tracking and LDPC
//! decoding over Wiener phase-noise channels.
//!
//! The receiver approximates the continuous phase messages of the sum-product
//! algorithm by adaptive-order Tikhonov (von Mises) mixtures. Mixture growth is
//! controlled by a KL-threshold reduction step with an optimal single-component
//! collapse (circular mean and variance matching), and an optional
//! slip-confidence mechanism re-anchors tracking on pilot symbols after a
//! trajectory has been dropped.
//!
//! Module map:
//!
//! - [`bessel`]: modified Bessel function `I0` primitives in log domain.
//! - [`tikhonov`]: Tikhonov parameters, mixtures, circular moments, the CMVM
//!   collapse operator and closed-form KL divergences.
//! - [`grid`]: dense grid pdfs used as numerical oracles in tests and
//!   validation binaries.
//! - [`reduction`]: KL-threshold mixture reduction (adaptive and limited
//!   order) plus the PLL view of single-trajectory tracking.
//! - [`channel`]: MPSK constellations, pilot framing and the Wiener
//!   phase-noise channel.
//! - [`spa`]: forward/backward mixture recursions, cycle-slip recovery and the
//!   upward symbol likelihoods feeding the decoder.
//! - [`baselines`]: discrete-phase BCJR oracle on a quantized phase trellis
//!   and the single-component baseline preset.
//! - [`ldpc`]: alist parsing, encoding, belief-propagation decoding and
//!   bit/symbol belief conversion.
//! - [`counters`]: multiply/LUT instrumentation for complexity measurements.

pub mod bessel;
pub mod channel;
pub mod counters;
pub mod baselines;
pub mod grid;
pub mod ldpc;
pub mod math;
pub mod reduction;
pub mod spa;
pub mod tikhonov;

pub use channel::{ChannelRealization, Constellation, FrameConfig, SymbolBelief};
pub use reduction::{ReductionConfig, SlipConfidence};
pub use spa::{MessageSet, SpaConfig};
pub use tikhonov::{CircularMoment, TikhonovMixture, TikhonovParam, KAPPA_MAX};
