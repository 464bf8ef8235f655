//! Polar codes over BPSK/AWGN with belief propagation decoders.
//!
//! Decoders:
//! - [`bp::bp_decode`]: normalized min-sum BP on the polar factor graph,
//! - [`enhanced::enhanced_bp_decode`]: BP with inter-iteration LLR reweighting
//!   controlled by a global correction factor,
//! - [`qlearn::qlbp_eval`] / [`qlearn::qlbp_train`]: BP whose per-PE
//!   correction factor is chosen by a tabular Q-learning agent,
//! - [`baselines::sc_decode`] / [`baselines::scl_decode`]: SC and SCL
//!   references.
//!
//! [`sim`] holds the Monte Carlo harness used by the command-line tool.

pub mod baselines;
pub mod bp;
pub mod channel;
pub mod code;
pub mod enhanced;
pub mod error;
pub mod qlearn;
pub mod sim;
pub mod stats;

pub use bp::{BpOptions, BpOutput, MessageGrid, INF_LLR};
pub use code::PolarCode;
pub use error::{Error, Result};
pub use sim::{CurvePoint, DecoderKind, SimConfig, Simulator};
