//! Trace-driven simulator for adaptive bitrate video streaming.
//!
//! The crate models a client that downloads a video segment by segment over a
//! time-varying channel, and lets pluggable rate adaptation policies pick the
//! quality of every segment:
//!
//! - [`media`]: bitrate ladder and per-segment sizes ([`media::Manifest`]).
//! - [`channel`]: bandwidth traces, a two-state markovian generator and the
//!   fluid download model.
//! - [`session`]: the request/download/buffer loop and its per-epoch log.
//! - [`l2a`]: the L2A online-learning policy.
//! - [`baselines`]: throughput-based (RB) and buffer-based (BB) policies.
//! - [`metrics`] and [`benchmark`]: QoE metrics, the hindsight benchmark,
//!   regret and constraint residuals.
//! - [`experiment`]: scenario configs, batch comparisons and artifact output.
//!
//! See the `examples/` directory for one runnable program per capability.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod benchmark;
pub mod channel;
pub mod error;
pub mod experiment;
pub mod format;
pub mod l2a;
pub mod media;
pub mod metrics;
pub mod policy;
pub mod session;

pub use error::{Error, Result};
