//! Reference policies: a probe-and-smooth throughput rule (RB) and a
//! buffer-based Lyapunov utility rule with upswitch capping (BB).
//!
//! Neither comes with published parameter values for this setting; the
//! defaults here are reconstructions and every one of them can be overridden.

mod bb;
mod rb;

pub use bb::{bb_decide, BbParams, BbPolicy, BbState};
pub use rb::{rb_decide, RbParams, RbPolicy, RbState};

/// Highest level whose bitrate does not exceed `rate_kbps` (level 0 if none).
pub(crate) fn quantize(bitrates_kbps: &[f64], rate_kbps: f64) -> usize {
    bitrates_kbps
        .iter()
        .rposition(|&r| r <= rate_kbps)
        .unwrap_or(0)
}
