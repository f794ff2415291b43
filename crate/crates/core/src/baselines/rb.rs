use serde::{Deserialize, Serialize};

use super::quantize;
use crate::policy::{AbrPolicy, DecisionContext};
use crate::session::EpochFeedback;

/// Throughput-based rule: additive-increase probing, EWMA smoothing and a
/// dead-zone quantizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RbParams {
    /// Probe convergence gain `κ`, per second.
    pub kappa: f64,
    /// Additive probing increment `w`, in kbps.
    pub probe_increment_kbps: f64,
    /// Upswitch dead zone: move up only if the estimate is at least
    /// `(1 + dead_zone)` times the candidate bitrate.
    pub dead_zone: f64,
    /// Per-epoch EWMA weight on the newest probe estimate.
    pub ewma_weight: f64,
}

impl Default for RbParams {
    fn default() -> Self {
        RbParams {
            kappa: 0.14,
            probe_increment_kbps: 300.0,
            dead_zone: 0.15,
            ewma_weight: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RbState {
    pub bw_probe_kbps: f64,
    pub bw_smooth_kbps: f64,
    pub last_index: usize,
    pub target_interrequest_s: f64,
    initialized: bool,
}

/// Updates the bandwidth estimates with the last measured throughput and
/// picks the next level.
pub fn rb_decide(
    state: &mut RbState,
    params: &RbParams,
    feedback: Option<&EpochFeedback>,
    bitrates_kbps: &[f64],
    segment_duration_s: f64,
) -> usize {
    let Some(fb) = feedback else {
        state.last_index = 0;
        state.target_interrequest_s = segment_duration_s;
        return 0;
    };
    let measured = fb.realized_rate_kbps;
    if !state.initialized {
        state.bw_probe_kbps = measured;
        state.bw_smooth_kbps = measured;
        state.initialized = true;
    } else {
        // Requests are paced one segment duration apart once the buffer sits at
        // its target, so the probe runs on that clock.
        let gain = (params.kappa * state.target_interrequest_s).min(1.0);
        let w = params.probe_increment_kbps;
        let overshoot = (state.bw_probe_kbps - measured + w).max(0.0);
        state.bw_probe_kbps = (state.bw_probe_kbps + gain * (w - overshoot)).max(0.0);
        state.bw_smooth_kbps += params.ewma_weight * (state.bw_probe_kbps - state.bw_smooth_kbps);
    }
    let up = quantize(bitrates_kbps, state.bw_smooth_kbps / (1.0 + params.dead_zone));
    let down = quantize(bitrates_kbps, state.bw_smooth_kbps);
    let last = state.last_index;
    let next = if last < up {
        up
    } else if last <= down {
        last
    } else {
        down
    };
    state.last_index = next;
    state.target_interrequest_s = segment_duration_s;
    next
}

#[derive(Debug, Clone, Default)]
pub struct RbPolicy {
    pub params: RbParams,
    pub state: RbState,
}

impl RbPolicy {
    pub fn new(params: RbParams) -> Self {
        RbPolicy {
            params,
            state: RbState::default(),
        }
    }
}

impl AbrPolicy for RbPolicy {
    fn name(&self) -> String {
        "rb".to_string()
    }

    fn decide(&mut self, ctx: &DecisionContext<'_>, feedback: Option<&EpochFeedback>) -> usize {
        rb_decide(
            &mut self.state,
            &self.params,
            feedback,
            ctx.bitrates_kbps,
            ctx.segment_duration_s,
        )
    }
}
