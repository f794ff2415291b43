use serde::{Deserialize, Serialize};

use super::quantize;
use crate::error::{Error, Result};
use crate::policy::{AbrPolicy, DecisionContext};
use crate::session::EpochFeedback;

/// Lyapunov buffer-based rule. Picks the level maximizing
/// `(v_b·(υ[n] + γ_p) - Q) / S[n]` with `υ[n] = ln(S[n]/S[0])` and `Q` the
/// buffer level in segments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BbParams {
    pub v_b: f64,
    pub gamma_p: f64,
}

impl BbParams {
    /// Places the lowest decision threshold (level 0 → 1) at one segment of
    /// buffer and the highest (level N-2 → N-1) at one segment below the cap,
    /// using nominal sizes `r[n]·V`.
    pub fn from_ladder(bitrates_kbps: &[f64], segment_duration_s: f64, b_max_s: f64) -> Result<Self> {
        let n = bitrates_kbps.len();
        if n < 2 {
            return Err(Error::InvalidParameter("BB needs at least 2 levels".into()));
        }
        let q_max = b_max_s / segment_duration_s;
        let (q_low, q_high) = (1.0, (q_max - 1.0).max(1.0 + 1e-3));
        let utility: Vec<f64> = bitrates_kbps.iter().map(|r| (r / bitrates_kbps[0]).ln()).collect();
        // Boundary between m and m+1 sits at Q = v_b·(γ_p + c[m]).
        let c = |m: usize| {
            let (s0, s1) = (bitrates_kbps[m], bitrates_kbps[m + 1]);
            (utility[m] * s1 - utility[m + 1] * s0) / (s1 - s0)
        };
        let (c_low, c_high) = (c(0), c(n - 2));
        if n == 2 || !(c_high > c_low) {
            // One threshold only: put it mid-way.
            let v_b = 1.0;
            return Ok(BbParams {
                v_b,
                gamma_p: 0.5 * (q_low + q_high) / v_b - c_low,
            });
        }
        let v_b = (q_high - q_low) / (c_high - c_low);
        let gamma_p = q_low / v_b - c_low;
        let params = BbParams { v_b, gamma_p };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v_b > 0.0 && self.gamma_p > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "BB needs v_b > 0 and gamma_p > 0, got {} and {}",
                self.v_b, self.gamma_p
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BbState {
    pub params: BbParams,
    pub last_index: usize,
}

impl BbState {
    pub fn new(params: BbParams) -> Self {
        BbState {
            params,
            last_index: 0,
        }
    }
}

/// Utility-maximizing level for a buffer of `buffer_s` seconds, before capping.
pub(crate) fn bb_utility_argmax(params: &BbParams, sizes_kbit: &[f64], buffer_s: f64, segment_duration_s: f64) -> usize {
    let q = buffer_s / segment_duration_s;
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (n, &s) in sizes_kbit.iter().enumerate() {
        let utility = (s / sizes_kbit[0]).ln();
        let score = (params.v_b * (utility + params.gamma_p) - q) / s;
        if score > best_score {
            best = n;
            best_score = score;
        }
    }
    best
}

pub fn bb_decide(
    state: &mut BbState,
    feedback: Option<&EpochFeedback>,
    bitrates_kbps: &[f64],
    sizes_kbit: &[f64],
    segment_duration_s: f64,
) -> usize {
    let Some(fb) = feedback else {
        state.last_index = 0;
        return 0;
    };
    let mut next = bb_utility_argmax(&state.params, sizes_kbit, fb.buffer_s, segment_duration_s);
    let last = state.last_index;
    if next > last {
        let sustainable = quantize(bitrates_kbps, fb.realized_rate_kbps);
        if sustainable < next {
            next = sustainable.max(last);
        }
    }
    state.last_index = next;
    next
}

#[derive(Debug, Clone)]
pub struct BbPolicy {
    pub state: BbState,
}

impl BbPolicy {
    pub fn new(params: BbParams) -> Result<Self> {
        params.validate()?;
        Ok(BbPolicy {
            state: BbState::new(params),
        })
    }
}

impl AbrPolicy for BbPolicy {
    fn name(&self) -> String {
        "bb".to_string()
    }

    fn decide(&mut self, ctx: &DecisionContext<'_>, feedback: Option<&EpochFeedback>) -> usize {
        bb_decide(
            &mut self.state,
            feedback,
            ctx.bitrates_kbps,
            ctx.next_sizes_kbit,
            ctx.segment_duration_s,
        )
    }
}
