//! L2A: constrained online learning over the quality simplex.
//!
//! The policy keeps a decision distribution `ω` over the `N` quality levels.
//! Losses and the two buffer constraints are linear in `ω`:
//!
//! ```text
//! f(ω)  = -Σ ω[n]·r[n]
//! g1(ω) =  Σ ω[n]·S[n] / C - V                 (underflow)
//! g2(ω) =  V - Σ ω[n]·S[n] / C - B_max / T     (overflow)
//! ```
//!
//! Each epoch takes a projected gradient step on the linearized Lagrangian
//! `V_L·f + Q1·g1 + Q2·g2` with step `1/(2α)`, gated by a switching budget
//! `β`, then performs dual ascent on the virtual queues `Q1`, `Q2` using a
//! first-order prediction of the constraints at the new `ω`. The quality sent
//! to the server is the level whose bitrate is closest to `E_ω[r]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::policy::{AbrPolicy, DecisionContext};
use crate::session::EpochFeedback;

/// Loss and constraint values of one epoch at a given distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochValues {
    pub f: f64,
    pub g1: f64,
    pub g2: f64,
}

/// Gradients of the epoch functions with respect to `ω`. They do not depend on
/// `ω` because every function is linear.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochGradients {
    pub f: Vec<f64>,
    pub g1: Vec<f64>,
    pub g2: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Evaluates `f`, `g1`, `g2` for one epoch with segment sizes `sizes_kbit` and
/// realized rate `rate_kbps`.
pub fn loss_and_constraints(
    omega: &[f64],
    sizes_kbit: &[f64],
    bitrates_kbps: &[f64],
    rate_kbps: f64,
    segment_duration_s: f64,
    b_max_s: f64,
    horizon: usize,
) -> EpochValues {
    let download = dot(omega, sizes_kbit) / rate_kbps;
    EpochValues {
        f: -dot(omega, bitrates_kbps),
        g1: download - segment_duration_s,
        g2: segment_duration_s - download - b_max_s / horizon as f64,
    }
}

pub fn gradients(sizes_kbit: &[f64], rate_kbps: f64, bitrates_kbps: &[f64]) -> EpochGradients {
    let g1: Vec<f64> = sizes_kbit.iter().map(|s| s / rate_kbps).collect();
    EpochGradients {
        f: bitrates_kbps.iter().map(|r| -r).collect(),
        g2: g1.iter().map(|x| -x).collect(),
        g1,
    }
}

/// First-order prediction of a constraint at `omega_new` from its value and
/// gradient at `omega_prev`.
pub fn predict_constraint(
    g_prev: f64,
    grad_prev: &[f64],
    omega_new: &[f64],
    omega_prev: &[f64],
) -> f64 {
    g_prev
        + grad_prev
            .iter()
            .zip(omega_new.iter().zip(omega_prev))
            .map(|(g, (a, b))| g * (a - b))
            .sum::<f64>()
}

/// Euclidean projection onto the probability simplex (sort-based, exact).
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - 1.0) / (j + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

/// Level whose bitrate is closest to `E_ω[r]`; ties go to the lower level.
pub fn nearest_level(omega: &[f64], bitrates_kbps: &[f64]) -> usize {
    let expected = dot(omega, bitrates_kbps);
    let mut best = 0;
    let mut best_gap = f64::INFINITY;
    for (n, r) in bitrates_kbps.iter().enumerate() {
        let gap = (r - expected).abs();
        if gap < best_gap {
            best = n;
            best_gap = gap;
        }
    }
    best
}

/// How gradients gathered while the switching budget blocks updates enter the
/// next allowed step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Accumulation {
    /// Sum of all gradients since the last update.
    #[default]
    Sum,
    /// Mean of the gradients since the last update.
    Average,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L2aParams {
    pub horizon: usize,
    /// Cautiousness `V_L`.
    pub v_l: f64,
    /// Step size `α`.
    pub alpha: f64,
    /// Switching budget: at most `β·T + 1` distribution updates.
    pub beta: f64,
    #[serde(default)]
    pub accumulation: Accumulation,
    /// Unit in which bitrates enter the loss, in kbps. Only the loss gradient is
    /// rescaled; constraints stay in seconds.
    pub loss_unit_kbps: f64,
}

/// Exponent of `T` used for `V_L` unless overridden.
pub const DEFAULT_VL_EXPONENT: f64 = 0.9;
/// Bitrates enter the loss in units of 70 Mbps by default. Smaller units weight
/// bitrate more heavily against the buffer constraints: more bitrate, more
/// stalls and a larger underflow residual.
pub const DEFAULT_LOSS_UNIT_KBPS: f64 = 70_000.0;

impl L2aParams {
    /// `V_L = T^0.9` and `α = V_L·√T`.
    pub fn new(horizon: usize, beta: f64) -> Self {
        Self::with_vl_exponent(horizon, beta, DEFAULT_VL_EXPONENT)
    }

    /// `V_L = T^exponent` and `α = V_L·√T`.
    pub fn with_vl_exponent(horizon: usize, beta: f64, exponent: f64) -> Self {
        let t = horizon.max(1) as f64;
        let v_l = t.powf(exponent);
        L2aParams {
            horizon,
            v_l,
            alpha: v_l * t.sqrt(),
            beta,
            accumulation: Accumulation::Sum,
            loss_unit_kbps: DEFAULT_LOSS_UNIT_KBPS,
        }
    }

    /// Theoretical schedule: `V_L = T^(1-ε/2)`, `α = V_L·√T`.
    pub fn from_epsilon(horizon: usize, beta: f64, epsilon: f64) -> Self {
        Self::with_vl_exponent(horizon, beta, 1.0 - epsilon / 2.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v_l > 0.0 && self.v_l.is_finite()) {
            return Err(Error::InvalidParameter(format!("V_L must be positive, got {}", self.v_l)));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "beta must lie in (0, 1], got {}",
                self.beta
            )));
        }
        if !(self.loss_unit_kbps > 0.0) {
            return Err(Error::InvalidParameter("loss unit must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct L2aState {
    pub omega: Vec<f64>,
    /// Virtual queues for the underflow and overflow constraints.
    pub q: [f64; 2],
    /// Number of budgeted updates taken so far.
    pub gamma: usize,
    /// First epoch whose gradient is still pending in `grad_accum`.
    pub t_prime: usize,
    pub grad_accum: Vec<f64>,
    pub pending: usize,
    /// Number of epochs where `ω` actually changed.
    pub changes: usize,
}

impl L2aState {
    /// All mass on the lowest quality, empty queues.
    pub fn new(levels: usize) -> Self {
        let mut omega = vec![0.0; levels];
        omega[0] = 1.0;
        L2aState {
            omega,
            q: [0.0; 2],
            gamma: 0,
            t_prime: 1,
            grad_accum: vec![0.0; levels],
            pending: 0,
            changes: 0,
        }
    }
}

/// Problem data of the epoch that just completed.
#[derive(Debug, Clone, Copy)]
pub struct Observation<'a> {
    pub sizes_kbit: &'a [f64],
    pub rate_kbps: f64,
    pub bitrates_kbps: &'a [f64],
    pub segment_duration_s: f64,
    pub b_max_s: f64,
}

/// One round of the algorithm at 1-based epoch `t`. `prev` describes epoch
/// `t - 1`; with `None` the state is left untouched.
pub fn l2a_update(
    state: &mut L2aState,
    params: &L2aParams,
    t: usize,
    prev: Option<&Observation<'_>>,
) {
    let Some(obs) = prev else {
        return;
    };
    let values = loss_and_constraints(
        &state.omega,
        obs.sizes_kbit,
        obs.bitrates_kbps,
        obs.rate_kbps,
        obs.segment_duration_s,
        obs.b_max_s,
        params.horizon,
    );
    let grads = gradients(obs.sizes_kbit, obs.rate_kbps, obs.bitrates_kbps);
    let loss_weight = params.v_l / params.loss_unit_kbps;
    for (n, acc) in state.grad_accum.iter_mut().enumerate() {
        *acc += loss_weight * grads.f[n] + state.q[0] * grads.g1[n] + state.q[1] * grads.g2[n];
    }
    state.pending += 1;

    let previous = state.omega.clone();
    if (state.gamma as f64) <= params.beta * t as f64 {
        let scale = match params.accumulation {
            Accumulation::Sum => 1.0,
            Accumulation::Average => 1.0 / state.pending as f64,
        };
        let target: Vec<f64> = state
            .omega
            .iter()
            .zip(&state.grad_accum)
            .map(|(w, g)| w - scale * g / (2.0 * params.alpha))
            .collect();
        state.omega = project_simplex(&target);
        state.grad_accum.iter_mut().for_each(|g| *g = 0.0);
        state.pending = 0;
        state.t_prime = t + 1;
        state.gamma += 1;
    }
    if state.omega != previous {
        state.changes += 1;
    }

    let g1_hat = predict_constraint(values.g1, &grads.g1, &state.omega, &previous);
    let g2_hat = predict_constraint(values.g2, &grads.g2, &state.omega, &previous);
    state.q[0] = (state.q[0] + g1_hat).max(0.0);
    state.q[1] = (state.q[1] + g2_hat).max(0.0);
}

/// The L2A policy behind the common [`AbrPolicy`] interface.
#[derive(Debug, Clone)]
pub struct L2aPolicy {
    params: L2aParams,
    state: L2aState,
    label: String,
}

impl L2aPolicy {
    pub fn new(params: L2aParams, levels: usize) -> Result<Self> {
        params.validate()?;
        if levels < 2 {
            return Err(Error::InvalidParameter("L2A needs at least 2 levels".into()));
        }
        let label = format!("l2a-b{}", params.beta);
        Ok(L2aPolicy {
            params,
            state: L2aState::new(levels),
            label,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn params(&self) -> &L2aParams {
        &self.params
    }

    pub fn state(&self) -> &L2aState {
        &self.state
    }
}

impl AbrPolicy for L2aPolicy {
    fn name(&self) -> String {
        self.label.clone()
    }

    fn decide(&mut self, ctx: &DecisionContext<'_>, feedback: Option<&EpochFeedback>) -> usize {
        let obs = feedback.map(|fb| Observation {
            sizes_kbit: &fb.row_sizes_kbit,
            rate_kbps: fb.realized_rate_kbps,
            bitrates_kbps: ctx.bitrates_kbps,
            segment_duration_s: ctx.segment_duration_s,
            b_max_s: ctx.b_max_s,
        });
        l2a_update(&mut self.state, &self.params, ctx.epoch + 1, obs.as_ref());
        nearest_level(&self.state.omega, ctx.bitrates_kbps)
    }

    fn distribution(&self) -> Option<&[f64]> {
        Some(&self.state.omega)
    }
}
