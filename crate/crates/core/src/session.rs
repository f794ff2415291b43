//! The client loop: request, download, buffer update, feedback.
//!
//! Epoch-boundary buffer levels follow
//! `B[t+1] = [B[t] - d[t]]^+ + V - Δ[t]` with the overflow delay
//! `Δ[t] = [B[t] - d[t] + V - B_max]^+`, where `d[t] = S[t][x]/C[t]` is the
//! download time. When the buffer runs dry playback pauses, and it stays paused
//! until `tau_resume` segments have been appended since the stall began. While
//! paused the buffer does not drain.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::channel::ChannelTrace;
use crate::error::{Error, Result};
use crate::format::sig6;
use crate::media::Manifest;
use crate::policy::{AbrPolicy, DecisionContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StartupPolicy {
    /// The first segment is always fetched at the lowest quality.
    #[default]
    StartAtLowest,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub b_max_s: f64,
    pub tau_resume: usize,
    #[serde(default)]
    pub startup_policy: StartupPolicy,
}

impl SessionConfig {
    pub fn new(b_max_s: f64, tau_resume: usize) -> Self {
        SessionConfig {
            b_max_s,
            tau_resume,
            startup_policy: StartupPolicy::StartAtLowest,
        }
    }

    pub fn validate(&self, segment_duration_s: f64) -> Result<()> {
        if !(self.b_max_s >= segment_duration_s) {
            return Err(Error::InvalidParameter(format!(
                "buffer cap {} s is below the segment duration {} s",
                self.b_max_s, segment_duration_s
            )));
        }
        if self.tau_resume < 1 {
            return Err(Error::InvalidParameter(
                "tau_resume must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// One completed epoch. `quality` is 0-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    /// 1-based epoch number.
    pub t: usize,
    pub quality: usize,
    pub bitrate_kbps: f64,
    pub size_kbit: f64,
    /// Realized channel rate `C_t`.
    pub rate_kbps: f64,
    pub request_time_s: f64,
    pub download_s: f64,
    pub delta_s: f64,
    pub buffer_before_s: f64,
    pub buffer_after_s: f64,
    /// `B[t-1] < d[t]`: the buffer could not cover this download.
    pub stall: bool,
    /// Time playback spent paused during this epoch.
    pub stall_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<Vec<f64>>,
}

/// Information handed back to the policy after each download.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochFeedback {
    pub quality: usize,
    pub realized_rate_kbps: f64,
    pub chosen_size_kbit: f64,
    pub row_sizes_kbit: Vec<f64>,
    pub download_s: f64,
    pub buffer_s: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SessionState {
    /// Number of completed epochs.
    pub epoch: usize,
    pub buffer_s: f64,
    pub wall_clock_s: f64,
    pub stalled: bool,
    pub segments_since_stall: usize,
    pub history: Vec<EpochRecord>,
}

impl SessionState {
    /// Fresh session: empty buffer at time zero.
    pub fn new() -> Self {
        Self::default()
    }

    /// Downloads the next segment at `quality` and advances the buffer.
    pub fn step(
        &mut self,
        config: &SessionConfig,
        manifest: &Manifest,
        trace: &ChannelTrace,
        quality: usize,
    ) -> Result<EpochFeedback> {
        let t = self.epoch;
        if t >= manifest.horizon() {
            return Err(Error::BeyondHorizon {
                epoch: t + 1,
                horizon: manifest.horizon(),
            });
        }
        if quality >= manifest.levels() {
            return Err(Error::QualityOutOfRange {
                index: quality,
                levels: manifest.levels(),
            });
        }
        let v = manifest.segment_duration_s();
        let size = manifest.segment_size_kbit(t, quality);
        let request_time_s = self.wall_clock_s;
        let dl = trace.download(request_time_s, size);
        let d = dl.duration_s;
        let before = self.buffer_s;
        let stall = before < d;

        let (drained, stall_s) = if self.stalled {
            (before, d)
        } else if stall {
            self.stalled = true;
            self.segments_since_stall = 0;
            (0.0, d - before)
        } else {
            (before - d, 0.0)
        };
        if self.stalled {
            self.segments_since_stall += 1;
        }
        let filled = drained + v;
        // A full buffer also restarts playback, otherwise the cap could not hold.
        if self.stalled
            && (self.segments_since_stall >= config.tau_resume || filled >= config.b_max_s)
        {
            self.stalled = false;
        }
        let (delta_s, after) = if filled > config.b_max_s {
            (filled - config.b_max_s, config.b_max_s)
        } else {
            (0.0, filled)
        };

        self.buffer_s = after;
        self.wall_clock_s += d + delta_s;
        self.epoch += 1;
        self.history.push(EpochRecord {
            t: t + 1,
            quality,
            bitrate_kbps: manifest.bitrate_kbps(quality),
            size_kbit: size,
            rate_kbps: dl.effective_rate_kbps,
            request_time_s,
            download_s: d,
            delta_s,
            buffer_before_s: before,
            buffer_after_s: after,
            stall,
            stall_s,
            omega: None,
        });
        Ok(EpochFeedback {
            quality,
            realized_rate_kbps: dl.effective_rate_kbps,
            chosen_size_kbit: size,
            row_sizes_kbit: manifest.segment_row(t).to_vec(),
            download_s: d,
            buffer_s: after,
        })
    }
}

/// Full per-epoch log of one session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionLog {
    pub policy: String,
    pub segment_duration_s: f64,
    pub b_max_s: f64,
    pub tau_resume: usize,
    pub records: Vec<EpochRecord>,
}

impl SessionLog {
    pub fn horizon(&self) -> usize {
        self.records.len()
    }

    pub fn qualities(&self) -> Vec<usize> {
        self.records.iter().map(|r| r.quality).collect()
    }

    pub fn realized_rates_kbps(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.rate_kbps).collect()
    }

    pub fn total_stall_s(&self) -> f64 {
        self.records.iter().map(|r| r.stall_s).sum()
    }

    /// Writes `t,x_t,r_kbps,size_kbit,C_kbps,download_s,delta_s,buffer_s,stall,stall_s`,
    /// with `x_t` 1-based and `buffer_s` the post-epoch level.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record([
            "t",
            "x_t",
            "r_kbps",
            "size_kbit",
            "C_kbps",
            "download_s",
            "delta_s",
            "buffer_s",
            "stall",
            "stall_s",
        ])?;
        for r in &self.records {
            wtr.write_record([
                r.t.to_string(),
                (r.quality + 1).to_string(),
                sig6(r.bitrate_kbps),
                sig6(r.size_kbit),
                sig6(r.rate_kbps),
                sig6(r.download_s),
                sig6(r.delta_s),
                sig6(r.buffer_after_s),
                u8::from(r.stall).to_string(),
                sig6(r.stall_s),
            ])?;
        }
        wtr.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

/// Runs `policy` over every segment of `manifest`, feeding back each realized
/// download before the next decision.
pub fn run_session<P: AbrPolicy + ?Sized>(
    policy: &mut P,
    config: &SessionConfig,
    manifest: &Manifest,
    trace: &ChannelTrace,
) -> Result<SessionLog> {
    config.validate(manifest.segment_duration_s())?;
    let mut state = SessionState::new();
    let mut feedback: Option<EpochFeedback> = None;
    for t in 0..manifest.horizon() {
        let ctx = DecisionContext {
            epoch: t,
            horizon: manifest.horizon(),
            bitrates_kbps: manifest.bitrates_kbps(),
            next_sizes_kbit: manifest.segment_row(t),
            segment_duration_s: manifest.segment_duration_s(),
            b_max_s: config.b_max_s,
            buffer_s: state.buffer_s,
        };
        let mut quality = policy.decide(&ctx, feedback.as_ref());
        if feedback.is_none() {
            quality = match config.startup_policy {
                StartupPolicy::StartAtLowest => 0,
            };
        }
        let fb = state.step(config, manifest, trace, quality)?;
        if let Some(omega) = policy.distribution() {
            state.history[t].omega = Some(omega.to_vec());
        }
        feedback = Some(fb);
    }
    Ok(SessionLog {
        policy: policy.name(),
        segment_duration_s: manifest.segment_duration_s(),
        b_max_s: config.b_max_s,
        tau_resume: config.tau_resume,
        records: state.history,
    })
}
