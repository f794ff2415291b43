//! Session QoE metrics, regret against the hindsight benchmark and constraint
//! residuals.

use serde::{Deserialize, Serialize};

use crate::l2a::loss_and_constraints;
use crate::media::Manifest;
use crate::session::{EpochRecord, SessionLog};

/// The five streaming metrics of one session.
///
/// `normalized_avg_bitrate` starts at 1 and is filled in by
/// [`normalize_avg_bitrate`] once every method of a comparison is known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QoeMetrics {
    pub avg_bitrate_kbps: f64,
    pub normalized_avg_bitrate: f64,
    /// One minus the fraction of epochs that switch bitrate.
    pub stability: f64,
    /// One minus the mean switch amplitude relative to the ladder span.
    pub smoothness: f64,
    /// One minus the stall penalty over the content duration. Not clamped, so it
    /// goes negative when stalls outlast the content.
    pub consistency: f64,
    /// One minus the stall count over `⌈T/τ⌉`.
    pub continuity: f64,
    pub stall_count: usize,
    pub stall_penalty_s: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

pub const FLAG_SHORT_HORIZON: &str = "short-horizon";
pub const FLAG_NEGATIVE_CONSISTENCY: &str = "negative-consistency";
pub const FLAG_ONE_HOT: &str = "one-hot-distribution";

/// Computes the metrics from a per-epoch log. `duration_s` is the time budget
/// `D`, normally the content duration.
pub fn qoe_metrics(
    records: &[EpochRecord],
    bitrates_kbps: &[f64],
    tau: usize,
    duration_s: f64,
) -> QoeMetrics {
    let horizon = records.len();
    let mut flags = Vec::new();
    let avg_bitrate_kbps = if horizon == 0 {
        0.0
    } else {
        records.iter().map(|r| r.bitrate_kbps).sum::<f64>() / horizon as f64
    };

    let (stability, smoothness) = if horizon < 2 {
        flags.push(FLAG_SHORT_HORIZON.to_string());
        (1.0, 1.0)
    } else {
        let pairs = (horizon - 1) as f64;
        let span = bitrates_kbps[bitrates_kbps.len() - 1] - bitrates_kbps[0];
        let switches = records
            .windows(2)
            .filter(|w| w[1].bitrate_kbps != w[0].bitrate_kbps)
            .count() as f64;
        let amplitude: f64 = records
            .windows(2)
            .map(|w| (w[1].bitrate_kbps - w[0].bitrate_kbps).abs())
            .sum();
        (1.0 - switches / pairs, 1.0 - amplitude / (span * pairs))
    };

    let mut stall_count = 0;
    let mut stall_penalty_s = 0.0;
    for (t, r) in records.iter().enumerate() {
        if r.buffer_before_s < r.download_s {
            stall_count += 1;
            let resume: f64 = records[t..(t + tau).min(horizon)]
                .iter()
                .map(|r| r.download_s)
                .sum();
            stall_penalty_s += resume - r.buffer_before_s;
        }
    }
    let consistency = 1.0 - stall_penalty_s / duration_s;
    if consistency < 0.0 {
        flags.push(FLAG_NEGATIVE_CONSISTENCY.to_string());
    }
    let continuity = if horizon == 0 {
        1.0
    } else {
        1.0 - stall_count as f64 / horizon.div_ceil(tau) as f64
    };

    QoeMetrics {
        avg_bitrate_kbps,
        normalized_avg_bitrate: 1.0,
        stability,
        smoothness,
        consistency,
        continuity,
        stall_count,
        stall_penalty_s,
        flags,
    }
}

/// Divides every average bitrate by the best one in the set, so the best
/// method scores exactly 1. Returns `false` for an empty set.
pub fn normalize_avg_bitrate(reports: &mut [&mut QoeMetrics]) -> bool {
    let Some(best) = reports
        .iter()
        .map(|m| m.avg_bitrate_kbps)
        .reduce(f64::max)
    else {
        return false;
    };
    for m in reports.iter_mut() {
        m.normalized_avg_bitrate = if best > 0.0 {
            m.avg_bitrate_kbps / best
        } else {
            1.0
        };
    }
    true
}

/// Time-averaged regret and constraint residuals, `R_t/t`, `V¹_t/t`, `V²_t/t`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ConvergenceSeries {
    pub regret_rate: Vec<f64>,
    pub residual1_rate: Vec<f64>,
    pub residual2_rate: Vec<f64>,
    /// Set when the log carried no distributions and one-hot `e_x` stood in.
    pub one_hot: bool,
}

impl ConvergenceSeries {
    pub fn final_regret_rate(&self) -> f64 {
        self.regret_rate.last().copied().unwrap_or(0.0)
    }

    pub fn final_residual1_rate(&self) -> f64 {
        self.residual1_rate.last().copied().unwrap_or(0.0)
    }

    pub fn final_residual2_rate(&self) -> f64 {
        self.residual2_rate.last().copied().unwrap_or(0.0)
    }
}

fn one_hot(levels: usize, index: usize) -> Vec<f64> {
    let mut v = vec![0.0; levels];
    v[index] = 1.0;
    v
}

/// Evaluates the session's distributions against `omega_star` on the realized
/// sizes and rates of each epoch.
pub fn regret_and_residuals(
    log: &SessionLog,
    manifest: &Manifest,
    omega_star: &[f64],
    b_max_s: f64,
) -> ConvergenceSeries {
    let horizon = log.horizon();
    let levels = manifest.levels();
    let v = manifest.segment_duration_s();
    let bitrates = manifest.bitrates_kbps();
    let mut series = ConvergenceSeries {
        one_hot: log.records.iter().any(|r| r.omega.is_none()),
        ..ConvergenceSeries::default()
    };
    let (mut regret, mut res1, mut res2) = (0.0, 0.0, 0.0);
    for (t, r) in log.records.iter().enumerate() {
        let omega = match &r.omega {
            Some(w) if !series.one_hot => w.clone(),
            _ => one_hot(levels, r.quality),
        };
        let sizes = manifest.segment_row(t);
        let played = loss_and_constraints(&omega, sizes, bitrates, r.rate_kbps, v, b_max_s, horizon);
        let bench = loss_and_constraints(omega_star, sizes, bitrates, r.rate_kbps, v, b_max_s, horizon);
        regret += played.f - bench.f;
        res1 += played.g1;
        res2 += played.g2;
        let n = (t + 1) as f64;
        series.regret_rate.push(regret / n);
        series.residual1_rate.push(res1 / n);
        series.residual2_rate.push(res2 / n);
    }
    series
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(t: usize, quality: usize, bitrate: f64, before: f64, download: f64) -> EpochRecord {
        EpochRecord {
            t,
            quality,
            bitrate_kbps: bitrate,
            size_kbit: bitrate * 2.0,
            rate_kbps: bitrate * 2.0 / download,
            request_time_s: 0.0,
            download_s: download,
            delta_s: 0.0,
            buffer_before_s: before,
            buffer_after_s: 0.0,
            stall: before < download,
            stall_s: 0.0,
            omega: None,
        }
    }

    const LADDER: [f64; 3] = [1000.0, 2000.0, 5000.0];

    #[test]
    fn constant_sequence_is_perfectly_stable() {
        let recs: Vec<_> = (0..10).map(|t| record(t + 1, 1, 2000.0, 10.0, 1.0)).collect();
        let m = qoe_metrics(&recs, &LADDER, 2, 20.0);
        assert_eq!(m.stability, 1.0);
        assert_eq!(m.smoothness, 1.0);
        assert_eq!(m.consistency, 1.0);
        assert_eq!(m.continuity, 1.0);
        assert_eq!(m.avg_bitrate_kbps, 2000.0);
    }

    #[test]
    fn alternating_extremes_score_zero() {
        let recs: Vec<_> = (0..10)
            .map(|t| {
                let (q, r) = if t % 2 == 0 { (0, 1000.0) } else { (2, 5000.0) };
                record(t + 1, q, r, 10.0, 1.0)
            })
            .collect();
        let m = qoe_metrics(&recs, &LADDER, 2, 20.0);
        assert_eq!(m.stability, 0.0);
        assert_eq!(m.smoothness, 0.0);
    }

    #[test]
    fn single_stall_consistency() {
        // Stall at t = 5 with 1 s of buffer, downloads of 3 s then 2 s.
        let mut recs: Vec<_> = (0..10).map(|t| record(t + 1, 0, 1000.0, 10.0, 1.0)).collect();
        recs[4] = record(5, 0, 1000.0, 1.0, 3.0);
        recs[5] = record(6, 0, 1000.0, 2.0, 2.0);
        let m = qoe_metrics(&recs, &LADDER, 2, 100.0);
        assert!((m.consistency - 0.96).abs() < 1e-12);
        assert_eq!(m.stall_count, 1);
        assert!((m.continuity - 0.8).abs() < 1e-12);
    }

    #[test]
    fn stall_at_the_end_truncates_the_resume_window() {
        let mut recs: Vec<_> = (0..4).map(|t| record(t + 1, 0, 1000.0, 10.0, 1.0)).collect();
        recs[3] = record(4, 0, 1000.0, 0.5, 3.0);
        let m = qoe_metrics(&recs, &LADDER, 2, 10.0);
        assert!((m.stall_penalty_s - 2.5).abs() < 1e-12);
    }

    #[test]
    fn heavy_stalling_goes_negative_and_is_flagged() {
        let recs: Vec<_> = (0..4).map(|t| record(t + 1, 0, 1000.0, 0.0, 30.0)).collect();
        let m = qoe_metrics(&recs, &LADDER, 2, 8.0);
        assert!(m.consistency < 0.0);
        assert!(m.flags.iter().any(|f| f == FLAG_NEGATIVE_CONSISTENCY));
    }

    #[test]
    fn short_horizon_is_flagged() {
        let m = qoe_metrics(&[record(1, 0, 1000.0, 0.0, 1.0)], &LADDER, 2, 2.0);
        assert_eq!(m.stability, 1.0);
        assert!(m.flags.iter().any(|f| f == FLAG_SHORT_HORIZON));
    }

    fn with_avg(avg: f64) -> QoeMetrics {
        QoeMetrics {
            avg_bitrate_kbps: avg,
            ..qoe_metrics(&[], &LADDER, 2, 1.0)
        }
    }

    #[test]
    fn normalization() {
        let mut a = with_avg(4000.0);
        let mut b = with_avg(5000.0);
        assert!(normalize_avg_bitrate(&mut [&mut a, &mut b]));
        assert_eq!(a.normalized_avg_bitrate, 0.8);
        assert_eq!(b.normalized_avg_bitrate, 1.0);

        let mut c = with_avg(1234.0);
        assert!(normalize_avg_bitrate(&mut [&mut c]));
        assert_eq!(c.normalized_avg_bitrate, 1.0);

        let mut d = with_avg(7.0);
        let mut e = with_avg(7.0);
        normalize_avg_bitrate(&mut [&mut d, &mut e]);
        assert_eq!((d.normalized_avg_bitrate, e.normalized_avg_bitrate), (1.0, 1.0));

        assert!(!normalize_avg_bitrate(&mut []));
    }
}
