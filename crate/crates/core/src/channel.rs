//! Channel rate process: trace files, the two-state markovian generator and the
//! fluid download model.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Throughput floor applied to trace samples so that `C_t > 0` always holds.
pub const DEFAULT_FLOOR_KBPS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub timestamp_s: f64,
    pub throughput_kbps: f64,
}

/// Piecewise-constant bandwidth profile. Sample `i` holds from its timestamp up
/// to the next one; the final sample extends forever.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelTrace {
    samples: Vec<TraceSample>,
}

/// Outcome of pushing one segment through the channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DownloadResult {
    pub duration_s: f64,
    /// `size / duration`: the realized channel rate `C_t` for the segment.
    pub effective_rate_kbps: f64,
}

impl ChannelTrace {
    pub fn new(samples: Vec<TraceSample>) -> Result<Self> {
        let Some(first) = samples.first() else {
            return Err(Error::InvalidTrace("trace has no samples".into()));
        };
        if first.timestamp_s != 0.0 {
            return Err(Error::InvalidTrace(format!(
                "trace must start at t = 0, starts at {}",
                first.timestamp_s
            )));
        }
        for (i, s) in samples.iter().enumerate() {
            if !(s.throughput_kbps.is_finite() && s.throughput_kbps > 0.0) {
                return Err(Error::InvalidTrace(format!(
                    "sample {i} has non-positive throughput {}",
                    s.throughput_kbps
                )));
            }
            if i > 0 && !(s.timestamp_s > samples[i - 1].timestamp_s) {
                return Err(Error::InvalidTrace(format!(
                    "timestamps must be strictly increasing at sample {i}"
                )));
            }
        }
        Ok(ChannelTrace { samples })
    }

    /// A single-sample trace at a fixed rate.
    pub fn constant(rate_kbps: f64) -> Result<Self> {
        Self::new(vec![TraceSample {
            timestamp_s: 0.0,
            throughput_kbps: rate_kbps,
        }])
    }

    /// Reads `timestamp_s,throughput_kbps` CSV. Throughputs under `floor_kbps`
    /// are raised to it and timestamps are rebased to start at 0.
    pub fn from_csv_reader<R: Read>(reader: R, floor_kbps: f64) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let mut samples: Vec<TraceSample> = Vec::new();
        for (i, record) in rdr.deserialize::<TraceSample>().enumerate() {
            let row = i + 1;
            let mut sample = record.map_err(|e| Error::TraceParse {
                row,
                message: e.to_string(),
            })?;
            if !sample.timestamp_s.is_finite() || !sample.throughput_kbps.is_finite() {
                return Err(Error::TraceParse {
                    row,
                    message: "non-finite value".into(),
                });
            }
            if let Some(prev) = samples.last() {
                if sample.timestamp_s <= prev.timestamp_s {
                    return Err(Error::TraceParse {
                        row,
                        message: format!(
                            "timestamp {} does not increase over {}",
                            sample.timestamp_s, prev.timestamp_s
                        ),
                    });
                }
            }
            sample.throughput_kbps = sample.throughput_kbps.max(floor_kbps);
            samples.push(sample);
        }
        if samples.len() < 2 {
            return Err(Error::InvalidTrace(format!(
                "a trace file needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        let origin = samples[0].timestamp_s;
        for s in &mut samples {
            s.timestamp_s -= origin;
        }
        Self::new(samples)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["timestamp_s", "throughput_kbps"])?;
        for s in &self.samples {
            wtr.write_record([
                crate::format::sig6(s.timestamp_s),
                crate::format::sig6(s.throughput_kbps),
            ])?;
        }
        wtr.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn samples(&self) -> &[TraceSample] {
        &self.samples
    }

    pub fn min_throughput_kbps(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.throughput_kbps)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_throughput_kbps(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.throughput_kbps)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Nominal end of the trace: the last timestamp plus the last sample
    /// spacing (1 s for single-sample traces).
    pub fn nominal_end_s(&self) -> f64 {
        let n = self.samples.len();
        let last = self.samples[n - 1].timestamp_s;
        let step = if n >= 2 {
            last - self.samples[n - 2].timestamp_s
        } else {
            1.0
        };
        last + step
    }

    fn sample_index_at(&self, time_s: f64) -> usize {
        self.samples
            .partition_point(|s| s.timestamp_s <= time_s)
            .saturating_sub(1)
    }

    /// Drains `size_kbit` through the bandwidth profile starting at
    /// `start_time_s` and reports the exact fluid-model duration.
    pub fn download(&self, start_time_s: f64, size_kbit: f64) -> DownloadResult {
        debug_assert!(start_time_s >= 0.0 && size_kbit > 0.0);
        let mut idx = self.sample_index_at(start_time_s);
        let mut now = start_time_s;
        let mut remaining = size_kbit;
        loop {
            let rate = self.samples[idx].throughput_kbps;
            let boundary = self
                .samples
                .get(idx + 1)
                .map_or(f64::INFINITY, |s| s.timestamp_s);
            let capacity = (boundary - now) * rate;
            if remaining <= capacity {
                now += remaining / rate;
                break;
            }
            remaining -= capacity;
            now = boundary;
            idx += 1;
        }
        let duration_s = now - start_time_s;
        DownloadResult {
            duration_s,
            effective_rate_kbps: size_kbit / duration_s,
        }
    }
}

/// Reads a trace CSV from disk.
pub fn load_trace(path: impl AsRef<Path>, floor_kbps: f64) -> Result<ChannelTrace> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    ChannelTrace::from_csv_reader(file, floor_kbps)
}

pub fn save_trace(trace: &ChannelTrace, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    trace.write_csv(file)
}

/// Appends traces back to back, each one starting at the nominal end of the
/// previous one.
pub fn concat_traces(traces: &[ChannelTrace]) -> Result<ChannelTrace> {
    let mut samples = Vec::new();
    let mut offset = 0.0;
    for trace in traces {
        samples.extend(trace.samples.iter().map(|s| TraceSample {
            timestamp_s: s.timestamp_s + offset,
            throughput_kbps: s.throughput_kbps,
        }));
        offset += trace.nominal_end_s();
    }
    ChannelTrace::new(samples)
}

/// Two-state channel that flips between a low and a high rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MarkovianChannel {
    pub duration_s: f64,
    pub low_kbps: f64,
    pub high_kbps: f64,
    pub p_transition: f64,
    pub step_s: f64,
}

impl Default for MarkovianChannel {
    fn default() -> Self {
        MarkovianChannel {
            duration_s: 1200.0,
            low_kbps: 750.0,
            high_kbps: 23000.0,
            p_transition: 0.05,
            step_s: 1.0,
        }
    }
}

impl MarkovianChannel {
    /// Generates a piecewise-constant trace with one sample per step, starting
    /// in the high state and flipping with probability `p_transition` per step.
    pub fn generate(&self, seed: u64) -> Result<ChannelTrace> {
        if !(self.p_transition > 0.0 && self.p_transition < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "transition probability must lie in (0, 1), got {}",
                self.p_transition
            )));
        }
        if !(self.low_kbps > 0.0 && self.low_kbps < self.high_kbps) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < low < high, got low = {} and high = {}",
                self.low_kbps, self.high_kbps
            )));
        }
        if !(self.step_s > 0.0 && self.duration_s >= self.step_s) {
            return Err(Error::InvalidParameter(format!(
                "need step > 0 and duration >= step, got step = {} and duration = {}",
                self.step_s, self.duration_s
            )));
        }
        let steps = (self.duration_s / self.step_s).round().max(1.0) as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut high = true;
        let samples = (0..steps)
            .map(|k| {
                if k > 0 && rng.gen_bool(self.p_transition) {
                    high = !high;
                }
                TraceSample {
                    timestamp_s: k as f64 * self.step_s,
                    throughput_kbps: if high { self.high_kbps } else { self.low_kbps },
                }
            })
            .collect();
        ChannelTrace::new(samples)
    }
}
