//! Encoded video content: the bitrate ladder and the per-segment size matrix.
//!
//! Sizes are kept in kbit and bitrates in kbps, so `size / rate` is a duration
//! in seconds without any conversion.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Eight-level H.264 ladder used by the reference experiments, in kbps.
pub const REFERENCE_LADDER_KBPS: [f64; 8] =
    [370.0, 750.0, 1500.0, 3000.0, 5800.0, 12000.0, 17000.0, 20000.0];

/// Segment duration of the reference experiments, in seconds.
pub const REFERENCE_SEGMENT_DURATION_S: f64 = 2.0;

/// A video encoded at `N` quality levels and split into `T` segments.
///
/// Immutable once constructed; every constructor validates the invariants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    segment_duration_s: f64,
    bitrates_kbps: Vec<f64>,
    segment_sizes_kbit: Vec<Vec<f64>>,
}

impl Manifest {
    pub fn new(
        segment_duration_s: f64,
        bitrates_kbps: Vec<f64>,
        segment_sizes_kbit: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let manifest = Manifest {
            segment_duration_s,
            bitrates_kbps,
            segment_sizes_kbit,
        };
        manifest.validate()?;
        Ok(manifest)
    }

    /// Parses a manifest from its JSON representation.
    pub fn from_json(text: &str) -> Result<Self> {
        let manifest: Manifest = serde_json::from_str(text)?;
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidManifest(msg));
        if !(self.segment_duration_s.is_finite() && self.segment_duration_s > 0.0) {
            return invalid(format!(
                "segment duration must be positive, got {}",
                self.segment_duration_s
            ));
        }
        let n = self.bitrates_kbps.len();
        if n < 2 {
            return invalid(format!("need at least 2 quality levels, got {n}"));
        }
        for (i, &r) in self.bitrates_kbps.iter().enumerate() {
            if !(r.is_finite() && r > 0.0) {
                return invalid(format!("bitrate at level {i} must be positive, got {r}"));
            }
        }
        for (i, pair) in self.bitrates_kbps.windows(2).enumerate() {
            if pair[1] <= pair[0] {
                return invalid(format!(
                    "bitrates must be strictly increasing: level {} ({}) <= level {} ({})",
                    i + 1,
                    pair[1],
                    i,
                    pair[0]
                ));
            }
        }
        for (t, row) in self.segment_sizes_kbit.iter().enumerate() {
            if row.len() != n {
                return invalid(format!(
                    "segment row {t} has {} columns, expected {n}",
                    row.len()
                ));
            }
            for (col, &s) in row.iter().enumerate() {
                if !(s.is_finite() && s > 0.0) {
                    return invalid(format!(
                        "segment size at row {t}, column {col} must be positive, got {s}"
                    ));
                }
                if col > 0 && s < row[col - 1] {
                    return invalid(format!(
                        "segment sizes must be non-decreasing in quality: row {t}, column {col}"
                    ));
                }
            }
        }
        Ok(())
    }

    /// Segment duration `V` in seconds.
    pub fn segment_duration_s(&self) -> f64 {
        self.segment_duration_s
    }

    pub fn bitrates_kbps(&self) -> &[f64] {
        &self.bitrates_kbps
    }

    pub fn bitrate_kbps(&self, level: usize) -> f64 {
        self.bitrates_kbps[level]
    }

    /// Number of quality levels `N`.
    pub fn levels(&self) -> usize {
        self.bitrates_kbps.len()
    }

    /// Number of segments `T`.
    pub fn horizon(&self) -> usize {
        self.segment_sizes_kbit.len()
    }

    /// Total content duration `D = T·V`.
    pub fn duration_s(&self) -> f64 {
        self.horizon() as f64 * self.segment_duration_s
    }

    pub fn sizes_kbit(&self) -> &[Vec<f64>] {
        &self.segment_sizes_kbit
    }

    /// Sizes of segment `t` (0-based) at every quality level.
    pub fn segment_row(&self, t: usize) -> &[f64] {
        &self.segment_sizes_kbit[t]
    }

    pub fn segment_size_kbit(&self, t: usize, level: usize) -> f64 {
        self.segment_sizes_kbit[t][level]
    }

    /// Returns a manifest holding only the first `horizon` segments.
    pub fn truncated(&self, horizon: usize) -> Manifest {
        Manifest {
            segment_duration_s: self.segment_duration_s,
            bitrates_kbps: self.bitrates_kbps.clone(),
            segment_sizes_kbit: self.segment_sizes_kbit[..horizon.min(self.horizon())].to_vec(),
        }
    }
}

/// Loads and validates a JSON manifest file.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<Manifest> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Manifest::from_json(&text)
}

/// Writes a manifest as pretty-printed JSON.
pub fn save_manifest(manifest: &Manifest, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, manifest.to_json() + "\n").map_err(|e| Error::io(path, e))
}

/// Synthesizes a VBR manifest: `S[t][n] = r[n]·V·(1 + u)` with `u` uniform in
/// `[-vbr_jitter, vbr_jitter]`, each row then clamped to be non-decreasing.
pub fn synthesize_manifest(
    horizon: usize,
    bitrates_kbps: &[f64],
    segment_duration_s: f64,
    vbr_jitter: f64,
    seed: u64,
) -> Result<Manifest> {
    if !(0.0..0.5).contains(&vbr_jitter) {
        return Err(Error::InvalidParameter(format!(
            "vbr jitter must lie in [0, 0.5), got {vbr_jitter}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sizes = (0..horizon)
        .map(|_| {
            let mut row: Vec<f64> = bitrates_kbps
                .iter()
                .map(|&r| {
                    let u = if vbr_jitter > 0.0 {
                        rng.gen_range(-vbr_jitter..=vbr_jitter)
                    } else {
                        0.0
                    };
                    r * segment_duration_s * (1.0 + u)
                })
                .collect();
            for n in 1..row.len() {
                if row[n] < row[n - 1] {
                    row[n] = row[n - 1];
                }
            }
            row
        })
        .collect();
    Manifest::new(segment_duration_s, bitrates_kbps.to_vec(), sizes)
}
