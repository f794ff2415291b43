//! Synthesizes a VBR manifest on the reference ladder and prints per-level
//! size statistics.
//!
//! cargo run --example manifest_synthesis -- [segments] [jitter] [seed]

use abr_sim::media::{synthesize_manifest, REFERENCE_LADDER_KBPS, REFERENCE_SEGMENT_DURATION_S};

fn main() -> abr_sim::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let segments = args.first().and_then(|s| s.parse().ok()).unwrap_or(300);
    let jitter = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0.2);
    let seed = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1);

    let manifest = synthesize_manifest(segments, &REFERENCE_LADDER_KBPS, REFERENCE_SEGMENT_DURATION_S, jitter, seed)?;
    println!("{} segments of {} s, jitter {jitter}", manifest.horizon(), manifest.segment_duration_s());
    println!("{:>6} {:>10} {:>12} {:>12} {:>12}", "level", "kbps", "min kbit", "mean kbit", "max kbit");
    for n in 0..manifest.levels() {
        let sizes: Vec<f64> = manifest.sizes_kbit().iter().map(|row| row[n]).collect();
        let min = sizes.iter().copied().fold(f64::INFINITY, f64::min);
        let max = sizes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = sizes.iter().sum::<f64>() / sizes.len() as f64;
        println!("{:>6} {:>10.0} {:>12.1} {:>12.1} {:>12.1}", n + 1, manifest.bitrate_kbps(n), min, mean, max);
    }
    Ok(())
}
