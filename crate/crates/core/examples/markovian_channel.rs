//! Generates a two-state markovian trace and reports its occupancy and
//! sojourn times.
//!
//! cargo run --example markovian_channel -- [duration_s] [p] [seed]

use abr_sim::channel::MarkovianChannel;

fn main() -> abr_sim::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let channel = MarkovianChannel {
        duration_s: args.first().and_then(|s| s.parse().ok()).unwrap_or(1200.0),
        p_transition: args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0.05),
        ..MarkovianChannel::default()
    };
    let seed = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1);
    let trace = channel.generate(seed)?;

    let samples = trace.samples();
    let high = samples.iter().filter(|s| s.throughput_kbps == channel.high_kbps).count();
    let flips = samples.windows(2).filter(|w| w[0].throughput_kbps != w[1].throughput_kbps).count();
    let mean = samples.iter().map(|s| s.throughput_kbps).sum::<f64>() / samples.len() as f64;
    println!("{} samples over {} s", samples.len(), trace.nominal_end_s());
    println!("high state {:.1}% of the time, {flips} transitions", 100.0 * high as f64 / samples.len() as f64);
    println!("mean sojourn {:.1} s, mean throughput {mean:.0} kbps", trace.nominal_end_s() / (flips + 1) as f64);
    Ok(())
}
