//! Compares L2A (β = 0.3 and 1), RB and BB on synthetic markovian traces and
//! prints the averaged metrics.
//!
//! cargo run --release --example compare_policies -- [vod|live] [traces] [segments] [seed]

use abr_sim::experiment::{run_compare, Scenario, ScenarioConfig};

fn main() -> abr_sim::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let scenario = match args.first().map(String::as_str) {
        Some("live") => Scenario::Live,
        _ => Scenario::Vod,
    };
    let traces = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let segments = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(600);
    let seed = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(1);

    let config = ScenarioConfig::markovian(scenario, traces, segments, seed);
    let comparison = run_compare(&config)?;

    println!(
        "{:<10} {:>10} {:>6} {:>9} {:>10} {:>11} {:>10} {:>10}",
        "method", "kbps", "norm", "stability", "smoothness", "consistency", "continuity", "R_T/T"
    );
    for r in &comparison.rows {
        println!(
            "{:<10} {:>10.1} {:>6.3} {:>9.3} {:>10.3} {:>11.3} {:>10.3} {:>10.1}",
            r.method,
            r.avg_bitrate_kbps,
            r.normalized_avg_bitrate,
            r.stability,
            r.smoothness,
            r.consistency,
            r.continuity,
            r.regret_rate
        );
    }
    Ok(())
}
