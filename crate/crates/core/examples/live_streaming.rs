//! Live scenario: a 20 s buffer cap. Runs every method on the same traces and
//! compares against the on-demand cap.
//!
//! cargo run --release --example live_streaming -- [traces] [segments] [seed]

use abr_sim::experiment::{run_compare, Scenario, ScenarioConfig};

fn main() -> abr_sim::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let traces = args.first().and_then(|s| s.parse().ok()).unwrap_or(10);
    let segments = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(300);
    let seed = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1);

    println!("{:<6} {:<10} {:>10} {:>9} {:>11}", "cap", "method", "kbps", "stability", "consistency");
    for scenario in [Scenario::Live, Scenario::Vod] {
        let comparison = run_compare(&ScenarioConfig::markovian(scenario, traces, segments, seed))?;
        for r in &comparison.rows {
            println!(
                "{:<6} {:<10} {:>10.1} {:>9.3} {:>11.3}",
                format!("{} s", scenario.default_b_max_s()),
                r.method,
                r.avg_bitrate_kbps,
                r.stability,
                r.consistency
            );
        }
    }
    Ok(())
}
