//! Streams one manifest over one markovian trace with a chosen policy and
//! prints the QoE metrics plus the first epochs of the log.
//!
//! cargo run --example single_session -- [l2a|rb|bb] [segments] [seed]

use abr_sim::channel::MarkovianChannel;
use abr_sim::experiment::{evaluate_session, MethodSpec, Scenario};
use abr_sim::benchmark::WindowMode;
use abr_sim::media::{synthesize_manifest, REFERENCE_LADDER_KBPS};
use abr_sim::session::SessionConfig;

fn main() -> abr_sim::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let method = match args.first().map(String::as_str) {
        Some("rb") => MethodSpec::rb(),
        Some("bb") => MethodSpec::bb(),
        _ => MethodSpec::l2a(1.0),
    };
    let segments = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(300);
    let seed = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1);

    let manifest = synthesize_manifest(segments, &REFERENCE_LADDER_KBPS, 2.0, 0.0, seed)?;
    let trace = MarkovianChannel::default().generate(seed)?;
    let session = SessionConfig::new(Scenario::Vod.default_b_max_s(), 2);
    let outcome = evaluate_session(&method, "markovian", &trace, &manifest, &session, None, WindowMode::Sliding)?;

    let m = &outcome.report.metrics;
    println!("{}: {:.0} kbps, stability {:.3}, smoothness {:.3}, consistency {:.3}, continuity {:.3}, stalls {:.1} s",
        outcome.report.method, m.avg_bitrate_kbps, m.stability, m.smoothness, m.consistency, m.continuity, outcome.report.total_stall_s);
    println!("{:>4} {:>3} {:>9} {:>9} {:>9}", "t", "x", "C kbps", "d s", "B s");
    for r in outcome.log.records.iter().take(15) {
        println!("{:>4} {:>3} {:>9.0} {:>9.3} {:>9.2}", r.t, r.quality + 1, r.rate_kbps, r.download_s, r.buffer_after_s);
    }
    Ok(())
}
