//! Tracks the time-averaged regret and underflow residual of L2A against the
//! hindsight benchmark along one long session.
//!
//! cargo run --release --example regret_convergence -- [segments] [seed]

use abr_sim::benchmark::WindowMode;
use abr_sim::channel::{concat_traces, MarkovianChannel};
use abr_sim::experiment::{evaluate_session, MethodSpec};
use abr_sim::media::{synthesize_manifest, REFERENCE_LADDER_KBPS};
use abr_sim::session::SessionConfig;

fn main() -> abr_sim::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let segments: usize = args.first().and_then(|s| s.parse().ok()).unwrap_or(1600);
    let seed: u64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(1);

    let channel = MarkovianChannel::default();
    let parts = (segments as f64 * 2.0 * 4.0 / channel.duration_s).ceil() as u64;
    let traces = (0..parts).map(|i| channel.generate(seed + i)).collect::<abr_sim::Result<Vec<_>>>()?;
    let trace = concat_traces(&traces)?;
    let manifest = synthesize_manifest(segments, &REFERENCE_LADDER_KBPS, 2.0, 0.0, seed)?;
    let session = SessionConfig::new(120.0, 2);

    let outcome = evaluate_session(&MethodSpec::l2a(1.0), "concat", &trace, &manifest, &session, None, WindowMode::Sliding)?;
    let c = &outcome.convergence;
    println!("benchmark E[r*] = {:.0} kbps", outcome.report.benchmark.objective);
    println!("{:>6} {:>12} {:>10}", "t", "R_t/t kbps", "V1_t/t s");
    let mut t = 25;
    while t <= segments {
        println!("{t:>6} {:>12.1} {:>10.4}", c.regret_rate[t - 1], c.residual1_rate[t - 1]);
        t *= 2;
    }
    Ok(())
}
