//! Solves the windowed hindsight benchmark for the realized rates of a session
//! and compares sliding and disjoint windows.
//!
//! cargo run --release --example hindsight_benchmark -- [segments] [seed]

use abr_sim::benchmark::{default_window, solve_benchmark, WindowMode};
use abr_sim::channel::MarkovianChannel;
use abr_sim::l2a::{L2aParams, L2aPolicy};
use abr_sim::media::{synthesize_manifest, REFERENCE_LADDER_KBPS};
use abr_sim::session::{run_session, SessionConfig};

fn main() -> abr_sim::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let segments = args.first().and_then(|s| s.parse().ok()).unwrap_or(400);
    let seed = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(1);

    let manifest = synthesize_manifest(segments, &REFERENCE_LADDER_KBPS, 2.0, 0.1, seed)?;
    let trace = MarkovianChannel::default().generate(seed)?;
    let mut policy = L2aPolicy::new(L2aParams::new(segments, 1.0), manifest.levels())?;
    let log = run_session(&mut policy, &SessionConfig::new(120.0, 2), &manifest, &trace)?;
    let rates = log.realized_rates_kbps();

    let base = default_window(segments);
    for window in [base / 4, base / 2, base] {
        for mode in [WindowMode::Sliding, WindowMode::Disjoint] {
            let sol = solve_benchmark(&manifest, &rates, window, mode, 120.0)?;
            let omega: Vec<String> = sol.omega_star.iter().map(|w| format!("{w:.3}")).collect();
            println!(
                "K={window:>4} {mode:?}: E[r*] {:.0} kbps, slack under {:.3} s / over {:.3} s, omega* [{}]",
                sol.objective,
                sol.underflow_slack,
                sol.overflow_slack,
                omega.join(" ")
            );
        }
    }
    Ok(())
}
