//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line for each
//! and exits non-zero if any criterion fails.
//!
//! The simulation criteria use seeds that were not used while choosing
//! defaults.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use abr_sim::benchmark::{default_window, solve_benchmark, window_violations, WindowMode};
use abr_sim::channel::MarkovianChannel;
use abr_sim::experiment::{run_compare, Comparison, ManifestSpec, MethodSpec, Scenario, ScenarioConfig, TraceSpec};
use abr_sim::l2a::project_simplex;
use abr_sim::media::{Manifest, REFERENCE_LADDER_KBPS};
use abr_sim::metrics::{normalize_avg_bitrate, qoe_metrics};
use abr_sim::session::{EpochRecord, SessionLog};

const SEED: u64 = 20_261_015;

type Outcome = Result<String, String>;

struct Criterion {
    id: usize,
    name: &'static str,
    limit: Option<Duration>,
}

fn report(c: &Criterion, elapsed: Duration, outcome: &Outcome) -> bool {
    let over = c.limit.is_some_and(|l| elapsed > l);
    let (ok, detail) = match outcome {
        Ok(d) if !over => (true, d.clone()),
        Ok(d) => (false, format!("{d}; exceeded {:?}", c.limit.unwrap())),
        Err(d) => (false, d.clone()),
    };
    println!(
        "{} criterion {:>2}: {} ({:.2} s) {}",
        if ok { "PASS" } else { "FAIL" },
        c.id,
        c.name,
        elapsed.as_secs_f64(),
        detail
    );
    ok
}

fn run<F: FnOnce() -> Outcome>(results: &mut Vec<bool>, c: Criterion, f: F) {
    let start = Instant::now();
    let outcome = f();
    results.push(report(&c, start.elapsed(), &outcome));
}

fn ensure(cond: bool, msg: String) -> Outcome {
    if cond {
        Ok(msg)
    } else {
        Err(msg)
    }
}

// 1. Simplex projection against a grid minimizer.

fn grid_projection(v: &[f64], step: f64) -> Vec<f64> {
    let m = (1.0 / step).round() as usize;
    let dist = |w: &[f64]| w.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    let mut best = (f64::INFINITY, vec![]);
    match v.len() {
        2 => {
            for i in 0..=m {
                let w = [i as f64 * step, 1.0 - i as f64 * step];
                let d = dist(&w);
                if d < best.0 {
                    best = (d, w.to_vec());
                }
            }
        }
        3 => {
            for i in 0..=m {
                for j in 0..=(m - i) {
                    let w = [i as f64 * step, j as f64 * step, (m - i - j) as f64 * step];
                    let d = dist(&w);
                    if d < best.0 {
                        best = (d, w.to_vec());
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    best.1
}

fn criterion_projection() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let n = 2 + k % 2;
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let exact = project_simplex(&v);
        let grid = grid_projection(&v, 1e-3);
        let err = exact.iter().zip(&grid).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst = worst.max(err);
    }
    ensure(worst <= 1e-3, format!("100 vectors, max l-inf gap {worst:.2e}"))
}

// 2. Hindsight benchmark against a grid over the two-level simplex.

fn criterion_benchmark() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let horizon = 200;
    let window = default_window(horizon);
    let b_max = 120.0;
    let mut worst_gap = f64::NEG_INFINITY;
    let mut infeasible = 0;
    for _ in 0..20 {
        let bitrates = vec![1000.0, 3000.0];
        let sizes: Vec<Vec<f64>> = (0..horizon)
            .map(|_| {
                let j = rng.gen_range(0.9..1.1);
                vec![2000.0 * j, 6000.0 * j]
            })
            .collect();
        let manifest = Manifest::new(2.0, bitrates.clone(), sizes).map_err(|e| e.to_string())?;
        let lo = rng.gen_range(1200.0..2500.0);
        let hi = lo * rng.gen_range(1.2..2.5);
        let rates: Vec<f64> = (0..horizon).map(|_| rng.gen_range(lo..hi)).collect();
        let sol = solve_benchmark(&manifest, &rates, window, WindowMode::Sliding, b_max)
            .map_err(|e| e.to_string())?;
        if sol.slack_used > 0.0 {
            infeasible += 1;
        }
        let mut best_grid = f64::NEG_INFINITY;
        for i in 0..=10_000 {
            let w2 = i as f64 * 1e-4;
            let omega = [1.0 - w2, w2];
            let (under, over) = window_violations(&omega, &manifest, &rates, window, WindowMode::Sliding, b_max);
            if under <= sol.underflow_slack + 1e-9 && over <= sol.overflow_slack + 1e-9 {
                best_grid = best_grid.max(omega[0] * bitrates[0] + omega[1] * bitrates[1]);
            }
        }
        if best_grid.is_finite() {
            worst_gap = worst_gap.max(best_grid - sol.objective);
        }
    }
    ensure(
        worst_gap <= 1e-4,
        format!("20 instances (T={horizon}, K={window}, {infeasible} needing slack), max grid excess {worst_gap:.2e} kbps"),
    )
}

// 3. Buffer law on every recorded epoch.

fn buffer_law_violations(log: &SessionLog, v: f64) -> Vec<String> {
    let b_max = log.b_max_s;
    let mut bad = Vec::new();
    let mut prev_after = 0.0;
    for r in &log.records {
        let played = r.download_s - r.stall_s;
        let pre_delay = r.buffer_before_s - played + v;
        let expect_delta = if pre_delay > b_max { pre_delay - b_max } else { 0.0 };
        let checks = [
            r.buffer_before_s == prev_after,
            (0.0..=b_max).contains(&r.buffer_after_s),
            (r.delta_s > 0.0) == (pre_delay > b_max),
            played >= 0.0 && played <= r.buffer_before_s,
            (r.delta_s - expect_delta).abs() <= 1e-9 * b_max,
            (r.buffer_after_s - pre_delay.min(b_max)).abs() <= 1e-9 * b_max,
        ];
        if checks.iter().any(|c| !c) {
            bad.push(format!("{} t={} {:?}", log.policy, r.t, checks));
        }
        prev_after = r.buffer_after_s;
    }
    bad
}

fn criterion_buffer_law(comparisons: &[&Comparison]) -> Outcome {
    let mut epochs = 0;
    let mut sessions = 0;
    let mut bad = Vec::new();
    for cmp in comparisons {
        for s in &cmp.sessions {
            sessions += 1;
            epochs += s.log.records.len();
            bad.extend(buffer_law_violations(&s.log, s.log.segment_duration_s));
        }
    }
    ensure(
        bad.is_empty(),
        format!(
            "{sessions} sessions, {epochs} epochs, {} violations{}",
            bad.len(),
            bad.first().map(|b| format!(", first: {b}")).unwrap_or_default()
        ),
    )
}

// 4. Switching budget.

fn distribution_changes(records: &[EpochRecord]) -> usize {
    records
        .windows(2)
        .filter(|w| w[0].omega.as_ref().expect("omega logged") != w[1].omega.as_ref().expect("omega logged"))
        .count()
}

fn criterion_budget() -> Outcome {
    let horizon = 600;
    let mut config = ScenarioConfig::markovian(Scenario::Vod, 5, horizon, SEED + 4);
    config.methods = [0.1, 0.3, 1.0].iter().map(|&b| MethodSpec::l2a(b)).collect();
    let cmp = run_compare(&config).map_err(|e| e.to_string())?;
    let mut lines = Vec::new();
    let mut ok = true;
    for (spec, beta) in config.methods.iter().zip([0.1, 0.3, 1.0]) {
        let bound = beta * horizon as f64 + 1.0;
        let worst = cmp
            .sessions_of(&spec.label())
            .map(|s| distribution_changes(&s.log.records))
            .max()
            .unwrap_or(0);
        ok &= worst as f64 <= bound;
        lines.push(format!("beta {beta}: max {worst} <= {bound}"));
    }
    ensure(ok, lines.join(", "))
}

// 5. Underflow residual convergence.

fn seed_averaged(cmp: &Comparison, method: &str, pick: impl Fn(&abr_sim::experiment::SessionOutcome) -> &Vec<f64>) -> Vec<f64> {
    let runs: Vec<&Vec<f64>> = cmp.sessions_of(method).map(pick).collect();
    let len = runs[0].len();
    (0..len)
        .map(|t| runs.iter().map(|r| r[t]).sum::<f64>() / runs.len() as f64)
        .collect()
}

fn criterion_residual() -> Outcome {
    let horizon = 1000;
    let mut config = ScenarioConfig::markovian(Scenario::Vod, 20, horizon, SEED + 5);
    config.methods = vec![MethodSpec::l2a(1.0)];
    let cmp = run_compare(&config).map_err(|e| e.to_string())?;
    let series = seed_averaged(&cmp, "l2a-b1", |s| &s.convergence.residual1_rate);
    let last = series[horizon - 1].abs();
    let quarter = series[horizon / 4 - 1].abs();
    let per_seed_max = cmp
        .sessions_of("l2a-b1")
        .map(|s| s.report.final_residual1_rate.abs())
        .fold(0.0, f64::max);
    ensure(
        last <= 0.1 && last <= quarter,
        format!(
            "20 seeds, T={horizon}: |mean V1_T/T| = {last:.4} s (<= 0.1), at T/4 {quarter:.4} s; largest single seed {per_seed_max:.4} s"
        ),
    )
}

// 6. Regret rate across horizons.

const REGRET_TRACES: usize = 1000;

fn criterion_regret() -> Outcome {
    // Every horizon streams a prefix of the same concatenated traces. The
    // monotonicity is a statement in expectation, hence the large sample.
    let horizons = [200usize, 400, 800, 1600];
    let parts = (1600.0 * 2.0 * 4.0 / 1200.0_f64).ceil() as usize;
    let mut l2a = Vec::new();
    let mut rb = Vec::new();
    for &horizon in &horizons {
        let config = ScenarioConfig {
            methods: vec![MethodSpec::l2a(1.0), MethodSpec::rb()],
            traces: (0..REGRET_TRACES)
                .map(|_| TraceSpec::ConcatMarkovian {
                    parts,
                    channel: MarkovianChannel::default(),
                })
                .collect(),
            manifest: ManifestSpec::Synthetic {
                segments: horizon,
                bitrates_kbps: REFERENCE_LADDER_KBPS.to_vec(),
                segment_duration_s: 2.0,
                vbr_jitter: 0.0,
            },
            ..ScenarioConfig::markovian(Scenario::Vod, 1, horizon, SEED + 6)
        };
        let cmp = run_compare(&config).map_err(|e| e.to_string())?;
        l2a.push(cmp.row("l2a-b1").unwrap().regret_rate);
        rb.push(cmp.row("rb").unwrap().regret_rate);
    }
    let below_rb = l2a.iter().zip(&rb).all(|(a, b)| a <= b);
    let non_increasing = l2a[1..].windows(2).all(|w| w[1] <= w[0]);
    let fmt = |xs: &[f64]| xs.iter().map(|x| format!("{x:.1}")).collect::<Vec<_>>().join("/");
    ensure(
        below_rb && non_increasing,
        format!(
            "R_T/T kbps over {REGRET_TRACES} traces at T={:?}: l2a {} vs rb {}; l2a <= rb: {below_rb}, non-increasing from 400: {non_increasing}",
            horizons,
            fmt(&l2a),
            fmt(&rb)
        ),
    )
}

// 7. Average-bitrate ordering.

fn criterion_ordering(vod: &Comparison) -> Outcome {
    let l2a = vod.row("l2a-b1").unwrap().avg_bitrate_kbps;
    let rb = vod.row("rb").unwrap().avg_bitrate_kbps;
    let bb = vod.row("bb").unwrap().avg_bitrate_kbps;
    ensure(
        l2a >= 1.15 * rb && l2a >= 1.05 * bb,
        format!(
            "20 traces: l2a-b1 {l2a:.0} kbps = {:.3} x rb ({rb:.0}), {:.3} x bb ({bb:.0})",
            l2a / rb,
            l2a / bb
        ),
    )
}

// 8. Stability ordering between switching budgets.

fn criterion_stability(scenarios: &[(&str, &Comparison)]) -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();
    for (name, cmp) in scenarios {
        let restricted = cmp.row("l2a-b0.3").unwrap().stability;
        let free = cmp.row("l2a-b1").unwrap().stability;
        let inferior_traces = cmp
            .sessions_of("l2a-b0.3")
            .zip(cmp.sessions_of("l2a-b1"))
            .filter(|(a, b)| a.report.metrics.stability < b.report.metrics.stability)
            .count();
        let gain = restricted / free - 1.0;
        ok &= restricted >= free && gain >= 0.05;
        lines.push(format!(
            "{name}: b0.3 {restricted:.3} vs b1 {free:.3} ({:+.1}%, {inferior_traces}/20 traces lower)",
            100.0 * gain
        ));
    }
    ensure(ok, lines.join("; ") + "; needs >= +5.0% with no scenario lower")
}

// 9. Metric fixtures.

fn fixture_record(t: usize, quality: usize, bitrate: f64, before: f64, download: f64) -> EpochRecord {
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

fn criterion_metrics() -> Outcome {
    let ladder = [1000.0, 2000.0, 5000.0];
    let qualities = [0, 0, 1, 1, 2, 2, 1, 0, 0, 1];
    let downloads = [1.0, 1.5, 1.0, 1.0, 2.0, 2.5, 1.5, 1.0, 1.0, 1.0];
    let before = [0.0, 3.0, 3.5, 4.5, 5.5, 0.5, 2.0, 2.5, 3.5, 4.5];
    let records: Vec<EpochRecord> = (0..10)
        .map(|t| fixture_record(t + 1, qualities[t], ladder[qualities[t]], before[t], downloads[t]))
        .collect();
    let mut m = qoe_metrics(&records, &ladder, 2, 20.0);
    let mut other = qoe_metrics(&records, &ladder, 2, 20.0);
    other.avg_bitrate_kbps = 2750.0;
    normalize_avg_bitrate(&mut [&mut m, &mut other]);

    // Hand-computed:
    //   bitrates 1000,1000,2000,2000,5000,5000,2000,1000,1000,2000 -> mean 2200
    //   5 switches over 9 pairs -> stability 4/9
    //   amplitudes 0+1000+0+3000+0+3000+1000+0+1000 = 9000 over 4000*9 -> 0.75
    //   stalls at t=1 (0 + 1 + 1.5) and t=6 (-0.5 + 2.5 + 1.5) -> 6 s of 20 -> 0.7
    //   2 stalls over ceil(10/2) = 5 -> 0.6
    let expected = [
        ("avg_bitrate", m.avg_bitrate_kbps, 2200.0),
        ("normalized", m.normalized_avg_bitrate, 0.8),
        ("stability", m.stability, 4.0 / 9.0),
        ("smoothness", m.smoothness, 0.75),
        ("consistency", m.consistency, 0.7),
        ("continuity", m.continuity, 0.6),
    ];

    // One stall at t = 5 with 1 s buffered, downloads of 3 s then 2 s,
    // D = 100 s: penalty -1 + 3 + 2 = 4 -> 0.96.
    let mut single: Vec<EpochRecord> = (0..10).map(|t| fixture_record(t + 1, 0, 1000.0, 10.0, 1.0)).collect();
    single[4] = fixture_record(5, 0, 1000.0, 1.0, 3.0);
    single[5] = fixture_record(6, 0, 1000.0, 2.0, 2.0);
    let s = qoe_metrics(&single, &ladder, 2, 100.0);

    let mut bad: Vec<String> = expected
        .iter()
        .filter(|(_, got, want)| (got - want).abs() > 1e-9)
        .map(|(name, got, want)| format!("{name} {got} != {want}"))
        .collect();
    if (s.consistency - 0.96).abs() > 1e-9 {
        bad.push(format!("tau=2 consistency {} != 0.96", s.consistency));
    }
    if bad.is_empty() {
        Ok("10-epoch fixture and the tau = 2 stall case match to 1e-9".into())
    } else {
        Err(bad.join(", "))
    }
}

// 10. Determinism of the compare command.

fn read_tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    out
}

fn criterion_determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = ScenarioConfig::markovian(Scenario::Vod, 3, 150, SEED + 10);
    let config_path = tmp.path().join("scenario.json");
    std::fs::write(&config_path, serde_json::to_string_pretty(&config).unwrap()).map_err(|e| e.to_string())?;
    let mut trees = Vec::new();
    for run in ["a", "b"] {
        let out = tmp.path().join(run);
        let status = Command::new(env!("CARGO_BIN_EXE_abr-sim"))
            .args(["compare", "--config"])
            .arg(&config_path)
            .arg("--out")
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(String::from_utf8_lossy(&status.stderr).into_owned());
        }
        trees.push(read_tree(&out));
    }
    let files = trees[0].len();
    ensure(
        files > 1 && trees[0] == trees[1],
        format!("two compare runs, {files} artifacts, identical: {}", trees[0] == trees[1]),
    )
}

fn main() -> ExitCode {
    let mut results = Vec::new();

    run(
        &mut results,
        Criterion { id: 1, name: "simplex projection matches grid oracle", limit: Some(Duration::from_secs(5)) },
        criterion_projection,
    );
    run(
        &mut results,
        Criterion { id: 2, name: "hindsight benchmark matches grid oracle", limit: Some(Duration::from_secs(30)) },
        criterion_benchmark,
    );

    // Shared markovian grids: 20 traces, reference ladder, V = 2 s, tau = 2.
    let timer = Instant::now();
    let vod = run_compare(&ScenarioConfig::markovian(Scenario::Vod, 20, 600, SEED + 7));
    let vod_time = timer.elapsed();
    let timer = Instant::now();
    let live = run_compare(&ScenarioConfig::markovian(Scenario::Live, 20, 600, SEED + 8));
    let live_time = timer.elapsed();
    let (vod, live) = match (vod, live) {
        (Ok(v), Ok(l)) => (v, l),
        (v, l) => {
            for e in [v.err(), l.err()].into_iter().flatten() {
                println!("FAIL markovian grid: {e}");
            }
            return ExitCode::FAILURE;
        }
    };

    run(
        &mut results,
        Criterion { id: 3, name: "buffer law holds on every epoch", limit: None },
        || criterion_buffer_law(&[&vod, &live]),
    );
    run(
        &mut results,
        Criterion { id: 4, name: "switching budget", limit: None },
        criterion_budget,
    );
    run(
        &mut results,
        Criterion { id: 5, name: "underflow residual converges", limit: Some(Duration::from_secs(120)) },
        criterion_residual,
    );
    run(
        &mut results,
        Criterion { id: 6, name: "regret rate vs horizon", limit: Some(Duration::from_secs(300)) },
        criterion_regret,
    );
    let start = Instant::now();
    let outcome = criterion_ordering(&vod);
    results.push(report(
        &Criterion { id: 7, name: "average bitrate ordering", limit: Some(Duration::from_secs(180)) },
        vod_time + start.elapsed(),
        &outcome,
    ));
    let start = Instant::now();
    let outcome = criterion_stability(&[("vod", &vod), ("live", &live)]);
    results.push(report(
        &Criterion { id: 8, name: "stability ordering between budgets", limit: None },
        live_time + start.elapsed(),
        &outcome,
    ));
    run(
        &mut results,
        Criterion { id: 9, name: "metric fixtures", limit: None },
        criterion_metrics,
    );
    run(
        &mut results,
        Criterion { id: 10, name: "compare is byte-identical across runs", limit: None },
        criterion_determinism,
    );

    let passed = results.iter().filter(|r| **r).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
