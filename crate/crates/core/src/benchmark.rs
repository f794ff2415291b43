//! Hindsight benchmark: the best fixed distribution `ω*` given every realized
//! channel rate, subject to the buffer constraints holding on every window of
//! `K` consecutive epochs.
//!
//! All functions are linear in `ω`, so the benchmark is a small linear program
//! over the simplex. When no distribution satisfies every window, the solver
//! finds the smallest uniform slack per constraint family, underflow first,
//! and then maximizes the expected bitrate under those slacks. A family that
//! can be satisfied is never loosened because the other one cannot.

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::round6;
use crate::media::Manifest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowMode {
    /// Every window `k..k+K` for `k = 0..=T-K`.
    #[default]
    Sliding,
    /// Back-to-back windows; a shorter tail window closes the horizon.
    Disjoint,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BenchmarkSolution {
    pub omega_star: Vec<f64>,
    /// Expected bitrate `Σ ω*[n]·r[n]` in kbps (the negated per-epoch loss).
    pub objective: f64,
    pub max_window_violation: f64,
    /// Largest of the two family slacks.
    pub slack_used: f64,
    pub underflow_slack: f64,
    pub overflow_slack: f64,
    pub window: usize,
}

impl BenchmarkSolution {
    /// Copy with every float rounded to six significant digits.
    pub fn rounded(&self) -> BenchmarkSolution {
        BenchmarkSolution {
            omega_star: self.omega_star.iter().map(|&w| round6(w)).collect(),
            objective: round6(self.objective),
            max_window_violation: round6(self.max_window_violation),
            slack_used: round6(self.slack_used),
            underflow_slack: round6(self.underflow_slack),
            overflow_slack: round6(self.overflow_slack),
            window: self.window,
        }
    }
}

/// Default window length `⌈T^0.9⌉`.
pub fn default_window(horizon: usize) -> usize {
    ((horizon as f64).powf(0.9).ceil() as usize).clamp(1, horizon.max(1))
}

/// Window sums of per-epoch download times, `a[k][n] = Σ S[t][n] / C[t]`, with
/// the window length.
struct Windows {
    sums: Vec<Vec<f64>>,
    lengths: Vec<usize>,
}

fn build_windows(manifest: &Manifest, rates_kbps: &[f64], k: usize, mode: WindowMode) -> Windows {
    let n = manifest.levels();
    let horizon = rates_kbps.len();
    let mut prefix = vec![vec![0.0; n]; horizon + 1];
    for t in 0..horizon {
        let row = manifest.segment_row(t);
        for level in 0..n {
            let next = prefix[t][level] + row[level] / rates_kbps[t];
            prefix[t + 1][level] = next;
        }
    }
    let starts: Vec<usize> = match mode {
        WindowMode::Sliding => (0..=horizon - k).collect(),
        WindowMode::Disjoint => (0..horizon).step_by(k).collect(),
    };
    let mut sums = Vec::with_capacity(starts.len());
    let mut lengths = Vec::with_capacity(starts.len());
    for start in starts {
        let end = (start + k).min(horizon);
        sums.push((0..n).map(|l| prefix[end][l] - prefix[start][l]).collect());
        lengths.push(end - start);
    }
    Windows { sums, lengths }
}

/// Largest window violation of `omega` in each family: (underflow, overflow).
fn family_violations(omega: &[f64], windows: &Windows, v: f64, overflow_margin: f64) -> (f64, f64) {
    windows
        .sums
        .iter()
        .zip(&windows.lengths)
        .map(|(a, &len)| {
            let download: f64 = a.iter().zip(omega).map(|(x, w)| x * w).sum();
            let len = len as f64;
            (download - len * v, len * (v - overflow_margin) - download)
        })
        .fold((f64::NEG_INFINITY, f64::NEG_INFINITY), |(u, o), (a, b)| (u.max(a), o.max(b)))
}

/// Largest window violation in each family, (underflow, overflow), of an
/// arbitrary distribution, for oracles and reports.
pub fn window_violations(
    omega: &[f64],
    manifest: &Manifest,
    rates_kbps: &[f64],
    window: usize,
    mode: WindowMode,
    b_max_s: f64,
) -> (f64, f64) {
    let windows = build_windows(manifest, rates_kbps, window, mode);
    let v = manifest.segment_duration_s();
    family_violations(omega, &windows, v, b_max_s / rates_kbps.len() as f64)
}

/// Largest window violation over both families.
pub fn window_violation(
    omega: &[f64],
    manifest: &Manifest,
    rates_kbps: &[f64],
    window: usize,
    mode: WindowMode,
    b_max_s: f64,
) -> f64 {
    let (u, o) = window_violations(omega, manifest, rates_kbps, window, mode, b_max_s);
    u.max(o)
}

/// How one constraint family enters a solve.
#[derive(Clone, Copy, PartialEq)]
enum Rows {
    Skip,
    /// Every window may exceed its bound by this much.
    Allow(f64),
    /// Every window may exceed its bound by the shared slack variable.
    Slack,
}

#[allow(clippy::too_many_arguments)]
fn add_window_rows(
    problem: &mut Problem,
    omega: &[minilp::Variable],
    slack: Option<minilp::Variable>,
    windows: &Windows,
    v: f64,
    overflow_margin: f64,
    underflow: Rows,
    overflow: Rows,
) {
    let mut push = |mut coeffs: Vec<(minilp::Variable, f64)>, rhs: f64, rows: Rows| match rows {
        Rows::Skip => {}
        Rows::Allow(allowance) => problem.add_constraint(&coeffs, ComparisonOp::Le, rhs + allowance),
        Rows::Slack => {
            coeffs.push((slack.expect("slack variable"), -1.0));
            problem.add_constraint(&coeffs, ComparisonOp::Le, rhs);
        }
    };
    for (a, &len) in windows.sums.iter().zip(&windows.lengths) {
        let len = len as f64;
        push(omega.iter().zip(a).map(|(&w, &x)| (w, x)).collect(), len * v, underflow);
        push(
            omega.iter().zip(a).map(|(&w, &x)| (w, -x)).collect(),
            -len * (v - overflow_margin),
            overflow,
        );
    }
}

fn simplex_vars(problem: &mut Problem, objective: &[f64]) -> Vec<minilp::Variable> {
    let vars: Vec<_> = objective
        .iter()
        .map(|&c| problem.add_var(c, (0.0, 1.0)))
        .collect();
    let ones: Vec<_> = vars.iter().map(|&v| (v, 1.0)).collect();
    problem.add_constraint(&ones, ComparisonOp::Eq, 1.0);
    vars
}

/// Solves for the hindsight benchmark over the epochs covered by
/// `rates_kbps` (the realized `C_t` of a completed session).
pub fn solve_benchmark(
    manifest: &Manifest,
    rates_kbps: &[f64],
    window: usize,
    mode: WindowMode,
    b_max_s: f64,
) -> Result<BenchmarkSolution> {
    let horizon = rates_kbps.len();
    if horizon == 0 || horizon > manifest.horizon() {
        return Err(Error::InvalidParameter(format!(
            "benchmark needs 1..={} realized rates, got {horizon}",
            manifest.horizon()
        )));
    }
    if window == 0 || window > horizon {
        return Err(Error::InvalidParameter(format!(
            "window must lie in 1..={horizon}, got {window}"
        )));
    }
    if rates_kbps.iter().any(|c| !(*c > 0.0)) {
        return Err(Error::InvalidParameter("realized rates must be positive".into()));
    }
    let n = manifest.levels();
    let v = manifest.segment_duration_s();
    let margin = b_max_s / horizon as f64;
    let windows = build_windows(manifest, rates_kbps, window, mode);

    let min_slack = |underflow: Rows, overflow: Rows| -> Result<f64, minilp::Error> {
        let mut problem = Problem::new(OptimizationDirection::Minimize);
        let omega = simplex_vars(&mut problem, &vec![0.0; n]);
        let slack = problem.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
        add_window_rows(&mut problem, &omega, Some(slack), &windows, v, margin, underflow, overflow);
        problem.solve().map(|s| s.objective().max(0.0))
    };
    let bitrates = manifest.bitrates_kbps();
    let underflow_slack = min_slack(Rows::Slack, Rows::Skip)
        .map_err(|e| Error::Solver(format!("underflow slack: {e}")))?;
    // Each found slack becomes a bound of the next solve. Round-off can make
    // that bound infeasible by a hair, so it is relaxed slightly on retry.
    let mut relax = 0.0;
    let (overflow_slack, omega_star) = loop {
        let allow = |slack: f64| Rows::Allow(slack + relax * (1.0 + slack));
        let attempt = min_slack(allow(underflow_slack), Rows::Slack).and_then(|overflow_slack| {
            let mut problem = Problem::new(OptimizationDirection::Maximize);
            let omega = simplex_vars(&mut problem, bitrates);
            add_window_rows(
                &mut problem,
                &omega,
                None,
                &windows,
                v,
                margin,
                allow(underflow_slack),
                allow(overflow_slack),
            );
            let solution = problem.solve()?;
            Ok((overflow_slack, omega.iter().map(|&w| solution[w]).collect::<Vec<f64>>()))
        });
        match attempt {
            Ok(found) => break found,
            Err(minilp::Error::Infeasible) if relax < 1e-6 => {
                relax = if relax == 0.0 { 1e-9 } else { relax * 10.0 };
            }
            Err(e) => return Err(Error::Solver(format!("objective phase: {e}"))),
        }
    };
    // Clean up solver round-off so the result is a proper distribution.
    let clipped: Vec<f64> = omega_star.iter().map(|w| w.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    let omega_star: Vec<f64> = clipped.iter().map(|w| w / total).collect();
    let objective = omega_star.iter().zip(bitrates).map(|(w, r)| w * r).sum();
    let (under, over) = family_violations(&omega_star, &windows, v, margin);
    Ok(BenchmarkSolution {
        omega_star,
        objective,
        max_window_violation: under.max(over),
        slack_used: underflow_slack.max(overflow_slack),
        underflow_slack,
        overflow_slack,
        window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_level(horizon: usize, sizes: [f64; 2]) -> Manifest {
        Manifest::new(2.0, vec![1000.0, 3000.0], vec![sizes.to_vec(); horizon]).unwrap()
    }

    #[test]
    fn single_binding_underflow_window() {
        // S1/C = 1 s < V = 2 s < S2/C = 3 s: ω2 = (V - S1/C) / ((S2 - S1)/C) = 0.5.
        let m = two_level(50, [1000.0, 3000.0]);
        let rates = vec![1000.0; 50];
        let sol = solve_benchmark(&m, &rates, 10, WindowMode::Sliding, 120.0).unwrap();
        assert!((sol.omega_star[1] - 0.5).abs() < 1e-9, "{sol:?}");
        assert_eq!(sol.slack_used, 0.0);
        assert!(sol.max_window_violation <= 1e-9, "{sol:?}");
        assert!((sol.objective - 2000.0).abs() < 1e-6);
    }

    #[test]
    fn fast_channel_puts_all_mass_on_the_top_level() {
        let m = two_level(40, [2000.0, 6000.0]);
        let rates = vec![1e6; 40];
        let sol = solve_benchmark(&m, &rates, 8, WindowMode::Sliding, 20.0).unwrap();
        assert!((sol.omega_star[1] - 1.0).abs() < 1e-9, "{sol:?}");
        // The overflow side cannot be satisfied on such a channel.
        assert!(sol.slack_used > 0.0);
        assert!(sol.max_window_violation <= sol.slack_used + 1e-6);
    }

    #[test]
    fn full_window_is_one_constraint_pair() {
        let m = two_level(30, [1000.0, 3000.0]);
        let rates: Vec<f64> = (0..30).map(|t| if t < 15 { 800.0 } else { 4000.0 }).collect();
        let sliding = solve_benchmark(&m, &rates, 30, WindowMode::Sliding, 120.0).unwrap();
        let disjoint = solve_benchmark(&m, &rates, 30, WindowMode::Disjoint, 120.0).unwrap();
        assert!((sliding.objective - disjoint.objective).abs() < 1e-9);
        // Σ download = 15·(S/800) + 15·(S/4000) ≤ 30·2 for S = E[S].
        let s_bar = 60.0 / (15.0 / 800.0 + 15.0 / 4000.0);
        let w2 = (s_bar - 1000.0) / 2000.0;
        assert!((sliding.omega_star[1] - w2).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_windows() {
        let m = two_level(10, [1000.0, 3000.0]);
        assert!(solve_benchmark(&m, &[1000.0; 10], 0, WindowMode::Sliding, 20.0).is_err());
        assert!(solve_benchmark(&m, &[1000.0; 10], 11, WindowMode::Sliding, 20.0).is_err());
        assert!(solve_benchmark(&m, &[], 1, WindowMode::Sliding, 20.0).is_err());
    }

    #[test]
    fn default_window_is_t_to_the_point_nine() {
        assert_eq!(default_window(600), 317);
        assert_eq!(default_window(200), 118);
        assert_eq!(default_window(1), 1);
    }
}
