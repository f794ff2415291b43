//! Experiment harness: scenario configuration, batch comparison of methods
//! over trace sets, and the report/CSV artifacts.
//!
//! A comparison runs every (method, trace) pair. Pairs may execute in
//! parallel; results are always reduced in (method, trace) order so the
//! artifacts are byte-identical across runs.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{BbParams, BbPolicy, RbParams, RbPolicy};
use crate::benchmark::{default_window, solve_benchmark, BenchmarkSolution, WindowMode};
use crate::channel::{concat_traces, load_trace, ChannelTrace, MarkovianChannel, DEFAULT_FLOOR_KBPS};
use crate::error::{Error, Result};
use crate::format::{round6, sig6};
use crate::l2a::{Accumulation, L2aParams, L2aPolicy, DEFAULT_LOSS_UNIT_KBPS, DEFAULT_VL_EXPONENT};
use crate::media::{load_manifest, synthesize_manifest, Manifest, REFERENCE_LADDER_KBPS};
use crate::metrics::{normalize_avg_bitrate, qoe_metrics, regret_and_residuals, ConvergenceSeries, QoeMetrics};
use crate::policy::AbrPolicy;
use crate::session::{run_session, SessionConfig, SessionLog};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// Video on demand, 120 s buffer cap.
    #[default]
    Vod,
    /// Live streaming, 20 s buffer cap.
    Live,
}

impl Scenario {
    pub fn default_b_max_s(self) -> f64 {
        match self {
            Scenario::Vod => 120.0,
            Scenario::Live => 20.0,
        }
    }
}

/// A rate adaptation method and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "abr", rename_all = "kebab-case")]
pub enum MethodSpec {
    L2a {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        beta: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vl_exponent: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        epsilon: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha: Option<f64>,
        #[serde(default)]
        accumulation: Accumulation,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        loss_unit_kbps: Option<f64>,
    },
    Rb {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        #[serde(default)]
        params: RbParams,
    },
    Bb {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        v_b: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma_p: Option<f64>,
    },
}

impl MethodSpec {
    pub fn l2a(beta: f64) -> Self {
        MethodSpec::L2a {
            label: None,
            beta,
            vl_exponent: None,
            epsilon: None,
            alpha: None,
            accumulation: Accumulation::Sum,
            loss_unit_kbps: None,
        }
    }

    pub fn rb() -> Self {
        MethodSpec::Rb {
            label: None,
            params: RbParams::default(),
        }
    }

    pub fn bb() -> Self {
        MethodSpec::Bb {
            label: None,
            v_b: None,
            gamma_p: None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            MethodSpec::L2a { label: Some(l), .. }
            | MethodSpec::Rb { label: Some(l), .. }
            | MethodSpec::Bb { label: Some(l), .. } => l.clone(),
            MethodSpec::L2a { beta, .. } => format!("l2a-b{beta}"),
            MethodSpec::Rb { .. } => "rb".to_string(),
            MethodSpec::Bb { .. } => "bb".to_string(),
        }
    }

    /// L2A parameters for a horizon of `horizon` segments.
    pub fn l2a_params(&self, horizon: usize) -> Option<L2aParams> {
        let MethodSpec::L2a {
            beta,
            vl_exponent,
            epsilon,
            alpha,
            accumulation,
            loss_unit_kbps,
            ..
        } = self
        else {
            return None;
        };
        let exponent = vl_exponent
            .or(epsilon.map(|e| 1.0 - e / 2.0))
            .unwrap_or(DEFAULT_VL_EXPONENT);
        let mut params = L2aParams::with_vl_exponent(horizon, *beta, exponent);
        if let Some(a) = alpha {
            params.alpha = *a;
        }
        params.accumulation = *accumulation;
        params.loss_unit_kbps = loss_unit_kbps.unwrap_or(DEFAULT_LOSS_UNIT_KBPS);
        Some(params)
    }

    pub fn build(&self, manifest: &Manifest, b_max_s: f64) -> Result<Box<dyn AbrPolicy + Send>> {
        let label = self.label();
        Ok(match self {
            MethodSpec::L2a { .. } => {
                let params = self.l2a_params(manifest.horizon()).expect("l2a spec");
                Box::new(L2aPolicy::new(params, manifest.levels())?.with_label(label))
            }
            MethodSpec::Rb { params, .. } => Box::new(Labeled {
                label,
                inner: RbPolicy::new(*params),
            }),
            MethodSpec::Bb { v_b, gamma_p, .. } => {
                let derived = BbParams::from_ladder(
                    manifest.bitrates_kbps(),
                    manifest.segment_duration_s(),
                    b_max_s,
                )?;
                let params = BbParams {
                    v_b: v_b.unwrap_or(derived.v_b),
                    gamma_p: gamma_p.unwrap_or(derived.gamma_p),
                };
                Box::new(Labeled {
                    label,
                    inner: BbPolicy::new(params)?,
                })
            }
        })
    }
}

struct Labeled<P> {
    label: String,
    inner: P,
}

impl<P: AbrPolicy> AbrPolicy for Labeled<P> {
    fn name(&self) -> String {
        self.label.clone()
    }

    fn decide(
        &mut self,
        ctx: &crate::policy::DecisionContext<'_>,
        feedback: Option<&crate::session::EpochFeedback>,
    ) -> usize {
        self.inner.decide(ctx, feedback)
    }

    fn distribution(&self) -> Option<&[f64]> {
        self.inner.distribution()
    }
}

/// Where the channel traces of a scenario come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TraceSpec {
    File {
        path: PathBuf,
    },
    /// `count` independent markovian traces seeded from the scenario seed.
    Markovian {
        #[serde(default = "one")]
        count: usize,
        #[serde(flatten)]
        channel: MarkovianChannel,
    },
    /// One trace built by appending `parts` markovian traces.
    ConcatMarkovian {
        parts: usize,
        #[serde(flatten)]
        channel: MarkovianChannel,
    },
}

fn one() -> usize {
    1
}

/// Where the manifest of a scenario comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ManifestSpec {
    File {
        path: PathBuf,
    },
    Synthetic {
        segments: usize,
        #[serde(default = "reference_ladder")]
        bitrates_kbps: Vec<f64>,
        #[serde(default = "reference_duration")]
        segment_duration_s: f64,
        #[serde(default)]
        vbr_jitter: f64,
    },
}

fn reference_ladder() -> Vec<f64> {
    REFERENCE_LADDER_KBPS.to_vec()
}

fn reference_duration() -> f64 {
    crate::media::REFERENCE_SEGMENT_DURATION_S
}

impl ManifestSpec {
    pub fn load(&self, seed: u64) -> Result<Manifest> {
        match self {
            ManifestSpec::File { path } => load_manifest(path),
            ManifestSpec::Synthetic {
                segments,
                bitrates_kbps,
                segment_duration_s,
                vbr_jitter,
            } => synthesize_manifest(*segments, bitrates_kbps, *segment_duration_s, *vbr_jitter, seed),
        }
    }
}

/// How the average-bitrate column is normalized across methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// Normalize within each trace, then average over traces.
    #[default]
    PerTrace,
    /// Average raw bitrates over traces, then normalize.
    AfterAverage,
}

/// A self-contained experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub scenario: Scenario,
    /// Overrides the scenario's buffer cap.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_max_s: Option<f64>,
    #[serde(default = "default_tau")]
    pub tau: usize,
    pub methods: Vec<MethodSpec>,
    pub traces: Vec<TraceSpec>,
    pub manifest: ManifestSpec,
    #[serde(default)]
    pub seed: u64,
    /// Benchmark window; `⌈T^0.9⌉` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[serde(default)]
    pub window_mode: WindowMode,
    #[serde(default)]
    pub normalization: Normalization,
    #[serde(default = "default_floor")]
    pub floor_kbps: f64,
}

fn default_tau() -> usize {
    2
}

fn default_floor() -> f64 {
    DEFAULT_FLOOR_KBPS
}

impl ScenarioConfig {
    /// The markovian comparison grid: `traces` synthetic traces, the reference
    /// ladder, CBR segments, and L2A at β = 0.3 and 1 against RB and BB.
    pub fn markovian(scenario: Scenario, traces: usize, segments: usize, seed: u64) -> Self {
        ScenarioConfig {
            scenario,
            b_max_s: None,
            tau: 2,
            methods: vec![MethodSpec::l2a(0.3), MethodSpec::l2a(1.0), MethodSpec::rb(), MethodSpec::bb()],
            traces: vec![TraceSpec::Markovian {
                count: traces,
                channel: MarkovianChannel {
                    duration_s: (segments as f64 * 2.0 * 4.0).max(60.0),
                    ..MarkovianChannel::default()
                },
            }],
            manifest: ManifestSpec::Synthetic {
                segments,
                bitrates_kbps: reference_ladder(),
                segment_duration_s: reference_duration(),
                vbr_jitter: 0.0,
            },
            seed,
            window: None,
            window_mode: WindowMode::Sliding,
            normalization: Normalization::PerTrace,
            floor_kbps: DEFAULT_FLOOR_KBPS,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: ScenarioConfig = serde_json::from_str(text)
            .map_err(|e| Error::InvalidParameter(format!("scenario config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::InvalidParameter("scenario needs at least one method".into()));
        }
        if self.traces.is_empty() {
            return Err(Error::InvalidParameter("scenario needs at least one trace".into()));
        }
        if self.tau < 1 {
            return Err(Error::InvalidParameter("tau must be at least 1".into()));
        }
        Ok(())
    }

    pub fn b_max(&self) -> f64 {
        self.b_max_s.unwrap_or(self.scenario.default_b_max_s())
    }

    pub fn session_config(&self) -> SessionConfig {
        SessionConfig::new(self.b_max(), self.tau)
    }

    /// Loads or generates every trace, in config order, with stable names.
    pub fn resolve_traces(&self) -> Result<Vec<(String, ChannelTrace)>> {
        let mut out = Vec::new();
        let mut generated = 0u64;
        for spec in &self.traces {
            match spec {
                TraceSpec::File { path } => {
                    let name = path
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_else(|| format!("trace-{:02}", out.len()));
                    out.push((name, load_trace(path, self.floor_kbps)?));
                }
                TraceSpec::Markovian { count, channel } => {
                    for _ in 0..*count {
                        let seed = self.seed.wrapping_add(1000 + generated);
                        out.push((format!("markovian-{generated:02}"), channel.generate(seed)?));
                        generated += 1;
                    }
                }
                TraceSpec::ConcatMarkovian { parts, channel } => {
                    let pieces = (0..*parts)
                        .map(|i| channel.generate(self.seed.wrapping_add(1000 + generated + i as u64)))
                        .collect::<Result<Vec<_>>>()?;
                    out.push((format!("concat-{generated:02}"), concat_traces(&pieces)?));
                    generated += *parts as u64;
                }
            }
        }
        Ok(out)
    }
}

/// Everything measured for one (method, trace) session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionReport {
    pub method: String,
    pub trace: String,
    pub b_max_s: f64,
    pub tau: usize,
    pub horizon: usize,
    pub metrics: QoeMetrics,
    pub benchmark: BenchmarkSolution,
    pub final_regret_rate: f64,
    pub final_residual1_rate: f64,
    pub final_residual2_rate: f64,
    pub one_hot: bool,
    pub total_stall_s: f64,
}

/// A session with its report and the full series, before artifact rounding.
#[derive(Debug, Clone)]
pub struct SessionOutcome {
    pub report: SessionReport,
    pub log: SessionLog,
    pub convergence: ConvergenceSeries,
}

/// Runs one method on one trace and evaluates it.
pub fn evaluate_session(
    method: &MethodSpec,
    trace_name: &str,
    trace: &ChannelTrace,
    manifest: &Manifest,
    session: &SessionConfig,
    window: Option<usize>,
    window_mode: WindowMode,
) -> Result<SessionOutcome> {
    let wrap = |e: Error| Error::Session {
        method: method.label(),
        trace: trace_name.to_string(),
        source: Box::new(e),
    };
    let mut policy = method.build(manifest, session.b_max_s).map_err(wrap)?;
    let log = run_session(&mut policy, session, manifest, trace).map_err(wrap)?;
    let horizon = log.horizon();
    let metrics = qoe_metrics(&log.records, manifest.bitrates_kbps(), session.tau_resume, manifest.duration_s());
    let benchmark = if horizon == 0 {
        BenchmarkSolution::default()
    } else {
        let k = window.unwrap_or_else(|| default_window(horizon)).min(horizon);
        solve_benchmark(manifest, &log.realized_rates_kbps(), k, window_mode, session.b_max_s)
            .map_err(wrap)?
    };
    let convergence = if horizon == 0 {
        ConvergenceSeries::default()
    } else {
        regret_and_residuals(&log, manifest, &benchmark.omega_star, session.b_max_s)
    };
    let report = SessionReport {
        method: method.label(),
        trace: trace_name.to_string(),
        b_max_s: session.b_max_s,
        tau: session.tau_resume,
        horizon,
        metrics,
        benchmark,
        final_regret_rate: convergence.final_regret_rate(),
        final_residual1_rate: convergence.final_residual1_rate(),
        final_residual2_rate: convergence.final_residual2_rate(),
        one_hot: convergence.one_hot,
        total_stall_s: log.total_stall_s(),
    };
    Ok(SessionOutcome {
        report,
        log,
        convergence,
    })
}

/// One comparison row: a method's metrics averaged over every trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub scenario: Scenario,
    pub method: String,
    pub avg_bitrate_kbps: f64,
    pub normalized_avg_bitrate: f64,
    pub stability: f64,
    pub smoothness: f64,
    pub consistency: f64,
    pub continuity: f64,
    pub regret_rate: f64,
    pub residual1_rate: f64,
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub scenario: Scenario,
    pub rows: Vec<ComparisonRow>,
    /// Sessions ordered by method, then trace.
    pub sessions: Vec<SessionOutcome>,
}

impl Comparison {
    pub fn row(&self, method: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.method == method)
    }

    pub fn sessions_of<'a>(&'a self, method: &'a str) -> impl Iterator<Item = &'a SessionOutcome> + 'a {
        self.sessions.iter().filter(move |s| s.report.method == method)
    }
}

/// Runs every (method, trace) session of `config` and aggregates the results.
pub fn run_compare(config: &ScenarioConfig) -> Result<Comparison> {
    config.validate()?;
    let manifest = config.manifest.load(config.seed)?;
    let traces = config.resolve_traces()?;
    let session = config.session_config();
    session.validate(manifest.segment_duration_s())?;

    let pairs: Vec<(usize, usize)> = (0..config.methods.len())
        .flat_map(|m| (0..traces.len()).map(move |t| (m, t)))
        .collect();
    let mut sessions = pairs
        .par_iter()
        .map(|&(m, t)| {
            evaluate_session(
                &config.methods[m],
                &traces[t].0,
                &traces[t].1,
                &manifest,
                &session,
                config.window,
                config.window_mode,
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let n_traces = traces.len();
    if config.normalization == Normalization::PerTrace {
        for t in 0..n_traces {
            let mut group: Vec<&mut QoeMetrics> = sessions
                .iter_mut()
                .skip(t)
                .step_by(n_traces)
                .map(|s| &mut s.report.metrics)
                .collect();
            normalize_avg_bitrate(&mut group);
        }
    }

    let mean = |xs: &mut dyn Iterator<Item = f64>| {
        let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
        sum / n.max(1) as f64
    };
    let mut rows: Vec<ComparisonRow> = config
        .methods
        .iter()
        .enumerate()
        .map(|(m, spec)| {
            let group = &sessions[m * n_traces..(m + 1) * n_traces];
            ComparisonRow {
                scenario: config.scenario,
                method: spec.label(),
                avg_bitrate_kbps: mean(&mut group.iter().map(|s| s.report.metrics.avg_bitrate_kbps)),
                normalized_avg_bitrate: mean(&mut group.iter().map(|s| s.report.metrics.normalized_avg_bitrate)),
                stability: mean(&mut group.iter().map(|s| s.report.metrics.stability)),
                smoothness: mean(&mut group.iter().map(|s| s.report.metrics.smoothness)),
                consistency: mean(&mut group.iter().map(|s| s.report.metrics.consistency)),
                continuity: mean(&mut group.iter().map(|s| s.report.metrics.continuity)),
                regret_rate: mean(&mut group.iter().map(|s| s.report.final_regret_rate)),
                residual1_rate: mean(&mut group.iter().map(|s| s.report.final_residual1_rate)),
            }
        })
        .collect();
    if config.normalization == Normalization::AfterAverage {
        let best = rows.iter().map(|r| r.avg_bitrate_kbps).fold(0.0, f64::max);
        for r in &mut rows {
            r.normalized_avg_bitrate = if best > 0.0 { r.avg_bitrate_kbps / best } else { 1.0 };
        }
    }
    Ok(Comparison {
        scenario: config.scenario,
        rows,
        sessions,
    })
}

fn round_metrics(m: &QoeMetrics) -> QoeMetrics {
    QoeMetrics {
        avg_bitrate_kbps: round6(m.avg_bitrate_kbps),
        normalized_avg_bitrate: round6(m.normalized_avg_bitrate),
        stability: round6(m.stability),
        smoothness: round6(m.smoothness),
        consistency: round6(m.consistency),
        continuity: round6(m.continuity),
        stall_count: m.stall_count,
        stall_penalty_s: round6(m.stall_penalty_s),
        flags: m.flags.clone(),
    }
}

impl SessionReport {
    /// Copy with every float rounded to six significant digits.
    pub fn rounded(&self) -> SessionReport {
        SessionReport {
            method: self.method.clone(),
            trace: self.trace.clone(),
            b_max_s: round6(self.b_max_s),
            tau: self.tau,
            horizon: self.horizon,
            metrics: round_metrics(&self.metrics),
            benchmark: self.benchmark.rounded(),
            final_regret_rate: round6(self.final_regret_rate),
            final_residual1_rate: round6(self.final_residual1_rate),
            final_residual2_rate: round6(self.final_residual2_rate),
            one_hot: self.one_hot,
            total_stall_s: round6(self.total_stall_s),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.rounded()).expect("report serializes") + "\n"
    }
}

/// Writes `t,regret_rate,residual1_rate,residual2_rate`.
pub fn write_convergence_csv<W: std::io::Write>(series: &ConvergenceSeries, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["t", "regret_rate", "residual1_rate", "residual2_rate"])?;
    for t in 0..series.regret_rate.len() {
        wtr.write_record([
            (t + 1).to_string(),
            sig6(series.regret_rate[t]),
            sig6(series.residual1_rate[t]),
            sig6(series.residual2_rate[t]),
        ])?;
    }
    wtr.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn write_comparison_csv<W: std::io::Write>(rows: &[ComparisonRow], writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record([
        "scenario",
        "method",
        "avg_bitrate_kbps",
        "normalized_avg_bitrate",
        "stability",
        "smoothness",
        "consistency",
        "continuity",
        "regret_rate",
        "residual1_rate",
    ])?;
    for r in rows {
        let scenario = match r.scenario {
            Scenario::Vod => "vod",
            Scenario::Live => "live",
        };
        wtr.write_record([
            scenario.to_string(),
            r.method.clone(),
            sig6(r.avg_bitrate_kbps),
            sig6(r.normalized_avg_bitrate),
            sig6(r.stability),
            sig6(r.smoothness),
            sig6(r.consistency),
            sig6(r.continuity),
            sig6(r.regret_rate),
            sig6(r.residual1_rate),
        ])?;
    }
    wtr.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

/// Reads the realized rates (`C_kbps` column) of a session log CSV.
pub fn read_realized_rates(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::Reader::from_reader(file);
    let column = rdr
        .headers()?
        .iter()
        .position(|h| h == "C_kbps")
        .ok_or_else(|| Error::InvalidParameter(format!("{}: no C_kbps column", path.display())))?;
    rdr.records()
        .enumerate()
        .map(|(i, row)| {
            let row = row?;
            row.get(column)
                .and_then(|v| v.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::TraceParse {
                    row: i + 2,
                    message: "C_kbps is not a number".into(),
                })
        })
        .collect()
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|e| Error::io(path, e))
}

/// Writes one session's JSON report, epoch log and convergence CSV into `dir`.
pub fn write_session_artifacts(outcome: &SessionOutcome, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let stem = format!("{}__{}", outcome.report.method, outcome.report.trace);
    let json = dir.join(format!("{stem}.json"));
    fs::write(&json, outcome.report.to_json()).map_err(|e| Error::io(&json, e))?;
    outcome.log.write_csv(create(&dir.join(format!("{stem}.log.csv")))?)?;
    write_convergence_csv(&outcome.convergence, create(&dir.join(format!("{stem}.convergence.csv")))?)?;
    Ok(())
}

impl Comparison {
    /// Writes `comparison.csv` plus per-session artifacts under `sessions/`.
    pub fn write(&self, out_dir: &Path) -> Result<()> {
        fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
        write_comparison_csv(&self.rows, create(&out_dir.join("comparison.csv"))?)?;
        let sessions = out_dir.join("sessions");
        for s in &self.sessions {
            write_session_artifacts(s, &sessions)?;
        }
        Ok(())
    }
}
