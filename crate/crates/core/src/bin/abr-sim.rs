use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use abr_sim::baselines::RbParams;
use abr_sim::benchmark::{default_window, solve_benchmark, WindowMode};
use abr_sim::channel::{concat_traces, load_trace, save_trace, MarkovianChannel, DEFAULT_FLOOR_KBPS};
use abr_sim::experiment::{
    evaluate_session, read_realized_rates, run_compare, write_session_artifacts, MethodSpec, Scenario,
    ScenarioConfig,
};
use abr_sim::l2a::Accumulation;
use abr_sim::media::{load_manifest, save_manifest, synthesize_manifest, REFERENCE_LADDER_KBPS};
use abr_sim::session::SessionConfig;

#[derive(Parser)]
#[command(name = "abr-sim", version, about = "Trace-driven adaptive bitrate streaming simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Stream one manifest over one trace with one policy.
    Run(RunArgs),
    /// Run every method on every trace of a scenario config.
    Compare(CompareArgs),
    /// Generate input assets.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Append trace CSVs back to back.
    ConcatTraces {
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_FLOOR_KBPS)]
        floor_kbps: f64,
    },
    /// Solve the hindsight benchmark for the realized rates of a session log.
    Benchmark {
        #[arg(long)]
        manifest: PathBuf,
        /// Session log CSV with a C_kbps column.
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        window: Option<usize>,
        #[arg(long, value_enum, default_value_t = ModeArg::Sliding)]
        mode: ModeArg,
        #[command(flatten)]
        buffer: BufferArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// Two-state markovian throughput trace.
    Trace {
        #[arg(long, default_value_t = 1200.0)]
        duration_s: f64,
        #[arg(long, default_value_t = 750.0)]
        low_kbps: f64,
        #[arg(long, default_value_t = 23000.0)]
        high_kbps: f64,
        #[arg(long, default_value_t = 0.05)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        step_s: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Synthetic manifest with optional VBR jitter.
    Manifest {
        #[arg(long)]
        segments: usize,
        /// Comma-separated ladder in kbps.
        #[arg(long, value_delimiter = ',')]
        bitrates_kbps: Option<Vec<f64>>,
        #[arg(long, default_value_t = 2.0)]
        segment_duration_s: f64,
        #[arg(long, default_value_t = 0.0)]
        jitter: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    Vod,
    Live,
}

impl From<ScenarioArg> for Scenario {
    fn from(s: ScenarioArg) -> Self {
        match s {
            ScenarioArg::Vod => Scenario::Vod,
            ScenarioArg::Live => Scenario::Live,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Sliding,
    Disjoint,
}

impl From<ModeArg> for WindowMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Sliding => WindowMode::Sliding,
            ModeArg::Disjoint => WindowMode::Disjoint,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AbrArg {
    L2a,
    Rb,
    Bb,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum AccumulationArg {
    Sum,
    Average,
}

#[derive(Args)]
struct BufferArgs {
    #[arg(long, value_enum)]
    scenario: Option<ScenarioArg>,
    /// Buffer cap in seconds; overrides the scenario default.
    #[arg(long)]
    bmax: Option<f64>,
    /// Segments to download before playback resumes after a stall.
    #[arg(long)]
    tau: Option<usize>,
}

impl BufferArgs {
    fn b_max(&self) -> f64 {
        self.bmax.unwrap_or_else(|| {
            Scenario::from(self.scenario.unwrap_or(ScenarioArg::Vod)).default_b_max_s()
        })
    }
}

#[derive(Args)]
struct PolicyArgs {
    #[arg(long, value_enum, default_value_t = AbrArg::L2a)]
    abr: AbrArg,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Sets the cautiousness exponent to 1 - ε/2.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    vl_exponent: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    loss_unit_kbps: Option<f64>,
    #[arg(long, value_enum, default_value_t = AccumulationArg::Sum)]
    accumulation: AccumulationArg,
    #[arg(long = "rb.kappa")]
    rb_kappa: Option<f64>,
    #[arg(long = "rb.w")]
    rb_w: Option<f64>,
    #[arg(long = "rb.dead-zone")]
    rb_dead_zone: Option<f64>,
    #[arg(long = "rb.ewma")]
    rb_ewma: Option<f64>,
    #[arg(long = "bb.vb")]
    bb_vb: Option<f64>,
    #[arg(long = "bb.gamma-p")]
    bb_gamma_p: Option<f64>,
}

impl PolicyArgs {
    fn method(&self) -> MethodSpec {
        match self.abr {
            AbrArg::L2a => MethodSpec::L2a {
                label: None,
                beta: self.beta,
                vl_exponent: self.vl_exponent,
                epsilon: self.epsilon,
                alpha: self.alpha,
                accumulation: match self.accumulation {
                    AccumulationArg::Sum => Accumulation::Sum,
                    AccumulationArg::Average => Accumulation::Average,
                },
                loss_unit_kbps: self.loss_unit_kbps,
            },
            AbrArg::Rb => {
                let d = RbParams::default();
                MethodSpec::Rb {
                    label: None,
                    params: RbParams {
                        kappa: self.rb_kappa.unwrap_or(d.kappa),
                        probe_increment_kbps: self.rb_w.unwrap_or(d.probe_increment_kbps),
                        dead_zone: self.rb_dead_zone.unwrap_or(d.dead_zone),
                        ewma_weight: self.rb_ewma.unwrap_or(d.ewma_weight),
                    },
                }
            }
            AbrArg::Bb => MethodSpec::Bb {
                label: None,
                v_b: self.bb_vb,
                gamma_p: self.bb_gamma_p,
            },
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    trace: PathBuf,
    #[command(flatten)]
    policy: PolicyArgs,
    #[command(flatten)]
    buffer: BufferArgs,
    #[arg(long, default_value_t = DEFAULT_FLOOR_KBPS)]
    floor_kbps: f64,
    /// Benchmark window; defaults to ⌈T^0.9⌉.
    #[arg(long)]
    window: Option<usize>,
    /// Directory for the report, epoch log and convergence CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// What to print on stdout: the epoch log (csv) or the report (json).
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

#[derive(Args)]
struct CompareArgs {
    /// Scenario config JSON.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum)]
    scenario: Option<ScenarioArg>,
    #[arg(long)]
    bmax: Option<f64>,
    #[arg(long)]
    tau: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

fn run(args: RunArgs) -> abr_sim::Result<()> {
    let manifest = load_manifest(&args.manifest)?;
    let trace = load_trace(&args.trace, args.floor_kbps)?;
    let session = SessionConfig::new(args.buffer.b_max(), args.buffer.tau.unwrap_or(2));
    session.validate(manifest.segment_duration_s())?;
    let trace_name = args
        .trace
        .file_stem()
        .map_or_else(|| "trace".to_string(), |s| s.to_string_lossy().into_owned());
    let outcome = evaluate_session(
        &args.policy.method(),
        &trace_name,
        &trace,
        &manifest,
        &session,
        args.window,
        WindowMode::Sliding,
    )?;
    if let Some(dir) = &args.out {
        write_session_artifacts(&outcome, dir)?;
    }
    let stdout = std::io::stdout();
    match args.format {
        FormatArg::Csv => outcome.log.write_csv(stdout.lock())?,
        FormatArg::Json => stdout
            .lock()
            .write_all(outcome.report.to_json().as_bytes())
            .map_err(|e| abr_sim::Error::io("<stdout>", e))?,
    }
    Ok(())
}

fn compare(args: CompareArgs) -> abr_sim::Result<()> {
    let mut config = ScenarioConfig::load(&args.config)?;
    if let Some(s) = args.scenario {
        config.scenario = s.into();
    }
    if args.bmax.is_some() {
        config.b_max_s = args.bmax;
    }
    if let Some(tau) = args.tau {
        config.tau = tau;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let comparison = run_compare(&config)?;
    comparison.write(&args.out)?;
    let stdout = std::io::stdout();
    abr_sim::experiment::write_comparison_csv(&comparison.rows, stdout.lock())
}

fn execute(cli: Cli) -> abr_sim::Result<()> {
    match cli.command {
        Command::Run(args) => run(args),
        Command::Compare(args) => compare(args),
        Command::Gen(GenCommand::Trace {
            duration_s,
            low_kbps,
            high_kbps,
            p,
            step_s,
            seed,
            out,
        }) => {
            let channel = MarkovianChannel {
                duration_s,
                low_kbps,
                high_kbps,
                p_transition: p,
                step_s,
            };
            save_trace(&channel.generate(seed)?, out)
        }
        Command::Gen(GenCommand::Manifest {
            segments,
            bitrates_kbps,
            segment_duration_s,
            jitter,
            seed,
            out,
        }) => {
            let ladder = bitrates_kbps.unwrap_or_else(|| REFERENCE_LADDER_KBPS.to_vec());
            let manifest = synthesize_manifest(segments, &ladder, segment_duration_s, jitter, seed)?;
            save_manifest(&manifest, out)
        }
        Command::ConcatTraces {
            inputs,
            out,
            floor_kbps,
        } => {
            let traces = inputs
                .iter()
                .map(|p| load_trace(p, floor_kbps))
                .collect::<abr_sim::Result<Vec<_>>>()?;
            save_trace(&concat_traces(&traces)?, out)
        }
        Command::Benchmark {
            manifest,
            log,
            window,
            mode,
            buffer,
            out,
        } => {
            let manifest = load_manifest(manifest)?;
            let rates = read_realized_rates(log)?;
            let window = window.unwrap_or_else(|| default_window(rates.len()));
            let solution = solve_benchmark(&manifest, &rates, window, mode.into(), buffer.b_max())?.rounded();
            let text = serde_json::to_string_pretty(&solution).expect("solution serializes") + "\n";
            match out {
                Some(path) => std::fs::write(&path, text).map_err(|e| abr_sim::Error::io(&path, e)),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
