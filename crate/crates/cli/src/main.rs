use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use tempfile::NamedTempFile;
use truncvar::stieltjes::stieltjes_left;
use truncvar::variation::{pvar_curve, PvarScheme};
use truncvar::{decompose, generate, run_experiment, selftest, truncated_path, truncated_variations};
use truncvar::{ExperimentConfig, GeneratorConfig, GeneratorKind, SampledPath};

#[derive(Parser)]
#[command(name = "truncvar", version, about = "Truncated variation of sampled paths")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a path and write `<stem>.csv` plus `<stem>.meta.json`.
    Generate(GenerateArgs),
    /// Split a path into its truncated trend and the residual noise.
    Decompose(DecomposeArgs),
    /// Print a p-variation curve as TSV.
    Pvar(PvarArgs),
    /// Left-point Stieltjes integral of one path against another.
    Integrate(IntegrateArgs),
    /// Run a Monte Carlo experiment from a JSON config.
    Experiment(ExperimentArgs),
    /// Run the reduced oracle and invariant suites.
    Selftest,
}

#[derive(Args)]
struct GenerateArgs {
    /// JSON generator config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    #[arg(long, visible_alias = "mu", allow_negative_numbers = true)]
    drift: Option<f64>,
    #[arg(long, visible_alias = "sigma", allow_negative_numbers = true)]
    volatility: Option<f64>,
    #[arg(long, visible_alias = "lambda", allow_negative_numbers = true)]
    jump_rate: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    jump_mean: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    jump_sd: Option<f64>,
    #[arg(long, visible_alias = "t", allow_negative_numbers = true)]
    horizon: Option<f64>,
    #[arg(long, visible_alias = "n")]
    steps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output stem; a trailing `.csv` is stripped.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Wiener,
    CompoundPoisson,
    JumpDiffusion,
}

impl From<KindArg> for GeneratorKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Wiener => GeneratorKind::Wiener,
            KindArg::CompoundPoisson => GeneratorKind::CompoundPoisson,
            KindArg::JumpDiffusion => GeneratorKind::JumpDiffusion,
        }
    }
}

#[derive(Args)]
struct DecomposeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    c: f64,
    /// Output prefix for `.trend.csv`, `.noise.csv` and `.summary.json`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Nested,
    MeshSweep,
    MeshSchedule,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScheduleArg {
    Log,
    LogSquared,
}

#[derive(Args)]
struct PvarArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    p: f64,
    #[arg(long, value_enum, default_value = "nested")]
    scheme: SchemeArg,
    /// Number of dyadic levels for the nested scheme.
    #[arg(long)]
    levels: Option<u32>,
    /// Comma-separated, strictly decreasing mesh bounds.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    deltas: Option<Vec<f64>>,
    /// Preset mesh schedule, used when --deltas is absent.
    #[arg(long, value_enum)]
    schedule: Option<ScheduleArg>,
    #[arg(long, default_value_t = 8)]
    stages: usize,
    /// Write the TSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct IntegrateArgs {
    /// Integrand path.
    #[arg(long)]
    y: PathBuf,
    /// Integrator path.
    #[arg(long)]
    x: PathBuf,
    /// Replace the integrator by its truncated path first.
    #[arg(long, allow_negative_numbers = true)]
    c: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    /// Override `base_seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Override `levels`.
    #[arg(long)]
    levels: Option<u32>,
    /// Output prefix for `.json` and `.tsv`.
    #[arg(long)]
    out: PathBuf,
}

enum Failure {
    Io(String),
    Usage(String),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<truncvar::Error> for Failure {
    fn from(e: truncvar::Error) -> Self {
        match e {
            truncvar::Error::Io(_) | truncvar::Error::ParseError { .. } => Failure::Io(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn read_path(file: &Path) -> CliResult<SampledPath> {
    let f = File::open(file).map_err(|e| Failure::Io(format!("{}: {e}", file.display())))?;
    // malformed input files are I/O failures, not usage errors
    SampledPath::read_csv(BufReader::new(f)).map_err(|e| Failure::Io(format!("{}: {e}", file.display())))
}

fn read_json<T: serde::de::DeserializeOwned>(file: &Path) -> CliResult<T> {
    let f = File::open(file).map_err(|e| Failure::Io(format!("{}: {e}", file.display())))?;
    serde_json::from_reader(BufReader::new(f)).map_err(|e| Failure::Usage(format!("{}: {e}", file.display())))
}

/// Writes via a temporary file in the target directory, then renames.
fn write_atomic(target: &Path, fill: impl FnOnce(&mut File) -> CliResult<()>) -> CliResult<()> {
    let dir = match target.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir)?;
    fill(tmp.as_file_mut())?;
    tmp.as_file_mut().flush()?;
    tmp.persist(target).map_err(|e| Failure::Io(e.to_string()))?;
    Ok(())
}

fn write_text(target: &Path, text: &str) -> CliResult<()> {
    write_atomic(target, |f| Ok(f.write_all(text.as_bytes())?))
}

fn write_csv(target: &Path, path: &SampledPath) -> CliResult<()> {
    write_atomic(target, |f| Ok(path.write_csv(f)?))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn to_json(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn cmd_generate(args: GenerateArgs) -> CliResult<()> {
    let mut cfg = match &args.config {
        Some(file) => read_json::<GeneratorConfig>(file)?,
        None => {
            let kind = args
                .kind
                .ok_or_else(|| Failure::Usage("--kind is required without --config".into()))?;
            let steps = args
                .steps
                .ok_or_else(|| Failure::Usage("--steps is required without --config".into()))?;
            GeneratorConfig {
                kind: kind.into(),
                drift: 0.0,
                volatility: 0.0,
                jump_rate: 0.0,
                jump_mean: 0.0,
                jump_sd: 0.0,
                horizon: 1.0,
                steps,
                seed: 0,
            }
        }
    };
    if let Some(k) = args.kind {
        cfg.kind = k.into();
    }
    cfg.drift = args.drift.unwrap_or(cfg.drift);
    cfg.volatility = args.volatility.unwrap_or(cfg.volatility);
    cfg.jump_rate = args.jump_rate.unwrap_or(cfg.jump_rate);
    cfg.jump_mean = args.jump_mean.unwrap_or(cfg.jump_mean);
    cfg.jump_sd = args.jump_sd.unwrap_or(cfg.jump_sd);
    cfg.horizon = args.horizon.unwrap_or(cfg.horizon);
    cfg.steps = args.steps.unwrap_or(cfg.steps);
    cfg.seed = args.seed.unwrap_or(cfg.seed);

    let gp = generate(&cfg)?;
    let stem = match args.out.extension() {
        Some(ext) if ext == "csv" => args.out.with_extension(""),
        _ => args.out.clone(),
    };
    write_csv(&with_suffix(&stem, ".csv"), &gp.path)?;
    let meta = json!({
        "config": gp.config,
        "true_qv_cont": gp.true_qv_cont,
        "drift_part": gp.drift_part,
        "jumps": gp.jumps,
    });
    write_text(&with_suffix(&stem, ".meta.json"), &to_json(&meta))
}

fn cmd_decompose(args: DecomposeArgs) -> CliResult<()> {
    let path = read_path(&args.input)?;
    let (trend, noise) = decompose(&path, args.c)?;
    let v = truncated_variations(&path, args.c)?;
    let sup_noise = noise.values().iter().fold(0.0_f64, |m, e| m.max(e.abs()));
    write_csv(&with_suffix(&args.out, ".trend.csv"), &trend)?;
    write_csv(&with_suffix(&args.out, ".noise.csv"), &noise)?;
    let summary = json!({
        "c": args.c,
        "utv": v.utv,
        "dtv": v.dtv,
        "tv": v.tv,
        "sup_noise": sup_noise,
    });
    write_text(&with_suffix(&args.out, ".summary.json"), &to_json(&summary))
}

fn cmd_pvar(args: PvarArgs) -> CliResult<()> {
    let path = read_path(&args.input)?;
    let horizon = path.times()[path.len() - 1] - path.times()[0];
    let scheme = match args.scheme {
        SchemeArg::Nested => PvarScheme::Nested {
            levels: args
                .levels
                .ok_or_else(|| Failure::Usage("--levels is required for the nested scheme".into()))?,
        },
        SchemeArg::MeshSweep => PvarScheme::MeshSweep {
            deltas: args
                .deltas
                .ok_or_else(|| Failure::Usage("--deltas is required for mesh-sweep".into()))?,
        },
        SchemeArg::MeshSchedule => match (args.deltas, args.schedule) {
            (Some(deltas), _) => PvarScheme::MeshSchedule { deltas },
            (None, Some(ScheduleArg::Log)) => PvarScheme::log_schedule(horizon, args.stages),
            (None, Some(ScheduleArg::LogSquared)) => PvarScheme::log_squared_schedule(horizon, args.stages),
            (None, None) => {
                return Err(Failure::Usage("mesh-schedule needs --deltas or --schedule".into()));
            }
        },
    };
    let curve = pvar_curve(&path, args.p, &scheme)?;
    match args.out {
        Some(out) => write_text(&out, &curve.to_tsv()),
        None => {
            print!("{}", curve.to_tsv());
            Ok(())
        }
    }
}

fn cmd_integrate(args: IntegrateArgs) -> CliResult<()> {
    let y = read_path(&args.y)?;
    let mut x = read_path(&args.x)?;
    if let Some(c) = args.c {
        x = truncated_path(&x, c)?.truncated_path;
    }
    let res = stieltjes_left(&y, &x)?;
    let text = to_json(&json!({ "value": res.value, "integrator_tv": res.integrator_tv }));
    match args.out {
        Some(out) => write_text(&out, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_experiment(args: ExperimentArgs) -> CliResult<()> {
    let mut cfg: ExperimentConfig = read_json(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.base_seed = seed;
    }
    if args.levels.is_some() {
        cfg.levels = args.levels;
    }
    let report = run_experiment(&cfg)?;
    let mut text = report.to_json()?;
    text.push('\n');
    write_text(&with_suffix(&args.out, ".json"), &text)?;
    write_text(&with_suffix(&args.out, ".tsv"), &report.to_tsv())
}

fn cmd_selftest() -> CliResult<bool> {
    let report = selftest::run()?;
    for check in &report.checks {
        let status = if check.passed() { "PASS" } else { "FAIL" };
        println!("[{status}] {} ({} cases, {} failures)", check.name, check.cases, check.failures);
        if let Some(first) = &check.first_failure {
            println!("       first failure: {first}");
        }
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Generate(a) => cmd_generate(a).map(|_| true),
        Command::Decompose(a) => cmd_decompose(a).map(|_| true),
        Command::Pvar(a) => cmd_pvar(a).map(|_| true),
        Command::Integrate(a) => cmd_integrate(a).map(|_| true),
        Command::Experiment(a) => cmd_experiment(a).map(|_| true),
        Command::Selftest => cmd_selftest(),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
