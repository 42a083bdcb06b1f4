//! Command-line front end: configure a run, execute it, emit the report.
//!
//! Subcommands map one-to-one onto tasks (`classify` runs the holonomy
//! task). A TOML config file can carry the whole run description; flags
//! override file values. Exit status is nonzero when a task errored or a
//! verification item failed.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use infogeo::report::{render_text, run, ModelSpec, RunConfig, TaskKind, VerdictReport};

#[derive(Parser)]
#[command(
    name = "infogeo",
    version,
    about = "Fisher metrics, curvature tensors, and numerical holonomy \
             classification for exponential families"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Model name from the registry (normal-1, normal-2, normal-3,
    /// flat-toy, bernoulli, poisson, gamma2).
    #[arg(long)]
    model: Option<String>,

    /// TOML run configuration; flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Connection parameter for curvature tasks.
    #[arg(long)]
    alpha: Option<f64>,

    /// Random seed for point sampling and samplers.
    #[arg(long)]
    seed: Option<u64>,

    /// Number of sampled evaluation points.
    #[arg(long)]
    points: Option<usize>,

    /// Write the report to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Output format.
    #[arg(long, value_parser = ["text", "structured"], default_value = "text")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Fisher metric at the evaluation points.
    Metric(CommonArgs),
    /// Sectional/Ricci/scalar curvature at the evaluation points.
    Curvature(CommonArgs),
    /// Geometric property checks (Einstein, flatness, curvature signs,
    /// block structure).
    Checks(CommonArgs),
    /// Holonomy classification pipeline.
    Classify(CommonArgs),
    /// Run the published-value regression suite and the transcription
    /// audit.
    VerifyPaper(CommonArgs),
}

fn build_config(args: &CommonArgs, task: TaskKind) -> Result<RunConfig, infogeo::Error> {
    let mut config = match &args.config {
        Some(path) => {
            let src = std::fs::read_to_string(path).map_err(|e| {
                infogeo::Error::Config(format!("cannot read {}: {e}", path.display()))
            })?;
            RunConfig::from_toml(&src)?
        }
        None => {
            let model = args.model.clone().unwrap_or_else(|| "normal-2".to_string());
            RunConfig::from_toml(&format!("model = \"{model}\""))?
        }
    };
    if let Some(model) = &args.model {
        config.model = ModelSpec::Name(model.clone());
    }
    if let Some(alpha) = args.alpha {
        config.alpha = alpha;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(points) = args.points {
        config.points.count = points;
    }
    config.tasks = vec![task];
    Ok(config)
}

fn emit(report: &VerdictReport, args: &CommonArgs) -> Result<(), infogeo::Error> {
    let rendered = match args.format.as_str() {
        "structured" => report.to_json(),
        _ => render_text(report),
    };
    match &args.out {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| infogeo::Error::Config(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{rendered}"),
    }
    Ok(())
}

fn execute(args: &CommonArgs, task: TaskKind) -> Result<bool, infogeo::Error> {
    let config = build_config(args, task)?;
    let report = run(&config)?;
    emit(&report, args)?;
    Ok(report.has_failures())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, task) = match &cli.command {
        Command::Metric(a) => (a, TaskKind::Metric),
        Command::Curvature(a) => (a, TaskKind::Curvature),
        Command::Checks(a) => (a, TaskKind::Checks),
        Command::Classify(a) => (a, TaskKind::Holonomy),
        Command::VerifyPaper(a) => (a, TaskKind::VerifyPaper),
    };
    match execute(args, task) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
