use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use timetomo::harness::{self, ExperimentConfig, Mode, TrajectoryConfig};

#[derive(Parser)]
#[command(
    name = "timetomo",
    version,
    about = "Time-resolved state tomography under detector jitter"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bloch trajectory of a time-evolved (and optionally jittered) projector.
    Trajectory(CommonArgs),
    /// Qubit reconstruction fidelity over a sigma × N grid.
    QubitSweep(CommonArgs),
    /// Trace distance between reconstructions of orthogonal pairs.
    OrthoSweep(CommonArgs),
    /// Concurrence, fidelity and CHSH certification for Bell states.
    EntangledSweep(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// TOML config; the built-in preset is used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, overriding the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use the full-size state samples.
    #[arg(long)]
    paper_scale: bool,
    /// Worker threads (0 = all cores), overriding the config.
    #[arg(long)]
    threads: Option<usize>,
}

fn sweep(
    args: &CommonArgs,
    command: &str,
    default_mode: Mode,
    allowed: &[Mode],
) -> timetomo::Result<PathBuf> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::preset(default_mode),
    };
    if !allowed.contains(&cfg.mode) {
        return Err(timetomo::Error::Config(format!(
            "{command} cannot run mode {}",
            cfg.mode.as_str()
        )));
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    if let Some(t) = args.threads {
        cfg.threads = t;
    }
    cfg.paper_scale |= args.paper_scale;
    let report = harness::run_sweep(&cfg)?;
    harness::write_sweep_outputs(&report, &cfg, command, &cfg.output_dir)
}

fn trajectory(args: &CommonArgs) -> timetomo::Result<PathBuf> {
    let mut cfg = match &args.config {
        Some(path) => TrajectoryConfig::load(path)?,
        None => TrajectoryConfig::default(),
    };
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    let traj = harness::emit_trajectory(&cfg)?;
    harness::write_trajectory_outputs(&traj, &cfg, args.seed.unwrap_or(0), &cfg.output_dir)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Trajectory(a) => trajectory(a),
        Command::QubitSweep(a) => sweep(
            a,
            "qubit-sweep",
            Mode::QubitMixed,
            &[Mode::QubitMixed, Mode::QubitPure],
        ),
        Command::OrthoSweep(a) => sweep(
            a,
            "ortho-sweep",
            Mode::QubitOrthogonalPairs,
            &[Mode::QubitOrthogonalPairs],
        ),
        Command::EntangledSweep(a) => {
            sweep(a, "entangled-sweep", Mode::Entangled, &[Mode::Entangled])
        }
    };
    match result {
        Ok(manifest) => {
            println!("{}", manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
