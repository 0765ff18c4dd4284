use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use equilearn::equilibria::{enumerate_pure_ne, is_cce, is_ce, is_epsilon_ne, is_pure_ne, DEFAULT_TOLERANCE};
use equilearn::harness::{
    record_trajectory, run_experiment, summarize, write_records_csv, write_summary_csv, write_trajectory_csv,
    ExperimentConfig, SweepVariable, DEFAULT_CHANNELS, DEFAULT_ITERATIONS, DEFAULT_PAIRS, DEFAULT_SNR_DB,
};
use equilearn::learners::{parse_algorithm_list, AlgorithmSpec};
use equilearn::wireless::{build_ic_game, IcScenario};
use equilearn::{Error, JointDistribution, MixedProfile, MixedStrategy, NormalFormGame};

#[derive(Parser)]
#[command(name = "equilearn", version, about = "Learning dynamics and equilibria in finite games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo sweep over SNR, iteration count or number of bands.
    Sweep(SweepArgs),
    /// Per-iteration trace of one run on a random (or given) channel.
    Trajectory(TrajectoryArgs),
    /// Check an equilibrium condition for a game and a distribution.
    CheckEq(CheckArgs),
    /// Write a random interference-channel scenario, or its game, as JSON.
    BuildGame(BuildArgs),
}

#[derive(clap::Args)]
struct SweepArgs {
    #[arg(long = "var", value_parser = parse_sweep_var)]
    var: SweepVariable,
    /// Comma-separated sweep values.
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<f64>,
    #[arg(long, default_value = "brd,fp,sfp,rm,rl,juste")]
    algos: String,
    #[arg(long, default_value_t = 500)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
    iters: usize,
    #[arg(long, default_value_t = DEFAULT_SNR_DB, allow_negative_numbers = true)]
    snr: f64,
    #[arg(long, default_value_t = DEFAULT_CHANNELS)]
    channels: usize,
    #[arg(long, default_value_t = DEFAULT_PAIRS)]
    pairs: usize,
    /// Report time-averaged rather than final-iteration network SE.
    #[arg(long)]
    time_average: bool,
    #[arg(long)]
    threads: Option<usize>,
    /// Per-run records; `<stem>.summary.csv` and `<stem>.config.json` are
    /// written next to it.
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct TrajectoryArgs {
    #[arg(long)]
    algo: String,
    #[arg(long, default_value_t = DEFAULT_SNR_DB, allow_negative_numbers = true)]
    snr: f64,
    #[arg(long, default_value_t = DEFAULT_CHANNELS)]
    channels: usize,
    #[arg(long, default_value_t = DEFAULT_PAIRS)]
    pairs: usize,
    #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
    iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Scenario JSON to use instead of drawing gains.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Cce,
    Ce,
    Pne,
    Eps,
}

#[derive(clap::Args)]
struct CheckArgs {
    /// Game JSON (`{"players", "action_counts", "utilities"}`) or
    /// scenario JSON (`{"K", "S", "snr_db", "gains"}`).
    #[arg(long)]
    game: PathBuf,
    /// `{"probs": [...]}` for ce/cce, `{"profile": [...]}` for pne,
    /// `{"strategies": [[...], ...]}` for eps. Omit with `--kind pne` to
    /// list every pure equilibrium.
    #[arg(long)]
    dist: Option<PathBuf>,
    #[arg(long, value_enum)]
    kind: Kind,
    /// Tolerance, or ε for `--kind eps`.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
}

#[derive(clap::Args)]
struct BuildArgs {
    #[arg(long, default_value_t = DEFAULT_PAIRS)]
    pairs: usize,
    #[arg(long, default_value_t = DEFAULT_CHANNELS)]
    channels: usize,
    #[arg(long, default_value_t = DEFAULT_SNR_DB, allow_negative_numbers = true)]
    snr: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Emit the expanded normal-form game instead of the scenario.
    #[arg(long)]
    game: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_sweep_var(s: &str) -> Result<SweepVariable, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Input and configuration problems exit with 2, everything else with 1.
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Serde(_) | Error::InvalidArgument(_) | Error::DimensionMismatch { .. } => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn io_err(path: &Path, e: io::Error) -> Failure {
    Failure::Usage(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(|e| io_err(path, e))
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map_or_else(|| "results".into(), |s| s.to_string_lossy().into_owned());
    path.with_file_name(format!("{stem}.{suffix}"))
}

fn sweep(args: SweepArgs) -> Result<(), Failure> {
    let algorithms = parse_algorithm_list(&args.algos)?;
    let mut config = ExperimentConfig::new(algorithms, args.var, args.values);
    config.num_trials = args.trials;
    config.master_seed = args.seed;
    config.iterations = args.iters;
    config.snr_db = args.snr;
    config.num_channels = args.channels;
    config.num_pairs = args.pairs;
    config.time_average = args.time_average;
    config.threads = args.threads;
    config.validate()?;

    let records = run_experiment(&config)?;
    let summary = summarize(&records)?;
    write_records_csv(create(&args.out)?, &records)?;
    let summary_path = sibling(&args.out, "summary.csv");
    write_summary_csv(create(&summary_path)?, &summary)?;
    let config_path = sibling(&args.out, "config.json");
    fs::write(&config_path, config.to_json()? + "\n").map_err(|e| io_err(&config_path, e))?;

    for row in &summary {
        eprintln!(
            "{:<28} {}={:<6} SE {:.4} ± {:.4}  converged {:.3}  cycle {:.3}",
            row.algorithm, config.sweep, row.sweep_value, row.mean_se, row.stderr_se, row.convergence_rate, row.cycle_rate
        );
    }
    Ok(())
}

fn trajectory(args: TrajectoryArgs) -> Result<(), Failure> {
    let spec: AlgorithmSpec = args.algo.parse()?;
    let scenario = match &args.scenario {
        Some(path) => IcScenario::from_json(&read(path)?)?,
        None => IcScenario::random(args.pairs, args.channels, args.snr, args.seed)?,
    };
    let game = Arc::new(build_ic_game(&scenario)?);
    let specs = vec![spec; scenario.num_pairs];
    let traj = record_trajectory(&game, &specs, args.iters, args.seed)?;
    match &args.out {
        Some(path) => write_trajectory_csv(create(path)?, &traj)?,
        None => write_trajectory_csv(io::stdout().lock(), &traj)?,
    }
    eprintln!("steady state: {:?}", traj.steady_state);
    Ok(())
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GameInput {
    Game(equilearn::game::GameDocument),
    Scenario(IcScenario),
}

fn load_game(path: &Path) -> Result<NormalFormGame, Failure> {
    let text = read(path)?;
    let input: GameInput = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("{}: not a game or scenario document: {e}", path.display())))?;
    Ok(match input {
        GameInput::Game(doc) => NormalFormGame::from_document(doc)?,
        GameInput::Scenario(s) => build_ic_game(&s)?,
    })
}

#[derive(Deserialize)]
struct ProbsInput {
    probs: Vec<f64>,
}

#[derive(Deserialize)]
struct ProfileInput {
    profile: Vec<usize>,
}

#[derive(Deserialize)]
struct StrategiesInput {
    strategies: Vec<Vec<f64>>,
}

fn parse_dist<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn check_eq(args: CheckArgs) -> Result<(), Failure> {
    let game = load_game(&args.game)?;
    let out = io::stdout();
    let mut out = out.lock();
    let report = match (args.kind, &args.dist) {
        (Kind::Pne, None) => {
            let all = enumerate_pure_ne(&game, args.tol)?;
            writeln!(out, "{}", serde_json::json!({ "pure_nash_equilibria": all })).map_err(|e| Failure::Runtime(e.to_string()))?;
            return Ok(());
        }
        (_, None) => return Err(Failure::Usage("--dist is required for this kind".into())),
        (Kind::Cce | Kind::Ce, Some(path)) => {
            let phi = JointDistribution::new(game.action_counts(), parse_dist::<ProbsInput>(path)?.probs)?;
            if matches!(args.kind, Kind::Cce) {
                is_cce(&game, &phi, args.tol)?
            } else {
                is_ce(&game, &phi, args.tol)?
            }
        }
        (Kind::Pne, Some(path)) => is_pure_ne(&game, &parse_dist::<ProfileInput>(path)?.profile, args.tol)?,
        (Kind::Eps, Some(path)) => {
            let strategies = parse_dist::<StrategiesInput>(path)?
                .strategies
                .into_iter()
                .map(MixedStrategy::new)
                .collect::<equilearn::Result<Vec<_>>>()?;
            is_epsilon_ne(&game, &MixedProfile::new(strategies), args.tol)?
        }
    };
    let text = serde_json::to_string_pretty(&report).map_err(|e| Failure::Runtime(e.to_string()))?;
    writeln!(out, "{text}").map_err(|e| Failure::Runtime(e.to_string()))?;
    Ok(())
}

fn build_game(args: BuildArgs) -> Result<(), Failure> {
    let scenario = IcScenario::random(args.pairs, args.channels, args.snr, args.seed)?;
    let text = if args.game { build_ic_game(&scenario)?.to_json()? } else { scenario.to_json()? };
    match &args.out {
        Some(path) => fs::write(path, text + "\n").map_err(|e| io_err(path, e))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sweep(a) => sweep(a),
        Command::Trajectory(a) => trajectory(a),
        Command::CheckEq(a) => check_eq(a),
        Command::BuildGame(a) => build_game(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
