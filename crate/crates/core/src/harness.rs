//! Monte-Carlo channel-selection experiments.
//!
//! Each trial draws one channel realization per band count and every
//! algorithm plays on that same realization, so per-trial comparisons are
//! paired. Seeds are derived as
//!
//! - trial seed: `derive_seed(master_seed, trial)`
//! - gains seed: `derive_seed(trial seed, hash("gains") ^ S)`
//! - run seed: `derive_seed(trial seed, hash(algorithm))`, and player `k`
//!   then uses `derive_seed(run seed, k)`.
//!
//! Results do not depend on the number of worker threads.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{detect_steady_state, run_dynamics, Schedule, SteadyState};
use crate::equilibria::{best_pure_ne_welfare, is_cce, is_epsilon_ne, is_pure_ne, Welfare, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::game::NormalFormGame;
use crate::learners::AlgorithmSpec;
use crate::seed::{derive_seed, label_hash};
use crate::wireless::{build_ic_game, network_spectral_efficiency, IcScenario};

pub const DEFAULT_ITERATIONS: usize = 40;
pub const DEFAULT_SNR_DB: f64 = 10.0;
pub const DEFAULT_CHANNELS: usize = 2;
pub const DEFAULT_PAIRS: usize = 2;
pub const DEFAULT_STEADY_WINDOW: usize = 10;
pub const DEFAULT_STEADY_TOL: f64 = 1e-3;
/// ε used when labelling a final strategy profile as an ε-NE (bps/Hz).
pub const CLASSIFY_EPSILON: f64 = 0.1;
/// Tolerance used when labelling the empirical play distribution a CCE.
pub const CLASSIFY_CCE_TOL: f64 = 0.1;
/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "EQUILEARN_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    Snr,
    Iterations,
    Channels,
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepVariable::Snr => "snr",
            SweepVariable::Iterations => "iters",
            SweepVariable::Channels => "channels",
        })
    }
}

impl FromStr for SweepVariable {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "snr" => Ok(SweepVariable::Snr),
            "iters" | "iterations" => Ok(SweepVariable::Iterations),
            "channels" => Ok(SweepVariable::Channels),
            other => Err(Error::Config(format!("unknown sweep variable {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub algorithms: Vec<AlgorithmSpec>,
    pub sweep: SweepVariable,
    pub values: Vec<f64>,
    pub iterations: usize,
    pub snr_db: f64,
    pub num_channels: usize,
    pub num_pairs: usize,
    pub num_trials: usize,
    pub master_seed: u64,
    /// Report the time-averaged network spectral efficiency instead of the
    /// final-iteration value.
    pub time_average: bool,
    pub steady_window: usize,
    pub steady_tol: f64,
    /// Worker threads; `None` reads [`THREADS_ENV`] and falls back to all
    /// cores.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(algorithms: Vec<AlgorithmSpec>, sweep: SweepVariable, values: Vec<f64>) -> Self {
        Self {
            algorithms,
            sweep,
            values,
            iterations: DEFAULT_ITERATIONS,
            snr_db: DEFAULT_SNR_DB,
            num_channels: DEFAULT_CHANNELS,
            num_pairs: DEFAULT_PAIRS,
            num_trials: 1,
            master_seed: 0,
            time_average: false,
            steady_window: DEFAULT_STEADY_WINDOW,
            steady_tol: DEFAULT_STEADY_TOL,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(m));
        if self.algorithms.is_empty() {
            return cfg("at least one algorithm is required".into());
        }
        if self.values.is_empty() {
            return cfg("sweep values must not be empty".into());
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return cfg("sweep values must be finite".into());
        }
        if matches!(self.sweep, SweepVariable::Iterations | SweepVariable::Channels)
            && self.values.iter().any(|&v| v < 1.0 || v.fract() != 0.0)
        {
            return cfg(format!("{} sweep values must be positive integers", self.sweep));
        }
        if self.num_trials == 0 {
            return cfg("num_trials must be at least 1".into());
        }
        if self.iterations == 0 || self.num_channels == 0 || self.num_pairs == 0 {
            return cfg("iterations, channels and pairs must be positive".into());
        }
        if !self.snr_db.is_finite() {
            return cfg("snr_db must be finite".into());
        }
        if self.steady_window == 0 || !(self.steady_tol > 0.0) {
            return cfg("steady_window and steady_tol must be positive".into());
        }
        if self.threads == Some(0) {
            return cfg("threads must be positive".into());
        }
        Ok(())
    }

    /// `(snr_db, channels, iterations)` at one sweep point.
    fn point(&self, value: f64) -> (f64, usize, usize) {
        match self.sweep {
            SweepVariable::Snr => (value, self.num_channels, self.iterations),
            SweepVariable::Channels => (self.snr_db, value as usize, self.iterations),
            SweepVariable::Iterations => (self.snr_db, self.num_channels, value as usize),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Equilibrium label of a run's end state, strongest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumClass {
    /// The final action profile is a pure Nash equilibrium.
    Pne,
    /// The final strategies form a [`CLASSIFY_EPSILON`]-NE.
    EpsNe,
    /// The empirical distribution of play is a CCE within [`CLASSIFY_CCE_TOL`].
    Cce,
    None,
}

/// Outcome of one (algorithm, sweep value, trial) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: String,
    pub sweep_var: SweepVariable,
    pub sweep_value: f64,
    pub trial: usize,
    pub seed: u64,
    pub scenario_hash: u64,
    pub snr_db: f64,
    pub channels: usize,
    pub iterations: usize,
    pub network_se: f64,
    pub best_pne_se: Option<f64>,
    pub steady_state: String,
    pub cycle_period: Option<usize>,
    pub equilibrium: EquilibriumClass,
    /// Final action profile, `-`-separated.
    pub final_profile: String,
}

impl RunRecord {
    pub fn final_actions(&self) -> Result<Vec<usize>> {
        self.final_profile
            .split('-')
            .map(|a| a.parse().map_err(|_| Error::Serde(format!("bad profile {:?}", self.final_profile))))
            .collect()
    }
}

fn profile_label(profile: &[usize]) -> String {
    profile.iter().map(usize::to_string).collect::<Vec<_>>().join("-")
}

/// Schedule implied by the learners: sequential if any asks for it.
pub fn schedule_for(specs: &[AlgorithmSpec]) -> Schedule {
    if specs.iter().any(AlgorithmSpec::is_sequential) {
        Schedule::Sequential
    } else {
        Schedule::Simultaneous
    }
}

/// Thread count from the config, then [`THREADS_ENV`].
pub fn thread_count(config: &ExperimentConfig) -> Result<Option<usize>> {
    if let Some(n) = config.threads {
        return Ok(Some(n));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(None),
    }
}

/// Classifies where a run ended up.
pub fn classify(
    game: &NormalFormGame,
    final_profile: &[usize],
    final_strategies: &crate::game::MixedProfile,
    history: &crate::game::PlayHistory,
) -> Result<EquilibriumClass> {
    if is_pure_ne(game, final_profile, DEFAULT_TOLERANCE)?.holds {
        return Ok(EquilibriumClass::Pne);
    }
    if is_epsilon_ne(game, final_strategies, CLASSIFY_EPSILON)?.holds {
        return Ok(EquilibriumClass::EpsNe);
    }
    if is_cce(game, &history.empirical_joint()?, CLASSIFY_CCE_TOL)?.holds {
        return Ok(EquilibriumClass::Cce);
    }
    Ok(EquilibriumClass::None)
}

struct TrialPoint {
    value: f64,
    snr_db: f64,
    channels: usize,
    iterations: usize,
    scenario_hash: u64,
    game: Arc<NormalFormGame>,
    best_pne_se: Option<f64>,
}

fn run_trial(config: &ExperimentConfig, trial: usize) -> Result<Vec<RunRecord>> {
    let trial_seed = derive_seed(config.master_seed, trial as u64);
    let mut points = Vec::with_capacity(config.values.len());
    for &value in &config.values {
        let (snr_db, channels, iterations) = config.point(value);
        let gains_seed = derive_seed(trial_seed, label_hash("gains") ^ channels as u64);
        let scenario = IcScenario::random(config.num_pairs, channels, snr_db, gains_seed)?;
        let game = Arc::new(build_ic_game(&scenario)?);
        let best_pne_se = match best_pure_ne_welfare(&game, Welfare::Sum) {
            Ok((_, v)) => Some(v),
            Err(Error::NotFound(_)) => None,
            Err(e) => return Err(e),
        };
        points.push(TrialPoint {
            value,
            snr_db,
            channels,
            iterations,
            scenario_hash: scenario.fingerprint(),
            game,
            best_pne_se,
        });
    }

    let mut records = Vec::with_capacity(points.len() * config.algorithms.len());
    for point in &points {
        for spec in &config.algorithms {
            let label = spec.to_string();
            let specs = vec![*spec; config.num_pairs];
            let run_seed = derive_seed(trial_seed, label_hash(&label));
            let run = run_dynamics(&point.game, &specs, point.iterations, run_seed, schedule_for(&specs))?;
            let last = run.history.last().expect("at least one iteration").profile.clone();
            let network_se = if config.time_average {
                run.history.records().iter().map(|r| r.utilities.iter().sum::<f64>()).sum::<f64>()
                    / run.history.len() as f64
            } else {
                network_spectral_efficiency(&point.game, &last)?
            };
            let steady = detect_steady_state(&run.trace, config.steady_window.min(run.trace.len()), config.steady_tol)?;
            let equilibrium = classify(&point.game, &last, &run.final_strategies, &run.history)?;
            records.push(RunRecord {
                algorithm: label,
                sweep_var: config.sweep,
                sweep_value: point.value,
                trial,
                seed: trial_seed,
                scenario_hash: point.scenario_hash,
                snr_db: point.snr_db,
                channels: point.channels,
                iterations: point.iterations,
                network_se,
                best_pne_se: point.best_pne_se,
                steady_state: steady.label().to_string(),
                cycle_period: steady.period(),
                equilibrium,
                final_profile: profile_label(&last),
            });
        }
    }
    Ok(records)
}

/// Runs every (algorithm, sweep value, trial) cell of `config`.
///
/// Records are ordered by sweep value, then algorithm (in config order),
/// then trial.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    config.validate()?;
    let trials = || -> Result<Vec<Vec<RunRecord>>> {
        (0..config.num_trials).into_par_iter().map(|t| run_trial(config, t)).collect()
    };
    let per_trial = match thread_count(config)? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(trials)?,
        None => trials()?,
    };
    let n_algos = config.algorithms.len();
    let mut indexed: Vec<(usize, RunRecord)> = per_trial
        .into_iter()
        .flatten()
        .enumerate()
        .map(|(i, r)| {
            // position within a trial is value_index * n_algos + algo_index
            let within = i % (config.values.len() * n_algos);
            ((within * config.num_trials) + r.trial, r)
        })
        .collect();
    indexed.sort_by_key(|(k, _)| *k);
    Ok(indexed.into_iter().map(|(_, r)| r).collect())
}

/// Aggregate statistics for one (algorithm, sweep value) group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub algorithm: String,
    pub sweep_value: f64,
    pub trials: usize,
    pub mean_se: f64,
    /// Standard error of the mean (sample standard deviation over `sqrt(n)`).
    pub stderr_se: f64,
    pub mean_best_pne_se: Option<f64>,
    pub convergence_rate: f64,
    pub cycle_rate: f64,
    pub pne_rate: f64,
}

/// Groups records by (algorithm, sweep value), sorted by both.
pub fn summarize(records: &[RunRecord]) -> Result<Vec<SummaryRow>> {
    if records.is_empty() {
        return Err(Error::InvalidArgument("cannot summarize an empty record list".into()));
    }
    let mut sorted: Vec<&RunRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.algorithm.cmp(&b.algorithm).then(a.sweep_value.total_cmp(&b.sweep_value)));
    let mut rows = Vec::new();
    for group in sorted.chunk_by(|a, b| a.algorithm == b.algorithm && a.sweep_value == b.sweep_value) {
        let n = group.len();
        let nf = n as f64;
        let mean = group.iter().map(|r| r.network_se).sum::<f64>() / nf;
        let stderr = if n > 1 {
            let var = group.iter().map(|r| (r.network_se - mean).powi(2)).sum::<f64>() / (nf - 1.0);
            (var / nf).sqrt()
        } else {
            0.0
        };
        let best: Vec<f64> = group.iter().filter_map(|r| r.best_pne_se).collect();
        let rate = |pred: &dyn Fn(&RunRecord) -> bool| group.iter().filter(|r| pred(r)).count() as f64 / nf;
        rows.push(SummaryRow {
            algorithm: group[0].algorithm.clone(),
            sweep_value: group[0].sweep_value,
            trials: n,
            mean_se: mean,
            stderr_se: stderr,
            mean_best_pne_se: (!best.is_empty()).then(|| best.iter().sum::<f64>() / best.len() as f64),
            convergence_rate: rate(&|r| r.steady_state == "converged"),
            cycle_rate: rate(&|r| r.steady_state == "cycle"),
            pne_rate: rate(&|r| r.equilibrium == EquilibriumClass::Pne),
        });
    }
    Ok(rows)
}

fn write_csv<W: Write, T: Serialize>(out: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::Serde(e.to_string()))?;
    Ok(())
}

/// Writes one CSV row per record; the header is the [`RunRecord`] field list.
pub fn write_records_csv<W: Write>(out: W, records: &[RunRecord]) -> Result<()> {
    write_csv(out, records)
}

/// Writes one CSV row per [`SummaryRow`].
pub fn write_summary_csv<W: Write>(out: W, rows: &[SummaryRow]) -> Result<()> {
    write_csv(out, rows)
}

pub fn read_records_csv<R: std::io::Read>(input: R) -> Result<Vec<RunRecord>> {
    csv::Reader::from_reader(input).deserialize().map(|r| r.map_err(Error::from)).collect()
}

/// One stage of a recorded trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryStep {
    pub iteration: usize,
    pub actions: Vec<usize>,
    pub strategies: Vec<Vec<f64>>,
    pub per_user_se: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub steps: Vec<TrajectoryStep>,
    pub steady_state: SteadyState,
}

/// Full per-stage trace of one run, for plotting strategy paths.
pub fn record_trajectory(
    game: &Arc<NormalFormGame>,
    specs: &[AlgorithmSpec],
    iterations: usize,
    seed: u64,
) -> Result<Trajectory> {
    let run = run_dynamics(game, specs, iterations, seed, schedule_for(specs))?;
    let steady = detect_steady_state(&run.trace, DEFAULT_STEADY_WINDOW.min(run.trace.len()), DEFAULT_STEADY_TOL)?;
    let steps = run
        .trace
        .steps
        .iter()
        .zip(run.history.records())
        .enumerate()
        .map(|(i, (step, rec))| TrajectoryStep {
            iteration: i + 1,
            actions: step.profile.clone(),
            strategies: step.strategies.strategies.iter().map(|s| s.probs().to_vec()).collect(),
            per_user_se: rec.utilities.clone(),
        })
        .collect();
    Ok(Trajectory { steps, steady_state: steady })
}

/// Long-format CSV: one row per (iteration, player) with the strategy as
/// columns `p0..p{N-1}`.
pub fn write_trajectory_csv<W: Write>(out: W, trajectory: &Trajectory) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let width = trajectory.steps.first().map_or(0, |s| s.strategies.iter().map(Vec::len).max().unwrap_or(0));
    let mut header = vec!["iteration".to_string(), "player".into(), "action".into(), "se".into()];
    header.extend((0..width).map(|a| format!("p{a}")));
    w.write_record(&header)?;
    for step in &trajectory.steps {
        for (player, probs) in step.strategies.iter().enumerate() {
            let mut row = vec![
                step.iteration.to_string(),
                player.to_string(),
                step.actions[player].to_string(),
                step.per_user_se[player].to_string(),
            ];
            row.extend((0..width).map(|a| probs.get(a).map_or(String::new(), f64::to_string)));
            w.write_record(&row)?;
        }
    }
    w.flush().map_err(|e| Error::Serde(e.to_string()))?;
    Ok(())
}
