//! Repeated play: every stage each player selects an action from its
//! current strategy, the profile is realized, and each player receives the
//! observation its learning rule is entitled to.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::game::{MixedProfile, MixedStrategy, NormalFormGame, PlayHistory};
use crate::learners::{AlgorithmSpec, FeedbackSignal, InformationModel, Learner};
use crate::seed::derive_seed;

/// Longest action-profile period [`detect_steady_state`] looks for.
pub const MAX_CYCLE_PERIOD: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    /// Every player revises at every stage.
    Simultaneous,
    /// From stage 2 on, player `(n - 2) mod K` revises at stage `n`; the
    /// others repeat their previous action. All players act at stage 1.
    Sequential,
}

/// State of play at one stage.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub profile: Vec<usize>,
    /// Strategy each player drew its action from. Players that merely
    /// repeated their action under a sequential schedule report a Dirac.
    pub strategies: MixedProfile,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StrategyTrace {
    pub steps: Vec<TraceStep>,
}

impl StrategyTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct DynamicsRun {
    pub history: PlayHistory,
    pub trace: StrategyTrace,
    /// Strategies after the final observation.
    pub final_strategies: MixedProfile,
}

/// Plays `iterations` stages of `game` with one learner per player.
///
/// Player `k` draws its randomness from `derive_seed(seed, k)`, so runs are
/// reproducible bit for bit.
pub fn run_dynamics(
    game: &Arc<NormalFormGame>,
    specs: &[AlgorithmSpec],
    iterations: usize,
    seed: u64,
    schedule: Schedule,
) -> Result<DynamicsRun> {
    let k = game.num_players();
    if specs.len() != k {
        return Err(invalid(format!("expected {k} learner specs, got {}", specs.len())));
    }
    let learners = specs
        .iter()
        .enumerate()
        .map(|(player, spec)| Learner::for_player(spec, game.clone(), player))
        .collect::<Result<Vec<_>>>()?;
    run_learners(game, learners, iterations, seed, schedule)
}

/// Like [`run_dynamics`] with pre-built learners.
pub fn run_learners(
    game: &Arc<NormalFormGame>,
    mut learners: Vec<Learner>,
    iterations: usize,
    seed: u64,
    schedule: Schedule,
) -> Result<DynamicsRun> {
    let k = game.num_players();
    if learners.len() != k {
        return Err(invalid(format!("expected {k} learners, got {}", learners.len())));
    }
    for (player, l) in learners.iter().enumerate() {
        if l.num_actions() != game.num_actions(player) {
            return Err(invalid(format!("learner {player} has {} actions, game has {}", l.num_actions(), game.num_actions(player))));
        }
    }
    if iterations == 0 {
        return Err(invalid("iterations must be at least 1"));
    }
    let mut rngs: Vec<ChaCha8Rng> = (0..k).map(|p| ChaCha8Rng::seed_from_u64(derive_seed(seed, p as u64))).collect();
    let mut history = PlayHistory::new(game.action_counts());
    let mut trace = StrategyTrace { steps: Vec::with_capacity(iterations) };
    let mut profile = vec![0usize; k];
    let shape = game.shape();

    for stage in 1..=iterations {
        let mut strategies = Vec::with_capacity(k);
        for (player, learner) in learners.iter_mut().enumerate() {
            let revises = match schedule {
                Schedule::Simultaneous => true,
                Schedule::Sequential => stage == 1 || (stage - 2) % k == player,
            };
            if revises {
                strategies.push(learner.strategy());
                profile[player] = learner.act(&mut rngs[player])?;
            } else {
                strategies.push(MixedStrategy::dirac(game.num_actions(player), profile[player]));
            }
        }
        let idx = shape.index_of(&profile)?;
        let utilities: Vec<f64> = (0..k).map(|p| game.utility_at(idx, p)).collect();
        history.push(profile.clone(), utilities.clone())?;
        trace.steps.push(TraceStep { profile: profile.clone(), strategies: MixedProfile::new(strategies) });

        for (player, learner) in learners.iter_mut().enumerate() {
            let feedback = match learner.information_model() {
                InformationModel::FullMonitoring => FeedbackSignal::FullMonitoring {
                    opponent_actions: profile
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != player)
                        .map(|(_, &a)| a)
                        .collect(),
                },
                InformationModel::PayoffOnly => FeedbackSignal::PayoffOnly { realized_utility: utilities[player] },
            };
            learner.observe(profile[player], &feedback)?;
        }
    }

    let final_strategies = MixedProfile::new(learners.iter().map(Learner::strategy).collect());
    Ok(DynamicsRun { history, trace, final_strategies })
}

/// Long-run behaviour over the tail of a trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SteadyState {
    Converged { profile: Vec<usize>, strategies: MixedProfile },
    Cycle { period: usize },
    None,
}

impl SteadyState {
    pub fn label(&self) -> &'static str {
        match self {
            SteadyState::Converged { .. } => "converged",
            SteadyState::Cycle { .. } => "cycle",
            SteadyState::None => "none",
        }
    }

    pub fn period(&self) -> Option<usize> {
        match self {
            SteadyState::Cycle { period } => Some(*period),
            _ => None,
        }
    }
}

/// Classifies the last `window` stages of `trace`.
///
/// `Converged` when no strategy entry moves by `tol` or more between
/// consecutive stages; otherwise `Cycle(p)` for the smallest period
/// `2 <= p <= 4` of a non-constant action-profile sequence; otherwise `None`.
pub fn detect_steady_state(trace: &StrategyTrace, window: usize, tol: f64) -> Result<SteadyState> {
    if window == 0 {
        return Err(invalid("window must be at least 1"));
    }
    if window > trace.len() {
        return Err(invalid(format!("window {window} exceeds trace length {}", trace.len())));
    }
    let tail = &trace.steps[trace.len() - window..];
    let max_move = tail
        .windows(2)
        .map(|w| w[0].strategies.max_abs_diff(&w[1].strategies))
        .fold(0.0, f64::max);
    if max_move < tol {
        let last = tail.last().expect("window >= 1");
        return Ok(SteadyState::Converged { profile: last.profile.clone(), strategies: last.strategies.clone() });
    }
    let constant = tail.windows(2).all(|w| w[0].profile == w[1].profile);
    if !constant {
        for period in 2..=MAX_CYCLE_PERIOD.min(window - 1) {
            if (period..window).all(|t| tail[t].profile == tail[t - period].profile) {
                return Ok(SteadyState::Cycle { period });
            }
        }
    }
    Ok(SteadyState::None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::{is_pure_ne, DEFAULT_TOLERANCE};
    use crate::fixtures::prisoners_dilemma;
    use crate::learners::BrdMode;
    use crate::wireless::{build_ic_game, IcScenario};
    use rand::Rng;

    fn brd(mode: BrdMode) -> AlgorithmSpec {
        AlgorithmSpec::Brd { mode }
    }

    /// Both pairs see band 0 as their best band.
    fn coinciding_best_band() -> Arc<NormalFormGame> {
        Arc::new(build_ic_game(&IcScenario::per_band(2, &[1.0, 0.6], &[0.5, 0.5], 10.0)).unwrap())
    }

    fn dirac_step(profile: Vec<usize>, counts: &[usize]) -> TraceStep {
        TraceStep { strategies: MixedProfile::dirac(counts, &profile), profile }
    }

    #[test]
    fn sequential_brd_solves_prisoners_dilemma() {
        let game = Arc::new(prisoners_dilemma());
        let sp = brd(BrdMode::Sequential);
        let run = run_dynamics(&game, &[sp, sp], 10, 0, Schedule::Sequential).unwrap();
        let records = run.history.records();
        assert!(records.iter().skip(4).all(|r| r.profile == vec![1, 1]));
        // Defect is dominant, so it is also the first reply to uniform play.
        assert_eq!(records[0].profile, vec![1, 1]);
    }

    #[test]
    fn simultaneous_brd_ping_pongs() {
        let game = coinciding_best_band();
        let sp = brd(BrdMode::Simultaneous);
        let run = run_dynamics(&game, &[sp, sp], 40, 0, Schedule::Simultaneous).unwrap();
        let profiles: Vec<_> = run.history.records().iter().map(|r| r.profile.clone()).collect();
        for (t, p) in profiles.iter().enumerate() {
            let band = if t % 2 == 0 { 0 } else { 1 };
            assert_eq!(p, &vec![band, band]);
        }
        assert_eq!(detect_steady_state(&run.trace, 10, 1e-3).unwrap(), SteadyState::Cycle { period: 2 });
    }

    #[test]
    fn sequential_brd_reaches_orthogonal_profile() {
        let game = coinciding_best_band();
        let sp = brd(BrdMode::Sequential);
        let run = run_dynamics(&game, &[sp, sp], 40, 0, Schedule::Sequential).unwrap();
        let last = run.history.last().unwrap().profile.clone();
        assert_ne!(last[0], last[1]);
        assert!(is_pure_ne(&game, &last, DEFAULT_TOLERANCE).unwrap().holds);
        assert!(matches!(detect_steady_state(&run.trace, 10, 1e-3).unwrap(), SteadyState::Converged { .. }));
    }

    #[test]
    fn runs_are_deterministic() {
        let game = Arc::new(build_ic_game(&IcScenario::random(2, 3, 10.0, 12).unwrap()).unwrap());
        for text in ["sfp", "rm", "rl", "juste"] {
            let sp: AlgorithmSpec = text.parse().unwrap();
            let a = run_dynamics(&game, &[sp, sp], 200, 42, Schedule::Simultaneous).unwrap();
            let b = run_dynamics(&game, &[sp, sp], 200, 42, Schedule::Simultaneous).unwrap();
            assert_eq!(a.history, b.history, "{text}");
            assert_eq!(a.trace, b.trace, "{text}");
            let c = run_dynamics(&game, &[sp, sp], 200, 43, Schedule::Simultaneous).unwrap();
            assert_ne!(a.history, c.history, "{text}");
        }
    }

    #[test]
    fn mixed_populations_run() {
        let game = Arc::new(build_ic_game(&IcScenario::random(2, 2, 10.0, 5).unwrap()).unwrap());
        let specs: Vec<AlgorithmSpec> = vec!["rm".parse().unwrap(), "juste".parse().unwrap()];
        let run = run_dynamics(&game, &specs, 50, 1, Schedule::Simultaneous).unwrap();
        assert_eq!(run.history.len(), 50);
        assert_eq!(run.trace.len(), 50);
    }

    #[test]
    fn rejects_bad_arguments() {
        let game = Arc::new(prisoners_dilemma());
        let sp = AlgorithmSpec::Rm;
        assert!(run_dynamics(&game, &[sp], 10, 0, Schedule::Simultaneous).is_err());
        assert!(run_dynamics(&game, &[sp, sp], 0, 0, Schedule::Simultaneous).is_err());
    }

    #[test]
    fn steady_state_examples() {
        let counts = [2, 2];
        let constant = StrategyTrace { steps: (0..20).map(|_| dirac_step(vec![0, 1], &counts)).collect() };
        assert!(matches!(detect_steady_state(&constant, 20, 1e-3).unwrap(), SteadyState::Converged { profile, .. } if profile == vec![0, 1]));

        let alternating = StrategyTrace {
            steps: (0..20).map(|t| dirac_step(if t % 2 == 0 { vec![0, 0] } else { vec![1, 1] }, &counts)).collect(),
        };
        assert_eq!(detect_steady_state(&alternating, 20, 1e-3).unwrap(), SteadyState::Cycle { period: 2 });

        let three = StrategyTrace {
            steps: (0..12).map(|t| dirac_step(vec![t % 3, 0], &[3, 2])).collect(),
        };
        assert_eq!(detect_steady_state(&three, 12, 1e-3).unwrap(), SteadyState::Cycle { period: 3 });

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let noisy = StrategyTrace {
            steps: (0..100).map(|_| dirac_step(vec![rng.random_range(0..2), rng.random_range(0..2)], &counts)).collect(),
        };
        assert_eq!(detect_steady_state(&noisy, 20, 1e-3).unwrap(), SteadyState::None);

        assert!(detect_steady_state(&constant, 21, 1e-3).is_err());
        assert!(detect_steady_state(&constant, 0, 1e-3).is_err());
    }
}
