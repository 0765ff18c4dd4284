//! Decentralized learning dynamics behind one observe / update / act
//! contract.
//!
//! | algorithm | observes            | strategy                      |
//! |-----------|---------------------|-------------------------------|
//! | BRD       | opponents' actions  | best reply to last actions    |
//! | FP        | opponents' actions  | best reply to beliefs         |
//! | SFP       | opponents' actions  | logit reply to beliefs        |
//! | RM        | opponents' actions  | positive average regrets      |
//! | RL        | own realized payoff | reward-inaction automaton     |
//! | JUSTE-RL  | own realized payoff | logit of estimated payoffs    |
//!
//! Full-monitoring learners evaluate counterfactual utilities from the
//! game's utility tensor; payoff-only learners never see the game, only the
//! normalization bounds of their own utility.

mod brd;
mod fp;
mod juste;
mod rl;
mod rm;
mod spec;

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{MixedStrategy, NormalFormGame};

pub use brd::{BrdMode, BrdState};
pub use fp::{fp_best_reply, sfp_logit_response, FpState};
pub use juste::{juste_update, JusteState, LearningRate};
pub use rl::{rl_update, RlState};
pub use rm::{rm_strategy, RmState};
pub use spec::{
    parse_algorithm_list, AlgorithmSpec, DEFAULT_JUSTE_KAPPA, DEFAULT_JUSTE_PMIN, DEFAULT_RL_STEP, DEFAULT_SFP_TAU,
};

/// Maximum gap below the best value still counted as a tie.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// What a learner observes after every stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InformationModel {
    FullMonitoring,
    PayoffOnly,
}

/// Observation delivered to one player after a stage.
#[derive(Debug, Clone, PartialEq)]
pub enum FeedbackSignal {
    /// Actions of every other player, in increasing player order.
    FullMonitoring { opponent_actions: Vec<usize> },
    /// The utility the player actually received.
    PayoffOnly { realized_utility: f64 },
}

impl FeedbackSignal {
    pub fn model(&self) -> InformationModel {
        match self {
            FeedbackSignal::FullMonitoring { .. } => InformationModel::FullMonitoring,
            FeedbackSignal::PayoffOnly { .. } => InformationModel::PayoffOnly,
        }
    }
}

/// Lowest index whose value is within [`TIE_TOLERANCE`] of the maximum.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    values.iter().position(|&v| v >= best - TIE_TOLERANCE).unwrap_or(0)
}

/// `pi(a) ∝ exp(values[a] / temperature)`.
pub(crate) fn logit(values: &[f64], temperature: f64) -> MixedStrategy {
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = values.iter().map(|v| ((v - top) / temperature).exp()).collect();
    MixedStrategy::from_weights(&weights).expect("logit weights include exp(0)")
}

/// Rebuilds the full action profile from a player's own action and the
/// opponents' actions.
pub(crate) fn full_profile(game: &NormalFormGame, player: usize, own: usize, opponents: &[usize]) -> Result<Vec<usize>> {
    let k = game.num_players();
    if opponents.len() + 1 != k {
        return Err(Error::DimensionMismatch { expected: k - 1, actual: opponents.len() });
    }
    let mut profile = Vec::with_capacity(k);
    profile.extend_from_slice(&opponents[..player]);
    profile.push(own);
    profile.extend_from_slice(&opponents[player..]);
    game.shape().index_of(&profile)?;
    Ok(profile)
}

pub(crate) fn check_own_action(num_actions: usize, action: usize) -> Result<()> {
    if action >= num_actions {
        return Err(Error::InvalidArgument(format!("own action {action} out of range ({num_actions} actions)")));
    }
    Ok(())
}

fn expect_opponents<'a>(feedback: &'a FeedbackSignal, algorithm: &str) -> Result<&'a [usize]> {
    match feedback {
        FeedbackSignal::FullMonitoring { opponent_actions } => Ok(opponent_actions),
        FeedbackSignal::PayoffOnly { .. } => Err(Error::InformationModel(format!(
            "{algorithm} needs the opponents' actions, got a payoff-only observation"
        ))),
    }
}

fn expect_payoff(feedback: &FeedbackSignal, algorithm: &str) -> Result<f64> {
    match feedback {
        FeedbackSignal::PayoffOnly { realized_utility } => Ok(*realized_utility),
        FeedbackSignal::FullMonitoring { .. } => Err(Error::InformationModel(format!(
            "{algorithm} learns from its own payoff only, got the opponents' actions"
        ))),
    }
}

/// State of one player's learning rule.
#[derive(Debug, Clone)]
pub enum Learner {
    Brd(BrdState),
    Fp(FpState),
    Rm(RmState),
    Rl(RlState),
    Juste(JusteState),
}

impl Learner {
    /// Builds the learner `spec` for `player`, which will receive `feedback`
    /// observations. Fails when the algorithm cannot run on that feedback.
    pub fn new(
        spec: &AlgorithmSpec,
        game: Arc<NormalFormGame>,
        player: usize,
        feedback: InformationModel,
    ) -> Result<Self> {
        if spec.information_model() != feedback {
            return Err(Error::InformationModel(format!(
                "{} requires {:?} observations, configured with {:?}",
                spec.name(),
                spec.information_model(),
                feedback
            )));
        }
        if player >= game.num_players() {
            return Err(Error::InvalidArgument(format!("player {player} out of range")));
        }
        let n = game.num_actions(player);
        Ok(match *spec {
            AlgorithmSpec::Brd { mode } => Learner::Brd(BrdState::new(game, player, mode)),
            AlgorithmSpec::Fp => Learner::Fp(FpState::new(game, player, None)?),
            AlgorithmSpec::Sfp { tau } => Learner::Fp(FpState::new(game, player, Some(tau))?),
            AlgorithmSpec::Rm => Learner::Rm(RmState::new(game, player)),
            AlgorithmSpec::Rl { step } => {
                let (lo, hi) = game.utility_range(player);
                Learner::Rl(RlState::new(n, step, lo, hi)?)
            }
            AlgorithmSpec::Juste { kappa, p_min, learning_rate } => {
                Learner::Juste(JusteState::new(n, kappa, p_min, learning_rate)?)
            }
        })
    }

    /// Builds a learner with the observation model its algorithm requires.
    pub fn for_player(spec: &AlgorithmSpec, game: Arc<NormalFormGame>, player: usize) -> Result<Self> {
        Self::new(spec, game, player, spec.information_model())
    }

    pub fn information_model(&self) -> InformationModel {
        match self {
            Learner::Brd(_) | Learner::Fp(_) | Learner::Rm(_) => InformationModel::FullMonitoring,
            Learner::Rl(_) | Learner::Juste(_) => InformationModel::PayoffOnly,
        }
    }

    pub fn num_actions(&self) -> usize {
        match self {
            Learner::Brd(s) => s.num_actions(),
            Learner::Fp(s) => s.num_actions(),
            Learner::Rm(s) => s.num_actions(),
            Learner::Rl(s) => s.strategy().len(),
            Learner::Juste(s) => s.strategy().len(),
        }
    }

    /// The distribution the next action is drawn from. Deterministic rules
    /// report a Dirac on the action they would play.
    pub fn strategy(&self) -> MixedStrategy {
        match self {
            Learner::Brd(s) => MixedStrategy::dirac(s.num_actions(), s.best_reply()),
            Learner::Fp(s) => s.strategy(),
            Learner::Rm(s) => s.strategy_or_uniform(),
            Learner::Rl(s) => s.strategy().clone(),
            Learner::Juste(s) => s.strategy().clone(),
        }
    }

    /// Selects this stage's action. BRD and FP are deterministic (ties go to
    /// the lowest index); the others sample their current strategy.
    pub fn act<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<usize> {
        Ok(match self {
            Learner::Brd(s) => s.best_reply(),
            Learner::Fp(s) if !s.is_smooth() => s.best_reply(),
            other => other.strategy().sample(rng),
        })
    }

    /// Feeds back the outcome of the stage in which `own_action` was played.
    pub fn observe(&mut self, own_action: usize, feedback: &FeedbackSignal) -> Result<()> {
        match self {
            Learner::Brd(s) => s.observe(own_action, expect_opponents(feedback, "BRD")?),
            Learner::Fp(s) => {
                let label = if s.is_smooth() { "SFP" } else { "FP" };
                s.observe(own_action, expect_opponents(feedback, label)?)
            }
            Learner::Rm(s) => s.observe(own_action, expect_opponents(feedback, "RM")?),
            Learner::Rl(s) => rl_update(s, own_action, expect_payoff(feedback, "RL")?),
            Learner::Juste(s) => juste_update(s, own_action, expect_payoff(feedback, "JUSTE-RL")?),
        }
    }
}
