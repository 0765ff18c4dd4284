use std::sync::Arc;

use super::check_own_action;
use crate::error::{Error, Result};
use crate::game::{MixedStrategy, NormalFormGame};

/// Regret matching.
///
/// Keeps running sums of the utility each own action would have earned
/// against the observed opponent actions, and of the utility actually
/// earned. At stage `n` the regret of action `a` is
///
/// ```text
/// r_a(n) = 1/(n-1) * sum_{t=1}^{n-1} [u(a, a_-k(t)) - u(a_k(t), a_-k(t))]
/// ```
///
/// and the strategy is proportional to the positive part of `r`.
#[derive(Debug, Clone)]
pub struct RmState {
    game: Arc<NormalFormGame>,
    player: usize,
    counterfactual: Vec<f64>,
    realized: f64,
    // index of the upcoming stage; 1 before any observation
    n: u64,
}

impl RmState {
    pub fn new(game: Arc<NormalFormGame>, player: usize) -> Self {
        let n_actions = game.num_actions(player);
        Self { game, player, counterfactual: vec![0.0; n_actions], realized: 0.0, n: 1 }
    }

    pub fn num_actions(&self) -> usize {
        self.counterfactual.len()
    }

    /// Index of the stage about to be played.
    pub fn iteration(&self) -> u64 {
        self.n
    }

    pub fn cumulative_counterfactual(&self) -> &[f64] {
        &self.counterfactual
    }

    pub fn cumulative_realized(&self) -> f64 {
        self.realized
    }

    /// Average regrets; all zero before the first observation.
    pub fn regrets(&self) -> Vec<f64> {
        if self.n <= 1 {
            return vec![0.0; self.num_actions()];
        }
        let past = (self.n - 1) as f64;
        self.counterfactual.iter().map(|c| (c - self.realized) / past).collect()
    }

    pub fn max_regret(&self) -> f64 {
        self.regrets().into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    pub(crate) fn strategy_or_uniform(&self) -> MixedStrategy {
        rm_strategy(self).unwrap_or_else(|_| MixedStrategy::uniform(self.num_actions()))
    }

    pub fn observe(&mut self, own_action: usize, opponent_actions: &[usize]) -> Result<()> {
        check_own_action(self.num_actions(), own_action)?;
        let profile = super::full_profile(&self.game, self.player, own_action, opponent_actions)?;
        let values = self.game.deviation_values(self.player, &profile)?;
        for (c, v) in self.counterfactual.iter_mut().zip(&values) {
            *c += v;
        }
        self.realized += values[own_action];
        self.n += 1;
        Ok(())
    }
}

/// Normalized positive regrets; uniform when no regret is positive.
pub fn rm_strategy(state: &RmState) -> Result<MixedStrategy> {
    if state.n < 2 {
        return Err(Error::Uninitialized("regret matching has no observations yet".into()));
    }
    Ok(strategy_from_regrets(&state.regrets()))
}

pub(crate) fn strategy_from_regrets(regrets: &[f64]) -> MixedStrategy {
    let positive: Vec<f64> = regrets.iter().map(|r| r.max(0.0)).collect();
    MixedStrategy::from_weights(&positive).unwrap_or_else(|| MixedStrategy::uniform(regrets.len()))
}
