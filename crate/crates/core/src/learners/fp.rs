use std::sync::Arc;

use super::{argmax, check_own_action, logit};
use crate::error::{invalid, Result};
use crate::game::{MixedStrategy, NormalFormGame};

/// Fictitious play and, with a temperature, smooth fictitious play.
///
/// Beliefs are the empirical frequencies of each opponent's past actions;
/// before the first observation they are uniform.
#[derive(Debug, Clone)]
pub struct FpState {
    game: Arc<NormalFormGame>,
    player: usize,
    // counts[j] for the j-th opponent in increasing player order
    counts: Vec<Vec<u64>>,
    observations: u64,
    tau: Option<f64>,
}

impl FpState {
    pub fn new(game: Arc<NormalFormGame>, player: usize, tau: Option<f64>) -> Result<Self> {
        if let Some(t) = tau {
            if !(t > 0.0) || !t.is_finite() {
                return Err(invalid(format!("SFP temperature must be positive, got {t}")));
            }
        }
        let counts = (0..game.num_players())
            .filter(|&j| j != player)
            .map(|j| vec![0; game.num_actions(j)])
            .collect();
        Ok(Self { game, player, counts, observations: 0, tau })
    }

    pub fn is_smooth(&self) -> bool {
        self.tau.is_some()
    }

    pub fn temperature(&self) -> Option<f64> {
        self.tau
    }

    pub fn num_actions(&self) -> usize {
        self.game.num_actions(self.player)
    }

    pub fn observations(&self) -> u64 {
        self.observations
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    /// One belief per opponent, in increasing player order.
    pub fn beliefs(&self) -> Vec<MixedStrategy> {
        self.counts
            .iter()
            .map(|c| {
                if self.observations == 0 {
                    MixedStrategy::uniform(c.len())
                } else {
                    let n = self.observations as f64;
                    MixedStrategy::new(c.iter().map(|&x| x as f64 / n).collect()).expect("counts sum to observations")
                }
            })
            .collect()
    }

    pub fn best_reply(&self) -> usize {
        fp_best_reply(&self.game, &self.beliefs(), self.player).expect("beliefs match the game")
    }

    pub fn strategy(&self) -> MixedStrategy {
        match self.tau {
            Some(tau) => sfp_logit_response(&self.game, &self.beliefs(), self.player, tau).expect("beliefs match the game"),
            None => MixedStrategy::dirac(self.num_actions(), self.best_reply()),
        }
    }

    pub fn observe(&mut self, own_action: usize, opponent_actions: &[usize]) -> Result<()> {
        check_own_action(self.num_actions(), own_action)?;
        super::full_profile(&self.game, self.player, own_action, opponent_actions)?;
        for (c, &a) in self.counts.iter_mut().zip(opponent_actions) {
            c[a] += 1;
        }
        self.observations += 1;
        Ok(())
    }
}

/// Best reply to independent beliefs about each opponent (listed in
/// increasing player order). Ties go to the lowest action index.
pub fn fp_best_reply(game: &NormalFormGame, beliefs: &[MixedStrategy], player: usize) -> Result<usize> {
    Ok(argmax(&game.action_values(player, beliefs)?))
}

/// Logit response `pi(a) ∝ exp(E[u(a, ·) | beliefs] / tau)`, the maximizer
/// of expected utility plus `tau` times the strategy's entropy.
pub fn sfp_logit_response(
    game: &NormalFormGame,
    beliefs: &[MixedStrategy],
    player: usize,
    tau: f64,
) -> Result<MixedStrategy> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(invalid(format!("temperature must be positive, got {tau}")));
    }
    Ok(logit(&game.action_values(player, beliefs)?, tau))
}
