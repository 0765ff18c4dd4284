use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{argmax, check_own_action, fp_best_reply};
use crate::error::Result;
use crate::game::{MixedStrategy, NormalFormGame};

/// Whether all players revise together or one per stage in round-robin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BrdMode {
    Simultaneous,
    Sequential,
}

/// Best response dynamics: play the best reply to the opponents' most
/// recent actions.
///
/// Before anything has been observed the player best-replies to uniformly
/// random opponents.
#[derive(Debug, Clone)]
pub struct BrdState {
    game: Arc<NormalFormGame>,
    player: usize,
    mode: BrdMode,
    last_opponent_actions: Option<Vec<usize>>,
}

impl BrdState {
    pub fn new(game: Arc<NormalFormGame>, player: usize, mode: BrdMode) -> Self {
        Self { game, player, mode, last_opponent_actions: None }
    }

    pub fn mode(&self) -> BrdMode {
        self.mode
    }

    pub fn player(&self) -> usize {
        self.player
    }

    pub fn num_actions(&self) -> usize {
        self.game.num_actions(self.player)
    }

    pub fn last_opponent_actions(&self) -> Option<&[usize]> {
        self.last_opponent_actions.as_deref()
    }

    pub fn best_reply(&self) -> usize {
        match &self.last_opponent_actions {
            Some(opponents) => {
                let mut profile = opponents.clone();
                profile.insert(self.player, 0);
                let values = self
                    .game
                    .deviation_values(self.player, &profile)
                    .expect("opponent actions validated on observe");
                argmax(&values)
            }
            None => {
                let beliefs: Vec<MixedStrategy> = (0..self.game.num_players())
                    .filter(|&j| j != self.player)
                    .map(|j| MixedStrategy::uniform(self.game.num_actions(j)))
                    .collect();
                fp_best_reply(&self.game, &beliefs, self.player).expect("uniform beliefs are valid")
            }
        }
    }

    pub fn observe(&mut self, own_action: usize, opponent_actions: &[usize]) -> Result<()> {
        check_own_action(self.num_actions(), own_action)?;
        super::full_profile(&self.game, self.player, own_action, opponent_actions)?;
        self.last_opponent_actions = Some(opponent_actions.to_vec());
        Ok(())
    }
}
