//! Verification of pure, approximate, correlated and coarse correlated
//! equilibria.
//!
//! Every check returns an [`EquilibriumReport`] carrying the largest
//! violated slack, so callers can apply looser thresholds after the fact.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::game::{JointDistribution, MixedProfile, NormalFormGame};

/// Tolerance for exact equilibrium checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Largest profile space [`enumerate_pure_ne`] is willing to scan.
pub const MAX_ENUMERATION_PROFILES: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumKind {
    Pne,
    EpsNe,
    Ce,
    Cce,
}

/// The deviation that breaks an equilibrium condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub player: usize,
    /// Recommended (CE) or currently played (PNE) action; absent for
    /// CCE and ε-NE, whose deviations are unconditional.
    pub from_action: Option<usize>,
    pub to_action: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub kind: EquilibriumKind,
    pub holds: bool,
    pub worst_violation: f64,
    pub witness: Option<Witness>,
}

#[derive(Default)]
struct Worst {
    value: f64,
    witness: Option<Witness>,
}

impl Worst {
    fn offer(&mut self, excess: f64, w: Witness) {
        if excess > self.value {
            self.value = excess;
            self.witness = Some(w);
        }
    }

    fn finish(self, kind: EquilibriumKind, tol: f64) -> EquilibriumReport {
        let holds = self.value <= tol;
        EquilibriumReport {
            kind,
            holds,
            worst_violation: self.value,
            witness: if holds { None } else { self.witness },
        }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol >= 0.0) || !tol.is_finite() {
        return Err(invalid(format!("tolerance must be finite and nonnegative, got {tol}")));
    }
    Ok(())
}

fn check_shape(game: &NormalFormGame, phi: &JointDistribution) -> Result<()> {
    if phi.action_counts() != game.action_counts() {
        return Err(invalid(format!(
            "distribution shape {:?} does not match game {:?}",
            phi.action_counts(),
            game.action_counts()
        )));
    }
    Ok(())
}

/// Coarse correlated equilibrium: no player gains by committing in advance
/// to a fixed action `a'_k` while the others follow `phi`.
pub fn is_cce(game: &NormalFormGame, phi: &JointDistribution, tol: f64) -> Result<EquilibriumReport> {
    check_tol(tol)?;
    check_shape(game, phi)?;
    let shape = game.shape();
    let mut worst = Worst::default();
    for k in 0..game.num_players() {
        let on_path = game.expected_utility_joint(phi, k)?;
        // sum_{a_-k} u(a', a_-k) phi_-k(a_-k) == sum_a u(a', a_-k) phi(a)
        let mut deviation = vec![0.0; game.num_actions(k)];
        for (idx, &p) in phi.probs().iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for (alt, d) in deviation.iter_mut().enumerate() {
                *d += p * game.utility_at(shape.with_action(idx, k, alt), k);
            }
        }
        for (alt, d) in deviation.into_iter().enumerate() {
            worst.offer(d - on_path, Witness { player: k, from_action: None, to_action: alt });
        }
    }
    Ok(worst.finish(EquilibriumKind::Cce, tol))
}

/// Correlated equilibrium, in the unnormalized conditional form: for every
/// player `k` and actions `a_k, a'_k`,
/// `sum_{a_-k} [u_k(a_k, a_-k) - u_k(a'_k, a_-k)] phi(a_k, a_-k) >= -tol`.
/// Recommendations with zero probability impose no constraint.
pub fn is_ce(game: &NormalFormGame, phi: &JointDistribution, tol: f64) -> Result<EquilibriumReport> {
    check_tol(tol)?;
    check_shape(game, phi)?;
    let shape = game.shape();
    let mut worst = Worst::default();
    for k in 0..game.num_players() {
        let n = game.num_actions(k);
        // gain[rec * n + alt]
        let mut gain = vec![0.0; n * n];
        for (idx, &p) in phi.probs().iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let rec = shape.action_at(idx, k);
            let u = game.utility_at(idx, k);
            for alt in 0..n {
                gain[rec * n + alt] += p * (game.utility_at(shape.with_action(idx, k, alt), k) - u);
            }
        }
        for rec in 0..n {
            for alt in 0..n {
                if alt != rec {
                    worst.offer(gain[rec * n + alt], Witness { player: k, from_action: Some(rec), to_action: alt });
                }
            }
        }
    }
    Ok(worst.finish(EquilibriumKind::Ce, tol))
}

/// Pure Nash equilibrium: no unilateral action change gains more than `tol`.
pub fn is_pure_ne(game: &NormalFormGame, profile: &[usize], tol: f64) -> Result<EquilibriumReport> {
    check_tol(tol)?;
    let idx = game.shape().index_of(profile)?;
    Ok(pure_ne_at(game, idx, tol))
}

fn pure_ne_at(game: &NormalFormGame, idx: usize, tol: f64) -> EquilibriumReport {
    let shape = game.shape();
    let mut worst = Worst::default();
    for k in 0..game.num_players() {
        let current = shape.action_at(idx, k);
        let u = game.utility_at(idx, k);
        for alt in 0..game.num_actions(k) {
            if alt != current {
                let gain = game.utility_at(shape.with_action(idx, k, alt), k) - u;
                worst.offer(gain, Witness { player: k, from_action: Some(current), to_action: alt });
            }
        }
    }
    worst.finish(EquilibriumKind::Pne, tol)
}

/// All pure Nash equilibria in row-major order.
pub fn enumerate_pure_ne(game: &NormalFormGame, tol: f64) -> Result<Vec<Vec<usize>>> {
    check_tol(tol)?;
    let size = game.num_profiles();
    if size > MAX_ENUMERATION_PROFILES {
        return Err(Error::Capacity { profiles: size, limit: MAX_ENUMERATION_PROFILES });
    }
    Ok((0..size)
        .filter(|&idx| pure_ne_at(game, idx, tol).holds)
        .map(|idx| game.shape().decode(idx))
        .collect())
}

/// ε-Nash equilibrium. Pure deviations suffice: the best mixed deviation
/// against a fixed `pi_-k` is attained at a pure action.
pub fn is_epsilon_ne(game: &NormalFormGame, profile: &MixedProfile, epsilon: f64) -> Result<EquilibriumReport> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    if profile.len() != game.num_players() {
        return Err(Error::DimensionMismatch { expected: game.num_players(), actual: profile.len() });
    }
    let mut worst = Worst::default();
    for k in 0..game.num_players() {
        let others: Vec<_> = profile
            .strategies
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .map(|(_, s)| s.clone())
            .collect();
        let own = &profile.strategies[k];
        if own.len() != game.num_actions(k) {
            return Err(Error::DimensionMismatch { expected: game.num_actions(k), actual: own.len() });
        }
        let values = game.action_values(k, &others)?;
        let current: f64 = values.iter().zip(own.probs()).map(|(v, p)| v * p).sum();
        for (alt, v) in values.iter().enumerate() {
            worst.offer(v - current, Witness { player: k, from_action: None, to_action: alt });
        }
    }
    Ok(worst.finish(EquilibriumKind::EpsNe, epsilon))
}

/// Social welfare used to rank equilibria.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Welfare {
    Sum,
    Min,
}

impl Welfare {
    pub fn evaluate(self, game: &NormalFormGame, profile_index: usize) -> f64 {
        let utilities = (0..game.num_players()).map(|k| game.utility_at(profile_index, k));
        match self {
            Welfare::Sum => utilities.sum(),
            Welfare::Min => utilities.fold(f64::INFINITY, f64::min),
        }
    }
}

/// The pure equilibrium with the highest welfare; ties go to the first in
/// row-major order.
pub fn best_pure_ne_welfare(game: &NormalFormGame, welfare: Welfare) -> Result<(Vec<usize>, f64)> {
    best_pure_ne_welfare_with_tol(game, welfare, DEFAULT_TOLERANCE)
}

pub fn best_pure_ne_welfare_with_tol(
    game: &NormalFormGame,
    welfare: Welfare,
    tol: f64,
) -> Result<(Vec<usize>, f64)> {
    let mut best: Option<(Vec<usize>, f64)> = None;
    for profile in enumerate_pure_ne(game, tol)? {
        let value = welfare.evaluate(game, game.shape().index_of(&profile)?);
        if best.as_ref().is_none_or(|(_, b)| value > *b) {
            best = Some((profile, value));
        }
    }
    best.ok_or_else(|| Error::NotFound("game has no pure Nash equilibrium".into()))
}
