//! Finite normal-form games and the probability objects defined over them.
//!
//! Action profiles are indexed row-major with player 0 as the most
//! significant digit: for action counts `(N_0, .., N_{K-1})` the profile
//! `(a_0, .., a_{K-1})` has index `sum_k a_k * prod_{j>k} N_j`. Golden files
//! and the JSON schema both rely on this ordering.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Tolerance used by the probability-vector invariants.
pub const PROB_TOLERANCE: f64 = 1e-9;

fn check_probability_vector(probs: &[f64], what: &str) -> Result<()> {
    if probs.is_empty() {
        return Err(invalid(format!("{what}: empty probability vector")));
    }
    if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(invalid(format!("{what}: entries must be finite and nonnegative")));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > PROB_TOLERANCE {
        return Err(invalid(format!("{what}: entries sum to {total}, expected 1")));
    }
    Ok(())
}

/// A strategy of one player: a distribution over its own actions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct MixedStrategy {
    probs: Vec<f64>,
}

impl MixedStrategy {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        check_probability_vector(&probs, "mixed strategy")?;
        Ok(Self { probs })
    }

    pub fn uniform(num_actions: usize) -> Self {
        assert!(num_actions > 0, "uniform strategy over zero actions");
        Self { probs: vec![1.0 / num_actions as f64; num_actions] }
    }

    pub fn dirac(num_actions: usize, action: usize) -> Self {
        assert!(action < num_actions, "dirac action {action} out of range {num_actions}");
        let mut probs = vec![0.0; num_actions];
        probs[action] = 1.0;
        Self { probs }
    }

    /// Normalizes nonnegative weights. Returns `None` when they sum to zero.
    pub fn from_weights(weights: &[f64]) -> Option<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return None;
        }
        Some(Self { probs: weights.iter().map(|w| w / total).collect() })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        // Weights are validated on construction, so the index cannot fail.
        WeightedIndex::new(&self.probs).expect("valid strategy").sample(rng)
    }

    /// L-infinity distance to another strategy of the same length.
    pub fn max_abs_diff(&self, other: &MixedStrategy) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl TryFrom<Vec<f64>> for MixedStrategy {
    type Error = Error;
    fn try_from(probs: Vec<f64>) -> Result<Self> {
        Self::new(probs)
    }
}

impl From<MixedStrategy> for Vec<f64> {
    fn from(s: MixedStrategy) -> Self {
        s.probs
    }
}

/// One strategy per player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedProfile {
    pub strategies: Vec<MixedStrategy>,
}

impl MixedProfile {
    pub fn new(strategies: Vec<MixedStrategy>) -> Self {
        Self { strategies }
    }

    pub fn uniform(action_counts: &[usize]) -> Self {
        Self { strategies: action_counts.iter().map(|&n| MixedStrategy::uniform(n)).collect() }
    }

    pub fn dirac(action_counts: &[usize], profile: &[usize]) -> Self {
        Self {
            strategies: action_counts
                .iter()
                .zip(profile)
                .map(|(&n, &a)| MixedStrategy::dirac(n, a))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.strategies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strategies.is_empty()
    }

    pub fn max_abs_diff(&self, other: &MixedProfile) -> f64 {
        self.strategies
            .iter()
            .zip(&other.strategies)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }
}

/// Row-major index arithmetic over a product of finite action sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileShape {
    counts: Vec<usize>,
    strides: Vec<usize>,
    size: usize,
}

impl ProfileShape {
    pub fn new(counts: &[usize]) -> Result<Self> {
        if counts.contains(&0) {
            return Err(invalid("every action set must be non-empty"));
        }
        let mut strides = vec![1; counts.len()];
        let mut size: usize = 1;
        for k in (0..counts.len()).rev() {
            strides[k] = size;
            size = size
                .checked_mul(counts[k])
                .ok_or_else(|| invalid("profile space overflows usize"))?;
        }
        Ok(Self { counts: counts.to_vec(), strides, size })
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Number of joint profiles.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn stride(&self, player: usize) -> usize {
        self.strides[player]
    }

    pub fn index_of(&self, profile: &[usize]) -> Result<usize> {
        if profile.len() != self.counts.len() {
            return Err(Error::DimensionMismatch { expected: self.counts.len(), actual: profile.len() });
        }
        let mut idx = 0;
        for (k, (&a, &n)) in profile.iter().zip(&self.counts).enumerate() {
            if a >= n {
                return Err(invalid(format!("action {a} out of range for player {k} ({n} actions)")));
            }
            idx += a * self.strides[k];
        }
        Ok(idx)
    }

    /// Inverse of [`index_of`](Self::index_of), writing into `out`.
    pub fn decode_into(&self, mut index: usize, out: &mut [usize]) {
        for (slot, &stride) in out.iter_mut().zip(&self.strides) {
            *slot = index / stride;
            index %= stride;
        }
    }

    pub fn decode(&self, index: usize) -> Vec<usize> {
        let mut out = vec![0; self.counts.len()];
        self.decode_into(index, &mut out);
        out
    }

    /// Action of `player` inside the profile with flat index `index`.
    pub fn action_at(&self, index: usize, player: usize) -> usize {
        (index / self.strides[player]) % self.counts[player]
    }

    /// Index of the profile obtained by replacing `player`'s action.
    pub fn with_action(&self, index: usize, player: usize, action: usize) -> usize {
        let current = self.action_at(index, player);
        index - current * self.strides[player] + action * self.strides[player]
    }

    /// Shape of the profile space with `player` removed.
    pub fn without(&self, player: usize) -> ProfileShape {
        let mut counts = self.counts.clone();
        counts.remove(player);
        ProfileShape::new(&counts).expect("sub-shape of a valid shape")
    }

    /// Index of `index`'s projection into [`without(player)`](Self::without).
    pub fn project_out(&self, index: usize, player: usize) -> usize {
        let stride = self.strides[player];
        let upper = index / (stride * self.counts[player]);
        let lower = index % stride;
        upper * stride + lower
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.size).map(move |i| self.decode(i))
    }
}

/// A finite game in normal form: players, action sets and utilities.
///
/// Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalFormGame {
    shape: ProfileShape,
    // utilities[player * size + profile_index]
    utilities: Vec<f64>,
}

/// JSON form of a game: `{players, action_counts, utilities}` where
/// `utilities[k]` is player `k`'s row-major utility array.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GameDocument {
    pub players: usize,
    pub action_counts: Vec<usize>,
    pub utilities: Vec<Vec<f64>>,
}

impl NormalFormGame {
    /// Builds a game from per-player row-major utility arrays.
    pub fn new(action_counts: Vec<usize>, utilities: Vec<Vec<f64>>) -> Result<Self> {
        if action_counts.is_empty() {
            return Err(invalid("a game needs at least one player"));
        }
        let shape = ProfileShape::new(&action_counts)?;
        if utilities.len() != action_counts.len() {
            return Err(Error::DimensionMismatch { expected: action_counts.len(), actual: utilities.len() });
        }
        let mut flat = Vec::with_capacity(shape.size() * action_counts.len());
        for row in &utilities {
            if row.len() != shape.size() {
                return Err(Error::DimensionMismatch { expected: shape.size(), actual: row.len() });
            }
            if row.iter().any(|u| !u.is_finite()) {
                return Err(invalid("utilities must be finite"));
            }
            flat.extend_from_slice(row);
        }
        Ok(Self { shape, utilities: flat })
    }

    /// Builds a game by evaluating `f(profile)` for every profile; `f`
    /// returns one utility per player.
    pub fn from_fn<F>(action_counts: Vec<usize>, mut f: F) -> Result<Self>
    where
        F: FnMut(&[usize]) -> Vec<f64>,
    {
        let shape = ProfileShape::new(&action_counts)?;
        let k = action_counts.len();
        let mut utilities = vec![Vec::with_capacity(shape.size()); k];
        for profile in shape.iter() {
            let u = f(&profile);
            if u.len() != k {
                return Err(Error::DimensionMismatch { expected: k, actual: u.len() });
            }
            for (row, value) in utilities.iter_mut().zip(u) {
                row.push(value);
            }
        }
        Self::new(action_counts, utilities)
    }

    /// Two-player game from row-major payoff pairs.
    pub fn bimatrix(rows: usize, cols: usize, payoffs: &[(f64, f64)]) -> Result<Self> {
        if payoffs.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, actual: payoffs.len() });
        }
        Self::new(
            vec![rows, cols],
            vec![payoffs.iter().map(|p| p.0).collect(), payoffs.iter().map(|p| p.1).collect()],
        )
    }

    pub fn num_players(&self) -> usize {
        self.shape.counts().len()
    }

    pub fn action_counts(&self) -> &[usize] {
        self.shape.counts()
    }

    pub fn num_actions(&self, player: usize) -> usize {
        self.shape.counts()[player]
    }

    pub fn num_profiles(&self) -> usize {
        self.shape.size()
    }

    pub fn shape(&self) -> &ProfileShape {
        &self.shape
    }

    fn check_player(&self, player: usize) -> Result<()> {
        if player >= self.num_players() {
            return Err(invalid(format!("player {player} out of range ({} players)", self.num_players())));
        }
        Ok(())
    }

    /// Utility of `player` at a pure profile.
    pub fn utility(&self, profile: &[usize], player: usize) -> Result<f64> {
        self.check_player(player)?;
        let idx = self.shape.index_of(profile)?;
        Ok(self.utility_at(idx, player))
    }

    /// Utility lookup by flat profile index. Panics on out-of-range input.
    #[inline]
    pub fn utility_at(&self, index: usize, player: usize) -> f64 {
        self.utilities[player * self.shape.size() + index]
    }

    /// Player `player`'s row-major utility array.
    pub fn utilities_of(&self, player: usize) -> &[f64] {
        let n = self.shape.size();
        &self.utilities[player * n..(player + 1) * n]
    }

    /// Smallest and largest utility `player` can receive.
    pub fn utility_range(&self, player: usize) -> (f64, f64) {
        self.utilities_of(player)
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &u| (lo.min(u), hi.max(u)))
    }

    pub fn max_abs_utility(&self) -> f64 {
        self.utilities.iter().fold(0.0, |m, u| m.max(u.abs()))
    }

    fn check_profile(&self, profile: &MixedProfile) -> Result<()> {
        if profile.len() != self.num_players() {
            return Err(Error::DimensionMismatch { expected: self.num_players(), actual: profile.len() });
        }
        for (s, &n) in profile.strategies.iter().zip(self.action_counts()) {
            if s.len() != n {
                return Err(Error::DimensionMismatch { expected: n, actual: s.len() });
            }
        }
        Ok(())
    }

    fn check_joint(&self, phi: &JointDistribution) -> Result<()> {
        if phi.shape.counts() != self.action_counts() {
            return Err(invalid(format!(
                "joint distribution shape {:?} does not match game {:?}",
                phi.shape.counts(),
                self.action_counts()
            )));
        }
        Ok(())
    }

    /// Expected utility of `player` when everyone plays independently.
    pub fn expected_utility_product(&self, profile: &MixedProfile, player: usize) -> Result<f64> {
        self.check_player(player)?;
        self.check_profile(profile)?;
        let mut scratch = vec![0; self.num_players()];
        let mut total = 0.0;
        for idx in 0..self.num_profiles() {
            self.shape.decode_into(idx, &mut scratch);
            let w: f64 = scratch
                .iter()
                .zip(&profile.strategies)
                .map(|(&a, s)| s.probs()[a])
                .product();
            if w != 0.0 {
                total += w * self.utility_at(idx, player);
            }
        }
        Ok(total)
    }

    /// Expected utility of `player` under a joint distribution.
    pub fn expected_utility_joint(&self, phi: &JointDistribution, player: usize) -> Result<f64> {
        self.check_player(player)?;
        self.check_joint(phi)?;
        Ok(phi
            .probs()
            .iter()
            .zip(self.utilities_of(player))
            .map(|(p, u)| p * u)
            .sum())
    }

    /// Expected utility of each of `player`'s actions when every opponent
    /// `j` plays `opponents[j']` independently (`opponents` lists the other
    /// players in increasing index order).
    pub fn action_values(&self, player: usize, opponents: &[MixedStrategy]) -> Result<Vec<f64>> {
        self.check_player(player)?;
        let k = self.num_players();
        if opponents.len() != k - 1 {
            return Err(Error::DimensionMismatch { expected: k - 1, actual: opponents.len() });
        }
        for (j, s) in (0..k).filter(|&j| j != player).zip(opponents) {
            if s.len() != self.num_actions(j) {
                return Err(Error::DimensionMismatch { expected: self.num_actions(j), actual: s.len() });
            }
        }
        let mut values = vec![0.0; self.num_actions(player)];
        let mut scratch = vec![0; k];
        for idx in 0..self.num_profiles() {
            self.shape.decode_into(idx, &mut scratch);
            let mut w = 1.0;
            for (j, s) in (0..k).filter(|&j| j != player).zip(opponents) {
                w *= s.probs()[scratch[j]];
            }
            if w != 0.0 {
                values[scratch[player]] += w * self.utility_at(idx, player);
            }
        }
        Ok(values)
    }

    /// Utility of each of `player`'s actions against fixed opponent actions.
    /// `profile[player]` is ignored.
    pub fn deviation_values(&self, player: usize, profile: &[usize]) -> Result<Vec<f64>> {
        self.check_player(player)?;
        let mut p = profile.to_vec();
        if p.len() != self.num_players() {
            return Err(Error::DimensionMismatch { expected: self.num_players(), actual: p.len() });
        }
        p[player] = 0;
        let base = self.shape.index_of(&p)?;
        let stride = self.shape.stride(player);
        Ok((0..self.num_actions(player))
            .map(|a| self.utility_at(base + a * stride, player))
            .collect())
    }

    pub fn to_document(&self) -> GameDocument {
        GameDocument {
            players: self.num_players(),
            action_counts: self.action_counts().to_vec(),
            utilities: (0..self.num_players()).map(|k| self.utilities_of(k).to_vec()).collect(),
        }
    }

    pub fn from_document(doc: GameDocument) -> Result<Self> {
        if doc.players != doc.action_counts.len() {
            return Err(invalid(format!(
                "players = {} but {} action counts given",
                doc.players,
                doc.action_counts.len()
            )));
        }
        Self::new(doc.action_counts, doc.utilities)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_document(serde_json::from_str(text)?)
    }
}

/// A probability distribution over joint action profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    shape: ProfileShape,
    probs: Vec<f64>,
}

impl JointDistribution {
    pub fn new(action_counts: &[usize], probs: Vec<f64>) -> Result<Self> {
        let shape = ProfileShape::new(action_counts)?;
        if probs.len() != shape.size() {
            return Err(Error::DimensionMismatch { expected: shape.size(), actual: probs.len() });
        }
        check_probability_vector(&probs, "joint distribution")?;
        Ok(Self { shape, probs })
    }

    pub fn uniform(action_counts: &[usize]) -> Result<Self> {
        let shape = ProfileShape::new(action_counts)?;
        let n = shape.size();
        Ok(Self { shape, probs: vec![1.0 / n as f64; n] })
    }

    pub fn dirac(action_counts: &[usize], profile: &[usize]) -> Result<Self> {
        let shape = ProfileShape::new(action_counts)?;
        let idx = shape.index_of(profile)?;
        let mut probs = vec![0.0; shape.size()];
        probs[idx] = 1.0;
        Ok(Self { shape, probs })
    }

    /// The product distribution `phi_a = prod_j pi_{j, a_j}`.
    pub fn product(profile: &MixedProfile) -> Result<Self> {
        let counts: Vec<usize> = profile.strategies.iter().map(MixedStrategy::len).collect();
        let shape = ProfileShape::new(&counts)?;
        let mut scratch = vec![0; counts.len()];
        let probs = (0..shape.size())
            .map(|i| {
                shape.decode_into(i, &mut scratch);
                scratch.iter().zip(&profile.strategies).map(|(&a, s)| s.probs()[a]).product()
            })
            .collect();
        Ok(Self { shape, probs })
    }

    /// Normalized profile counts. Errors when all counts are zero.
    pub fn from_counts(action_counts: &[usize], counts: &[u64]) -> Result<Self> {
        let shape = ProfileShape::new(action_counts)?;
        if counts.len() != shape.size() {
            return Err(Error::DimensionMismatch { expected: shape.size(), actual: counts.len() });
        }
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::EmptyHistory);
        }
        let probs = counts.iter().map(|&c| c as f64 / total as f64).collect();
        Ok(Self { shape, probs })
    }

    pub fn action_counts(&self) -> &[usize] {
        self.shape.counts()
    }

    pub fn shape(&self) -> &ProfileShape {
        &self.shape
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, profile: &[usize]) -> Result<f64> {
        Ok(self.probs[self.shape.index_of(profile)?])
    }

    /// Marginal over everyone except `player`: `phi_{-k}(a_{-k}) = sum_{a_k}
    /// phi(a_k, a_{-k})`, indexed row-major over the remaining players.
    pub fn marginal_excluding(&self, player: usize) -> Result<JointDistribution> {
        let k = self.shape.counts().len();
        if player >= k {
            return Err(invalid(format!("player {player} out of range ({k} players)")));
        }
        if k == 1 {
            return Err(invalid("cannot marginalize out the only player"));
        }
        let sub = self.shape.without(player);
        let mut probs = vec![0.0; sub.size()];
        for (idx, &p) in self.probs.iter().enumerate() {
            probs[self.shape.project_out(idx, player)] += p;
        }
        Ok(JointDistribution { shape: sub, probs })
    }

    /// Marginal distribution of a single player's action.
    pub fn player_marginal(&self, player: usize) -> Result<MixedStrategy> {
        let k = self.shape.counts().len();
        if player >= k {
            return Err(invalid(format!("player {player} out of range ({k} players)")));
        }
        let mut probs = vec![0.0; self.shape.counts()[player]];
        for (idx, &p) in self.probs.iter().enumerate() {
            probs[self.shape.action_at(idx, player)] += p;
        }
        Ok(MixedStrategy { probs })
    }

    /// L1 distance between two distributions of the same shape.
    pub fn l1_distance(&self, other: &JointDistribution) -> f64 {
        self.probs.iter().zip(&other.probs).map(|(a, b)| (a - b).abs()).sum()
    }
}

/// One stage of play: the joint action and the utility each player received.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayRecord {
    pub profile: Vec<usize>,
    pub utilities: Vec<f64>,
}

/// Realized play of a repeated game.
#[derive(Debug, Clone, PartialEq)]
pub struct PlayHistory {
    action_counts: Vec<usize>,
    records: Vec<PlayRecord>,
}

impl PlayHistory {
    pub fn new(action_counts: &[usize]) -> Self {
        Self { action_counts: action_counts.to_vec(), records: Vec::new() }
    }

    pub fn push(&mut self, profile: Vec<usize>, utilities: Vec<f64>) -> Result<()> {
        let k = self.action_counts.len();
        if profile.len() != k {
            return Err(Error::DimensionMismatch { expected: k, actual: profile.len() });
        }
        if utilities.len() != k {
            return Err(Error::DimensionMismatch { expected: k, actual: utilities.len() });
        }
        for (j, (&a, &n)) in profile.iter().zip(&self.action_counts).enumerate() {
            if a >= n {
                return Err(invalid(format!("action {a} out of range for player {j}")));
            }
        }
        self.records.push(PlayRecord { profile, utilities });
        Ok(())
    }

    /// Number of recorded iterations.
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[PlayRecord] {
        &self.records
    }

    pub fn action_counts(&self) -> &[usize] {
        &self.action_counts
    }

    pub fn last(&self) -> Option<&PlayRecord> {
        self.records.last()
    }

    /// Fraction of iterations in which each of `player`'s actions was played.
    pub fn empirical_frequencies(&self, player: usize) -> Result<MixedStrategy> {
        if self.records.is_empty() {
            return Err(Error::EmptyHistory);
        }
        let n = *self
            .action_counts
            .get(player)
            .ok_or_else(|| invalid(format!("player {player} out of range")))?;
        let mut counts = vec![0u64; n];
        for r in &self.records {
            counts[r.profile[player]] += 1;
        }
        let total = self.records.len() as f64;
        Ok(MixedStrategy { probs: counts.iter().map(|&c| c as f64 / total).collect() })
    }

    /// Empirical distribution of joint profiles.
    pub fn empirical_joint(&self) -> Result<JointDistribution> {
        let shape = ProfileShape::new(&self.action_counts)?;
        let mut counts = vec![0u64; shape.size()];
        for r in &self.records {
            counts[shape.index_of(&r.profile)?] += 1;
        }
        JointDistribution::from_counts(&self.action_counts, &counts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::matching_pennies;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_game(rng: &mut ChaCha8Rng, counts: Vec<usize>) -> NormalFormGame {
        NormalFormGame::from_fn(counts.clone(), |_| (0..counts.len()).map(|_| rng.random::<f64>()).collect())
            .unwrap()
    }

    #[test]
    fn row_major_indexing_puts_player_zero_first() {
        let shape = ProfileShape::new(&[2, 3]).unwrap();
        assert_eq!(shape.index_of(&[0, 2]).unwrap(), 2);
        assert_eq!(shape.index_of(&[1, 0]).unwrap(), 3);
        assert_eq!(shape.decode(5), vec![1, 2]);
        assert_eq!(shape.with_action(5, 0, 0), 2);
        assert_eq!(shape.project_out(5, 0), 2);
        assert_eq!(shape.project_out(5, 1), 1);
    }

    #[test]
    fn utility_lookup() {
        let constant = NormalFormGame::from_fn(vec![3, 2], |_| vec![4.5, 4.5]).unwrap();
        for p in constant.shape().iter() {
            assert_eq!(constant.utility(&p, 1).unwrap(), 4.5);
        }
        let mp = matching_pennies();
        assert_eq!(mp.utility(&[0, 0], 0).unwrap(), 1.0);
        assert!(matches!(mp.utility(&[2, 0], 0), Err(Error::InvalidArgument(_))));
        assert!(mp.utility(&[0, 0], 2).is_err());
        assert!(mp.utility(&[0], 0).is_err());
    }

    #[test]
    fn construction_rejects_bad_tensors() {
        assert!(NormalFormGame::new(vec![2, 2], vec![vec![0.0; 4]]).is_err());
        assert!(NormalFormGame::new(vec![2, 2], vec![vec![0.0; 4], vec![0.0; 3]]).is_err());
        assert!(NormalFormGame::new(vec![2, 0], vec![vec![], vec![]]).is_err());
        assert!(NormalFormGame::new(vec![1], vec![vec![f64::NAN]]).is_err());
        assert!(NormalFormGame::new(vec![], vec![]).is_err());
    }

    #[test]
    fn expected_utility_product_cases() {
        let mp = matching_pennies();
        let uniform = MixedProfile::uniform(&[2, 2]);
        assert_abs_diff_eq!(mp.expected_utility_product(&uniform, 0).unwrap(), 0.0);
        assert_abs_diff_eq!(mp.expected_utility_product(&uniform, 1).unwrap(), 0.0);

        let dirac = MixedProfile::dirac(&[2, 2], &[1, 0]);
        assert_eq!(mp.expected_utility_product(&dirac, 0).unwrap(), mp.utility(&[1, 0], 0).unwrap());

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = random_game(&mut rng, vec![2, 2]);
        let p = MixedProfile::new(vec![
            MixedStrategy::new(vec![0.3, 0.7]).unwrap(),
            MixedStrategy::new(vec![0.5, 0.5]).unwrap(),
        ]);
        for k in 0..2 {
            let brute = 0.3 * 0.5 * g.utility(&[0, 0], k).unwrap()
                + 0.3 * 0.5 * g.utility(&[0, 1], k).unwrap()
                + 0.7 * 0.5 * g.utility(&[1, 0], k).unwrap()
                + 0.7 * 0.5 * g.utility(&[1, 1], k).unwrap();
            assert_abs_diff_eq!(g.expected_utility_product(&p, k).unwrap(), brute, epsilon = 1e-14);
        }
        let wrong = MixedProfile::uniform(&[2, 3]);
        assert!(g.expected_utility_product(&wrong, 0).is_err());
    }

    #[test]
    fn expected_utility_joint_cases() {
        let mp = matching_pennies();
        let uniform = JointDistribution::uniform(&[2, 2]).unwrap();
        assert_abs_diff_eq!(mp.expected_utility_joint(&uniform, 0).unwrap(), 0.0);
        let dirac = JointDistribution::dirac(&[2, 2], &[0, 1]).unwrap();
        assert_eq!(mp.expected_utility_joint(&dirac, 1).unwrap(), 1.0);

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = random_game(&mut rng, vec![3, 3]);
        let w: Vec<f64> = (0..9).map(|_| rng.random::<f64>()).collect();
        let phi = JointDistribution::new(&[3, 3], MixedStrategy::from_weights(&w).unwrap().into()).unwrap();
        for k in 0..2 {
            let mut brute = 0.0;
            for a in 0..3 {
                for b in 0..3 {
                    brute += g.utility(&[a, b], k).unwrap() * phi.prob(&[a, b]).unwrap();
                }
            }
            assert_abs_diff_eq!(g.expected_utility_joint(&phi, k).unwrap(), brute, epsilon = 1e-14);
        }
        let other = JointDistribution::uniform(&[3, 2]).unwrap();
        assert!(g.expected_utility_joint(&other, 0).is_err());
    }

    #[test]
    fn marginal_excluding_cases() {
        let phi = JointDistribution::new(&[2, 2], vec![0.4, 0.1, 0.2, 0.3]).unwrap();
        let m = phi.marginal_excluding(0).unwrap();
        assert_eq!(m.action_counts(), &[2]);
        assert_abs_diff_eq!(m.probs()[0], 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(m.probs()[1], 0.4, epsilon = 1e-15);

        let pi2 = MixedStrategy::new(vec![0.25, 0.25, 0.5]).unwrap();
        let prod = JointDistribution::product(&MixedProfile::new(vec![
            MixedStrategy::new(vec![0.9, 0.1]).unwrap(),
            pi2.clone(),
        ]))
        .unwrap();
        let m = prod.marginal_excluding(0).unwrap();
        for (a, b) in m.probs().iter().zip(pi2.probs()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }

        let u = JointDistribution::uniform(&[2, 3, 2]).unwrap();
        let m = u.marginal_excluding(1).unwrap();
        assert!(m.probs().iter().all(|p| (p - 0.25).abs() < 1e-15));
        assert!(u.marginal_excluding(3).is_err());
    }

    #[test]
    fn empirical_frequencies_cases() {
        let mut h = PlayHistory::new(&[2, 2]);
        assert_eq!(h.empirical_frequencies(0), Err(Error::EmptyHistory));
        h.push(vec![0, 1], vec![0.0, 0.0]).unwrap();
        assert_eq!(h.empirical_frequencies(0).unwrap().probs(), &[1.0, 0.0]);
        h.push(vec![0, 1], vec![0.0, 0.0]).unwrap();
        h.push(vec![1, 1], vec![0.0, 0.0]).unwrap();
        let f = h.empirical_frequencies(0).unwrap();
        assert_abs_diff_eq!(f.probs()[0], 2.0 / 3.0);
        assert_abs_diff_eq!(f.probs()[1], 1.0 / 3.0);
        assert_eq!(h.len(), 3);
        assert!(h.push(vec![2, 0], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn empirical_frequencies_law_of_large_numbers() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut h = PlayHistory::new(&[2]);
        let uniform = MixedStrategy::uniform(2);
        for _ in 0..1000 {
            h.push(vec![uniform.sample(&mut rng)], vec![0.0]).unwrap();
        }
        let f = h.empirical_frequencies(0).unwrap();
        assert!((f.probs()[0] - 0.5).abs() < 0.06, "{:?}", f);
    }

    #[test]
    fn json_round_trip() {
        let g = matching_pennies();
        let back = NormalFormGame::from_json(&g.to_json().unwrap()).unwrap();
        assert_eq!(g, back);
        let bad = r#"{"players": 3, "action_counts": [2, 2], "utilities": [[0,0,0,0],[0,0,0,0]]}"#;
        assert!(NormalFormGame::from_json(bad).is_err());
    }

    #[test]
    fn strategy_validation() {
        assert!(MixedStrategy::new(vec![0.5, 0.6]).is_err());
        assert!(MixedStrategy::new(vec![-0.1, 1.1]).is_err());
        assert!(MixedStrategy::new(vec![]).is_err());
        assert!(MixedStrategy::new(vec![0.5, 0.5 + 1e-12]).is_ok());
        assert!(serde_json::from_str::<MixedStrategy>("[0.2, 0.2]").is_err());
    }
}
