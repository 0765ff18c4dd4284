use serde::{Deserialize, Serialize};

use super::{check_own_action, logit};
use crate::error::{invalid, Result};
use crate::game::MixedStrategy;

/// Step size of the payoff estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LearningRate {
    /// `1 / m` on the `m`-th update of an action's estimate, which makes the
    /// estimate the sample mean of that action's observed payoffs.
    InverseCount,
    Constant(f64),
}

/// Joint utility and strategy estimation.
///
/// Each stage the observed payoff updates the played action's estimate,
/// `u_hat[a] += lambda * (u - u_hat[a])`, and the strategy is rebuilt as the
/// logit of the estimates with temperature `kappa`, mixed with an
/// exploration floor so every action keeps probability at least `p_min`:
/// `pi = (1 - p_min * N) * logit(u_hat / kappa) + p_min`.
#[derive(Debug, Clone)]
pub struct JusteState {
    estimates: Vec<f64>,
    updates: Vec<u64>,
    strategy: MixedStrategy,
    kappa: f64,
    p_min: f64,
    learning_rate: LearningRate,
}

impl JusteState {
    pub fn new(num_actions: usize, kappa: f64, p_min: f64, learning_rate: LearningRate) -> Result<Self> {
        if num_actions == 0 {
            return Err(invalid("JUSTE-RL needs at least one action"));
        }
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(invalid(format!("kappa must be positive, got {kappa}")));
        }
        if !(p_min > 0.0) || p_min * num_actions as f64 >= 1.0 {
            return Err(invalid(format!("p_min must satisfy 0 < p_min * N < 1, got {p_min} with N = {num_actions}")));
        }
        if let LearningRate::Constant(l) = learning_rate {
            if !(l > 0.0 && l <= 1.0) {
                return Err(invalid(format!("constant learning rate must lie in (0, 1], got {l}")));
            }
        }
        Ok(Self {
            estimates: vec![0.0; num_actions],
            updates: vec![0; num_actions],
            strategy: MixedStrategy::uniform(num_actions),
            kappa,
            p_min,
            learning_rate,
        })
    }

    pub fn estimates(&self) -> &[f64] {
        &self.estimates
    }

    pub fn strategy(&self) -> &MixedStrategy {
        &self.strategy
    }

    pub fn p_min(&self) -> f64 {
        self.p_min
    }

    fn rebuild_strategy(&mut self) {
        let n = self.estimates.len() as f64;
        let soft = logit(&self.estimates, self.kappa);
        let mixed: Vec<f64> = soft.probs().iter().map(|p| (1.0 - self.p_min * n) * p + self.p_min).collect();
        self.strategy = MixedStrategy::from_weights(&mixed).expect("floored logit is a distribution");
    }
}

pub fn juste_update(state: &mut JusteState, played_action: usize, utility: f64) -> Result<()> {
    check_own_action(state.estimates.len(), played_action)?;
    if !utility.is_finite() {
        return Err(invalid("observed utility must be finite"));
    }
    state.updates[played_action] += 1;
    let lambda = match state.learning_rate {
        LearningRate::InverseCount => 1.0 / state.updates[played_action] as f64,
        LearningRate::Constant(l) => l,
    };
    let est = &mut state.estimates[played_action];
    *est += lambda * (utility - *est);
    state.rebuild_strategy();
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn estimates_are_sample_means() {
        let mut s = JusteState::new(2, 0.1, 0.01, LearningRate::InverseCount).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        // Payoffs uniform on [0, 2]: mean 1.
        let mut sum = 0.0;
        for _ in 0..1000 {
            let u: f64 = rng.random_range(0.0..2.0);
            sum += u;
            juste_update(&mut s, 1, u).unwrap();
        }
        assert_abs_diff_eq!(s.estimates()[1], sum / 1000.0, epsilon = 1e-9);
        assert!((s.estimates()[1] - 1.0).abs() < 0.05);
        assert_eq!(s.estimates()[0], 0.0);
    }

    #[test]
    fn equal_estimates_give_uniform() {
        let mut s = JusteState::new(3, 0.1, 0.01, LearningRate::Constant(1.0)).unwrap();
        for a in 0..3 {
            juste_update(&mut s, a, 2.5).unwrap();
        }
        for p in s.strategy().probs() {
            assert_abs_diff_eq!(*p, 1.0 / 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn unit_rate_overwrites() {
        let mut s = JusteState::new(2, 0.1, 0.01, LearningRate::Constant(1.0)).unwrap();
        juste_update(&mut s, 0, 4.0).unwrap();
        juste_update(&mut s, 0, -1.5).unwrap();
        assert_eq!(s.estimates()[0], -1.5);
    }

    #[test]
    fn floor_is_respected() {
        let mut s = JusteState::new(4, 0.01, 0.02, LearningRate::InverseCount).unwrap();
        juste_update(&mut s, 2, 100.0).unwrap();
        assert!(s.strategy().probs().iter().all(|&p| p >= 0.02 - 1e-15));
        assert_abs_diff_eq!(s.strategy().probs()[2], 1.0 - 3.0 * 0.02, epsilon = 1e-12);
    }

    #[test]
    fn invalid_parameters() {
        assert!(JusteState::new(2, 0.0, 0.01, LearningRate::InverseCount).is_err());
        assert!(JusteState::new(100, 0.1, 0.01, LearningRate::InverseCount).is_err());
        assert!(JusteState::new(2, 0.1, 0.01, LearningRate::Constant(0.0)).is_err());
        let mut s = JusteState::new(2, 0.1, 0.01, LearningRate::InverseCount).unwrap();
        assert!(juste_update(&mut s, 5, 1.0).is_err());
        assert!(juste_update(&mut s, 0, f64::INFINITY).is_err());
    }
}
