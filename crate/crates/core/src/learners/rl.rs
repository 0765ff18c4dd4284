use super::check_own_action;
use crate::error::{invalid, Result};
use crate::game::MixedStrategy;

/// Linear reward-inaction automaton.
///
/// The observed payoff is normalized to `s = clamp((u - u_min) / (u_max -
/// u_min), 0, 1)` and the strategy moves towards the played action:
/// `pi_a += b * s * (1{a = played} - pi_a)`.
#[derive(Debug, Clone)]
pub struct RlState {
    strategy: MixedStrategy,
    step: f64,
    u_min: f64,
    u_max: f64,
}

impl RlState {
    pub fn new(num_actions: usize, step: f64, u_min: f64, u_max: f64) -> Result<Self> {
        Self::with_strategy(MixedStrategy::uniform(num_actions), step, u_min, u_max)
    }

    pub fn with_strategy(strategy: MixedStrategy, step: f64, u_min: f64, u_max: f64) -> Result<Self> {
        if !(step > 0.0 && step <= 1.0) {
            return Err(invalid(format!("step size must lie in (0, 1], got {step}")));
        }
        if !u_min.is_finite() || !u_max.is_finite() {
            return Err(invalid("utility bounds must be finite"));
        }
        if !(u_min < u_max) {
            return Err(invalid(format!("utility bounds must satisfy u_min < u_max, got [{u_min}, {u_max}]")));
        }
        Ok(Self { strategy, step, u_min, u_max })
    }

    pub fn strategy(&self) -> &MixedStrategy {
        &self.strategy
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.u_min, self.u_max)
    }

    pub fn normalize(&self, utility: f64) -> f64 {
        ((utility - self.u_min) / (self.u_max - self.u_min)).clamp(0.0, 1.0)
    }
}

pub fn rl_update(state: &mut RlState, played_action: usize, utility: f64) -> Result<()> {
    check_own_action(state.strategy.len(), played_action)?;
    if !utility.is_finite() {
        return Err(invalid("observed utility must be finite"));
    }
    let rate = state.step * state.normalize(utility);
    if rate == 0.0 {
        return Ok(());
    }
    let probs: Vec<f64> = state
        .strategy
        .probs()
        .iter()
        .enumerate()
        .map(|(a, &p)| {
            let target = if a == played_action { 1.0 } else { 0.0 };
            p + rate * (target - p)
        })
        .collect();
    state.strategy = MixedStrategy::from_weights(&probs).expect("convex update of a distribution");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_reinforcement_keeps_strategy() {
        let mut s = RlState::with_strategy(MixedStrategy::new(vec![0.2, 0.8]).unwrap(), 0.5, 0.0, 1.0).unwrap();
        rl_update(&mut s, 0, 0.0).unwrap();
        assert_eq!(s.strategy().probs(), &[0.2, 0.8]);
        rl_update(&mut s, 0, -3.0).unwrap();
        assert_eq!(s.strategy().probs(), &[0.2, 0.8]);
    }

    #[test]
    fn full_step_is_dirac() {
        let mut s = RlState::new(3, 1.0, 0.0, 2.0).unwrap();
        rl_update(&mut s, 2, 2.0).unwrap();
        assert_eq!(s.strategy().probs(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn one_step_arithmetic() {
        let mut s = RlState::new(2, 0.1, 0.0, 1.0).unwrap();
        rl_update(&mut s, 0, 1.0).unwrap();
        assert_abs_diff_eq!(s.strategy().probs()[0], 0.55, epsilon = 1e-15);
        assert_abs_diff_eq!(s.strategy().probs()[1], 0.45, epsilon = 1e-15);
    }

    #[test]
    fn invalid_parameters() {
        assert!(RlState::new(2, 0.1, 1.0, 1.0).is_err());
        assert!(RlState::new(2, 0.0, 0.0, 1.0).is_err());
        assert!(RlState::new(2, 1.5, 0.0, 1.0).is_err());
        let mut s = RlState::new(2, 0.1, 0.0, 1.0).unwrap();
        assert!(rl_update(&mut s, 2, 0.5).is_err());
        assert!(rl_update(&mut s, 0, f64::NAN).is_err());
    }
}
