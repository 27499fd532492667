use std::f64::consts::E;

use super::{uniform, Learner, PayoffScale};
use crate::error::{invalid, Result};

/// Exp3S with exploration `gamma` and weight sharing `alpha`; plain Exp3 is
/// the case `alpha = 0`.
///
/// Weights are renormalized to sum to one after every update so long runs do
/// not overflow; the mixed action is invariant to that rescaling.
#[derive(Debug, Clone, PartialEq)]
pub struct Exp3S {
    gamma: f64,
    alpha: f64,
    scale: PayoffScale,
    weights: Vec<f64>,
    probs: Vec<f64>,
}

impl Exp3S {
    pub fn new(actions: usize, gamma: f64, alpha: f64, bound: f64) -> Result<Self> {
        if actions < 2 {
            return invalid("Exp3S needs at least two actions");
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return invalid(format!("gamma must lie in (0, 1], got {gamma}"));
        }
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return invalid(format!("alpha must be non-negative, got {alpha}"));
        }
        if !(bound > 0.0 && bound.is_finite()) {
            return invalid(format!("payoff bound must be positive, got {bound}"));
        }
        Ok(Self {
            gamma,
            alpha,
            scale: PayoffScale::new(bound),
            weights: uniform(actions),
            probs: uniform(actions),
        })
    }

    pub fn exp3(actions: usize, gamma: f64, bound: f64) -> Result<Self> {
        Self::new(actions, gamma, 0.0, bound)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn refresh_probs(&mut self) {
        let k = self.weights.len() as f64;
        let total: f64 = self.weights.iter().sum();
        for (p, w) in self.probs.iter_mut().zip(&self.weights) {
            *p = (1.0 - self.gamma) * w / total + self.gamma / k;
        }
    }
}

impl Learner for Exp3S {
    fn num_actions(&self) -> usize {
        self.weights.len()
    }

    fn act(&mut self, _t: usize) -> &[f64] {
        self.refresh_probs();
        &self.probs
    }

    fn observe(&mut self, _t: usize, action: usize, payoff: f64) {
        self.refresh_probs();
        let k = self.weights.len() as f64;
        let reward = self.scale.to_unit(payoff);
        let estimate = reward / self.probs[action];
        let total: f64 = self.weights.iter().sum();
        let share = E * self.alpha / k * total;
        for (j, w) in self.weights.iter_mut().enumerate() {
            let x = if j == action { estimate } else { 0.0 };
            *w = *w * (self.gamma * x / k).exp() + share;
        }
        let total: f64 = self.weights.iter().sum();
        for w in &mut self.weights {
            *w /= total;
        }
    }

    fn reset(&mut self) {
        let k = self.weights.len();
        self.weights = uniform(k);
        self.probs = uniform(k);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_update_by_hand() {
        let mut l = Exp3S::new(2, 0.2, 0.01, 1.0).unwrap();
        assert_eq!(l.act(1), &[0.5, 0.5]);
        // payoff 1 maps to reward 1; estimate 1 / 0.5 = 2.
        l.observe(1, 0, 1.0);
        let share = E * 0.01 / 2.0;
        let w0 = 0.5 * (0.2f64 * 2.0 / 2.0).exp() + share;
        let w1 = 0.5 + share;
        let p0 = 0.8 * w0 / (w0 + w1) + 0.1;
        let p = l.act(2).to_vec();
        assert!((p[0] - p0).abs() < 1e-15);
        assert!((p[0] + p[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exploration_floor_holds() {
        let mut l = Exp3S::exp3(3, 0.3, 1.0).unwrap();
        for t in 1..=2000 {
            l.act(t);
            l.observe(t, 0, 1.0);
        }
        let p = l.act(2001);
        assert!(p.iter().all(|&x| x >= 0.1 - 1e-12));
        assert!(p[0] > 0.7);
    }

    #[test]
    fn reset_restores_fresh_state() {
        let fresh = Exp3S::new(2, 0.1, 0.01, 1.0).unwrap();
        let mut l = fresh.clone();
        l.act(1);
        l.observe(1, 1, 0.3);
        assert_ne!(l, fresh);
        l.reset();
        assert_eq!(l, fresh);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Exp3S::new(2, 0.0, 0.0, 1.0).is_err());
        assert!(Exp3S::new(2, 0.5, -1.0, 1.0).is_err());
        assert!(Exp3S::new(1, 0.5, 0.0, 1.0).is_err());
    }
}
