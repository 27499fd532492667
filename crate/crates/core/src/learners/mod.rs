//! Bandit-feedback learners.
//!
//! A learner sees only its own realized payoff. Each period the engine calls
//! [`Learner::act`] to get a mixed action, samples from it, and reports the
//! result through [`Learner::observe`].

mod exp3;
mod exp3p;
mod regret_matching;
mod restart;
mod scripted;
mod spec;
mod trigger;
pub mod tuning;

pub use exp3::Exp3S;
pub use exp3p::{Exp3P, Rexp3P};
pub use regret_matching::RegretMatching;
pub use restart::RestartWrapper;
pub use scripted::{CounterexampleRow, Script, Scripted};
pub use spec::{BuildContext, LearnerSpec};
pub use trigger::{TargetDistribution, TriggerPolicy};
pub use tuning::{SwitchBudget, Tuning};

use crate::error::{Error, Result};

pub trait Learner: Send + std::fmt::Debug {
    fn num_actions(&self) -> usize;

    /// Mixed action for period `t` (1-based, local to this learner's clock).
    fn act(&mut self, t: usize) -> &[f64];

    /// Feedback for period `t`: the sampled action and its realized payoff.
    fn observe(&mut self, t: usize, action: usize, payoff: f64);

    /// Returns to the state right after construction.
    fn reset(&mut self);

    /// Periods at which internal restarts fired, for diagnostics.
    fn restarts(&self) -> &[usize] {
        &[]
    }
}

/// Affine map from `[-M, M]` onto `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PayoffScale {
    bound: f64,
}

impl PayoffScale {
    pub fn new(bound: f64) -> Self {
        debug_assert!(bound > 0.0);
        Self { bound }
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn to_unit(&self, payoff: f64) -> f64 {
        ((payoff + self.bound) / (2.0 * self.bound)).clamp(0.0, 1.0)
    }
}

/// Checks that `p` is a probability vector of length `k`.
pub fn check_distribution(p: &[f64], k: usize) -> Result<()> {
    if p.len() != k {
        return Err(Error::Invariant(format!(
            "mixed action has {} entries, expected {k}",
            p.len()
        )));
    }
    let mut sum = 0.0;
    for &x in p {
        if !(x >= -1e-12 && x.is_finite()) {
            return Err(Error::Invariant(format!("invalid probability {x} in {p:?}")));
        }
        sum += x;
    }
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::Invariant(format!("probabilities sum to {sum}")));
    }
    Ok(())
}

/// Inverse-CDF sampling with a single uniform draw `u` in `[0, 1)`.
///
/// Never returns an index with zero probability, even when the cumulative sum
/// falls short of 1 by rounding.
pub fn sample_index(p: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (k, &x) in p.iter().enumerate() {
        if x <= 0.0 {
            continue;
        }
        acc += x;
        last = k;
        if u < acc {
            return k;
        }
    }
    last
}

pub(crate) fn uniform(k: usize) -> Vec<f64> {
    vec![1.0 / k as f64; k]
}

pub(crate) fn point_mass(k: usize, action: usize) -> Vec<f64> {
    let mut p = vec![0.0; k];
    p[action] = 1.0;
    p
}
