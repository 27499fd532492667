use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{point_mass, Learner};
use crate::error::{invalid, Result};
use crate::game::{is_injective_for, StageGame};

/// Absolute payoff difference treated as evidence of a deviation.
pub const DETECTION_TOLERANCE: f64 = 1e-9;

/// A correlated distribution with rational weights `counts[s] / m` on the
/// outcomes in `support` (given as joint actions).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetDistribution {
    pub support: Vec<Vec<usize>>,
    pub counts: Vec<u64>,
}

impl TargetDistribution {
    /// Outcome indices of one full cycle: each support outcome repeated by its
    /// count, support sorted lexicographically.
    pub fn schedule(&self, game: &StageGame) -> Result<Vec<usize>> {
        if self.support.is_empty() {
            return invalid("target distribution has empty support");
        }
        if self.support.len() != self.counts.len() {
            return invalid(format!(
                "{} support outcomes but {} counts",
                self.support.len(),
                self.counts.len()
            ));
        }
        if self.counts.contains(&0) {
            return invalid("target distribution counts must be positive");
        }
        let mut entries = Vec::with_capacity(self.support.len());
        for (a, &c) in self.support.iter().zip(&self.counts) {
            entries.push((game.space().index(a)?, c));
        }
        entries.sort_unstable();
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return invalid("target distribution lists an outcome twice");
        }
        let total: u64 = self.counts.iter().sum();
        if total > 1 << 24 {
            return invalid(format!("cycle length {total} is too long"));
        }
        Ok(entries
            .into_iter()
            .flat_map(|(o, c)| std::iter::repeat_n(o, c as usize))
            .collect())
    }

    /// Probability vector over all outcomes of `game`.
    pub fn probabilities(&self, game: &StageGame) -> Result<Vec<f64>> {
        let schedule = self.schedule(game)?;
        let mut p = vec![0.0; game.space().outcome_count()];
        let w = 1.0 / schedule.len() as f64;
        for o in schedule {
            p[o] += w;
        }
        Ok(p)
    }
}

/// Cycles deterministically through the target's schedule until a payoff
/// differs from the scheduled one, then hands control to `fallback`,
/// reset at the detection and fed time counted from the period after it.
#[derive(Debug)]
pub struct TriggerPolicy {
    game: Arc<StageGame>,
    player: usize,
    schedule: Vec<usize>,
    fallback: Box<dyn Learner>,
    detected: Option<usize>,
    probs: Vec<f64>,
    restarts: Vec<usize>,
}

impl TriggerPolicy {
    /// With `require_injective`, construction fails unless every payoff of
    /// `player` identifies the opponents' profile, so any deviation is caught.
    pub fn new(
        game: Arc<StageGame>,
        player: usize,
        target: &TargetDistribution,
        fallback: Box<dyn Learner>,
        require_injective: bool,
    ) -> Result<Self> {
        if player >= game.num_players() {
            return invalid(format!("player {player} out of range"));
        }
        let k = game.space().actions(player);
        if fallback.num_actions() != k {
            return invalid("fallback learner has the wrong number of actions");
        }
        if require_injective && !is_injective_for(&game, player) {
            return invalid(format!(
                "payoffs of player {player} are not injective; apply make_injective first"
            ));
        }
        let schedule = target.schedule(&game)?;
        Ok(Self {
            game,
            player,
            schedule,
            fallback,
            detected: None,
            probs: vec![0.0; k],
            restarts: Vec::new(),
        })
    }

    pub fn detected_at(&self) -> Option<usize> {
        self.detected
    }

    pub fn cycle_len(&self) -> usize {
        self.schedule.len()
    }

    pub fn scheduled_outcome(&self, t: usize) -> usize {
        self.schedule[(t - 1) % self.schedule.len()]
    }
}

impl Learner for TriggerPolicy {
    fn num_actions(&self) -> usize {
        self.probs.len()
    }

    fn act(&mut self, t: usize) -> &[f64] {
        match self.detected {
            Some(d) if t > d => self.fallback.act(t - d),
            _ => {
                let o = self.scheduled_outcome(t);
                self.probs = point_mass(self.probs.len(), self.game.space().action_of(o, self.player));
                &self.probs
            }
        }
    }

    fn observe(&mut self, t: usize, action: usize, payoff: f64) {
        match self.detected {
            Some(d) if t > d => self.fallback.observe(t - d, action, payoff),
            Some(_) => {}
            None => {
                let expected = self.game.payoff(self.player, self.scheduled_outcome(t));
                if (payoff - expected).abs() > DETECTION_TOLERANCE {
                    self.detected = Some(t);
                    self.fallback.reset();
                    self.restarts.push(t);
                }
            }
        }
    }

    fn reset(&mut self) {
        self.detected = None;
        self.fallback.reset();
        self.restarts.clear();
    }

    fn restarts(&self) -> &[usize] {
        &self.restarts
    }
}
