use serde::{Deserialize, Serialize};

use super::tuning::exp3s_fixed_budget_tuning;
use super::{point_mass, Exp3S, Learner};
use crate::error::{invalid, Result};
use crate::game::{single_best_reply, GameSequence};

/// Feedback-independent action schedules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "script", rename_all = "snake_case")]
pub enum Script {
    Constant { action: usize },
    /// Cycles through `actions`, one per period.
    Sequence { actions: Vec<usize> },
    /// In each batch, the player's single best reply of that batch's game.
    BatchBestReply,
    /// Cycles through all actions, switching `switches` times at evenly
    /// spaced periods.
    Switching { switches: usize },
    /// The counterexample column script: action 0 for `t <= ceil(T/4)`, then action 1.
    CounterexampleColumn,
}

/// Plays a fixed [`Script`] and ignores feedback.
#[derive(Debug, Clone)]
pub struct Scripted {
    actions: usize,
    plan: Plan,
    probs: Vec<f64>,
}

#[derive(Debug, Clone)]
enum Plan {
    Cycle(Vec<usize>),
    /// `(last period, action)` pieces in order.
    Pieces(Vec<(usize, usize)>),
}

impl Scripted {
    pub fn new(script: &Script, sequence: &GameSequence, player: usize) -> Result<Self> {
        let k = sequence.space().actions(player);
        let horizon = sequence.horizon();
        let check = |a: usize| {
            if a < k {
                Ok(a)
            } else {
                invalid(format!("scripted action {a} out of range ({k} actions)"))
            }
        };
        let plan = match script {
            Script::Constant { action } => Plan::Cycle(vec![check(*action)?]),
            Script::Sequence { actions } => {
                if actions.is_empty() {
                    return invalid("scripted sequence is empty");
                }
                Plan::Cycle(actions.iter().map(|&a| check(a)).collect::<Result<_>>()?)
            }
            Script::BatchBestReply => {
                let mut pieces = Vec::new();
                for b in sequence.segment_batches() {
                    let game = sequence.stage(b.start);
                    match single_best_reply(game)[player] {
                        Some(a) => pieces.push((b.end, a)),
                        None => {
                            return invalid(format!(
                                "player {player} has no single best reply in the batch starting at {}",
                                b.start
                            ))
                        }
                    }
                }
                Plan::Pieces(pieces)
            }
            Script::Switching { switches } => {
                if *switches >= horizon {
                    return invalid(format!("{switches} switches do not fit in {horizon} periods"));
                }
                let blocks = switches + 1;
                Plan::Pieces(
                    (1..=blocks)
                        .map(|j| (j * horizon / blocks, (j - 1) % k))
                        .collect(),
                )
            }
            Script::CounterexampleColumn => {
                if k != 2 {
                    return invalid("the counterexample script needs two actions");
                }
                Plan::Pieces(vec![(horizon.div_ceil(4), 0), (usize::MAX, 1)])
            }
        };
        Ok(Self {
            actions: k,
            plan,
            probs: vec![0.0; k],
        })
    }

    pub fn action_at(&self, t: usize) -> usize {
        match &self.plan {
            Plan::Cycle(a) => a[(t - 1) % a.len()],
            Plan::Pieces(p) => p
                .iter()
                .find(|&&(end, _)| t <= end)
                .or(p.last())
                .map(|&(_, a)| a)
                .expect("pieces are non-empty"),
        }
    }
}

impl Learner for Scripted {
    fn num_actions(&self) -> usize {
        self.actions
    }

    fn act(&mut self, t: usize) -> &[f64] {
        self.probs = point_mass(self.actions, self.action_at(t));
        &self.probs
    }

    fn observe(&mut self, _t: usize, _action: usize, _payoff: f64) {}

    fn reset(&mut self) {}
}

/// The feedback-dependent row policy of the counterexample, for horizon `T`
/// with `q = ceil(T/4)`.
///
/// Plays action 0 while `t <= q`, then action 1, as long as the previous
/// payoff is consistent with the column script (non-negative through `2q + 1`,
/// non-positive afterwards). The first inconsistency at period `d` hands
/// control for good to Exp3S tuned for the remaining `T - d + 1` periods.
#[derive(Debug, Clone)]
pub struct CounterexampleRow {
    horizon: usize,
    bound: f64,
    last_payoff: f64,
    fallback: Option<(usize, Exp3S)>,
    probs: Vec<f64>,
    restarts: Vec<usize>,
}

impl CounterexampleRow {
    pub fn new(horizon: usize, bound: f64) -> Result<Self> {
        if horizon < 4 {
            return invalid("the counterexample policy needs T >= 4");
        }
        Ok(Self {
            horizon,
            bound,
            last_payoff: 0.0,
            fallback: None,
            probs: vec![0.0; 2],
            restarts: Vec::new(),
        })
    }

    /// Period at which Exp3S took over, if it did.
    pub fn deviated_at(&self) -> Option<usize> {
        self.fallback.as_ref().map(|(d, _)| *d)
    }

    fn scripted(&self, t: usize) -> Option<usize> {
        let q = self.horizon.div_ceil(4);
        let u = self.last_payoff;
        match t {
            _ if t <= q && u >= 0.0 => Some(0),
            _ if t <= 2 * q + 1 && t > q && u >= 0.0 => Some(1),
            _ if t > 2 * q + 1 && u <= 0.0 => Some(1),
            _ => None,
        }
    }
}

impl Learner for CounterexampleRow {
    fn num_actions(&self) -> usize {
        2
    }

    fn act(&mut self, t: usize) -> &[f64] {
        if self.fallback.is_none() {
            match self.scripted(t) {
                Some(a) => {
                    self.probs = point_mass(2, a);
                    return &self.probs;
                }
                None => {
                    let remaining = self.horizon.saturating_sub(t) + 1;
                    let (gamma, alpha) = exp3s_fixed_budget_tuning(remaining, 2, 1.0);
                    let exp3s = Exp3S::new(2, gamma, alpha, self.bound).expect("valid tuning");
                    self.fallback = Some((t, exp3s));
                    self.restarts.push(t);
                }
            }
        }
        let (d, exp3s) = self.fallback.as_mut().expect("fallback active");
        exp3s.act(t - *d + 1)
    }

    fn observe(&mut self, t: usize, action: usize, payoff: f64) {
        match &mut self.fallback {
            Some((d, exp3s)) => exp3s.observe(t - *d + 1, action, payoff),
            None => self.last_payoff = payoff,
        }
    }

    fn reset(&mut self) {
        self.last_payoff = 0.0;
        self.fallback = None;
        self.restarts.clear();
    }

    fn restarts(&self) -> &[usize] {
        &self.restarts
    }
}
