use serde::{Deserialize, Serialize};

use super::space::{ActionSpace, Outcome};
use crate::error::{invalid, Result};

/// One-shot N-player game: a payoff vector per player over the lexicographic
/// outcome order, bounded in absolute value by `bound`.
///
/// Equality is exact floating-point equality of every payoff entry, which is
/// the change test used when counting the variation of a sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StageGameDoc", into = "StageGameDoc")]
pub struct StageGame {
    space: ActionSpace,
    payoffs: Vec<Vec<f64>>,
    bound: f64,
}

impl StageGame {
    pub fn new(space: ActionSpace, payoffs: Vec<Vec<f64>>, bound: f64) -> Result<Self> {
        if !(bound.is_finite() && bound > 0.0) {
            return invalid(format!("payoff bound must be positive and finite, got {bound}"));
        }
        if payoffs.len() != space.num_players() {
            return invalid(format!(
                "expected payoffs for {} players, got {}",
                space.num_players(),
                payoffs.len()
            ));
        }
        for (i, row) in payoffs.iter().enumerate() {
            if row.len() != space.outcome_count() {
                return invalid(format!(
                    "player {i}: expected {} payoffs, got {}",
                    space.outcome_count(),
                    row.len()
                ));
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite() || v.abs() > bound) {
                return invalid(format!("player {i}: payoff {v} outside [-{bound}, {bound}]"));
            }
        }
        Ok(Self {
            space,
            payoffs,
            bound,
        })
    }

    /// Builds a game with the bound set to the largest absolute payoff.
    pub fn with_tight_bound(space: ActionSpace, payoffs: Vec<Vec<f64>>) -> Result<Self> {
        let bound = payoffs
            .iter()
            .flatten()
            .fold(0.0_f64, |m, v| m.max(v.abs()));
        Self::new(space, payoffs, if bound > 0.0 { bound } else { 1.0 })
    }

    /// Two-player game from row-player and column-player matrices.
    pub fn bimatrix(row: &[Vec<f64>], col: &[Vec<f64>], bound: f64) -> Result<Self> {
        let k1 = row.len();
        let k2 = row.first().map_or(0, Vec::len);
        if col.len() != k1 || row.iter().chain(col).any(|r| r.len() != k2) {
            return invalid("bimatrix payoff tables must share one shape");
        }
        let space = ActionSpace::new(vec![k1, k2])?;
        let p1 = row.iter().flatten().copied().collect();
        let p2 = col.iter().flatten().copied().collect();
        Self::new(space, vec![p1, p2], bound)
    }

    pub fn space(&self) -> &ActionSpace {
        &self.space
    }

    pub fn num_players(&self) -> usize {
        self.space.num_players()
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn payoff(&self, player: usize, outcome: usize) -> f64 {
        self.payoffs[player][outcome]
    }

    pub fn payoff_at(&self, player: usize, outcome: &Outcome) -> Result<f64> {
        if player >= self.num_players() {
            return invalid(format!("player {player} out of range"));
        }
        if outcome.index >= self.space.outcome_count()
            || self.space.index(&outcome.actions)? != outcome.index
        {
            return invalid("outcome index inconsistent with its actions");
        }
        Ok(self.payoffs[player][outcome.index])
    }

    pub fn payoffs(&self, player: usize) -> &[f64] {
        &self.payoffs[player]
    }

    /// `u^i(x, a^{-i})` where `a^{-i}` is read from `outcome`.
    pub fn deviation_payoff(&self, player: usize, action: usize, outcome: usize) -> f64 {
        self.payoffs[player][self.space.with_action(outcome, player, action)]
    }

    pub(crate) fn replace_payoffs(&self, player: usize, payoffs: Vec<f64>, bound: f64) -> Result<Self> {
        let mut all = self.payoffs.clone();
        all[player] = payoffs;
        Self::new(self.space.clone(), all, bound)
    }
}

#[derive(Serialize, Deserialize)]
struct StageGameDoc {
    players: usize,
    actions: Vec<usize>,
    #[serde(rename = "M")]
    bound: f64,
    payoffs: Vec<Vec<f64>>,
}

impl TryFrom<StageGameDoc> for StageGame {
    type Error = crate::Error;

    fn try_from(doc: StageGameDoc) -> Result<Self> {
        if doc.players != doc.actions.len() {
            return invalid(format!(
                "players = {} but {} action counts given",
                doc.players,
                doc.actions.len()
            ));
        }
        StageGame::new(ActionSpace::new(doc.actions)?, doc.payoffs, doc.bound)
    }
}

impl From<StageGame> for StageGameDoc {
    fn from(g: StageGame) -> Self {
        StageGameDoc {
            players: g.num_players(),
            actions: g.space.actions_per_player().to_vec(),
            bound: g.bound,
            payoffs: g.payoffs,
        }
    }
}

/// Per-player actions that are best replies against every opponent profile,
/// lowest index on ties; `None` where no such action exists.
pub fn single_best_reply(game: &StageGame) -> Vec<Option<usize>> {
    (0..game.num_players())
        .map(|i| dominant_action(game, i, false))
        .collect()
}

/// True iff every player has a weakly dominant action.
pub fn has_single_best_reply(game: &StageGame) -> bool {
    single_best_reply(game).iter().all(Option::is_some)
}

/// Action strictly better than every alternative against every opponent profile.
pub fn strictly_dominant_action(game: &StageGame, player: usize) -> Option<usize> {
    dominant_action(game, player, true)
}

fn dominant_action(game: &StageGame, player: usize, strict: bool) -> Option<usize> {
    let space = game.space();
    let k = space.actions(player);
    // Every outcome where `player` plays 0 identifies one opponent profile.
    let profiles: Vec<usize> = (0..space.outcome_count())
        .filter(|&o| space.action_of(o, player) == 0)
        .collect();
    (0..k).find(|&x| {
        profiles.iter().all(|&o| {
            let ux = game.deviation_payoff(player, x, o);
            (0..k).filter(|&y| y != x).all(|y| {
                let uy = game.deviation_payoff(player, y, o);
                if strict {
                    ux > uy
                } else {
                    ux >= uy
                }
            })
        })
    })
}
