use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Per-player action counts of a finite normal-form game.
///
/// Outcomes are ranked lexicographically: player 0 is the most significant
/// digit, the last player the least significant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct ActionSpace {
    actions: Vec<usize>,
    strides: Vec<usize>,
    outcome_count: usize,
}

impl ActionSpace {
    pub fn new(actions_per_player: Vec<usize>) -> Result<Self> {
        if actions_per_player.is_empty() {
            return invalid("a game needs at least one player");
        }
        if let Some((i, &k)) = actions_per_player.iter().enumerate().find(|(_, &k)| k < 2) {
            return invalid(format!("player {i} has {k} actions; at least two are required"));
        }
        let mut strides = vec![1; actions_per_player.len()];
        for i in (0..actions_per_player.len() - 1).rev() {
            strides[i] = strides[i + 1] * actions_per_player[i + 1];
        }
        let outcome_count = strides[0] * actions_per_player[0];
        Ok(Self {
            actions: actions_per_player,
            strides,
            outcome_count,
        })
    }

    pub fn num_players(&self) -> usize {
        self.actions.len()
    }

    pub fn actions(&self, player: usize) -> usize {
        self.actions[player]
    }

    pub fn actions_per_player(&self) -> &[usize] {
        &self.actions
    }

    pub fn outcome_count(&self) -> usize {
        self.outcome_count
    }

    /// Number of opponent profiles `|A^{-i}|`.
    pub fn opponent_profiles(&self, player: usize) -> usize {
        self.outcome_count / self.actions[player]
    }

    pub fn index(&self, actions: &[usize]) -> Result<usize> {
        if actions.len() != self.actions.len() {
            return invalid(format!(
                "outcome has {} entries, game has {} players",
                actions.len(),
                self.actions.len()
            ));
        }
        let mut idx = 0;
        for (i, (&a, &k)) in actions.iter().zip(&self.actions).enumerate() {
            if a >= k {
                return invalid(format!("action {a} out of range for player {i} ({k} actions)"));
            }
            idx += a * self.strides[i];
        }
        Ok(idx)
    }

    pub fn decode(&self, index: usize) -> Vec<usize> {
        debug_assert!(index < self.outcome_count);
        self.actions
            .iter()
            .zip(&self.strides)
            .map(|(&k, &s)| (index / s) % k)
            .collect()
    }

    pub fn action_of(&self, index: usize, player: usize) -> usize {
        (index / self.strides[player]) % self.actions[player]
    }

    /// Outcome reached when `player` switches to `action` and everyone else
    /// keeps playing as in `index`.
    pub fn with_action(&self, index: usize, player: usize, action: usize) -> usize {
        let current = self.action_of(index, player);
        index + action * self.strides[player] - current * self.strides[player]
    }

    /// Lexicographic rank of the opponents' profile in `index`, i.e. the
    /// outcome index with `player` removed.
    pub fn opponent_rank(&self, index: usize, player: usize) -> usize {
        let mut rank = 0;
        for j in 0..self.actions.len() {
            if j == player {
                continue;
            }
            rank = rank * self.actions[j] + self.action_of(index, j);
        }
        rank
    }

    pub fn outcome(&self, index: usize) -> Result<Outcome> {
        if index >= self.outcome_count {
            return invalid(format!(
                "outcome index {index} out of range ({} outcomes)",
                self.outcome_count
            ));
        }
        Ok(Outcome {
            actions: self.decode(index),
            index,
        })
    }
}

impl TryFrom<Vec<usize>> for ActionSpace {
    type Error = crate::Error;

    fn try_from(value: Vec<usize>) -> Result<Self> {
        ActionSpace::new(value)
    }
}

impl From<ActionSpace> for Vec<usize> {
    fn from(space: ActionSpace) -> Self {
        space.actions
    }
}

/// A joint action together with its lexicographic rank.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Outcome {
    pub actions: Vec<usize>,
    pub index: usize,
}
