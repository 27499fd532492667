use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::game::builders::{counterexample_sequence, example1_sequence};
use crate::game::{GameSequence, PayoffNoise, StageGame};
use crate::geometry::{EquilibriumKind, Norm};
use crate::learners::{LearnerSpec, SwitchBudget};
use crate::welfare::WelfareFunction;

/// Game sequence as a function of the horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SequenceSpec {
    /// The two-seller pricing season with a mid-season shift.
    Example1 {
        #[serde(default = "one")]
        customers: f64,
    },
    /// The two-game counterexample with constant column payoff `epsilon`.
    Counterexample { epsilon: f64 },
    Repeated { game: StageGame },
    /// Batches with lengths proportional to `weights`; the last batch takes the
    /// rounding remainder.
    Proportional { games: Vec<StageGame>, weights: Vec<f64> },
    /// A fully specified sequence; its horizon is the only valid one.
    Fixed { sequence: GameSequence },
}

fn one() -> f64 {
    1.0
}

impl SequenceSpec {
    pub fn build(&self, horizon: usize, noise: Option<PayoffNoise>) -> Result<GameSequence> {
        if horizon == 0 {
            return invalid("horizon must be positive");
        }
        let seq = match self {
            SequenceSpec::Example1 { customers } => example1_sequence(horizon, *customers)?,
            SequenceSpec::Counterexample { epsilon } => counterexample_sequence(horizon, *epsilon)?,
            SequenceSpec::Repeated { game } => GameSequence::repeated(game.clone(), horizon)?,
            SequenceSpec::Proportional { games, weights } => {
                if games.is_empty() || games.len() != weights.len() {
                    return invalid("proportional sequence needs one weight per game");
                }
                if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
                    return invalid("batch weights must be positive");
                }
                let total: f64 = weights.iter().sum();
                let mut used = 0;
                let mut pieces = Vec::with_capacity(games.len());
                for (j, (g, w)) in games.iter().zip(weights).enumerate() {
                    let len = if j + 1 == games.len() {
                        horizon - used
                    } else {
                        (horizon as f64 * w / total).floor() as usize
                    };
                    if len == 0 {
                        return invalid(format!("horizon {horizon} leaves batch {} empty", j + 1));
                    }
                    used += len;
                    pieces.push((g.clone(), len));
                }
                GameSequence::from_pieces(pieces)?
            }
            SequenceSpec::Fixed { sequence } => {
                if sequence.horizon() != horizon {
                    return invalid(format!(
                        "fixed sequence has horizon {}, requested {horizon}",
                        sequence.horizon()
                    ));
                }
                sequence.clone()
            }
        };
        match noise {
            Some(n) => seq.with_noise(n),
            None => Ok(seq),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceEstimator {
    /// Distance of the replication-averaged batch distribution.
    #[default]
    MeanDistribution,
    /// Replication mean of per-replication distances.
    MeanDistance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackingMetric {
    pub kind: EquilibriumKind,
    pub norm: Norm,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default)]
    pub estimator: DistanceEstimator,
}

impl Default for TrackingMetric {
    fn default() -> Self {
        Self {
            kind: EquilibriumKind::Hannan,
            norm: Norm::L2,
            epsilon: 0.0,
            estimator: DistanceEstimator::MeanDistribution,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metrics {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tracking: Option<TrackingMetric>,
    /// Dynamic external regret against the given switch budget.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub external_regret: Option<SwitchBudget>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub internal_regret: Option<SwitchBudget>,
    #[serde(default)]
    pub clipped_regret: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub welfare: Option<WelfareFunction>,
}

/// A complete, serializable experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub sequence: SequenceSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<PayoffNoise>,
    pub learners: Vec<LearnerSpec>,
    pub replications: usize,
    pub seed: u64,
    pub grid: Vec<usize>,
    #[serde(default)]
    pub metrics: Metrics,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return invalid("replications must be at least 1");
        }
        if self.grid.is_empty() {
            return invalid("horizon grid is empty");
        }
        if self.grid.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("horizon grid must be strictly increasing");
        }
        let seq = self.sequence.build(self.grid[0], self.noise)?;
        if self.learners.len() != seq.num_players() {
            return invalid(format!(
                "{} learners for a {}-player game",
                self.learners.len(),
                seq.num_players()
            ));
        }
        Ok(())
    }
}
