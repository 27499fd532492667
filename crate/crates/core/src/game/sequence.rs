use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use super::space::{ActionSpace, Outcome};
use super::stage::StageGame;
use crate::error::{invalid, Result};

/// Additive i.i.d. payoff noise, clipped to `[-M, M]` after it is added.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PayoffNoise {
    Uniform { half_width: f64 },
    Gaussian { std_dev: f64 },
}

impl PayoffNoise {
    fn validate(&self) -> Result<()> {
        let scale = match *self {
            PayoffNoise::Uniform { half_width } => half_width,
            PayoffNoise::Gaussian { std_dev } => std_dev,
        };
        if !(scale.is_finite() && scale >= 0.0) {
            return invalid(format!("noise scale must be finite and non-negative, got {scale}"));
        }
        Ok(())
    }

    /// Realized payoff: `mean` plus a draw, clipped to `[-bound, bound]`.
    pub fn realize<R: Rng + ?Sized>(&self, mean: f64, bound: f64, rng: &mut R) -> f64 {
        let draw = match *self {
            PayoffNoise::Uniform { half_width } if half_width > 0.0 => {
                Uniform::new_inclusive(-half_width, half_width)
                    .expect("validated width")
                    .sample(rng)
            }
            PayoffNoise::Gaussian { std_dev } if std_dev > 0.0 => {
                Normal::new(0.0, std_dev).expect("validated std").sample(rng)
            }
            _ => 0.0,
        };
        (mean + draw).clamp(-bound, bound)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub game: Arc<StageGame>,
    pub length: usize,
    pub noise: Option<PayoffNoise>,
}

/// Inclusive 1-based period range `[start, end]` on which the stage game is constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Batch {
    pub start: usize,
    pub end: usize,
}

impl Batch {
    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, t: usize) -> bool {
        (self.start..=self.end).contains(&t)
    }
}

/// Horizon-indexed stage games stored as run-length segments in canonical
/// form: adjacent segments always differ, either in payoffs or in noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SequenceDoc", into = "SequenceDoc")]
pub struct GameSequence {
    space: ActionSpace,
    segments: Vec<Segment>,
    horizon: usize,
    /// First period of each segment, for O(log V) period lookup.
    starts: Vec<usize>,
}

impl GameSequence {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let Some(first) = segments.first() else {
            return invalid("a game sequence needs at least one segment");
        };
        let space = first.game.space().clone();
        let mut canonical: Vec<Segment> = Vec::with_capacity(segments.len());
        for seg in segments {
            if seg.game.space() != &space {
                return invalid("all stage games in a sequence must share one action space");
            }
            if let Some(noise) = &seg.noise {
                noise.validate()?;
            }
            if seg.length == 0 {
                continue;
            }
            match canonical.last_mut() {
                Some(last) if *last.game == *seg.game && last.noise == seg.noise => {
                    last.length += seg.length;
                }
                _ => canonical.push(seg),
            }
        }
        if canonical.is_empty() {
            return invalid("a game sequence needs a positive horizon");
        }
        let mut starts = Vec::with_capacity(canonical.len());
        let mut t = 1;
        for seg in &canonical {
            starts.push(t);
            t += seg.length;
        }
        Ok(Self {
            space,
            segments: canonical,
            horizon: t - 1,
            starts,
        })
    }

    /// The same stage game for all `horizon` periods.
    pub fn repeated(game: StageGame, horizon: usize) -> Result<Self> {
        Self::new(vec![Segment {
            game: Arc::new(game),
            length: horizon,
            noise: None,
        }])
    }

    /// Builds a sequence from `(game, length)` pieces without noise.
    pub fn from_pieces(pieces: Vec<(StageGame, usize)>) -> Result<Self> {
        Self::new(
            pieces
                .into_iter()
                .map(|(g, length)| Segment {
                    game: Arc::new(g),
                    length,
                    noise: None,
                })
                .collect(),
        )
    }

    pub fn with_noise(mut self, noise: PayoffNoise) -> Result<Self> {
        for seg in &mut self.segments {
            seg.noise = Some(noise);
        }
        Self::new(self.segments)
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn space(&self) -> &ActionSpace {
        &self.space
    }

    pub fn num_players(&self) -> usize {
        self.space.num_players()
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Largest payoff bound across segments.
    pub fn bound(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| s.game.bound())
            .fold(0.0, f64::max)
    }

    pub fn segment_index(&self, t: usize) -> usize {
        debug_assert!((1..=self.horizon).contains(&t));
        self.starts.partition_point(|&s| s <= t) - 1
    }

    /// Stage game in force at period `t` (1-based).
    pub fn stage(&self, t: usize) -> &StageGame {
        &self.segments[self.segment_index(t)].game
    }

    pub fn noise_at(&self, t: usize) -> Option<PayoffNoise> {
        self.segments[self.segment_index(t)].noise
    }

    /// Deterministic (mean) payoff `u^i_t(a)`.
    pub fn payoff(&self, t: usize, player: usize, outcome: &Outcome) -> Result<f64> {
        if !(1..=self.horizon).contains(&t) {
            return invalid(format!("period {t} outside [1, {}]", self.horizon));
        }
        self.stage(t).payoff_at(player, outcome)
    }

    /// Number of periods at which the stage game (or its noise law) changes.
    pub fn variation(&self) -> usize {
        self.segments.len() - 1
    }

    /// Maximal constant runs covering `[1, T]`; always `variation() + 1` batches.
    pub fn segment_batches(&self) -> Vec<Batch> {
        self.segments
            .iter()
            .zip(&self.starts)
            .map(|(seg, &start)| Batch {
                start,
                end: start + seg.length - 1,
            })
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct SequenceDoc {
    players: usize,
    actions: Vec<usize>,
    #[serde(rename = "M")]
    bound: f64,
    segments: Vec<SegmentDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    noise: Option<PayoffNoise>,
}

#[derive(Serialize, Deserialize)]
struct SegmentDoc {
    length: usize,
    payoffs: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    noise: Option<PayoffNoise>,
}

impl TryFrom<SequenceDoc> for GameSequence {
    type Error = crate::Error;

    fn try_from(doc: SequenceDoc) -> Result<Self> {
        if doc.players != doc.actions.len() {
            return invalid(format!(
                "players = {} but {} action counts given",
                doc.players,
                doc.actions.len()
            ));
        }
        let space = ActionSpace::new(doc.actions)?;
        let segments = doc
            .segments
            .into_iter()
            .map(|s| {
                Ok(Segment {
                    game: Arc::new(StageGame::new(space.clone(), s.payoffs, doc.bound)?),
                    length: s.length,
                    noise: s.noise.or(doc.noise),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        GameSequence::new(segments)
    }
}

impl From<GameSequence> for SequenceDoc {
    fn from(seq: GameSequence) -> Self {
        let bound = seq.bound();
        SequenceDoc {
            players: seq.num_players(),
            actions: seq.space.actions_per_player().to_vec(),
            bound,
            noise: None,
            segments: seq
                .segments
                .iter()
                .map(|s| SegmentDoc {
                    length: s.length,
                    payoffs: (0..s.game.num_players())
                        .map(|i| s.game.payoffs(i).to_vec())
                        .collect(),
                    noise: s.noise,
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::builders::matching_pennies;
    use rand::SeedableRng;

    fn constant_game(c: f64) -> StageGame {
        let space = ActionSpace::new(vec![2, 2]).unwrap();
        StageGame::new(space, vec![vec![c; 4], vec![c; 4]], 1.0).unwrap()
    }

    #[test]
    fn constant_sequence_has_one_batch() {
        let seq = GameSequence::repeated(constant_game(0.0), 10).unwrap();
        assert_eq!(seq.variation(), 0);
        assert_eq!(seq.segment_batches(), vec![Batch { start: 1, end: 10 }]);
        let o = seq.space().outcome(3).unwrap();
        assert_eq!(seq.payoff(7, 1, &o).unwrap(), 0.0);
    }

    #[test]
    fn recurring_games_count_every_change() {
        let a = constant_game(0.0);
        let b = constant_game(0.5);
        let seq = GameSequence::from_pieces(vec![(a.clone(), 1), (b.clone(), 1), (a.clone(), 1)]).unwrap();
        assert_eq!(seq.horizon(), 3);
        assert_eq!(seq.variation(), 2);

        let seq = GameSequence::from_pieces(vec![(a.clone(), 3), (b, 4), (a, 3)]).unwrap();
        assert_eq!(
            seq.segment_batches(),
            vec![
                Batch { start: 1, end: 3 },
                Batch { start: 4, end: 7 },
                Batch { start: 8, end: 10 }
            ]
        );
    }

    #[test]
    fn adjacent_equal_segments_merge() {
        let a = constant_game(0.25);
        let seq = GameSequence::from_pieces(vec![(a.clone(), 2), (a.clone(), 3), (a, 0)]).unwrap();
        assert_eq!(seq.segments().len(), 1);
        assert_eq!(seq.horizon(), 5);
    }

    #[test]
    fn noise_changes_count_as_variation() {
        let g = matching_pennies();
        let seq = GameSequence::new(vec![
            Segment { game: Arc::new(g.clone()), length: 3, noise: None },
            Segment {
                game: Arc::new(g.clone()),
                length: 3,
                noise: Some(PayoffNoise::Gaussian { std_dev: 0.1 }),
            },
            Segment {
                game: Arc::new(g),
                length: 3,
                noise: Some(PayoffNoise::Gaussian { std_dev: 0.1 }),
            },
        ])
        .unwrap();
        assert_eq!(seq.variation(), 1);
        // The accessor still reports the mean payoff.
        let o = seq.space().outcome(0).unwrap();
        assert_eq!(seq.payoff(5, 0, &o).unwrap(), 1.0);
    }

    #[test]
    fn realized_noise_is_clipped() {
        let noise = PayoffNoise::Uniform { half_width: 10.0 };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let v = noise.realize(0.9, 1.0, &mut rng);
            assert!((-1.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn out_of_range_period_is_an_error() {
        let seq = GameSequence::repeated(constant_game(0.0), 4).unwrap();
        let o = seq.space().outcome(0).unwrap();
        assert!(seq.payoff(0, 0, &o).is_err());
        assert!(seq.payoff(5, 0, &o).is_err());
        assert!(seq.payoff(1, 2, &o).is_err());
    }

    #[test]
    fn json_document_round_trip() {
        let json = r#"{
            "players": 2, "actions": [2, 2], "M": 1.0,
            "segments": [
                {"length": 5, "payoffs": [[1,-1,-1,1],[-1,1,1,-1]]},
                {"length": 5, "payoffs": [[0,0,0,0],[0,0,0,0]]}
            ],
            "noise": {"kind": "uniform", "half_width": 0.1}
        }"#;
        let seq: GameSequence = serde_json::from_str(json).unwrap();
        assert_eq!(seq.horizon(), 10);
        assert_eq!(seq.variation(), 1);
        assert_eq!(seq.noise_at(7), Some(PayoffNoise::Uniform { half_width: 0.1 }));
        let back: GameSequence = serde_json::from_str(&serde_json::to_string(&seq).unwrap()).unwrap();
        assert_eq!(back, seq);
    }
}
