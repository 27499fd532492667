use rand::Rng;
use serde::{Deserialize, Serialize};

use super::rng::player_stream;
use crate::error::{invalid, Result};
use crate::game::GameSequence;
use crate::learners::{check_distribution, sample_index, BuildContext, Learner, LearnerSpec};

/// Everything that happened in one episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub seed: u64,
    /// Joint outcome index per period.
    pub outcomes: Vec<usize>,
    /// `payoffs[t - 1][i]`: realized payoff of player `i`, noise included.
    pub payoffs: Vec<Vec<f64>>,
    /// Mixed actions per period and player, when recording was requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixed: Option<Vec<Vec<Vec<f64>>>>,
    /// Internal restart periods reported by each learner at the end.
    pub restarts: Vec<Vec<usize>>,
}

impl RunTrace {
    pub fn horizon(&self) -> usize {
        self.outcomes.len()
    }

    /// Action of `player` in period `t` (1-based).
    pub fn action(&self, seq: &GameSequence, t: usize, player: usize) -> usize {
        seq.space().action_of(self.outcomes[t - 1], player)
    }
}

pub fn build_learners(specs: &[LearnerSpec], seq: &GameSequence) -> Result<Vec<Box<dyn Learner>>> {
    if specs.len() != seq.num_players() {
        return invalid(format!(
            "{} learner specs for {} players",
            specs.len(),
            seq.num_players()
        ));
    }
    specs
        .iter()
        .enumerate()
        .map(|(i, s)| s.build(BuildContext::new(seq, i)))
        .collect()
}

/// Plays `seq` once with the given learners.
///
/// Player `i` draws exactly one uniform per period from stream `i` of
/// `rep_seed`, whether or not its mixed action is degenerate, so a player's
/// draws never depend on what the others do. Noise comes from stream `N`.
pub fn play_episode(
    seq: &GameSequence,
    learners: &mut [Box<dyn Learner>],
    rep_seed: u64,
    record_mixed: bool,
) -> Result<RunTrace> {
    let n = seq.num_players();
    if learners.len() != n {
        return invalid(format!("{} learners for {n} players", learners.len()));
    }
    let space = seq.space().clone();
    for (i, l) in learners.iter_mut().enumerate() {
        if l.num_actions() != space.actions(i) {
            return invalid(format!(
                "learner {i} has {} actions, game has {}",
                l.num_actions(),
                space.actions(i)
            ));
        }
        l.reset();
    }
    let horizon = seq.horizon();
    let mut streams: Vec<_> = (0..n).map(|i| player_stream(rep_seed, i)).collect();
    let mut noise_rng = player_stream(rep_seed, n);
    let mut outcomes = Vec::with_capacity(horizon);
    let mut payoffs = Vec::with_capacity(horizon);
    let mut mixed = record_mixed.then(|| Vec::with_capacity(horizon));
    let mut actions = vec![0; n];

    for t in 1..=horizon {
        let mut period_mix = record_mixed.then(|| Vec::with_capacity(n));
        for (i, l) in learners.iter_mut().enumerate() {
            let p = l.act(t);
            check_distribution(p, space.actions(i))
                .map_err(|e| crate::error::Error::Invariant(format!("player {i}, period {t}: {e}")))?;
            let u: f64 = streams[i].random();
            actions[i] = sample_index(p, u);
            if let Some(m) = period_mix.as_mut() {
                m.push(p.to_vec());
            }
        }
        let o = space.index(&actions)?;
        let game = seq.stage(t);
        let noise = seq.noise_at(t);
        let row: Vec<f64> = (0..n)
            .map(|i| {
                let mean = game.payoff(i, o);
                match noise {
                    Some(z) => z.realize(mean, game.bound(), &mut noise_rng),
                    None => mean,
                }
            })
            .collect();
        for (i, l) in learners.iter_mut().enumerate() {
            l.observe(t, actions[i], row[i]);
        }
        outcomes.push(o);
        payoffs.push(row);
        if let (Some(all), Some(m)) = (mixed.as_mut(), period_mix) {
            all.push(m);
        }
    }
    Ok(RunTrace {
        seed: rep_seed,
        outcomes,
        payoffs,
        mixed,
        restarts: learners.iter().map(|l| l.restarts().to_vec()).collect(),
    })
}
