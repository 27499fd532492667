use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{DistanceEstimator, SimConfig, TrackingMetric};
use super::episode::{build_learners, play_episode, RunTrace};
use super::rng::replication_seed;
use crate::error::{Error, Result};
use crate::game::{Batch, GameSequence};
use crate::geometry::{distance, EquilibriumPolytope, JointDistribution};
use crate::oracles::{batch_regrets, clipped_batch_regret, realized_regret_value, RegretKind};
use crate::welfare::{outcome_welfare, payoff_shift, WelfareFunction};

/// Replication mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(n)`; 0 for a single replication.
    pub se: f64,
}

impl Stat {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        if xs.is_empty() {
            return Stat { mean: f64::NAN, se: f64::NAN };
        }
        let mean = xs.iter().sum::<f64>() / n;
        if xs.len() == 1 {
            return Stat { mean, se: 0.0 };
        }
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Stat { mean, se: (var / n).sqrt() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub start: usize,
    pub end: usize,
    /// Empirical joint distribution of the batch, averaged over replications.
    pub distribution: Vec<f64>,
    /// Distance to the batch game's equilibrium set under the configured
    /// estimator.
    pub distance: Option<f64>,
    /// Per-player static regret within the batch.
    pub regrets: Vec<Stat>,
    /// Mean per-period welfare within the batch.
    pub welfare: Option<Stat>,
}

impl BatchSummary {
    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationSummary {
    pub horizon: usize,
    pub replications: usize,
    pub seeds: Vec<u64>,
    pub batches: Vec<BatchSummary>,
    /// `sum_k |T_k| d(q_k, E_k)`; the mean follows the configured estimator,
    /// the standard error comes from per-replication tracking errors.
    pub tracking_error: Option<Stat>,
    /// Per-player dynamic external regret against `C_T` switches.
    pub external_regret: Option<Vec<Stat>>,
    /// Largest external regret over players, per replication.
    pub max_external_regret: Option<Stat>,
    pub internal_regret: Option<Vec<Stat>>,
    pub clipped_regret: Option<Vec<Stat>>,
    /// Realized total welfare `sum_t W(a_t)`.
    pub welfare_total: Option<Stat>,
    /// Payoff shift applied before evaluating welfare.
    pub welfare_shift: Option<f64>,
}

impl ReplicationSummary {
    pub fn err_per_t(&self) -> Option<f64> {
        self.tracking_error.map(|s| s.mean / self.horizon as f64)
    }

    pub fn batch_distance(&self, k: usize) -> Option<f64> {
        self.batches.get(k).and_then(|b| b.distance)
    }
}

/// Per-replication reductions; traces are dropped as soon as these are taken.
#[derive(Debug, Clone)]
struct RepStats {
    counts: Vec<Vec<u64>>,
    distances: Option<Vec<f64>>,
    batch_regrets: Vec<Vec<f64>>,
    batch_welfare: Option<Vec<f64>>,
    external: Option<Vec<f64>>,
    internal: Option<Vec<f64>>,
    clipped: Option<Vec<f64>>,
}

struct Context<'a> {
    config: &'a SimConfig,
    seq: &'a GameSequence,
    batches: Vec<Batch>,
    polytopes: Option<Vec<EquilibriumPolytope>>,
    welfare: Option<(&'a WelfareFunction, f64)>,
}

fn batch_counts(trace: &RunTrace, batches: &[Batch], outcomes: usize) -> Vec<Vec<u64>> {
    batches
        .iter()
        .map(|b| {
            let mut c = vec![0u64; outcomes];
            for &o in &trace.outcomes[b.start - 1..b.end] {
                c[o] += 1;
            }
            c
        })
        .collect()
}

fn reduce(ctx: &Context<'_>, trace: &RunTrace) -> Result<RepStats> {
    let seq = ctx.seq;
    let n = seq.num_players();
    let t_len = seq.horizon();
    let metrics = &ctx.config.metrics;
    let counts = batch_counts(trace, &ctx.batches, seq.space().outcome_count());
    let distances = match (&ctx.polytopes, metrics.tracking) {
        (Some(polys), Some(tm)) => Some(
            counts
                .iter()
                .zip(polys)
                .map(|(c, p)| Ok(distance(&JointDistribution::from_counts(c)?, p, tm.norm)?.value))
                .collect::<Result<Vec<_>>>()?,
        ),
        _ => None,
    };
    let per_player = |kind: RegretKind, budget: &crate::learners::SwitchBudget| -> Result<Vec<f64>> {
        let c = budget.switches(t_len);
        (0..n)
            .map(|i| realized_regret_value(&trace.outcomes, seq, i, c, kind))
            .collect()
    };
    let regrets: Vec<Vec<f64>> = (0..n)
        .map(|i| batch_regrets(&trace.outcomes, seq, i, &ctx.batches))
        .collect::<Result<_>>()?;
    // Transpose to [batch][player].
    let batch_regrets = (0..ctx.batches.len())
        .map(|k| regrets.iter().map(|r| r[k]).collect())
        .collect();
    let batch_welfare = ctx.welfare.map(|(w, shift)| {
        ctx.batches
            .iter()
            .map(|b| {
                (b.start..=b.end)
                    .map(|t| outcome_welfare(seq.stage(t), trace.outcomes[t - 1], w, shift))
                    .sum::<f64>()
            })
            .collect()
    });
    Ok(RepStats {
        counts,
        distances,
        batch_regrets,
        batch_welfare,
        external: metrics.external_regret.as_ref().map(|b| per_player(RegretKind::External, b)).transpose()?,
        internal: metrics.internal_regret.as_ref().map(|b| per_player(RegretKind::Internal, b)).transpose()?,
        clipped: metrics
            .clipped_regret
            .then(|| (0..n).map(|i| clipped_batch_regret(&trace.outcomes, seq, i)).collect())
            .transpose()?,
    })
}

fn per_player_stats(reps: &[RepStats], pick: impl Fn(&RepStats) -> Option<&Vec<f64>>, n: usize) -> Option<Vec<Stat>> {
    let first = pick(reps.first()?)?;
    debug_assert_eq!(first.len(), n);
    Some(
        (0..n)
            .map(|i| Stat::of(&reps.iter().map(|r| pick(r).expect("uniform metrics")[i]).collect::<Vec<_>>()))
            .collect(),
    )
}

fn aggregate(ctx: &Context<'_>, seeds: Vec<u64>, reps: Vec<RepStats>) -> Result<ReplicationSummary> {
    let n = ctx.seq.num_players();
    let r = reps.len();
    let mut batches = Vec::with_capacity(ctx.batches.len());
    let mut mean_dist_total = 0.0;
    for (k, b) in ctx.batches.iter().enumerate() {
        // Summing integer counts first keeps rational targets exact.
        let outcomes = reps[0].counts[k].len();
        let mut total = vec![0u64; outcomes];
        for rep in &reps {
            for (acc, c) in total.iter_mut().zip(&rep.counts[k]) {
                *acc += c;
            }
        }
        let dist = JointDistribution::from_counts(&total)?;
        let distance_value = match (&ctx.polytopes, ctx.config.metrics.tracking) {
            (Some(polys), Some(TrackingMetric { norm, estimator, .. })) => Some(match estimator {
                DistanceEstimator::MeanDistribution => distance(&dist, &polys[k], norm)?.value,
                DistanceEstimator::MeanDistance => {
                    reps.iter().map(|x| x.distances.as_ref().expect("tracking")[k]).sum::<f64>() / r as f64
                }
            }),
            _ => None,
        };
        if let Some(d) = distance_value {
            mean_dist_total += b.len() as f64 * d;
        }
        let regrets = (0..n)
            .map(|i| Stat::of(&reps.iter().map(|x| x.batch_regrets[k][i]).collect::<Vec<_>>()))
            .collect();
        let welfare = ctx.welfare.map(|_| {
            Stat::of(
                &reps
                    .iter()
                    .map(|x| x.batch_welfare.as_ref().expect("welfare")[k] / b.len() as f64)
                    .collect::<Vec<_>>(),
            )
        });
        batches.push(BatchSummary {
            start: b.start,
            end: b.end,
            distribution: dist.as_slice().to_vec(),
            distance: distance_value,
            regrets,
            welfare,
        });
    }
    let tracking_error = ctx.polytopes.as_ref().map(|_| {
        let per_rep: Vec<f64> = reps
            .iter()
            .map(|x| {
                x.distances
                    .as_ref()
                    .expect("tracking")
                    .iter()
                    .zip(&ctx.batches)
                    .map(|(d, b)| b.len() as f64 * d)
                    .sum()
            })
            .collect();
        Stat {
            mean: mean_dist_total,
            se: Stat::of(&per_rep).se,
        }
    });
    let external_regret = per_player_stats(&reps, |x| x.external.as_ref(), n);
    let max_external_regret = external_regret.as_ref().map(|_| {
        Stat::of(
            &reps
                .iter()
                .map(|x| x.external.as_ref().expect("external").iter().copied().fold(f64::NEG_INFINITY, f64::max))
                .collect::<Vec<_>>(),
        )
    });
    let welfare_total = ctx.welfare.map(|_| {
        Stat::of(
            &reps
                .iter()
                .map(|x| x.batch_welfare.as_ref().expect("welfare").iter().sum())
                .collect::<Vec<_>>(),
        )
    });
    Ok(ReplicationSummary {
        horizon: ctx.seq.horizon(),
        replications: r,
        seeds,
        batches,
        tracking_error,
        external_regret,
        max_external_regret,
        internal_regret: per_player_stats(&reps, |x| x.internal.as_ref(), n),
        clipped_regret: per_player_stats(&reps, |x| x.clipped.as_ref(), n),
        welfare_total,
        welfare_shift: ctx.welfare.map(|(_, s)| s),
    })
}

/// Runs all replications at one horizon on the current rayon pool.
///
/// Results are collected in replication order, so the summary does not depend
/// on the number of worker threads.
pub fn monte_carlo(config: &SimConfig, horizon: usize) -> Result<ReplicationSummary> {
    config.validate()?;
    let seq = config.sequence.build(horizon, config.noise)?;
    if config.learners.len() != seq.num_players() {
        return Err(Error::InvalidArgument("learner count does not match the game".into()));
    }
    let batches = seq.segment_batches();
    let polytopes = config
        .metrics
        .tracking
        .map(|tm| {
            batches
                .iter()
                .map(|b| EquilibriumPolytope::build(seq.stage(b.start), tm.kind, tm.epsilon))
                .collect::<Result<Vec<_>>>()
        })
        .transpose()?;
    let welfare = config.metrics.welfare.as_ref().map(|w| (w, payoff_shift(&seq)));
    let ctx = Context {
        config,
        seq: &seq,
        batches,
        polytopes,
        welfare,
    };
    let seeds: Vec<u64> = (0..config.replications)
        .map(|r| replication_seed(config.seed, horizon, r))
        .collect();
    let reps = seeds
        .par_iter()
        .map(|&s| {
            let mut learners = build_learners(&config.learners, &seq)?;
            let trace = play_episode(&seq, &mut learners, s, false)?;
            reduce(&ctx, &trace)
        })
        .collect::<Result<Vec<_>>>()?;
    aggregate(&ctx, seeds, reps)
}

/// One summary per horizon of the config's grid.
pub fn convergence_sweep(config: &SimConfig) -> Result<Vec<ReplicationSummary>> {
    config.validate()?;
    config.grid.iter().map(|&t| monte_carlo(config, t)).collect()
}

/// [`convergence_sweep`] on a dedicated pool of `jobs` threads (0 means the
/// rayon default).
pub fn convergence_sweep_with_jobs(config: &SimConfig, jobs: usize) -> Result<Vec<ReplicationSummary>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Numerical(format!("cannot start worker pool: {e}")))?;
    pool.install(|| convergence_sweep(config))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::builders::{example1_sequence, prisoners_dilemma};
    use crate::geometry::EquilibriumKind;
    use crate::learners::{LearnerSpec, Script, SwitchBudget};
    use crate::sim::config::{Metrics, SequenceSpec};

    fn cfg(reps: usize) -> SimConfig {
        SimConfig {
            sequence: SequenceSpec::Example1 { customers: 1.0 },
            noise: None,
            learners: vec![LearnerSpec::exp3s_fig2(), LearnerSpec::exp3s_fig2()],
            replications: reps,
            seed: 3,
            grid: vec![400],
            metrics: Metrics {
                tracking: Some(TrackingMetric::default()),
                external_regret: Some(SwitchBudget::constant(1.0)),
                internal_regret: Some(SwitchBudget::constant(1.0)),
                clipped_regret: true,
                welfare: Some(WelfareFunction::Additive),
            },
        }
    }

    #[test]
    fn stat_basics() {
        let s = Stat::of(&[1.0, 3.0]);
        assert_eq!(s.mean, 2.0);
        assert!((s.se - 1.0).abs() < 1e-15);
        assert_eq!(Stat::of(&[5.0]).se, 0.0);
    }

    #[test]
    fn single_replication_matches_trace_metrics() {
        let c = cfg(1);
        let s = monte_carlo(&c, 400).unwrap();
        let seq = example1_sequence(400, 1.0).unwrap();
        let mut ls = build_learners(&c.learners, &seq).unwrap();
        let trace = play_episode(&seq, &mut ls, s.seeds[0], false).unwrap();
        let b = seq.segment_batches();
        let counts = batch_counts(&trace, &b, 4);
        let dists: Vec<_> = counts.iter().map(|c| JointDistribution::from_counts(c).unwrap()).collect();
        let rep = crate::geometry::tracking_error(&seq, &dists, EquilibriumKind::Hannan, crate::geometry::Norm::L2, 0.0)
            .unwrap();
        assert!((s.tracking_error.unwrap().mean - rep.total).abs() < 1e-12);
        let ext = realized_regret_value(&trace.outcomes, &seq, 0, 1, RegretKind::External).unwrap();
        assert_eq!(s.external_regret.as_ref().unwrap()[0].mean, ext);
        for b in &s.batches {
            assert!((b.distribution.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn deterministic_across_worker_counts() {
        let c = cfg(6);
        let a = convergence_sweep_with_jobs(&c, 1).unwrap();
        let b = convergence_sweep_with_jobs(&c, 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn dominant_scripts_track_exactly() {
        let c = SimConfig {
            sequence: SequenceSpec::Repeated { game: prisoners_dilemma() },
            learners: vec![
                LearnerSpec::Scripted(Script::Constant { action: 1 }),
                LearnerSpec::Scripted(Script::Constant { action: 1 }),
            ],
            grid: vec![50, 100],
            ..cfg(2)
        };
        for s in convergence_sweep(&c).unwrap() {
            assert_eq!(s.err_per_t(), Some(0.0));
            assert_eq!(s.tracking_error.unwrap().se, 0.0);
        }
    }
}
