//! Named experiments. Names are stable: result directories are keyed by them.

use crate::error::{invalid, Result};
use crate::game::builders::{chicken, mirrored_prisoners_dilemma, prisoners_dilemma};
use crate::geometry::{EquilibriumKind, Norm};
use crate::learners::{LearnerSpec, Script, SwitchBudget, TargetDistribution};
use crate::sim::{DistanceEstimator, Metrics, SequenceSpec, SimConfig, TrackingMetric};
use crate::welfare::WelfareFunction;

pub const PRESET_NAMES: [&str; 7] = [
    "example1-exp3",
    "example1-exp3s",
    "appendixB3",
    "appendixE",
    "trigger-demo",
    "rexp3p-demo",
    "smooth-welfare-demo",
];

/// Desk-scale defaults shared by every preset.
pub const DEFAULT_HORIZON: usize = 10_000;
pub const DEFAULT_REPLICATIONS: usize = 50;
pub const DEFAULT_SEED: u64 = 7;

/// Column payoff of the counterexample preset.
pub const COUNTEREXAMPLE_EPSILON: f64 = 0.1;

pub fn description(name: &str) -> Option<&'static str> {
    Some(match name {
        "example1-exp3" => "pricing season, both sellers run Exp3",
        "example1-exp3s" => "pricing season, both sellers run Exp3S with one benchmark switch",
        "appendixB3" => "pricing season, Exp3 against a seller playing dominant prices",
        "appendixE" => "counterexample pair, deviation-switching row policy against the column script",
        "trigger-demo" => "chicken, trigger policies cycling the uniform correlated equilibrium",
        "rexp3p-demo" => "pricing season, both sellers run Rexp3P",
        "smooth-welfare-demo" => "prisoner's dilemma then its mirror, Exp3S with welfare tracking",
        _ => return None,
    })
}

fn tracking(kind: EquilibriumKind) -> Option<TrackingMetric> {
    Some(TrackingMetric {
        kind,
        norm: Norm::L2,
        epsilon: 0.0,
        estimator: DistanceEstimator::MeanDistribution,
    })
}

fn base_metrics() -> Metrics {
    Metrics {
        tracking: tracking(EquilibriumKind::Hannan),
        external_regret: Some(SwitchBudget::constant(1.0)),
        internal_regret: None,
        clipped_regret: true,
        welfare: Some(WelfareFunction::Additive),
    }
}

/// Target of the trigger demo: uniform over (swerve, swerve), (swerve, dare)
/// and (dare, swerve).
pub fn chicken_target() -> TargetDistribution {
    TargetDistribution {
        support: vec![vec![0, 0], vec![0, 1], vec![1, 0]],
        counts: vec![1, 1, 1],
    }
}

/// Config of preset `name` over `grid` with `replications` runs per horizon.
pub fn preset(name: &str, grid: Vec<usize>, replications: usize, seed: u64) -> Result<SimConfig> {
    let example1 = SequenceSpec::Example1 { customers: 1.0 };
    let (sequence, learners, metrics) = match name {
        "example1-exp3" => (
            example1,
            vec![LearnerSpec::exp3_fig1(), LearnerSpec::exp3_fig1()],
            base_metrics(),
        ),
        "example1-exp3s" => (
            example1,
            vec![LearnerSpec::exp3s_fig2(), LearnerSpec::exp3s_fig2()],
            base_metrics(),
        ),
        "appendixB3" => (
            example1,
            vec![LearnerSpec::exp3_fig1(), LearnerSpec::Scripted(Script::BatchBestReply)],
            base_metrics(),
        ),
        "appendixE" => (
            SequenceSpec::Counterexample {
                epsilon: COUNTEREXAMPLE_EPSILON,
            },
            vec![
                LearnerSpec::CounterexampleRow,
                LearnerSpec::Scripted(Script::CounterexampleColumn),
            ],
            Metrics {
                welfare: None,
                ..base_metrics()
            },
        ),
        "trigger-demo" => {
            let trigger = LearnerSpec::Trigger {
                target: chicken_target(),
                fallback: None,
                require_injective: false,
            };
            (
                SequenceSpec::Repeated { game: chicken() },
                vec![trigger.clone(), trigger],
                Metrics {
                    tracking: tracking(EquilibriumKind::Correlated),
                    external_regret: Some(SwitchBudget::Power {
                        coefficient: 1.0,
                        exponent: 0.3,
                    }),
                    ..base_metrics()
                },
            )
        }
        "rexp3p-demo" => {
            let l = LearnerSpec::Rexp3p {
                budget: SwitchBudget::constant(1.0),
            };
            (example1, vec![l.clone(), l], base_metrics())
        }
        "smooth-welfare-demo" => (
            SequenceSpec::Proportional {
                games: vec![prisoners_dilemma(), mirrored_prisoners_dilemma()],
                weights: vec![1.0, 1.0],
            },
            vec![LearnerSpec::exp3s_fig2(), LearnerSpec::exp3s_fig2()],
            base_metrics(),
        ),
        other => return invalid(format!("unknown preset '{other}'")),
    };
    let config = SimConfig {
        sequence,
        noise: None,
        learners,
        replications,
        seed,
        grid,
        metrics,
    };
    config.validate()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_builds() {
        for name in PRESET_NAMES {
            let c = preset(name, vec![120, 600], 2, 1).unwrap();
            assert!(description(name).is_some());
            crate::sim::convergence_sweep(&c).unwrap();
        }
        assert!(preset("nope", vec![100], 1, 1).is_err());
    }

    #[test]
    fn trigger_demo_is_exact_on_whole_cycles() {
        let c = preset("trigger-demo", vec![300, 600], 3, 5).unwrap();
        for s in crate::sim::convergence_sweep(&c).unwrap() {
            assert_eq!(s.err_per_t(), Some(0.0));
            for (x, y) in s.batches[0].distribution.iter().zip([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0]) {
                assert_eq!(*x, y);
            }
        }
    }
}
