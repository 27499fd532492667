use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::tuning::{exp3_gamma, exp3s_budget_tuning, restart_period, SwitchBudget, Tuning};
use super::{
    CounterexampleRow, Exp3P, Exp3S, Learner, RegretMatching, RestartWrapper, Rexp3P, Script,
    Scripted, TargetDistribution, TriggerPolicy,
};
use crate::error::{invalid, Result};
use crate::game::GameSequence;

/// Serializable learner description: `{"kind": ..., "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum LearnerSpec {
    Exp3 {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tuning: Option<Tuning>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma: Option<f64>,
    },
    Exp3s {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tuning: Option<Tuning>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha: Option<f64>,
        /// Switch budget for the `lemmaD1` tuning.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        budget: Option<SwitchBudget>,
    },
    Exp3p {
        switches: f64,
    },
    Rexp3p {
        budget: SwitchBudget,
    },
    Restart {
        inner: Box<LearnerSpec>,
        /// Explicit restart period; otherwise derived from `budget` and `exponent`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        period: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        budget: Option<SwitchBudget>,
        /// Growth exponent of the default period, `ceil((T / (C_T + 1))^exponent)`;
        /// 1/2 when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        exponent: Option<f64>,
    },
    RegretMatching {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma: Option<f64>,
    },
    Trigger {
        target: TargetDistribution,
        /// Defaults to restarted Exp3.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        fallback: Option<Box<LearnerSpec>>,
        #[serde(default)]
        require_injective: bool,
    },
    Scripted(Script),
    CounterexampleRow,
}

/// What a spec needs to know to instantiate a learner.
#[derive(Debug, Clone, Copy)]
pub struct BuildContext<'a> {
    pub sequence: &'a GameSequence,
    pub player: usize,
    /// Horizon the learner is tuned for; shorter than the sequence inside a
    /// restart wrapper.
    pub horizon: usize,
}

impl<'a> BuildContext<'a> {
    pub fn new(sequence: &'a GameSequence, player: usize) -> Self {
        Self {
            sequence,
            player,
            horizon: sequence.horizon(),
        }
    }

    fn with_horizon(self, horizon: usize) -> Self {
        Self { horizon, ..self }
    }
}

impl LearnerSpec {
    pub fn exp3_fig1() -> Self {
        LearnerSpec::Exp3 {
            tuning: Some(Tuning::Fig1),
            gamma: None,
        }
    }

    pub fn exp3s_fig2() -> Self {
        LearnerSpec::Exp3s {
            tuning: Some(Tuning::Fig2),
            gamma: None,
            alpha: None,
            budget: None,
        }
    }

    pub fn restarted(inner: LearnerSpec, budget: SwitchBudget) -> Self {
        LearnerSpec::Restart {
            inner: Box::new(inner),
            period: None,
            budget: Some(budget),
            exponent: None,
        }
    }

    pub fn build(&self, ctx: BuildContext<'_>) -> Result<Box<dyn Learner>> {
        let seq = ctx.sequence;
        if ctx.player >= seq.num_players() {
            return invalid(format!("player {} out of range", ctx.player));
        }
        let k = seq.space().actions(ctx.player);
        let m = seq.bound();
        let t = ctx.horizon;
        if t == 0 {
            return invalid("learner horizon must be positive");
        }
        Ok(match self {
            LearnerSpec::Exp3 { tuning, gamma } => {
                let gamma = match (tuning, gamma) {
                    (_, Some(g)) => *g,
                    (None | Some(Tuning::Fig1), None) => exp3_gamma(t, k),
                    (Some(other), None) => {
                        return invalid(format!("tuning {other:?} does not apply to exp3"))
                    }
                };
                Box::new(Exp3S::exp3(k, gamma, m)?)
            }
            LearnerSpec::Exp3s {
                tuning,
                gamma,
                alpha,
                budget,
            } => {
                let switches = match (tuning, budget) {
                    (Some(Tuning::Fig2), _) => 1.0,
                    (Some(Tuning::Fig1), _) => {
                        return invalid("tuning fig1 does not apply to exp3s")
                    }
                    (_, Some(b)) => {
                        b.validate()?;
                        b.at(t)
                    }
                    (_, None) => 1.0,
                };
                let (g0, a0) = exp3s_budget_tuning(t, k, switches);
                Box::new(Exp3S::new(k, gamma.unwrap_or(g0), alpha.unwrap_or(a0), m)?)
            }
            LearnerSpec::Exp3p { switches } => Box::new(Exp3P::tuned(k, t, *switches, m)?),
            LearnerSpec::Rexp3p { budget } => Box::new(Rexp3P::new(k, *budget, m)?),
            LearnerSpec::Restart {
                inner,
                period,
                budget,
                exponent,
            } => {
                let exponent = exponent.unwrap_or(0.5);
                if !(exponent > 0.0 && exponent < 1.0) {
                    return invalid(format!("restart exponent must lie in (0, 1), got {exponent}"));
                }
                let period = match (period, budget) {
                    (Some(p), _) => *p,
                    (None, Some(b)) => {
                        b.validate()?;
                        restart_period(t, b.at(t), exponent)
                    }
                    (None, None) => restart_period(t, 0.0, exponent),
                };
                if period == 0 {
                    return invalid("restart period must be positive");
                }
                let inner = inner.build(ctx.with_horizon(period.min(t)))?;
                Box::new(RestartWrapper::new(inner, period)?)
            }
            LearnerSpec::RegretMatching { gamma } => Box::new(RegretMatching::new(
                k,
                gamma.unwrap_or_else(|| RegretMatching::default_gamma(t)),
                m,
            )?),
            LearnerSpec::Trigger {
                target,
                fallback,
                require_injective,
            } => {
                if seq.variation() > 0 {
                    return invalid("trigger policies need a sequence with a single stage game");
                }
                let fallback = match fallback {
                    Some(spec) => spec.build(ctx)?,
                    None => LearnerSpec::restarted(LearnerSpec::exp3_fig1(), SwitchBudget::constant(0.0))
                        .build(ctx)?,
                };
                let game = Arc::clone(&seq.segments()[0].game);
                Box::new(TriggerPolicy::new(game, ctx.player, target, fallback, *require_injective)?)
            }
            LearnerSpec::Scripted(script) => Box::new(Scripted::new(script, seq, ctx.player)?),
            LearnerSpec::CounterexampleRow => {
                if k != 2 {
                    return invalid("the counterexample policy needs two actions");
                }
                Box::new(CounterexampleRow::new(t, m)?)
            }
        })
    }
}
