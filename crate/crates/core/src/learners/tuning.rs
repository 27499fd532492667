//! Parameter schedules for the exponential-weights learners.
//!
//! All logarithms are natural.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Number of benchmark switches allowed as a function of the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SwitchBudget {
    /// `C_T = value` for every horizon.
    Constant { value: f64 },
    /// `C_T = ceil(coefficient * T^exponent)`.
    Power { coefficient: f64, exponent: f64 },
    /// `C_T = T`; degenerate, every period may switch.
    Identity,
}

impl SwitchBudget {
    pub fn constant(value: f64) -> Self {
        SwitchBudget::Constant { value }
    }

    pub fn at(&self, horizon: usize) -> f64 {
        let t = horizon as f64;
        match *self {
            SwitchBudget::Constant { value } => value,
            // The small slack keeps exact powers (1024^0.3 = 8) from rounding up.
            SwitchBudget::Power {
                coefficient,
                exponent,
            } => (coefficient * t.powf(exponent) - 1e-9).ceil().max(0.0),
            SwitchBudget::Identity => t,
        }
    }

    /// Integer switch count for oracle calls.
    pub fn switches(&self, horizon: usize) -> usize {
        self.at(horizon).floor() as usize
    }

    pub(crate) fn validate(&self) -> Result<()> {
        match *self {
            SwitchBudget::Constant { value } if !(value >= 0.0 && value.is_finite()) => {
                invalid(format!("switch budget must be non-negative, got {value}"))
            }
            SwitchBudget::Power {
                coefficient,
                exponent,
            } if !(coefficient >= 0.0 && (0.0..=1.0).contains(&exponent)) => invalid(format!(
                "power budget needs coefficient >= 0 and exponent in [0, 1], got ({coefficient}, {exponent})"
            )),
            _ => Ok(()),
        }
    }
}

/// Named parameterizations selectable from learner specs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tuning {
    /// Exp3 with `gamma = sqrt(K ln K / ((e - 1) T))`.
    #[serde(rename = "fig1")]
    Fig1,
    /// Exp3S with one benchmark switch: `gamma = sqrt(4 ln T / T)`, `alpha = 2 / T` for two actions.
    #[serde(rename = "fig2")]
    Fig2,
    /// Exp3S tuned for a switch budget `C_T = o(T)`.
    #[serde(rename = "lemmaD1")]
    LemmaD1,
}

/// Classic Exp3 exploration rate for horizon `T`.
pub fn exp3_gamma(horizon: usize, actions: usize) -> f64 {
    let k = actions as f64;
    (k * k.ln() / ((E - 1.0) * horizon as f64)).sqrt().min(1.0)
}

/// `(gamma, alpha)` for Exp3S with switch budget `switches`:
/// `alpha = (C + 1) / T`, `gamma = min(1, sqrt(K (C + 1) / T * ln(K T / (C + 1))))`.
pub fn exp3s_budget_tuning(horizon: usize, actions: usize, switches: f64) -> (f64, f64) {
    let t = horizon as f64;
    let k = actions as f64;
    let c1 = switches + 1.0;
    let gamma = (k * c1 / t * (k * t / c1).ln()).max(0.0).sqrt().min(1.0);
    (gamma, c1 / t)
}

/// `(gamma, alpha)` for Exp3S against a fixed budget `C`:
/// `gamma = min(1, sqrt(K ((C + 1) ln(K T) + e) / ((e - 1) T)))`, `alpha = 1 / T`.
pub fn exp3s_fixed_budget_tuning(horizon: usize, actions: usize, switches: f64) -> (f64, f64) {
    let t = horizon as f64;
    let k = actions as f64;
    let gamma = (k * ((switches + 1.0) * (k * t).ln() + E) / ((E - 1.0) * t))
        .sqrt()
        .min(1.0);
    (gamma, 1.0 / t)
}

/// Exp3P inputs for horizon `T`, `K` actions and `S` benchmark switches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exp3PParams {
    pub s: f64,
    pub eta: f64,
    pub gamma: f64,
    pub beta: f64,
}

/// `s = S ln(3 T K / S) + 2 ln K` (first term 0 when `S = 0`),
/// `beta = 3 sqrt(s / (T K))`, `gamma = min(1/2, sqrt(K s / (2 T)))`,
/// `eta = sqrt(s / (T K)) / 5`.
pub fn exp3p_params(horizon: usize, actions: usize, switches: f64) -> Result<Exp3PParams> {
    if horizon == 0 {
        return invalid("Exp3P needs a positive horizon");
    }
    if switches < 0.0 || switches > (horizon - 1) as f64 {
        return invalid(format!(
            "Exp3P switch budget {switches} outside [0, T - 1] for T = {horizon}"
        ));
    }
    let s = exp3p_s(horizon, actions, switches);
    Ok(exp3p_from_s(horizon, actions, s))
}

fn exp3p_s(horizon: usize, actions: usize, switches: f64) -> f64 {
    let k = actions as f64;
    let switching = if switches > 0.0 {
        switches * (3.0 * horizon as f64 * k / switches).ln()
    } else {
        0.0
    };
    switching + 2.0 * k.ln()
}

fn exp3p_from_s(horizon: usize, actions: usize, s: f64) -> Exp3PParams {
    let t = horizon as f64;
    let k = actions as f64;
    Exp3PParams {
        s,
        beta: 3.0 * (s / (t * k)).sqrt(),
        gamma: (k * s / (2.0 * t)).sqrt().min(0.5),
        eta: (s / (t * k)).sqrt() / 5.0,
    }
}

/// One pull of the doubling schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PullParams {
    pub pull: u32,
    /// First and last period of the pull, `[2^(r-1), 2^r - 1]`.
    pub start: usize,
    pub end: usize,
    /// Switch budget `C^r = min(C_{2^r - 1} + 1, 2^(r-1) - 1)`.
    pub switches: f64,
    /// `c^r = C^r ln(3 2^(r-1) K / C^r) + 2 ln K`.
    pub s: f64,
    pub eta: f64,
    pub gamma: f64,
    pub beta: f64,
}

/// Pull index containing period `t`: `floor(log2 t) + 1`.
pub fn pull_of(t: usize) -> u32 {
    debug_assert!(t >= 1);
    usize::BITS - t.leading_zeros()
}

pub fn rexp3p_pull(pull: u32, actions: usize, budget: &SwitchBudget) -> PullParams {
    assert!(pull >= 1 && pull < usize::BITS, "pull index out of range");
    let len = 1usize << (pull - 1);
    let end = (1usize << pull) - 1;
    let switches = (budget.at(end) + 1.0).min((len - 1) as f64);
    let s = exp3p_s(len, actions, switches);
    let p = exp3p_from_s(len, actions, s);
    PullParams {
        pull,
        start: len,
        end,
        switches,
        s,
        eta: p.eta,
        gamma: p.gamma,
        beta: p.beta,
    }
}

/// Restart period `ceil(sqrt(T / (C_T + 1)))`.
pub fn default_restart_period(horizon: usize, switches: f64) -> usize {
    restart_period(horizon, switches, 0.5)
}

/// Restart period `ceil((T / (C_T + 1))^exponent)`.
///
/// An inner learner with block regret of order `D^a` balances restart cost
/// against within-block regret at `exponent = 1 / (2 - a)`.
pub fn restart_period(horizon: usize, switches: f64, exponent: f64) -> usize {
    let base = horizon as f64 / (switches + 1.0);
    // Slack keeps exact powers such as 16^0.5 from rounding up.
    ((base.powf(exponent) - 1e-9).ceil() as usize).max(1)
}
