use super::tuning::{exp3p_params, pull_of, rexp3p_pull, Exp3PParams, PullParams, SwitchBudget};
use super::{uniform, Learner};
use crate::error::{invalid, Result};

/// Exp3P with a switching benchmark, working on native payoffs in `[-M, M]`.
///
/// Pseudo-gains `(1/2M) ((g 1(a = k) + beta) / p_k + M)` accumulate per action
/// and the mixed action is `(1 - gamma) softmax(eta G) + gamma / K`.
#[derive(Debug, Clone, PartialEq)]
pub struct Exp3P {
    params: Exp3PParams,
    bound: f64,
    gains: Vec<f64>,
    probs: Vec<f64>,
}

impl Exp3P {
    pub fn new(actions: usize, params: Exp3PParams, bound: f64) -> Result<Self> {
        if actions < 2 {
            return invalid("Exp3P needs at least two actions");
        }
        if !(bound > 0.0 && bound.is_finite()) {
            return invalid(format!("payoff bound must be positive, got {bound}"));
        }
        let Exp3PParams { eta, gamma, beta, .. } = params;
        if !(eta > 0.0 && gamma > 0.0 && gamma <= 1.0 && beta >= 0.0) {
            return invalid(format!("invalid Exp3P parameters {params:?}"));
        }
        Ok(Self {
            params,
            bound,
            gains: vec![0.0; actions],
            probs: uniform(actions),
        })
    }

    /// Tuned for horizon `T` and `S` benchmark switches.
    pub fn tuned(actions: usize, horizon: usize, switches: f64, bound: f64) -> Result<Self> {
        Self::new(actions, exp3p_params(horizon, actions, switches)?, bound)
    }

    pub fn params(&self) -> &Exp3PParams {
        &self.params
    }

    fn refresh_probs(&mut self) {
        let k = self.gains.len() as f64;
        let eta = self.params.eta;
        let top = self.gains.iter().fold(f64::NEG_INFINITY, |m, &g| m.max(g));
        let mut total = 0.0;
        for (p, g) in self.probs.iter_mut().zip(&self.gains) {
            *p = (eta * (g - top)).exp();
            total += *p;
        }
        let gamma = self.params.gamma;
        for p in &mut self.probs {
            *p = (1.0 - gamma) * *p / total + gamma / k;
        }
    }
}

impl Learner for Exp3P {
    fn num_actions(&self) -> usize {
        self.gains.len()
    }

    fn act(&mut self, _t: usize) -> &[f64] {
        self.refresh_probs();
        &self.probs
    }

    fn observe(&mut self, _t: usize, action: usize, payoff: f64) {
        self.refresh_probs();
        let m = self.bound;
        let beta = self.params.beta;
        for (k, (g, p)) in self.gains.iter_mut().zip(&self.probs).enumerate() {
            let hit = if k == action { payoff } else { 0.0 };
            *g += ((hit + beta) / p + m) / (2.0 * m);
        }
    }

    fn reset(&mut self) {
        self.gains.fill(0.0);
        self.probs = uniform(self.gains.len());
    }
}

/// Exp3P restarted on the doubling schedule: pull `r` covers periods
/// `[2^(r-1), 2^r - 1]` and runs a fresh Exp3P tuned for that pull's length
/// and switch budget. Pull 1 is a single uniform draw.
#[derive(Debug, Clone)]
pub struct Rexp3P {
    actions: usize,
    bound: f64,
    budget: SwitchBudget,
    pull: u32,
    inner: Option<Exp3P>,
    probs: Vec<f64>,
    starts: Vec<usize>,
}

impl Rexp3P {
    pub fn new(actions: usize, budget: SwitchBudget, bound: f64) -> Result<Self> {
        if actions < 2 {
            return invalid("Rexp3P needs at least two actions");
        }
        if !(bound > 0.0 && bound.is_finite()) {
            return invalid(format!("payoff bound must be positive, got {bound}"));
        }
        budget.validate()?;
        Ok(Self {
            actions,
            bound,
            budget,
            pull: 0,
            inner: None,
            probs: uniform(actions),
            starts: Vec::new(),
        })
    }

    pub fn pull_params(&self, pull: u32) -> PullParams {
        rexp3p_pull(pull, self.actions, &self.budget)
    }

    pub fn current_pull(&self) -> u32 {
        self.pull
    }

    /// Exp3P instance of the current pull, `None` during pull 1.
    pub fn inner(&self) -> Option<&Exp3P> {
        self.inner.as_ref()
    }

    fn enter(&mut self, t: usize) {
        let r = pull_of(t);
        if r == self.pull {
            return;
        }
        self.pull = r;
        if r > 1 {
            self.starts.push(t);
        }
        self.inner = (r > 1).then(|| {
            let p = self.pull_params(r);
            let params = Exp3PParams {
                s: p.s,
                eta: p.eta,
                gamma: p.gamma,
                beta: p.beta,
            };
            Exp3P::new(self.actions, params, self.bound).expect("pull parameters are valid")
        });
    }
}

impl Learner for Rexp3P {
    fn num_actions(&self) -> usize {
        self.actions
    }

    fn act(&mut self, t: usize) -> &[f64] {
        self.enter(t);
        match &mut self.inner {
            Some(inner) => {
                self.probs.copy_from_slice(inner.act(t));
                &self.probs
            }
            None => &self.probs,
        }
    }

    fn observe(&mut self, t: usize, action: usize, payoff: f64) {
        self.enter(t);
        if let Some(inner) = &mut self.inner {
            inner.observe(t, action, payoff);
        }
    }

    fn reset(&mut self) {
        self.pull = 0;
        self.inner = None;
        self.probs = uniform(self.actions);
        self.starts.clear();
    }

    fn restarts(&self) -> &[usize] {
        &self.starts
    }
}
