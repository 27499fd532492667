use super::{uniform, Learner, PayoffScale};
use crate::error::{invalid, Result};

const STATIONARY_TOL: f64 = 1e-10;
const STATIONARY_MAX_ITER: usize = 10_000;

/// Bandit conditional regret matching.
///
/// Keeps importance-weighted internal regrets
/// `R[x][y] += 1(a = y) (p_x / p_y) u - 1(a = x) u` and plays the stationary
/// distribution of the lazy chain `(I + Q) / 2`, where `Q[x][y] = R+[x][y] / Z`
/// off the diagonal and `Z` is the largest positive row sum, mixed with
/// `gamma` uniform exploration.
///
/// The stationary distribution is found by power iteration warm-started from
/// the previous one, so reducible chains resolve deterministically.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretMatching {
    gamma: f64,
    scale: PayoffScale,
    regrets: Vec<Vec<f64>>,
    stationary: Vec<f64>,
    probs: Vec<f64>,
}

impl RegretMatching {
    pub fn new(actions: usize, gamma: f64, bound: f64) -> Result<Self> {
        if actions < 2 {
            return invalid("regret matching needs at least two actions");
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return invalid(format!("gamma must lie in (0, 1], got {gamma}"));
        }
        if !(bound > 0.0 && bound.is_finite()) {
            return invalid(format!("payoff bound must be positive, got {bound}"));
        }
        Ok(Self {
            gamma,
            scale: PayoffScale::new(bound),
            regrets: vec![vec![0.0; actions]; actions],
            stationary: uniform(actions),
            probs: uniform(actions),
        })
    }

    /// Default exploration `min(1/2, h^(-1/3))` for a learner that restarts
    /// every `h` periods, the usual explore-exploit rate under bandit feedback.
    pub fn default_gamma(horizon: usize) -> f64 {
        (horizon.max(1) as f64).powf(-1.0 / 3.0).min(0.5)
    }

    /// Starts from the given cumulative regret matrix.
    pub fn with_regrets(regrets: Vec<Vec<f64>>, gamma: f64, bound: f64) -> Result<Self> {
        let k = regrets.len();
        if regrets.iter().any(|r| r.len() != k) {
            return invalid("regret matrix must be square");
        }
        let mut rm = Self::new(k, gamma, bound)?;
        rm.regrets = regrets;
        Ok(rm)
    }

    pub fn regrets(&self) -> &[Vec<f64>] {
        &self.regrets
    }

    /// Stationary distribution of the lazy chain for the current regrets,
    /// before exploration.
    pub fn stationary(&mut self) -> &[f64] {
        self.refresh_stationary();
        &self.stationary
    }

    fn refresh_stationary(&mut self) {
        let k = self.regrets.len();
        let norm = self
            .regrets
            .iter()
            .enumerate()
            .map(|(x, row)| {
                row.iter()
                    .enumerate()
                    .filter(|&(y, _)| y != x)
                    .map(|(_, r)| r.max(0.0))
                    .sum::<f64>()
            })
            .fold(0.0, f64::max);
        if norm <= 0.0 {
            self.stationary = uniform(k);
            return;
        }
        let mut next = vec![0.0; k];
        for _ in 0..STATIONARY_MAX_ITER {
            next.fill(0.0);
            for x in 0..k {
                let mass = self.stationary[x];
                let mut leave = 0.0;
                for y in 0..k {
                    if y != x {
                        let q = self.regrets[x][y].max(0.0) / norm;
                        next[y] += 0.5 * mass * q;
                        leave += q;
                    }
                }
                next[x] += mass * (1.0 - 0.5 * leave);
            }
            let total: f64 = next.iter().sum();
            let mut change = 0.0_f64;
            for (s, n) in self.stationary.iter_mut().zip(&next) {
                let v = n / total;
                change = change.max((v - *s).abs());
                *s = v;
            }
            if change <= STATIONARY_TOL {
                break;
            }
        }
    }

    fn refresh_probs(&mut self) {
        self.refresh_stationary();
        let k = self.probs.len() as f64;
        for (p, s) in self.probs.iter_mut().zip(&self.stationary) {
            *p = (1.0 - self.gamma) * s + self.gamma / k;
        }
    }
}

impl Learner for RegretMatching {
    fn num_actions(&self) -> usize {
        self.probs.len()
    }

    fn act(&mut self, _t: usize) -> &[f64] {
        self.refresh_probs();
        &self.probs
    }

    fn observe(&mut self, _t: usize, action: usize, payoff: f64) {
        let u = self.scale.to_unit(payoff);
        let pa = self.probs[action];
        for x in 0..self.probs.len() {
            if x != action {
                self.regrets[x][action] += self.probs[x] / pa * u;
                self.regrets[action][x] -= u;
            }
        }
    }

    fn reset(&mut self) {
        let k = self.probs.len();
        for row in &mut self.regrets {
            row.fill(0.0);
        }
        self.stationary = uniform(k);
        self.probs = uniform(k);
    }
}
