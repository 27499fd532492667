use super::Learner;
use crate::error::{invalid, Result};

/// Resets its inner learner every `period` periods, at `period + 1`,
/// `2 period + 1`, ..., and feeds it block-local time.
#[derive(Debug)]
pub struct RestartWrapper {
    inner: Box<dyn Learner>,
    period: usize,
    block_start: usize,
    resets: Vec<usize>,
}

impl RestartWrapper {
    pub fn new(inner: Box<dyn Learner>, period: usize) -> Result<Self> {
        if period == 0 {
            return invalid("restart period must be positive");
        }
        Ok(Self {
            inner,
            period,
            block_start: 1,
            resets: Vec::new(),
        })
    }

    pub fn period(&self) -> usize {
        self.period
    }

    fn local(&mut self, t: usize) -> usize {
        let start = (t - 1) / self.period * self.period + 1;
        if start != self.block_start {
            self.block_start = start;
            self.inner.reset();
            self.resets.push(t);
        }
        t - start + 1
    }
}

impl Learner for RestartWrapper {
    fn num_actions(&self) -> usize {
        self.inner.num_actions()
    }

    fn act(&mut self, t: usize) -> &[f64] {
        let local = self.local(t);
        self.inner.act(local)
    }

    fn observe(&mut self, t: usize, action: usize, payoff: f64) {
        let local = self.local(t);
        self.inner.observe(local, action, payoff);
    }

    fn reset(&mut self) {
        self.inner.reset();
        self.block_start = 1;
        self.resets.clear();
    }

    fn restarts(&self) -> &[usize] {
        &self.resets
    }
}
