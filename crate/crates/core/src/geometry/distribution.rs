use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Probability vector over joint outcomes in lexicographic order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct JointDistribution {
    probs: Vec<f64>,
}

impl JointDistribution {
    /// Clamps entries in `[-1e-12, 0)` to zero and renormalizes sums within
    /// `1e-9` of one; anything further off is rejected.
    pub fn new(mut probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return invalid("distribution is empty");
        }
        for p in &mut probs {
            if !p.is_finite() || *p < -1e-12 {
                return invalid(format!("invalid probability {p}"));
            }
            *p = p.max(0.0);
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return invalid(format!("probabilities sum to {sum}"));
        }
        for p in &mut probs {
            *p /= sum;
        }
        Ok(Self { probs })
    }

    pub fn point_mass(outcomes: usize, index: usize) -> Self {
        let mut probs = vec![0.0; outcomes];
        probs[index] = 1.0;
        Self { probs }
    }

    pub fn uniform(outcomes: usize) -> Self {
        Self {
            probs: vec![1.0 / outcomes as f64; outcomes],
        }
    }

    /// Empirical distribution of outcome counts.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return invalid("no outcomes counted");
        }
        Ok(Self {
            probs: counts.iter().map(|&c| c as f64 / total as f64).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }
}

impl TryFrom<Vec<f64>> for JointDistribution {
    type Error = crate::Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<JointDistribution> for Vec<f64> {
    fn from(d: JointDistribution) -> Self {
        d.probs
    }
}
