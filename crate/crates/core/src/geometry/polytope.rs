use serde::{Deserialize, Serialize};

use super::distribution::JointDistribution;
use super::lp::{LinearProgram, LpStatus};
use crate::error::{invalid, Error, Result};
use crate::game::StageGame;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumKind {
    /// Coarse correlated equilibria.
    Hannan,
    Correlated,
}

impl std::str::FromStr for EquilibriumKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hannan" | "cce" => Ok(Self::Hannan),
            "correlated" | "ce" => Ok(Self::Correlated),
            other => invalid(format!("unknown equilibrium kind {other:?} (use hannan or correlated)")),
        }
    }
}

/// `{q in simplex : R q <= epsilon}` for the deviation functionals `R` of a
/// stage game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumPolytope {
    kind: EquilibriumKind,
    epsilon: f64,
    outcomes: usize,
    rows: Vec<Vec<f64>>,
}

impl EquilibriumPolytope {
    /// Hannan rows: one per `(i, x)`, `u^i(x, a^{-i}) - u^i(a)`.
    /// Correlated rows: one per `(i, x, y)`, `1(a^i = x) (u^i(y, a^{-i}) - u^i(x, a^{-i}))`.
    ///
    /// Solves a feasibility LP to confirm the set is nonempty.
    pub fn build(game: &StageGame, kind: EquilibriumKind, epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return invalid(format!("epsilon must be non-negative, got {epsilon}"));
        }
        let space = game.space();
        let n = space.outcome_count();
        let mut rows = Vec::new();
        for i in 0..game.num_players() {
            let k = space.actions(i);
            match kind {
                EquilibriumKind::Hannan => {
                    for x in 0..k {
                        rows.push(
                            (0..n)
                                .map(|a| game.deviation_payoff(i, x, a) - game.payoff(i, a))
                                .collect(),
                        );
                    }
                }
                EquilibriumKind::Correlated => {
                    for x in 0..k {
                        for y in 0..k {
                            rows.push(
                                (0..n)
                                    .map(|a| {
                                        if space.action_of(a, i) == x {
                                            game.deviation_payoff(i, y, a) - game.payoff(i, a)
                                        } else {
                                            0.0
                                        }
                                    })
                                    .collect(),
                            );
                        }
                    }
                }
            }
        }
        let poly = Self {
            kind,
            epsilon,
            outcomes: n,
            rows,
        };
        match poly.lp(0, vec![0.0; n]).solve()? {
            LpStatus::Optimal(_) => Ok(poly),
            status => Err(Error::Invariant(format!(
                "{kind:?} polytope reported empty by the feasibility LP ({status:?})"
            ))),
        }
    }

    pub fn kind(&self) -> EquilibriumKind {
        self.kind
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Largest value of `(R q)_r`.
    pub fn max_violation(&self, q: &[f64]) -> Result<f64> {
        if q.len() != self.outcomes {
            return invalid(format!(
                "distribution has {} entries, polytope has {} outcomes",
                q.len(),
                self.outcomes
            ));
        }
        Ok(self
            .rows
            .iter()
            .map(|r| r.iter().zip(q).map(|(a, b)| a * b).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max))
    }

    /// True iff every row satisfies `(R q)_r <= epsilon + tol`.
    pub fn contains(&self, q: &JointDistribution, tol: f64) -> Result<bool> {
        Ok(self.max_violation(q.as_slice())? <= self.epsilon + tol)
    }

    /// LP over `x` (the first `outcomes` variables) plus `extra` free-standing
    /// non-negative variables, with the simplex and polytope constraints on `x`.
    /// Rows are scaled to unit max-norm for conditioning.
    pub(crate) fn lp(&self, extra: usize, c: Vec<f64>) -> LinearProgram {
        let n = self.outcomes;
        let width = n + extra;
        debug_assert_eq!(c.len(), width);
        let mut lp = LinearProgram::new(c);
        let mut simplex = vec![0.0; width];
        simplex[..n].fill(1.0);
        lp.eq(simplex, 1.0);
        for r in &self.rows {
            let s = r.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            if s == 0.0 {
                continue;
            }
            let mut row = vec![0.0; width];
            for (dst, v) in row.iter_mut().zip(r) {
                *dst = v / s;
            }
            lp.le(row, self.epsilon / s);
        }
        lp
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::builders::{chicken, matching_pennies, small_regret_large_distance_game};

    #[test]
    fn row_counts() {
        let g = chicken();
        assert_eq!(EquilibriumPolytope::build(&g, EquilibriumKind::Hannan, 0.0).unwrap().rows().len(), 4);
        assert_eq!(EquilibriumPolytope::build(&g, EquilibriumKind::Correlated, 0.0).unwrap().rows().len(), 8);
    }

    #[test]
    fn membership_examples() {
        let mp = EquilibriumPolytope::build(&matching_pennies(), EquilibriumKind::Hannan, 0.0).unwrap();
        assert!(mp.contains(&JointDistribution::uniform(4), 1e-9).unwrap());
        let g = small_regret_large_distance_game(0.1).unwrap();
        let p0 = EquilibriumPolytope::build(&g, EquilibriumKind::Hannan, 0.0).unwrap();
        let p1 = EquilibriumPolytope::build(&g, EquilibriumKind::Hannan, 0.1).unwrap();
        let ad = JointDistribution::point_mass(4, 1);
        assert!(!p0.contains(&ad, 1e-9).unwrap());
        assert!(p1.contains(&ad, 1e-9).unwrap());
        assert!(p0.contains(&JointDistribution::point_mass(4, 0), 1e-9).unwrap());
        assert!(p0.contains(&JointDistribution::uniform(3), 1e-9).is_err());
    }

    #[test]
    fn chicken_correlated_target() {
        let g = chicken();
        let ce = EquilibriumPolytope::build(&g, EquilibriumKind::Correlated, 0.0).unwrap();
        let q = JointDistribution::new(vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0]).unwrap();
        assert!(ce.contains(&q, 1e-9).unwrap());
        assert!(!ce.contains(&JointDistribution::point_mass(4, 0), 1e-9).unwrap());
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("hannan".parse::<EquilibriumKind>().unwrap(), EquilibriumKind::Hannan);
        assert_eq!("ce".parse::<EquilibriumKind>().unwrap(), EquilibriumKind::Correlated);
        assert!("nash".parse::<EquilibriumKind>().is_err());
    }
}
