use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::distribution::JointDistribution;
use super::polytope::{EquilibriumKind, EquilibriumPolytope};
use crate::error::{invalid, Error, Result};
use crate::game::{GameSequence, StageGame};

/// Frank-Wolfe stops once the duality gap drops below this.
pub const FW_GAP_TOL: f64 = 1e-8;
pub const FW_MAX_ITER: usize = 100_000;
/// Membership tolerance under which the distance is reported as exactly zero.
pub const MEMBER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Norm {
    #[serde(rename = "1")]
    L1,
    #[serde(rename = "2")]
    L2,
    #[serde(rename = "inf")]
    Inf,
}

impl Norm {
    pub fn of(&self, v: impl IntoIterator<Item = f64>) -> f64 {
        let it = v.into_iter();
        match self {
            Norm::L1 => it.map(f64::abs).sum(),
            Norm::L2 => it.map(|x| x * x).sum::<f64>().sqrt(),
            Norm::Inf => it.fold(0.0, |m, x| m.max(x.abs())),
        }
    }

    /// Distance between two distinct point masses, `2^{1/p}`.
    pub fn diameter(&self) -> f64 {
        match self {
            Norm::L1 => 2.0,
            Norm::L2 => std::f64::consts::SQRT_2,
            Norm::Inf => 1.0,
        }
    }
}

impl std::str::FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(Norm::L1),
            "2" => Ok(Norm::L2),
            "inf" | "Inf" | "INF" => Ok(Norm::Inf),
            other => invalid(format!("unknown norm {other:?} (use 1, 2 or inf)")),
        }
    }
}

impl std::fmt::Display for Norm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Norm::L1 => "1",
            Norm::L2 => "2",
            Norm::Inf => "inf",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub value: f64,
    /// Feasible point attaining `value`.
    pub witness: Vec<f64>,
    /// Frank-Wolfe duality gap; the squared-distance error is at most this.
    /// Zero for the exact LP norms.
    pub gap_certificate: f64,
    pub iterations: usize,
}

/// `d_p(q, P) = min_{x in P} ||q - x||_p` with a feasible minimizer.
pub fn distance(q: &JointDistribution, poly: &EquilibriumPolytope, norm: Norm) -> Result<DistanceReport> {
    if poly.contains(q, MEMBER_TOL)? {
        return Ok(DistanceReport {
            value: 0.0,
            witness: q.as_slice().to_vec(),
            gap_certificate: 0.0,
            iterations: 0,
        });
    }
    match norm {
        Norm::L1 => lp_distance_l1(q.as_slice(), poly),
        Norm::Inf => lp_distance_inf(q.as_slice(), poly),
        Norm::L2 => frank_wolfe(q.as_slice(), poly),
    }
}

/// `min sum(u + v)` with `x - u + v = q`.
fn lp_distance_l1(q: &[f64], poly: &EquilibriumPolytope) -> Result<DistanceReport> {
    let n = q.len();
    let mut c = vec![0.0; 3 * n];
    c[n..].fill(1.0);
    let mut lp = poly.lp(2 * n, c);
    for (a, &qa) in q.iter().enumerate() {
        let mut row = vec![0.0; 3 * n];
        row[a] = 1.0;
        row[n + a] = -1.0;
        row[2 * n + a] = 1.0;
        lp.eq(row, qa);
    }
    let s = lp.solve()?.optimal("l1 distance")?;
    Ok(exact_report(q, s.x[..n].to_vec(), Norm::L1, s.iterations))
}

/// `min s` with `-s <= x_a - q_a <= s`.
fn lp_distance_inf(q: &[f64], poly: &EquilibriumPolytope) -> Result<DistanceReport> {
    let n = q.len();
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    let mut lp = poly.lp(1, c);
    for (a, &qa) in q.iter().enumerate() {
        let mut row = vec![0.0; n + 1];
        row[a] = 1.0;
        row[n] = -1.0;
        lp.le(row.clone(), qa);
        row[a] = -1.0;
        lp.le(row, -qa);
    }
    let s = lp.solve()?.optimal("inf distance")?;
    Ok(exact_report(q, s.x[..n].to_vec(), Norm::Inf, s.iterations))
}

fn exact_report(q: &[f64], witness: Vec<f64>, norm: Norm, iterations: usize) -> DistanceReport {
    let value = norm.of(q.iter().zip(&witness).map(|(a, b)| a - b));
    DistanceReport {
        value,
        witness,
        gap_certificate: 0.0,
        iterations,
    }
}

/// Linear minimization oracle over the polytope.
struct Lmo<'a> {
    poly: &'a EquilibriumPolytope,
}

impl Lmo<'_> {
    fn vertex(&self, direction: &[f64]) -> Result<Vec<f64>> {
        let s = self
            .poly
            .lp(0, direction.to_vec())
            .solve()?
            .optimal("linear minimization oracle")?;
        Ok(s.x)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn same_vertex(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-12)
}

/// Away-step Frank-Wolfe on `f(x) = ||x - q||^2` with exact line search.
fn frank_wolfe(q: &[f64], poly: &EquilibriumPolytope) -> Result<DistanceReport> {
    let n = q.len();
    let lmo = Lmo { poly };
    let neg_q: Vec<f64> = q.iter().map(|v| -v).collect();
    let mut active: Vec<(Vec<f64>, f64)> = vec![(lmo.vertex(&neg_q)?, 1.0)];
    let mut x = active[0].0.clone();
    let mut grad = vec![0.0; n];
    let mut gap = f64::INFINITY;
    let mut iterations = 0;
    while iterations < FW_MAX_ITER {
        iterations += 1;
        for a in 0..n {
            grad[a] = 2.0 * (x[a] - q[a]);
        }
        let s = lmo.vertex(&grad)?;
        gap = dot(&grad, &x) - dot(&grad, &s);
        if gap <= FW_GAP_TOL {
            break;
        }
        let (away_idx, away_val) = active
            .iter()
            .enumerate()
            .map(|(i, (v, _))| (i, dot(&grad, v)))
            .fold((0, f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b });
        let away_gap = away_val - dot(&grad, &x);
        let toward = gap >= away_gap;
        let (dir, step_max): (Vec<f64>, f64) = if toward {
            (s.iter().zip(&x).map(|(a, b)| a - b).collect(), 1.0)
        } else {
            let w = active[away_idx].1;
            let v = &active[away_idx].0;
            (x.iter().zip(v).map(|(a, b)| a - b).collect(), w / (1.0 - w))
        };
        let dd = dot(&dir, &dir);
        if dd == 0.0 {
            break;
        }
        let step = (-dot(&grad, &dir) / (2.0 * dd)).clamp(0.0, step_max);
        if toward {
            for (_, w) in &mut active {
                *w *= 1.0 - step;
            }
            match active.iter_mut().find(|(v, _)| same_vertex(v, &s)) {
                Some((_, w)) => *w += step,
                None => active.push((s, step)),
            }
            if step >= 1.0 {
                active.retain(|(_, w)| *w >= 1.0 - 1e-15);
            }
        } else {
            for (_, w) in &mut active {
                *w *= 1.0 + step;
            }
            active[away_idx].1 -= step;
        }
        active.retain(|(_, w)| *w > 1e-15);
        let total: f64 = active.iter().map(|(_, w)| w).sum();
        x.fill(0.0);
        for (v, w) in &active {
            for (xa, va) in x.iter_mut().zip(v) {
                *xa += w / total * va;
            }
        }
    }
    if gap > FW_GAP_TOL {
        return Err(Error::Numerical(format!(
            "Frank-Wolfe stopped after {iterations} iterations with gap {gap:e}"
        )));
    }
    let value = Norm::L2.of(q.iter().zip(&x).map(|(a, b)| a - b));
    Ok(DistanceReport {
        value,
        witness: x,
        gap_certificate: gap.max(0.0),
        iterations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchDistance {
    pub start: usize,
    pub end: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackingReport {
    /// `sum_k |T_(k)| d(q_(k), E_(k))`.
    pub total: f64,
    pub batches: Vec<BatchDistance>,
}

/// Tracking error of per-batch distributions against the equilibrium sets of
/// the batch games.
pub fn tracking_error(
    seq: &GameSequence,
    batch_dists: &[JointDistribution],
    kind: EquilibriumKind,
    norm: Norm,
    epsilon: f64,
) -> Result<TrackingReport> {
    let batches = seq.segment_batches();
    if batch_dists.len() != batches.len() {
        return invalid(format!(
            "{} batch distributions for {} batches",
            batch_dists.len(),
            batches.len()
        ));
    }
    let mut total = 0.0;
    let mut out = Vec::with_capacity(batches.len());
    for (b, q) in batches.iter().zip(batch_dists) {
        let poly = EquilibriumPolytope::build(seq.stage(b.start), kind, epsilon)?;
        let d = distance(q, &poly, norm)?.value;
        total += b.len() as f64 * d;
        out.push(BatchDistance {
            start: b.start,
            end: b.end,
            distance: d,
        });
    }
    Ok(TrackingReport {
        total,
        batches: out,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceBound {
    /// `2^{1/p}`, the simplex diameter.
    pub cap: f64,
    /// Largest sampled `d(q, H) / eps` over `eps`-approximate members `q`.
    pub empirical_constant: f64,
    /// `min(empirical_constant * eps, cap)`.
    pub bound: f64,
}

/// Estimates the constant in `d_p(q, H) <= min(const eps, 2^{1/p})` for
/// `eps`-approximate Hannan members by probing point masses, vertices of the
/// `eps`-polytope in random directions, and random interior points.
pub fn regret_to_distance_bound(
    game: &StageGame,
    eps: f64,
    norm: Norm,
    samples: usize,
    seed: u64,
) -> Result<DistanceBound> {
    let cap = norm.diameter();
    if eps == 0.0 {
        return Ok(DistanceBound {
            cap,
            empirical_constant: 0.0,
            bound: 0.0,
        });
    }
    let exact = EquilibriumPolytope::build(game, EquilibriumKind::Hannan, 0.0)?;
    let approx = EquilibriumPolytope::build(game, EquilibriumKind::Hannan, eps)?;
    let n = exact.outcomes();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates: Vec<Vec<f64>> = (0..n)
        .map(|a| JointDistribution::point_mass(n, a).as_slice().to_vec())
        .collect();
    for _ in 0..samples {
        let c: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        candidates.push(approx.lp(0, c).solve()?.optimal("vertex probe")?.x);
        let w: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
        let s: f64 = w.iter().sum();
        candidates.push(w.into_iter().map(|v| v / s).collect());
    }
    let mut worst: f64 = 0.0;
    for c in candidates {
        let q = JointDistribution::new(c)?;
        if approx.contains(&q, MEMBER_TOL)? {
            worst = worst.max(distance(&q, &exact, norm)?.value / eps);
        }
    }
    Ok(DistanceBound {
        cap,
        empirical_constant: worst,
        bound: (worst * eps).min(cap),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::builders::{counterexample_games, small_regret_large_distance_game};

    #[test]
    fn singleton_hannan_set_distance() {
        let g = small_regret_large_distance_game(0.1).unwrap();
        let h = EquilibriumPolytope::build(&g, EquilibriumKind::Hannan, 0.0).unwrap();
        let q = JointDistribution::point_mass(4, 1);
        let d2 = distance(&q, &h, Norm::L2).unwrap();
        assert!((d2.value - std::f64::consts::SQRT_2).abs() < 1e-7);
        assert!(h.contains(&JointDistribution::new(d2.witness.clone()).unwrap(), 1e-7).unwrap());
        assert!((distance(&q, &h, Norm::L1).unwrap().value - 2.0).abs() < 1e-9);
        assert!((distance(&q, &h, Norm::Inf).unwrap().value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn segment_hannan_set_distance() {
        let (_, g2) = counterexample_games(0.1).unwrap();
        let h = EquilibriumPolytope::build(&g2, EquilibriumKind::Hannan, 0.0).unwrap();
        let q = JointDistribution::point_mass(4, 2);
        let d = distance(&q, &h, Norm::L2).unwrap();
        assert!((d.value - 1.5f64.sqrt()).abs() < 1e-7, "{}", d.value);
    }

    #[test]
    fn members_have_zero_distance() {
        let g = small_regret_large_distance_game(0.1).unwrap();
        let h = EquilibriumPolytope::build(&g, EquilibriumKind::Hannan, 0.0).unwrap();
        let d = distance(&JointDistribution::point_mass(4, 0), &h, Norm::L2).unwrap();
        assert_eq!(d.value, 0.0);
        assert_eq!(d.iterations, 0);
    }

    #[test]
    fn bound_examples() {
        let g = small_regret_large_distance_game(0.1).unwrap();
        let b = regret_to_distance_bound(&g, 0.1, Norm::L2, 20, 1).unwrap();
        assert!(b.empirical_constant >= std::f64::consts::SQRT_2 / 0.1 - 1e-6);
        assert!((b.bound - b.cap).abs() < 1e-6);
        assert_eq!(regret_to_distance_bound(&g, 0.0, Norm::L2, 5, 1).unwrap().bound, 0.0);
    }

    #[test]
    fn norm_parsing() {
        assert_eq!("inf".parse::<Norm>().unwrap(), Norm::Inf);
        assert_eq!(serde_json::to_string(&Norm::L2).unwrap(), "\"2\"");
        assert!("3".parse::<Norm>().is_err());
    }
}
