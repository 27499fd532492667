//! Social welfare, static and dynamic price of anarchy, smoothness, and the
//! planner's switch-constrained welfare fraction.
//!
//! Welfare assumes non-negative payoffs. When a sequence has a negative payoff
//! anywhere, every payoff is shifted by `+M` first and the shift is reported.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::game::{GameSequence, StageGame};
use crate::geometry::{lp::LpStatus, EquilibriumKind, EquilibriumPolytope};
use crate::oracles::{external_dynamic_benchmark, GainMatrix};

/// Node budget for the exact planner DP.
pub const BETA_EXACT_NODES: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WelfareFunction {
    /// Sum of payoffs.
    Additive,
    /// Smallest payoff.
    Minimum,
    /// Explicit welfare per outcome, used unshifted.
    Table { values: Vec<f64> },
}

/// Shift making every payoff of the sequence non-negative: `M` or 0.
pub fn payoff_shift(seq: &GameSequence) -> f64 {
    let negative = seq.segments().iter().any(|s| {
        (0..s.game.num_players()).any(|i| s.game.payoffs(i).iter().any(|&u| u < 0.0))
    });
    if negative {
        seq.bound()
    } else {
        0.0
    }
}

fn game_shift(game: &StageGame) -> f64 {
    if (0..game.num_players()).any(|i| game.payoffs(i).iter().any(|&u| u < 0.0)) {
        game.bound()
    } else {
        0.0
    }
}

impl WelfareFunction {
    /// Welfare of every outcome of `game`, payoffs shifted by `shift`.
    pub fn table(&self, game: &StageGame, shift: f64) -> Result<Vec<f64>> {
        let n = game.space().outcome_count();
        let players = game.num_players();
        match self {
            WelfareFunction::Additive => Ok((0..n)
                .map(|a| (0..players).map(|i| game.payoff(i, a) + shift).sum())
                .collect()),
            WelfareFunction::Minimum => Ok((0..n)
                .map(|a| {
                    (0..players)
                        .map(|i| game.payoff(i, a) + shift)
                        .fold(f64::INFINITY, f64::min)
                })
                .collect()),
            WelfareFunction::Table { values } => {
                if values.len() != n {
                    return invalid(format!("welfare table has {} entries, game has {n} outcomes", values.len()));
                }
                if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                    return invalid("welfare table entries must be finite and non-negative");
                }
                Ok(values.clone())
            }
        }
    }
}

/// Per-batch welfare tables for a sequence, with the shift used.
fn batch_tables(seq: &GameSequence, w: &WelfareFunction) -> Result<(Vec<(usize, Vec<f64>)>, f64)> {
    let shift = payoff_shift(seq);
    let tables = seq
        .segments()
        .iter()
        .map(|s| Ok((s.length, w.table(&s.game, shift)?)))
        .collect::<Result<_>>()?;
    Ok((tables, shift))
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// `OPT-SW = sum_t max_a W_t(a)`.
pub fn optimal_welfare(seq: &GameSequence, w: &WelfareFunction) -> Result<f64> {
    let (tables, _) = batch_tables(seq, w)?;
    Ok(tables.iter().map(|(len, t)| *len as f64 * max_of(t)).sum())
}

/// Ratio with the conventions `w / 0 = inf` for `w > 0` and `0 / 0 = 1`.
pub fn welfare_ratio(num: f64, den: f64) -> f64 {
    const ZERO: f64 = 1e-12;
    if den.abs() <= ZERO {
        if num.abs() <= ZERO {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        num / den
    }
}

/// Smallest expected welfare over the equilibrium polytope.
fn worst_equilibrium_welfare(game: &StageGame, table: &[f64], kind: EquilibriumKind) -> Result<f64> {
    let poly = EquilibriumPolytope::build(game, kind, 0.0)?;
    match poly.lp(0, table.to_vec()).solve()? {
        LpStatus::Optimal(s) => Ok(s.objective.max(0.0)),
        other => Err(crate::Error::Numerical(format!("worst-case welfare LP reported {other:?}"))),
    }
}

/// Static price of anarchy: best outcome welfare over the worst equilibrium welfare.
pub fn poa(game: &StageGame, w: &WelfareFunction, kind: EquilibriumKind) -> Result<f64> {
    let table = w.table(game, game_shift(game))?;
    let worst = worst_equilibrium_welfare(game, &table, kind)?;
    Ok(welfare_ratio(max_of(&table), worst))
}

/// Finite-horizon dynamic price of anarchy
/// `sum_t max W_t / sum_t min_{q in E_t} E_q[W_t]`.
pub fn dyn_poa(seq: &GameSequence, w: &WelfareFunction, kind: EquilibriumKind) -> Result<f64> {
    let (tables, _) = batch_tables(seq, w)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for (seg, (len, table)) in seq.segments().iter().zip(&tables) {
        num += *len as f64 * max_of(table);
        den += *len as f64 * worst_equilibrium_welfare(&seg.game, table, kind)?;
    }
    Ok(welfare_ratio(num, den))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaValue {
    pub value: f64,
    /// False when `value` is only the joint-switch lower bound.
    pub exact: bool,
}

/// Largest fraction of `OPT-SW` a planner reaches with outcome sequences in
/// which every player changes action at most `switches` times.
///
/// Exact DP over (outcome, per-player switch counts) when
/// `T |A| (C + 1)^N <= 10^6`; otherwise the value over sequences whose joint
/// outcome changes at most `C` times, which is feasible and hence a lower bound.
pub fn beta(seq: &GameSequence, w: &WelfareFunction, switches: usize) -> Result<BetaValue> {
    let (tables, _) = batch_tables(seq, w)?;
    let opt: f64 = tables.iter().map(|(len, t)| *len as f64 * max_of(t)).sum();
    let t_len = seq.horizon();
    let c = switches.min(t_len.saturating_sub(1));
    let space = seq.space();
    let n_out = space.outcome_count();
    let players = space.num_players();
    let layers = (c + 1).checked_pow(players as u32);
    let nodes = layers.and_then(|l| l.checked_mul(n_out)).and_then(|s| s.checked_mul(t_len));
    let per_period = || tables.iter().flat_map(|(len, t)| std::iter::repeat_n(t, *len));
    let (value, exact) = match nodes {
        Some(nodes) if nodes <= BETA_EXACT_NODES => {
            let layers = layers.expect("checked");
            // Mixed-radix index of per-player switch counts.
            let counts: Vec<Vec<usize>> = (0..layers)
                .map(|mut s| {
                    (0..players)
                        .map(|_| {
                            let d = s % (c + 1);
                            s /= c + 1;
                            d
                        })
                        .collect()
                })
                .collect();
            let radix: Vec<usize> = (0..players).map(|i| (c + 1).pow(i as u32)).collect();
            let decoded: Vec<Vec<usize>> = (0..n_out).map(|a| space.decode(a)).collect();
            let mut dp = vec![f64::NEG_INFINITY; layers * n_out];
            let mut periods = per_period();
            let first = periods.next().expect("horizon is positive");
            dp[..n_out].copy_from_slice(first);
            let mut next = vec![f64::NEG_INFINITY; layers * n_out];
            for table in periods {
                next.fill(f64::NEG_INFINITY);
                for (s, cs) in counts.iter().enumerate() {
                    for prev in 0..n_out {
                        let v = dp[s * n_out + prev];
                        if v == f64::NEG_INFINITY {
                            continue;
                        }
                        'next: for (a, acts) in decoded.iter().enumerate() {
                            let mut s2 = s;
                            for i in 0..players {
                                if acts[i] != decoded[prev][i] {
                                    if cs[i] == c {
                                        continue 'next;
                                    }
                                    s2 += radix[i];
                                }
                            }
                            let cell = &mut next[s2 * n_out + a];
                            *cell = cell.max(v + table[a]);
                        }
                    }
                }
                std::mem::swap(&mut dp, &mut next);
            }
            (max_of(&dp), true)
        }
        _ => {
            let rows: Vec<Vec<f64>> = per_period().cloned().collect();
            (external_dynamic_benchmark(&GainMatrix::new(&rows)?, c).0, false)
        }
    };
    Ok(BetaValue {
        value: welfare_ratio(value, opt).min(1.0),
        exact,
    })
}

/// Sum over players of the payoff from unilaterally switching to `target`'s action.
fn deviation_sum(game: &StageGame, a: usize, target: usize, shift: f64) -> f64 {
    let space = game.space();
    (0..game.num_players())
        .map(|i| game.deviation_payoff(i, space.action_of(target, i), a) + shift)
        .sum()
}

/// True iff `sum_i u^i(a'^i, a^{-i}) >= lambda W(a') - mu W(a)` for all pairs.
pub fn smoothness_check(game: &StageGame, w: &WelfareFunction, lambda: f64, mu: f64) -> Result<bool> {
    if !(lambda >= 0.0) || !(mu > -1.0) {
        return invalid(format!("need lambda >= 0 and mu > -1, got ({lambda}, {mu})"));
    }
    let shift = game_shift(game);
    let table = w.table(game, shift)?;
    let n = table.len();
    Ok((0..n).all(|a| {
        (0..n).all(|b| deviation_sum(game, a, b, shift) >= lambda * table[b] - mu * table[a] - 1e-12)
    }))
}

/// Largest `lambda` for which the game is `(lambda, mu)`-smooth.
pub fn best_lambda(game: &StageGame, w: &WelfareFunction, mu: f64) -> Result<f64> {
    if !(mu > -1.0) {
        return invalid(format!("need mu > -1, got {mu}"));
    }
    let shift = game_shift(game);
    let table = w.table(game, shift)?;
    let n = table.len();
    let mut best = f64::INFINITY;
    for a in 0..n {
        for b in 0..n {
            if table[b] > 0.0 {
                best = best.min((deviation_sum(game, a, b, shift) + mu * table[a]) / table[b]);
            }
        }
    }
    Ok(if best.is_finite() { best.max(0.0) } else { 0.0 })
}

/// `lambda beta / (1 + mu) OPT-SW - N / (1 + mu) g`.
pub fn welfare_lower_bound(lambda: f64, mu: f64, beta: f64, opt_sw: f64, players: usize, regret: f64) -> Result<f64> {
    if !(mu > -1.0) {
        return invalid(format!("need mu > -1, got {mu}"));
    }
    Ok(lambda * beta / (1.0 + mu) * opt_sw - players as f64 / (1.0 + mu) * regret)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Smoothness {
    pub lambda: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WelfareReport {
    pub opt_sw: f64,
    /// Sum over periods of the worst equilibrium welfare.
    pub worst_case: f64,
    pub poa: f64,
    pub beta: BetaValue,
    /// Smoothness parameters valid for every stage game of the sequence.
    pub smoothness: Smoothness,
    pub shift: f64,
}

pub fn welfare_report(
    seq: &GameSequence,
    w: &WelfareFunction,
    kind: EquilibriumKind,
    switches: usize,
    mu: f64,
) -> Result<WelfareReport> {
    let (tables, shift) = batch_tables(seq, w)?;
    let mut opt_sw = 0.0;
    let mut worst_case = 0.0;
    let mut lambda = f64::INFINITY;
    for (seg, (len, table)) in seq.segments().iter().zip(&tables) {
        opt_sw += *len as f64 * max_of(table);
        worst_case += *len as f64 * worst_equilibrium_welfare(&seg.game, table, kind)?;
        lambda = lambda.min(best_lambda(&seg.game, w, mu)?);
    }
    Ok(WelfareReport {
        opt_sw,
        worst_case,
        poa: welfare_ratio(opt_sw, worst_case),
        beta: beta(seq, w, switches)?,
        smoothness: Smoothness { lambda, mu },
        shift,
    })
}

/// Welfare of one realized outcome, using the sequence-wide shift.
pub fn outcome_welfare(game: &StageGame, outcome: usize, w: &WelfareFunction, shift: f64) -> f64 {
    let players = game.num_players();
    match w {
        WelfareFunction::Additive => (0..players).map(|i| game.payoff(i, outcome) + shift).sum(),
        WelfareFunction::Minimum => (0..players)
            .map(|i| game.payoff(i, outcome) + shift)
            .fold(f64::INFINITY, f64::min),
        WelfareFunction::Table { values } => values[outcome],
    }
}
