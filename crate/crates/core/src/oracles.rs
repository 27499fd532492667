//! Hindsight benchmarks: the best action sequence with a bounded number of
//! switches (external) and the best interval-partitioned swap deviation
//! (internal).

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::game::{Batch, GameSequence};

/// Beyond this many backtracking cells the oracles return values only.
const MAX_TRACE_CELLS: usize = 1 << 27;

/// `gains[t][x] = u_t(x, a_t^{-i})` for one player along a realized path.
#[derive(Debug, Clone, PartialEq)]
pub struct GainMatrix {
    actions: usize,
    gains: Vec<f64>,
}

impl GainMatrix {
    pub fn new(rows: &[Vec<f64>]) -> Result<Self> {
        let actions = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || actions == 0 {
            return invalid("gain matrix is empty");
        }
        if rows.iter().any(|r| r.len() != actions) {
            return invalid("gain matrix rows differ in length");
        }
        if rows.iter().flatten().any(|g| !g.is_finite()) {
            return invalid("gain matrix has non-finite entries");
        }
        Ok(Self {
            actions,
            gains: rows.concat(),
        })
    }

    /// Counterfactual stage payoffs of `player` against the opponents' realized
    /// actions in `outcomes` (one outcome index per period).
    pub fn from_trace(outcomes: &[usize], seq: &GameSequence, player: usize) -> Result<Self> {
        check_trace(outcomes, seq, player)?;
        let actions = seq.space().actions(player);
        let mut gains = Vec::with_capacity(outcomes.len() * actions);
        for (t, &o) in (1..).zip(outcomes) {
            let game = seq.stage(t);
            gains.extend((0..actions).map(|x| game.deviation_payoff(player, x, o)));
        }
        Ok(Self { actions, gains })
    }

    pub fn horizon(&self) -> usize {
        self.gains.len() / self.actions
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    /// Row of period `t`, 0-based.
    pub fn row(&self, t: usize) -> &[f64] {
        &self.gains[t * self.actions..(t + 1) * self.actions]
    }
}

fn check_trace(outcomes: &[usize], seq: &GameSequence, player: usize) -> Result<()> {
    if player >= seq.num_players() {
        return invalid(format!("player {player} out of range"));
    }
    if outcomes.len() != seq.horizon() {
        return invalid(format!(
            "trace has {} periods, sequence has {}",
            outcomes.len(),
            seq.horizon()
        ));
    }
    let n = seq.space().outcome_count();
    if let Some(o) = outcomes.iter().find(|&&o| o >= n) {
        return invalid(format!("outcome index {o} out of range"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegretKind {
    External,
    Internal,
}

/// Constant action over periods `start..=end` (1-based).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionRun {
    pub start: usize,
    pub end: usize,
    pub action: usize,
}

/// Swap `from -> to` applied over periods `start..=end` (1-based).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwapInterval {
    pub start: usize,
    pub end: usize,
    pub from: usize,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Comparator {
    Actions(Vec<ActionRun>),
    Swaps(Vec<SwapInterval>),
}

impl Comparator {
    /// Per-period actions of an external comparator.
    pub fn expand(&self) -> Option<Vec<usize>> {
        match self {
            Comparator::Actions(runs) => Some(
                runs.iter()
                    .flat_map(|r| std::iter::repeat_n(r.action, r.end - r.start + 1))
                    .collect(),
            ),
            Comparator::Swaps(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretReport {
    pub kind: RegretKind,
    pub benchmark: f64,
    pub realized: f64,
    pub regret: f64,
    /// Optimal comparator; `None` when the instance is too large to backtrack.
    pub comparator: Option<Comparator>,
    /// Switch budget the benchmark was allowed.
    pub switches: usize,
}

/// Best value of a sequence with at most `switches` action changes, with one
/// optimizer (ties: earliest switch, then lowest action).
pub fn external_dynamic_benchmark(g: &GainMatrix, switches: usize) -> (f64, Option<Vec<ActionRun>>) {
    external_dp(g, switches, true)
}

/// Value of [`external_dynamic_benchmark`] without reconstructing the optimizer.
pub fn external_dynamic_value(g: &GainMatrix, switches: usize) -> f64 {
    external_dp(g, switches, false).0
}

fn external_dp(g: &GainMatrix, switches: usize, want_path: bool) -> (f64, Option<Vec<ActionRun>>) {
    let t_len = g.horizon();
    let k = g.actions();
    let c_max = switches.min(t_len - 1);
    if c_max == t_len - 1 {
        return per_period_best(g);
    }
    let layers = c_max + 1;
    let trace = want_path && t_len * layers * k <= MAX_TRACE_CELLS;
    // dp[c * k + x]: best value ending in x with at most c switches.
    let mut dp: Vec<f64> = (0..layers).flat_map(|_| g.row(0).iter().copied()).collect();
    let mut next = dp.clone();
    let mut best = vec![0.0; layers];
    let mut arg = vec![0usize; layers];
    // Per (t, c, x): whether the optimum at (t, c, x) switched in from argbest.
    let mut switched = if trace { vec![false; t_len * layers * k] } else { Vec::new() };
    let mut argbest = if trace { vec![0u32; t_len * layers] } else { Vec::new() };
    for t in 1..t_len {
        for c in 0..layers {
            let (v, a) = argmax(&dp[c * k..(c + 1) * k]);
            best[c] = v;
            arg[c] = a;
        }
        let row = g.row(t);
        for c in 0..layers {
            if trace {
                argbest[t * layers + c] = if c > 0 { arg[c - 1] as u32 } else { 0 };
            }
            for x in 0..k {
                let stay = dp[c * k + x];
                let mv = if c > 0 { best[c - 1] } else { f64::NEG_INFINITY };
                let (v, sw) = if mv > stay { (mv, true) } else { (stay, false) };
                next[c * k + x] = row[x] + v;
                if trace {
                    switched[(t * layers + c) * k + x] = sw;
                }
            }
        }
        std::mem::swap(&mut dp, &mut next);
    }
    let (value, mut x) = argmax(&dp[c_max * k..]);
    if !trace {
        return (value, None);
    }
    let mut path = vec![0usize; t_len];
    let mut c = c_max;
    for t in (0..t_len).rev() {
        path[t] = x;
        if t > 0 && switched[(t * layers + c) * k + x] {
            x = argbest[t * layers + c] as usize;
            c -= 1;
        }
    }
    (value, Some(runs_of(&path)))
}

fn per_period_best(g: &GainMatrix) -> (f64, Option<Vec<ActionRun>>) {
    let mut value = 0.0;
    let mut path = Vec::with_capacity(g.horizon());
    for t in 0..g.horizon() {
        let (v, x) = argmax(g.row(t));
        value += v;
        path.push(x);
    }
    (value, Some(runs_of(&path)))
}

/// Maximum and lowest index attaining it.
fn argmax(v: &[f64]) -> (f64, usize) {
    let mut best = (v[0], 0);
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > best.0 {
            best = (x, i);
        }
    }
    best
}

fn runs_of(path: &[usize]) -> Vec<ActionRun> {
    let mut runs: Vec<ActionRun> = Vec::new();
    for (t, &a) in (1..).zip(path) {
        match runs.last_mut() {
            Some(r) if r.action == a => r.end = t,
            _ => runs.push(ActionRun { start: t, end: t, action: a }),
        }
    }
    runs
}

/// Best partition of the horizon into at most `switches + 1` intervals, each
/// scored by its most profitable swap `x -> y` applied to the played actions.
///
/// The score of `[i + 1, j]` under swap `(x, y)` is `P_xy[j] - P_xy[i]` for
/// prefix sums `P_xy`, so the interval DP keeps a running maximum of
/// `F[c - 1][i] - P_xy[i]` per pair and runs in `O(T (C + 1) K^2)`.
pub fn internal_dynamic_benchmark(
    actions: &[usize],
    g: &GainMatrix,
    switches: usize,
) -> Result<(f64, Option<Vec<SwapInterval>>)> {
    internal_dp(actions, g, switches, true)
}

/// Value of [`internal_dynamic_benchmark`] without reconstructing the partition.
pub fn internal_dynamic_value(actions: &[usize], g: &GainMatrix, switches: usize) -> Result<f64> {
    Ok(internal_dp(actions, g, switches, false)?.0)
}

fn internal_dp(
    actions: &[usize],
    g: &GainMatrix,
    switches: usize,
    want_path: bool,
) -> Result<(f64, Option<Vec<SwapInterval>>)> {
    let t_len = g.horizon();
    let k = g.actions();
    if actions.len() != t_len {
        return invalid(format!(
            "{} actions for a gain matrix of horizon {t_len}",
            actions.len()
        ));
    }
    if let Some(a) = actions.iter().find(|&&a| a >= k) {
        return invalid(format!("action {a} out of range ({k} actions)"));
    }
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|x| (0..k).filter(move |&y| y != x).map(move |y| (x, y)))
        .collect();
    // prefix[p][t] for t in 0..=T.
    let mut prefix = vec![vec![0.0; t_len + 1]; pairs.len()];
    for (p, &(x, y)) in pairs.iter().enumerate() {
        for t in 0..t_len {
            let row = g.row(t);
            let d = if actions[t] == x { row[y] - row[x] } else { 0.0 };
            prefix[p][t + 1] = prefix[p][t] + d;
        }
    }
    let layers = switches.min(t_len - 1) + 1;
    let trace = want_path && t_len * layers <= MAX_TRACE_CELLS / 4;
    // f[c][j]: best value over [1, j] with at most c + 1 intervals.
    let mut f = vec![vec![0.0; t_len + 1]; layers];
    // choice[c][j] = (i, pair): last interval is [i + 1, j] under `pair`,
    // pair == usize::MAX meaning the empty swap.
    let mut choice = if trace {
        vec![vec![(0u32, u32::MAX); t_len + 1]; layers]
    } else {
        Vec::new()
    };
    let mut inherit = if trace { vec![vec![false; t_len + 1]; layers] } else { Vec::new() };
    for j in 1..=t_len {
        let mut best = (0.0, u32::MAX);
        for (p, pre) in prefix.iter().enumerate() {
            let v = pre[j];
            if v > best.0 {
                best = (v, p as u32);
            }
        }
        f[0][j] = best.0;
        if trace {
            choice[0][j] = (0, best.1);
        }
    }
    for c in 1..layers {
        // run[p] = max_{1 <= i < j} f[c-1][i] - prefix[p][i]; run_empty for the empty swap.
        let mut run = vec![(f64::NEG_INFINITY, 0usize); pairs.len()];
        let mut run_empty = (f64::NEG_INFINITY, 0usize);
        for j in 1..=t_len {
            if j >= 2 {
                let i = j - 1;
                for (p, r) in run.iter_mut().enumerate() {
                    let v = f[c - 1][i] - prefix[p][i];
                    if v > r.0 {
                        *r = (v, i);
                    }
                }
                if f[c - 1][i] > run_empty.0 {
                    run_empty = (f[c - 1][i], i);
                }
            }
            let mut best = f[c - 1][j];
            let mut pick = None;
            if run_empty.0 > best {
                best = run_empty.0;
                pick = Some((run_empty.1, u32::MAX));
            }
            for (p, r) in run.iter().enumerate() {
                let v = r.0 + prefix[p][j];
                if v > best {
                    best = v;
                    pick = Some((r.1, p as u32));
                }
            }
            f[c][j] = best;
            if trace {
                match pick {
                    None => inherit[c][j] = true,
                    Some((i, p)) => choice[c][j] = (i as u32, p),
                }
            }
        }
    }
    let value = f[layers - 1][t_len];
    if !trace {
        return Ok((value, None));
    }
    let mut intervals = Vec::new();
    let (mut c, mut j) = (layers - 1, t_len);
    while j > 0 {
        if c > 0 && inherit[c][j] {
            c -= 1;
            continue;
        }
        let (i, p) = choice[c][j];
        let i = i as usize;
        let (from, to) = if p == u32::MAX {
            (0, 0)
        } else {
            pairs[p as usize]
        };
        intervals.push(SwapInterval { start: i + 1, end: j, from, to });
        j = i;
        c = c.saturating_sub(1);
    }
    intervals.reverse();
    Ok((value, Some(intervals)))
}

/// Regret of `player` on a realized path of joint outcomes against the
/// benchmark of the given kind with `switches` allowed changes.
///
/// Payoffs are stage-game means; any payoff noise is left out on both sides.
pub fn realized_regret(
    outcomes: &[usize],
    seq: &GameSequence,
    player: usize,
    switches: usize,
    kind: RegretKind,
) -> Result<RegretReport> {
    let g = GainMatrix::from_trace(outcomes, seq, player)?;
    let space = seq.space();
    let played: Vec<usize> = outcomes.iter().map(|&o| space.action_of(o, player)).collect();
    let realized: f64 = played.iter().enumerate().map(|(t, &a)| g.row(t)[a]).sum();
    let switches = switches.min(g.horizon() - 1);
    match kind {
        RegretKind::External => {
            let (benchmark, runs) = external_dynamic_benchmark(&g, switches);
            Ok(RegretReport {
                kind,
                benchmark,
                realized,
                regret: benchmark - realized,
                comparator: runs.map(Comparator::Actions),
                switches,
            })
        }
        RegretKind::Internal => {
            // The internal benchmark already measures the gain of the swaps.
            let (gain, swaps) = internal_dynamic_benchmark(&played, &g, switches)?;
            Ok(RegretReport {
                kind,
                benchmark: realized + gain,
                realized,
                regret: gain,
                comparator: swaps.map(Comparator::Swaps),
                switches,
            })
        }
    }
}

/// Regret value only, for bulk use in simulations.
pub fn realized_regret_value(
    outcomes: &[usize],
    seq: &GameSequence,
    player: usize,
    switches: usize,
    kind: RegretKind,
) -> Result<f64> {
    let g = GainMatrix::from_trace(outcomes, seq, player)?;
    let space = seq.space();
    let played: Vec<usize> = outcomes.iter().map(|&o| space.action_of(o, player)).collect();
    match kind {
        RegretKind::External => {
            let realized: f64 = played.iter().enumerate().map(|(t, &a)| g.row(t)[a]).sum();
            Ok(external_dynamic_value(&g, switches) - realized)
        }
        RegretKind::Internal => internal_dynamic_value(&played, &g, switches),
    }
}

/// Static regret `max_x sum_{t in B} (u_t(x, a_t^{-i}) - u_t(a_t))` for each batch.
pub fn batch_regrets(
    outcomes: &[usize],
    seq: &GameSequence,
    player: usize,
    batches: &[Batch],
) -> Result<Vec<f64>> {
    check_trace(outcomes, seq, player)?;
    let space = seq.space();
    let k = space.actions(player);
    let mut out = Vec::with_capacity(batches.len());
    let mut totals = vec![0.0; k];
    for b in batches {
        if b.start == 0 || b.end > outcomes.len() || b.start > b.end {
            return invalid(format!("batch [{}, {}] outside the horizon", b.start, b.end));
        }
        totals.fill(0.0);
        let mut realized = 0.0;
        for t in b.start..=b.end {
            let o = outcomes[t - 1];
            let game = seq.stage(t);
            for (x, tot) in totals.iter_mut().enumerate() {
                *tot += game.deviation_payoff(player, x, o);
            }
            realized += game.payoff(player, o);
        }
        out.push(argmax(&totals).0 - realized);
    }
    Ok(out)
}

/// Per-batch static regret over the sequence's own batches, each clipped at
/// zero before summing, so good batches cannot offset bad ones.
pub fn clipped_batch_regret(outcomes: &[usize], seq: &GameSequence, player: usize) -> Result<f64> {
    let r = batch_regrets(outcomes, seq, player, &seq.segment_batches())?;
    Ok(r.into_iter().map(|x| x.max(0.0)).sum())
}
