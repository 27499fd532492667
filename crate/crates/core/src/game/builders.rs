//! Constructors for the reference games used throughout the experiments.

use super::sequence::GameSequence;
use super::space::ActionSpace;
use super::stage::StageGame;
use crate::error::{invalid, Result};

/// Logit-demand price constant of the pricing example.
pub const EXAMPLE1_ALPHA: f64 = 4.0;
/// Price sensitivity in the first half of the season.
pub const EXAMPLE1_BETA_FIRST: f64 = 0.75;
/// Price sensitivity in the second half of the season.
pub const EXAMPLE1_BETA_SECOND: f64 = 1.75;
/// Available prices: index 0 is the low price, index 1 the high price.
pub const EXAMPLE1_PRICES: [f64; 2] = [1.0, 2.0];

/// Two sellers with logit demand and zero production cost.
///
/// Seller `i` charging `p_i` against `p_j` earns
/// `p_i * N * exp(a - b p_i) / (1 + exp(a - b p_i) + exp(a - b p_j))`.
pub fn logit_pricing_game(alpha: f64, beta: f64, customers: f64, prices: &[f64]) -> Result<StageGame> {
    if prices.is_empty() {
        return invalid("at least one price is required");
    }
    if !(beta > 0.0) {
        return invalid(format!("price sensitivity must be positive, got {beta}"));
    }
    if !(customers > 0.0 && customers.is_finite()) {
        return invalid(format!("customer mass must be positive, got {customers}"));
    }
    if prices.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
        return invalid("prices must be positive and finite");
    }
    let k = prices.len();
    let space = ActionSpace::new(vec![k, k])?;
    let revenue = |own: f64, other: f64| {
        let e_own = (alpha - beta * own).exp();
        let e_other = (alpha - beta * other).exp();
        own * customers * e_own / (1.0 + e_own + e_other)
    };
    let mut p1 = Vec::with_capacity(k * k);
    let mut p2 = Vec::with_capacity(k * k);
    for &a in prices {
        for &b in prices {
            p1.push(revenue(a, b));
            p2.push(revenue(b, a));
        }
    }
    let max_price = prices.iter().copied().fold(0.0, f64::max);
    StageGame::new(space, vec![p1, p2], customers * max_price)
}

/// The season with price sensitivity switching once, after `horizon / 2` periods.
pub fn example1_sequence(horizon: usize, customers: f64) -> Result<GameSequence> {
    if horizon < 2 {
        return invalid("the pricing season needs at least two periods");
    }
    let first = logit_pricing_game(EXAMPLE1_ALPHA, EXAMPLE1_BETA_FIRST, customers, &EXAMPLE1_PRICES)?;
    let second = logit_pricing_game(EXAMPLE1_ALPHA, EXAMPLE1_BETA_SECOND, customers, &EXAMPLE1_PRICES)?;
    let half = horizon / 2;
    GameSequence::from_pieces(vec![(first, half), (second, horizon - half)])
}

/// Game whose only coarse correlated equilibrium is the point mass on `(a, c)`
/// while `(a, d)` and `(b, c)` are `delta`-approximate ones.
pub fn small_regret_large_distance_game(delta: f64) -> Result<StageGame> {
    if !(delta > 0.0 && delta < 1.0) {
        return invalid(format!("delta must lie in (0, 1), got {delta}"));
    }
    StageGame::bimatrix(
        &[vec![delta, 1.0], vec![0.0, 0.0]],
        &[vec![delta, 0.0], vec![1.0, 0.0]],
        1.0,
    )
}

/// The counterexample pair: rows `u, b`, columns `c, d`; the column player's
/// payoff is the constant `epsilon` in both games.
pub fn counterexample_games(epsilon: f64) -> Result<(StageGame, StageGame)> {
    if !(epsilon.abs() <= 1.0) {
        return invalid(format!("epsilon must lie in [-1, 1], got {epsilon}"));
    }
    let col = vec![vec![epsilon; 2]; 2];
    let g1 = StageGame::bimatrix(&[vec![1.0, -1.0], vec![-1.0, 1.0]], &col, 1.0)?;
    let g2 = StageGame::bimatrix(&[vec![0.25, 0.25], vec![-0.25, -0.25]], &col, 1.0)?;
    Ok((g1, g2))
}

/// First game for `2 * ceil(T/4)` periods, second game for the rest.
pub fn counterexample_sequence(horizon: usize, epsilon: f64) -> Result<GameSequence> {
    if horizon < 4 {
        return invalid("the counterexample sequence needs T >= 4");
    }
    let (g1, g2) = counterexample_games(epsilon)?;
    let first = 2 * horizon.div_ceil(4);
    GameSequence::from_pieces(vec![(g1, first), (g2, horizon - first)])
}

pub fn matching_pennies() -> StageGame {
    StageGame::bimatrix(
        &[vec![1.0, -1.0], vec![-1.0, 1.0]],
        &[vec![-1.0, 1.0], vec![1.0, -1.0]],
        1.0,
    )
    .expect("static game")
}

/// Chicken: actions (swerve, dare). The uniform mix over the three outcomes
/// other than (dare, dare) is a correlated equilibrium.
pub fn chicken() -> StageGame {
    StageGame::bimatrix(
        &[vec![6.0, 2.0], vec![7.0, 0.0]],
        &[vec![6.0, 7.0], vec![2.0, 0.0]],
        7.0,
    )
    .expect("static game")
}

/// Prisoner's dilemma scaled into `[0, 1]`; defect (index 1) is strictly dominant.
pub fn prisoners_dilemma() -> StageGame {
    StageGame::bimatrix(
        &[vec![0.75, 0.0], vec![1.0, 0.25]],
        &[vec![0.75, 1.0], vec![0.0, 0.25]],
        1.0,
    )
    .expect("static game")
}

/// Mirror of [`prisoners_dilemma`] with the roles of the two actions swapped,
/// so action 0 becomes strictly dominant.
pub fn mirrored_prisoners_dilemma() -> StageGame {
    StageGame::bimatrix(
        &[vec![0.25, 1.0], vec![0.0, 0.75]],
        &[vec![0.25, 0.0], vec![1.0, 0.75]],
        1.0,
    )
    .expect("static game")
}
