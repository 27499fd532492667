use super::stage::StageGame;
use crate::error::Result;

/// Offset added to player `i`'s payoffs against the opponent profile of
/// lexicographic rank `rank` (0-based): `-2M + 3M (rank + 1)`.
pub fn injectivity_offset(bound: f64, rank: usize) -> f64 {
    -2.0 * bound + 3.0 * bound * (rank as f64 + 1.0)
}

/// Positive scale applied after the offsets: `(3 |A^{-i}| - 1) M`.
pub fn injectivity_scale(bound: f64, opponent_profiles: usize) -> f64 {
    (3.0 * opponent_profiles as f64 - 1.0) * bound
}

/// Positive-affine transform of `player`'s payoffs, separate per opponent
/// profile, after which every section `u(x, .)` is injective.
///
/// Offsets place each opponent profile in its own disjoint window of width
/// `2M`, so best replies against any fixed profile are unchanged. Other
/// players' payoffs are copied as is.
pub fn make_injective(game: &StageGame, player: usize) -> Result<StageGame> {
    let space = game.space();
    let m = game.bound();
    let profiles = space.opponent_profiles(player);
    let scale = injectivity_scale(m, profiles);
    let payoffs: Vec<f64> = (0..space.outcome_count())
        .map(|o| {
            let rank = space.opponent_rank(o, player);
            scale * (game.payoff(player, o) + injectivity_offset(m, rank))
        })
        .collect();
    let top = scale * (3.0 * profiles as f64 - 1.0) * m;
    game.replace_payoffs(player, payoffs, game.bound().max(top))
}

/// True iff every `a^i`-section of `player`'s payoff is injective in `a^{-i}`.
pub fn is_injective_for(game: &StageGame, player: usize) -> bool {
    let space = game.space();
    for x in 0..space.actions(player) {
        let mut values: Vec<f64> = (0..space.outcome_count())
            .filter(|&o| space.action_of(o, player) == x)
            .map(|o| game.payoff(player, o))
            .collect();
        values.sort_by(f64::total_cmp);
        if values.windows(2).any(|w| w[0] == w[1]) {
            return false;
        }
    }
    true
}
