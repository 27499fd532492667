//! Simulation laboratory for repeated matrix games whose stage game changes
//! over time.
//!
//! The crate is organised around the pieces an experiment needs:
//!
//! - [`game`]: stage games, piecewise-constant game sequences, variation and
//!   batch structure, and constructors for the reference games.
//! - [`learners`]: bandit-feedback policies (Exp3, Exp3S, Exp3P, Rexp3P,
//!   restarting wrappers, bandit regret matching, trigger policies, scripts).
//! - [`oracles`]: exact hindsight benchmarks with bounded switches, external
//!   and internal.
//! - [`geometry`]: coarse correlated / correlated equilibrium polytopes,
//!   a dense simplex solver, Frank–Wolfe projection and the tracking error.
//! - [`welfare`]: price of anarchy, smoothness, and switch-constrained
//!   welfare fractions.
//! - [`sim`]: seeded episode playback, Monte Carlo replication and exports.
//! - [`presets`]: named experiments reproducible from `(T, reps, seed)`.

pub mod error;
pub mod game;
pub mod geometry;
pub mod learners;
pub mod oracles;
pub mod presets;
pub mod sim;
pub mod welfare;

pub use error::{Error, Result};
