//! Stage games, game sequences and their batch structure.

pub mod builders;
mod injective;
mod sequence;
mod space;
mod stage;

pub use injective::{injectivity_offset, injectivity_scale, is_injective_for, make_injective};
pub use sequence::{Batch, GameSequence, PayoffNoise, Segment};
pub use space::{ActionSpace, Outcome};
pub use stage::{has_single_best_reply, single_best_reply, strictly_dominant_action, StageGame};
