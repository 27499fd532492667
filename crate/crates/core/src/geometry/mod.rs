//! Equilibrium polytopes, distances to them, and the tracking error.

mod distance;
mod distribution;
pub mod lp;
mod polytope;

pub use distance::{
    distance, regret_to_distance_bound, tracking_error, BatchDistance, DistanceBound, DistanceReport,
    Norm, TrackingReport, FW_GAP_TOL, FW_MAX_ITER, MEMBER_TOL,
};
pub use distribution::JointDistribution;
pub use polytope::{EquilibriumKind, EquilibriumPolytope};
