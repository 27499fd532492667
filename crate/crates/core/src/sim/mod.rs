//! Seeded episode playback, Monte Carlo replication and result export.

mod config;
mod episode;
mod monte_carlo;
mod output;
mod rng;

pub use config::{DistanceEstimator, Metrics, SequenceSpec, SimConfig, TrackingMetric};
pub use episode::{build_learners, play_episode, RunTrace};
pub use monte_carlo::{
    convergence_sweep, convergence_sweep_with_jobs, monte_carlo, BatchSummary, ReplicationSummary, Stat,
};
pub use output::{config_hash, csv_header, write_summary_csv, Manifest, SummaryRow, summary_rows};
pub use rng::{player_stream, replication_seed, splitmix64};
