//! Experiment matrix: conditions, the training loop and seeded execution.

mod condition;
mod episode;
mod plan;
mod training;

pub use condition::{Condition, Pairing, Paradigm, SpeedRegime};
pub use episode::{
    run_episode, run_episode_observed, run_evaluation_episode, CqlExecution, EpisodeContext, EpisodeMetrics, EpisodeObserver, Learners, Metric,
    TeamLearner,
};
pub use plan::{ConditionOverride, PlacementMode, ResolvedParams, RunPlan};
pub use training::{
    exploration_rng, final_window_mean, placement_rng, run_matrix, run_matrix_with, run_training, CellKey,
    FinalWindow, MatrixOptions, MatrixResult, MatrixSelection, SeedResult,
};
