//! Episode orchestration, baselines, Monte Carlo campaigns and file output.

mod controller;
mod episode;
mod metrics;
mod montecarlo;
pub mod output;

pub use controller::ControllerSpec;
pub use episode::{run_episode, run_episode_with, EpisodeOptions, EpisodeTrace, PlannerLogLine, PlannerSummary, StepRecord};
pub use metrics::{mean_std, rmse};
pub use montecarlo::{
    aggregate, randomize_instance, run_monte_carlo, run_monte_carlo_traces, trial_seed, ControllerSummary,
    MonteCarloReport,
};
