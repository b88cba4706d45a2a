use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::controller::ControllerSpec;
use super::episode::{run_episode, EpisodeTrace};
use super::metrics::mean_std;
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::rng::{derive_seed, stream_rng, Stream};
use crate::scenario::Scenario;

const MAX_PLACEMENT_ATTEMPTS: usize = 10_000;

/// Per-step aggregate for one controller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControllerSummary {
    pub controller: ControllerSpec,
    pub mean_log10_rmse: Vec<f64>,
    pub std_log10_rmse: Vec<f64>,
    /// `[trial][step]` log10 RMSE values the aggregates came from.
    pub log10_rmse: Vec<Vec<f64>>,
}

impl ControllerSummary {
    pub fn overall_mean(&self) -> f64 {
        self.mean_log10_rmse.iter().sum::<f64>() / self.mean_log10_rmse.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub trials: usize,
    pub seeds: Vec<u64>,
    pub controllers: Vec<ControllerSummary>,
}

impl MonteCarloReport {
    pub fn summary(&self, c: ControllerSpec) -> Option<&ControllerSummary> {
        self.controllers.iter().find(|s| s.controller == c)
    }

    /// `controller,step,mean_log10_rmse,std_log10_rmse,trials` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("controller,step,mean_log10_rmse,std_log10_rmse,trials\n");
        for s in &self.controllers {
            for (i, (m, sd)) in s.mean_log10_rmse.iter().zip(&s.std_log10_rmse).enumerate() {
                out.push_str(&format!("{},{},{},{},{}\n", s.controller, i + 1, m, sd, self.trials));
            }
        }
        out
    }
}

pub fn trial_seed(base_seed: u64, trial: usize) -> u64 {
    derive_seed(&[base_seed, trial as u64])
}

/// Random ignition center (rejecting ellipses that leave the square) and a
/// uniform agent start.
pub fn randomize_instance(scenario: &Scenario, seed: u64) -> Result<Scenario> {
    let mut rng = stream_rng(&[seed, Stream::Instance as u64]);
    let grid = scenario.grid;
    let uniform_point = |rng: &mut crate::rng::SimRng| {
        grid.origin + Vec2::new(rng.random::<f64>() * grid.side_length, rng.random::<f64>() * grid.side_length)
    };
    let mut s = scenario.clone();
    let mut placed = false;
    for _ in 0..MAX_PLACEMENT_ATTEMPTS {
        s.fire.ignition.center = uniform_point(&mut rng);
        if s.fire.ignition.inside(&grid) {
            placed = true;
            break;
        }
    }
    if !placed {
        return Err(Error::validation("fire.ignition", "ellipse does not fit anywhere in the environment"));
    }
    s.agent.start = uniform_point(&mut rng);
    s.validate()?;
    Ok(s)
}

fn log10_series(trace: &EpisodeTrace) -> Vec<f64> {
    trace.rmse_series().into_iter().map(|r| r.max(1e-300).log10()).collect()
}

/// Aggregates per-trial traces into a report. `traces[trial][controller]`.
pub fn aggregate(controllers: &[ControllerSpec], seeds: Vec<u64>, traces: &[Vec<EpisodeTrace>]) -> MonteCarloReport {
    let summaries = controllers
        .iter()
        .enumerate()
        .map(|(ci, &controller)| {
            let rows: Vec<Vec<f64>> = traces.iter().map(|t| log10_series(&t[ci])).collect();
            let steps = rows.first().map_or(0, Vec::len);
            let (mean, std): (Vec<f64>, Vec<f64>) = (0..steps)
                .map(|k| mean_std(&rows.iter().map(|r| r[k]).collect::<Vec<_>>()))
                .unzip();
            ControllerSummary {
                controller,
                mean_log10_rmse: mean,
                std_log10_rmse: std,
                log10_rmse: rows,
            }
        })
        .collect();
    MonteCarloReport {
        trials: traces.len(),
        seeds,
        controllers: summaries,
    }
}

/// Runs every controller on the same randomized instance and seed per trial.
pub fn run_monte_carlo_traces(
    scenario: &Scenario,
    controllers: &[ControllerSpec],
    trials: usize,
    base_seed: u64,
) -> Result<(Vec<u64>, Vec<Vec<EpisodeTrace>>)> {
    if trials == 0 {
        return Err(Error::validation("trials", "must be at least 1"));
    }
    let seeds: Vec<u64> = (0..trials).map(|k| trial_seed(base_seed, k)).collect();
    let instances = seeds
        .iter()
        .map(|&s| randomize_instance(scenario, s))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> = (0..trials).flat_map(|t| (0..controllers.len()).map(move |c| (t, c))).collect();
    let flat = jobs
        .par_iter()
        .map(|&(t, c)| run_episode(&instances[t], controllers[c], seeds[t]))
        .collect::<Result<Vec<_>>>()?;
    let mut it = flat.into_iter();
    let traces = (0..trials).map(|_| it.by_ref().take(controllers.len()).collect()).collect();
    Ok((seeds, traces))
}

pub fn run_monte_carlo(
    scenario: &Scenario,
    controllers: &[ControllerSpec],
    trials: usize,
    base_seed: u64,
) -> Result<MonteCarloReport> {
    let (seeds, traces) = run_monte_carlo_traces(scenario, controllers, trials, base_seed)?;
    Ok(aggregate(controllers, seeds, &traces))
}
