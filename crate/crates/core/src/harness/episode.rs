use serde::{Deserialize, Serialize};

use super::controller::ControllerSpec;
use super::metrics::rmse;
use crate::environment::sample_env;
use crate::error::{Error, Result};
use crate::filter::init_belief;
use crate::fire_model::{propagate_checked, FireFront, FrontWarning};
use crate::planner::{enumerate_policies, plan, rwd, IterationRecord, PlannerConfig, RolloutContext, RwdConfig};
use crate::rng::{stream_rng, Stream};
use crate::scenario::Scenario;
use crate::sensing::{agent_step, generate_measurements, AgentState, ControlInput};

use rand::Rng;

/// Search summary for one decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlannerSummary {
    pub policy_index: usize,
    pub mean_cost: f64,
    pub pull_count: u64,
}

/// Everything logged for one simulated step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub true_front: FireFront,
    pub mmse_front: FireFront,
    pub ess: f64,
    pub ess_before_resampling: f64,
    pub resampled: bool,
    pub diverged: bool,
    pub vertex_std: Vec<f64>,
    pub agent: AgentState,
    pub control: Option<ControlInput>,
    pub measurement_count: usize,
    pub rwd: f64,
    pub rmse: f64,
    pub warning: Option<FrontWarning>,
    pub planner: Option<PlannerSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerLogLine {
    pub step: usize,
    #[serde(flatten)]
    pub record: IterationRecord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeTrace {
    pub scenario_hash: String,
    pub seed: u64,
    pub controller: ControllerSpec,
    pub initial_front: FireFront,
    pub steps: Vec<StepRecord>,
    pub planner_log: Vec<PlannerLogLine>,
}

impl EpisodeTrace {
    pub fn rmse_series(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.rmse).collect()
    }

    pub fn true_fronts(&self) -> Vec<&FireFront> {
        self.steps.iter().map(|s| &s.true_front).collect()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EpisodeOptions {
    pub keep_planner_log: bool,
}

pub fn run_episode(scenario: &Scenario, controller: ControllerSpec, seed: u64) -> Result<EpisodeTrace> {
    run_episode_with(scenario, controller, seed, EpisodeOptions::default())
}

/// Simulates `sim.steps` steps of truth, sensing, filtering and control.
///
/// The fire stream depends only on `(seed, step)`, so every controller run
/// with one seed sees the same true front. Sensing, filtering and planning
/// streams are additionally keyed by the controller.
pub fn run_episode_with(
    scenario: &Scenario,
    controller: ControllerSpec,
    seed: u64,
    options: EpisodeOptions,
) -> Result<EpisodeTrace> {
    scenario.validate()?;
    let field = scenario.env_field();
    let grid = scenario.grid;
    let dt = scenario.fire.dt;
    let filter_cfg = scenario.filter_config();
    let convention = scenario.agent.heading_convention;
    let controls = scenario.agent.action_set().controls();
    let tag = controller.stream_tag();

    let sensor = match controller {
        ControllerSpec::InfiniteRange => scenario.sensor.with_infinite_range(),
        _ => scenario.sensor,
    };
    let rwd_cfg = match scenario.planner.omega {
        Some(omega) => RwdConfig { omega },
        None => RwdConfig::default_for(&grid, &scenario.risk),
    };
    let ctx = RolloutContext {
        field: &field,
        risk: &scenario.risk,
        rwd: rwd_cfg,
        sensor: scenario.sensor,
        dt,
        heading_convention: convention,
    };

    let planning = match controller {
        ControllerSpec::LcbHorizon(horizon) => {
            let spec = crate::scenario::PlannerSpec { horizon, ..scenario.planner };
            let policies = enumerate_policies(&controls, horizon)
                .map_err(|e| Error::Controller(format!("{controller}: {e}")))?;
            let cfg = PlannerConfig::from_spec(&spec, policies.len())
                .map_err(|e| Error::Controller(format!("{controller}: {e}")))?;
            Some((policies, cfg))
        }
        _ => None,
    };

    let initial_front = scenario.initial_front()?;
    let mut truth = initial_front.clone();
    let mut belief = init_belief(&initial_front, &filter_cfg, &mut stream_rng(&[seed, Stream::Init as u64]));
    let mut agent = scenario.initial_agent();
    let mut steps = Vec::with_capacity(scenario.sim.steps);
    let mut planner_log = Vec::new();

    for t in 1..=scenario.sim.steps {
        let t64 = t as u64;
        let mut planner_summary = None;
        let control = match controller {
            ControllerSpec::Static | ControllerSpec::InfiniteRange => None,
            ControllerSpec::Random => {
                let mut r = stream_rng(&[seed, Stream::Controller as u64, t64, tag]);
                Some(controls[r.random_range(0..controls.len())])
            }
            ControllerSpec::LcbHorizon(_) => {
                let (policies, cfg) = planning.as_ref().expect("planner prepared");
                let mut r = stream_rng(&[seed, Stream::Planner as u64, t64, tag]);
                let out = plan(&belief, &agent, &ctx, policies, cfg, options.keep_planner_log, &mut r)?;
                let stats = out.stats[out.index];
                planner_summary = Some(PlannerSummary {
                    policy_index: out.index,
                    mean_cost: stats.mean_cost,
                    pull_count: stats.pull_count,
                });
                planner_log.extend(out.history.into_iter().map(|record| PlannerLogLine { step: t, record }));
                Some(out.policy.first())
            }
        };
        if let Some(c) = control {
            agent = agent_step(agent, c, dt, &grid, convention);
        }

        let mut fire_rng = stream_rng(&[seed, Stream::Fire as u64, t64]);
        let env = sample_env(&truth, &field, &mut fire_rng);
        let (next, warning) = propagate_checked(&truth, &env, dt)?;
        truth = next;

        let mut sensing_rng = stream_rng(&[seed, Stream::Sensing as u64, t64, tag]);
        let z = generate_measurements(&truth, &agent, &sensor, &mut sensing_rng);

        let mut filter_rng = stream_rng(&[seed, Stream::Filter as u64, t64, tag]);
        belief.predict(&field, dt, &mut filter_rng);
        let report = belief.assimilate(&z, &agent, &sensor, &filter_cfg, &mut filter_rng);

        let estimate = belief.mmse();
        steps.push(StepRecord {
            step: t,
            rmse: rmse(&estimate, &truth)?,
            rwd: rwd(&belief, &grid, &scenario.risk, &rwd_cfg),
            ess: belief.effective_sample_size(),
            ess_before_resampling: report.ess_before_resampling,
            resampled: report.resampled,
            diverged: report.diverged,
            vertex_std: belief.vertex_std(),
            mmse_front: estimate,
            true_front: truth.clone(),
            agent,
            control,
            measurement_count: z.len(),
            warning,
            planner: planner_summary,
        });
    }

    Ok(EpisodeTrace {
        scenario_hash: scenario.hash(),
        seed,
        controller,
        initial_front,
        steps,
        planner_log,
    })
}
