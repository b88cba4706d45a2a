//! Receding-horizon policy search over open-loop control sequences.
//!
//! Each length-`T` control sequence is a bandit arm. A pull simulates the
//! sequence against a copy of the belief (predict, move, hypothesize a
//! measurement, correct) and scores the discounted risk-weighted dispersion
//! of the resulting posteriors.

mod rollout;
mod rwd;
mod search;

pub use rollout::{rollout, rollout_with, RolloutContext};
pub use rwd::{rwd, RwdConfig};
pub use search::{
    argmin_lcb, default_lcb_min, lcb_score, lcb_search, IterationRecord, PolicyStats, SearchOutcome,
};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::Belief;
use crate::rng::stream_rng;
use crate::scenario::PlannerSpec;
use crate::sensing::{AgentState, ControlInput};

/// A fixed sequence of controls, one per horizon step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Policy {
    pub controls: Vec<ControlInput>,
}

impl Policy {
    pub fn first(&self) -> ControlInput {
        self.controls[0]
    }
}

/// Every sequence of length `horizon` over `actions`, lexicographic in the
/// action order.
pub fn enumerate_policies(actions: &[ControlInput], horizon: usize) -> Result<Vec<Policy>> {
    if actions.is_empty() {
        return Err(Error::EmptyActionSet);
    }
    if horizon == 0 {
        return Err(Error::PlannerConfig("horizon must be at least 1".into()));
    }
    let count = actions
        .len()
        .checked_pow(horizon as u32)
        .ok_or_else(|| Error::PlannerConfig("policy space too large".into()))?;
    Ok((0..count)
        .map(|mut idx| {
            let mut controls = vec![actions[0]; horizon];
            for slot in controls.iter_mut().rev() {
                *slot = actions[idx % actions.len()];
                idx /= actions.len();
            }
            Policy { controls }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlannerConfig {
    pub horizon: usize,
    pub discount: f64,
    pub budget: u64,
    pub lcb_min: f64,
    pub rollout_particles: usize,
}

impl PlannerConfig {
    /// Fills defaults for a policy space of `n_policies` arms.
    pub fn from_spec(spec: &PlannerSpec, n_policies: usize) -> Result<Self> {
        let budget = spec.budget.unwrap_or(4 * n_policies) as u64;
        let cfg = PlannerConfig {
            horizon: spec.horizon,
            discount: spec.discount,
            budget,
            lcb_min: default_lcb_min(budget),
            rollout_particles: spec.rollout_particles,
        };
        cfg.validate(n_policies)?;
        Ok(cfg)
    }

    pub fn validate(&self, n_policies: usize) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::PlannerConfig("horizon must be at least 1".into()));
        }
        if !(self.discount > 0.0 && self.discount <= 1.0) {
            return Err(Error::PlannerConfig(format!("discount {} outside (0, 1]", self.discount)));
        }
        if self.budget < n_policies as u64 {
            return Err(Error::PlannerConfig(format!(
                "budget {} below the {} available policies",
                self.budget, n_policies
            )));
        }
        let bound = -(2.0 * (self.budget as f64).ln()).sqrt();
        if !(self.lcb_min < bound) {
            return Err(Error::PlannerConfig(format!("lcb_min {} must be below {bound}", self.lcb_min)));
        }
        if self.rollout_particles == 0 {
            return Err(Error::PlannerConfig("rollout_particles must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanOutcome {
    pub index: usize,
    pub policy: Policy,
    pub stats: Vec<PolicyStats>,
    pub history: Vec<IterationRecord>,
}

/// Adaptive LCB-guided search from the current belief and agent state.
///
/// The belief is first thinned to `rollout_particles` particles. The `k`-th
/// rollout of every policy shares one random stream, so policies are
/// compared under common random numbers.
pub fn plan<R: Rng + ?Sized>(
    belief: &Belief,
    agent: &AgentState,
    ctx: &RolloutContext<'_>,
    policies: &[Policy],
    cfg: &PlannerConfig,
    keep_history: bool,
    rng: &mut R,
) -> Result<PlanOutcome> {
    cfg.validate(policies.len())?;
    let plan_key: u64 = rng.random();
    let mut base = belief.clone();
    if base.len() > cfg.rollout_particles {
        base.resample_to(cfg.rollout_particles, &mut stream_rng(&[plan_key, u64::MAX]));
    }
    let outcome = lcb_search(policies.len(), cfg.budget, cfg.lcb_min, keep_history, |arm, k| {
        let mut r = stream_rng(&[plan_key, k]);
        rollout(&policies[arm], &base, agent, ctx, cfg.discount, &mut r)
    });
    Ok(PlanOutcome {
        index: outcome.best,
        policy: policies[outcome.best].clone(),
        stats: outcome.stats,
        history: outcome.history,
    })
}
