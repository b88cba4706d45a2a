use rand::Rng;

use super::rwd::{rwd, RwdConfig};
use super::Policy;
use crate::environment::{EnvField, GridSpec, RiskMap};
use crate::filter::Belief;
use crate::sensing::{agent_step, generate_measurements, AgentState, HeadingConvention, SensorModel};

/// Everything a rollout needs besides the belief and agent.
#[derive(Debug, Clone, Copy)]
pub struct RolloutContext<'a> {
    pub field: &'a EnvField,
    pub risk: &'a RiskMap,
    pub rwd: RwdConfig,
    pub sensor: SensorModel,
    pub dt: f64,
    pub heading_convention: HeadingConvention,
}

impl RolloutContext<'_> {
    pub fn grid(&self) -> &GridSpec {
        &self.field.grid
    }
}

fn draw_index<R: Rng + ?Sized>(belief: &Belief, rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, w) in belief.weights().into_iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    belief.len() - 1
}

/// Discounted stage cost of one simulated pass of `policy`, with a caller
/// supplied cost functional. Works on a copy of `belief`.
///
/// Hypothetical measurements come from one particle of the predictive
/// belief, drawn by weight, standing in for the true front. The posterior
/// is resampled after every correction so the unweighted cost sees it.
pub fn rollout_with<R, C>(
    policy: &Policy,
    belief: &Belief,
    agent: &AgentState,
    ctx: &RolloutContext<'_>,
    discount: f64,
    stage_cost: C,
    rng: &mut R,
) -> f64
where
    R: Rng + ?Sized,
    C: Fn(&Belief) -> f64,
{
    let mut b = belief.clone();
    let mut y = *agent;
    let mut total = 0.0;
    let mut factor = 1.0;
    for &control in &policy.controls {
        b.predict(ctx.field, ctx.dt, rng);
        y = agent_step(y, control, ctx.dt, ctx.grid(), ctx.heading_convention);
        let surrogate = draw_index(&b, rng);
        let z = generate_measurements(&b.particles()[surrogate], &y, &ctx.sensor, rng);
        b.update(&z, &y, &ctx.sensor);
        b.resample(rng);
        factor *= discount;
        total += factor * stage_cost(&b);
    }
    total
}

/// [`rollout_with`] scored by the risk-weighted dispersion.
pub fn rollout<R: Rng + ?Sized>(
    policy: &Policy,
    belief: &Belief,
    agent: &AgentState,
    ctx: &RolloutContext<'_>,
    discount: f64,
    rng: &mut R,
) -> f64 {
    rollout_with(policy, belief, agent, ctx, discount, |b| rwd(b, ctx.grid(), ctx.risk, &ctx.rwd), rng)
}
