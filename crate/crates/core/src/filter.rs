//! Sequential importance resampling over whole fire fronts.
//!
//! Each particle is a complete front. Prediction pushes every particle
//! through the stochastic growth model with its own environmental draw;
//! correction reweights by the set likelihood. Weights live in log space.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::environment::{sample_env, EnvField};
use crate::fire_model::{propagate, FireFront};
use crate::geometry::Vec2;
use crate::rng::stream_rng;
use crate::sensing::{in_range, log_set_likelihood_visible, AgentState, MeasurementSet, SensorModel};

const PAR_MIN_LEN: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    pub n_particles: usize,
    /// Resample when ESS drops below this fraction of the particle count.
    pub resample_threshold: f64,
    /// Std (m) of the i.i.d. vertex perturbation of the initial belief.
    pub init_std: f64,
    /// Bandwidth `h` in `[0, 1]` of the moment-preserving kernel applied
    /// after resampling: every coordinate is shrunk towards the pre-resampling
    /// weighted mean by `sqrt(1 - h^2)` and jittered with `h` times the
    /// weighted std, so the first two moments survive resampling.
    pub kernel_bandwidth: f64,
    /// Std (m) of extra i.i.d. jitter added to every vertex after resampling.
    pub roughening_std: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            n_particles: 2000,
            resample_threshold: 0.5,
            init_std: 2.0,
            kernel_bandwidth: 0.5,
            roughening_std: 0.0,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> crate::Result<()> {
        use crate::Error;
        if self.n_particles == 0 {
            return Err(Error::validation("sim.filter.particles", "must be at least 1"));
        }
        if !(self.resample_threshold > 0.0 && self.resample_threshold <= 1.0) {
            return Err(Error::validation("sim.filter.resample_threshold", "must lie in (0, 1]"));
        }
        if !(self.init_std >= 0.0 && self.init_std.is_finite()) {
            return Err(Error::validation("sim.filter.init_std", "must be non-negative"));
        }
        if !(0.0..=1.0).contains(&self.kernel_bandwidth) {
            return Err(Error::validation("sim.filter.kernel_bandwidth", "must lie in [0, 1]"));
        }
        if !(self.roughening_std >= 0.0 && self.roughening_std.is_finite()) {
            return Err(Error::validation("sim.filter.roughening_std", "must be non-negative"));
        }
        Ok(())
    }
}

/// Weighted particle set over fire fronts.
#[derive(Debug, Clone, PartialEq)]
pub struct Belief {
    particles: Vec<FireFront>,
    log_weights: Vec<f64>,
}

/// Outcome of a correction step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpdateReport {
    /// Every particle had zero likelihood; weights were reset to uniform.
    pub diverged: bool,
    /// Log of the normalizing constant (sum of weighted likelihoods).
    pub log_evidence: f64,
}

/// Outcome of a full assimilation step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssimilationReport {
    pub diverged: bool,
    pub ess_before_resampling: f64,
    pub resampled: bool,
}

pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    max + values.iter().map(|&v| (v - max).exp()).sum::<f64>().ln()
}

impl Belief {
    /// Equally weighted belief. Panics on an empty particle list.
    pub fn uniform(particles: Vec<FireFront>) -> Self {
        assert!(!particles.is_empty(), "belief needs at least one particle");
        let lw = -(particles.len() as f64).ln();
        Belief {
            log_weights: vec![lw; particles.len()],
            particles,
        }
    }

    /// Belief from explicit (not necessarily normalized) log weights.
    pub fn from_log_weights(particles: Vec<FireFront>, log_weights: Vec<f64>) -> Self {
        assert_eq!(particles.len(), log_weights.len());
        assert!(!particles.is_empty(), "belief needs at least one particle");
        let mut b = Belief { particles, log_weights };
        b.normalize();
        b
    }

    pub fn particles(&self) -> &[FireFront] {
        &self.particles
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    pub fn weights(&self) -> Vec<f64> {
        self.log_weights.iter().map(|w| w.exp()).collect()
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.particles[0].len()
    }

    /// Renormalizes in log space. Returns the log normalizer, `-inf` if every
    /// weight vanished (in which case weights become uniform).
    fn normalize(&mut self) -> f64 {
        let lse = log_sum_exp(&self.log_weights);
        if lse.is_finite() {
            for w in &mut self.log_weights {
                *w -= lse;
            }
        } else {
            let lw = -(self.len() as f64).ln();
            self.log_weights.iter_mut().for_each(|w| *w = lw);
        }
        lse
    }

    /// Pushes every particle through the growth model. Particle `i` uses a
    /// random stream keyed by `(key, i)` where `key` is drawn from `rng`.
    /// Weights are untouched.
    pub fn predict<R: Rng + ?Sized>(&mut self, field: &EnvField, dt: f64, rng: &mut R) {
        let key: u64 = rng.random();
        self.particles
            .par_iter_mut()
            .with_min_len(PAR_MIN_LEN)
            .enumerate()
            .for_each(|(i, particle)| {
                let mut prng = stream_rng(&[key, i as u64]);
                let env = sample_env(particle, field, &mut prng);
                // a front with coincident neighbours has no tangent; it stays put
                if let Ok(next) = propagate(particle, &env, dt) {
                    *particle = next;
                }
            });
    }

    /// Bayes correction with the set likelihood of `z`.
    pub fn update(&mut self, z: &MeasurementSet, agent: &AgentState, sensor: &SensorModel) -> UpdateReport {
        let loglik: Vec<f64> = self
            .particles
            .par_iter()
            .with_min_len(PAR_MIN_LEN)
            .map(|p| {
                let visible: Vec<Vec2> = p
                    .vertices()
                    .iter()
                    .copied()
                    .filter(|&v| in_range(agent, v, sensor))
                    .collect();
                log_set_likelihood_visible(z, &visible, sensor)
            })
            .collect();
        for (w, l) in self.log_weights.iter_mut().zip(&loglik) {
            *w += l;
        }
        let log_evidence = self.normalize();
        UpdateReport {
            diverged: !log_evidence.is_finite(),
            log_evidence,
        }
    }

    pub fn effective_sample_size(&self) -> f64 {
        let s: f64 = self.log_weights.iter().map(|&w| (2.0 * w).exp()).sum();
        1.0 / s
    }

    /// Systematic resampling back to the current particle count.
    pub fn resample<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let n = self.len();
        self.resample_to(n, rng);
    }

    /// Systematic resampling to `n` equally weighted particles.
    pub fn resample_to<R: Rng + ?Sized>(&mut self, n: usize, rng: &mut R) {
        let offset: f64 = rng.random();
        let idx = systematic_indices(&self.weights(), n, offset);
        let particles = idx.into_iter().map(|i| self.particles[i].clone()).collect();
        *self = Belief::uniform(particles);
    }

    /// Adds i.i.d. Gaussian jitter to every vertex coordinate.
    pub fn roughen<R: Rng + ?Sized>(&mut self, std: f64, rng: &mut R) {
        if std == 0.0 {
            return;
        }
        for p in &mut self.particles {
            for v in p.vertices_mut() {
                let dx: f64 = rng.sample(StandardNormal);
                let dy: f64 = rng.sample(StandardNormal);
                *v += Vec2::new(dx, dy) * std;
            }
        }
    }

    /// Correction followed by regularized resampling when the ESS falls below
    /// the configured fraction.
    pub fn assimilate<R: Rng + ?Sized>(
        &mut self,
        z: &MeasurementSet,
        agent: &AgentState,
        sensor: &SensorModel,
        cfg: &FilterConfig,
        rng: &mut R,
    ) -> AssimilationReport {
        let report = self.update(z, agent, sensor);
        let ess = self.effective_sample_size();
        let resampled = ess < cfg.resample_threshold * self.len() as f64;
        if resampled {
            self.resample_regularized(cfg.kernel_bandwidth, rng);
            self.roughen(cfg.roughening_std, rng);
        }
        AssimilationReport {
            diverged: report.diverged,
            ess_before_resampling: ess,
            resampled,
        }
    }

    /// Systematic resampling followed by the moment-preserving kernel move
    /// with bandwidth `h` (see [`FilterConfig::kernel_bandwidth`]).
    pub fn resample_regularized<R: Rng + ?Sized>(&mut self, h: f64, rng: &mut R) {
        if h == 0.0 {
            self.resample(rng);
            return;
        }
        let (mean, var) = self.coordinate_moments();
        self.resample(rng);
        self.shrink_and_jitter(&mean, &var, h, rng);
    }

    /// Weighted per-coordinate mean and variance of every vertex.
    fn coordinate_moments(&self) -> (Vec<Vec2>, Vec<Vec2>) {
        let mean = self.mmse().into_vertices();
        let mut var = vec![Vec2::ZERO; mean.len()];
        for (p, &lw) in self.particles.iter().zip(&self.log_weights) {
            let w = lw.exp();
            for ((a, &v), &m) in var.iter_mut().zip(p.vertices()).zip(&mean) {
                let d = v - m;
                *a += Vec2::new(d.x * d.x, d.y * d.y) * w;
            }
        }
        (mean, var)
    }

    fn shrink_and_jitter<R: Rng + ?Sized>(&mut self, mean: &[Vec2], var: &[Vec2], h: f64, rng: &mut R) {
        let a = (1.0 - h * h).sqrt();
        for p in &mut self.particles {
            for ((v, &m), &s2) in p.vertices_mut().iter_mut().zip(mean).zip(var) {
                let dx: f64 = rng.sample(StandardNormal);
                let dy: f64 = rng.sample(StandardNormal);
                *v = *v * a + m * (1.0 - a) + Vec2::new(dx * s2.x.sqrt(), dy * s2.y.sqrt()) * h;
            }
        }
    }

    /// Posterior mean front.
    pub fn mmse(&self) -> FireFront {
        let n = self.vertex_count();
        let mut acc = vec![Vec2::ZERO; n];
        for (p, &lw) in self.particles.iter().zip(&self.log_weights) {
            let w = lw.exp();
            for (a, &v) in acc.iter_mut().zip(p.vertices()) {
                *a += v * w;
            }
        }
        FireFront::from_vertices(acc)
    }

    /// Per-vertex weighted spread `sqrt(var_x + var_y)`.
    pub fn vertex_std(&self) -> Vec<f64> {
        let mean = self.mmse();
        let mut acc = vec![0.0; self.vertex_count()];
        for (p, &lw) in self.particles.iter().zip(&self.log_weights) {
            let w = lw.exp();
            for ((a, &v), &m) in acc.iter_mut().zip(p.vertices()).zip(mean.vertices()) {
                *a += w * v.distance_sq(m);
            }
        }
        acc.into_iter().map(f64::sqrt).collect()
    }
}

/// Systematic resampling indices for normalized `weights`, using the single
/// uniform `offset` in `[0, 1)`.
pub fn systematic_indices(weights: &[f64], n: usize, offset: f64) -> Vec<usize> {
    let mut out = Vec::with_capacity(n);
    let last = weights.len() - 1;
    let mut i = 0;
    let mut cumulative = weights[0];
    for k in 0..n {
        let u = (k as f64 + offset) / n as f64;
        while u >= cumulative && i < last {
            i += 1;
            cumulative += weights[i];
        }
        out.push(i);
    }
    out
}

/// Initial belief: the ignition front with i.i.d. Gaussian vertex noise.
pub fn init_belief<R: Rng + ?Sized>(initial: &FireFront, cfg: &FilterConfig, rng: &mut R) -> Belief {
    let particles = (0..cfg.n_particles)
        .map(|_| {
            let mut p = initial.clone();
            if cfg.init_std > 0.0 {
                for v in p.vertices_mut() {
                    let dx: f64 = rng.sample(StandardNormal);
                    let dy: f64 = rng.sample(StandardNormal);
                    *v += Vec2::new(dx, dy) * cfg.init_std;
                }
            }
            p
        })
        .collect();
    Belief::uniform(particles)
}
