//! Agent kinematics and the Poisson point process sensor.
//!
//! Every front vertex inside the circular footprint emits a Poisson number of
//! detections, each a Gaussian-perturbed copy of the vertex position. The set
//! likelihood therefore needs no measurement-to-vertex association.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::environment::GridSpec;
use crate::error::{Error, Result};
use crate::fire_model::FireFront;
use crate::geometry::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub position: Vec2,
}

impl AgentState {
    pub fn at(position: Vec2) -> Self {
        AgentState { position }
    }
}

/// One discrete control: ground speed (m/s) and heading (degrees).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlInput {
    pub speed: f64,
    pub heading_deg: f64,
}

/// How headings map onto the plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeadingConvention {
    /// 0 deg along `+x`, 90 deg along `+y`.
    #[default]
    Cartesian,
    /// 0 deg along `+y` (north), 90 deg along `+x` (east).
    Compass,
}

impl HeadingConvention {
    pub fn unit(self, heading_deg: f64) -> Vec2 {
        let a = heading_deg.to_radians();
        match self {
            HeadingConvention::Cartesian => Vec2::new(a.cos(), a.sin()),
            HeadingConvention::Compass => Vec2::new(a.sin(), a.cos()),
        }
    }
}

/// The discrete control set: every speed combined with every heading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionSet {
    pub speeds: Vec<f64>,
    pub headings_deg: Vec<f64>,
}

impl ActionSet {
    /// Controls in lexicographic order, speed-major.
    pub fn controls(&self) -> Vec<ControlInput> {
        self.speeds
            .iter()
            .flat_map(|&speed| self.headings_deg.iter().map(move |&heading_deg| ControlInput { speed, heading_deg }))
            .collect()
    }

    pub fn contains(&self, c: &ControlInput) -> bool {
        self.speeds.contains(&c.speed) && self.headings_deg.contains(&c.heading_deg)
    }
}

/// Moves the agent by `speed * dt` along the heading, clamped to the grid.
pub fn agent_step(
    state: AgentState,
    control: ControlInput,
    dt: f64,
    grid: &GridSpec,
    convention: HeadingConvention,
) -> AgentState {
    let displacement = convention.unit(control.heading_deg) * (control.speed * dt);
    AgentState::at(grid.clamp(state.position + displacement))
}

/// Circular-footprint sensor with Gaussian position noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorModel {
    /// Footprint radius in meters; may be infinite.
    pub range: f64,
    pub noise_std: f64,
    /// Expected detections per visible vertex.
    pub intensity: f64,
}

impl SensorModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.range > 0.0) {
            return Err(Error::validation("sensor.range", "must be positive"));
        }
        if !(self.noise_std > 0.0 && self.noise_std.is_finite()) {
            return Err(Error::validation("sensor.noise_std", "must be positive"));
        }
        if !(self.intensity > 0.0 && self.intensity.is_finite()) {
            return Err(Error::validation("sensor.intensity", "must be positive"));
        }
        Ok(())
    }

    /// Footprint radius of a downward camera with full field of view `fov_deg`.
    pub fn camera_range(altitude: f64, fov_deg: f64) -> f64 {
        altitude * (fov_deg / 2.0).to_radians().tan()
    }

    pub fn with_infinite_range(mut self) -> Self {
        self.range = f64::INFINITY;
        self
    }
}

/// Unordered detections received at one step.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MeasurementSet {
    pub detections: Vec<Vec2>,
}

impl MeasurementSet {
    pub fn len(&self) -> usize {
        self.detections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.detections.is_empty()
    }
}

pub fn in_range(agent: &AgentState, point: Vec2, sensor: &SensorModel) -> bool {
    sensor.range.is_infinite() || agent.position.distance(point) <= sensor.range
}

pub fn generate_measurements<R: Rng + ?Sized>(
    front: &FireFront,
    agent: &AgentState,
    sensor: &SensorModel,
    rng: &mut R,
) -> MeasurementSet {
    let poisson = Poisson::new(sensor.intensity).expect("sensor intensity validated positive");
    let mut detections = Vec::new();
    for &v in front.vertices() {
        if !in_range(agent, v, sensor) {
            continue;
        }
        let count = poisson.sample(rng) as usize;
        for _ in 0..count {
            let dx: f64 = rng.sample(StandardNormal);
            let dy: f64 = rng.sample(StandardNormal);
            detections.push(v + Vec2::new(dx, dy) * sensor.noise_std);
        }
    }
    MeasurementSet { detections }
}

pub fn ln_factorial(m: usize) -> f64 {
    (2..=m).map(|k| (k as f64).ln()).sum()
}

// Mixture terms this far below the dominant one (which contributes 1.0 to
// the scaled sum) sit under half an ulp of it, even twenty at a time.
const NEGLIGIBLE_LOG_RATIO: f64 = -40.0;

/// Log of the Poisson point process set likelihood of `z` given the front
/// and agent position. Returns `-inf` when a detection has zero intensity.
pub fn log_set_likelihood(z: &MeasurementSet, front: &FireFront, agent: &AgentState, sensor: &SensorModel) -> f64 {
    let visible: Vec<Vec2> = front
        .vertices()
        .iter()
        .copied()
        .filter(|&v| in_range(agent, v, sensor))
        .collect();
    log_set_likelihood_visible(z, &visible, sensor)
}

/// Same as [`log_set_likelihood`] with the in-range vertices precomputed.
pub fn log_set_likelihood_visible(z: &MeasurementSet, visible: &[Vec2], sensor: &SensorModel) -> f64 {
    let m = z.len();
    let mut total = -sensor.intensity * visible.len() as f64;
    if m == 0 {
        return total;
    }
    if visible.is_empty() {
        return f64::NEG_INFINITY;
    }
    let var = sensor.noise_std * sensor.noise_std;
    let inv_two_var = 0.5 / var;
    let log_gamma_peak = sensor.intensity.ln() - (TAU * var).ln();
    let mut dist = vec![0.0; visible.len()];
    for &zk in &z.detections {
        let mut best = f64::INFINITY;
        for (d, &v) in dist.iter_mut().zip(visible) {
            *d = zk.distance_sq(v) * inv_two_var;
            best = best.min(*d);
        }
        let mut acc = 0.0;
        for &d in &dist {
            let e = best - d;
            if e > NEGLIGIBLE_LOG_RATIO {
                acc += e.exp();
            }
        }
        total += log_gamma_peak - best + acc.ln();
    }
    total - ln_factorial(m)
}

/// Isotropic bivariate normal density.
pub fn gaussian_pdf_2d(z: Vec2, mean: Vec2, std: f64) -> f64 {
    let var = std * std;
    (-(z.distance_sq(mean)) / (2.0 * var)).exp() / (2.0 * PI * var)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    fn grid() -> GridSpec {
        GridSpec::new(Vec2::ZERO, 3000.0, 10).unwrap()
    }

    fn sensor() -> SensorModel {
        SensorModel {
            range: SensorModel::camera_range(250.0, 120.0),
            noise_std: 3.5,
            intensity: 5.0,
        }
    }

    #[test]
    fn agent_step_examples() {
        let g = grid();
        let c = HeadingConvention::Cartesian;
        let s = agent_step(AgentState::at(Vec2::ZERO), ControlInput { speed: 3.0, heading_deg: 0.0 }, 60.0, &g, c);
        assert!((s.position - Vec2::new(180.0, 0.0)).norm() < 1e-12);
        let s = agent_step(AgentState::at(Vec2::ZERO), ControlInput { speed: 6.0, heading_deg: 90.0 }, 60.0, &g, c);
        assert!((s.position - Vec2::new(0.0, 360.0)).norm() < 1e-9);
        let s = agent_step(AgentState::at(Vec2::new(2990.0, 0.0)), ControlInput { speed: 3.0, heading_deg: 0.0 }, 60.0, &g, c);
        assert_eq!(s.position, Vec2::new(3000.0, 0.0));
    }

    #[test]
    fn compass_heading() {
        let g = grid();
        let s = agent_step(
            AgentState::at(Vec2::new(100.0, 100.0)),
            ControlInput { speed: 1.0, heading_deg: 0.0 },
            10.0,
            &g,
            HeadingConvention::Compass,
        );
        assert!((s.position - Vec2::new(100.0, 110.0)).norm() < 1e-12);
    }

    #[test]
    fn action_set_order() {
        let a = ActionSet { speeds: vec![3.0, 6.0], headings_deg: vec![0.0, 90.0, 180.0, 270.0] };
        let c = a.controls();
        assert_eq!(c.len(), 8);
        assert_eq!(c[0], ControlInput { speed: 3.0, heading_deg: 0.0 });
        assert_eq!(c[5], ControlInput { speed: 6.0, heading_deg: 90.0 });
    }

    #[test]
    fn range_checks() {
        let s = sensor();
        assert!((s.range - 433.012_701_892).abs() < 1e-6);
        let a = AgentState::at(Vec2::ZERO);
        assert!(in_range(&a, Vec2::ZERO, &s));
        assert!(in_range(&a, Vec2::new(s.range, 0.0), &s));
        assert!(in_range(&a, Vec2::new(430.9, 0.0), &s));
        assert!(!in_range(&a, Vec2::new(433.1, 0.0), &s));
        assert!(in_range(&a, Vec2::new(1e9, 0.0), &s.with_infinite_range()));
    }

    #[test]
    fn no_vertex_in_range_gives_empty_set() {
        let f = FireFront::ellipse(Vec2::new(2000.0, 2000.0), 50.0, 30.0, 0.0, 10).unwrap();
        let mut rng = stream_rng(&[9]);
        let z = generate_measurements(&f, &AgentState::at(Vec2::ZERO), &sensor(), &mut rng);
        assert!(z.is_empty());
    }

    fn single(p: Vec2) -> FireFront {
        FireFront::from_vertices(vec![p])
    }

    #[test]
    fn likelihood_of_empty_set() {
        let s = sensor();
        let a = AgentState::at(Vec2::ZERO);
        let z = MeasurementSet::default();
        assert_eq!(log_set_likelihood(&z, &single(Vec2::new(10.0, 0.0)), &a, &s), -5.0);
        assert_eq!(log_set_likelihood(&z, &single(Vec2::new(1000.0, 0.0)), &a, &s), 0.0);
    }

    #[test]
    fn likelihood_single_detection() {
        let s = sensor();
        let a = AgentState::at(Vec2::ZERO);
        let x = Vec2::new(10.0, -4.0);
        let zk = Vec2::new(12.0, -1.0);
        let z = MeasurementSet { detections: vec![zk] };
        let expected = -5.0 + (5.0 * gaussian_pdf_2d(zk, x, 3.5)).ln();
        assert!((log_set_likelihood(&z, &single(x), &a, &s) - expected).abs() < 1e-12);
    }

    #[test]
    fn unexplained_detection_is_impossible() {
        let s = sensor();
        let z = MeasurementSet { detections: vec![Vec2::new(1.0, 1.0)] };
        let far = single(Vec2::new(2000.0, 0.0));
        assert_eq!(log_set_likelihood(&z, &far, &AgentState::at(Vec2::ZERO), &s), f64::NEG_INFINITY);
    }

    #[test]
    fn far_vertices_do_not_matter() {
        let s = sensor();
        let a = AgentState::at(Vec2::ZERO);
        let z = MeasurementSet { detections: vec![Vec2::new(3.0, 1.0), Vec2::new(-20.0, 7.0)] };
        let near = FireFront::from_vertices(vec![Vec2::new(0.0, 0.0), Vec2::new(-18.0, 5.0)]);
        let mut extended = near.clone().into_vertices();
        extended.push(Vec2::new(2500.0, 2500.0));
        let extended = FireFront::from_vertices(extended);
        assert_eq!(log_set_likelihood(&z, &near, &a, &s), log_set_likelihood(&z, &extended, &a, &s));
    }

    #[test]
    fn likelihood_peaks_at_detection() {
        let s = sensor();
        let a = AgentState::at(Vec2::ZERO);
        let zk = Vec2::new(40.0, 25.0);
        let z = MeasurementSet { detections: vec![zk] };
        let at = log_set_likelihood(&z, &single(zk), &a, &s);
        for k in 0..16 {
            let off = Vec2::from_polar(0.5 + k as f64, k as f64);
            assert!(log_set_likelihood(&z, &single(zk + off), &a, &s) < at);
        }
    }

    #[test]
    fn factorial_term() {
        assert_eq!(ln_factorial(0), 0.0);
        assert!((ln_factorial(5) - 120f64.ln()).abs() < 1e-12);
    }
}
