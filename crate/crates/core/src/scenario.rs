//! Scenario files.
//!
//! A scenario is one JSON document with top-level keys `grid`, `cells`,
//! `risk`, `fire`, `sensor`, `agent`, `planner`, `sim` and `seed`. Lengths
//! are meters, times seconds, and angles degrees. `cells` and `risk` are
//! row-major: entry `iy * n + ix` describes cell `(ix, iy)`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::environment::{CellDistribution, CellIndex, EnvField, GridSpec, RiskMap};
use crate::error::{Error, Result};
use crate::filter::FilterConfig;
use crate::fire_model::FireFront;
use crate::geometry::Vec2;
use crate::sensing::{ActionSet, AgentState, HeadingConvention, SensorModel};

/// Cell parameters as written in the file (wind direction in degrees).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSpec {
    pub wind_dir_mean_deg: f64,
    pub wind_dir_concentration: f64,
    pub wind_speed_mean: f64,
    pub wind_speed_std: f64,
    pub spread_rate_mean: f64,
    pub spread_rate_std: f64,
}

impl CellSpec {
    pub fn to_distribution(&self) -> CellDistribution {
        CellDistribution {
            wind_dir_mean: self.wind_dir_mean_deg.to_radians(),
            wind_dir_concentration: self.wind_dir_concentration,
            wind_speed_mean: self.wind_speed_mean,
            wind_speed_std: self.wind_speed_std,
            spread_rate_mean: self.spread_rate_mean,
            spread_rate_std: self.spread_rate_std,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ignition {
    pub center: Vec2,
    pub semi_major: f64,
    pub semi_minor: f64,
    #[serde(default)]
    pub orientation_deg: f64,
}

impl Ignition {
    /// Half-widths of the axis-aligned bounding box.
    pub fn half_extent(&self) -> Vec2 {
        let (s, c) = self.orientation_deg.to_radians().sin_cos();
        let (a, b) = (self.semi_major, self.semi_minor);
        Vec2::new((a * a * c * c + b * b * s * s).sqrt(), (a * a * s * s + b * b * c * c).sqrt())
    }

    pub fn inside(&self, grid: &GridSpec) -> bool {
        let h = self.half_extent();
        grid.contains(self.center - h) && grid.contains(self.center + h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FireSpec {
    pub dt: f64,
    pub n_vertices: usize,
    pub ignition: Ignition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub start: Vec2,
    pub speeds: Vec<f64>,
    pub headings_deg: Vec<f64>,
    #[serde(default)]
    pub heading_convention: HeadingConvention,
}

impl AgentSpec {
    pub fn action_set(&self) -> ActionSet {
        ActionSet {
            speeds: self.speeds.clone(),
            headings_deg: self.headings_deg.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlannerSpec {
    pub horizon: usize,
    pub discount: f64,
    /// Rollout budget per decision; defaults to four rollouts per policy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    pub rollout_particles: usize,
    /// RWD normalizer; defaults to the cell-supported maximum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSpec {
    pub particles: usize,
    pub resample_threshold: f64,
    pub init_std: f64,
    pub kernel_bandwidth: f64,
    pub roughening_std: f64,
}

impl From<FilterSpec> for FilterConfig {
    fn from(s: FilterSpec) -> Self {
        FilterConfig {
            n_particles: s.particles,
            resample_threshold: s.resample_threshold,
            init_std: s.init_std,
            kernel_bandwidth: s.kernel_bandwidth,
            roughening_std: s.roughening_std,
        }
    }
}

impl From<FilterConfig> for FilterSpec {
    fn from(c: FilterConfig) -> Self {
        FilterSpec {
            particles: c.n_particles,
            resample_threshold: c.resample_threshold,
            init_std: c.init_std,
            kernel_bandwidth: c.kernel_bandwidth,
            roughening_std: c.roughening_std,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSpec {
    pub steps: usize,
    pub filter: FilterSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub grid: GridSpec,
    pub cells: Vec<CellSpec>,
    #[serde(with = "risk_values")]
    pub risk: RiskMap,
    pub fire: FireSpec,
    pub sensor: SensorModel,
    pub agent: AgentSpec,
    pub planner: PlannerSpec,
    pub sim: SimSpec,
    pub seed: u64,
}

mod risk_values {
    use super::RiskMap;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(r: &RiskMap, s: S) -> Result<S::Ok, S::Error> {
        r.values.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<RiskMap, D::Error> {
        Vec::<f64>::deserialize(d).map(|values| RiskMap { values })
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(field, format!("must be positive, got {v}")))
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Scenario::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }

    /// Short content hash of the canonical JSON form.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(serde_json::to_vec(self).expect("scenario serializes"));
        hex::encode(&digest[..8])
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.env_field().validate()?;
        self.risk.validate(&self.grid)?;

        positive("fire.dt", self.fire.dt)?;
        if self.fire.n_vertices < 3 {
            return Err(Error::validation("fire.n_vertices", "must be at least 3"));
        }
        let ign = &self.fire.ignition;
        positive("fire.ignition.semi_major", ign.semi_major)?;
        positive("fire.ignition.semi_minor", ign.semi_minor)?;
        if !ign.orientation_deg.is_finite() {
            return Err(Error::validation("fire.ignition.orientation_deg", "must be finite"));
        }
        if !ign.inside(&self.grid) {
            return Err(Error::validation("fire.ignition", "ellipse is not contained in the environment"));
        }

        self.sensor.validate()?;

        if !self.grid.contains(self.agent.start) {
            return Err(Error::validation("agent.start", "outside the environment"));
        }
        if self.agent.speeds.is_empty() || self.agent.headings_deg.is_empty() {
            return Err(Error::validation("agent", "speeds and headings_deg must be non-empty"));
        }
        if let Some(s) = self.agent.speeds.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
            return Err(Error::validation("agent.speeds", format!("invalid speed {s}")));
        }
        if self.agent.headings_deg.iter().any(|h| !h.is_finite()) {
            return Err(Error::validation("agent.headings_deg", "must be finite"));
        }

        let p = &self.planner;
        if p.horizon == 0 {
            return Err(Error::validation("planner.horizon", "must be at least 1"));
        }
        if !(p.discount > 0.0 && p.discount <= 1.0) {
            return Err(Error::validation("planner.discount", "must lie in (0, 1]"));
        }
        if p.rollout_particles == 0 {
            return Err(Error::validation("planner.rollout_particles", "must be at least 1"));
        }
        if let Some(w) = p.omega {
            positive("planner.omega", w)?;
        }
        if let Some(b) = p.budget {
            let policies = (self.agent.speeds.len() * self.agent.headings_deg.len()) as f64;
            if (b as f64) < policies.powi(p.horizon as i32) {
                return Err(Error::validation("planner.budget", "must be at least the number of policies"));
            }
        }

        if self.sim.steps == 0 {
            return Err(Error::validation("sim.steps", "must be at least 1"));
        }
        self.filter_config().validate()?;
        Ok(())
    }

    pub fn env_field(&self) -> EnvField {
        EnvField {
            grid: self.grid,
            cells: self.cells.iter().map(CellSpec::to_distribution).collect(),
        }
    }

    pub fn filter_config(&self) -> FilterConfig {
        self.sim.filter.into()
    }

    pub fn initial_front(&self) -> Result<FireFront> {
        let ign = &self.fire.ignition;
        FireFront::ellipse(
            ign.center,
            ign.semi_major,
            ign.semi_minor,
            ign.orientation_deg.to_radians(),
            self.fire.n_vertices,
        )
    }

    pub fn initial_agent(&self) -> AgentState {
        AgentState::at(self.agent.start)
    }

    pub fn risk_at(&self, cell: CellIndex) -> Result<f64> {
        self.risk.risk(cell, &self.grid)
    }

    /// A 3 km square, 10x10 cells, 20-vertex ignition ellipse at (800, 900).
    /// Wind turns from north to east across x; the field means and spreads
    /// are illustrative gradients with the most uncertain and riskiest cells
    /// toward the top-left corner.
    pub fn reference() -> Scenario {
        let n = 10usize;
        let grid = GridSpec {
            origin: Vec2::ZERO,
            side_length: 3000.0,
            cells_per_axis: n,
        };
        let span = (n - 1) as f64;
        let mut cells = Vec::with_capacity(n * n);
        let mut risk = Vec::with_capacity(n * n);
        for iy in 0..n {
            for ix in 0..n {
                let (fx, fy) = (ix as f64 / span, iy as f64 / span);
                let top_left = fy * (1.0 - fx);
                cells.push(CellSpec {
                    wind_dir_mean_deg: 90.0 * fx,
                    wind_dir_concentration: 500.0,
                    wind_speed_mean: 3.0 + 3.0 * fx,
                    wind_speed_std: 0.5 + 1.0 * top_left,
                    spread_rate_mean: 0.2 + 0.15 * (fx + fy),
                    spread_rate_std: 0.05 + 0.1 * top_left,
                });
                risk.push(0.2 + 0.8 * top_left);
            }
        }
        Scenario {
            grid,
            cells,
            risk: RiskMap { values: risk },
            fire: FireSpec {
                dt: 60.0,
                n_vertices: 20,
                ignition: Ignition {
                    center: Vec2::new(800.0, 900.0),
                    semi_major: 120.0,
                    semi_minor: 60.0,
                    orientation_deg: 0.0,
                },
            },
            sensor: SensorModel {
                range: SensorModel::camera_range(250.0, 120.0),
                noise_std: 3.5,
                intensity: 5.0,
            },
            agent: AgentSpec {
                start: Vec2::new(700.0, 800.0),
                speeds: vec![3.0, 6.0],
                headings_deg: vec![0.0, 90.0, 180.0, 270.0],
                heading_convention: HeadingConvention::Cartesian,
            },
            planner: PlannerSpec {
                horizon: 1,
                discount: 0.99,
                budget: None,
                rollout_particles: 200,
                omega: None,
            },
            sim: SimSpec {
                steps: 25,
                filter: FilterConfig::default().into(),
            },
            seed: 42,
        }
    }

    pub fn with_uniform_risk(mut self, value: f64) -> Scenario {
        self.risk = RiskMap::uniform(&self.grid, value);
        self
    }
}
