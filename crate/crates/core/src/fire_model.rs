//! Stochastic elliptical fire-front growth.
//!
//! The front is a closed counter-clockwise ring of vertices. Each vertex
//! grows as an ellipse whose shape follows from the local spread rate and
//! wind speed and whose orientation follows the local wind direction.
//! Wind direction uses a compass convention: `theta = 0` pushes the fire
//! toward `+y` and `theta = pi/2` toward `+x`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::environment::EnvSample;
use crate::error::{Error, Result};
use crate::geometry::Vec2;

/// Ordered perimeter vertices, counter-clockwise, closed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FireFront {
    vertices: Vec<Vec2>,
}

impl FireFront {
    /// Builds a front, requiring at least 3 vertices in counter-clockwise order.
    pub fn new(vertices: Vec<Vec2>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::validation("front", format!("needs at least 3 vertices, got {}", vertices.len())));
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("front", "non-finite vertex"));
        }
        let front = FireFront { vertices };
        if front.signed_area() <= 0.0 {
            return Err(Error::validation("front", "vertices are not counter-clockwise"));
        }
        Ok(front)
    }

    /// Wraps vertices without any ordering check. Used for estimates and
    /// particles, which may be locally folded.
    pub fn from_vertices(vertices: Vec<Vec2>) -> Self {
        FireFront { vertices }
    }

    /// `n` vertices on an ellipse at equal parameter-angle spacing, CCW.
    /// `orientation` rotates the major axis away from `+x` (radians).
    pub fn ellipse(center: Vec2, semi_major: f64, semi_minor: f64, orientation: f64, n: usize) -> Result<Self> {
        if !(semi_major > 0.0 && semi_minor > 0.0) {
            return Err(Error::validation("fire.ignition", "semi-axes must be positive"));
        }
        let vertices = (0..n)
            .map(|k| {
                let phi = TAU * k as f64 / n as f64;
                center + Vec2::new(semi_major * phi.cos(), semi_minor * phi.sin()).rotated(orientation)
            })
            .collect();
        FireFront::new(vertices)
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn vertices_mut(&mut self) -> &mut [Vec2] {
        &mut self.vertices
    }

    pub fn into_vertices(self) -> Vec<Vec2> {
        self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Shoelace area; positive for counter-clockwise rings.
    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        0.5 * (0..n)
            .map(|i| self.vertices[i].cross(self.vertices[(i + 1) % n]))
            .sum::<f64>()
    }

    pub fn centroid(&self) -> Vec2 {
        let n = self.vertices.len() as f64;
        let s = self.vertices.iter().fold(Vec2::ZERO, |acc, &v| acc + v);
        s * (1.0 / n)
    }

    /// First pair of non-adjacent edges that cross, if any.
    pub fn self_intersection(&self) -> Option<(usize, usize)> {
        let n = self.vertices.len();
        for i in 0..n {
            let (a0, a1) = (self.vertices[i], self.vertices[(i + 1) % n]);
            for j in (i + 2)..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (b0, b1) = (self.vertices[j], self.vertices[(j + 1) % n]);
                if segments_cross(a0, a1, b0, b1) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn translated(&self, offset: Vec2) -> FireFront {
        FireFront::from_vertices(self.vertices.iter().map(|&v| v + offset).collect())
    }

    /// Rotation about the origin by `angle` radians, CCW.
    pub fn rotated(&self, angle: f64) -> FireFront {
        FireFront::from_vertices(self.vertices.iter().map(|&v| v.rotated(angle)).collect())
    }
}

fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b - a).cross(c - a)
}

fn segments_cross(a0: Vec2, a1: Vec2, b0: Vec2, b1: Vec2) -> bool {
    let d1 = orient(b0, b1, a0);
    let d2 = orient(b0, b1, a1);
    let d3 = orient(a0, a1, b0);
    let d4 = orient(a0, a1, b1);
    (d1 > 0.0) != (d2 > 0.0) && (d3 > 0.0) != (d4 > 0.0) && d1 != 0.0 && d2 != 0.0 && d3 != 0.0 && d4 != 0.0
}

/// Ellipse shape at one vertex (all speeds in m/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeParams {
    /// semi-minor axis rate
    pub a1: f64,
    /// semi-major axis rate
    pub a2: f64,
    /// ignition-to-center offset rate
    pub a3: f64,
    pub lb: f64,
    pub hb: f64,
}

/// Length-to-breadth ratio as a function of wind speed, floored at 1.
pub fn length_breadth_ratio(wind_speed: f64) -> Result<f64> {
    if wind_speed < 0.0 || wind_speed.is_nan() {
        return Err(Error::NegativeInput {
            name: "wind_speed",
            value: wind_speed,
        });
    }
    let lb = 0.936 * (0.2566 * wind_speed).exp() + 0.461 * (-0.1548 * wind_speed).exp() - 0.397;
    Ok(lb.max(1.0))
}

/// Head-to-back ratio for a given length-to-breadth ratio.
pub fn head_back_ratio(lb: f64) -> Result<f64> {
    if lb < 1.0 || lb.is_nan() {
        return Err(Error::RatioBelowOne(lb));
    }
    let root = (lb * lb - 1.0).sqrt();
    Ok((lb + root) / (lb - root))
}

pub fn shape_params(spread_rate: f64, wind_speed: f64) -> Result<ShapeParams> {
    if spread_rate < 0.0 || spread_rate.is_nan() {
        return Err(Error::NegativeInput {
            name: "spread_rate",
            value: spread_rate,
        });
    }
    let lb = length_breadth_ratio(wind_speed)?;
    let hb = head_back_ratio(lb)?;
    let back = spread_rate / hb;
    let a2 = (spread_rate + back) / 2.0;
    Ok(ShapeParams {
        a1: a2 / lb,
        a2,
        a3: a2 - back,
        lb,
        hb,
    })
}

/// Unit tangents by central difference over ring neighbours.
pub fn tangents(front: &FireFront) -> Result<Vec<Vec2>> {
    let v = front.vertices();
    let n = v.len();
    (0..n)
        .map(|i| {
            let d = v[(i + 1) % n] - v[(i + n - 1) % n];
            let len = d.norm();
            if len == 0.0 || !len.is_finite() {
                Err(Error::DegenerateFront(i))
            } else {
                Ok(d * (1.0 / len))
            }
        })
        .collect()
}

const DENOMINATOR_EPS: f64 = 1e-12;

/// Growth velocity of a vertex with unit tangent `tangent`.
pub fn vertex_velocity(tangent: Vec2, wind_dir: f64, shape: &ShapeParams) -> Vec2 {
    let (s, c) = wind_dir.sin_cos();
    let (xs, ys) = (tangent.x, tangent.y);
    let sc = xs * s + ys * c;
    let cs = xs * c - ys * s;
    let a1_sq = shape.a1 * shape.a1;
    let a2_sq = shape.a2 * shape.a2;
    let advect = Vec2::new(shape.a3 * s, shape.a3 * c);
    let denom = (a2_sq * cs * cs + a1_sq * sc * sc).sqrt();
    if denom < DENOMINATOR_EPS {
        return advect;
    }
    Vec2::new(
        (a1_sq * c * sc - a2_sq * s * cs) / denom,
        (-a1_sq * s * sc - a2_sq * c * cs) / denom,
    ) + advect
}

/// One explicit Euler step of the front under environmental draws `env`.
/// Tangents come from the pre-update front.
pub fn propagate(front: &FireFront, env: &EnvSample, dt: f64) -> Result<FireFront> {
    if env.len() != front.len() {
        return Err(Error::VertexCountMismatch(front.len(), env.len()));
    }
    let tangent = tangents(front)?;
    let vertices = front
        .vertices()
        .iter()
        .zip(tangent)
        .zip(&env.draws)
        .map(|((&p, t), draw)| {
            let shape = shape_params(draw.spread_rate, draw.wind_speed)?;
            Ok(p + vertex_velocity(t, draw.wind_dir, &shape) * dt)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FireFront::from_vertices(vertices))
}

/// Geometric problems detected after a step. The front is kept as-is.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FrontWarning {
    NotCounterClockwise { signed_area: f64 },
    SelfIntersection { edge_a: usize, edge_b: usize },
}

/// Like [`propagate`], additionally reporting orientation loss or self-intersection.
pub fn propagate_checked(front: &FireFront, env: &EnvSample, dt: f64) -> Result<(FireFront, Option<FrontWarning>)> {
    let next = propagate(front, env, dt)?;
    let area = next.signed_area();
    let warning = if area <= 0.0 {
        Some(FrontWarning::NotCounterClockwise { signed_area: area })
    } else {
        next.self_intersection()
            .map(|(edge_a, edge_b)| FrontWarning::SelfIntersection { edge_a, edge_b })
    };
    Ok((next, warning))
}
