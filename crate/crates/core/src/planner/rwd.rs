//! Risk-weighted dispersion of a particle belief.

use crate::environment::{GridSpec, RiskMap};
use crate::filter::Belief;
use crate::geometry::Vec2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RwdConfig {
    pub omega: f64,
}

impl RwdConfig {
    /// `sum_cells risk * (L^2 / 4)^2`, the largest risk-weighted covariance
    /// determinant a cell of side `L` can hold.
    pub fn default_for(grid: &GridSpec, risk: &RiskMap) -> Self {
        let quarter = grid.cell_side().powi(2) / 4.0;
        let omega = risk.values.iter().sum::<f64>() * quarter * quarter;
        RwdConfig {
            omega: if omega > 0.0 { omega } else { 1.0 },
        }
    }
}

#[derive(Clone, Copy, Default)]
struct Moments {
    n: usize,
    sx: f64,
    sy: f64,
    sxx: f64,
    syy: f64,
    sxy: f64,
}

/// Per-vertex means across particles, anchored on the first particle so
/// that identical particles give their coordinates back exactly.
fn vertex_means(belief: &Belief) -> Vec<Vec2> {
    let particles = belief.particles();
    let anchor = particles[0].vertices();
    let inv = 1.0 / particles.len() as f64;
    let mut acc = vec![Vec2::ZERO; anchor.len()];
    for p in particles {
        for ((a, &v), &o) in acc.iter_mut().zip(p.vertices()).zip(anchor) {
            *a += v - o;
        }
    }
    acc.iter().zip(anchor).map(|(&d, &o)| o + d * inv).collect()
}

/// Bins every vertex of every particle by grid cell and, per cell holding at
/// least two points, takes the determinant of the unbiased sample covariance
/// of the points' offsets from their own vertex mean. Returns
/// `sum risk * det / omega` clipped to `[0, 1]`. Particle weights are ignored.
pub fn rwd(belief: &Belief, grid: &GridSpec, risk: &RiskMap, cfg: &RwdConfig) -> f64 {
    let means = vertex_means(belief);
    let mut moments = vec![Moments::default(); grid.cell_count()];
    let points: Vec<(usize, Vec2)> = belief
        .particles()
        .iter()
        .flat_map(|p| p.vertices().iter().zip(&means).map(|(&v, &m)| (v, v - m)))
        .map(|(v, d)| {
            let c = grid.cell_of(v);
            (c.iy * grid.cells_per_axis + c.ix, d)
        })
        .collect();
    for &(c, d) in &points {
        let m = &mut moments[c];
        m.n += 1;
        m.sx += d.x;
        m.sy += d.y;
    }
    let centers: Vec<Vec2> = moments
        .iter()
        .map(|m| if m.n > 0 { Vec2::new(m.sx / m.n as f64, m.sy / m.n as f64) } else { Vec2::ZERO })
        .collect();
    for &(c, d) in &points {
        let e = d - centers[c];
        let m = &mut moments[c];
        m.sxx += e.x * e.x;
        m.syy += e.y * e.y;
        m.sxy += e.x * e.y;
    }
    let total: f64 = moments
        .iter()
        .zip(&risk.values)
        .filter(|(m, &r)| m.n >= 2 && r > 0.0)
        .map(|(m, &r)| {
            let dof = (m.n - 1) as f64;
            let det = (m.sxx / dof) * (m.syy / dof) - (m.sxy / dof).powi(2);
            r * det.max(0.0)
        })
        .sum();
    (total / cfg.omega).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fire_model::FireFront;

    fn grid() -> GridSpec {
        GridSpec::new(Vec2::ZERO, 3000.0, 10).unwrap()
    }

    fn singles(points: &[Vec2]) -> Belief {
        Belief::uniform(points.iter().map(|&p| FireFront::from_vertices(vec![p])).collect())
    }

    #[test]
    fn identical_particles_have_zero_cost() {
        let g = grid();
        let r = RiskMap::uniform(&g, 1.0);
        let f = FireFront::ellipse(Vec2::new(800.1, 900.7), 120.0, 60.0, 0.3, 20).unwrap();
        let b = Belief::uniform(vec![f; 37]);
        assert_eq!(rwd(&b, &g, &r, &RwdConfig::default_for(&g, &r)), 0.0);
    }

    #[test]
    fn square_points_in_one_cell() {
        let g = grid();
        let r = RiskMap::uniform(&g, 1.0);
        let l = 100.0;
        let o = Vec2::new(1000.0, 1000.0);
        let b = singles(&[o, o + Vec2::new(l, 0.0), o + Vec2::new(0.0, l), o + Vec2::new(l, l)]);
        let expected = (l * l / 3.0).powi(2);
        let scaled = rwd(&b, &g, &r, &RwdConfig { omega: 1e12 });
        assert!((scaled * 1e12 - expected).abs() / expected < 1e-12);
        assert_eq!(rwd(&b, &g, &r, &RwdConfig { omega: 1.0 }), 1.0);
    }

    #[test]
    fn single_point_cells_contribute_nothing() {
        let g = grid();
        let r = RiskMap::uniform(&g, 1.0);
        let b = singles(&[Vec2::new(100.0, 100.0), Vec2::new(1500.0, 1500.0)]);
        assert_eq!(rwd(&b, &g, &r, &RwdConfig { omega: 1.0 }), 0.0);
    }

    #[test]
    fn zero_risk_cells_are_ignored() {
        let g = grid();
        let mut r = RiskMap::uniform(&g, 0.0);
        r.values[55] = 1.0;
        let cfg = RwdConfig::default_for(&g, &r);
        let a = Belief::uniform(vec![
            FireFront::from_vertices(vec![Vec2::new(10.0, 10.0), Vec2::new(1600.0, 1600.0)]),
            FireFront::from_vertices(vec![Vec2::new(200.0, 30.0), Vec2::new(1620.0, 1590.0)]),
            FireFront::from_vertices(vec![Vec2::new(40.0, 90.0), Vec2::new(1605.0, 1640.0)]),
        ]);
        let b = Belief::uniform(vec![
            FireFront::from_vertices(vec![Vec2::new(100.0, 250.0), Vec2::new(1600.0, 1600.0)]),
            FireFront::from_vertices(vec![Vec2::new(20.0, 40.0), Vec2::new(1620.0, 1590.0)]),
            FireFront::from_vertices(vec![Vec2::new(250.0, 10.0), Vec2::new(1605.0, 1640.0)]),
        ]);
        assert_eq!(rwd(&a, &g, &r, &cfg), rwd(&b, &g, &r, &cfg));
        assert!(rwd(&a, &g, &r, &cfg) > 0.0);
    }

    #[test]
    fn permutation_invariant() {
        let g = grid();
        let r = RiskMap::uniform(&g, 1.0);
        let pts = [Vec2::new(1000.0, 1000.0), Vec2::new(1040.0, 1010.0), Vec2::new(1010.0, 1070.0), Vec2::new(990.0, 1020.0)];
        let mut rev = pts;
        rev.reverse();
        let cfg = RwdConfig::default_for(&g, &r);
        let a = rwd(&singles(&pts), &g, &r, &cfg);
        let b = rwd(&singles(&rev), &g, &r, &cfg);
        assert!((a - b).abs() <= 1e-15 * a.abs().max(1e-300));
    }
}
