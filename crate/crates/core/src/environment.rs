//! Bounded square world, its grid, and the per-cell stochastic fields.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fire_model::FireFront;
use crate::geometry::Vec2;

/// Square grid covering the environment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub origin: Vec2,
    pub side_length: f64,
    pub cells_per_axis: usize,
}

/// `(ix, iy)` with `ix` along x and `iy` along y.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellIndex {
    pub ix: usize,
    pub iy: usize,
}

impl CellIndex {
    pub const fn new(ix: usize, iy: usize) -> Self {
        CellIndex { ix, iy }
    }
}

impl GridSpec {
    pub fn new(origin: Vec2, side_length: f64, cells_per_axis: usize) -> Result<Self> {
        let grid = GridSpec {
            origin,
            side_length,
            cells_per_axis,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.side_length > 0.0 && self.side_length.is_finite()) {
            return Err(Error::validation("grid.side_length", "must be positive and finite"));
        }
        if self.cells_per_axis == 0 {
            return Err(Error::validation("grid.cells_per_axis", "must be at least 1"));
        }
        if !self.origin.is_finite() {
            return Err(Error::validation("grid.origin", "must be finite"));
        }
        Ok(())
    }

    pub fn cell_side(&self) -> f64 {
        self.side_length / self.cells_per_axis as f64
    }

    pub fn cell_count(&self) -> usize {
        self.cells_per_axis * self.cells_per_axis
    }

    pub fn max_corner(&self) -> Vec2 {
        self.origin + Vec2::new(self.side_length, self.side_length)
    }

    fn axis_index(&self, coord: f64, origin: f64) -> usize {
        let raw = ((coord - origin) / self.cell_side()).floor();
        if raw.is_nan() || raw < 0.0 {
            0
        } else {
            (raw as usize).min(self.cells_per_axis - 1)
        }
    }

    /// Cell containing `p`. Interior edges belong to the higher-index cell and
    /// points outside the square clamp to the nearest boundary cell.
    pub fn cell_of(&self, p: Vec2) -> CellIndex {
        CellIndex::new(self.axis_index(p.x, self.origin.x), self.axis_index(p.y, self.origin.y))
    }

    /// Row-major flat index (`iy * n + ix`).
    pub fn flat_index(&self, cell: CellIndex) -> Result<usize> {
        let n = self.cells_per_axis;
        if cell.ix >= n || cell.iy >= n {
            return Err(Error::CellOutOfRange {
                ix: cell.ix,
                iy: cell.iy,
                n,
            });
        }
        Ok(cell.iy * n + cell.ix)
    }

    pub fn cell_from_flat(&self, flat: usize) -> CellIndex {
        CellIndex::new(flat % self.cells_per_axis, flat / self.cells_per_axis)
    }

    pub fn clamp(&self, p: Vec2) -> Vec2 {
        let hi = self.max_corner();
        Vec2::new(p.x.clamp(self.origin.x, hi.x), p.y.clamp(self.origin.y, hi.y))
    }

    pub fn contains(&self, p: Vec2) -> bool {
        let hi = self.max_corner();
        p.x >= self.origin.x && p.x <= hi.x && p.y >= self.origin.y && p.y <= hi.y
    }
}

/// Distribution parameters of one cell. Angles in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellDistribution {
    pub wind_dir_mean: f64,
    pub wind_dir_concentration: f64,
    pub wind_speed_mean: f64,
    pub wind_speed_std: f64,
    pub spread_rate_mean: f64,
    pub spread_rate_std: f64,
}

impl CellDistribution {
    /// A cell with no randomness at all.
    pub fn deterministic(wind_dir: f64, wind_speed: f64, spread_rate: f64) -> Self {
        CellDistribution {
            wind_dir_mean: wind_dir,
            wind_dir_concentration: f64::INFINITY,
            wind_speed_mean: wind_speed,
            wind_speed_std: 0.0,
            spread_rate_mean: spread_rate,
            spread_rate_std: 0.0,
        }
    }

    pub fn validate(&self, path: &str) -> Result<()> {
        let checks: [(&str, f64, bool); 6] = [
            ("wind_dir_mean", self.wind_dir_mean, self.wind_dir_mean.is_finite()),
            ("wind_dir_concentration", self.wind_dir_concentration, self.wind_dir_concentration >= 0.0),
            ("wind_speed_mean", self.wind_speed_mean, self.wind_speed_mean >= 0.0 && self.wind_speed_mean.is_finite()),
            ("wind_speed_std", self.wind_speed_std, self.wind_speed_std >= 0.0 && self.wind_speed_std.is_finite()),
            ("spread_rate_mean", self.spread_rate_mean, self.spread_rate_mean >= 0.0 && self.spread_rate_mean.is_finite()),
            ("spread_rate_std", self.spread_rate_std, self.spread_rate_std >= 0.0 && self.spread_rate_std.is_finite()),
        ];
        for (name, value, ok) in checks {
            if !ok {
                return Err(Error::validation(format!("{path}.{name}"), format!("invalid value {value}")));
            }
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> EnvDraw {
        EnvDraw {
            wind_dir: VonMises::new(self.wind_dir_mean, self.wind_dir_concentration).sample(rng),
            wind_speed: sample_rectified_gaussian(self.wind_speed_mean, self.wind_speed_std, rng),
            spread_rate: sample_rectified_gaussian(self.spread_rate_mean, self.spread_rate_std, rng),
        }
    }
}

/// Per-cell distributions laid out row-major over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvField {
    pub grid: GridSpec,
    pub cells: Vec<CellDistribution>,
}

impl EnvField {
    pub fn new(grid: GridSpec, cells: Vec<CellDistribution>) -> Result<Self> {
        let field = EnvField { grid, cells };
        field.validate()?;
        Ok(field)
    }

    pub fn uniform(grid: GridSpec, cell: CellDistribution) -> Self {
        EnvField {
            grid,
            cells: vec![cell; grid.cell_count()],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.cells.len() != self.grid.cell_count() {
            return Err(Error::validation(
                "cells",
                format!("expected {} cells, found {}", self.grid.cell_count(), self.cells.len()),
            ));
        }
        for (i, cell) in self.cells.iter().enumerate() {
            let c = self.grid.cell_from_flat(i);
            cell.validate(&format!("cells[{i}] (cell {},{})", c.ix, c.iy))?;
        }
        Ok(())
    }

    pub fn at(&self, p: Vec2) -> &CellDistribution {
        let cell = self.grid.cell_of(p);
        &self.cells[cell.iy * self.grid.cells_per_axis + cell.ix]
    }
}

/// Risk value per cell, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskMap {
    pub values: Vec<f64>,
}

impl RiskMap {
    pub fn uniform(grid: &GridSpec, value: f64) -> Self {
        RiskMap {
            values: vec![value; grid.cell_count()],
        }
    }

    pub fn validate(&self, grid: &GridSpec) -> Result<()> {
        if self.values.len() != grid.cell_count() {
            return Err(Error::validation(
                "risk",
                format!("expected {} values, found {}", grid.cell_count(), self.values.len()),
            ));
        }
        for (i, &v) in self.values.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                let c = grid.cell_from_flat(i);
                return Err(Error::validation(
                    format!("risk[{i}] (cell {},{})", c.ix, c.iy),
                    format!("risk {v} outside [0, 1]"),
                ));
            }
        }
        Ok(())
    }

    pub fn risk(&self, cell: CellIndex, grid: &GridSpec) -> Result<f64> {
        let flat = grid.flat_index(cell)?;
        self.values.get(flat).copied().ok_or(Error::CellOutOfRange {
            ix: cell.ix,
            iy: cell.iy,
            n: grid.cells_per_axis,
        })
    }
}

/// One environmental realization at a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvDraw {
    pub wind_dir: f64,
    pub wind_speed: f64,
    pub spread_rate: f64,
}

/// Environmental draws for every vertex of a front, index-aligned with it.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvSample {
    pub draws: Vec<EnvDraw>,
}

impl EnvSample {
    pub fn uniform(n: usize, draw: EnvDraw) -> Self {
        EnvSample { draws: vec![draw; n] }
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }
}

/// Draws an independent environmental realization at every vertex of `front`.
pub fn sample_env<R: Rng + ?Sized>(front: &FireFront, field: &EnvField, rng: &mut R) -> EnvSample {
    EnvSample {
        draws: front.vertices().iter().map(|&v| field.at(v).sample(rng)).collect(),
    }
}

/// `max(0, N(mean, std^2))`.
pub fn sample_rectified_gaussian<R: Rng + ?Sized>(mean: f64, std: f64, rng: &mut R) -> f64 {
    if std == 0.0 {
        return mean.max(0.0);
    }
    let z: f64 = rng.sample(StandardNormal);
    (mean + std * z).max(0.0)
}

/// Above this concentration the sampler switches to a wrapped normal with
/// variance `1 / kappa`.
pub const VON_MISES_NORMAL_KAPPA: f64 = 1.0e4;

/// Von Mises distribution on `[0, 2pi)`, sampled with the Best-Fisher
/// rejection scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VonMises {
    mu: f64,
    kappa: f64,
}

impl VonMises {
    pub fn new(mu: f64, kappa: f64) -> Self {
        VonMises { mu, kappa }
    }
}

pub fn wrap_angle(theta: f64) -> f64 {
    let w = theta.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

impl Distribution<f64> for VonMises {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let kappa = self.kappa;
        if kappa.is_infinite() {
            return wrap_angle(self.mu);
        }
        if kappa < 1e-8 {
            return wrap_angle(rng.random::<f64>() * TAU);
        }
        if kappa > VON_MISES_NORMAL_KAPPA {
            let z: f64 = rng.sample(StandardNormal);
            return wrap_angle(self.mu + z / kappa.sqrt());
        }
        let tau = 1.0 + (1.0 + 4.0 * kappa * kappa).sqrt();
        let rho = (tau - (2.0 * tau).sqrt()) / (2.0 * kappa);
        let r = (1.0 + rho * rho) / (2.0 * rho);
        loop {
            let u1: f64 = rng.random();
            let u2: f64 = rng.random();
            let z = (PI * u1).cos();
            let f = (1.0 + r * z) / (r + z);
            let c = kappa * (r - f);
            if c * (2.0 - c) - u2 > 0.0 || (c / u2).ln() + 1.0 - c >= 0.0 {
                let u3: f64 = rng.random();
                let delta = f.clamp(-1.0, 1.0).acos();
                let theta = if u3 > 0.5 { self.mu + delta } else { self.mu - delta };
                return wrap_angle(theta);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    fn paper_grid() -> GridSpec {
        GridSpec::new(Vec2::ZERO, 3000.0, 10).unwrap()
    }

    #[test]
    fn cell_of_examples() {
        let g = paper_grid();
        assert_eq!(g.cell_of(Vec2::new(50.0, 50.0)), CellIndex::new(0, 0));
        assert_eq!(g.cell_of(Vec2::new(3000.0, 3000.0)), CellIndex::new(9, 9));
        assert_eq!(g.cell_of(Vec2::new(850.0, 950.0)), CellIndex::new(2, 3));
    }

    #[test]
    fn interior_edge_goes_to_higher_cell() {
        let g = paper_grid();
        assert_eq!(g.cell_of(Vec2::new(300.0, 600.0)), CellIndex::new(1, 2));
        assert_eq!(g.cell_of(Vec2::new(-10.0, 4000.0)), CellIndex::new(0, 9));
    }

    #[test]
    fn grid_rejects_bad_specs() {
        assert!(GridSpec::new(Vec2::ZERO, 0.0, 10).is_err());
        assert!(GridSpec::new(Vec2::ZERO, 10.0, 0).is_err());
    }

    #[test]
    fn risk_lookup() {
        let g = paper_grid();
        let ones = RiskMap::uniform(&g, 1.0);
        let zeros = RiskMap::uniform(&g, 0.0);
        assert_eq!(ones.risk(CellIndex::new(4, 7), &g).unwrap(), 1.0);
        assert_eq!(zeros.risk(CellIndex::new(4, 7), &g).unwrap(), 0.0);
        assert!(matches!(
            ones.risk(CellIndex::new(10, 0), &g),
            Err(Error::CellOutOfRange { .. })
        ));
    }

    #[test]
    fn risk_validation_names_cell() {
        let g = paper_grid();
        let mut r = RiskMap::uniform(&g, 0.5);
        r.values[12] = 1.5;
        let msg = r.validate(&g).unwrap_err().to_string();
        assert!(msg.contains("risk[12]") && msg.contains("cell 2,1"), "{msg}");
    }

    #[test]
    fn degenerate_cell_returns_means() {
        let g = paper_grid();
        let cell = CellDistribution {
            wind_dir_mean: 0.7,
            wind_dir_concentration: 1e6,
            wind_speed_mean: 4.0,
            wind_speed_std: 0.0,
            spread_rate_mean: 0.3,
            spread_rate_std: 0.0,
        };
        let field = EnvField::uniform(g, cell);
        let front = FireFront::ellipse(Vec2::new(800.0, 900.0), 120.0, 60.0, 0.0, 20).unwrap();
        let mut rng = stream_rng(&[1]);
        for draw in sample_env(&front, &field, &mut rng).draws {
            assert!((draw.wind_dir - 0.7).abs() < 1e-2);
            assert_eq!(draw.wind_speed, 4.0);
            assert_eq!(draw.spread_rate, 0.3);
        }
    }

    #[test]
    fn rectified_samples_are_nonnegative() {
        let mut rng = stream_rng(&[2]);
        for _ in 0..10_000 {
            assert!(sample_rectified_gaussian(0.1, 1.0, &mut rng) >= 0.0);
        }
    }

    #[test]
    fn von_mises_stays_in_range() {
        let mut rng = stream_rng(&[3]);
        for &kappa in &[0.0, 0.5, 2.0, 50.0, 500.0, 2e4, f64::INFINITY] {
            let d = VonMises::new(6.2, kappa);
            for _ in 0..2000 {
                let t = d.sample(&mut rng);
                assert!((0.0..TAU).contains(&t), "kappa {kappa} gave {t}");
            }
        }
    }

    #[test]
    fn von_mises_circular_mean_and_spread() {
        // For kappa = 500 the mean resultant length is I1/I0 ~ 1 - 1/(2 kappa).
        let mut rng = stream_rng(&[4]);
        let mu = 1.2;
        let d = VonMises::new(mu, 500.0);
        let n = 100_000;
        let (mut s, mut c) = (0.0, 0.0);
        for _ in 0..n {
            let t = d.sample(&mut rng);
            s += t.sin();
            c += t.cos();
        }
        let mean = s.atan2(c);
        let resultant = (s * s + c * c).sqrt() / n as f64;
        assert!((mean - mu).abs() < 0.01);
        assert!((resultant - (1.0 - 1.0 / 1000.0)).abs() < 2e-4, "{resultant}");
    }

    #[test]
    fn von_mises_low_concentration_matches_bessel_ratio() {
        // kappa = 1: I1(1)/I0(1) = 0.446390...
        let mut rng = stream_rng(&[5]);
        let d = VonMises::new(0.0, 1.0);
        let n = 200_000;
        let c: f64 = (0..n).map(|_| d.sample(&mut rng).cos()).sum::<f64>() / n as f64;
        assert!((c - 0.446_390_3).abs() < 0.005, "{c}");
    }
}
