//! Independent re-derivations checked against the library.

use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, Continuous, ContinuousCDF, Discrete, DiscreteCDF, Normal, Poisson};

use fire_monitor::environment::{sample_env, sample_rectified_gaussian, EnvDraw, EnvSample, VonMises};
use fire_monitor::fire_model::{propagate, FireFront};
use fire_monitor::scenario::Scenario;
use fire_monitor::sensing::{generate_measurements, AgentState, SensorModel};
use fire_monitor::Vec2;

/// Support point of the spread ellipse in the direction of the outward normal,
/// written in the wind frame.
fn huygens_velocity(tangent: Vec2, draw: &EnvDraw) -> Vec2 {
    let w = draw.wind_speed;
    let r = draw.spread_rate;
    let lb = (0.936 * (0.2566 * w).exp() + 0.461 * (-0.1548 * w).exp() - 0.397).max(1.0);
    let hb = (lb + (lb * lb - 1.0).sqrt()) / (lb - (lb * lb - 1.0).sqrt());
    let a = 0.5 * (r + r / hb);
    let b = a / lb;
    let c = a - r / hb;
    let along = Vec2::new(draw.wind_dir.sin(), draw.wind_dir.cos());
    let across = Vec2::new(along.y, -along.x);
    let normal = Vec2::new(tangent.y, -tangent.x);
    let (nu, nv) = (normal.dot(along), normal.dot(across));
    let h = (a * a * nu * nu + b * b * nv * nv).sqrt();
    let (pu, pv) = if h > 0.0 { (a * a * nu / h, b * b * nv / h) } else { (0.0, 0.0) };
    along * (pu + c) + across * pv
}

fn huygens_step(front: &[Vec2], env: &EnvSample, dt: f64) -> Vec<Vec2> {
    let n = front.len();
    (0..n)
        .map(|i| {
            let d = front[(i + 1) % n] - front[(i + n - 1) % n];
            let t = d * (1.0 / d.norm());
            front[i] + huygens_velocity(t, &env.draws[i]) * dt
        })
        .collect()
}

#[test]
fn propagation_matches_huygens_construction_over_25_steps() {
    let s = Scenario::reference();
    let field = s.env_field();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut lib = s.initial_front().unwrap();
    let mut other = lib.vertices().to_vec();
    for _ in 0..25 {
        let env = sample_env(&lib, &field, &mut rng);
        lib = propagate(&lib, &env, s.fire.dt).unwrap();
        other = huygens_step(&other, &env, s.fire.dt);
    }
    for (a, b) in lib.vertices().iter().zip(&other) {
        assert!(a.distance(*b) < 1e-9, "{a:?} vs {b:?}");
    }
}

#[test]
fn rectified_gaussian_mean_matches_closed_form() {
    let std_normal = Normal::new(0.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for (mu, sigma) in [(4.0, 1.0), (0.5, 1.0), (-0.2, 0.3)] {
        let k = mu / sigma;
        let expected = mu * std_normal.cdf(k) + sigma * std_normal.pdf(k);
        let n = 100_000;
        let draws: Vec<f64> = (0..n).map(|_| sample_rectified_gaussian(mu, sigma, &mut rng)).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let sd = (draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        assert!((mean - expected).abs() < 3.0 * sigma.max(sd) / (n as f64).sqrt(), "mu {mu}: {mean} vs {expected}");
        assert!(draws.iter().all(|&d| d >= 0.0));
    }
}

#[test]
fn von_mises_circular_mean_and_concentration() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mu = 1.2;
    let vm = VonMises::new(mu, 500.0);
    let (mut c, mut s) = (0.0, 0.0);
    for _ in 0..100_000 {
        let x = vm.sample(&mut rng);
        c += x.cos();
        s += x.sin();
    }
    let mean = s.atan2(c);
    assert!((mean - mu).abs() < 0.01);
    // mean resultant length of VM(500) is I1(500)/I0(500), about 1 - 1/1000
    let rbar = (c * c + s * s).sqrt() / 100_000.0;
    assert!((rbar - (1.0 - 1.0 / 1000.0 - 1.0 / 2.0e6)).abs() < 2e-4, "{rbar}");
}

#[test]
fn measurement_cardinality_is_poisson() {
    let sensor = SensorModel { range: 400.0, noise_std: 3.5, intensity: 5.0 };
    let front = FireFront::from_vertices(vec![Vec2::new(100.0, 100.0)]);
    let agent = AgentState::at(Vec2::new(150.0, 120.0));
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let n = 50_000;
    let max_bin = 12;
    let mut counts = vec![0u64; max_bin + 1];
    for _ in 0..n {
        let m = generate_measurements(&front, &agent, &sensor, &mut rng).len();
        counts[m.min(max_bin)] += 1;
    }
    let pois = Poisson::new(5.0).unwrap();
    let mut chi2 = 0.0;
    for (k, &obs) in counts.iter().enumerate() {
        let p = if k < max_bin { pois.pmf(k as u64) } else { 1.0 - pois.cdf(max_bin as u64 - 1) };
        let expected = p * n as f64;
        chi2 += (obs as f64 - expected).powi(2) / expected;
    }
    let critical = ChiSquared::new(max_bin as f64).unwrap().inverse_cdf(0.999);
    assert!(chi2 < critical, "chi2 {chi2} >= {critical}");
}

#[test]
fn out_of_range_vertices_are_never_detected() {
    let sensor = SensorModel { range: 10.0, noise_std: 3.5, intensity: 5.0 };
    let front = FireFront::from_vertices(vec![Vec2::new(0.0, 0.0), Vec2::new(100.0, 0.0)]);
    let agent = AgentState::at(Vec2::new(100.0, 5.0));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let z = generate_measurements(&front, &agent, &sensor, &mut rng);
        assert!(z.detections.iter().all(|d| d.x > 50.0));
    }
}
