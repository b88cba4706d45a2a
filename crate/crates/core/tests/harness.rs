use fire_monitor::harness::{aggregate, rmse, run_episode, run_monte_carlo, run_monte_carlo_traces, ControllerSpec};
use fire_monitor::scenario::Scenario;

fn small() -> Scenario {
    let mut s = Scenario::reference();
    s.sim.steps = 6;
    s.sim.filter.particles = 300;
    s.planner.rollout_particles = 50;
    s
}

#[test]
fn static_agent_never_moves() {
    let s = small();
    let t = run_episode(&s, ControllerSpec::Static, 3).unwrap();
    assert_eq!(t.steps.len(), s.sim.steps);
    for r in &t.steps {
        assert_eq!(r.agent.position, s.agent.start);
    }
}

#[test]
fn planner_moves_the_agent_and_logs_costs() {
    let s = small();
    let t = run_episode(&s, ControllerSpec::LcbHorizon(1), 3).unwrap();
    assert!(t.steps.iter().any(|r| r.agent.position != s.agent.start));
    for r in &t.steps {
        let p = r.planner.as_ref().expect("planner summary");
        assert!((0.0..=s.planner.discount).contains(&p.mean_cost));
        assert!(p.pull_count >= 1 && p.policy_index < 8);
        assert!((0.0..=1.0).contains(&r.rwd));
    }
}

#[test]
fn episodes_are_reproducible() {
    let s = small();
    let a = run_episode(&s, ControllerSpec::LcbHorizon(2), 9).unwrap();
    let b = run_episode(&s, ControllerSpec::LcbHorizon(2), 9).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, run_episode(&s, ControllerSpec::LcbHorizon(2), 10).unwrap());
}

#[test]
fn controllers_share_the_true_fire() {
    let s = small();
    let a = run_episode(&s, ControllerSpec::Random, 4).unwrap();
    let b = run_episode(&s, ControllerSpec::LcbHorizon(1), 4).unwrap();
    assert_eq!(a.true_fronts(), b.true_fronts());
    assert_ne!(a.steps.iter().map(|r| r.agent).collect::<Vec<_>>(), b.steps.iter().map(|r| r.agent).collect::<Vec<_>>());
}

#[test]
fn rmse_is_computed_against_the_true_front() {
    let s = small();
    let t = run_episode(&s, ControllerSpec::Random, 2).unwrap();
    for r in &t.steps {
        assert_eq!(r.rmse, rmse(&r.mmse_front, &r.true_front).unwrap());
        assert!(r.rmse >= 0.0);
    }
}

#[test]
fn infinite_range_stays_within_three_sigma() {
    let s = Scenario::reference();
    let seeds = 20;
    let mut sums = vec![0.0; s.sim.steps];
    for seed in 0..seeds {
        let t = run_episode(&s, ControllerSpec::InfiniteRange, seed).unwrap();
        assert!(t.steps.iter().all(|r| r.agent.position == s.agent.start));
        for (acc, r) in sums.iter_mut().zip(t.rmse_series()) {
            *acc += r / seeds as f64;
        }
    }
    let bound = 3.0 * s.sensor.noise_std;
    assert!(sums.iter().all(|&m| m < bound), "{sums:?}");
}

#[test]
fn single_trial_report_equals_the_episode() {
    let s = small();
    let report = run_monte_carlo(&s, &[ControllerSpec::Static], 1, 5).unwrap();
    let (seeds, traces) = run_monte_carlo_traces(&s, &[ControllerSpec::Static], 1, 5).unwrap();
    assert_eq!(report.seeds, seeds);
    let expected: Vec<f64> = traces[0][0].rmse_series().iter().map(|r| r.log10()).collect();
    assert_eq!(report.controllers[0].mean_log10_rmse, expected);
    assert!(report.controllers[0].std_log10_rmse.iter().all(|&v| v == 0.0));
}

#[test]
fn report_matches_recomputation_from_traces() {
    let s = small();
    let controllers = [ControllerSpec::Static, ControllerSpec::Random];
    let (seeds, traces) = run_monte_carlo_traces(&s, &controllers, 3, 8).unwrap();
    let report = run_monte_carlo(&s, &controllers, 3, 8).unwrap();
    assert_eq!(report, aggregate(&controllers, seeds, &traces));
    for trial in &traces {
        assert_eq!(trial[0].true_fronts(), trial[1].true_fronts());
    }
    for (ci, c) in report.controllers.iter().enumerate() {
        for step in 0..s.sim.steps {
            let vals: Vec<f64> = traces.iter().map(|t| t[ci].steps[step].rmse.log10()).collect();
            let mean = vals.iter().sum::<f64>() / 3.0;
            assert!((c.mean_log10_rmse[step] - mean).abs() < 1e-12);
        }
    }
    let csv = report.to_csv();
    assert!(csv.starts_with("controller,step,mean_log10_rmse,std_log10_rmse,trials\n"));
    assert_eq!(csv.lines().count(), 1 + 2 * s.sim.steps);
}

#[test]
fn instances_are_randomized_inside_the_environment() {
    let s = small();
    let (_, traces) = run_monte_carlo_traces(&s, &[ControllerSpec::Static], 4, 1).unwrap();
    let starts: Vec<_> = traces.iter().map(|t| t[0].steps[0].agent.position).collect();
    assert!(starts.windows(2).all(|w| w[0] != w[1]));
    for t in &traces {
        assert!(t[0].initial_front.vertices().iter().all(|v| s.grid.contains(*v)));
    }
}

#[test]
fn zero_trials_is_rejected() {
    assert!(run_monte_carlo(&small(), &[ControllerSpec::Static], 0, 1).is_err());
}
