//! Lower-confidence-bound adaptive search over a finite set of arms.

use serde::{Deserialize, Serialize};

/// Running statistics of one arm.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PolicyStats {
    pub mean_cost: f64,
    pub pull_count: u64,
}

impl PolicyStats {
    pub fn record(&mut self, cost: f64) {
        self.pull_count += 1;
        self.mean_cost += (cost - self.mean_cost) / self.pull_count as f64;
    }
}

/// `Q - sqrt(2 ln n / I)` for visited arms, `lcb_min` otherwise.
pub fn lcb_score(stats: &PolicyStats, n: u64, lcb_min: f64) -> f64 {
    if stats.pull_count == 0 {
        return lcb_min;
    }
    stats.mean_cost - (2.0 * (n as f64).ln() / stats.pull_count as f64).sqrt()
}

/// Score given to unvisited arms: `-(sqrt(2 ln budget) + 1)`, below every
/// visited arm's score for any iteration up to `budget` when costs are
/// non-negative.
pub fn default_lcb_min(budget: u64) -> f64 {
    -((2.0 * (budget as f64).ln()).sqrt() + 1.0)
}

/// Lowest-scoring arm; ties go to the lowest index.
pub fn argmin_lcb(stats: &[PolicyStats], n: u64, lcb_min: f64) -> usize {
    let mut best = 0;
    let mut best_score = f64::INFINITY;
    for (i, s) in stats.iter().enumerate() {
        let score = lcb_score(s, n, lcb_min);
        if score < best_score {
            best = i;
            best_score = score;
        }
    }
    best
}

/// One iteration of the search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: u64,
    pub policy: usize,
    pub cost: f64,
    pub mean_cost: f64,
    pub pull_count: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub best: usize,
    pub stats: Vec<PolicyStats>,
    pub history: Vec<IterationRecord>,
}

/// Runs `budget` iterations. `evaluate(arm, k)` returns one sampled cost of
/// `arm`, where `k` counts the previous pulls of that arm. The output is the
/// argmin of the final scores at `n = budget`.
pub fn lcb_search<F>(n_arms: usize, budget: u64, lcb_min: f64, keep_history: bool, mut evaluate: F) -> SearchOutcome
where
    F: FnMut(usize, u64) -> f64,
{
    assert!(n_arms > 0);
    let mut stats = vec![PolicyStats::default(); n_arms];
    let mut history = Vec::new();
    for n in 1..=budget {
        let arm = argmin_lcb(&stats, n, lcb_min);
        let cost = evaluate(arm, stats[arm].pull_count);
        stats[arm].record(cost);
        if keep_history {
            history.push(IterationRecord {
                iteration: n,
                policy: arm,
                cost,
                mean_cost: stats[arm].mean_cost,
                pull_count: stats[arm].pull_count,
            });
        }
    }
    let best = argmin_lcb(&stats, budget.max(1), lcb_min);
    SearchOutcome { best, stats, history }
}
