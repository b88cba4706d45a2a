//! Trace and report files.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::episode::{EpisodeTrace, StepRecord};
use super::montecarlo::MonteCarloReport;
use crate::error::Result;
use crate::fire_model::FireFront;
use crate::sensing::AgentState;

#[derive(Serialize)]
struct TraceLine<'a> {
    scenario_hash: &'a str,
    seed: u64,
    controller: String,
    #[serde(flatten)]
    step: &'a StepRecord,
}

#[derive(Serialize)]
struct Fronts<'a> {
    initial: &'a FireFront,
    #[serde(rename = "true")]
    truth: Vec<&'a FireFront>,
    estimated: Vec<&'a FireFront>,
    agent: Vec<&'a AgentState>,
}

/// One JSON object per step.
pub fn trace_jsonl(trace: &EpisodeTrace) -> String {
    let controller = trace.controller.to_string();
    let mut out = String::new();
    for step in &trace.steps {
        let line = TraceLine {
            scenario_hash: &trace.scenario_hash,
            seed: trace.seed,
            controller: controller.clone(),
            step,
        };
        out.push_str(&serde_json::to_string(&line).expect("trace serializes"));
        out.push('\n');
    }
    out
}

pub fn fronts_json(trace: &EpisodeTrace) -> String {
    let fronts = Fronts {
        initial: &trace.initial_front,
        truth: trace.steps.iter().map(|s| &s.true_front).collect(),
        estimated: trace.steps.iter().map(|s| &s.mmse_front).collect(),
        agent: trace.steps.iter().map(|s| &s.agent).collect(),
    };
    serde_json::to_string(&fronts).expect("fronts serialize")
}

/// Writes `trace.jsonl`, `fronts.json`, and `planner.jsonl` when the
/// planner log is non-empty.
pub fn write_episode(dir: &Path, trace: &EpisodeTrace) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("trace.jsonl"), trace_jsonl(trace))?;
    fs::write(dir.join("fronts.json"), fronts_json(trace))?;
    if !trace.planner_log.is_empty() {
        let mut f = fs::File::create(dir.join("planner.jsonl"))?;
        for line in &trace.planner_log {
            writeln!(f, "{}", serde_json::to_string(line).expect("planner log serializes"))?;
        }
    }
    Ok(())
}

pub fn write_report(dir: &Path, report: &MonteCarloReport) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("report.csv"), report.to_csv())?;
    Ok(())
}
