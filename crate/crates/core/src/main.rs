use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fire_monitor::harness::{output, run_episode_with, run_monte_carlo, ControllerSpec, EpisodeOptions};
use fire_monitor::scenario::Scenario;
use fire_monitor::Error;

#[derive(Parser)]
#[command(name = "fire-monitor", version, about = "Wildfire front monitoring simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one episode and write trace.jsonl and fronts.json.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// lcb:T, myopic, random, static or infinite_range
        #[arg(long, default_value = "myopic")]
        controller: String,
        /// Defaults to the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Also write per-iteration search diagnostics to planner.jsonl.
        #[arg(long)]
        planner_log: bool,
    },
    /// Paired Monte Carlo comparison of several controllers; writes report.csv.
    Montecarlo {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value = "infinite_range,static,random,lcb:1,lcb:3")]
        controllers: String,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a scenario file.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
}

fn load(path: &PathBuf) -> Result<Scenario, ExitCode> {
    Scenario::load(path).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })
}

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::Validation { .. } | Error::Parse(_) | Error::Controller(_) => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn run(cli: Cli) -> Result<(), ExitCode> {
    match cli.command {
        Command::Validate { scenario } => {
            let s = load(&scenario)?;
            println!("ok {} ({})", scenario.display(), s.hash());
        }
        Command::Run { scenario, controller, seed, out, planner_log } => {
            let s = load(&scenario)?;
            let controller: ControllerSpec = controller.parse().map_err(fail)?;
            let seed = seed.unwrap_or(s.seed);
            let options = EpisodeOptions { keep_planner_log: planner_log };
            let trace = run_episode_with(&s, controller, seed, options).map_err(fail)?;
            output::write_episode(&out, &trace).map_err(fail)?;
            let last = trace.steps.last().map_or(f64::NAN, |r| r.rmse);
            println!("{controller}: {} steps, final rmse {last:.3} m -> {}", trace.steps.len(), out.display());
        }
        Command::Montecarlo { scenario, controllers, trials, seed, out } => {
            let s = load(&scenario)?;
            let controllers = controllers
                .split(',')
                .filter(|c| !c.trim().is_empty())
                .map(str::parse)
                .collect::<Result<Vec<ControllerSpec>, _>>()
                .map_err(fail)?;
            let report = run_monte_carlo(&s, &controllers, trials, seed.unwrap_or(s.seed)).map_err(fail)?;
            output::write_report(&out, &report).map_err(fail)?;
            for c in &report.controllers {
                println!("{:>16}  mean log10 rmse {:.4}", c.controller.to_string(), c.overall_mean());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}
