//! The `scoutplan` command line: `plan`, `montecarlo`, `genmap`,
//! `validate`.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::mission::{self, MissionResult, Scenario};
use crate::scenario::ScenarioFile;
use crate::{io, mapgen, Error, Result};

#[derive(Parser, Debug)]
#[command(
    name = "scoutplan",
    version,
    about = "Joint rover path and copter measurement planning over localizability maps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Scenario file (TOML).
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Override the scenario seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Override the knapsack sampling budget per copter plan.
    #[arg(long, global = true)]
    pub iterations: Option<usize>,
    /// Suppress progress output.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the iterative rover/copter planner and write result files.
    Plan,
    /// Compare the planner against the random-mapping baseline over a list
    /// of rover start positions.
    Montecarlo,
    /// Generate a synthetic annotated map prior and ground truth.
    Genmap,
    /// Check a scenario file without running anything.
    Validate,
}

/// Entry point used by the binary; returns the process exit code
/// (0 ok, 1 config or IO error, 2 no feasible rover path).
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(err @ Error::NoPath { .. }) => {
            eprintln!("error: {err}");
            2
        }
        Err(err) => {
            eprintln!("error: {err}");
            1
        }
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    let scenario_path = cli
        .scenario
        .as_deref()
        .ok_or_else(|| Error::Config("--scenario <path> is required".into()))?;
    match cli.command {
        Command::Plan => cmd_plan(cli, scenario_path),
        Command::Montecarlo => cmd_montecarlo(cli, scenario_path),
        Command::Genmap => cmd_genmap(cli, scenario_path),
        Command::Validate => cmd_validate(cli, scenario_path),
    }
}

fn base_dir(scenario_path: &Path) -> PathBuf {
    scenario_path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."))
}

fn load_scenario(cli: &Cli, scenario_path: &Path) -> Result<(ScenarioFile, Scenario)> {
    let file = crate::scenario::load(scenario_path)?;
    let mut scenario = file.build(&base_dir(scenario_path))?;
    if let Some(seed) = cli.seed {
        scenario.seed = seed;
    }
    if let Some(iterations) = cli.iterations {
        scenario.sampling_iterations = iterations;
    }
    Ok((file, scenario))
}

fn build_summary(scenario: &Scenario, result: &MissionResult) -> io::Summary {
    let geometry = scenario.map.geometry();
    let iterations = result
        .iterations
        .iter()
        .enumerate()
        .map(|(i, rec)| io::SummaryIteration {
            iteration: i + 1,
            objective: rec.objective,
            rover_quantile: rec.planning_cost.quantile_value,
            waypoints: rec.rover_path.waypoints().len(),
            observations: rec.plan.len(),
        })
        .collect();
    let observations = result
        .best_plan
        .poses
        .iter()
        .zip(&result.best_plan.values)
        .enumerate()
        .map(|(i, (pose, &value))| io::SummaryObservation {
            order: i + 1,
            x_m: pose.x,
            y_m: pose.y,
            z_m: pose.z,
            value,
        })
        .collect();
    let (start_row, start_col) = geometry.row_col(scenario.rover_start);
    let (goal_row, goal_col) = geometry.row_col(scenario.rover_goal);
    io::Summary {
        j_before: result.j_before,
        j_after: result.j_after,
        reduction_rate: result.reduction_rate,
        confidence: scenario.confidence,
        seed: scenario.seed,
        rover: io::SummaryRover {
            start: [start_row, start_col],
            goal: [goal_row, goal_col],
            waypoints: result.best_path.waypoints().len(),
            length_m: result.best_path.total_length(),
        },
        copter: io::SummaryCopter {
            observations: result.best_plan.len(),
            flight_length_m: result.best_plan.flight_length,
        },
        iterations,
        j_trace: result.j_trace.clone(),
        observations,
    }
}

fn cmd_plan(cli: &Cli, scenario_path: &Path) -> Result<()> {
    let (_, scenario) = load_scenario(cli, scenario_path)?;
    std::fs::create_dir_all(&cli.out)?;
    let result = mission::run_iterative(&scenario)?;

    io::write_summary_json(&cli.out.join("summary.json"), &build_summary(&scenario, &result))?;
    io::write_rover_path_csv(
        &cli.out.join("rover_path.csv"),
        &result.best_path,
        &result.final_map,
        scenario.p0_trace,
    )?;
    io::write_copter_path_csv(&cli.out.join("copter_path.csv"), &result.best_plan)?;
    io::write_sigma_grid_csv(&cli.out.join("map_sigma_before.csv"), &scenario.map)?;
    io::write_sigma_grid_csv(&cli.out.join("map_sigma_after.csv"), &result.final_map)?;

    if !cli.quiet {
        println!(
            "J: {:.6} -> {:.6}  (reduction {:.2}%)",
            result.j_before, result.j_after, result.reduction_rate
        );
        println!(
            "rover: {} waypoints, {:.1} m; copter: {} images, {:.1} m flight",
            result.best_path.waypoints().len(),
            result.best_path.total_length(),
            result.best_plan.len(),
            result.best_plan.flight_length
        );
        eprintln!(
            "timing: rover {:.2}s, copter {:.2}s, total {:.2}s",
            result.timings.rover_seconds,
            result.timings.copter_seconds,
            result.timings.total_seconds
        );
    }
    Ok(())
}

fn cmd_montecarlo(cli: &Cli, scenario_path: &Path) -> Result<()> {
    let (file, scenario) = load_scenario(cli, scenario_path)?;
    let mc = file
        .montecarlo
        .as_ref()
        .ok_or_else(|| Error::Config("scenario has no [montecarlo] section".into()))?;
    std::fs::create_dir_all(&cli.out)?;
    let rows = mission::run_monte_carlo(&scenario, &mc.starts, mc.baseline_runs, scenario.seed)?;
    io::write_mc_csv(&cli.out.join("mc_results.csv"), &rows)?;
    if !cli.quiet {
        for row in &rows {
            println!(
                "{}: start ({}, {})  proposed {:.2}%  baseline {:.2}%",
                row.label, row.start_x, row.start_y, row.proposed_rate, row.baseline_rate
            );
        }
    }
    Ok(())
}

fn cmd_genmap(cli: &Cli, scenario_path: &Path) -> Result<()> {
    let file = crate::scenario::load(scenario_path)?;
    let genmap = file
        .genmap
        .as_ref()
        .ok_or_else(|| Error::Config("scenario has no [genmap] section".into()))?;
    let geometry = file.geometry()?;
    let classes: Vec<_> = genmap.classes.iter().map(|c| c.to_terrain_class()).collect();
    let seed = cli.seed.unwrap_or(file.planner.seed);
    let generated = mapgen::generate(&geometry, &classes, seed)?;
    std::fs::create_dir_all(&cli.out)?;
    io::write_prior_csv(&cli.out.join("map_prior.csv"), &generated.priors, &geometry)?;
    io::write_truth_csv(&cli.out.join("ground_truth.csv"), &generated.truth, &geometry)?;
    if !cli.quiet {
        println!(
            "generated {}x{} map ({} classes, seed {seed}) into {}",
            geometry.width,
            geometry.height,
            classes.len(),
            cli.out.display()
        );
    }
    Ok(())
}

fn cmd_validate(cli: &Cli, scenario_path: &Path) -> Result<()> {
    let file = crate::scenario::load(scenario_path)?;
    file.geometry()?;
    file.camera()?;
    file.limits().validate()?;
    // a full build also loads the map and checks start/goal placement
    let scenario = file.build(&base_dir(scenario_path))?;
    if !cli.quiet {
        println!(
            "scenario ok: {}x{} map, rover {} -> {}, k_max {}, confidence {}",
            scenario.map.geometry().width,
            scenario.map.geometry().height,
            scenario.rover_start,
            scenario.rover_goal,
            scenario.limits.k_max,
            scenario.confidence
        );
    }
    Ok(())
}
