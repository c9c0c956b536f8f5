//! The iterative rover/copter optimization loop, the random-mapping
//! baseline, and Monte Carlo batch evaluation.
//!
//! Each iteration replans the rover on the map predicted under the current
//! copter plan, then replans the copter for that rover path against the
//! prior map. A pair's joint objective is the rover path's quantile cost on
//! the prior updated with the pair's measurements; the best pair seen so
//! far is kept, which makes the objective trace non-increasing even though
//! the rover search minimizes a surrogate.

use std::time::Instant;

use rayon::prelude::*;

use crate::copter::{self, CopterLimits, MeasurementPlan, SearchGrid};
use crate::map::{CameraModel, CopterPose, MapBelief};
use crate::rover::{self, PathCost, RoverPath};
use crate::{Error, Result};

/// Derive an independent stream seed (splitmix64 round).
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Everything one mission run needs.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub map: MapBelief,
    pub rover_start: usize,
    pub rover_goal: usize,
    pub copter_start: CopterPose,
    pub copter_goal: Option<CopterPose>,
    pub camera: CameraModel,
    pub limits: CopterLimits,
    pub search: SearchGrid,
    /// Quantile confidence for the path cost.
    pub confidence: f64,
    /// Trace of the initial pose covariance.
    pub p0_trace: f64,
    /// Outer-loop iteration cap.
    pub max_iterations: usize,
    /// Knapsack sampling budget per copter plan.
    pub sampling_iterations: usize,
    pub seed: u64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.limits.validate()?;
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "confidence must lie in (0, 1), got {}",
                self.confidence
            )));
        }
        let n = self.map.geometry().cell_count();
        for (name, cell) in [("rover start", self.rover_start), ("rover goal", self.rover_goal)] {
            if cell >= n {
                return Err(Error::InvalidCell { index: cell, reason: format!("{name} outside grid") });
            }
            if self.map.is_obstacle(cell) {
                return Err(Error::InvalidCell { index: cell, reason: format!("{name} is an obstacle") });
            }
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter("max_iterations must be at least 1".into()));
        }
        if self.search.stride == 0 {
            return Err(Error::InvalidParameter("search stride must be at least 1".into()));
        }
        for &altitude in &self.search.altitudes {
            if altitude < self.limits.h_min || altitude > self.limits.h_max {
                return Err(Error::InvalidParameter(format!(
                    "search altitude {altitude} outside [{}, {}]",
                    self.limits.h_min, self.limits.h_max
                )));
            }
        }
        Ok(())
    }
}

/// One pass of the outer loop.
#[derive(Clone, Debug)]
pub struct IterationRecord {
    pub rover_path: RoverPath,
    /// Cost of that path on the predictive map it was planned against.
    pub planning_cost: PathCost,
    pub plan: MeasurementPlan,
    /// Joint objective of the (path, plan) pair.
    pub objective: f64,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Timings {
    pub rover_seconds: f64,
    pub copter_seconds: f64,
    pub total_seconds: f64,
}

/// Outcome of a mission run (or the average of a batch of baseline runs).
#[derive(Clone, Debug)]
pub struct MissionResult {
    pub iterations: Vec<IterationRecord>,
    pub best_path: RoverPath,
    pub best_plan: MeasurementPlan,
    /// Prior map updated with the best plan's predictive measurements.
    pub final_map: MapBelief,
    /// Quantile cost with no copter support.
    pub j_before: f64,
    /// Quantile cost of the returned pair.
    pub j_after: f64,
    /// Best-so-far objective after each iteration; non-increasing.
    pub j_trace: Vec<f64>,
    pub reduction_rate: f64,
    pub timings: Timings,
}

/// Percentage decrease of the quantile cost.
pub fn compute_reduction_rate(j_before: f64, j_after: f64) -> Result<f64> {
    if !j_before.is_finite() || j_before <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "reduction rate needs a positive starting cost, got {j_before}"
        )));
    }
    Ok(100.0 * (j_before - j_after) / j_before)
}

/// Reduction rate with the no-op case short-circuited, so degenerate
/// scenarios (start at goal, zero-length costs) report 0% instead of
/// failing the positivity precondition.
fn rate_or_zero(j_before: f64, j_after: f64) -> Result<f64> {
    if j_after == j_before {
        return Ok(0.0);
    }
    compute_reduction_rate(j_before, j_after)
}

/// Apply a plan's predictive updates to a map copy, in visit order.
pub fn apply_plan(map: &MapBelief, plan: &MeasurementPlan, camera: &CameraModel) -> Result<MapBelief> {
    let mut out = map.clone();
    for pose in &plan.poses {
        out.predictive_update_mut(pose, camera)?;
    }
    Ok(out)
}

/// Relative improvement below which the outer loop stops.
const CONVERGENCE_RTOL: f64 = 1e-9;

/// Alternate rover and copter planning until the rover path repeats, the
/// objective stops improving, or the iteration cap is hit.
pub fn run_iterative(scenario: &Scenario) -> Result<MissionResult> {
    scenario.validate()?;
    let t_start = Instant::now();
    let prior = &scenario.map;
    let p = scenario.confidence;
    let p0 = scenario.p0_trace;

    let mut rover_seconds = 0.0;
    let mut copter_seconds = 0.0;

    let mut planning_map = prior.clone();
    let mut prev_waypoints: Option<Vec<usize>> = None;

    let mut j_before = f64::NAN;
    let mut best_j = f64::INFINITY;
    let mut best_path: Option<RoverPath> = None;
    let mut best_plan = MeasurementPlan::empty();
    let mut best_map = prior.clone();
    let mut iterations = Vec::new();
    let mut j_trace = Vec::new();

    for iteration in 0..scenario.max_iterations {
        let t = Instant::now();
        let (path, planning_cost) =
            rover::plan(&planning_map, scenario.rover_start, scenario.rover_goal, p, p0)?;
        rover_seconds += t.elapsed().as_secs_f64();

        if iteration == 0 {
            // the first pass plans on the raw prior, so its cost is the
            // no-copter reference
            j_before = planning_cost.quantile_value;
            best_j = j_before;
            best_path = Some(path.clone());
            best_plan = MeasurementPlan::empty();
            best_map = prior.clone();
        }

        if prev_waypoints.as_deref() == Some(path.waypoints()) {
            break; // coordinate descent reached a fixed point
        }
        prev_waypoints = Some(path.waypoints().to_vec());

        let t = Instant::now();
        let plan = copter::plan(
            &path,
            prior,
            &scenario.camera,
            &scenario.limits,
            &scenario.search,
            &scenario.copter_start,
            scenario.copter_goal.as_ref(),
            p,
            scenario.sampling_iterations,
            mix_seed(scenario.seed, iteration as u64 + 1),
        )?;
        copter_seconds += t.elapsed().as_secs_f64();

        let predicted = apply_plan(prior, &plan, &scenario.camera)?;
        let objective = rover::path_cost(&path, &predicted, p0, p)?.quantile_value;
        iterations.push(IterationRecord {
            rover_path: path.clone(),
            planning_cost,
            plan: plan.clone(),
            objective,
        });

        let improvement = best_j - objective;
        if objective < best_j {
            best_j = objective;
            best_path = Some(path);
            best_plan = plan;
            best_map = predicted.clone();
        }
        j_trace.push(best_j);

        if improvement <= CONVERGENCE_RTOL * best_j.abs().max(f64::MIN_POSITIVE) && iteration > 0 {
            break;
        }
        planning_map = predicted;
    }

    let best_path = best_path.expect("at least one iteration ran");
    let reduction_rate = rate_or_zero(j_before, best_j)?;
    Ok(MissionResult {
        iterations,
        best_path,
        best_plan,
        final_map: best_map,
        j_before,
        j_after: best_j,
        j_trace,
        reduction_rate,
        timings: Timings {
            rover_seconds,
            copter_seconds,
            total_seconds: t_start.elapsed().as_secs_f64(),
        },
    })
}

/// Random-mapping baseline: the rover plans once, then each run images
/// `k_max` uniformly random waypoints of that path at mid-band altitude,
/// updates the map, and replans. Reported figures are means over runs.
pub fn run_baseline_random(scenario: &Scenario, runs: usize) -> Result<MissionResult> {
    scenario.validate()?;
    if runs == 0 {
        return Err(Error::InvalidParameter("baseline needs at least one run".into()));
    }
    let t_start = Instant::now();
    let prior = &scenario.map;
    let p = scenario.confidence;
    let p0 = scenario.p0_trace;
    let (path, cost) = rover::plan(prior, scenario.rover_start, scenario.rover_goal, p, p0)?;
    let j_before = cost.quantile_value;
    let altitude = 0.5 * (scenario.limits.h_min + scenario.limits.h_max);
    let geometry = *prior.geometry();

    let mut j_after_sum = 0.0;
    let mut rate_sum = 0.0;
    for run in 0..runs {
        let mut rng = crate::seeded_rng(mix_seed(scenario.seed, 0xBA5E_0000 + run as u64));
        let mut map = prior.clone();
        for _ in 0..scenario.limits.k_max {
            let wp = path.waypoints()[rand::Rng::random_range(&mut rng, 0..path.waypoints().len())];
            let center = geometry.cell_center(wp);
            let pose = CopterPose::new(center[0], center[1], altitude)?;
            map.predictive_update_mut(&pose, &scenario.camera)?;
        }
        let (_, replanned) = rover::plan(&map, scenario.rover_start, scenario.rover_goal, p, p0)?;
        j_after_sum += replanned.quantile_value;
        rate_sum += rate_or_zero(j_before, replanned.quantile_value)?;
    }

    let j_after = j_after_sum / runs as f64;
    Ok(MissionResult {
        iterations: Vec::new(),
        best_path: path,
        best_plan: MeasurementPlan::empty(),
        final_map: prior.clone(),
        j_before,
        j_after,
        j_trace: Vec::new(),
        reduction_rate: rate_sum / runs as f64,
        timings: Timings { total_seconds: t_start.elapsed().as_secs_f64(), ..Default::default() },
    })
}

/// One Monte Carlo table row.
#[derive(Clone, Debug, PartialEq)]
pub struct McRow {
    pub label: String,
    pub start_x: f64,
    pub start_y: f64,
    pub proposed_rate: f64,
    pub baseline_rate: f64,
}

/// Run the proposed planner and the random baseline from each start
/// position. Runs are independent and execute in parallel; rows come back
/// in input order with per-row seeds derived from the master seed.
pub fn run_monte_carlo(
    template: &Scenario,
    starts: &[[f64; 2]],
    baseline_runs: usize,
    seed: u64,
) -> Result<Vec<McRow>> {
    if starts.is_empty() {
        return Err(Error::InvalidParameter("no start positions given".into()));
    }
    starts
        .par_iter()
        .enumerate()
        .map(|(i, &[x, y])| {
            let cell = template.map.geometry().cell_at(x, y).ok_or(Error::InvalidParameter(
                format!("start position ({x}, {y}) outside the map"),
            ))?;
            let mut scenario = template.clone();
            scenario.rover_start = cell;
            scenario.seed = mix_seed(seed, i as u64);
            let proposed = run_iterative(&scenario)?;
            let baseline = run_baseline_random(&scenario, baseline_runs)?;
            Ok(McRow {
                label: format!("s{}", i + 1),
                start_x: x,
                start_y: y,
                proposed_rate: proposed.reduction_rate,
                baseline_rate: baseline.reduction_rate,
            })
        })
        .collect()
}
