//! Rover path planning over the localizability belief grid.
//!
//! The accumulated-uncertainty cost of a path is a Gaussian random variable
//! (independent Gaussian cell beliefs, distances as weights), so its
//! quantile at confidence `p` is closed-form. Quantiles are not
//! edge-additive, so the search minimizes an additive upper bound per edge
//! and the exact quantile of the found path is reported alongside.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use statrs::distribution::ContinuousCDF;

use crate::map::{CellBelief, GridGeometry, MapBelief};
use crate::{Error, Result};

/// Keeps every edge weight strictly positive for Dijkstra.
const WEIGHT_FLOOR_PER_METER: f64 = 1e-9;

/// Standard-normal quantile function.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "confidence must lie in (0, 1), got {p}"
        )));
    }
    let normal = statrs::distribution::Normal::new(0.0, 1.0).expect("unit normal");
    Ok(normal.inverse_cdf(p))
}

/// A rover path as an 8-connected waypoint chain over grid cells.
///
/// Step `j` runs from `waypoints[j]` to `waypoints[j+1]`; its length is the
/// grid resolution, times sqrt(2) for diagonal moves. For cost purposes the
/// full step length is attributed to the destination cell, so the start
/// cell costs nothing; a path's per-cell travel distance is the sum over
/// steps entering that cell.
#[derive(Clone, Debug, PartialEq)]
pub struct RoverPath {
    waypoints: Vec<usize>,
    step_distances: Vec<f64>,
}

impl RoverPath {
    pub fn new(waypoints: Vec<usize>, geometry: &GridGeometry) -> Result<Self> {
        if waypoints.is_empty() {
            return Err(Error::EmptyPath);
        }
        let mut step_distances = Vec::with_capacity(waypoints.len().saturating_sub(1));
        for pair in waypoints.windows(2) {
            let (r0, c0) = geometry.row_col(pair[0]);
            let (r1, c1) = geometry.row_col(pair[1]);
            let dr = r0.abs_diff(r1);
            let dc = c0.abs_diff(c1);
            if dr > 1 || dc > 1 || (dr == 0 && dc == 0) {
                return Err(Error::InvalidCell {
                    index: pair[1],
                    reason: format!("not an 8-neighbor of cell {}", pair[0]),
                });
            }
            let diagonal = dr == 1 && dc == 1;
            step_distances
                .push(if diagonal { geometry.resolution * std::f64::consts::SQRT_2 } else { geometry.resolution });
        }
        Ok(Self { waypoints, step_distances })
    }

    pub fn waypoints(&self) -> &[usize] {
        &self.waypoints
    }

    pub fn step_distances(&self) -> &[f64] {
        &self.step_distances
    }

    pub fn start(&self) -> usize {
        self.waypoints[0]
    }

    pub fn goal(&self) -> usize {
        *self.waypoints.last().unwrap()
    }

    pub fn total_length(&self) -> f64 {
        self.step_distances.iter().sum()
    }

    /// Total travel distance per distinct cell, destination-attributed.
    /// Ordered by cell index so downstream sums are deterministic.
    pub fn cell_distances(&self) -> BTreeMap<usize, f64> {
        let mut distances = BTreeMap::new();
        for (step, &dist) in self.step_distances.iter().enumerate() {
            *distances.entry(self.waypoints[step + 1]).or_insert(0.0) += dist;
        }
        distances
    }

    /// Nominal SE(3) pose at each waypoint: cell-center position with
    /// planar yaw toward the next waypoint (the last waypoint keeps the
    /// incoming heading, a lone waypoint faces +x). Feeds full-matrix
    /// covariance accumulation when per-cell covariances are available.
    pub fn nominal_poses(&self, geometry: &GridGeometry) -> Vec<crate::pose::Pose> {
        let centers: Vec<[f64; 2]> =
            self.waypoints.iter().map(|&cell| geometry.cell_center(cell)).collect();
        let mut yaw = 0.0;
        let mut poses = Vec::with_capacity(centers.len());
        for (i, center) in centers.iter().enumerate() {
            if i + 1 < centers.len() {
                let next = centers[i + 1];
                yaw = (next[1] - center[1]).atan2(next[0] - center[0]);
            }
            poses.push(crate::pose::Pose::from_planar(center[0], center[1], yaw));
        }
        poses
    }
}

/// Accumulated-uncertainty cost of a path: the Gaussian's moments plus its
/// quantile at the planner confidence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathCost {
    pub mean: f64,
    pub std: f64,
    pub quantile_value: f64,
}

/// Exact Gaussian cost of a path on the map: mean `p0 + sum d_i mu_i`, std
/// `sqrt(sum d_i^2 sigma_i^2)` over distinct cells, quantile
/// `mean + q(p) std`.
pub fn path_cost(path: &RoverPath, map: &MapBelief, p0_trace: f64, p: f64) -> Result<PathCost> {
    let quantile = normal_quantile(p)?;
    for &cell in path.waypoints() {
        if map.is_obstacle(cell) {
            return Err(Error::ObstacleOnPath(cell));
        }
    }
    let mut mean = p0_trace;
    let mut variance = 0.0;
    for (&cell, &distance) in path.cell_distances().iter() {
        let belief = map.cell(cell);
        mean += distance * belief.mu;
        variance += distance * distance * belief.sigma * belief.sigma;
    }
    let std = variance.sqrt();
    Ok(PathCost { mean, std, quantile_value: mean + quantile * std })
}

/// Additive surrogate for one step into a cell: `d (mu + q(p) sigma)`,
/// floored at `1e-9 d`. Summed over a path this upper-bounds the exact
/// quantile for `p >= 0.5` because the root-sum-square std is below the
/// plain sum.
pub fn edge_weight(cell: &CellBelief, distance: f64, quantile: f64) -> f64 {
    let w = distance * (cell.mu + quantile * cell.sigma);
    w.max(WEIGHT_FLOOR_PER_METER * distance)
}

#[derive(PartialEq)]
struct QueueEntry {
    cost: f64,
    cell: usize,
}

impl Eq for QueueEntry {}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // lower cell index wins ties so results are reproducible
        self.cost.total_cmp(&other.cost).then(self.cell.cmp(&other.cell))
    }
}

const NEIGHBOR_OFFSETS: [(i64, i64); 8] = [
    (-1, -1), (-1, 0), (-1, 1),
    (0, -1), (0, 1),
    (1, -1), (1, 0), (1, 1),
];

/// Minimum surrogate-cost path between two cells via Dijkstra on the
/// 8-connected traversability graph, plus the exact cost of that path.
pub fn plan(
    map: &MapBelief,
    start: usize,
    goal: usize,
    p: f64,
    p0_trace: f64,
) -> Result<(RoverPath, PathCost)> {
    let quantile = normal_quantile(p)?;
    let geometry = *map.geometry();
    let n = geometry.cell_count();
    for (name, cell) in [("start", start), ("goal", goal)] {
        if cell >= n {
            return Err(Error::InvalidCell { index: cell, reason: format!("{name} outside grid") });
        }
        if map.is_obstacle(cell) {
            return Err(Error::InvalidCell { index: cell, reason: format!("{name} is an obstacle") });
        }
    }

    if start == goal {
        let path = RoverPath::new(vec![start], &geometry)?;
        let cost = path_cost(&path, map, p0_trace, p)?;
        return Ok((path, cost));
    }

    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![usize::MAX; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[start] = 0.0;
    heap.push(Reverse(QueueEntry { cost: 0.0, cell: start }));

    while let Some(Reverse(entry)) = heap.pop() {
        if settled[entry.cell] {
            continue;
        }
        settled[entry.cell] = true;
        if entry.cell == goal {
            break;
        }
        let (row, col) = geometry.row_col(entry.cell);
        for (dr, dc) in NEIGHBOR_OFFSETS {
            let nr = row as i64 + dr;
            let nc = col as i64 + dc;
            if nr < 0 || nc < 0 || nr >= geometry.height as i64 || nc >= geometry.width as i64 {
                continue;
            }
            let neighbor = geometry.index(nr as usize, nc as usize);
            if settled[neighbor] || map.is_obstacle(neighbor) {
                continue;
            }
            let step = if dr != 0 && dc != 0 {
                geometry.resolution * std::f64::consts::SQRT_2
            } else {
                geometry.resolution
            };
            let weight = edge_weight(map.cell(neighbor), step, quantile);
            let candidate = entry.cost + weight;
            if candidate < dist[neighbor] {
                dist[neighbor] = candidate;
                prev[neighbor] = entry.cell;
                heap.push(Reverse(QueueEntry { cost: candidate, cell: neighbor }));
            }
        }
    }

    if !settled[goal] {
        return Err(Error::NoPath { start, goal });
    }

    let mut waypoints = vec![goal];
    let mut cursor = goal;
    while cursor != start {
        cursor = prev[cursor];
        waypoints.push(cursor);
    }
    waypoints.reverse();
    let path = RoverPath::new(waypoints, &geometry)?;
    let cost = path_cost(&path, map, p0_trace, p)?;
    Ok((path, cost))
}

/// Total surrogate cost of an existing path (what Dijkstra minimizes).
pub fn surrogate_cost(path: &RoverPath, map: &MapBelief, p: f64) -> Result<f64> {
    let quantile = normal_quantile(p)?;
    let mut total = 0.0;
    for (step, &dist) in path.step_distances().iter().enumerate() {
        total += edge_weight(map.cell(path.waypoints()[step + 1]), dist, quantile);
    }
    Ok(total)
}
