//! Map and ground-truth loaders plus plot-ready result writers.
//!
//! All writers format floats with Rust's shortest round-trip `Display`, so
//! identical runs produce byte-identical files.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write as _};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::copter::MeasurementPlan;
use crate::map::{CellPrior, GridGeometry, MapBelief};
use crate::mission::McRow;
use crate::rover::RoverPath;
use crate::{Error, Result};

fn config_err(path: &Path, what: impl std::fmt::Display) -> Error {
    Error::Config(format!("{}: {what}", path.display()))
}

#[derive(Debug, Deserialize)]
struct PriorRow {
    row: usize,
    col: usize,
    mu: f64,
    sigma: f64,
    obstacle: u8,
}

/// Load a per-cell prior CSV with header `row,col,mu,sigma,obstacle`
/// (obstacle is 0 or 1). Every cell of the geometry must appear exactly
/// once.
pub fn load_prior_csv(path: &Path, geometry: &GridGeometry) -> Result<Vec<CellPrior>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| config_err(path, e))?;
    let mut cells: Vec<Option<CellPrior>> = vec![None; geometry.cell_count()];
    for record in reader.deserialize() {
        let row: PriorRow = record.map_err(|e| config_err(path, e))?;
        if row.row >= geometry.height || row.col >= geometry.width {
            return Err(config_err(
                path,
                format!("cell ({}, {}) outside {}x{} grid", row.row, row.col, geometry.height, geometry.width),
            ));
        }
        let index = geometry.index(row.row, row.col);
        if cells[index].is_some() {
            return Err(config_err(path, format!("duplicate cell ({}, {})", row.row, row.col)));
        }
        cells[index] =
            Some(CellPrior { mu: row.mu, sigma: row.sigma, obstacle: row.obstacle != 0 });
    }
    cells
        .into_iter()
        .enumerate()
        .map(|(index, cell)| {
            cell.ok_or_else(|| {
                let (row, col) = geometry.row_col(index);
                config_err(path, format!("missing cell ({row}, {col})"))
            })
        })
        .collect()
}

pub fn write_prior_csv(path: &Path, priors: &[CellPrior], geometry: &GridGeometry) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "row,col,mu,sigma,obstacle")?;
    for (index, prior) in priors.iter().enumerate() {
        let (row, col) = geometry.row_col(index);
        writeln!(out, "{row},{col},{},{},{}", prior.mu, prior.sigma, u8::from(prior.obstacle))?;
    }
    Ok(())
}

#[derive(Debug, Deserialize)]
struct TruthRow {
    row: usize,
    col: usize,
    lambda_true: f64,
}

/// Load a ground-truth CSV with header `row,col,lambda_true`.
pub fn load_truth_csv(path: &Path, geometry: &GridGeometry) -> Result<Vec<f64>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| config_err(path, e))?;
    let mut values: Vec<Option<f64>> = vec![None; geometry.cell_count()];
    for record in reader.deserialize() {
        let row: TruthRow = record.map_err(|e| config_err(path, e))?;
        if row.row >= geometry.height || row.col >= geometry.width {
            return Err(config_err(path, format!("cell ({}, {}) outside grid", row.row, row.col)));
        }
        values[geometry.index(row.row, row.col)] = Some(row.lambda_true);
    }
    values
        .into_iter()
        .enumerate()
        .map(|(index, v)| {
            v.ok_or_else(|| {
                let (row, col) = geometry.row_col(index);
                config_err(path, format!("missing cell ({row}, {col})"))
            })
        })
        .collect()
}

pub fn write_truth_csv(path: &Path, truth: &[f64], geometry: &GridGeometry) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "row,col,lambda_true")?;
    for (index, value) in truth.iter().enumerate() {
        let (row, col) = geometry.row_col(index);
        writeln!(out, "{row},{col},{value}")?;
    }
    Ok(())
}

#[derive(Debug, Deserialize)]
struct LookupRow {
    gray: u8,
    mu: f64,
    sigma: f64,
    obstacle: u8,
}

/// Load a prior from an 8-bit grayscale raster plus a gray-level lookup
/// CSV with header `gray,mu,sigma,obstacle`. Raster row 0 is grid row 0.
pub fn load_prior_raster(
    raster: &Path,
    lookup: &Path,
    geometry: &GridGeometry,
) -> Result<Vec<CellPrior>> {
    let mut classes: BTreeMap<u8, CellPrior> = BTreeMap::new();
    let mut reader = csv::Reader::from_path(lookup).map_err(|e| config_err(lookup, e))?;
    for record in reader.deserialize() {
        let row: LookupRow = record.map_err(|e| config_err(lookup, e))?;
        classes.insert(
            row.gray,
            CellPrior { mu: row.mu, sigma: row.sigma, obstacle: row.obstacle != 0 },
        );
    }
    let image = image::open(raster).map_err(|e| config_err(raster, e))?.to_luma8();
    if image.width() as usize != geometry.width || image.height() as usize != geometry.height {
        return Err(config_err(
            raster,
            format!(
                "raster is {}x{} but the grid is {}x{}",
                image.width(),
                image.height(),
                geometry.width,
                geometry.height
            ),
        ));
    }
    let mut priors = Vec::with_capacity(geometry.cell_count());
    for row in 0..geometry.height {
        for col in 0..geometry.width {
            let gray = image.get_pixel(col as u32, row as u32).0[0];
            let prior = classes.get(&gray).ok_or_else(|| {
                config_err(raster, format!("gray level {gray} at ({row}, {col}) has no lookup entry"))
            })?;
            priors.push(*prior);
        }
    }
    Ok(priors)
}

/// Per-cell sigma grid: one line per row, comma-separated columns.
pub fn write_sigma_grid_csv(path: &Path, map: &MapBelief) -> Result<()> {
    let geometry = map.geometry();
    let mut out = BufWriter::new(File::create(path)?);
    for row in 0..geometry.height {
        let mut line = String::new();
        for col in 0..geometry.width {
            if col > 0 {
                line.push(',');
            }
            line.push_str(&map.cell(geometry.index(row, col)).sigma.to_string());
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Read back a sigma grid written by [`write_sigma_grid_csv`].
pub fn read_sigma_grid_csv(path: &Path, geometry: &GridGeometry) -> Result<Vec<f64>> {
    let reader = BufReader::new(File::open(path)?);
    let mut values = Vec::with_capacity(geometry.cell_count());
    for (row, line) in reader.lines().enumerate() {
        let line = line?;
        for field in line.split(',') {
            let value: f64 = field
                .parse()
                .map_err(|e| config_err(path, format!("row {row}: {e}")))?;
            values.push(value);
        }
    }
    if values.len() != geometry.cell_count() {
        return Err(Error::DimensionMismatch {
            expected: geometry.cell_count(),
            actual: values.len(),
        });
    }
    Ok(values)
}

/// Waypoint sequence with cumulative cost moments on the given map:
/// `step,row,col,x_m,y_m,cum_mean,cum_std`.
pub fn write_rover_path_csv(
    path: &Path,
    rover_path: &RoverPath,
    map: &MapBelief,
    p0_trace: f64,
) -> Result<()> {
    let geometry = map.geometry();
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "step,row,col,x_m,y_m,cum_mean,cum_std")?;
    let mut mean = p0_trace;
    let mut variance = 0.0;
    let mut pooled: BTreeMap<usize, f64> = BTreeMap::new();
    for (step, &cell) in rover_path.waypoints().iter().enumerate() {
        if step > 0 {
            let d = rover_path.step_distances()[step - 1];
            let belief = map.cell(cell);
            mean += d * belief.mu;
            let pool = pooled.entry(cell).or_insert(0.0);
            let before = *pool;
            *pool += d;
            // pooled variance uses the squared total distance per cell
            variance += (*pool * *pool - before * before) * belief.sigma * belief.sigma;
        }
        let (row, col) = geometry.row_col(cell);
        let center = geometry.cell_center(cell);
        writeln!(
            out,
            "{step},{row},{col},{},{},{},{}",
            center[0],
            center[1],
            mean,
            variance.sqrt()
        )?;
    }
    Ok(())
}

/// Observation poses in visit order: `order,x_m,y_m,z_m,value`.
pub fn write_copter_path_csv(path: &Path, plan: &MeasurementPlan) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "order,x_m,y_m,z_m,value")?;
    for (i, (pose, value)) in plan.poses.iter().zip(&plan.values).enumerate() {
        writeln!(out, "{},{},{},{},{}", i + 1, pose.x, pose.y, pose.z, value)?;
    }
    Ok(())
}

/// Monte Carlo table: `label,start_x,start_y,proposed_rate,baseline_rate`.
pub fn write_mc_csv(path: &Path, rows: &[McRow]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "label,start_x,start_y,proposed_rate,baseline_rate")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            row.label, row.start_x, row.start_y, row.proposed_rate, row.baseline_rate
        )?;
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SummaryIteration {
    pub iteration: usize,
    /// Joint objective of the pair planned this iteration.
    pub objective: f64,
    /// Quantile cost of the rover path on its planning map.
    pub rover_quantile: f64,
    pub waypoints: usize,
    pub observations: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SummaryObservation {
    pub order: usize,
    pub x_m: f64,
    pub y_m: f64,
    pub z_m: f64,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SummaryRover {
    pub start: [usize; 2],
    pub goal: [usize; 2],
    pub waypoints: usize,
    pub length_m: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SummaryCopter {
    pub observations: usize,
    pub flight_length_m: f64,
}

/// Everything `plan` reports, serialized as `summary.json`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Summary {
    pub j_before: f64,
    pub j_after: f64,
    pub reduction_rate: f64,
    pub confidence: f64,
    pub seed: u64,
    pub rover: SummaryRover,
    pub copter: SummaryCopter,
    pub iterations: Vec<SummaryIteration>,
    pub j_trace: Vec<f64>,
    pub observations: Vec<SummaryObservation>,
}

pub fn write_summary_json(path: &Path, summary: &Summary) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    let text = serde_json::to_string_pretty(summary)
        .map_err(|e| Error::Config(format!("summary serialization failed: {e}")))?;
    writeln!(out, "{text}")?;
    Ok(())
}

pub fn read_summary_json(path: &Path) -> Result<Summary> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| config_err(path, e))
}
