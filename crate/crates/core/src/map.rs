//! Grid map of Gaussian beliefs over per-cell localizability.
//!
//! Each cell carries a scalar localizability index: the covariance-trace
//! growth per meter traveled on that terrain. Satellite data provides the
//! prior; copter images update cells inside the camera footprint through a
//! conjugate Gaussian rule. The predictive variant updates a cell with its
//! own most-likely measurement, shrinking sigma without moving the mean,
//! which is what planning against future measurements needs.

use crate::{seeded_rng, Error, Result};

/// Regular grid layout: `width` columns by `height` rows, row-major cell
/// indexing, `origin` at the outer corner of cell (0, 0) in meters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridGeometry {
    pub width: usize,
    pub height: usize,
    pub resolution: f64,
    pub origin: [f64; 2],
}

impl GridGeometry {
    pub fn new(width: usize, height: usize, resolution: f64, origin: [f64; 2]) -> Result<Self> {
        if width < 1 || height < 1 {
            return Err(Error::InvalidParameter("grid must be at least 1x1".into()));
        }
        if !resolution.is_finite() || resolution <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "resolution must be positive, got {resolution}"
            )));
        }
        Ok(Self { width, height, resolution, origin })
    }

    pub fn cell_count(&self) -> usize {
        self.width * self.height
    }

    pub fn index(&self, row: usize, col: usize) -> usize {
        debug_assert!(row < self.height && col < self.width);
        row * self.width + col
    }

    pub fn row_col(&self, index: usize) -> (usize, usize) {
        (index / self.width, index % self.width)
    }

    /// World coordinates of a cell center.
    pub fn cell_center(&self, index: usize) -> [f64; 2] {
        let (row, col) = self.row_col(index);
        [
            self.origin[0] + (col as f64 + 0.5) * self.resolution,
            self.origin[1] + (row as f64 + 0.5) * self.resolution,
        ]
    }

    /// Cell containing a world point, if inside the grid.
    pub fn cell_at(&self, x: f64, y: f64) -> Option<usize> {
        let col = ((x - self.origin[0]) / self.resolution).floor();
        let row = ((y - self.origin[1]) / self.resolution).floor();
        if col < 0.0 || row < 0.0 || col >= self.width as f64 || row >= self.height as f64 {
            return None;
        }
        Some(self.index(row as usize, col as usize))
    }
}

/// Gaussian belief over one cell's localizability index.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellBelief {
    /// Mean index: m^2 of covariance-trace growth per meter traveled.
    pub mu: f64,
    /// Standard deviation of the index.
    pub sigma: f64,
}

impl CellBelief {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() || mu < 0.0 {
            return Err(Error::InvalidParameter(format!("mu must be finite and >= 0, got {mu}")));
        }
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "sigma must be finite and >= 0, got {sigma}"
            )));
        }
        Ok(Self { mu, sigma })
    }
}

/// Prior for one cell as read from a satellite product.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellPrior {
    pub mu: f64,
    pub sigma: f64,
    pub obstacle: bool,
}

/// Copter camera position; heading is irrelevant for the nadir camera.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CopterPose {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl CopterPose {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        if !z.is_finite() || z <= 0.0 || !x.is_finite() || !y.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "copter pose must be finite with z > 0, got ({x}, {y}, {z})"
            )));
        }
        Ok(Self { x, y, z })
    }

    pub fn distance_to(&self, other: &CopterPose) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    /// 2D distance between this pose's ground projection and a point.
    pub fn ground_distance_to(&self, x: f64, y: f64) -> f64 {
        ((self.x - x).powi(2) + (self.y - y).powi(2)).sqrt()
    }
}

/// Camera resolution grade; low resolution trades noise for nothing here
/// (the field of view is altitude-driven), matching a cheaper sensor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResolutionGrade {
    High,
    Low,
}

/// Nadir camera: square footprint with half-width `z * half_fov_tangent`
/// and measurement variance `w0 * (z / z_ref)^2 * grade multiplier`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CameraModel {
    pub half_fov_tangent: f64,
    /// Measurement variance at the reference altitude, high grade.
    pub base_noise_variance: f64,
    pub reference_altitude: f64,
    pub grade: ResolutionGrade,
    /// Variance multiplier of the low grade; the high grade is 1.
    pub low_grade_multiplier: f64,
}

impl CameraModel {
    pub fn new(
        half_fov_tangent: f64,
        base_noise_variance: f64,
        reference_altitude: f64,
        grade: ResolutionGrade,
        low_grade_multiplier: f64,
    ) -> Result<Self> {
        if !half_fov_tangent.is_finite()
            || half_fov_tangent <= 0.0
            || !reference_altitude.is_finite()
            || reference_altitude <= 0.0
        {
            return Err(Error::InvalidParameter(
                "half_fov_tangent and reference_altitude must be positive".into(),
            ));
        }
        if !base_noise_variance.is_finite() || base_noise_variance < 0.0 {
            return Err(Error::InvalidParameter(
                "base_noise_variance must be finite and >= 0".into(),
            ));
        }
        if !low_grade_multiplier.is_finite() || low_grade_multiplier <= 1.0 {
            return Err(Error::InvalidParameter(
                "low_grade_multiplier must exceed the high-grade multiplier of 1".into(),
            ));
        }
        Ok(Self {
            half_fov_tangent,
            base_noise_variance,
            reference_altitude,
            grade,
            low_grade_multiplier,
        })
    }

    pub fn with_grade(mut self, grade: ResolutionGrade) -> Self {
        self.grade = grade;
        self
    }

    fn grade_multiplier(&self) -> f64 {
        match self.grade {
            ResolutionGrade::High => 1.0,
            ResolutionGrade::Low => self.low_grade_multiplier,
        }
    }
}

/// Measurement variance of one image taken from `pose`.
pub fn measurement_noise(pose: &CopterPose, camera: &CameraModel) -> f64 {
    let ratio = pose.z / camera.reference_altitude;
    camera.base_noise_variance * ratio * ratio * camera.grade_multiplier()
}

/// Cells whose centers fall inside the square of half-width
/// `z * half_fov_tangent` centered under the pose, clipped to the grid.
/// Returned in ascending (row-major) index order.
pub fn footprint(pose: &CopterPose, camera: &CameraModel, geometry: &GridGeometry) -> Vec<usize> {
    let half = pose.z * camera.half_fov_tangent;
    let res = geometry.resolution;
    // center of col c is origin + (c + 0.5) res; invert the bounds
    let lo_col = ((pose.x - half - geometry.origin[0]) / res - 0.5).ceil();
    let hi_col = ((pose.x + half - geometry.origin[0]) / res - 0.5).floor();
    let lo_row = ((pose.y - half - geometry.origin[1]) / res - 0.5).ceil();
    let hi_row = ((pose.y + half - geometry.origin[1]) / res - 0.5).floor();

    let lo_col = lo_col.max(0.0) as i64;
    let hi_col = hi_col.min(geometry.width as f64 - 1.0) as i64;
    let lo_row = lo_row.max(0.0) as i64;
    let hi_row = hi_row.min(geometry.height as f64 - 1.0) as i64;

    let mut cells = Vec::new();
    if lo_col > hi_col || lo_row > hi_row {
        return cells;
    }
    for row in lo_row..=hi_row {
        for col in lo_col..=hi_col {
            cells.push(geometry.index(row as usize, col as usize));
        }
    }
    cells
}

/// Conjugate Gaussian update of one cell with measurement `z` of variance
/// `w`, in Kalman gain form so that `z == mu` leaves the mean untouched
/// and `sigma == 0` is a fixed point. The posterior mean is clamped at 0.
pub fn bayes_update(cell: &CellBelief, z: f64, w: f64) -> Result<CellBelief> {
    if !w.is_finite() || w <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "measurement variance must be positive and finite, got {w}"
        )));
    }
    let var = cell.sigma * cell.sigma;
    let gain = var / (var + w);
    let mu = (cell.mu + gain * (z - cell.mu)).max(0.0);
    let sigma = cell.sigma * (w / (var + w)).sqrt();
    Ok(CellBelief { mu, sigma })
}

/// Distribution of the next measurement of a cell from `pose`, obtained by
/// marginalizing the cell belief through the noise model: mean `mu`,
/// variance `sigma^2 + w`.
pub fn predict_measurement_belief(
    cell: &CellBelief,
    pose: &CopterPose,
    camera: &CameraModel,
) -> (f64, f64) {
    let w = measurement_noise(pose, camera);
    (cell.mu, cell.sigma * cell.sigma + w)
}

/// Grid of cell beliefs plus a traversability mask.
#[derive(Clone, Debug)]
pub struct MapBelief {
    geometry: GridGeometry,
    cells: Vec<CellBelief>,
    obstacles: Vec<bool>,
}

impl MapBelief {
    /// Build the prior map from per-cell satellite estimates.
    pub fn init_from_satellite(priors: &[CellPrior], geometry: GridGeometry) -> Result<Self> {
        if priors.len() != geometry.cell_count() {
            return Err(Error::DimensionMismatch {
                expected: geometry.cell_count(),
                actual: priors.len(),
            });
        }
        let mut cells = Vec::with_capacity(priors.len());
        let mut obstacles = Vec::with_capacity(priors.len());
        for (index, prior) in priors.iter().enumerate() {
            let cell = CellBelief::new(prior.mu, prior.sigma)
                .map_err(|e| Error::InvalidCell { index, reason: e.to_string() })?;
            cells.push(cell);
            obstacles.push(prior.obstacle);
        }
        Ok(Self { geometry, cells, obstacles })
    }

    /// Identical prior on every cell, no obstacles.
    pub fn uniform(geometry: GridGeometry, mu: f64, sigma: f64) -> Result<Self> {
        let cell = CellBelief::new(mu, sigma)?;
        Ok(Self {
            cells: vec![cell; geometry.cell_count()],
            obstacles: vec![false; geometry.cell_count()],
            geometry,
        })
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn cells(&self) -> &[CellBelief] {
        &self.cells
    }

    pub fn cell(&self, index: usize) -> &CellBelief {
        &self.cells[index]
    }

    pub fn is_obstacle(&self, index: usize) -> bool {
        self.obstacles[index]
    }

    pub fn obstacles(&self) -> &[bool] {
        &self.obstacles
    }

    pub fn set_obstacle(&mut self, index: usize, obstacle: bool) {
        self.obstacles[index] = obstacle;
    }

    /// Predict the map after an image from `pose`: every footprint cell is
    /// updated with its own most-likely measurement, so means stay put and
    /// sigmas shrink.
    pub fn predictive_update(&self, pose: &CopterPose, camera: &CameraModel) -> Result<MapBelief> {
        let mut out = self.clone();
        out.predictive_update_mut(pose, camera)?;
        Ok(out)
    }

    /// Rescale the localizability units: every cell's `(mu, sigma)` is
    /// multiplied by `factor`. Callers changing units must scale
    /// measurement variances by `factor^2` to stay consistent.
    pub fn scale_beliefs(&self, factor: f64) -> Result<MapBelief> {
        if !factor.is_finite() || factor <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "scale factor must be positive and finite, got {factor}"
            )));
        }
        let mut out = self.clone();
        for cell in &mut out.cells {
            cell.mu *= factor;
            cell.sigma *= factor;
        }
        Ok(out)
    }

    pub fn predictive_update_mut(
        &mut self,
        pose: &CopterPose,
        camera: &CameraModel,
    ) -> Result<()> {
        let w = measurement_noise(pose, camera);
        for index in footprint(pose, camera, &self.geometry) {
            let cell = self.cells[index];
            self.cells[index] = bayes_update(&cell, cell.mu, w)?;
        }
        Ok(())
    }
}

/// Simulate noisy copter measurements of the true field `truth` (one value
/// per cell) from `pose`. Used by simulation harnesses only; planners never
/// see ground truth.
pub fn simulate_measurement(
    truth: &[f64],
    pose: &CopterPose,
    camera: &CameraModel,
    geometry: &GridGeometry,
    seed: u64,
) -> Result<Vec<(usize, f64)>> {
    if truth.len() != geometry.cell_count() {
        return Err(Error::DimensionMismatch {
            expected: geometry.cell_count(),
            actual: truth.len(),
        });
    }
    let noise_std = measurement_noise(pose, camera).sqrt();
    let mut rng = seeded_rng(seed);
    let mut out = Vec::new();
    for index in footprint(pose, camera, geometry) {
        let eps: f64 = rand::Rng::sample(&mut rng, rand_distr::StandardNormal);
        out.push((index, truth[index] + noise_std * eps));
    }
    Ok(out)
}
