//! Python bindings for the scoutplan planning library.
//!
//! The module mirrors the core types (grids, map beliefs, camera model,
//! rover/copter planners, the iterative mission loop) with list/tuple
//! conversions at the boundary, enough to drive whole planning runs from
//! Python. Build the cdylib and import it as `scoutplan`; see
//! `python/smoke_test.py`.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use scoutplan_core as core;
use scoutplan_core::map::ResolutionGrade;
use scoutplan_core::pose::Twist;

fn to_py(err: core::Error) -> PyErr {
    match err {
        core::Error::Io(e) => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct GridGeometry {
    inner: core::GridGeometry,
}

#[pymethods]
impl GridGeometry {
    #[new]
    #[pyo3(signature = (width, height, resolution, origin = (0.0, 0.0)))]
    fn new(width: usize, height: usize, resolution: f64, origin: (f64, f64)) -> PyResult<Self> {
        core::map::GridGeometry::new(width, height, resolution, [origin.0, origin.1])
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    #[getter]
    fn width(&self) -> usize {
        self.inner.width
    }

    #[getter]
    fn height(&self) -> usize {
        self.inner.height
    }

    #[getter]
    fn resolution(&self) -> f64 {
        self.inner.resolution
    }

    fn cell_count(&self) -> usize {
        self.inner.cell_count()
    }

    fn index(&self, row: usize, col: usize) -> PyResult<usize> {
        if row >= self.inner.height || col >= self.inner.width {
            return Err(PyValueError::new_err(format!("cell ({row}, {col}) outside grid")));
        }
        Ok(self.inner.index(row, col))
    }

    fn row_col(&self, index: usize) -> (usize, usize) {
        self.inner.row_col(index)
    }

    fn cell_center(&self, index: usize) -> (f64, f64) {
        let c = self.inner.cell_center(index);
        (c[0], c[1])
    }

    fn cell_at(&self, x: f64, y: f64) -> Option<usize> {
        self.inner.cell_at(x, y)
    }

    fn __repr__(&self) -> String {
        format!(
            "GridGeometry({}x{}, {} m/cell)",
            self.inner.width, self.inner.height, self.inner.resolution
        )
    }
}

#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct MapBelief {
    inner: core::MapBelief,
}

#[pymethods]
impl MapBelief {
    #[staticmethod]
    fn uniform(geometry: &GridGeometry, mu: f64, sigma: f64) -> PyResult<Self> {
        core::MapBelief::uniform(geometry.inner, mu, sigma)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    #[staticmethod]
    #[pyo3(signature = (geometry, mu, sigma, obstacles = None))]
    fn from_cells(
        geometry: &GridGeometry,
        mu: Vec<f64>,
        sigma: Vec<f64>,
        obstacles: Option<Vec<bool>>,
    ) -> PyResult<Self> {
        let n = geometry.inner.cell_count();
        if mu.len() != n || sigma.len() != n {
            return Err(PyValueError::new_err(format!(
                "expected {n} mu and sigma values, got {} and {}",
                mu.len(),
                sigma.len()
            )));
        }
        let obstacles = obstacles.unwrap_or_else(|| vec![false; n]);
        if obstacles.len() != n {
            return Err(PyValueError::new_err(format!("expected {n} obstacle flags")));
        }
        let priors: Vec<core::map::CellPrior> = mu
            .iter()
            .zip(&sigma)
            .zip(&obstacles)
            .map(|((&mu, &sigma), &obstacle)| core::map::CellPrior { mu, sigma, obstacle })
            .collect();
        core::MapBelief::init_from_satellite(&priors, geometry.inner)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    #[staticmethod]
    fn load_prior_csv(path: std::path::PathBuf, geometry: &GridGeometry) -> PyResult<Self> {
        let priors = core::io::load_prior_csv(&path, &geometry.inner).map_err(to_py)?;
        core::MapBelief::init_from_satellite(&priors, geometry.inner)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    #[getter]
    fn geometry(&self) -> GridGeometry {
        GridGeometry { inner: *self.inner.geometry() }
    }

    fn mu(&self) -> Vec<f64> {
        self.inner.cells().iter().map(|c| c.mu).collect()
    }

    fn sigma(&self) -> Vec<f64> {
        self.inner.cells().iter().map(|c| c.sigma).collect()
    }

    fn obstacles(&self) -> Vec<bool> {
        self.inner.obstacles().to_vec()
    }

    fn cell(&self, index: usize) -> PyResult<(f64, f64)> {
        if index >= self.inner.geometry().cell_count() {
            return Err(PyValueError::new_err(format!("cell {index} outside grid")));
        }
        let c = self.inner.cell(index);
        Ok((c.mu, c.sigma))
    }

    /// Map predicted after an image from `pose`: footprint sigmas shrink,
    /// means stay.
    fn predictive_update(&self, pose: &CopterPose, camera: &CameraModel) -> PyResult<Self> {
        self.inner
            .predictive_update(&pose.inner, &camera.inner)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    fn scale_beliefs(&self, factor: f64) -> PyResult<Self> {
        self.inner.scale_beliefs(factor).map(|inner| Self { inner }).map_err(to_py)
    }
}

#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct CopterPose {
    inner: core::CopterPose,
}

#[pymethods]
impl CopterPose {
    #[new]
    fn new(x: f64, y: f64, z: f64) -> PyResult<Self> {
        core::CopterPose::new(x, y, z).map(|inner| Self { inner }).map_err(to_py)
    }

    #[getter]
    fn x(&self) -> f64 {
        self.inner.x
    }

    #[getter]
    fn y(&self) -> f64 {
        self.inner.y
    }

    #[getter]
    fn z(&self) -> f64 {
        self.inner.z
    }

    fn __repr__(&self) -> String {
        format!("CopterPose({}, {}, {})", self.inner.x, self.inner.y, self.inner.z)
    }
}

fn parse_grade(grade: &str) -> PyResult<ResolutionGrade> {
    match grade {
        "high" => Ok(ResolutionGrade::High),
        "low" => Ok(ResolutionGrade::Low),
        other => Err(PyValueError::new_err(format!(
            "grade must be \"high\" or \"low\", got \"{other}\""
        ))),
    }
}

#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct CameraModel {
    inner: core::CameraModel,
}

#[pymethods]
impl CameraModel {
    #[new]
    #[pyo3(signature = (
        half_fov_tangent = 0.5,
        base_noise_variance = 0.25,
        reference_altitude = 10.0,
        grade = "high",
        low_grade_multiplier = 4.0,
    ))]
    fn new(
        half_fov_tangent: f64,
        base_noise_variance: f64,
        reference_altitude: f64,
        grade: &str,
        low_grade_multiplier: f64,
    ) -> PyResult<Self> {
        core::CameraModel::new(
            half_fov_tangent,
            base_noise_variance,
            reference_altitude,
            parse_grade(grade)?,
            low_grade_multiplier,
        )
        .map(|inner| Self { inner })
        .map_err(to_py)
    }

    fn with_grade(&self, grade: &str) -> PyResult<Self> {
        Ok(Self { inner: self.inner.with_grade(parse_grade(grade)?) })
    }

    /// Measurement variance of an image taken from `pose`.
    fn measurement_noise(&self, pose: &CopterPose) -> f64 {
        core::map::measurement_noise(&pose.inner, &self.inner)
    }

    /// Cell indices visible from `pose` on the given grid.
    fn footprint(&self, pose: &CopterPose, geometry: &GridGeometry) -> Vec<usize> {
        core::map::footprint(&pose.inner, &self.inner, &geometry.inner)
    }
}

#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct CopterLimits {
    inner: core::CopterLimits,
}

#[pymethods]
impl CopterLimits {
    #[new]
    #[pyo3(signature = (
        h_min = 2.0,
        h_max = 10.0,
        k_max = 3,
        l_max = 500.0,
        delta = 5.0,
        strict_delta = false,
        include_return_leg = false,
    ))]
    fn new(
        h_min: f64,
        h_max: f64,
        k_max: usize,
        l_max: f64,
        delta: f64,
        strict_delta: bool,
        include_return_leg: bool,
    ) -> PyResult<Self> {
        let inner = core::CopterLimits {
            h_min,
            h_max,
            k_max,
            l_max,
            delta,
            strict_delta,
            include_return_leg,
        };
        inner.validate().map_err(to_py)?;
        Ok(Self { inner })
    }
}

#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct SearchGrid {
    inner: core::SearchGrid,
}

#[pymethods]
impl SearchGrid {
    #[new]
    #[pyo3(signature = (altitudes, stride = 5))]
    fn new(altitudes: Vec<f64>, stride: usize) -> Self {
        Self { inner: core::SearchGrid { altitudes, stride } }
    }
}

#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct RoverPath {
    inner: core::RoverPath,
}

#[pymethods]
impl RoverPath {
    #[new]
    fn new(waypoints: Vec<usize>, geometry: &GridGeometry) -> PyResult<Self> {
        core::RoverPath::new(waypoints, &geometry.inner)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    fn waypoints(&self) -> Vec<usize> {
        self.inner.waypoints().to_vec()
    }

    fn step_distances(&self) -> Vec<f64> {
        self.inner.step_distances().to_vec()
    }

    fn total_length(&self) -> f64 {
        self.inner.total_length()
    }

    /// Total travel distance per distinct cell, as a dict.
    fn cell_distances(&self) -> std::collections::BTreeMap<usize, f64> {
        self.inner.cell_distances().into_iter().collect()
    }

    fn __len__(&self) -> usize {
        self.inner.waypoints().len()
    }
}

#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct PathCost {
    inner: core::PathCost,
}

#[pymethods]
impl PathCost {
    #[getter]
    fn mean(&self) -> f64 {
        self.inner.mean
    }

    #[getter]
    fn std(&self) -> f64 {
        self.inner.std
    }

    #[getter]
    fn quantile_value(&self) -> f64 {
        self.inner.quantile_value
    }

    fn __repr__(&self) -> String {
        format!(
            "PathCost(mean={}, std={}, quantile_value={})",
            self.inner.mean, self.inner.std, self.inner.quantile_value
        )
    }
}

#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct MeasurementPlan {
    inner: core::MeasurementPlan,
}

#[pymethods]
impl MeasurementPlan {
    fn poses(&self) -> Vec<(f64, f64, f64)> {
        self.inner.poses.iter().map(|p| (p.x, p.y, p.z)).collect()
    }

    fn values(&self) -> Vec<f64> {
        self.inner.values.clone()
    }

    #[getter]
    fn flight_length(&self) -> f64 {
        self.inner.flight_length
    }

    /// Combined cost improvement (the knapsack objective is its negative).
    #[getter]
    fn improvement(&self) -> f64 {
        self.inner.improvement
    }

    fn objective(&self) -> f64 {
        self.inner.objective()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct Scenario {
    inner: core::Scenario,
}

#[pymethods]
impl Scenario {
    #[new]
    #[pyo3(signature = (
        map,
        rover_start,
        rover_goal,
        copter_start,
        camera,
        limits,
        search,
        copter_goal = None,
        confidence = 0.95,
        p0_trace = 0.0,
        max_iterations = 5,
        sampling_iterations = 2000,
        seed = 0,
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        map: &MapBelief,
        rover_start: (usize, usize),
        rover_goal: (usize, usize),
        copter_start: &CopterPose,
        camera: &CameraModel,
        limits: &CopterLimits,
        search: &SearchGrid,
        copter_goal: Option<&CopterPose>,
        confidence: f64,
        p0_trace: f64,
        max_iterations: usize,
        sampling_iterations: usize,
        seed: u64,
    ) -> PyResult<Self> {
        let geometry = map.inner.geometry();
        for (name, (row, col)) in [("rover_start", rover_start), ("rover_goal", rover_goal)] {
            if row >= geometry.height || col >= geometry.width {
                return Err(PyValueError::new_err(format!("{name} ({row}, {col}) outside grid")));
            }
        }
        let inner = core::Scenario {
            map: map.inner.clone(),
            rover_start: geometry.index(rover_start.0, rover_start.1),
            rover_goal: geometry.index(rover_goal.0, rover_goal.1),
            copter_start: copter_start.inner,
            copter_goal: copter_goal.map(|g| g.inner),
            camera: camera.inner,
            limits: limits.inner,
            search: search.inner.clone(),
            confidence,
            p0_trace,
            max_iterations,
            sampling_iterations,
            seed,
        };
        inner.validate().map_err(to_py)?;
        Ok(Self { inner })
    }
}

#[pyclass(frozen)]
struct MissionResult {
    inner: core::MissionResult,
}

#[pymethods]
impl MissionResult {
    #[getter]
    fn j_before(&self) -> f64 {
        self.inner.j_before
    }

    #[getter]
    fn j_after(&self) -> f64 {
        self.inner.j_after
    }

    #[getter]
    fn reduction_rate(&self) -> f64 {
        self.inner.reduction_rate
    }

    fn j_trace(&self) -> Vec<f64> {
        self.inner.j_trace.clone()
    }

    fn best_path(&self) -> RoverPath {
        RoverPath { inner: self.inner.best_path.clone() }
    }

    fn best_plan(&self) -> MeasurementPlan {
        MeasurementPlan { inner: self.inner.best_plan.clone() }
    }

    fn final_map(&self) -> MapBelief {
        MapBelief { inner: self.inner.final_map.clone() }
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations.len()
    }

    #[getter]
    fn total_seconds(&self) -> f64 {
        self.inner.timings.total_seconds
    }
}

/// SE(3) exponential of the twist `(rho, phi)` as a 4x4 row-major matrix.
#[pyfunction]
fn exp_se3(xi: [f64; 6]) -> Vec<Vec<f64>> {
    let twist = Twist::new(
        nalgebra_vec3(xi[0], xi[1], xi[2]),
        nalgebra_vec3(xi[3], xi[4], xi[5]),
    );
    let m = core::pose::exp_se3(&twist);
    matrix4_to_rows(m.matrix())
}

/// 6x6 adjoint of a 4x4 homogeneous pose matrix.
#[pyfunction]
fn adjoint(matrix: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
    let pose = pose_from_rows(&matrix)?;
    let adj = core::pose::adjoint(&pose);
    Ok((0..6).map(|r| (0..6).map(|c| adj[(r, c)]).collect()).collect())
}

/// Conjugate Gaussian update of a cell `(mu, sigma)` with measurement `z`
/// of variance `w`.
#[pyfunction]
fn bayes_update(mu: f64, sigma: f64, z: f64, w: f64) -> PyResult<(f64, f64)> {
    let post = core::map::bayes_update(&core::CellBelief { mu, sigma }, z, w).map_err(to_py)?;
    Ok((post.mu, post.sigma))
}

/// Minimum-uncertainty rover path between two `(row, col)` cells.
#[pyfunction]
#[pyo3(signature = (map, start, goal, confidence = 0.95, p0_trace = 0.0))]
fn plan_rover(
    map: &MapBelief,
    start: (usize, usize),
    goal: (usize, usize),
    confidence: f64,
    p0_trace: f64,
) -> PyResult<(RoverPath, PathCost)> {
    let geometry = map.inner.geometry();
    for (name, (row, col)) in [("start", start), ("goal", goal)] {
        if row >= geometry.height || col >= geometry.width {
            return Err(PyValueError::new_err(format!("{name} ({row}, {col}) outside grid")));
        }
    }
    core::rover::plan(
        &map.inner,
        geometry.index(start.0, start.1),
        geometry.index(goal.0, goal.1),
        confidence,
        p0_trace,
    )
    .map(|(path, cost)| (RoverPath { inner: path }, PathCost { inner: cost }))
    .map_err(to_py)
}

/// Exact Gaussian cost of a path on a map.
#[pyfunction]
#[pyo3(signature = (path, map, confidence = 0.95, p0_trace = 0.0))]
fn path_cost(
    path: &RoverPath,
    map: &MapBelief,
    confidence: f64,
    p0_trace: f64,
) -> PyResult<PathCost> {
    core::rover::path_cost(&path.inner, &map.inner, p0_trace, confidence)
        .map(|inner| PathCost { inner })
        .map_err(to_py)
}

/// Best feasible copter measurement plan for a rover path.
#[pyfunction]
#[pyo3(signature = (path, map, camera, limits, search, start, goal = None,
                    confidence = 0.95, iterations = 2000, seed = 0))]
#[allow(clippy::too_many_arguments)]
fn plan_copter(
    path: &RoverPath,
    map: &MapBelief,
    camera: &CameraModel,
    limits: &CopterLimits,
    search: &SearchGrid,
    start: &CopterPose,
    goal: Option<&CopterPose>,
    confidence: f64,
    iterations: usize,
    seed: u64,
) -> PyResult<MeasurementPlan> {
    core::copter::plan(
        &path.inner,
        &map.inner,
        &camera.inner,
        &limits.inner,
        &search.inner,
        &start.inner,
        goal.map(|g| &g.inner),
        confidence,
        iterations,
        seed,
    )
    .map(|inner| MeasurementPlan { inner })
    .map_err(to_py)
}

/// Apply a plan's predictive updates to a map copy.
#[pyfunction]
fn apply_plan(map: &MapBelief, plan: &MeasurementPlan, camera: &CameraModel) -> PyResult<MapBelief> {
    core::mission::apply_plan(&map.inner, &plan.inner, &camera.inner)
        .map(|inner| MapBelief { inner })
        .map_err(to_py)
}

/// Run the full iterative rover/copter optimization.
#[pyfunction]
fn run_iterative(scenario: &Scenario) -> PyResult<MissionResult> {
    core::mission::run_iterative(&scenario.inner)
        .map(|inner| MissionResult { inner })
        .map_err(to_py)
}

/// Averaged random-mapping baseline over `runs` repetitions.
#[pyfunction]
fn run_baseline_random(scenario: &Scenario, runs: usize) -> PyResult<MissionResult> {
    core::mission::run_baseline_random(&scenario.inner, runs)
        .map(|inner| MissionResult { inner })
        .map_err(to_py)
}

/// Simulate noisy measurements of a true per-cell field from a pose:
/// `(cell_index, value)` pairs over the camera footprint. For simulation
/// harnesses; planners never see ground truth.
#[pyfunction]
fn simulate_measurement(
    truth: Vec<f64>,
    pose: &CopterPose,
    camera: &CameraModel,
    geometry: &GridGeometry,
    seed: u64,
) -> PyResult<Vec<(usize, f64)>> {
    core::map::simulate_measurement(&truth, &pose.inner, &camera.inner, &geometry.inner, seed)
        .map_err(to_py)
}

/// Generate a synthetic class-annotated map. `classes` are
/// `(name, mu, sigma, obstacle, nuclei)` tuples; returns the map belief
/// and the per-cell ground truth.
#[pyfunction]
fn generate_map(
    geometry: &GridGeometry,
    classes: Vec<(String, f64, f64, bool, usize)>,
    seed: u64,
) -> PyResult<(MapBelief, Vec<f64>)> {
    let classes: Vec<core::mapgen::TerrainClass> = classes
        .into_iter()
        .map(|(name, mu, sigma, obstacle, nuclei)| core::mapgen::TerrainClass {
            name,
            mu,
            sigma,
            obstacle,
            nuclei,
        })
        .collect();
    let generated = core::mapgen::generate(&geometry.inner, &classes, seed).map_err(to_py)?;
    let map = core::MapBelief::init_from_satellite(&generated.priors, geometry.inner)
        .map_err(to_py)?;
    Ok((MapBelief { inner: map }, generated.truth))
}

fn nalgebra_vec3(x: f64, y: f64, z: f64) -> nalgebra::Vector3<f64> {
    nalgebra::Vector3::new(x, y, z)
}

fn matrix4_to_rows(m: &nalgebra::Matrix4<f64>) -> Vec<Vec<f64>> {
    (0..4).map(|r| (0..4).map(|c| m[(r, c)]).collect()).collect()
}

fn pose_from_rows(rows: &[Vec<f64>]) -> PyResult<core::Pose> {
    if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
        return Err(PyValueError::new_err("pose matrix must be 4x4"));
    }
    let mut m = nalgebra::Matrix4::zeros();
    for (r, row) in rows.iter().enumerate() {
        for (c, &value) in row.iter().enumerate() {
            m[(r, c)] = value;
        }
    }
    core::Pose::from_matrix(m).map_err(to_py)
}

#[pymodule]
fn scoutplan(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<GridGeometry>()?;
    m.add_class::<MapBelief>()?;
    m.add_class::<CopterPose>()?;
    m.add_class::<CameraModel>()?;
    m.add_class::<CopterLimits>()?;
    m.add_class::<SearchGrid>()?;
    m.add_class::<RoverPath>()?;
    m.add_class::<PathCost>()?;
    m.add_class::<MeasurementPlan>()?;
    m.add_class::<Scenario>()?;
    m.add_class::<MissionResult>()?;
    m.add_function(wrap_pyfunction!(exp_se3, m)?)?;
    m.add_function(wrap_pyfunction!(adjoint, m)?)?;
    m.add_function(wrap_pyfunction!(bayes_update, m)?)?;
    m.add_function(wrap_pyfunction!(plan_rover, m)?)?;
    m.add_function(wrap_pyfunction!(path_cost, m)?)?;
    m.add_function(wrap_pyfunction!(plan_copter, m)?)?;
    m.add_function(wrap_pyfunction!(apply_plan, m)?)?;
    m.add_function(wrap_pyfunction!(run_iterative, m)?)?;
    m.add_function(wrap_pyfunction!(run_baseline_random, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_measurement, m)?)?;
    m.add_function(wrap_pyfunction!(generate_map, m)?)?;
    Ok(())
}
