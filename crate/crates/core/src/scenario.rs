//! Scenario configuration files (TOML) and their conversion into runnable
//! [`Scenario`] values.
//!
//! Numeric defaults below are artifact defaults chosen for plausible desk
//! runs; they are scenario knobs, not calibrated constants.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::copter::{CopterLimits, SearchGrid};
use crate::map::{CameraModel, CopterPose, GridGeometry, MapBelief, ResolutionGrade};
use crate::mapgen::TerrainClass;
use crate::mission::Scenario;
use crate::{io, Error, Result};

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub map: MapSection,
    pub rover: RoverSection,
    pub copter: CopterSection,
    #[serde(default)]
    pub camera: CameraSection,
    #[serde(default)]
    pub limits: LimitsSection,
    #[serde(default)]
    pub search: SearchSection,
    #[serde(default)]
    pub planner: PlannerSection,
    #[serde(default)]
    pub montecarlo: Option<MonteCarloSection>,
    #[serde(default)]
    pub genmap: Option<GenmapSection>,
}

/// Grid geometry plus the prior source: either a per-cell CSV (`prior`)
/// or a grayscale raster with a gray-level lookup table (`raster` +
/// `classes`).
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MapSection {
    #[serde(default)]
    pub prior: Option<PathBuf>,
    #[serde(default)]
    pub raster: Option<PathBuf>,
    #[serde(default)]
    pub classes: Option<PathBuf>,
    pub width: usize,
    pub height: usize,
    pub resolution: f64,
    #[serde(default)]
    pub origin: [f64; 2],
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RoverSection {
    /// Start position in meters.
    pub start: [f64; 2],
    /// Goal position in meters.
    pub goal: [f64; 2],
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CopterSection {
    /// Start position in meters, z up.
    pub start: [f64; 3],
    /// Optional landing target; only counts against the flight budget when
    /// `limits.include_return_leg` is set.
    #[serde(default)]
    pub goal: Option<[f64; 3]>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct CameraSection {
    pub half_fov_tangent: f64,
    pub base_noise_variance: f64,
    pub reference_altitude: f64,
    pub grade: String,
    pub low_grade_multiplier: f64,
}

impl Default for CameraSection {
    fn default() -> Self {
        Self {
            half_fov_tangent: 0.5,
            base_noise_variance: 0.25,
            reference_altitude: 10.0,
            grade: "high".into(),
            low_grade_multiplier: 4.0,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct LimitsSection {
    pub h_min: f64,
    pub h_max: f64,
    pub k_max: usize,
    pub l_max: f64,
    pub delta: f64,
    pub strict_delta: bool,
    pub include_return_leg: bool,
}

impl Default for LimitsSection {
    fn default() -> Self {
        Self {
            h_min: 2.0,
            h_max: 10.0,
            k_max: 3,
            l_max: 500.0,
            delta: 5.0,
            strict_delta: false,
            include_return_leg: false,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchSection {
    pub altitudes: Vec<f64>,
    pub stride: usize,
}

impl Default for SearchSection {
    fn default() -> Self {
        Self { altitudes: vec![5.0, 10.0], stride: 5 }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlannerSection {
    pub confidence: f64,
    pub p0_trace: f64,
    pub max_iterations: usize,
    pub sampling_iterations: usize,
    pub seed: u64,
}

impl Default for PlannerSection {
    fn default() -> Self {
        Self {
            confidence: 0.95,
            p0_trace: 0.0,
            max_iterations: 5,
            sampling_iterations: 2000,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloSection {
    /// Rover start positions in meters, one table row each.
    pub starts: Vec<[f64; 2]>,
    #[serde(default = "default_baseline_runs")]
    pub baseline_runs: usize,
}

fn default_baseline_runs() -> usize {
    100
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GenmapSection {
    pub classes: Vec<GenmapClass>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GenmapClass {
    pub name: String,
    pub mu: f64,
    pub sigma: f64,
    #[serde(default)]
    pub obstacle: bool,
    #[serde(default = "default_nuclei")]
    pub nuclei: usize,
}

fn default_nuclei() -> usize {
    4
}

impl GenmapClass {
    pub fn to_terrain_class(&self) -> TerrainClass {
        TerrainClass {
            name: self.name.clone(),
            mu: self.mu,
            sigma: self.sigma,
            obstacle: self.obstacle,
            nuclei: self.nuclei,
        }
    }
}

/// Parse a scenario file.
pub fn load(path: &Path) -> Result<ScenarioFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read scenario {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| Error::Config(format!("bad scenario {}: {e}", path.display())))
}

fn resolve(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

impl ScenarioFile {
    pub fn geometry(&self) -> Result<GridGeometry> {
        GridGeometry::new(
            self.map.width,
            self.map.height,
            self.map.resolution,
            self.map.origin,
        )
    }

    pub fn camera(&self) -> Result<CameraModel> {
        let grade = match self.camera.grade.as_str() {
            "high" => ResolutionGrade::High,
            "low" => ResolutionGrade::Low,
            other => {
                return Err(Error::Config(format!(
                    "camera grade must be \"high\" or \"low\", got \"{other}\""
                )))
            }
        };
        CameraModel::new(
            self.camera.half_fov_tangent,
            self.camera.base_noise_variance,
            self.camera.reference_altitude,
            grade,
            self.camera.low_grade_multiplier,
        )
    }

    pub fn limits(&self) -> CopterLimits {
        CopterLimits {
            h_min: self.limits.h_min,
            h_max: self.limits.h_max,
            k_max: self.limits.k_max,
            l_max: self.limits.l_max,
            delta: self.limits.delta,
            strict_delta: self.limits.strict_delta,
            include_return_leg: self.limits.include_return_leg,
        }
    }

    /// Load the map prior named by the `[map]` section. `base` is the
    /// directory paths are resolved against (the scenario file's parent).
    pub fn load_map(&self, base: &Path) -> Result<MapBelief> {
        let geometry = self.geometry()?;
        let priors = match (&self.map.prior, &self.map.raster, &self.map.classes) {
            (Some(prior), _, _) => io::load_prior_csv(&resolve(base, prior), &geometry)?,
            (None, Some(raster), Some(classes)) => {
                io::load_prior_raster(&resolve(base, raster), &resolve(base, classes), &geometry)?
            }
            (None, Some(_), None) => {
                return Err(Error::Config(
                    "[map] raster needs a companion classes lookup file".into(),
                ))
            }
            _ => {
                return Err(Error::Config(
                    "[map] needs either prior = \"...\" or raster = \"...\" with classes".into(),
                ))
            }
        };
        MapBelief::init_from_satellite(&priors, geometry)
    }

    /// Assemble the full runnable scenario.
    pub fn build(&self, base: &Path) -> Result<Scenario> {
        let map = self.load_map(base)?;
        self.build_with_map(map)
    }

    /// Assemble the scenario around an already-loaded (or generated) map.
    pub fn build_with_map(&self, map: MapBelief) -> Result<Scenario> {
        let geometry = *map.geometry();
        let cell_of = |name: &str, xy: [f64; 2]| {
            geometry.cell_at(xy[0], xy[1]).ok_or_else(|| {
                Error::Config(format!("{name} ({}, {}) is outside the map", xy[0], xy[1]))
            })
        };
        let scenario = Scenario {
            rover_start: cell_of("rover.start", self.rover.start)?,
            rover_goal: cell_of("rover.goal", self.rover.goal)?,
            copter_start: CopterPose::new(
                self.copter.start[0],
                self.copter.start[1],
                self.copter.start[2],
            )?,
            copter_goal: match self.copter.goal {
                Some([x, y, z]) => Some(CopterPose::new(x, y, z)?),
                None => None,
            },
            camera: self.camera()?,
            limits: self.limits(),
            search: SearchGrid {
                altitudes: self.search.altitudes.clone(),
                stride: self.search.stride,
            },
            confidence: self.planner.confidence,
            p0_trace: self.planner.p0_trace,
            max_iterations: self.planner.max_iterations,
            sampling_iterations: self.planner.sampling_iterations,
            seed: self.planner.seed,
            map,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}
