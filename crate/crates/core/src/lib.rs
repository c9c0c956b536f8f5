//! Joint rover/copter planning over probabilistic localizability maps.
//!
//! A Mars rover accumulates dead-reckoning error at a rate that depends on
//! the terrain it drives over. This crate plans a rover path that minimizes
//! a quantile of the accumulated pose uncertainty, and simultaneously plans
//! where a scout copter should take images so that its map updates shrink
//! that uncertainty the most.
//!
//! ## Modules
//!
//! - [`pose`]: SE(3) poses, twists, and covariance propagation
//! - [`map`]: grid of Gaussian beliefs over per-cell localizability,
//!   camera measurement model, Bayesian and predictive updates
//! - [`rover`]: quantile path costs and Dijkstra planning on the belief grid
//! - [`copter`]: observation candidates, TSP ordering, sampling knapsack
//! - [`mission`]: the iterative rover/copter loop, baselines, Monte Carlo
//! - [`mapgen`]: synthetic annotated-map generator for simulation studies
//! - [`scenario`]: scenario configuration files
//! - [`io`]: map/ground-truth loaders and result writers
//! - [`cli`]: the `scoutplan` command-line interface

pub mod cli;
pub mod copter;
pub mod io;
pub mod map;
pub mod mapgen;
pub mod mission;
pub mod pose;
pub mod rover;
pub mod scenario;

pub use copter::{CandidateObservation, ConstraintViolation, CopterLimits, MeasurementPlan, SearchGrid};
pub use map::{CameraModel, CellBelief, CopterPose, GridGeometry, MapBelief, ResolutionGrade};
pub use mission::{MissionResult, Scenario};
pub use pose::{Pose, PoseBelief, Twist};
pub use rover::{PathCost, RoverPath};

/// Errors produced by planning, belief updates, and file loading.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid covariance: {0}")]
    InvalidCovariance(String),
    #[error("negative segment distance {0}")]
    NegativeDistance(f64),
    #[error("dimension mismatch: expected {expected} cells, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("invalid cell {index}: {reason}")]
    InvalidCell { index: usize, reason: String },
    #[error("invalid pose: {0}")]
    InvalidPose(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no path from cell {start} to cell {goal}")]
    NoPath { start: usize, goal: usize },
    #[error("path touches obstacle cell {0}")]
    ObstacleOnPath(usize),
    #[error("empty rover path")]
    EmptyPath,
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Deterministic RNG used everywhere randomness is needed; runs are
/// reproducible from their seed across platforms.
pub fn seeded_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
