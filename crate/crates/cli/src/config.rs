//! Defaults for every subcommand, and the resolved configuration echoed into reports.

use serde::Serialize;

pub const DEFAULT_WINDOW: &str = "gaussian";
pub const DEFAULT_LATTICE: &str = "1,0,0,0.5";
/// Sampling grid for commands that work on sampled signals (`T,q`).
pub const DEFAULT_GRID: &str = "16,64";
pub const DEFAULT_FRAME_TOL: f64 = 1e-6;
pub const DEFAULT_PROJECTION_TOL: f64 = 1e-8;
pub const DEFAULT_SOLVE_TOL: f64 = 1e-12;
pub const DEFAULT_FIGA_TOL: f64 = 1e-5;
pub const DEFAULT_FIGA_RADIUS: f64 = 8.0;
/// Initial radius of a projection's coefficient table; it grows up to the maximum.
pub const DEFAULT_TABLE_RADIUS: f64 = 8.0;
pub const DEFAULT_MAX_TABLE_RADIUS: f64 = 48.0;
/// Fixed coefficient-table radius for decay fits.
pub const DEFAULT_DECAY_RADIUS: f64 = 12.0;
pub const DEFAULT_THETAS: &str = "0.5,0.7,0.9,0.95,0.99,1.0";
pub const THREADS_ENV: &str = "NCT_GABOR_THREADS";

/// Fully resolved settings of one run.
#[derive(Clone, Debug, Default, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub window: Option<String>,
    pub lattice: Option<String>,
    pub grid: Option<String>,
    /// Janssen truncation radius.
    pub radius: Option<f64>,
    pub tol: Option<f64>,
    pub frame_tol: Option<f64>,
    pub solve_tol: Option<f64>,
    pub table_radius: Option<f64>,
    pub max_table_radius: Option<f64>,
    pub threads: Option<usize>,
}
