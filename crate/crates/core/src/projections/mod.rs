//! Projections in the truncated noncommutative torus: construction from tight atoms,
//! certification, coefficient decay fits, parameter sweeps and separable tensor products.

mod build;
mod certify;
mod decay;
mod sweep;
mod tensor;

pub use build::{certify_table, projection_from_window, projection_table, ProjectionOptions};
pub use certify::{
    idempotency_residual, rieffel_trace, verify_projection, verify_projection_with, ComplexValue,
    ProjectionReport, ProjectionTolerances,
};
pub use decay::{decay_profile, AxisFit, DecayClass, DecayProfile, MIN_FIT_RADIUS, STEEP_SLOPE};
pub use sweep::{sweep_csv, sweep_svg, theta_sweep, SweepOptions, SweepRow, SWEEP_HEADER};
pub use tensor::tensor_projection;

pub use crate::gabor_core::module_condition_residual;
