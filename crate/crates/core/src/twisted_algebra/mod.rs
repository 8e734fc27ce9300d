//! Finitely supported elements of the twisted group algebra of a lattice: twisted convolution,
//! involution, weighted norms, trace, actions on signals, spectral bounds, inversion and
//! inverse square roots.

mod action;
mod element;
mod solve;
mod spectral;

pub use action::{apply_left, apply_right};
pub use element::{delta, involute, l1s_norm, tconv, trace, Side, TwistedElement};
pub use solve::{
    inv_sqrt, inv_sqrt_residual, inv_sqrt_with, invert, invert_with, SolveOptions,
    MAX_SUPPORT_POINTS,
};
pub use spectral::{
    diagonal_dominance_bounds, lanczos_extremes, regular_rep_matrix, spectral_bounds,
    spectral_bounds_with, BoundsMethod, Compression, RepMatrix, SpectralBounds, DENSE_POINT_CAP,
    SPARSE_POINT_CAP,
};
