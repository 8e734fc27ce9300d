//! Gabor analysis on top of the twisted algebra: module inner products, Janssen elements,
//! frame bounds, the fundamental identity, and canonical dual and tight atoms.
//!
//! Grid-level functions take [`SampledSignal`](crate::SampledSignal)s and are meant for
//! operator-level cross-checks. Algebra-side quantities come from [`Atom`]s, which evaluate
//! every coefficient from closed-form or quadrature ambiguity values.

mod atom;
mod dual;
mod frame;
mod inner;

pub use atom::Atom;
pub(crate) use dual::tight_from_janssen;
pub use dual::{canonical_dual, canonical_tight, dual_atom, tight_atom, AtomOptions};
pub use frame::{
    default_radius, element_bounds, frame_bounds, frame_bounds_atom, frame_bounds_sampled,
    janssen_element, janssen_tail_mass, negligible_radius, ElementBounds, FrameOptions,
    FrameReport,
};
pub use inner::{
    associativity_residual, figa_residual, figa_sides, frame_operator_apply, inner_left,
    inner_right, janssen_element_sampled, module_condition_residual, theta_op_coeffs,
    wexler_raz_residual,
};
