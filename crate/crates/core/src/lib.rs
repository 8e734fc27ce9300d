//! Numerical toolkit for projections in noncommutative tori obtained from Gabor frames.
//!
//! The crate is organised bottom-up:
//!
//! * [`lattice`]: phase-space lattices, adjoint lattices and point enumeration.
//! * [`tf_signal`]: sampled signals, time-frequency shifts, windows and ambiguity functions.
//! * [`twisted_algebra`]: finitely supported elements of the twisted group algebra.
//! * [`gabor_core`]: Janssen elements, frame bounds, module inner products, tight and dual windows.
//! * [`projections`]: construction and certification of projections, decay fits and sweeps.

pub mod error;
pub mod format;
pub mod gabor_core;
pub mod lattice;
pub mod projections;
pub mod tf_signal;
pub mod twisted_algebra;

pub use error::{Error, Result};
pub use lattice::{Lattice2D, LatticePoint};
pub use num_complex::Complex64;
pub use tf_signal::{GridSpec, SampledSignal, WindowSpec};
pub use twisted_algebra::{Side, TwistedElement};
