use super::atom::Atom;
use super::frame::{default_radius, element_bounds, frame_bounds, FrameOptions};
use super::inner::janssen_element_sampled;
use crate::error::{Error, Result};
use crate::lattice::Lattice2D;
use crate::tf_signal::{SampledSignal, WindowSpec};
use crate::twisted_algebra::{apply_left, inv_sqrt, invert, TwistedElement};

/// Settings shared by the tight and dual constructions.
#[derive(Clone, Debug)]
pub struct AtomOptions {
    /// Janssen truncation radius; the window default when `None`.
    pub radius: Option<f64>,
    /// Residual target for the inverse or inverse square root.
    pub tol: f64,
    pub frame: FrameOptions,
}

impl Default for AtomOptions {
    fn default() -> Self {
        AtomOptions {
            radius: None,
            tol: 1e-12,
            frame: FrameOptions::default(),
        }
    }
}

fn checked_janssen(
    w: &WindowSpec,
    lattice: &Lattice2D,
    opts: &AtomOptions,
) -> Result<TwistedElement> {
    let radius = opts.radius.unwrap_or_else(|| default_radius(w));
    let fopts = FrameOptions {
        radius: Some(radius),
        grid: None,
        ..opts.frame.clone()
    };
    frame_bounds(w, lattice, &fopts)?.require_frame()?;
    super::frame::janssen_element(w, lattice, radius)
}

/// Canonical tight atom `S^{-1/2} g = π(j^{-1/2}) g` for the Janssen element `j`.
pub fn tight_atom(w: &WindowSpec, lattice: &Lattice2D, opts: &AtomOptions) -> Result<Atom> {
    let j = checked_janssen(w, lattice, opts)?;
    tight_from_janssen(w, &j, opts.tol)
}

/// Tight atom from a Janssen element whose frame property has already been checked.
pub(crate) fn tight_from_janssen(w: &WindowSpec, j: &TwistedElement, tol: f64) -> Result<Atom> {
    let y = inv_sqrt(j, tol)?;
    Atom::expanded(w.clone(), y, format!("{}:tight", w.id()))
}

/// Canonical dual atom `S^{-1} g = π(j^{-1}) g`.
pub fn dual_atom(w: &WindowSpec, lattice: &Lattice2D, opts: &AtomOptions) -> Result<Atom> {
    let j = checked_janssen(w, lattice, opts)?;
    let z = invert(&j, opts.tol)?;
    Atom::expanded(w.clone(), z, format!("{}:dual", w.id()))
}

fn sampled_janssen(g: &SampledSignal, lattice: &Lattice2D, radius: f64) -> Result<TwistedElement> {
    let j = janssen_element_sampled(g, lattice, radius)?.symmetrized();
    let b = element_bounds(&j, 0.0, &FrameOptions::default())?;
    if !b.is_frame() {
        return Err(Error::NotAFrame {
            lower: b.lower,
            upper: b.upper,
        });
    }
    Ok(j)
}

/// Canonical dual window of a sampled window, with Janssen coefficients from the grid.
pub fn canonical_dual(
    g: &SampledSignal,
    lattice: &Lattice2D,
    radius: f64,
    tol: f64,
) -> Result<SampledSignal> {
    let j = sampled_janssen(g, lattice, radius)?;
    apply_left(&invert(&j, tol)?, g)
}

/// Canonical tight window of a sampled window, with Janssen coefficients from the grid.
pub fn canonical_tight(
    g: &SampledSignal,
    lattice: &Lattice2D,
    radius: f64,
    tol: f64,
) -> Result<SampledSignal> {
    let j = sampled_janssen(g, lattice, radius)?;
    apply_left(&inv_sqrt(&j, tol)?, g)
}
