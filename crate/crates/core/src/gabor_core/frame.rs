use num_complex::Complex64;
use serde::Serialize;
use std::cell::RefCell;

use super::atom::Atom;
use super::inner::{frame_operator_apply, wexler_raz_from_coeffs};
use crate::error::{Error, Result};
use crate::lattice::Lattice2D;
use crate::tf_signal::{GridSpec, SampledSignal, WindowKind, WindowSpec};
use crate::twisted_algebra::{
    diagonal_dominance_bounds, invert, lanczos_extremes, spectral_bounds_with, BoundsMethod, Side,
    TwistedElement,
};

/// Default Janssen truncation radius per window.
pub fn default_radius(w: &WindowSpec) -> f64 {
    match w.kind() {
        WindowKind::Gaussian => 6.0,
        WindowKind::Sech => 8.0,
        WindowKind::TwoSidedExp | WindowKind::Custom(_) => 12.0,
    }
}

/// Radius beyond which ambiguity values are treated as zero when extending sums.
pub fn negligible_radius(w: &WindowSpec) -> f64 {
    match w.kind() {
        WindowKind::Gaussian => 9.0,
        WindowKind::Sech => 16.0,
        WindowKind::TwoSidedExp => 64.0,
        WindowKind::Custom(_) => 24.0,
    }
}

/// Janssen element `vol(Λ)⁻¹ ⟨g, π(λ°)g⟩` on the adjoint lattice from high-accuracy
/// ambiguity values.
pub fn janssen_element(w: &WindowSpec, lattice: &Lattice2D, radius: f64) -> Result<TwistedElement> {
    if lattice.rank() != 2 {
        return Err(Error::InvalidInput(
            "Janssen elements need a single 2x2 lattice block".into(),
        ));
    }
    let adj = lattice.adjoint();
    let scale = adj.volume();
    TwistedElement::from_points(&adj, Side::Adjoint, radius, |p| {
        Ok(w.ambiguity(p.coords[0], p.coords[1])? * scale)
    })
}

/// ℓ¹ mass of the Janssen coefficients between `radius` and the window's negligible radius.
pub fn janssen_tail_mass(w: &WindowSpec, lattice: &Lattice2D, radius: f64) -> Result<f64> {
    let outer = negligible_radius(w);
    if radius >= outer {
        return Ok(0.0);
    }
    let full = janssen_element(w, lattice, outer)?;
    Ok((full.l1() - full.restricted(radius).l1()).max(0.0))
}

/// Frame-bound computation settings.
#[derive(Clone, Debug)]
pub struct FrameOptions {
    /// Janssen truncation radius; the window default when `None`.
    pub radius: Option<f64>,
    /// Ball radii tried in turn for the regular-representation compression.
    pub bounds_radii: Vec<f64>,
    /// Whether to certify the lower bound through an approximate inverse.
    pub certify: bool,
    /// Residual target for the certifying inverse.
    pub certify_tol: f64,
    /// Grid for the operator-level cross-check of the upper bound; skipped when `None`.
    pub grid: Option<GridSpec>,
}

impl Default for FrameOptions {
    fn default() -> Self {
        FrameOptions {
            radius: None,
            bounds_radii: vec![16.0, 32.0, 64.0, 128.0],
            certify: true,
            certify_tol: 1e-6,
            grid: None,
        }
    }
}

/// Frame bounds of a Gabor system and the diagnostics behind them.
#[derive(Clone, Debug, Serialize)]
pub struct FrameReport {
    pub lattice: String,
    pub window: String,
    #[serde(rename = "A")]
    pub lower_bound: f64,
    #[serde(rename = "B")]
    pub upper_bound: f64,
    /// `B/A − 1`.
    pub tightness: f64,
    pub wr_residual: f64,
    pub tail_mass: f64,
    /// Janssen truncation radius.
    pub radius: f64,
    /// Compression radius at which the bounds settled.
    pub bounds_radius: f64,
    pub diagonal_lower: f64,
    /// Rigorous lower bound from an approximate inverse, when attempted.
    pub certified_lower: Option<f64>,
    pub is_frame: bool,
    /// Upper bound estimated on the sampled frame operator.
    pub grid_upper: Option<f64>,
    pub warning: Option<String>,
}

impl FrameReport {
    /// `Err(NotAFrame)` unless the report certifies a frame.
    pub fn require_frame(&self) -> Result<()> {
        if self.is_frame {
            Ok(())
        } else {
            Err(Error::NotAFrame {
                lower: self.lower_bound,
                upper: self.upper_bound,
            })
        }
    }
}

/// Spectral range of a self-adjoint Janssen element and its certification.
#[derive(Clone, Copy, Debug)]
pub struct ElementBounds {
    pub lower: f64,
    pub upper: f64,
    pub bounds_radius: f64,
    pub diagonal_lower: f64,
    pub certified_lower: Option<f64>,
}

impl ElementBounds {
    pub fn is_frame(&self) -> bool {
        self.certified_lower.is_some_and(|c| c > 0.0)
    }
}

/// Compression estimates of the lower bound approach the true value like `R^{-2}`, so
/// `|ΔA|/3` estimates the error left after doubling the radius.
const SETTLE_REL: f64 = 1e-2;

/// Compression-based estimates of the spectral extremes, grown until the estimated error of
/// the lower estimate drops below about `3e-3` relative.
pub fn element_bounds(j: &TwistedElement, tail: f64, opts: &FrameOptions) -> Result<ElementBounds> {
    let dd = diagonal_dominance_bounds(j);
    let mut last: Option<(f64, f64, f64)> = None;
    for &r in &opts.bounds_radii {
        let b = spectral_bounds_with(j, r, 4000, 1e-10)?;
        if b.method == BoundsMethod::DiagonalDominance && last.is_some() {
            break;
        }
        let (lo, hi) = (b.lower.max(dd.lower), b.upper.min(dd.upper).max(b.lower));
        if let Some((plo, _, _)) = last {
            let settled = (lo - plo).abs() <= SETTLE_REL * lo.abs() + 1e-9 * hi.abs();
            last = Some((lo, hi, r));
            if settled {
                break;
            }
        } else {
            last = Some((lo, hi, r));
        }
    }
    let (lower, upper, bounds_radius) = last
        .ok_or_else(|| Error::InvalidInput("at least one compression radius is required".into()))?;
    let certified_lower = if opts.certify {
        certify_lower(j, lower, upper, tail, opts.certify_tol)
    } else {
        None
    };
    Ok(ElementBounds {
        lower,
        upper,
        bounds_radius,
        diagonal_lower: dd.lower,
        certified_lower,
    })
}

/// Lower spectral bound `(1 − r)/‖b‖₁ − tail` from an approximate inverse `b` with
/// `r = ‖δ − j♮b‖₁ < 1`; `None` when the estimate already signals a degenerate element.
fn certify_lower(j: &TwistedElement, lower: f64, upper: f64, tail: f64, tol: f64) -> Option<f64> {
    if !(lower > 1e-4 * upper) {
        return Some(lower.min(0.0) - tail);
    }
    let b = match invert(j, tol) {
        Ok(b) => b,
        Err(_) => return Some(-tail),
    };
    let one = TwistedElement::identity(j.lattice(), j.side());
    let r = j.tconv(&b).ok()?.distance_l1(&one).ok()?;
    if r >= 1.0 {
        return Some(-tail);
    }
    Some((1.0 - r) / b.l1() - tail)
}

/// Largest relative shortfall of the sampled upper bound before a warning; a periodic grid
/// only sees the symbol at finitely many points.
const GRID_GAP: f64 = 2e-2;

/// Largest eigenvalue estimate of the sampled frame operator by Lanczos.
fn grid_upper(g: &SampledSignal, lattice: &Lattice2D) -> Result<f64> {
    let grid = *g.grid();
    let radius = (grid.half_width() - 2.0).clamp(2.0, 10.0);
    let n = grid.len();
    let failure = RefCell::new(None);
    let (_, hi) = lanczos_extremes(
        n,
        |x, y| {
            let f = SampledSignal::new(grid, x.to_vec()).expect("length matches grid");
            match frame_operator_apply(g, lattice, &f, radius) {
                Ok(s) => y.copy_from_slice(s.values()),
                Err(e) => {
                    *failure.borrow_mut() = Some(e);
                    y.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
                }
            }
        },
        80,
        1e-6,
    );
    failure.into_inner().map_or(Ok(hi), Err)
}

fn report(
    j: &TwistedElement,
    tail: f64,
    label: String,
    lattice: &Lattice2D,
    radius: f64,
    sampled: Option<SampledSignal>,
    opts: &FrameOptions,
) -> Result<FrameReport> {
    let b = element_bounds(j, tail, opts)?;
    let vol = lattice.volume();
    let wr_residual = wexler_raz_from_coeffs(&j.scaled_re(vol), vol);
    let (grid_upper, warning) = match sampled {
        Some(g) => {
            let u = grid_upper(&g, lattice)?;
            let gap = (u - b.upper) / b.upper.abs().max(f64::MIN_POSITIVE);
            let warning = if gap > 1e-6 {
                Some(format!(
                    "sampled frame operator exceeds the upper bound by {gap:.3e} (relative); truncation too small"
                ))
            } else if gap < -GRID_GAP {
                Some(format!(
                    "sampled frame operator stays {:.3e} (relative) below the upper bound; grid too coarse",
                    -gap
                ))
            } else {
                None
            };
            (Some(u), warning)
        }
        None => (None, None),
    };
    let tightness = if b.lower > 0.0 {
        b.upper / b.lower - 1.0
    } else {
        f64::INFINITY
    };
    Ok(FrameReport {
        lattice: lattice.literal(),
        window: label,
        lower_bound: b.lower,
        upper_bound: b.upper,
        tightness,
        wr_residual,
        tail_mass: tail,
        radius,
        bounds_radius: b.bounds_radius,
        diagonal_lower: b.diagonal_lower,
        certified_lower: b.certified_lower,
        is_frame: b.is_frame(),
        grid_upper,
        warning,
    })
}

/// Frame bounds of `{π(λ)g}` from the spectrum of the Janssen element.
pub fn frame_bounds(
    w: &WindowSpec,
    lattice: &Lattice2D,
    opts: &FrameOptions,
) -> Result<FrameReport> {
    frame_bounds_atom(&Atom::window(w.clone()), lattice, opts)
}

/// [`frame_bounds`] for an arbitrary atom.
pub fn frame_bounds_atom(
    a: &Atom,
    lattice: &Lattice2D,
    opts: &FrameOptions,
) -> Result<FrameReport> {
    let radius = opts
        .radius
        .unwrap_or_else(|| default_radius(a.base_window()));
    let (j, tail) = a.janssen(lattice, radius)?;
    let sampled = opts.grid.map(|g| a.sample(&g));
    report(
        &j,
        tail,
        a.label().to_string(),
        lattice,
        radius,
        sampled,
        opts,
    )
}

/// Frame report of a sampled window, with coefficients from grid inner products.
pub fn frame_bounds_sampled(
    g: &SampledSignal,
    label: &str,
    lattice: &Lattice2D,
    radius: f64,
    opts: &FrameOptions,
) -> Result<FrameReport> {
    let j = super::inner::janssen_element_sampled(g, lattice, radius)?;
    let sampled = opts.grid.map(|_| g.clone());
    report(&j, 0.0, label.to_string(), lattice, radius, sampled, opts)
}
