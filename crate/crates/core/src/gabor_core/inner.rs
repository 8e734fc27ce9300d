use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{Lattice2D, LatticePoint};
use crate::tf_signal::{stft, SampledSignal};
use crate::twisted_algebra::{apply_left, apply_right, Side, TwistedElement};

fn require_planar(lattice: &Lattice2D) -> Result<()> {
    if lattice.rank() != 2 {
        return Err(Error::InvalidInput(
            "signal-level operations need a single 2x2 lattice block".into(),
        ));
    }
    Ok(())
}

fn stft_element(
    f: &SampledSignal,
    g: &SampledSignal,
    lattice: &Lattice2D,
    side: Side,
    radius: f64,
    scale: f64,
) -> Result<TwistedElement> {
    require_planar(lattice)?;
    f.check_grid(g)?;
    let pts: Vec<LatticePoint> = lattice.enumerate_points(radius)?;
    let z: Vec<(f64, f64)> = pts.iter().map(|p| (p.coords[0], p.coords[1])).collect();
    let vals = stft(f, g, &z)?;
    let e = TwistedElement::from_entries(
        lattice,
        side,
        pts.into_iter()
            .map(|p| p.index)
            .zip(vals.into_iter().map(|v| v * scale)),
    )?;
    Ok(e.with_radius(radius))
}

/// Left inner product: coefficients `⟨f, π(λ)g⟩` for `λ ∈ Λ` within `radius`.
pub fn inner_left(
    f: &SampledSignal,
    g: &SampledSignal,
    lattice: &Lattice2D,
    radius: f64,
) -> Result<TwistedElement> {
    stft_element(f, g, lattice, Side::Primal, radius, 1.0)
}

/// Right inner product on the adjoint lattice: coefficients `⟨f, π(λ°)g⟩`.
///
/// Together with [`apply_right`] this satisfies `inner_left(f, g)·h = f·inner_right(g, h)`;
/// the `vol(Λ)⁻¹` normalisation enters through the right action and the adjoint-side trace.
pub fn inner_right(
    f: &SampledSignal,
    g: &SampledSignal,
    lattice: &Lattice2D,
    radius: f64,
) -> Result<TwistedElement> {
    stft_element(f, g, &lattice.adjoint(), Side::Adjoint, radius, 1.0)
}

/// Janssen element `vol(Λ)⁻¹ ⟨g, π(λ°)g⟩` from grid inner products.
pub fn janssen_element_sampled(
    g: &SampledSignal,
    lattice: &Lattice2D,
    radius: f64,
) -> Result<TwistedElement> {
    let adj = lattice.adjoint();
    stft_element(g, g, &adj, Side::Adjoint, radius, adj.volume())
}

/// Coefficients of the rank-one module operator `Θ_{g,h} f = inner_left(f, h)·g`
/// on the adjoint lattice: `vol(Λ)⁻¹ ⟨g, π(λ°)h⟩`, so that `Θ_{g,h} = Σ c(λ°) π(λ°)`.
pub fn theta_op_coeffs(
    g: &SampledSignal,
    h: &SampledSignal,
    lattice: &Lattice2D,
    radius: f64,
) -> Result<TwistedElement> {
    let adj = lattice.adjoint();
    stft_element(g, h, &adj, Side::Adjoint, radius, adj.volume())
}

/// Gabor frame operator `Σ_λ ⟨f, π(λ)g⟩ π(λ)g`, truncated to `radius`.
pub fn frame_operator_apply(
    g: &SampledSignal,
    lattice: &Lattice2D,
    f: &SampledSignal,
    radius: f64,
) -> Result<SampledSignal> {
    apply_left(&inner_left(f, g, lattice, radius)?, g)
}

/// Relative mismatch of the two sides of the fundamental identity
/// `Σ_λ ⟨f,π(λ)g⟩⟨π(λ)h,k⟩ = vol(Λ)⁻¹ Σ_{λ°} ⟨h,π(λ°)g⟩ conj(⟨k,π(λ°)f⟩)`.
pub fn figa_residual(
    f: &SampledSignal,
    g: &SampledSignal,
    h: &SampledSignal,
    k: &SampledSignal,
    lattice: &Lattice2D,
    radius: f64,
) -> Result<f64> {
    let (lhs, rhs) = figa_sides(f, g, h, k, lattice, radius)?;
    Ok(relative_gap(lhs, rhs))
}

/// Both sides of the fundamental identity, in the order of [`figa_residual`].
pub fn figa_sides(
    f: &SampledSignal,
    g: &SampledSignal,
    h: &SampledSignal,
    k: &SampledSignal,
    lattice: &Lattice2D,
    radius: f64,
) -> Result<(Complex64, Complex64)> {
    for s in [g, h, k] {
        f.check_grid(s)?;
    }
    let fg = inner_left(f, g, lattice, radius)?;
    let kh = inner_left(k, h, lattice, radius)?;
    let hg = inner_right(h, g, lattice, radius)?;
    let kf = inner_right(k, f, lattice, radius)?;
    Ok((
        pair_sum(&fg, &kh),
        pair_sum(&hg, &kf) * lattice.volume().recip(),
    ))
}

/// `Σ a(λ) conj(b(λ))` over the common support.
fn pair_sum(a: &TwistedElement, b: &TwistedElement) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    a.for_each(|idx, _, v| s += v * b.get(idx).conj());
    s
}

pub(crate) fn relative_gap(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / (a.norm() + b.norm() + 1e-300)
}

/// Relative L² mismatch of `inner_left(f, g)·h` and `f·inner_right(g, h)`.
pub fn associativity_residual(
    f: &SampledSignal,
    g: &SampledSignal,
    h: &SampledSignal,
    lattice: &Lattice2D,
    radius: f64,
) -> Result<f64> {
    let left = apply_left(&inner_left(f, g, lattice, radius)?, h)?;
    let right = apply_right(f, &inner_right(g, h, lattice, radius)?)?;
    let scale = left.norm().max(right.norm());
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok(left.sub(&right)?.norm() / scale)
}

/// Largest deviation from `⟨g, π(λ°)g⟩ = vol(Λ) δ_{λ°,0}` over the adjoint points within `radius`.
pub fn wexler_raz_residual(g: &SampledSignal, lattice: &Lattice2D, radius: f64) -> Result<f64> {
    let vol = lattice.volume();
    let c = inner_right(g, g, lattice, radius)?;
    Ok(wexler_raz_from_coeffs(&c, vol))
}

/// `max_{λ°≠0} |c(λ°)|` combined (by max) with `|c(0) − vol|`.
pub(crate) fn wexler_raz_from_coeffs(c: &TwistedElement, vol: f64) -> f64 {
    let mut worst = 0.0f64;
    let mut seen_origin = false;
    c.for_each(|idx, _, v| {
        if idx.iter().all(|&k| k == 0) {
            seen_origin = true;
            worst = worst.max((v - vol).norm());
        } else {
            worst = worst.max(v.norm());
        }
    });
    if !seen_origin {
        worst = worst.max(vol);
    }
    worst
}

/// `‖g·inner_right(g, g) − g‖ / ‖g‖`.
pub fn module_condition_residual(
    g: &SampledSignal,
    lattice: &Lattice2D,
    radius: f64,
) -> Result<f64> {
    let lhs = apply_right(g, &inner_right(g, g, lattice, radius)?)?;
    let n = g.norm();
    if n == 0.0 {
        return Ok(0.0);
    }
    Ok(lhs.sub(g)?.norm() / n)
}
