use num_complex::Complex64;

use super::element::TwistedElement;
use super::spectral::{spectral_bounds_with, SpectralBounds};
use crate::error::{Error, Result};

/// Truncation and iteration policy for [`invert_with`] and [`inv_sqrt_with`].
#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    /// Coefficients below `drop_rel · ‖x‖_{ℓ¹}` are discarded after each product.
    pub drop_rel: f64,
    /// Initial support cap as a multiple of the input radius.
    pub cap_factor: f64,
    /// The cap grows by half its size on stagnation, up to this multiple
    /// and at most [`MAX_SUPPORT_POINTS`] lattice points.
    pub max_cap_factor: f64,
    pub max_iter: usize,
    /// Precomputed spectral bounds; estimated from the regular representation otherwise.
    pub bounds: Option<SpectralBounds>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            drop_rel: 1e-16,
            cap_factor: 4.0,
            max_cap_factor: 64.0,
            max_iter: 200,
            bounds: None,
        }
    }
}

/// Upper limit on the number of lattice points inside the support cap.
pub const MAX_SUPPORT_POINTS: f64 = 250_000.0;

/// Next cap factor after stagnation, or `None` when the cap cannot grow further.
fn grow(a: &TwistedElement, factor: f64, base: f64, opts: &SolveOptions) -> Option<f64> {
    let next = (factor * 1.5).min(opts.max_cap_factor);
    (next > factor && a.lattice().estimated_count(next * base) <= MAX_SUPPORT_POINTS)
        .then_some(next)
}

fn base_radius(a: &TwistedElement) -> f64 {
    a.radius().max(a.support_radius()).max(1.0)
}

/// Ball radius for the scaling bounds: three support radii, shrunk to a fixed work budget.
fn bounds_radius(a: &TwistedElement) -> f64 {
    let nnz = a.nnz().max(1) as f64;
    let mut r = (3.0 * a.support_radius()).max(6.0);
    while r > 6.0 && a.lattice().estimated_count(r) * nnz > 4e6 {
        r *= 0.8;
    }
    r
}

fn scaling(a: &TwistedElement, opts: &SolveOptions) -> Result<(f64, SpectralBounds)> {
    let b = match opts.bounds {
        Some(b) => b,
        None => spectral_bounds_with(a, bounds_radius(a), 400, 1e-6)?,
    };
    if !(b.lower > f64::EPSILON * b.upper.abs()) || !(b.upper > 0.0) {
        return Err(Error::NotInvertible {
            lower: b.lower,
            upper: b.upper,
        });
    }
    let upper = b.upper * 1.01;
    Ok((2.0 / (b.lower + upper), b))
}

fn step(x: &TwistedElement, y: &TwistedElement, cap: f64, drop_rel: f64) -> Result<TwistedElement> {
    Ok(x.tconv_within(y, Some(cap))?
        .truncated(drop_rel, None)
        .with_radius(cap))
}

/// Inverse by Newton–Hotelling iteration `x ← x + x♮(δ − a♮x)` from `x₀ = 2/(A+B)·δ`.
///
/// Postcondition: `‖a♮x − δ‖_{ℓ¹} ≤ tol`.
pub fn invert(a: &TwistedElement, tol: f64) -> Result<TwistedElement> {
    invert_with(a, tol, &SolveOptions::default())
}

pub fn invert_with(a: &TwistedElement, tol: f64, opts: &SolveOptions) -> Result<TwistedElement> {
    let (s, _) = scaling(a, opts)?;
    let one = TwistedElement::identity(a.lattice(), a.side());
    let base = base_radius(a);
    let mut factor = opts.cap_factor;
    let mut x = one.scaled_re(s).with_radius(0.0);
    let mut prev = f64::INFINITY;
    let mut residual = f64::INFINITY;
    for _ in 0..opts.max_iter {
        let r = one.sub(&a.tconv(&x)?)?;
        residual = r.l1();
        if residual <= tol {
            let r = x.support_radius();
            return Ok(x.with_radius(r));
        }
        if !residual.is_finite() || residual > 1e8 {
            break;
        }
        if residual < 0.1 && residual > 0.5 * prev {
            match grow(a, factor, base, opts) {
                Some(f) => factor = f,
                None => break,
            }
        }
        prev = residual;
        let cap = factor * base;
        x = x
            .add(&step(&x, &r, cap, opts.drop_rel)?)?
            .truncated(opts.drop_rel, Some(cap));
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        residual,
    })
}

/// `‖y♮a♮y − δ‖_{ℓ¹}`.
pub fn inv_sqrt_residual(a: &TwistedElement, y: &TwistedElement) -> Result<f64> {
    let one = TwistedElement::identity(a.lattice(), a.side());
    y.tconv(&a.tconv(y)?)?.distance_l1(&one)
}

/// Inverse square root by the coupled Newton–Schulz iteration
/// `T = ½(3δ − Z♮Y)`, `Y ← Y♮T`, `Z ← T♮Z` from `Y₀ = s·a`, `Z₀ = δ`, `s = 2/(A+B)`,
/// returning `√s·Z`.
///
/// The coupled pair can settle on `Z♮Y = δ` with both factors truncated, so when the
/// postcondition fails the iteration restarts from scratch with a larger support cap.
///
/// Postcondition: `‖y♮a♮y − δ‖_{ℓ¹} ≤ tol` and `y` self-adjoint.
pub fn inv_sqrt(a: &TwistedElement, tol: f64) -> Result<TwistedElement> {
    inv_sqrt_with(a, tol, &SolveOptions::default())
}

pub fn inv_sqrt_with(a: &TwistedElement, tol: f64, opts: &SolveOptions) -> Result<TwistedElement> {
    let (s, _) = scaling(a, opts)?;
    let base = base_radius(a);
    let mut factor = opts.cap_factor;
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    loop {
        let z = coupled_newton_schulz(a, s, factor * base, tol, opts, &mut iterations)?;
        if let Some(z) = z {
            let cand = z.scaled_re(s.sqrt()).symmetrized();
            residual = inv_sqrt_residual(a, &cand)?;
            if residual <= tol {
                let r = cand.support_radius();
                return Ok(cand.with_radius(r));
            }
        }
        match grow(a, factor, base, opts) {
            Some(f) if iterations < opts.max_iter => factor = f,
            _ => {
                return Err(Error::NoConvergence {
                    iterations,
                    residual,
                })
            }
        }
    }
}

/// Runs the coupled iteration at a fixed cap until `‖Z♮Y − δ‖` reaches `tol/10` or stalls.
/// Returns `None` on divergence.
fn coupled_newton_schulz(
    a: &TwistedElement,
    s: f64,
    cap: f64,
    tol: f64,
    opts: &SolveOptions,
    iterations: &mut usize,
) -> Result<Option<TwistedElement>> {
    let one = TwistedElement::identity(a.lattice(), a.side());
    let mut y = a.scaled_re(s);
    let mut z = one.clone();
    let mut prev = f64::INFINITY;
    while *iterations < opts.max_iter {
        *iterations += 1;
        let zy = step(&z, &y, cap, opts.drop_rel)?;
        let proxy = zy.distance_l1(&one)?;
        if !proxy.is_finite() || proxy > 1e8 {
            return Ok(None);
        }
        if proxy <= 0.1 * tol || (proxy < 0.1 && proxy > 0.5 * prev) {
            return Ok(Some(z));
        }
        prev = proxy;
        let t =
            one.scaled_re(1.5)
                .lincomb(Complex64::new(1.0, 0.0), &zy, Complex64::new(-0.5, 0.0))?;
        let ny = step(&y, &t, cap, opts.drop_rel)?;
        z = step(&t, &z, cap, opts.drop_rel)?;
        y = ny;
    }
    Ok(Some(z))
}
