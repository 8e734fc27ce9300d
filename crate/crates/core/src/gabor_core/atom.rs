use num_complex::Complex64;
use rayon::prelude::*;

use super::frame::{janssen_element, negligible_radius};
use crate::error::{Error, Result};
use crate::lattice::{cis_turns, Lattice2D};
use crate::tf_signal::{GridSpec, SampledSignal, WindowSpec};
use crate::twisted_algebra::{Side, TwistedElement};

/// A Gabor atom `Σ_{μ∈Λ°} e(μ) π(μ) g` built from an analytic window `g`.
///
/// Without an expansion the atom is the window itself. Every quantity is evaluated from
/// closed-form (or quadrature) ambiguity values, never from a sampled grid.
#[derive(Clone, Debug)]
pub struct Atom {
    window: WindowSpec,
    expansion: Option<TwistedElement>,
    label: String,
}

impl Atom {
    pub fn window(w: WindowSpec) -> Self {
        let label = w.id();
        Atom {
            window: w,
            expansion: None,
            label,
        }
    }

    /// `π(e) g` for an adjoint-side element `e` on a rank-2 lattice.
    pub fn expanded(w: WindowSpec, e: TwistedElement, label: impl Into<String>) -> Result<Self> {
        if e.side() != Side::Adjoint {
            return Err(Error::WrongSide);
        }
        if e.lattice().rank() != 2 {
            return Err(Error::InvalidInput("atoms live on a rank-2 lattice".into()));
        }
        Ok(Atom {
            window: w,
            expansion: Some(e),
            label: label.into(),
        })
    }

    pub fn base_window(&self) -> &WindowSpec {
        &self.window
    }

    pub fn expansion(&self) -> Option<&TwistedElement> {
        self.expansion.as_ref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    fn check_lattice(&self, lattice: &Lattice2D) -> Result<()> {
        if lattice.rank() != 2 {
            return Err(Error::InvalidInput("atoms live on a rank-2 lattice".into()));
        }
        match &self.expansion {
            Some(e) if *e.lattice() != lattice.adjoint() => Err(Error::LatticeMismatch),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        match &self.expansion {
            None => Complex64::new(self.window.eval(t), 0.0),
            Some(e) => {
                let mut s = Complex64::new(0.0, 0.0);
                e.for_each(|_, z, v| s += v * cis_turns(z[1] * t) * self.window.eval(t - z[0]));
                s
            }
        }
    }

    /// Pointwise samples on `grid`.
    pub fn sample(&self, grid: &GridSpec) -> SampledSignal {
        let vals: Vec<Complex64> = (0..grid.len())
            .into_par_iter()
            .map(|k| self.eval(grid.t(k)))
            .collect();
        SampledSignal::new(*grid, vals).expect("length matches grid")
    }

    /// `e*♮e`, the weights of `⟨π(κ)g, π(z)g⟩` in the Gram expansion of the atom.
    fn gram_weights(&self) -> Result<Option<TwistedElement>> {
        match &self.expansion {
            None => Ok(None),
            Some(e) => Ok(Some(e.involute().tconv(e)?.truncated(1e-17, None))),
        }
    }

    /// `⟨a, π(z) a⟩` for `z` commuting with every shift of the expansion.
    fn gram_at(&self, w: Option<&TwistedElement>, z: &[f64]) -> Result<Complex64> {
        match w {
            None => self.window.ambiguity(z[0], z[1]),
            Some(w) => {
                // ⟨π(κ)g, π(z)g⟩ = e^{2πi x_κ(ω_κ − ω_z)} A(z − κ)
                let mut s = Complex64::new(0.0, 0.0);
                let mut err = None;
                w.for_each(|_, k, v| {
                    if err.is_some() {
                        return;
                    }
                    match self.window.ambiguity(z[0] - k[0], z[1] - k[1]) {
                        Ok(a) => s += v * cis_turns(k[0] * (k[1] - z[1])) * a,
                        Err(e) => err = Some(e),
                    }
                });
                err.map_or(Ok(s), Err)
            }
        }
    }

    /// `‖a‖²`.
    pub fn norm_sqr(&self) -> Result<f64> {
        let w = self.gram_weights()?;
        Ok(self.gram_at(w.as_ref(), &[0.0, 0.0])?.re)
    }

    /// Left inner product `⟨a, π(λ)a⟩` on `λ ∈ Λ` within `radius`.
    pub fn gram_primal(&self, lattice: &Lattice2D, radius: f64) -> Result<TwistedElement> {
        self.gram_shell(lattice, -1.0, radius)
    }

    /// Left inner product restricted to the shell `r_in < |λ| ≤ r_out`.
    pub fn gram_shell(&self, lattice: &Lattice2D, r_in: f64, r_out: f64) -> Result<TwistedElement> {
        self.check_lattice(lattice)?;
        let w = self.gram_weights()?;
        let pts: Vec<_> = lattice
            .enumerate_points(r_out)?
            .into_iter()
            .filter(|p| p.norm() > r_in)
            .collect();
        let vals: Vec<Complex64> = pts
            .par_iter()
            .map(|p| self.gram_at(w.as_ref(), &p.coords))
            .collect::<Result<_>>()?;
        let out = TwistedElement::from_entries(
            lattice,
            Side::Primal,
            pts.into_iter().map(|p| p.index).zip(vals),
        )?;
        Ok(out.with_radius(r_out))
    }

    /// Janssen element of the atom on `Λ°` within `radius`, with the ℓ¹ mass it drops beyond.
    ///
    /// For an expanded atom this is `e♮J♮e*`, with the window's Janssen element `J` taken
    /// far enough out that every coefficient inside `radius` is complete.
    pub fn janssen(&self, lattice: &Lattice2D, radius: f64) -> Result<(TwistedElement, f64)> {
        self.check_lattice(lattice)?;
        match &self.expansion {
            None => {
                let cap = negligible_radius(&self.window).max(radius);
                let full = janssen_element(&self.window, lattice, cap)?;
                let inner = full.restricted(radius).with_radius(radius);
                let tail = full.l1() - inner.l1();
                Ok((inner, tail.max(0.0)))
            }
            Some(e) => {
                let reach = radius + 2.0 * e.support_radius();
                let ext = reach.min(negligible_radius(&self.window).max(radius));
                let j = janssen_element(&self.window, lattice, ext)?;
                let full = e.tconv(&j)?.tconv(&e.involute())?;
                let inner = full.restricted(radius).with_radius(radius);
                let tail = full.l1() - inner.l1();
                Ok((inner, tail.max(0.0)))
            }
        }
    }
}
