use super::element::{Side, TwistedElement};
use crate::error::{Error, Result};
use crate::lattice::cis_turns;
use crate::tf_signal::{SampledSignal, TfShifter};

fn require_planar(a: &TwistedElement) -> Result<()> {
    if a.lattice().rank() != 2 {
        return Err(Error::InvalidInput(
            "signal actions need a rank-2 lattice".into(),
        ));
    }
    Ok(())
}

/// `Σ_λ a(λ) π(λ) g`.
pub fn apply_left(a: &TwistedElement, g: &SampledSignal) -> Result<SampledSignal> {
    require_planar(a)?;
    let shifter = TfShifter::new(g);
    let mut out = SampledSignal::zeros(*g.grid());
    let mut err = None;
    a.for_each(|_, z, v| {
        if err.is_none() {
            if let Err(e) = out.axpy(v, &shifter.shift(z[0], z[1])) {
                err = Some(e);
            }
        }
    });
    err.map_or(Ok(out), Err)
}

/// `vol(Λ)^{-1} Σ_{λ°} conj(b(λ°)) π(λ°)* g` for an adjoint-side `b`.
///
/// Conjugate-linear in `b`; equals `vol(Λ)^{-1} π(b*) g`.
pub fn apply_right(g: &SampledSignal, b: &TwistedElement) -> Result<SampledSignal> {
    if b.side() != Side::Adjoint {
        return Err(Error::WrongSide);
    }
    require_planar(b)?;
    let inv_vol = b.lattice().volume();
    let shifter = TfShifter::new(g);
    let mut out = SampledSignal::zeros(*g.grid());
    let mut err = None;
    b.for_each(|_, z, v| {
        if err.is_none() {
            // π(z)* = e^{-2πi xω} π(−z)
            let w = v.conj() * cis_turns(-z[0] * z[1]) * inv_vol;
            if let Err(e) = out.axpy(w, &shifter.shift(-z[0], -z[1])) {
                err = Some(e);
            }
        }
    });
    err.map_or(Ok(out), Err)
}
