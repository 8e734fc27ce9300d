use num_complex::Complex64;
use serde::Serialize;

use super::decay::DecayProfile;
use crate::gabor_core::FrameReport;
use crate::twisted_algebra::TwistedElement;

/// Acceptance thresholds for a projection.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProjectionTolerances {
    pub idempotency: f64,
    pub self_adjoint: f64,
    pub trace: f64,
}

impl ProjectionTolerances {
    /// Idempotency and trace at `tol`, self-adjointness a hundred times tighter.
    pub fn from_tol(tol: f64) -> Self {
        ProjectionTolerances {
            idempotency: tol,
            self_adjoint: tol * 1e-2,
            trace: tol,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        ComplexValue { re: z.re, im: z.im }
    }
}

/// Residuals and diagnostics certifying (or refuting) that an element is a projection.
#[derive(Clone, Debug, Serialize)]
pub struct ProjectionReport {
    pub lattice: String,
    pub window: Option<String>,
    /// `‖P♮P − P‖_{ℓ¹}`.
    pub idempotency_residual: f64,
    /// `‖P* − P‖_{ℓ¹}`.
    pub selfadjoint_residual: f64,
    pub trace: ComplexValue,
    pub expected_trace: Option<f64>,
    pub trace_error: Option<f64>,
    /// Radius of the coefficient table.
    pub radius: f64,
    /// ℓ¹ mass of the outermost shell of the coefficient table.
    pub shell_mass: Option<f64>,
    pub decay_fits: Option<DecayProfile>,
    pub module_condition_residual: Option<f64>,
    pub tolerances: ProjectionTolerances,
    pub certified: bool,
    pub frame: Option<FrameReport>,
}

impl ProjectionReport {
    pub(crate) fn recompute_certified(&mut self) {
        let t = &self.tolerances;
        let trace_ok = self.trace_error.is_none_or(|e| e <= t.trace);
        self.certified = self.idempotency_residual <= t.idempotency
            && self.selfadjoint_residual <= t.self_adjoint
            && trace_ok;
    }
}

/// Trace of a coefficient table (the coefficient at the origin on the primal side).
pub fn rieffel_trace(p: &TwistedElement) -> Complex64 {
    p.trace()
}

/// `‖a♮a − a‖_{ℓ¹}`.
pub fn idempotency_residual(p: &TwistedElement) -> f64 {
    let pp = p.tconv(p).expect("same lattice and side");
    pp.distance_l1(p).expect("same lattice and side")
}

/// Idempotency and self-adjointness residuals and trace of `p`, certified at `tol`.
pub fn verify_projection(p: &TwistedElement, tol: f64) -> ProjectionReport {
    verify_projection_with(p, ProjectionTolerances::from_tol(tol), None)
}

/// As [`verify_projection`] with explicit tolerances and, when known, the expected trace.
pub fn verify_projection_with(
    p: &TwistedElement,
    tolerances: ProjectionTolerances,
    expected_trace: Option<f64>,
) -> ProjectionReport {
    let trace = rieffel_trace(p);
    let mut report = ProjectionReport {
        lattice: p.lattice().literal(),
        window: None,
        idempotency_residual: idempotency_residual(p),
        selfadjoint_residual: p.self_adjoint_residual(),
        trace: trace.into(),
        expected_trace,
        trace_error: expected_trace.map(|e| (trace - e).norm()),
        radius: p.radius(),
        shell_mass: None,
        decay_fits: None,
        module_condition_residual: None,
        tolerances,
        certified: false,
        frame: None,
    };
    report.recompute_certified();
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice2D;
    use crate::twisted_algebra::Side;

    #[test]
    fn identity_is_a_projection() {
        let lat = Lattice2D::rotation(0.75).unwrap();
        let one = TwistedElement::identity(&lat, Side::Primal);
        let r = verify_projection(&one, 1e-8);
        assert_eq!(r.idempotency_residual, 0.0);
        assert_eq!(r.selfadjoint_residual, 0.0);
        assert_eq!(r.trace, ComplexValue { re: 1.0, im: 0.0 });
        assert!(r.certified);
        assert_eq!(rieffel_trace(&one), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn half_identity_is_not() {
        let lat = Lattice2D::rotation(0.75).unwrap();
        let half = TwistedElement::identity(&lat, Side::Primal).scaled_re(0.5);
        let r = verify_projection(&half, 1e-8);
        assert_eq!(r.idempotency_residual, 0.25);
        assert!(!r.certified);
    }

    #[test]
    fn trace_mismatch_blocks_certification() {
        let lat = Lattice2D::rotation(0.5).unwrap();
        let one = TwistedElement::identity(&lat, Side::Primal);
        let r = verify_projection_with(&one, ProjectionTolerances::from_tol(1e-8), Some(0.5));
        assert_eq!(r.trace_error, Some(0.5));
        assert!(!r.certified);
    }
}
