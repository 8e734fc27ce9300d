//! Sampled signals, time-frequency shifts, STFT, Fourier transform, windows and
//! high-accuracy ambiguity coefficients.
//!
//! Convention: `π(x, ω) = M_ω T_x`, `(π(x, ω) f)(t) = e^{2πiωt} f(t − x)`, and
//! `V_g f(x, ω) = ⟨f, π(x, ω) g⟩ = ∫ f(t) conj(g(t − x)) e^{-2πiωt} dt`.

mod grid;
pub mod quadrature;
mod window;

pub use grid::{
    fourier_transform, modulate, stft, tf_shift, tf_shift_adjoint, translate, GridSpec,
    SampledSignal, TfShifter,
};
pub use window::{
    ambiguity_coefficient, exp_ambiguity, gaussian_ambiguity, sample_window, sech_ambiguity,
    CustomSamples, WindowKind, WindowSpec,
};
