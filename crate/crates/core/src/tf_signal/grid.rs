use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::lattice::cis_turns;

/// Uniform periodic grid `t_k = -T + k/q`, `k = 0..N`, `N = 2Tq`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    half_width: f64,
    samples_per_unit: usize,
    n: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::new(16.0, 64).expect("default grid is valid")
    }
}

impl GridSpec {
    pub fn new(half_width: f64, samples_per_unit: usize) -> Result<Self> {
        if !(half_width > 0.0) || samples_per_unit == 0 {
            return Err(Error::InvalidGrid("T and q must be positive".into()));
        }
        let tq = half_width * samples_per_unit as f64;
        if (tq - tq.round()).abs() > 1e-9 {
            return Err(Error::InvalidGrid(format!("T·q = {tq} is not an integer")));
        }
        let n = 2 * tq.round() as usize;
        if !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("N = {n} is not a power of two")));
        }
        Ok(GridSpec {
            half_width,
            samples_per_unit,
            n,
        })
    }

    /// Parses `"T,q"`.
    pub fn parse(literal: &str) -> Result<Self> {
        let parts: Vec<&str> = literal.split(',').map(str::trim).collect();
        if parts.len() != 2 {
            return Err(Error::Parse(format!("grid '{literal}' must be 'T,q'")));
        }
        let t: f64 = parts[0]
            .parse()
            .map_err(|_| Error::Parse(format!("bad grid token '{}'", parts[0])))?;
        let q: usize = parts[1]
            .parse()
            .map_err(|_| Error::Parse(format!("bad grid token '{}'", parts[1])))?;
        Self::new(t, q)
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn samples_per_unit(&self) -> usize {
        self.samples_per_unit
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn step(&self) -> f64 {
        1.0 / self.samples_per_unit as f64
    }

    pub fn t(&self, k: usize) -> f64 {
        -self.half_width + k as f64 / self.samples_per_unit as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.t(k)).collect()
    }

    /// Signed DFT frequency of bin `j`, in cycles per unit time.
    pub fn frequency(&self, j: usize) -> f64 {
        let df = 1.0 / (2.0 * self.half_width);
        if j < self.n / 2 {
            j as f64 * df
        } else {
            (j as f64 - self.n as f64) * df
        }
    }

    /// `e^{2πi ω t_k}` computed with the exact integer part of `t_k` split off.
    fn modulation_phase(&self, omega: f64, k: usize) -> Complex64 {
        let q = self.samples_per_unit as i64;
        let off = k as i64 - (self.half_width * q as f64).round() as i64;
        let whole = off.div_euclid(q) as f64;
        let rest = off.rem_euclid(q) as f64 / q as f64;
        cis_turns(omega * whole) * cis_turns(omega * rest)
    }
}

type PlanCache = (FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>);

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<Mutex<PlanCache>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())));
    let mut guard = cache.lock().expect("fft cache poisoned");
    let (planner, map) = &mut *guard;
    map.entry((n, inverse))
        .or_insert_with(|| {
            if inverse {
                planner.plan_fft_inverse(n)
            } else {
                planner.plan_fft_forward(n)
            }
        })
        .clone()
}

/// Complex samples of a function on a [`GridSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct SampledSignal {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl SampledSignal {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        if values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::InvalidInput("non-finite sample".into()));
        }
        Ok(SampledSignal { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        SampledSignal {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|k| f(grid.t(k))).collect();
        SampledSignal { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn check_grid(&self, other: &SampledSignal) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// `⟨f, g⟩ = Σ f_k conj(g_k) / q`.
    pub fn inner(&self, other: &SampledSignal) -> Result<Complex64> {
        self.check_grid(other)?;
        Ok(inner_raw(&self.values, &other.values) * self.grid.step())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.step()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scaled(&self, s: Complex64) -> SampledSignal {
        SampledSignal {
            grid: self.grid,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    /// `self += s · other`.
    pub fn axpy(&mut self, s: Complex64, other: &SampledSignal) -> Result<()> {
        self.check_grid(other)?;
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += s * b;
        }
        Ok(())
    }

    pub fn sub(&self, other: &SampledSignal) -> Result<SampledSignal> {
        let mut out = self.clone();
        out.axpy(Complex64::new(-1.0, 0.0), other)?;
        Ok(out)
    }

    /// `‖self − other‖ / ‖other‖`, or the absolute distance when `other` vanishes.
    pub fn relative_distance(&self, other: &SampledSignal) -> Result<f64> {
        let d = self.sub(other)?.norm();
        let n = other.norm();
        Ok(if n > 0.0 { d / n } else { d })
    }

    /// Sample value at `t` by nearest grid index (for diagnostics).
    pub fn value_near(&self, t: f64) -> Complex64 {
        let k = ((t + self.grid.half_width) * self.grid.samples_per_unit as f64).round() as i64;
        self.values[k.rem_euclid(self.grid.len() as i64) as usize]
    }
}

pub(crate) fn inner_raw(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter()
        .zip(b)
        .fold(Complex64::new(0.0, 0.0), |acc, (x, y)| acc + x * y.conj())
}

/// Precomputed spectrum of a signal for repeated time-frequency shifts.
pub struct TfShifter {
    grid: GridSpec,
    spectrum: Vec<Complex64>,
    inverse: Arc<dyn Fft<f64>>,
}

impl TfShifter {
    pub fn new(f: &SampledSignal) -> Self {
        let grid = f.grid;
        let mut spectrum = f.values.clone();
        plan(grid.len(), false).process(&mut spectrum);
        TfShifter {
            grid,
            spectrum,
            inverse: plan(grid.len(), true),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// `M_ω T_x f` on the periodic band-limited model.
    pub fn shift(&self, x: f64, omega: f64) -> SampledSignal {
        let n = self.grid.len();
        let mut buf: Vec<Complex64> = self
            .spectrum
            .iter()
            .enumerate()
            .map(|(j, s)| s * cis_turns(-self.grid.frequency(j) * x))
            .collect();
        self.inverse.process(&mut buf);
        let scale = 1.0 / n as f64;
        for (k, v) in buf.iter_mut().enumerate() {
            *v *= scale;
            if omega != 0.0 {
                *v *= self.grid.modulation_phase(omega, k);
            }
        }
        SampledSignal {
            grid: self.grid,
            values: buf,
        }
    }
}

/// `π(z) f = M_ω T_x f`.
pub fn tf_shift(f: &SampledSignal, z: (f64, f64)) -> SampledSignal {
    if z.0 == 0.0 {
        return modulate(f, z.1);
    }
    TfShifter::new(f).shift(z.0, z.1)
}

/// `M_ω f`.
pub fn modulate(f: &SampledSignal, omega: f64) -> SampledSignal {
    let mut out = f.clone();
    if omega != 0.0 {
        for (k, v) in out.values.iter_mut().enumerate() {
            *v *= f.grid.modulation_phase(omega, k);
        }
    }
    out
}

/// `T_x f`.
pub fn translate(f: &SampledSignal, x: f64) -> SampledSignal {
    if x == 0.0 {
        return f.clone();
    }
    TfShifter::new(f).shift(x, 0.0)
}

/// `π(z)* f = π(z)⁻¹ f = T_{-x} M_{-ω} f`.
pub fn tf_shift_adjoint(f: &SampledSignal, z: (f64, f64)) -> SampledSignal {
    translate(&modulate(f, -z.1), -z.0)
}

/// Short-time Fourier transform `V_g f(x, ω) = ⟨f, π(x, ω) g⟩` at the given points.
pub fn stft(f: &SampledSignal, g: &SampledSignal, pts: &[(f64, f64)]) -> Result<Vec<Complex64>> {
    f.check_grid(g)?;
    let shifter = TfShifter::new(g);
    let step = f.grid.step();
    Ok(pts
        .par_iter()
        .map(|&(x, w)| inner_raw(&f.values, &shifter.shift(x, w).values) * step)
        .collect())
}

/// Fourier transform `ℱf(ξ) = ∫ f(t) e^{-2πiξt} dt` evaluated on the same grid.
///
/// With `t_k = -T + k/q` and `ξ_m = -T + m/q` the kernel phase is
/// `T² − T(m+k)/q + mk/q²`, so the sum is a length-`q²` DFT of the folded input.
pub fn fourier_transform(f: &SampledSignal) -> SampledSignal {
    let grid = f.grid;
    let q = grid.samples_per_unit as i64;
    let tq = (grid.half_width * q as f64).round() as i64;
    let m_len = (q * q) as usize;
    let n = grid.len();
    let mut buf = vec![Complex64::new(0.0, 0.0); m_len];
    for (k, v) in f.values.iter().enumerate() {
        let ph = ((tq * k as i64).rem_euclid(q * q)) as f64 / (q * q) as f64;
        buf[k % m_len] += v * cis_turns(ph);
    }
    plan(m_len, false).process(&mut buf);
    let c0 = cis_turns(-((tq * tq).rem_euclid(q * q) as f64) / (q * q) as f64);
    let step = grid.step();
    let values = (0..n)
        .map(|m| {
            let ph = ((tq * m as i64).rem_euclid(q * q)) as f64 / (q * q) as f64;
            buf[m % m_len] * c0 * cis_turns(ph) * step
        })
        .collect();
    SampledSignal { grid, values }
}
