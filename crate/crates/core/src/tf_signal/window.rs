use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;
use std::sync::Arc;

use super::grid::{GridSpec, SampledSignal};
use super::quadrature::{integrate, QuadratureOptions};
use crate::error::{Error, Result};
use crate::lattice::cis_turns;

/// Piecewise-linear window given by samples `(t, value)`, zero outside their range.
#[derive(Clone, Debug, PartialEq)]
pub struct CustomSamples {
    pub source: String,
    pub t: Vec<f64>,
    pub v: Vec<f64>,
}

impl CustomSamples {
    pub fn new(source: impl Into<String>, mut pairs: Vec<(f64, f64)>) -> Result<Self> {
        if pairs.len() < 2 {
            return Err(Error::InvalidInput(
                "custom window needs at least two samples".into(),
            ));
        }
        if pairs.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
            return Err(Error::InvalidInput(
                "custom window has non-finite samples".into(),
            ));
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        if pairs.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidInput(
                "custom window has repeated abscissae".into(),
            ));
        }
        let (t, v) = pairs.into_iter().unzip();
        Ok(CustomSamples {
            source: source.into(),
            t,
            v,
        })
    }

    /// Reads a two-column text file; `#` starts a comment.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut pairs = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            if cols.len() != 2 {
                return Err(Error::Parse(format!(
                    "{}:{}: expected two columns",
                    path.display(),
                    ln + 1
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|_| {
                    Error::Parse(format!("{}:{}: bad number '{s}'", path.display(), ln + 1))
                })
            };
            pairs.push((parse(cols[0])?, parse(cols[1])?));
        }
        Self::new(path.display().to_string(), pairs)
    }

    fn eval(&self, x: f64) -> f64 {
        let n = self.t.len();
        if x < self.t[0] || x > self.t[n - 1] {
            return 0.0;
        }
        let i = match self.t.partition_point(|&s| s <= x) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let s = (x - self.t[i]) / (self.t[i + 1] - self.t[i]);
        self.v[i] + s * (self.v[i + 1] - self.v[i])
    }

    /// Exact `∫ |f|²` of the piecewise-linear interpolant.
    fn norm_sqr(&self) -> f64 {
        self.t
            .windows(2)
            .zip(self.v.windows(2))
            .map(|(t, v)| (t[1] - t[0]) * (v[0] * v[0] + v[0] * v[1] + v[1] * v[1]) / 3.0)
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum WindowKind {
    /// `2^{1/4} e^{-πt²}`
    Gaussian,
    /// `(π/2)^{1/2} / cosh(πt)`
    Sech,
    /// `e^{-|t|}`
    TwoSidedExp,
    Custom(Arc<CustomSamples>),
}

/// Analytic window descriptor; every built-in kind has unit L² norm.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowSpec {
    kind: WindowKind,
    scale: f64,
}

impl WindowSpec {
    pub fn gaussian() -> Self {
        WindowSpec {
            kind: WindowKind::Gaussian,
            scale: 1.0,
        }
    }

    pub fn sech() -> Self {
        WindowSpec {
            kind: WindowKind::Sech,
            scale: 1.0,
        }
    }

    pub fn two_sided_exp() -> Self {
        WindowSpec {
            kind: WindowKind::TwoSidedExp,
            scale: 1.0,
        }
    }

    /// Custom samples normalised to unit L² norm.
    pub fn custom(samples: CustomSamples) -> Result<Self> {
        let n2 = samples.norm_sqr();
        if !(n2 > 0.0) {
            return Err(Error::InvalidInput("custom window has zero norm".into()));
        }
        Ok(WindowSpec {
            kind: WindowKind::Custom(Arc::new(samples)),
            scale: 1.0 / n2.sqrt(),
        })
    }

    /// Parses `gaussian`, `sech`, `exp2` or `custom:<path>`.
    pub fn parse(literal: &str) -> Result<Self> {
        match literal.trim() {
            "gaussian" | "g1" => Ok(Self::gaussian()),
            "sech" | "g2" => Ok(Self::sech()),
            "exp2" | "g3" => Ok(Self::two_sided_exp()),
            other => match other.strip_prefix("custom:") {
                Some(path) => Self::custom(CustomSamples::load(Path::new(path))?),
                None => Err(Error::Parse(format!("unknown window '{other}'"))),
            },
        }
    }

    pub fn kind(&self) -> &WindowKind {
        &self.kind
    }

    /// Normalisation applied on top of the raw kind.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn id(&self) -> String {
        match &self.kind {
            WindowKind::Gaussian => "gaussian".into(),
            WindowKind::Sech => "sech".into(),
            WindowKind::TwoSidedExp => "exp2".into(),
            WindowKind::Custom(c) => format!("custom:{}", c.source),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let raw = match &self.kind {
            WindowKind::Gaussian => 2f64.powf(0.25) * (-PI * t * t).exp(),
            WindowKind::Sech => FRAC_PI_2.sqrt() / (PI * t).cosh(),
            WindowKind::TwoSidedExp => (-t.abs()).exp(),
            WindowKind::Custom(c) => c.eval(t),
        };
        raw * self.scale
    }

    /// Half-width beyond which the window is below ~1e-18.
    pub fn effective_half_width(&self) -> f64 {
        match &self.kind {
            WindowKind::Gaussian => 4.5,
            WindowKind::Sech => 14.0,
            WindowKind::TwoSidedExp => 42.0,
            WindowKind::Custom(c) => c.t[0].abs().max(c.t[c.t.len() - 1].abs()),
        }
    }

    fn kinks(&self) -> Vec<f64> {
        match &self.kind {
            WindowKind::TwoSidedExp => vec![0.0],
            WindowKind::Custom(c) => c.t.clone(),
            _ => Vec::new(),
        }
    }

    pub fn has_closed_form(&self) -> bool {
        !matches!(self.kind, WindowKind::Custom(_))
    }

    pub fn sample(&self, grid: &GridSpec) -> SampledSignal {
        SampledSignal::from_fn(*grid, |t| Complex64::new(self.eval(t), 0.0))
    }

    /// `⟨g, π(x, ω) g⟩`, closed form when available.
    pub fn ambiguity(&self, x: f64, omega: f64) -> Result<Complex64> {
        let s2 = self.scale * self.scale;
        match &self.kind {
            WindowKind::Gaussian => Ok(gaussian_ambiguity(x, omega) * s2),
            WindowKind::Sech => Ok(sech_ambiguity(x, omega) * s2),
            WindowKind::TwoSidedExp => Ok(exp_ambiguity(x, omega) * s2),
            WindowKind::Custom(_) => self.cross_ambiguity_quad(self, x, omega),
        }
    }

    /// `⟨g, π(x, ω) h⟩` for `g = self`; closed form when both windows agree.
    pub fn cross_ambiguity(&self, other: &WindowSpec, x: f64, omega: f64) -> Result<Complex64> {
        if self == other && self.has_closed_form() {
            return self.ambiguity(x, omega);
        }
        self.cross_ambiguity_quad(other, x, omega)
    }

    /// Adaptive quadrature of `∫ g(t) h(t − x) e^{-2πiωt} dt`, target 1e-12 absolute.
    pub fn cross_ambiguity_quad(
        &self,
        other: &WindowSpec,
        x: f64,
        omega: f64,
    ) -> Result<Complex64> {
        let (la, lb) = (self.effective_half_width(), other.effective_half_width());
        let a = (-la).max(x - lb);
        let b = la.min(x + lb);
        if a >= b {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let mut breaks = self.kinks();
        breaks.extend(other.kinks().into_iter().map(|k| k + x));
        // split long oscillatory ranges into roughly one period per piece
        let periods = (b - a) * omega.abs();
        if periods > 4.0 {
            let pieces = (periods.ceil() as usize).min(4000);
            let h = (b - a) / pieces as f64;
            breaks.extend((1..pieces).map(|i| a + i as f64 * h));
        }
        let f =
            |t: f64| Complex64::new(self.eval(t) * other.eval(t - x), 0.0) * cis_turns(-omega * t);
        let opts = QuadratureOptions {
            abs_tol: 1e-13,
            rel_tol: 1e-14,
            max_intervals: 40_000,
        };
        match integrate(f, a, b, &breaks, opts) {
            Ok(r) if r.error <= 1e-12 => Ok(r.value),
            Ok(r) => Err(Error::QuadratureFailure {
                tol: 1e-12,
                estimate: r.error,
            }),
            Err(e) => Err(e),
        }
    }
}

/// Pointwise evaluation on the grid.
pub fn sample_window(w: &WindowSpec, grid: &GridSpec) -> SampledSignal {
    w.sample(grid)
}

/// High-accuracy `⟨g, π(z) g⟩`.
pub fn ambiguity_coefficient(w: &WindowSpec, z: (f64, f64)) -> Result<Complex64> {
    w.ambiguity(z.0, z.1)
}

/// `e^{-πixω} e^{-π(x²+ω²)/2}`
pub fn gaussian_ambiguity(x: f64, omega: f64) -> Complex64 {
    cis_turns(-0.5 * x * omega) * (-FRAC_PI_2 * (x * x + omega * omega)).exp()
}

/// `πu / sinh(πu)`, continuous at 0 and safe for large `|u|`.
fn pi_over_sinh(u: f64) -> f64 {
    let a = PI * u.abs();
    if a < 1e-8 {
        1.0 - a * a / 6.0
    } else if a > 30.0 {
        2.0 * a * (-a).exp() / (1.0 - (-2.0 * a).exp())
    } else {
        a / a.sinh()
    }
}

/// `sin(πu) / (πu)`.
fn sinc(u: f64) -> f64 {
    let a = PI * u;
    if a.abs() < 1e-8 {
        1.0 - a * a / 6.0
    } else {
        a.sin() / a
    }
}

/// `e^{-πixω} π sin(πxω) / (sinh(πx) sinh(πω))` with its removable singularities filled in.
pub fn sech_ambiguity(x: f64, omega: f64) -> Complex64 {
    let mag = pi_over_sinh(x) * pi_over_sinh(omega) * sinc(x * omega);
    cis_turns(-0.5 * x * omega) * mag
}

/// Ambiguity of `e^{-|t|}`. For `x ≥ 0`, `k = 2πω`:
/// `e^{-x}[1/(2−ik) + x e^{-ikx/2} sinc(kx/2π) + e^{-ikx}/(2+ik)]`,
/// and `A(−x, ω) = e^{2πiωx} A(x, ω)`.
pub fn exp_ambiguity(x: f64, omega: f64) -> Complex64 {
    let ax = x.abs();
    let k = 2.0 * PI * omega;
    let e = (-ax).exp();
    let one = Complex64::new(1.0, 0.0);
    let left = one / Complex64::new(2.0, -k);
    let mid = cis_turns(-0.5 * omega * ax) * (ax * sinc(omega * ax));
    let right = cis_turns(-omega * ax) / Complex64::new(2.0, k);
    let v = (left + mid + right) * e;
    if x >= 0.0 {
        v
    } else {
        v * cis_turns(omega * ax)
    }
}
