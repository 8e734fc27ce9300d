use serde::Serialize;

use crate::error::{Error, Result};
use crate::twisted_algebra::TwistedElement;

/// Minimum support radius for a decay fit.
pub const MIN_FIT_RADIUS: f64 = 8.0;

/// Log-log slopes steeper than this count as superpolynomial.
pub const STEEP_SLOPE: f64 = 6.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum DecayClass {
    /// `model` is `"exponential"` when a log-linear law fits best, `"steep_power"` otherwise.
    Superpolynomial {
        model: String,
        rate: f64,
    },
    Polynomial {
        order: f64,
    },
}

impl DecayClass {
    pub fn is_superpolynomial(&self) -> bool {
        matches!(self, DecayClass::Superpolynomial { .. })
    }

    pub fn polynomial_order(&self) -> Option<f64> {
        match self {
            DecayClass::Polynomial { order } => Some(*order),
            _ => None,
        }
    }
}

/// Fits of `log|p|` along one index axis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxisFit {
    #[serde(flatten)]
    pub class: DecayClass,
    pub points: usize,
    /// Slope of `log|p|` against `log|λ|`, and the residual sum of squares.
    pub loglog_slope: f64,
    pub loglog_rss: f64,
    /// Slope of `log|p|` against `|λ|`, and the residual sum of squares.
    pub loglin_slope: f64,
    pub loglin_rss: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayProfile {
    /// Along the first index axis (time for separable lattices).
    pub time: AxisFit,
    /// Along the second index axis (frequency for separable lattices).
    pub frequency: AxisFit,
}

/// Least-squares line `y ≈ a + b x`; returns `(b, rss)`.
fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let b = sxy / sxx;
    let rss = x
        .iter()
        .zip(y)
        .map(|(a, v)| {
            let r = v - (my + b * (a - mx));
            r * r
        })
        .sum();
    (b, rss)
}

fn classify(dist: &[f64], mag: &[f64]) -> Result<AxisFit> {
    if dist.len() < 3 {
        return Err(Error::InsufficientSupport(format!(
            "{} usable coefficients along an axis, need at least 3",
            dist.len()
        )));
    }
    let y: Vec<f64> = mag.iter().map(|m| m.ln()).collect();
    let logx: Vec<f64> = dist.iter().map(|d| d.ln()).collect();
    let (loglog_slope, loglog_rss) = line_fit(&logx, &y);
    let (loglin_slope, loglin_rss) = line_fit(dist, &y);
    let class = if loglin_rss < loglog_rss {
        DecayClass::Superpolynomial {
            model: "exponential".into(),
            rate: -loglin_slope,
        }
    } else if loglog_slope.abs() > STEEP_SLOPE {
        DecayClass::Superpolynomial {
            model: "steep_power".into(),
            rate: -loglog_slope,
        }
    } else {
        DecayClass::Polynomial {
            order: -loglog_slope,
        }
    };
    Ok(AxisFit {
        class,
        points: dist.len(),
        loglog_slope,
        loglog_rss,
        loglin_slope,
        loglin_rss,
    })
}

/// Coefficients smaller than every neighbour by this factor are isolated zeros and skipped.
const DIP_RATIO: f64 = 1e-3;

/// Distances along one index axis and the tail supremum `sup_{j ≥ k} |p(j)|` at each of them,
/// isolated zeros excluded.
fn axis_samples(p: &TwistedElement, axis: usize) -> (Vec<f64>, Vec<f64>) {
    let d = p.lattice().rank();
    let peak = p.entries().iter().fold(0.0f64, |m, (_, v)| m.max(v.norm()));
    let floor = 1e-15 * peak;
    let mut dist = Vec::new();
    let mut mag = Vec::new();
    let mut idx = vec![0i64; d];
    for k in 1.. {
        idx[axis] = k;
        let pt = p.lattice().point(&idx);
        if pt.norm() > p.radius() + 1e-9 {
            break;
        }
        dist.push(pt.norm());
        mag.push(p.get(&idx).norm());
    }
    let n = mag.len();
    let dip = |k: usize| {
        let left = (k > 0).then(|| mag[k - 1]);
        let right = (k + 1 < n).then(|| mag[k + 1]);
        let neighbours = [left, right];
        let mut present = neighbours.iter().flatten().peekable();
        present.peek().is_some() && present.all(|&m| mag[k] < DIP_RATIO * m)
    };
    let kept: Vec<(f64, f64)> = (0..n)
        .filter(|&k| !dip(k))
        .map(|k| (dist[k], mag[k]))
        .collect();
    let mut env: Vec<f64> = kept.iter().map(|&(_, m)| m).collect();
    for k in (0..env.len().saturating_sub(1)).rev() {
        env[k] = env[k].max(env[k + 1]);
    }
    kept.iter()
        .zip(env)
        .filter(|&(_, m)| m > floor)
        .map(|(&(d, _), m)| (d, m))
        .unzip()
}

/// Classifies the coefficient decay of `p` along its first two index axes.
pub fn decay_profile(p: &TwistedElement) -> Result<DecayProfile> {
    let r = p.radius().min(p.support_radius());
    if r < MIN_FIT_RADIUS {
        return Err(Error::InsufficientSupport(format!(
            "support radius {r} is below {MIN_FIT_RADIUS}"
        )));
    }
    let (tx, ty) = axis_samples(p, 0);
    let (fx, fy) = axis_samples(p, 1);
    Ok(DecayProfile {
        time: classify(&tx, &ty)?,
        frequency: classify(&fx, &fy)?,
    })
}
