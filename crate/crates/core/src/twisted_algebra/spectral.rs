use num_complex::Complex64;
use serde::Serialize;

use super::element::TwistedElement;
use crate::error::{Error, Result};
use crate::lattice::{cis_turns, Lattice2D};

/// Largest ball (in points) for which a dense matrix is formed.
pub const DENSE_POINT_CAP: usize = 4096;
/// Largest ball (in points) for the sparse compression.
pub const SPARSE_POINT_CAP: usize = 400_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundsMethod {
    RegularRep,
    DiagonalDominance,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralBounds {
    pub lower: f64,
    pub upper: f64,
    pub method: BoundsMethod,
}

/// Dense matrix of the truncated left-regular representation, rows and columns indexed by `points`.
#[derive(Clone, Debug, PartialEq)]
pub struct RepMatrix {
    pub points: Vec<Vec<i64>>,
    pub data: Vec<Complex64>,
}

impl RepMatrix {
    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n() + j]
    }

    pub fn position(&self, idx: &[i64]) -> Option<usize> {
        self.points.iter().position(|p| p == idx)
    }

    pub fn adjoint(&self) -> RepMatrix {
        let n = self.n();
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        RepMatrix {
            points: self.points.clone(),
            data,
        }
    }

    pub fn matmul(&self, other: &RepMatrix) -> RepMatrix {
        let n = self.n();
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        RepMatrix {
            points: self.points.clone(),
            data,
        }
    }
}

/// Dense lookup from lattice index to position in a point list.
struct PointIndex {
    lo: Vec<i64>,
    shape: Vec<usize>,
    slot: Vec<u32>,
}

impl PointIndex {
    fn new(lattice: &Lattice2D, radius: f64, points: &[Vec<i64>]) -> Self {
        let b = lattice.index_bounds(radius);
        let lo: Vec<i64> = b.iter().map(|v| -v).collect();
        let shape: Vec<usize> = b.iter().map(|v| (2 * v + 1) as usize).collect();
        let mut slot = vec![u32::MAX; shape.iter().product()];
        let mut out = PointIndex {
            lo,
            shape,
            slot: Vec::new(),
        };
        for (i, p) in points.iter().enumerate() {
            let o = out.offset(p).expect("enumerated point inside index bounds");
            slot[o] = i as u32;
        }
        out.slot = slot;
        out
    }

    fn offset(&self, idx: &[i64]) -> Option<usize> {
        let mut off = 0usize;
        for k in 0..self.shape.len() {
            let r = idx[k] - self.lo[k];
            if r < 0 || r >= self.shape[k] as i64 {
                return None;
            }
            off = off * self.shape[k] + r as usize;
        }
        Some(off)
    }

    fn find(&self, idx: &[i64]) -> Option<usize> {
        self.offset(idx)
            .and_then(|o| (self.slot[o] != u32::MAX).then_some(self.slot[o] as usize))
    }
}

/// Calls `f(row, col, value)` for every entry of the compression of left multiplication by `a`
/// to `ℓ²(Λ ∩ B_radius)`: entry `(i, j)` is the coefficient of `δ_{p_i}` in `a ♮ δ_{p_j}`.
fn for_each_rep_entry(
    a: &TwistedElement,
    points: &[Vec<i64>],
    radius: f64,
    mut f: impl FnMut(usize, usize, Complex64),
) {
    let lat = a.lattice();
    let d = lat.rank();
    let lookup = PointIndex::new(lat, radius, points);
    let entries: Vec<(Vec<i64>, Vec<f64>, Complex64)> = {
        let mut v = Vec::new();
        a.for_each(|i, z, c| v.push((i.to_vec(), z.to_vec(), c)));
        v
    };
    let mut target = vec![0i64; d];
    let mut zj = vec![0.0; d];
    for (j, pj) in points.iter().enumerate() {
        lat.coords_into(pj, &mut zj);
        for (mu, zmu, c) in &entries {
            for k in 0..d {
                target[k] = pj[k] + mu[k];
            }
            if let Some(i) = lookup.find(&target) {
                let t: f64 = (0..d / 2).map(|q| zmu[2 * q] * zj[2 * q + 1]).sum();
                f(i, j, *c * cis_turns(-t));
            }
        }
    }
}

fn ball_indices(lattice: &Lattice2D, radius: f64, cap: usize) -> Result<Vec<Vec<i64>>> {
    Ok(lattice
        .enumerate_points_capped(radius, cap)?
        .into_iter()
        .map(|p| p.index)
        .collect())
}

/// Dense truncated regular representation over the lattice points within `radius`.
pub fn regular_rep_matrix(a: &TwistedElement, radius: f64) -> Result<RepMatrix> {
    let points = ball_indices(a.lattice(), radius, DENSE_POINT_CAP)?;
    let n = points.len();
    let mut data = vec![Complex64::new(0.0, 0.0); n * n];
    for_each_rep_entry(a, &points, radius, |i, j, v| data[i * n + j] += v);
    Ok(RepMatrix { points, data })
}

/// Sparse (CSR) compression of left multiplication by `a` to a ball.
pub struct Compression {
    pub points: Vec<Vec<i64>>,
    row_ptr: Vec<usize>,
    col: Vec<u32>,
    val: Vec<Complex64>,
}

impl Compression {
    pub fn new(a: &TwistedElement, radius: f64) -> Result<Self> {
        let points = ball_indices(a.lattice(), radius, SPARSE_POINT_CAP)?;
        let n = points.len();
        let mut triples = Vec::with_capacity(n * a.nnz());
        for_each_rep_entry(a, &points, radius, |i, j, v| {
            triples.push((i as u32, j as u32, v))
        });
        triples.sort_unstable_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0usize; n + 1];
        for t in &triples {
            row_ptr[t.0 as usize + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let col = triples.iter().map(|t| t.1).collect();
        let val = triples.iter().map(|t| t.2).collect();
        Ok(Compression {
            points,
            row_ptr,
            col,
            val,
        })
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.val[k] * x[self.col[k] as usize];
            }
            *yi = s;
        }
    }
}

/// Number of eigenvalues of the symmetric tridiagonal matrix below `x`.
fn sturm_count(alpha: &[f64], beta: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..alpha.len() {
        let b2 = if i == 0 {
            0.0
        } else {
            beta[i - 1] * beta[i - 1]
        };
        q = alpha[i] - x - if i == 0 { 0.0 } else { b2 / q };
        if q == 0.0 {
            q = -f64::EPSILON * (x.abs() + 1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Smallest and largest eigenvalues of a symmetric tridiagonal matrix by bisection.
pub(crate) fn tridiagonal_extremes(alpha: &[f64], beta: &[f64]) -> (f64, f64) {
    let n = alpha.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { beta[i - 1].abs() } else { 0.0 }
            + if i + 1 < n { beta[i].abs() } else { 0.0 };
        lo = lo.min(alpha[i] - r);
        hi = hi.max(alpha[i] + r);
    }
    let bisect = |k: usize| {
        let (mut a, mut b) = (lo, hi);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if sturm_count(alpha, beta, m) >= k {
                b = m;
            } else {
                a = m;
            }
        }
        0.5 * (a + b)
    };
    (bisect(1), bisect(n))
}

fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Extremal eigenvalues of a Hermitian operator by Lanczos with a deterministic start vector.
///
/// Full reorthogonalisation is used up to 512 unknowns, in which case the result is exact up
/// to rounding once the Krylov space is exhausted.
pub fn lanczos_extremes(
    n: usize,
    apply: impl Fn(&[Complex64], &mut [Complex64]),
    max_iter: usize,
    rel_tol: f64,
) -> (f64, f64) {
    if n == 0 {
        return (0.0, 0.0);
    }
    let full = n <= 512;
    let mut q: Vec<Complex64> = (0..n)
        .map(|i| {
            let t = i as f64;
            Complex64::new(
                1.0 + 0.5 * (t * 0.618_033_988_749_895).fract(),
                (t * 0.414_213_562_373_095).fract() - 0.5,
            )
        })
        .collect();
    let s = norm(&q);
    q.iter_mut().for_each(|v| *v /= s);
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut q_prev = vec![Complex64::new(0.0, 0.0); n];
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut last = (f64::NAN, f64::NAN);
    let limit = if full { n } else { max_iter.min(n) };
    for k in 0..limit {
        apply(&q, &mut w);
        let a = dot(&q, &w).re;
        let b_prev = if k > 0 { beta[k - 1] } else { 0.0 };
        for i in 0..n {
            w[i] -= q[i] * a + q_prev[i] * b_prev;
        }
        if full {
            basis.push(q.clone());
            for _ in 0..2 {
                for v in &basis {
                    let c = dot(v, &w);
                    for i in 0..n {
                        w[i] -= v[i] * c;
                    }
                }
            }
        }
        alpha.push(a);
        let b = norm(&w);
        let scale = alpha
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(beta.iter().fold(0.0f64, |m, v| m.max(*v)));
        let done = b <= 1e-13 * scale.max(f64::MIN_POSITIVE) || k + 1 == limit;
        if done || (!full && k % 20 == 19) {
            let ext = tridiagonal_extremes(&alpha, &beta);
            let tol = rel_tol * scale.max(f64::MIN_POSITIVE);
            let settled = (ext.0 - last.0).abs() <= tol && (ext.1 - last.1).abs() <= tol;
            last = ext;
            if done || settled {
                return ext;
            }
        }
        beta.push(b);
        std::mem::swap(&mut q_prev, &mut q);
        for i in 0..n {
            q[i] = w[i] / b;
        }
    }
    last
}

/// `a(0) ∓ Σ_{λ≠0} |a(λ)|`.
pub fn diagonal_dominance_bounds(a: &TwistedElement) -> SpectralBounds {
    let a0 = a.get(&vec![0; a.lattice().rank()]).re;
    let off = a.l1() - a0.abs();
    SpectralBounds {
        lower: a0 - off,
        upper: a0 + off,
        method: BoundsMethod::DiagonalDominance,
    }
}

/// Extremal eigenvalues of the compression of a self-adjoint element to the ball of `radius`.
///
/// The compression's extremes lie inside the true spectral range, so `lower` is an upper
/// estimate of the spectral minimum that becomes sharp as `radius` grows. Falls back to the
/// diagonal-dominance bounds if the ball is too large.
pub fn spectral_bounds(a: &TwistedElement, radius: f64) -> Result<SpectralBounds> {
    spectral_bounds_with(a, radius, 4000, 1e-12)
}

/// [`spectral_bounds`] with an explicit Lanczos budget and relative stopping tolerance.
pub fn spectral_bounds_with(
    a: &TwistedElement,
    radius: f64,
    max_iter: usize,
    rel_tol: f64,
) -> Result<SpectralBounds> {
    let residual = a.self_adjoint_residual();
    if residual > 1e-10 * a.l1().max(1.0) {
        return Err(Error::NotSelfAdjoint { residual });
    }
    match Compression::new(a, radius) {
        Ok(m) => {
            let (lower, upper) = lanczos_extremes(m.n(), |x, y| m.apply(x, y), max_iter, rel_tol);
            Ok(SpectralBounds {
                lower,
                upper: upper.max(lower),
                method: BoundsMethod::RegularRep,
            })
        }
        Err(Error::RadiusTooLarge { .. }) => Ok(diagonal_dominance_bounds(a)),
        Err(e) => Err(e),
    }
}
