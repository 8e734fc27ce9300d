use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{cis_turns, Lattice2D, LatticePoint};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Which algebra an element belongs to: the primal lattice or its adjoint.
///
/// Both sides use the same numeric cocycle `c(z,z') = e^{-2πi x·η}`; the side only
/// changes the trace normalisation and which module action applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "c")]
    Primal,
    #[serde(rename = "c_bar")]
    Adjoint,
}

/// A finitely supported coefficient map on a lattice, stored densely on its index box.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistedElement {
    lattice: Lattice2D,
    side: Side,
    radius: f64,
    lo: Vec<i64>,
    shape: Vec<usize>,
    data: Vec<Complex64>,
}

fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; shape.len()];
    for k in (0..shape.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * shape[k + 1];
    }
    s
}

fn unflatten(mut off: usize, lo: &[i64], shape: &[usize], out: &mut [i64]) {
    for k in (0..shape.len()).rev() {
        out[k] = lo[k] + (off % shape[k]) as i64;
        off /= shape[k];
    }
}

impl TwistedElement {
    pub fn zero(lattice: &Lattice2D, side: Side) -> Self {
        let d = lattice.rank();
        TwistedElement {
            lattice: lattice.clone(),
            side,
            radius: 0.0,
            lo: vec![0; d],
            shape: vec![0; d],
            data: Vec::new(),
        }
    }

    /// Unit coefficient at `idx`; `delta(0)` is the identity.
    pub fn delta(lattice: &Lattice2D, side: Side, idx: &[i64]) -> Result<Self> {
        Self::from_entries(lattice, side, [(idx.to_vec(), Complex64::new(1.0, 0.0))])
    }

    pub fn identity(lattice: &Lattice2D, side: Side) -> Self {
        Self::delta(lattice, side, &vec![0; lattice.rank()]).expect("origin is a valid index")
    }

    /// Builds an element from explicit entries; repeated indices are summed.
    pub fn from_entries(
        lattice: &Lattice2D,
        side: Side,
        entries: impl IntoIterator<Item = (Vec<i64>, Complex64)>,
    ) -> Result<Self> {
        let d = lattice.rank();
        let entries: Vec<(Vec<i64>, Complex64)> = entries.into_iter().collect();
        if entries.iter().any(|(i, _)| i.len() != d) {
            return Err(Error::InvalidInput(format!("index length must be {d}")));
        }
        if entries.is_empty() {
            return Ok(Self::zero(lattice, side));
        }
        let mut lo = vec![i64::MAX; d];
        let mut hi = vec![i64::MIN; d];
        for (idx, _) in &entries {
            for k in 0..d {
                lo[k] = lo[k].min(idx[k]);
                hi[k] = hi[k].max(idx[k]);
            }
        }
        let shape: Vec<usize> = (0..d).map(|k| (hi[k] - lo[k] + 1) as usize).collect();
        let mut out = TwistedElement {
            lattice: lattice.clone(),
            side,
            radius: 0.0,
            data: vec![ZERO; shape.iter().product()],
            lo,
            shape,
        };
        for (idx, v) in entries {
            let off = out.offset(&idx).expect("index inside its own bounding box");
            out.data[off] += v;
        }
        out.radius = out.support_radius();
        Ok(out)
    }

    /// Coefficients `f(λ)` for every lattice point within `radius`.
    pub fn from_points(
        lattice: &Lattice2D,
        side: Side,
        radius: f64,
        f: impl Fn(&LatticePoint) -> Result<Complex64> + Sync,
    ) -> Result<Self> {
        let pts = lattice.enumerate_points(radius)?;
        let vals: Vec<Complex64> = pts.par_iter().map(&f).collect::<Result<_>>()?;
        let mut out =
            Self::from_entries(lattice, side, pts.into_iter().map(|p| p.index).zip(vals))?;
        out.radius = radius;
        Ok(out)
    }

    pub fn lattice(&self) -> &Lattice2D {
        &self.lattice
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// Recorded truncation radius.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }

    pub fn box_lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn box_shape(&self) -> &[usize] {
        &self.shape
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
        (!self.data.is_empty()).then_some(off)
    }

    pub fn get(&self, idx: &[i64]) -> Complex64 {
        self.offset(idx).map_or(ZERO, |o| self.data[o])
    }

    /// Calls `f(index, coords, value)` for every nonzero coefficient in lexicographic order.
    pub fn for_each(&self, mut f: impl FnMut(&[i64], &[f64], Complex64)) {
        let d = self.lattice.rank();
        let mut idx = vec![0i64; d];
        let mut z = vec![0.0; d];
        for (off, &v) in self.data.iter().enumerate() {
            if v != ZERO {
                unflatten(off, &self.lo, &self.shape, &mut idx);
                self.lattice.coords_into(&idx, &mut z);
                f(&idx, &z, v);
            }
        }
    }

    /// Nonzero entries in lexicographic index order.
    pub fn entries(&self) -> Vec<(Vec<i64>, Complex64)> {
        let mut out = Vec::with_capacity(self.nnz());
        self.for_each(|i, _, v| out.push((i.to_vec(), v)));
        out
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|v| **v != ZERO).count()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| *v == ZERO)
    }

    /// Largest Euclidean norm of a point carrying a nonzero coefficient.
    pub fn support_radius(&self) -> f64 {
        let mut r: f64 = 0.0;
        self.for_each(|_, z, _| r = r.max(z.iter().map(|c| c * c).sum::<f64>().sqrt()));
        r
    }

    pub fn l1(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).sum()
    }

    /// `Σ |a(λ)| (1 + |λ|²)^{s/2}`.
    pub fn l1s(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        self.for_each(|_, z, v| {
            let r2: f64 = z.iter().map(|c| c * c).sum();
            acc += v.norm() * (1.0 + r2).powf(s / 2.0);
        });
        acc
    }

    /// `a(0)` on the primal side, `vol(Λ)^{-1} a(0)` on the adjoint side.
    ///
    /// An adjoint-side element stores `Λ°` as its lattice and `vol(Λ)^{-1} = vol(Λ°)`.
    pub fn trace(&self) -> Complex64 {
        let a0 = self.get(&vec![0; self.lattice.rank()]);
        match self.side {
            Side::Primal => a0,
            Side::Adjoint => a0 * self.lattice.volume(),
        }
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= s);
        out
    }

    pub fn scaled_re(&self, s: f64) -> Self {
        self.scaled(Complex64::new(s, 0.0))
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.side != other.side || self.lattice != other.lattice {
            return Err(Error::LatticeMismatch);
        }
        Ok(())
    }

    /// `α·self + β·other`.
    pub fn lincomb(&self, alpha: Complex64, other: &Self, beta: Complex64) -> Result<Self> {
        self.check_compatible(other)?;
        let d = self.lattice.rank();
        if self.data.is_empty() {
            return Ok(other.scaled(beta));
        }
        if other.data.is_empty() {
            return Ok(self.scaled(alpha));
        }
        let lo: Vec<i64> = (0..d).map(|k| self.lo[k].min(other.lo[k])).collect();
        let shape: Vec<usize> = (0..d)
            .map(|k| {
                let hi =
                    (self.lo[k] + self.shape[k] as i64).max(other.lo[k] + other.shape[k] as i64);
                (hi - lo[k]) as usize
            })
            .collect();
        let mut out = TwistedElement {
            lattice: self.lattice.clone(),
            side: self.side,
            radius: self.radius.max(other.radius),
            data: vec![ZERO; shape.iter().product()],
            lo,
            shape,
        };
        for (src, w) in [(self, alpha), (other, beta)] {
            let mut idx = vec![0i64; d];
            for (off, &v) in src.data.iter().enumerate() {
                if v != ZERO {
                    unflatten(off, &src.lo, &src.shape, &mut idx);
                    let o = out.offset(&idx).expect("union box contains both boxes");
                    out.data[o] += w * v;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.lincomb(Complex64::new(1.0, 0.0), other, Complex64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.lincomb(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
    }

    /// `‖self − other‖_{ℓ¹}`.
    pub fn distance_l1(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.l1())
    }

    /// `a*(λ) = c(λ,λ) conj(a(−λ))`, the coefficient sequence of `π(a)*`.
    pub fn involute(&self) -> Self {
        let d = self.lattice.rank();
        if self.data.is_empty() {
            return self.clone();
        }
        let lo: Vec<i64> = (0..d)
            .map(|k| -(self.lo[k] + self.shape[k] as i64 - 1))
            .collect();
        let mut out = TwistedElement {
            lattice: self.lattice.clone(),
            side: self.side,
            radius: self.radius,
            data: vec![ZERO; self.data.len()],
            lo,
            shape: self.shape.clone(),
        };
        let mut neg = vec![0i64; d];
        let mut z = vec![0.0; d];
        for (off, &v) in self.data.iter().enumerate() {
            if v == ZERO {
                continue;
            }
            unflatten(off, &self.lo, &self.shape, &mut neg);
            neg.iter_mut().for_each(|k| *k = -*k);
            self.lattice.coords_into(&neg, &mut z);
            let xw: f64 = (0..d / 2).map(|i| z[2 * i] * z[2 * i + 1]).sum();
            let o = out.offset(&neg).expect("reflected box");
            out.data[o] = cis_turns(-xw) * v.conj();
        }
        out
    }

    /// `‖a − a*‖_{ℓ¹}`.
    pub fn self_adjoint_residual(&self) -> f64 {
        self.distance_l1(&self.involute()).expect("same lattice")
    }

    /// `(a + a*) / 2`.
    pub fn symmetrized(&self) -> Self {
        let half = Complex64::new(0.5, 0.0);
        self.lincomb(half, &self.involute(), half)
            .expect("same lattice")
    }

    /// Drops coefficients below `rel · ‖a‖_{ℓ¹}` and outside `max_radius`, then shrinks the box.
    pub fn truncated(&self, rel: f64, max_radius: Option<f64>) -> Self {
        let thr = rel * self.l1();
        let r2max = max_radius.map(|r| r * r * (1.0 + 1e-12));
        let mut entries = Vec::new();
        self.for_each(|i, z, v| {
            let keep_r = r2max.is_none_or(|m| z.iter().map(|c| c * c).sum::<f64>() <= m);
            if keep_r && v.norm() >= thr {
                entries.push((i.to_vec(), v));
            }
        });
        let mut out = Self::from_entries(&self.lattice, self.side, entries).expect("valid indices");
        out.radius = match max_radius {
            Some(r) => self.radius.min(r).max(out.radius),
            None => self.radius.max(out.radius),
        };
        out
    }

    /// Restriction to the closed ball of the given radius.
    pub fn restricted(&self, radius: f64) -> Self {
        let mut out = self.truncated(0.0, Some(radius));
        out.radius = radius;
        out
    }

    /// Twisted convolution `(a♮b)(λ) = Σ_μ a(μ) b(λ−μ) c(μ, λ−μ)`.
    pub fn tconv(&self, other: &Self) -> Result<Self> {
        self.tconv_within(other, None)
    }

    /// Twisted convolution evaluated only at output points within `max_radius`.
    pub fn tconv_within(&self, other: &Self, max_radius: Option<f64>) -> Result<Self> {
        self.check_compatible(other)?;
        let d = self.lattice.rank();
        let radius = match max_radius {
            Some(r) => (self.radius + other.radius).min(r),
            None => self.radius + other.radius,
        };
        if self.data.is_empty() || other.data.is_empty() {
            return Ok(Self::zero(&self.lattice, self.side).with_radius(radius));
        }
        let mut lo: Vec<i64> = (0..d).map(|k| self.lo[k] + other.lo[k]).collect();
        let mut hi: Vec<i64> = (0..d)
            .map(|k| self.lo[k] + other.lo[k] + (self.shape[k] + other.shape[k]) as i64 - 2)
            .collect();
        if let Some(r) = max_radius {
            let b = self.lattice.index_bounds(r);
            for k in 0..d {
                lo[k] = lo[k].max(-b[k]);
                hi[k] = hi[k].min(b[k]);
                if hi[k] < lo[k] {
                    return Ok(Self::zero(&self.lattice, self.side).with_radius(radius));
                }
            }
        }
        let shape: Vec<usize> = (0..d).map(|k| (hi[k] - lo[k] + 1) as usize).collect();
        let data = tconv_kernel(self, other, &lo, &shape, max_radius);
        let mut out = TwistedElement {
            lattice: self.lattice.clone(),
            side: self.side,
            radius,
            lo,
            shape,
            data,
        };
        if max_radius.is_some() {
            out = out.truncated(0.0, None).with_radius(radius);
        }
        Ok(out)
    }

    /// Coefficient-wise tensor product on the product lattice.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.side != other.side {
            return Err(Error::LatticeMismatch);
        }
        let lattice = self.lattice.product(&other.lattice);
        let mut entries = Vec::with_capacity(self.nnz() * other.nnz());
        let b = other.entries();
        self.for_each(|i, _, v| {
            for (j, w) in &b {
                let mut idx = i.to_vec();
                idx.extend_from_slice(j);
                entries.push((idx, v * w));
            }
        });
        let mut out = Self::from_entries(&lattice, self.side, entries)?;
        out.radius = (self.radius * self.radius + other.radius * other.radius).sqrt();
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct CoeffJson {
    index: Vec<i64>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct ElementJson {
    lattice: Vec<[[f64; 2]; 2]>,
    cocycle_sign: Side,
    radius: f64,
    coeffs: Vec<CoeffJson>,
}

impl TwistedElement {
    /// JSON with the lattice basis, cocycle sign, recorded radius and nonzero coefficients.
    pub fn to_json(&self) -> String {
        let doc = ElementJson {
            lattice: self.lattice.blocks().to_vec(),
            cocycle_sign: self.side,
            radius: self.radius,
            coeffs: self
                .entries()
                .into_iter()
                .map(|(index, v)| CoeffJson {
                    index,
                    re: v.re,
                    im: v.im,
                })
                .collect(),
        };
        crate::format::to_json_string(&doc)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ElementJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("element JSON: {e}")))?;
        let lattice = Lattice2D::new(doc.lattice)?;
        let entries = doc
            .coeffs
            .into_iter()
            .map(|c| (c.index, Complex64::new(c.re, c.im)));
        let mut out = Self::from_entries(&lattice, doc.cocycle_sign, entries)?;
        if !doc.radius.is_finite() || doc.radius < 0.0 {
            return Err(Error::Parse(
                "element radius must be finite and non-negative".into(),
            ));
        }
        out.radius = doc.radius;
        Ok(out)
    }
}

/// Output-major twisted convolution kernel.
///
/// With `c(μ, λ−μ) = e^{-2πi x_μ·η_λ} e^{2πi x_μ·η_μ}` the second factor is folded into
/// `a`, and the first factorises over index coordinates, so it is tabulated once per output.
fn tconv_kernel(
    a: &TwistedElement,
    b: &TwistedElement,
    lo: &[i64],
    shape: &[usize],
    max_radius: Option<f64>,
) -> Vec<Complex64> {
    let lat = &a.lattice;
    let d = lat.rank();
    let blocks = lat.blocks();
    let a_str = strides(&a.shape);
    let b_str = strides(&b.shape);
    let a_hi: Vec<i64> = (0..d).map(|k| a.lo[k] + a.shape[k] as i64 - 1).collect();
    let b_hi: Vec<i64> = (0..d).map(|k| b.lo[k] + b.shape[k] as i64 - 1).collect();

    // a(μ) e^{2πi x_μ·η_μ}
    let mut a_s = a.data.clone();
    {
        let mut idx = vec![0i64; d];
        let mut z = vec![0.0; d];
        for (off, v) in a_s.iter_mut().enumerate() {
            if *v != ZERO {
                unflatten(off, &a.lo, &a.shape, &mut idx);
                lat.coords_into(&idx, &mut z);
                let xw: f64 = (0..d / 2).map(|i| z[2 * i] * z[2 * i + 1]).sum();
                *v *= cis_turns(xw);
            }
        }
    }
    let row = shape[d - 1];
    let total: usize = shape.iter().product();
    let r2max = max_radius.map(|r| r * r * (1.0 + 1e-12));
    let mut out = vec![ZERO; total];
    out.par_chunks_mut(row).enumerate().for_each(|(r, chunk)| {
        let mut lam = vec![0i64; d];
        let mut z = vec![0.0; d];
        let mut ranges = vec![(0i64, 0i64); d];
        let mut tables: Vec<Vec<Complex64>> =
            (0..d).map(|k| Vec::with_capacity(a.shape[k])).collect();
        for (c, slot) in chunk.iter_mut().enumerate() {
            unflatten(r * row + c, lo, shape, &mut lam);
            lat.coords_into(&lam, &mut z);
            if let Some(m) = r2max {
                if z.iter().map(|v| v * v).sum::<f64>() > m {
                    continue;
                }
            }
            let mut empty = false;
            for k in 0..d {
                let l = a.lo[k].max(lam[k] - b_hi[k]);
                let h = a_hi[k].min(lam[k] - b.lo[k]);
                if h < l {
                    empty = true;
                    break;
                }
                ranges[k] = (l, h);
            }
            if empty {
                continue;
            }
            for k in 0..d {
                let blk = &blocks[k / 2];
                let eta = z[(k / 2) * 2 + 1];
                let coef = eta * blk[0][k % 2];
                let t = &mut tables[k];
                t.clear();
                let (l, h) = ranges[k];
                if coef == 0.0 {
                    t.resize((h - l + 1) as usize, Complex64::new(1.0, 0.0));
                } else {
                    t.extend((l..=h).map(|m| cis_turns(-coef * m as f64)));
                }
            }
            let a_off: usize = (0..d)
                .map(|k| (ranges[k].0 - a.lo[k]) as usize * a_str[k])
                .sum();
            let b_off: usize = (0..d)
                .map(|k| (lam[k] - ranges[k].0 - b.lo[k]) as usize * b_str[k])
                .sum();
            *slot = accumulate(
                0, &ranges, &tables, &a_s, &a_str, &b.data, &b_str, a_off, b_off,
            );
        }
    });
    out
}

#[allow(clippy::too_many_arguments)]
fn accumulate(
    k: usize,
    ranges: &[(i64, i64)],
    tables: &[Vec<Complex64>],
    a: &[Complex64],
    a_str: &[usize],
    b: &[Complex64],
    b_str: &[usize],
    a_off: usize,
    b_off: usize,
) -> Complex64 {
    let (l, h) = ranges[k];
    let n = (h - l + 1) as usize;
    let t = &tables[k];
    let mut s = ZERO;
    if k + 1 == ranges.len() {
        for j in 0..n {
            let av = a[a_off + j * a_str[k]];
            if av != ZERO {
                s += av * b[b_off - j * b_str[k]] * t[j];
            }
        }
    } else {
        for j in 0..n {
            let inner = accumulate(
                k + 1,
                ranges,
                tables,
                a,
                a_str,
                b,
                b_str,
                a_off + j * a_str[k],
                b_off - j * b_str[k],
            );
            if inner != ZERO {
                s += inner * t[j];
            }
        }
    }
    s
}

/// Free-function forms of the element methods.
pub fn delta(lattice: &Lattice2D, side: Side, idx: &[i64]) -> Result<TwistedElement> {
    TwistedElement::delta(lattice, side, idx)
}

pub fn tconv(a: &TwistedElement, b: &TwistedElement) -> Result<TwistedElement> {
    a.tconv(b)
}

pub fn involute(a: &TwistedElement) -> TwistedElement {
    a.involute()
}

pub fn l1s_norm(a: &TwistedElement, s: f64) -> f64 {
    a.l1s(s)
}

pub fn trace(a: &TwistedElement) -> Complex64 {
    a.trace()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::cocycle;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Direct definition of the twisted convolution over explicit entries.
    fn naive_tconv(a: &TwistedElement, b: &TwistedElement) -> TwistedElement {
        let lat = a.lattice();
        let mut entries = Vec::new();
        for (mi, mv) in a.entries() {
            for (ni, nv) in b.entries() {
                let lam: Vec<i64> = mi.iter().zip(&ni).map(|(x, y)| x + y).collect();
                let ph = cocycle(&lat.coords(&mi), &lat.coords(&ni));
                entries.push((lam, mv * nv * ph));
            }
        }
        TwistedElement::from_entries(lat, a.side(), entries).unwrap()
    }

    fn random_element(
        lat: &Lattice2D,
        side: Side,
        seed: &[(i64, i64, f64, f64)],
    ) -> TwistedElement {
        TwistedElement::from_entries(
            lat,
            side,
            seed.iter().map(|&(m, n, re, im)| (vec![m, n], c(re, im))),
        )
        .unwrap()
    }

    #[test]
    fn generators_satisfy_rotation_relation() {
        let theta: f64 = 0.37;
        let lat = Lattice2D::rotation(theta).unwrap();
        let u1 = TwistedElement::delta(&lat, Side::Primal, &[1, 0]).unwrap();
        let u2 = TwistedElement::delta(&lat, Side::Primal, &[0, 1]).unwrap();
        let u1u2 = u1.tconv(&u2).unwrap();
        let u2u1 = u2.tconv(&u1).unwrap();
        assert!((u2u1.get(&[1, 1]) - c(1.0, 0.0)).norm() < 1e-15);
        let expect = Complex64::from_polar(1.0, -2.0 * PI * theta);
        assert!((u1u2.get(&[1, 1]) - expect).norm() < 1e-14);
        // U_2 U_1 = e^{2πiθ} U_1 U_2
        let lhs = u2u1.get(&[1, 1]);
        let rhs = Complex64::from_polar(1.0, 2.0 * PI * theta) * u1u2.get(&[1, 1]);
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn identity_and_trace() {
        let lat = Lattice2D::rotation(0.5).unwrap();
        let one = TwistedElement::identity(&lat, Side::Primal);
        assert_eq!(one.trace(), c(1.0, 0.0));
        let a = random_element(&lat, Side::Primal, &[(1, -2, 0.3, 0.1), (0, 1, -0.7, 0.2)]);
        assert!(one.tconv(&a).unwrap().distance_l1(&a).unwrap() < 1e-15);
        assert!(a.tconv(&one).unwrap().distance_l1(&a).unwrap() < 1e-15);
        assert_eq!(one.involute(), one);
        let adj = lat.adjoint();
        let adj_one = TwistedElement::identity(&adj, Side::Adjoint);
        assert!((adj_one.trace() - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn weighted_norms() {
        let lat = Lattice2D::rotation(1.0).unwrap();
        let e = TwistedElement::delta(&lat, Side::Primal, &[1, 0]).unwrap();
        assert!((e.l1s(2.0) - 2.0).abs() < 1e-15);
        assert_eq!(TwistedElement::identity(&lat, Side::Primal).l1s(3.5), 1.0);
    }

    #[test]
    fn mismatched_lattices_are_rejected() {
        let a = TwistedElement::identity(&Lattice2D::rotation(0.5).unwrap(), Side::Primal);
        let b = TwistedElement::identity(&Lattice2D::rotation(0.75).unwrap(), Side::Primal);
        assert_eq!(a.tconv(&b), Err(Error::LatticeMismatch));
        let b = TwistedElement::identity(&Lattice2D::rotation(0.5).unwrap(), Side::Adjoint);
        assert_eq!(a.tconv(&b), Err(Error::LatticeMismatch));
    }

    #[test]
    fn restricted_output_matches_full_product() {
        let lat = Lattice2D::new(vec![[[1.0, 0.2], [-0.1, 0.7]]]).unwrap();
        let a = random_element(
            &lat,
            Side::Primal,
            &[(2, -1, 0.3, 0.1), (0, 1, -0.7, 0.2), (-1, -1, 0.5, 0.5)],
        );
        let b = random_element(
            &lat,
            Side::Primal,
            &[(1, 3, 0.2, -0.4), (0, 0, 1.0, 0.0), (-2, 2, 0.1, 0.9)],
        );
        let full = a.tconv(&b).unwrap().restricted(2.0);
        let part = a.tconv_within(&b, Some(2.0)).unwrap();
        assert!(full.distance_l1(&part).unwrap() < 1e-15);
    }

    #[test]
    fn tensor_product_multiplies_factorwise() {
        let l1 = Lattice2D::rotation(0.5).unwrap();
        let l2 = Lattice2D::rotation(0.8).unwrap();
        let a = random_element(&l1, Side::Primal, &[(1, 0, 0.3, 0.1), (0, 1, -0.7, 0.2)]);
        let b = random_element(&l2, Side::Primal, &[(0, 1, 0.2, -0.4), (-1, 0, 1.0, 0.5)]);
        let ab = a.tensor(&b).unwrap();
        let sq = ab.tconv(&ab).unwrap();
        let expect = a.tconv(&a).unwrap().tensor(&b.tconv(&b).unwrap()).unwrap();
        assert!(sq.distance_l1(&expect).unwrap() < 1e-14);
        assert!(
            ab.involute()
                .distance_l1(&a.involute().tensor(&b.involute()).unwrap())
                .unwrap()
                < 1e-14
        );
    }

    #[test]
    fn json_round_trip_is_exact() {
        let lat = Lattice2D::new(vec![[[1.0, 0.1], [0.0, 1.0 / 3.0]]]).unwrap();
        let a = random_element(
            &lat,
            Side::Adjoint,
            &[(1, -2, 0.1 + 0.2, 1e-300), (0, 0, -1.0 / 7.0, 0.0)],
        );
        let back = TwistedElement::from_json(&a.to_json()).unwrap();
        assert_eq!(back, a);
        assert_eq!(back.to_json(), a.to_json());
        assert!(matches!(
            TwistedElement::from_json("{\"lattice\": 3}"),
            Err(Error::Parse(_))
        ));
    }

    fn entry_strategy() -> impl Strategy<Value = Vec<(i64, i64, f64, f64)>> {
        prop::collection::vec((-3i64..=3, -3i64..=3, -1.0f64..1.0, -1.0f64..1.0), 1..8)
    }

    fn lattice_strategy() -> impl Strategy<Value = Lattice2D> {
        (0.4f64..1.6, -0.5f64..0.5, -0.5f64..0.5, 0.4f64..1.6)
            .prop_filter("full rank", |(a, b, c, d)| (a * d - b * c).abs() > 0.1)
            .prop_map(|(a, b, c, d)| Lattice2D::new(vec![[[a, b], [c, d]]]).unwrap())
    }

    proptest! {
        #[test]
        fn kernel_matches_definition(lat in lattice_strategy(), ea in entry_strategy(), eb in entry_strategy()) {
            let a = random_element(&lat, Side::Primal, &ea);
            let b = random_element(&lat, Side::Primal, &eb);
            let fast = a.tconv(&b).unwrap();
            let slow = naive_tconv(&a, &b);
            prop_assert!(fast.distance_l1(&slow).unwrap() < 1e-12);
        }

        #[test]
        fn associativity(lat in lattice_strategy(), ea in entry_strategy(), eb in entry_strategy(), ec in entry_strategy()) {
            // unit ℓ¹ norm, so the bound is relative to ‖a‖‖b‖‖c‖
            let unit = |e: &[(i64, i64, f64, f64)]| {
                let x = random_element(&lat, Side::Primal, e);
                x.scaled_re(1.0 / x.l1().max(1e-300))
            };
            let (a, b, cc) = (unit(&ea), unit(&eb), unit(&ec));
            let left = a.tconv(&b).unwrap().tconv(&cc).unwrap();
            let right = a.tconv(&b.tconv(&cc).unwrap()).unwrap();
            prop_assert!(left.distance_l1(&right).unwrap() <= 1e-12);
        }

        #[test]
        fn involution_is_antimultiplicative(lat in lattice_strategy(), ea in entry_strategy(), eb in entry_strategy()) {
            let a = random_element(&lat, Side::Adjoint, &ea);
            let b = random_element(&lat, Side::Adjoint, &eb);
            let lhs = a.tconv(&b).unwrap().involute();
            let rhs = b.involute().tconv(&a.involute()).unwrap();
            prop_assert!(lhs.distance_l1(&rhs).unwrap() <= 1e-12);
            prop_assert!(a.involute().involute().distance_l1(&a).unwrap() <= 1e-14);
        }

        #[test]
        fn trace_is_central(lat in lattice_strategy(), ea in entry_strategy(), eb in entry_strategy()) {
            let a = random_element(&lat, Side::Primal, &ea);
            let b = random_element(&lat, Side::Primal, &eb);
            let t1 = a.tconv(&b).unwrap().trace();
            let t2 = b.tconv(&a).unwrap().trace();
            prop_assert!((t1 - t2).norm() <= 1e-12);
        }

        #[test]
        fn l1_is_submultiplicative(lat in lattice_strategy(), ea in entry_strategy(), eb in entry_strategy()) {
            let a = random_element(&lat, Side::Primal, &ea);
            let b = random_element(&lat, Side::Primal, &eb);
            prop_assert!(a.tconv(&b).unwrap().l1() <= a.l1() * b.l1() * (1.0 + 1e-12));
        }

        #[test]
        fn symmetrized_is_self_adjoint(lat in lattice_strategy(), ea in entry_strategy()) {
            let a = random_element(&lat, Side::Primal, &ea).symmetrized();
            prop_assert!(a.self_adjoint_residual() < 1e-14);
            // conj(a(λ)) = conj(c(λ,λ)) a(−λ)
            for (idx, v) in a.entries() {
                let neg: Vec<i64> = idx.iter().map(|k| -k).collect();
                let z = lat.coords(&idx);
                let cc = cocycle(&z, &z);
                prop_assert!((v.conj() - cc.conj() * a.get(&neg)).norm() < 1e-14);
            }
        }
    }
}
