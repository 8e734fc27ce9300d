//! Phase-space lattices.
//!
//! A lattice is stored as a list of independent 2×2 blocks. Each block acts on
//! one (time, frequency) pair, and the columns of a block are its generators.
//! Coordinates of a point are laid out as `[x_1, ω_1, x_2, ω_2, ...]`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Row-major 2×2 basis block; column `j` is the j-th generator.
pub type Block = [[f64; 2]; 2];

/// Default cap on the number of points returned by [`Lattice2D::enumerate_points`].
pub const DEFAULT_POINT_CAP: usize = 1_000_000;

const SINGULAR_DET: f64 = 1e-12;

/// A full-rank lattice in phase space, possibly a separable product of 2-d blocks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lattice2D {
    blocks: Vec<Block>,
}

/// A lattice point with its integer index and phase-space coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticePoint {
    pub index: Vec<i64>,
    pub coords: Vec<f64>,
}

impl LatticePoint {
    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

fn det(b: &Block) -> f64 {
    b[0][0] * b[1][1] - b[0][1] * b[1][0]
}

impl Lattice2D {
    /// Builds a lattice from one basis block per time-frequency pair.
    pub fn new(blocks: Vec<Block>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidInput(
                "lattice needs at least one block".into(),
            ));
        }
        for b in &blocks {
            if b.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput("non-finite basis entry".into()));
            }
            let d = det(b);
            if d.abs() < SINGULAR_DET {
                return Err(Error::SingularBasis { det: d });
            }
        }
        Ok(Lattice2D { blocks })
    }

    /// `αZ × βZ` in one block.
    pub fn separable(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(vec![[[alpha, 0.0], [0.0, beta]]])
    }

    /// `Z × θZ`.
    pub fn rotation(theta: f64) -> Result<Self> {
        Self::separable(1.0, theta)
    }

    /// Product of separable blocks `α_i Z × β_i Z`.
    pub fn separable_product(params: &[(f64, f64)]) -> Result<Self> {
        Self::new(params.iter().map(|&(a, b)| [[a, 0.0], [0.0, b]]).collect())
    }

    /// Product lattice formed by concatenating the blocks of `self` and `other`.
    pub fn product(&self, other: &Lattice2D) -> Lattice2D {
        let mut blocks = self.blocks.clone();
        blocks.extend_from_slice(&other.blocks);
        Lattice2D { blocks }
    }

    /// Parses a literal like `"1,0,0,0.75"` or `"1,0,0,0.5;1,0,0,0.8"`.
    pub fn parse(literal: &str) -> Result<Self> {
        let mut blocks = Vec::new();
        for part in literal.split(';') {
            let vals: Vec<f64> = part
                .split(',')
                .map(|tok| {
                    let tok = tok.trim();
                    tok.parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad lattice token '{tok}'")))
                })
                .collect::<Result<_>>()?;
            if vals.len() != 4 {
                return Err(Error::Parse(format!(
                    "lattice block '{}' needs 4 entries, got {}",
                    part.trim(),
                    vals.len()
                )));
            }
            blocks.push([[vals[0], vals[1]], [vals[2], vals[3]]]);
        }
        Self::new(blocks)
    }

    /// Literal form accepted by [`Lattice2D::parse`].
    pub fn literal(&self) -> String {
        self.blocks
            .iter()
            .map(|b| format!("{},{},{},{}", b[0][0], b[0][1], b[1][0], b[1][1]))
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn dim_pairs(&self) -> usize {
        self.blocks.len()
    }

    /// Length of index and coordinate vectors.
    pub fn rank(&self) -> usize {
        2 * self.blocks.len()
    }

    pub fn block_volume(&self, i: usize) -> f64 {
        det(&self.blocks[i]).abs()
    }

    /// Product of per-block covolumes.
    pub fn volume(&self) -> f64 {
        (0..self.blocks.len())
            .map(|i| self.block_volume(i))
            .product()
    }

    /// The lattice of points whose time-frequency shifts commute with every shift in `self`.
    ///
    /// In one block the symplectic form is the determinant, so the adjoint basis is
    /// the primal basis divided by its covolume.
    pub fn adjoint(&self) -> Lattice2D {
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let v = det(b).abs();
                [[b[0][0] / v, b[0][1] / v], [b[1][0] / v, b[1][1] / v]]
            })
            .collect();
        Lattice2D { blocks }
    }

    /// Writes the coordinates of `index` into `out`.
    pub fn coords_into(&self, index: &[i64], out: &mut [f64]) {
        for (i, b) in self.blocks.iter().enumerate() {
            let m = index[2 * i] as f64;
            let n = index[2 * i + 1] as f64;
            out[2 * i] = b[0][0] * m + b[0][1] * n;
            out[2 * i + 1] = b[1][0] * m + b[1][1] * n;
        }
    }

    pub fn coords(&self, index: &[i64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rank()];
        self.coords_into(index, &mut out);
        out
    }

    pub fn point(&self, index: &[i64]) -> LatticePoint {
        LatticePoint {
            index: index.to_vec(),
            coords: self.coords(index),
        }
    }

    /// Index of the lattice point at `coords`, if `coords` lies on the lattice within `tol`.
    pub fn index_of(&self, coords: &[f64], tol: f64) -> Option<Vec<i64>> {
        let mut idx = Vec::with_capacity(self.rank());
        for (i, b) in self.blocks.iter().enumerate() {
            let d = det(b);
            let (x, w) = (coords[2 * i], coords[2 * i + 1]);
            let m = (b[1][1] * x - b[0][1] * w) / d;
            let n = (-b[1][0] * x + b[0][0] * w) / d;
            idx.push(m.round() as i64);
            idx.push(n.round() as i64);
        }
        let back = self.coords(&idx);
        let err = back
            .iter()
            .zip(coords)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        (err <= tol).then_some(idx)
    }

    /// Per-index bound `|k_j| ≤ radius · ‖row_j(B⁻¹)‖` valid for every point within `radius`.
    pub fn index_bounds(&self, radius: f64) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.rank());
        for b in &self.blocks {
            let d = det(b);
            let r0 = (b[1][1] * b[1][1] + b[0][1] * b[0][1]).sqrt() / d.abs();
            let r1 = (b[1][0] * b[1][0] + b[0][0] * b[0][0]).sqrt() / d.abs();
            out.push((radius * r0 + 1e-9).floor() as i64);
            out.push((radius * r1 + 1e-9).floor() as i64);
        }
        out
    }

    /// Rough point count of the ball, used to reject oversized requests early.
    pub fn estimated_count(&self, radius: f64) -> f64 {
        let n = self.rank() as i32;
        let half = n as f64 / 2.0;
        // volume of the n-ball: π^{n/2} r^n / Γ(n/2 + 1), n even
        let gamma: f64 = (1..=(n / 2)).map(|k| k as f64).product();
        PI.powf(half) * radius.powi(n) / gamma / self.volume()
    }

    /// All points with Euclidean norm at most `radius`, in lexicographic index order.
    pub fn enumerate_points(&self, radius: f64) -> Result<Vec<LatticePoint>> {
        self.enumerate_points_capped(radius, DEFAULT_POINT_CAP)
    }

    pub fn enumerate_points_capped(&self, radius: f64, cap: usize) -> Result<Vec<LatticePoint>> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::InvalidInput(format!(
                "radius must be finite and >= 0, got {radius}"
            )));
        }
        let est = self.estimated_count(radius);
        if est > 2.0 * cap as f64 + 100.0 {
            return Err(Error::RadiusTooLarge {
                count: est as usize,
                cap,
            });
        }
        let bounds = self.index_bounds(radius);
        let r2 = radius * radius * (1.0 + 1e-12) + 1e-300;
        let mut out = Vec::new();
        let mut idx = vec![0i64; self.rank()];
        self.enumerate_rec(0, 0.0, r2, &bounds, &mut idx, &mut out, cap)?;
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn enumerate_rec(
        &self,
        block: usize,
        acc: f64,
        r2: f64,
        bounds: &[i64],
        idx: &mut Vec<i64>,
        out: &mut Vec<LatticePoint>,
        cap: usize,
    ) -> Result<()> {
        if block == self.blocks.len() {
            if out.len() >= cap {
                return Err(Error::RadiusTooLarge {
                    count: out.len() + 1,
                    cap,
                });
            }
            out.push(self.point(idx));
            return Ok(());
        }
        let b = &self.blocks[block];
        let (bm, bn) = (bounds[2 * block], bounds[2 * block + 1]);
        for m in -bm..=bm {
            for n in -bn..=bn {
                let x = b[0][0] * m as f64 + b[0][1] * n as f64;
                let w = b[1][0] * m as f64 + b[1][1] * n as f64;
                let s = acc + x * x + w * w;
                if s <= r2 {
                    idx[2 * block] = m;
                    idx[2 * block + 1] = n;
                    self.enumerate_rec(block + 1, s, r2, bounds, idx, out, cap)?;
                }
            }
        }
        Ok(())
    }
}

/// Free-function form of [`Lattice2D::new`].
pub fn make_lattice(blocks: Vec<Block>) -> Result<Lattice2D> {
    Lattice2D::new(blocks)
}

pub fn adjoint_lattice(l: &Lattice2D) -> Lattice2D {
    l.adjoint()
}

pub fn volume(l: &Lattice2D) -> f64 {
    l.volume()
}

pub fn enumerate_points(l: &Lattice2D, radius: f64) -> Result<Vec<LatticePoint>> {
    l.enumerate_points(radius)
}

/// Fractional part mapped into `[-0.5, 0.5)`, used to keep phase arguments small.
#[inline]
pub(crate) fn frac(t: f64) -> f64 {
    t - t.round()
}

/// `e^{2πi t}` with argument reduction.
#[inline]
pub fn cis_turns(t: f64) -> Complex64 {
    let (s, c) = (2.0 * PI * frac(t)).sin_cos();
    Complex64::new(c, s)
}

/// Cocycle of the projective representation `π(z) = M_ω T_x`:
/// `π(z)π(z') = c(z,z') π(z+z')` with `c(z,z') = e^{-2πi x·η}`.
pub fn cocycle(z: &[f64], zp: &[f64]) -> Complex64 {
    let mut s = 0.0;
    for i in 0..z.len() / 2 {
        s += z[2 * i] * zp[2 * i + 1];
    }
    cis_turns(-s)
}

/// Symplectic form `Ω(z,z') = y·ω − x·η`.
pub fn symplectic_form(z: &[f64], zp: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..z.len() / 2 {
        s += zp[2 * i] * z[2 * i + 1] - z[2 * i] * zp[2 * i + 1];
    }
    s
}

/// Symplectic character `e^{2πiΩ(z,z')}`, so that `π(z)π(z') = c_symp(z,z') π(z')π(z)`.
pub fn symplectic_character(z: &[f64], zp: &[f64]) -> Complex64 {
    cis_turns(symplectic_form(z, zp))
}
