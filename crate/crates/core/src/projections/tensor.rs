use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::BTreeMap;

use super::build::{projection_from_window, ProjectionOptions};
use super::certify::{ProjectionReport, ProjectionTolerances};
use crate::error::{Error, Result};
use crate::gabor_core::frame_bounds;
use crate::lattice::Lattice2D;
use crate::tf_signal::WindowSpec;
use crate::twisted_algebra::TwistedElement;

type Pairs = Vec<(Complex64, Complex64)>;

/// Coefficients of `x` and `p` on the union of their supports.
fn aligned(x: &TwistedElement, p: &TwistedElement) -> Pairs {
    let mut map: BTreeMap<Vec<i64>, (Complex64, Complex64)> = BTreeMap::new();
    for (i, v) in x.entries() {
        map.entry(i).or_default().0 = v;
    }
    for (i, v) in p.entries() {
        map.entry(i).or_default().1 = v;
    }
    map.into_values().collect()
}

/// `‖⊗x_i − ⊗p_i‖_{ℓ¹}`: exact for one or two factors, a telescoping upper bound beyond.
fn tensor_distance(xs: &[TwistedElement], ps: &[TwistedElement]) -> Result<f64> {
    match xs.len() {
        1 => xs[0].distance_l1(&ps[0]),
        2 => {
            let a = aligned(&xs[0], &ps[0]);
            let b = aligned(&xs[1], &ps[1]);
            let rows: Vec<f64> = a
                .par_iter()
                .map(|&(xa, pa)| b.iter().map(|&(xb, pb)| (xa * xb - pa * pb).norm()).sum())
                .collect();
            Ok(rows.iter().sum())
        }
        d => {
            let mut total = 0.0;
            for i in 0..d {
                let before: f64 = xs[..i].iter().map(|x| x.l1()).product();
                let after: f64 = ps[i + 1..].iter().map(|p| p.l1()).product();
                total += before * xs[i].distance_l1(&ps[i])? * after;
            }
            Ok(total)
        }
    }
}

fn block_lattice(lattice: &Lattice2D, i: usize) -> Result<Lattice2D> {
    let b = lattice.blocks()[i];
    if b[0][1] != 0.0 || b[1][0] != 0.0 {
        return Err(Error::InvalidInput(format!(
            "block {i} is not separable: {:?}",
            b
        )));
    }
    Lattice2D::separable(b[0][0].abs(), b[1][1].abs())
}

/// Projection on a separable product lattice `∏ α_i Z × β_i Z`, built as the coefficient
/// tensor product of the per-block projections. `windows` holds one window per block, or a
/// single window used for every block.
pub fn tensor_projection(
    windows: &[WindowSpec],
    lattice: &Lattice2D,
    opts: &ProjectionOptions,
) -> Result<(TwistedElement, ProjectionReport)> {
    let d = lattice.dim_pairs();
    if windows.len() != 1 && windows.len() != d {
        return Err(Error::InvalidInput(format!(
            "{} windows for {d} lattice blocks",
            windows.len()
        )));
    }
    let window = |i: usize| &windows[if windows.len() == 1 { 0 } else { i }];
    let blocks: Vec<Lattice2D> = (0..d)
        .map(|i| block_lattice(lattice, i))
        .collect::<Result<_>>()?;
    for (i, b) in blocks.iter().enumerate() {
        if b.volume() >= 1.0 - 1e-12 {
            let f = frame_bounds(window(i), b, &opts.frame)?;
            return Err(Error::NotAFrame {
                lower: f.lower_bound,
                upper: f.upper_bound,
            });
        }
    }
    let factors: Vec<(TwistedElement, ProjectionReport)> = blocks
        .iter()
        .enumerate()
        .map(|(i, b)| projection_from_window(window(i), b, opts))
        .collect::<Result<_>>()?;
    let ps: Vec<TwistedElement> = factors.iter().map(|f| f.0.clone()).collect();
    let squares: Vec<TwistedElement> = ps.iter().map(|p| p.tconv(p)).collect::<Result<_>>()?;
    let adjoints: Vec<TwistedElement> = ps.iter().map(|p| p.involute()).collect();

    let mut p = ps[0].clone();
    for q in &ps[1..] {
        p = p.tensor(q)?;
    }
    let trace = factors.iter().fold(Complex64::new(1.0, 0.0), |t, f| {
        t * Complex64::new(f.1.trace.re, f.1.trace.im)
    });
    let expected = lattice.volume();
    let mut report = ProjectionReport {
        lattice: lattice.literal(),
        window: Some((0..d).map(|i| window(i).id()).collect::<Vec<_>>().join(";")),
        idempotency_residual: tensor_distance(&squares, &ps)?,
        selfadjoint_residual: tensor_distance(&adjoints, &ps)?,
        trace: trace.into(),
        expected_trace: Some(expected),
        trace_error: Some((trace - expected).norm()),
        radius: p.radius(),
        shell_mass: Some(factors.iter().filter_map(|f| f.1.shell_mass).sum()),
        decay_fits: None,
        module_condition_residual: None,
        tolerances: ProjectionTolerances::from_tol(opts.tol),
        certified: false,
        frame: None,
    };
    report.recompute_certified();
    Ok((p, report))
}
