use rayon::prelude::*;

use super::build::{projection_with_frame, ProjectionOptions};
use crate::error::{Error, Result};
use crate::format::fmt17;
use crate::gabor_core::frame_bounds;
use crate::lattice::Lattice2D;
use crate::tf_signal::WindowSpec;

pub const SWEEP_HEADER: [&str; 8] = [
    "theta",
    "A",
    "B",
    "invertible",
    "idem_residual",
    "sa_residual",
    "trace",
    "error",
];

#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub projection: ProjectionOptions,
    /// Build and certify the projection for every invertible row.
    pub project: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            projection: ProjectionOptions {
                decay: false,
                ..ProjectionOptions::default()
            },
            project: true,
        }
    }
}

/// One lattice `Z × θZ` of a sweep. Fields stay `None` when a step fails or is skipped.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub theta: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub invertible: Option<bool>,
    pub idem_residual: Option<f64>,
    pub sa_residual: Option<f64>,
    pub trace: Option<f64>,
    pub error: Option<String>,
}

impl SweepRow {
    fn empty(theta: f64) -> Self {
        SweepRow {
            theta,
            lower: None,
            upper: None,
            invertible: None,
            idem_residual: None,
            sa_residual: None,
            trace: None,
            error: None,
        }
    }
}

fn sweep_row(w: &WindowSpec, theta: f64, opts: &SweepOptions) -> SweepRow {
    let mut row = SweepRow::empty(theta);
    let run = |row: &mut SweepRow| -> Result<()> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "theta must be positive, got {theta}"
            )));
        }
        let lattice = Lattice2D::rotation(theta)?;
        let frame = frame_bounds(w, &lattice, &opts.projection.frame)?;
        row.lower = Some(frame.lower_bound);
        row.upper = Some(frame.upper_bound);
        row.invertible = Some(frame.is_frame);
        if frame.is_frame && opts.project {
            let (_, report) = projection_with_frame(w, &lattice, frame, &opts.projection)?;
            row.idem_residual = Some(report.idempotency_residual);
            row.sa_residual = Some(report.selfadjoint_residual);
            row.trace = Some(report.trace.re);
        }
        Ok(())
    };
    if let Err(e) = run(&mut row) {
        row.error = Some(e.to_string());
    }
    row
}

/// Frame bounds and projection residuals on `Z × θZ` for each `θ`, computed in parallel
/// and returned in input order. A failing row records its error and the sweep continues.
pub fn theta_sweep(w: &WindowSpec, thetas: &[f64], opts: &SweepOptions) -> Vec<SweepRow> {
    thetas
        .par_iter()
        .map(|&theta| sweep_row(w, theta, opts))
        .collect()
}

fn opt_num(v: Option<f64>) -> String {
    v.map(fmt17).unwrap_or_default()
}

/// CSV table with [`SWEEP_HEADER`] and every float in 17 significant digits.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SWEEP_HEADER).expect("in-memory write");
    for r in rows {
        w.write_record([
            fmt17(r.theta),
            opt_num(r.lower),
            opt_num(r.upper),
            r.invertible.map(|b| b.to_string()).unwrap_or_default(),
            opt_num(r.idem_residual),
            opt_num(r.sa_residual),
            opt_num(r.trace),
            r.error.clone().unwrap_or_default(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv writes UTF-8")
}

/// Line plot of the lower frame bound against `θ`.
pub fn sweep_svg(rows: &[SweepRow]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const M: f64 = 50.0;
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.lower.map(|a| (r.theta, a)))
        .collect();
    let (x0, x1) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.0), hi.max(p.0))
        });
    let y1 = pts.iter().fold(0.0f64, |m, p| m.max(p.1));
    let sx = |x: f64| M + (W - 2.0 * M) * if x1 > x0 { (x - x0) / (x1 - x0) } else { 0.5 };
    let sy = |y: f64| H - M - (H - 2.0 * M) * if y1 > 0.0 { y / y1 } else { 0.0 };
    let line: Vec<String> = pts
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
        .collect();
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <line x1=\"{M}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{M}\" y1=\"{M}\" x2=\"{M}\" y2=\"{b}\" stroke=\"black\"/>\n",
        b = H - M,
        r = W - M
    );
    if !pts.is_empty() {
        s += &format!(
            "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"{}\"/>\n",
            line.join(" ")
        );
        for &(x, y) in &pts {
            s += &format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"steelblue\"/>\n",
                sx(x),
                sy(y)
            );
        }
        s += &format!(
            "<text x=\"{M}\" y=\"{}\" font-size=\"12\">theta {x0} .. {x1}</text>\n\
             <text x=\"5\" y=\"{}\" font-size=\"12\">A max {y1:.3e}</text>\n",
            H - 15.0,
            M - 10.0
        );
    }
    s += "</svg>\n";
    s
}
