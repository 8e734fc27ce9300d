mod config;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use config::*;
use nct_gabor::format::to_json_string;
use nct_gabor::gabor_core::{
    default_radius, dual_atom, figa_sides, frame_bounds, frame_bounds_atom, tight_atom, Atom,
    AtomOptions, FrameOptions,
};
use nct_gabor::projections::{
    decay_profile, projection_from_window, sweep_csv, sweep_svg, tensor_projection, theta_sweep,
    verify_projection_with, ComplexValue, ProjectionOptions, ProjectionTolerances, SweepOptions,
};
use nct_gabor::{Error, GridSpec, Lattice2D, Result, TwistedElement, WindowSpec};

/// Gabor frames, Janssen elements and projections in noncommutative tori.
#[derive(Parser, Debug)]
#[command(name = "nct-gabor", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// gaussian, sech, exp2 or custom:<path>.
    #[arg(long, default_value = DEFAULT_WINDOW)]
    window: String,
    /// Basis blocks `a,b,c,d`, several joined by `;`.
    #[arg(long, default_value = DEFAULT_LATTICE, allow_hyphen_values = true)]
    lattice: String,
    /// Sampling grid `T,q`.
    #[arg(long)]
    grid: Option<String>,
    /// Janssen truncation radius (window default when omitted).
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Frame bounds from the Janssen element.
    FrameBounds {
        #[command(flatten)]
        common: Common,
    },
    /// Projection from the canonical tight atom, with certification.
    Project {
        #[command(flatten)]
        common: Common,
        /// Initial coefficient-table radius.
        #[arg(long, default_value_t = DEFAULT_TABLE_RADIUS)]
        table_radius: f64,
        /// Writes the projection's coefficients as JSON.
        #[arg(long)]
        element_out: Option<PathBuf>,
    },
    /// Frame bounds and projections on `Z × θZ` for a list of `θ`.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = DEFAULT_THETAS)]
        thetas: String,
        /// SVG plot of the lower bound.
        #[arg(long)]
        plot: Option<PathBuf>,
        /// Skip the projection columns.
        #[arg(long)]
        bounds_only: bool,
    },
    /// Certification of an element read from JSON.
    Verify {
        #[arg(long)]
        element: PathBuf,
        #[arg(long, default_value_t = DEFAULT_PROJECTION_TOL)]
        tol: f64,
        #[arg(long)]
        expected_trace: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Both sides of the fundamental identity for four windows.
    Figa {
        #[command(flatten)]
        common: Common,
        /// Four window literals joined by `;` (f, g, h, k).
        #[arg(long)]
        windows: String,
    },
    /// Decay classification of the projection's coefficients.
    Decay {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = DEFAULT_DECAY_RADIUS)]
        table_radius: f64,
    },
    /// Projection on a separable product lattice.
    TensorProject {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        element_out: Option<PathBuf>,
    },
    /// Canonical tight atom.
    Tight {
        #[command(flatten)]
        common: Common,
    },
    /// Canonical dual atom.
    Dual {
        #[command(flatten)]
        common: Common,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NotAFrame { .. }
        | Error::NotInvertible { .. }
        | Error::NotSelfAdjoint { .. }
        | Error::InsufficientSupport(_) => 2,
        Error::NoConvergence { .. } | Error::QuadratureFailure { .. } => 3,
        _ => 1,
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidInput(format!(
            "--{name} must be positive, got {v}"
        )))
    }
}

fn threads() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Parse(format!(
                "{THREADS_ENV}='{s}' is not a positive integer"
            ))),
        },
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => println!("{}", text.trim_end()),
    }
    Ok(())
}

/// Report as JSON with the resolved configuration under `"config"`.
fn report_json<T: Serialize>(report: &T, cfg: &RunConfig) -> String {
    let mut v = serde_json::to_value(report).expect("reports serialise");
    v["config"] = serde_json::to_value(cfg).expect("config serialises");
    to_json_string(&v)
}

struct Resolved {
    window: WindowSpec,
    lattice: Lattice2D,
    grid: Option<GridSpec>,
    radius: f64,
    cfg: RunConfig,
}

fn resolve(command: &str, c: &Common, tol_default: f64) -> Result<Resolved> {
    let window = WindowSpec::parse(&c.window)?;
    let lattice = Lattice2D::parse(&c.lattice)?;
    let grid = c.grid.as_deref().map(GridSpec::parse).transpose()?;
    let radius = positive(
        "radius",
        c.radius.unwrap_or_else(|| default_radius(&window)),
    )?;
    let tol = positive("tol", c.tol.unwrap_or(tol_default))?;
    let cfg = RunConfig {
        command: command.into(),
        window: Some(window.id()),
        lattice: Some(lattice.literal()),
        grid: c.grid.clone(),
        radius: Some(radius),
        tol: Some(tol),
        threads: threads()?,
        ..RunConfig::default()
    };
    Ok(Resolved {
        window,
        lattice,
        grid,
        radius,
        cfg,
    })
}

fn frame_options(r: &Resolved) -> FrameOptions {
    FrameOptions {
        radius: Some(r.radius),
        certify_tol: DEFAULT_FRAME_TOL,
        grid: r.grid,
        ..FrameOptions::default()
    }
}

fn projection_options(
    r: &mut Resolved,
    table_radius: f64,
    max_table_radius: f64,
) -> Result<ProjectionOptions> {
    let table_radius = positive("table-radius", table_radius)?;
    r.cfg.frame_tol = Some(DEFAULT_FRAME_TOL);
    r.cfg.solve_tol = Some(DEFAULT_SOLVE_TOL);
    r.cfg.table_radius = Some(table_radius);
    r.cfg.max_table_radius = Some(max_table_radius);
    Ok(ProjectionOptions {
        frame: FrameOptions {
            grid: None,
            ..frame_options(r)
        },
        tol: r.cfg.tol.expect("resolved"),
        solve_tol: DEFAULT_SOLVE_TOL,
        radius: table_radius,
        max_radius: max_table_radius.max(table_radius),
        grid: r.grid,
        ..ProjectionOptions::default()
    })
}

fn parse_list(literal: &str) -> Result<Vec<f64>> {
    literal
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number '{}'", t.trim())))
        })
        .collect()
}

fn parse_windows(literal: &str) -> Result<Vec<WindowSpec>> {
    literal.split(';').map(WindowSpec::parse).collect()
}

fn write_element(path: Option<&Path>, p: &TwistedElement) -> Result<()> {
    if let Some(path) = path {
        std::fs::write(path, p.to_json())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct FigaReport {
    windows: Vec<String>,
    lattice: String,
    radius: f64,
    lhs: ComplexValue,
    rhs: ComplexValue,
    residual: f64,
    tol: f64,
    passed: bool,
}

#[derive(Serialize)]
struct DecayReport {
    window: String,
    lattice: String,
    radius: f64,
    certified: bool,
    decay_fits: nct_gabor::projections::DecayProfile,
}

#[derive(Serialize)]
struct Samples {
    t: Vec<f64>,
    re: Vec<f64>,
    im: Vec<f64>,
}

#[derive(Serialize)]
struct AtomReport {
    kind: String,
    window: String,
    lattice: String,
    norm_sqr: f64,
    frame: nct_gabor::gabor_core::FrameReport,
    expansion: serde_json::Value,
    samples: Option<Samples>,
}

fn atom_report(kind: &str, atom: &Atom, r: &Resolved) -> Result<AtomReport> {
    let frame = frame_bounds_atom(atom, &r.lattice, &frame_options(r))?;
    let expansion = atom
        .expansion()
        .map(|e| serde_json::from_str(&e.to_json()).expect("element JSON parses"))
        .unwrap_or(serde_json::Value::Null);
    let samples = r.grid.map(|g| {
        let s = atom.sample(&g);
        Samples {
            t: g.times(),
            re: s.values().iter().map(|v| v.re).collect(),
            im: s.values().iter().map(|v| v.im).collect(),
        }
    });
    Ok(AtomReport {
        kind: kind.into(),
        window: r.window.id(),
        lattice: r.lattice.literal(),
        norm_sqr: atom.norm_sqr()?,
        frame,
        expansion,
        samples,
    })
}

fn run(cli: Cli) -> Result<u8> {
    if let Some(n) = threads()? {
        // a second initialisation only fails when a pool already exists
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match cli.command {
        Command::FrameBounds { common } => {
            let mut r = resolve("frame-bounds", &common, DEFAULT_FRAME_TOL)?;
            r.cfg.frame_tol = r.cfg.tol;
            let opts = FrameOptions {
                certify_tol: r.cfg.tol.expect("resolved"),
                ..frame_options(&r)
            };
            let report = frame_bounds(&r.window, &r.lattice, &opts)?;
            emit(common.out.as_deref(), &report_json(&report, &r.cfg))?;
            Ok(if report.is_frame { 0 } else { 2 })
        }
        Command::Project {
            common,
            table_radius,
            element_out,
        } => {
            let mut r = resolve("project", &common, DEFAULT_PROJECTION_TOL)?;
            let opts = projection_options(&mut r, table_radius, DEFAULT_MAX_TABLE_RADIUS)?;
            let (p, report) = projection_from_window(&r.window, &r.lattice, &opts)?;
            write_element(element_out.as_deref(), &p)?;
            emit(common.out.as_deref(), &report_json(&report, &r.cfg))?;
            Ok(if report.certified { 0 } else { 2 })
        }
        Command::Sweep {
            common,
            thetas,
            plot,
            bounds_only,
        } => {
            let mut r = resolve("sweep", &common, DEFAULT_PROJECTION_TOL)?;
            let thetas = parse_list(&thetas)?;
            let projection = ProjectionOptions {
                decay: false,
                ..projection_options(&mut r, DEFAULT_TABLE_RADIUS, DEFAULT_MAX_TABLE_RADIUS)?
            };
            let rows = theta_sweep(
                &r.window,
                &thetas,
                &SweepOptions {
                    projection,
                    project: !bounds_only,
                },
            );
            emit(common.out.as_deref(), &sweep_csv(&rows))?;
            if let Some(path) = plot {
                std::fs::write(path, sweep_svg(&rows))?;
            }
            Ok(0)
        }
        Command::Verify {
            element,
            tol,
            expected_trace,
            out,
        } => {
            let tol = positive("tol", tol)?;
            let text = std::fs::read_to_string(&element)?;
            let p = TwistedElement::from_json(&text)?;
            let report =
                verify_projection_with(&p, ProjectionTolerances::from_tol(tol), expected_trace);
            let cfg = RunConfig {
                command: "verify".into(),
                lattice: Some(p.lattice().literal()),
                tol: Some(tol),
                threads: threads()?,
                ..RunConfig::default()
            };
            emit(out.as_deref(), &report_json(&report, &cfg))?;
            Ok(if report.certified { 0 } else { 2 })
        }
        Command::Figa { common, windows } => {
            let c = Common {
                radius: Some(common.radius.unwrap_or(DEFAULT_FIGA_RADIUS)),
                grid: Some(common.grid.clone().unwrap_or_else(|| DEFAULT_GRID.into())),
                ..common.clone()
            };
            let mut r = resolve("figa", &c, DEFAULT_FIGA_TOL)?;
            let ws = parse_windows(&windows)?;
            if ws.len() != 4 {
                return Err(Error::Parse(format!(
                    "--windows needs 4 literals, got {}",
                    ws.len()
                )));
            }
            r.cfg.window = Some(windows.clone());
            let grid = r.grid.expect("grid defaulted");
            let s: Vec<_> = ws.iter().map(|w| w.sample(&grid)).collect();
            let (lhs, rhs) = figa_sides(&s[0], &s[1], &s[2], &s[3], &r.lattice, r.radius)?;
            let residual = (lhs - rhs).norm() / (lhs.norm() + rhs.norm() + 1e-300);
            let tol = r.cfg.tol.expect("resolved");
            let report = FigaReport {
                windows: ws.iter().map(|w| w.id()).collect(),
                lattice: r.lattice.literal(),
                radius: r.radius,
                lhs: lhs.into(),
                rhs: rhs.into(),
                residual,
                tol,
                passed: residual <= tol,
            };
            emit(common.out.as_deref(), &report_json(&report, &r.cfg))?;
            Ok(if report.passed { 0 } else { 2 })
        }
        Command::Decay {
            common,
            table_radius,
        } => {
            let mut r = resolve("decay", &common, DEFAULT_PROJECTION_TOL)?;
            let opts = ProjectionOptions {
                decay: false,
                ..projection_options(&mut r, table_radius, table_radius)?
            };
            let (p, proj) = projection_from_window(&r.window, &r.lattice, &opts)?;
            let report = DecayReport {
                window: r.window.id(),
                lattice: r.lattice.literal(),
                radius: p.radius(),
                certified: proj.certified,
                decay_fits: decay_profile(&p)?,
            };
            emit(common.out.as_deref(), &report_json(&report, &r.cfg))?;
            Ok(0)
        }
        Command::TensorProject {
            common,
            element_out,
        } => {
            let mut r = resolve("tensor-project", &common, DEFAULT_PROJECTION_TOL)?;
            let windows = parse_windows(&common.window)?;
            r.cfg.window = Some(common.window.clone());
            let opts = ProjectionOptions {
                decay: false,
                grid: None,
                ..projection_options(&mut r, DEFAULT_TABLE_RADIUS, DEFAULT_MAX_TABLE_RADIUS)?
            };
            let (p, report) = tensor_projection(&windows, &r.lattice, &opts)?;
            write_element(element_out.as_deref(), &p)?;
            emit(common.out.as_deref(), &report_json(&report, &r.cfg))?;
            Ok(if report.certified { 0 } else { 2 })
        }
        Command::Tight { common } => atom_command("tight", &common),
        Command::Dual { common } => atom_command("dual", &common),
    }
}

fn atom_command(kind: &str, common: &Common) -> Result<u8> {
    let mut r = resolve(kind, common, DEFAULT_SOLVE_TOL)?;
    r.cfg.frame_tol = Some(DEFAULT_FRAME_TOL);
    let opts = AtomOptions {
        radius: Some(r.radius),
        tol: r.cfg.tol.expect("resolved"),
        frame: FrameOptions {
            grid: None,
            ..frame_options(&r)
        },
    };
    let atom = if kind == "tight" {
        tight_atom(&r.window, &r.lattice, &opts)?
    } else {
        dual_atom(&r.window, &r.lattice, &opts)?
    };
    let report = atom_report(kind, &atom, &r)?;
    emit(common.out.as_deref(), &report_json(&report, &r.cfg))?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
