//! Command-line front end: `solve`, `verify` and `export-field`.
//!
//! Exit codes: 0 all identities pass, 1 an identity failed, 2 configuration
//! error, 3 numerical failure. Errors are reported on stderr as JSON.

mod config;
mod export;
mod verify;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

pub use config::{parse_point, ProbeGrid, RunConfig, Tolerances};
pub use export::{export_field, Quantity};
pub use verify::{probes_for, verify, Entry, Report, SignRecord};

use crate::geometry::discretize;
use crate::green::GreenContext;
use crate::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Numerical(#[from] Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(e) => match e {
                Error::InvalidDomain(_)
                | Error::InvalidCurve { .. }
                | Error::InvalidNodeCount(_)
                | Error::NotInDomain(_)
                | Error::BoundaryProximity { .. }
                | Error::SourceTooClose { .. } => 2,
                _ => 3,
            },
            CliError::Io(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self.exit_code() {
            2 => "config",
            _ if matches!(self, CliError::Io(_)) => "io",
            _ => "numerical",
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "ahlfors-green", version, about = "Kernels, Ahlfors maps and Green's functions of planar domains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write boundary kernels, the harmonic frame and Green's function grids.
    Solve(Common),
    /// Run the identity suite and write report.json.
    Verify(Common),
    /// Write one scalar field on a rectangular grid.
    ExportField {
        #[command(flatten)]
        common: Common,
        /// green, omega_J, lambda_J, mu_J, ahlfors_abs or poisson.
        #[arg(long)]
        quantity: String,
    },
}

#[derive(Args, Debug)]
pub struct Common {
    /// Domain and run configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Nodes per boundary curve, overriding the configuration.
    #[arg(long)]
    pub m: Option<usize>,
    /// Source point "re,im"; repeatable, replaces the configured sources.
    #[arg(long = "w", value_parser = parse_point, allow_hyphen_values = true)]
    pub w: Vec<Complex64>,
}

impl Common {
    fn load(&self) -> Result<RunConfig, CliError> {
        let mut config = RunConfig::load(&self.config)?;
        config.apply_overrides(self.m, &self.w)?;
        Ok(config)
    }
}

/// Solvers for one configuration.
pub struct Session<'a> {
    pub config: &'a RunConfig,
    pub ctx: GreenContext,
}

impl<'a> Session<'a> {
    pub fn new(config: &'a RunConfig) -> Result<Self, CliError> {
        let grid = Arc::new(discretize(&config.domain, config.nodes_per_curve)?);
        let ctx = GreenContext::new(grid, config.base_point()?)?;
        Ok(Self { config, ctx })
    }
}

pub(crate) fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn prepare(out: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(out).map_err(|e| CliError::Io(format!("cannot create {}: {e}", out.display())))
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct BranchRecord {
    z: [f64; 2],
    multiplicity: usize,
}

#[derive(Serialize)]
struct FrameRecord {
    domain: String,
    connectivity: usize,
    nodes_per_curve: usize,
    base_point: [f64; 2],
    signs: SignRecord,
    periods: Vec<Vec<[f64; 2]>>,
    sigma: Vec<Vec<[f64; 2]>>,
    i_sigma: Vec<Vec<f64>>,
    i_sigma_imaginary: f64,
    period_purity: f64,
    z0: [f64; 2],
    roots: Vec<[f64; 2]>,
    branch_points: Vec<BranchRecord>,
}

/// Write kernels.csv, frame.json and green_grid.csv to `out`.
pub fn solve(config: &RunConfig, out: &Path) -> Result<(), CliError> {
    let session = Session::new(config)?;
    let ctx = &session.ctx;
    let grid = ctx.grid();
    prepare(out)?;

    let f = &ctx.ahlfors;
    let mut csv = String::from("curve,index,t,x,y,s_re,s_im,l_re,l_im,f_re,f_im\n");
    for i in 0..grid.len() {
        let (curve, local) = grid.local(i);
        let (s, l, fz, z) = (f.kernel.s[i], f.kernel.l[i], f.f[i], grid.z[i]);
        let _ = writeln!(
            csv,
            "{curve},{local},{},{},{},{},{},{},{},{},{}",
            grid.t[i], z.re, z.im, s.re, s.im, l.re, l.im, fz.re, fz.im
        );
    }
    write(&out.join("kernels.csv"), &csv)?;

    let frame = &ctx.frame;
    let holes = frame.holes();
    let complex_rows = |m: &nalgebra::DMatrix<Complex64>| -> Vec<Vec<[f64; 2]>> {
        (0..holes).map(|r| (0..holes).map(|c| pair(m[(r, c)])).collect()).collect()
    };
    let i_sigma = frame.i_sigma();
    let record = FrameRecord {
        domain: config.label(),
        connectivity: grid.connectivity(),
        nodes_per_curve: grid.nodes_per_curve(),
        base_point: pair(f.a),
        signs: SignRecord {
            eps1: ctx.signs.eps1,
            eps2: ctx.signs.eps2,
        },
        periods: complex_rows(&frame.periods),
        sigma: complex_rows(&frame.sigma),
        i_sigma: (0..holes).map(|r| (0..holes).map(|c| i_sigma[(r, c)]).collect()).collect(),
        i_sigma_imaginary: frame.i_sigma_imaginary(),
        period_purity: frame.period_purity(),
        z0: pair(ctx.z0.z),
        roots: ctx.roots.iter().map(|r| pair(r.z)).collect(),
        branch_points: ctx
            .branch_points
            .iter()
            .map(|b| BranchRecord {
                z: pair(b.z),
                multiplicity: b.multiplicity,
            })
            .collect(),
    };
    write(&out.join("frame.json"), &json(&record))?;

    let mut csv = String::from("w_x,w_y,x,y,value\n");
    for w in config.sources() {
        let field = export::sample_field(&session, Quantity::Green, w)?;
        for (p, v) in field {
            let _ = writeln!(csv, "{},{},{},{},{}", w.re, w.im, p.re, p.im, v);
        }
    }
    write(&out.join("green_grid.csv"), &csv)?;
    Ok(())
}

fn report_error(e: &CliError) -> i32 {
    let code = e.exit_code();
    let body = serde_json::json!({
        "error": { "kind": e.kind(), "message": e.to_string() },
        "exit_code": code,
    });
    eprintln!("{body}");
    code
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Solve(common) => {
            let config = common.load()?;
            solve(&config, &common.out)?;
            Ok(0)
        }
        Command::Verify(common) => {
            let config = common.load()?;
            let report = verify(&config)?;
            prepare(&common.out)?;
            let text = json(&report);
            write(&common.out.join("report.json"), &text)?;
            print!("{text}");
            Ok(if report.pass { 0 } else { 1 })
        }
        Command::ExportField { common, quantity } => {
            let config = common.load()?;
            let quantity: Quantity = quantity.parse()?;
            let path = common.out.join(format!("{quantity}.csv"));
            prepare(&common.out)?;
            write(&path, &export_field(&config, quantity)?)?;
            Ok(0)
        }
    }
}

/// Run the command line `args` (program name first) and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            if code == 0 {
                let _ = e.print();
                return 0;
            }
            return report_error(&CliError::Config(e.to_string().trim().to_string()));
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => report_error(&e),
    }
}
