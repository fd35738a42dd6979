use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_complex::Complex64;

use super::config::RunConfig;
use super::{CliError, Session};
use crate::green::DirectGreen;
use crate::harmonic::lambda;

/// Scalar fields available to `export-field`. Indices are 1-based curve
/// numbers with the outer curve last.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    /// `G(·, w)` for the first source `w`.
    Green,
    Omega(usize),
    Lambda(usize),
    Mu(usize),
    AhlforsAbs,
    /// `P(·, ζ)` with `ζ` the outer boundary node closest to `z_0`.
    Poisson,
}

impl FromStr for Quantity {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let indexed = |prefix: &str| -> Option<usize> { s.strip_prefix(prefix)?.parse().ok().filter(|&j| j >= 1) };
        match s {
            "green" => Ok(Quantity::Green),
            "ahlfors_abs" => Ok(Quantity::AhlforsAbs),
            "poisson" => Ok(Quantity::Poisson),
            _ => indexed("omega_")
                .map(Quantity::Omega)
                .or_else(|| indexed("lambda_").map(Quantity::Lambda))
                .or_else(|| indexed("mu_").map(Quantity::Mu))
                .ok_or_else(|| CliError::Config(format!("unknown quantity {s:?}"))),
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Green => write!(f, "green"),
            Quantity::Omega(j) => write!(f, "omega_{j}"),
            Quantity::Lambda(j) => write!(f, "lambda_{j}"),
            Quantity::Mu(j) => write!(f, "mu_{j}"),
            Quantity::AhlforsAbs => write!(f, "ahlfors_abs"),
            Quantity::Poisson => write!(f, "poisson"),
        }
    }
}

/// Cell-centred `per_axis × per_axis` lattice over the bounding box, row-major.
fn field_lattice(session: &Session, per_axis: usize) -> Vec<Complex64> {
    let (lo, hi) = session.ctx.grid().domain().bounding_box();
    let span = hi - lo;
    let step = |k: usize| (k as f64 + 0.5) / per_axis as f64;
    (0..per_axis)
        .flat_map(|r| (0..per_axis).map(move |c| lo + Complex64::new(span.re * step(c), span.im * step(r))))
        .collect()
}

/// Values of `quantity` on the field lattice; NaN outside the domain and
/// where the quantity is undefined or cannot be resolved.
pub(super) fn sample_field(session: &Session, quantity: Quantity, w: Complex64) -> Result<Vec<(Complex64, f64)>, CliError> {
    let ctx = &session.ctx;
    let grid = ctx.grid();
    let n = grid.connectivity();
    let limit = match quantity {
        Quantity::Omega(_) | Quantity::Lambda(_) => n,
        Quantity::Mu(_) => n - 1,
        _ => usize::MAX,
    };
    if let Quantity::Omega(j) | Quantity::Lambda(j) | Quantity::Mu(j) = quantity {
        if j > limit {
            return Err(CliError::Config(format!("{quantity}: index out of range 1..={limit}")));
        }
    }
    let green = match quantity {
        Quantity::Green => Some(DirectGreen::new(&ctx.dirichlet, w)?),
        _ => None,
    };
    let anchor = (0..grid.len())
        .filter(|&i| grid.local(i).0 == grid.outer())
        .min_by(|&a, &b| (grid.z[a] - ctx.z0.z).norm().total_cmp(&(grid.z[b] - ctx.z0.z).norm()))
        .unwrap_or(0);

    let value = |p: Complex64| -> f64 {
        match quantity {
            Quantity::Green => green.as_ref().and_then(|g| g.value(p).ok()).unwrap_or(f64::NAN),
            Quantity::Omega(j) => ctx.frame.omega_at(j - 1, p),
            Quantity::Lambda(j) => ctx.szego.solve(p).map(|k| lambda(&k)[j - 1]).unwrap_or(f64::NAN),
            Quantity::Mu(j) => ctx.frame.mu_at(j - 1, p),
            Quantity::AhlforsAbs => ctx.ahlfors.value(p).norm(),
            Quantity::Poisson => ctx.assemble(p).map(|a| a.poisson_kernel(anchor).0).unwrap_or(f64::NAN),
        }
    };
    let points = field_lattice(session, session.config.probe_grid.field_per_axis);
    Ok(points
        .into_iter()
        .map(|p| {
            let inside = matches!(grid.domain().contains(p), Ok(true));
            (p, if inside { value(p) } else { f64::NAN })
        })
        .collect())
}

/// CSV with columns `x,y,value` for `quantity`.
pub fn export_field(config: &RunConfig, quantity: Quantity) -> Result<String, CliError> {
    let session = Session::new(config)?;
    let w = match quantity {
        Quantity::Green => *config
            .sources()
            .first()
            .ok_or_else(|| CliError::Config("green needs a source point".into()))?,
        _ => Complex64::default(),
    };
    let mut csv = String::from("x,y,value\n");
    for (p, v) in sample_field(&session, quantity, w)? {
        let _ = writeln!(csv, "{},{},{}", p.re, p.im, v);
    }
    Ok(csv)
}
