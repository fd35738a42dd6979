use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::config::{RunConfig, Tolerances};
use super::{pair, CliError, Session};
use crate::green::{DirectGreen, GreenAssembly};
use crate::szego::{fit_interpolation_coeffs, szego_zeros};

/// One line of the verification report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Entry {
    pub identity: String,
    pub domain: String,
    pub probes: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignRecord {
    pub eps1: f64,
    pub eps2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub domain: String,
    pub connectivity: usize,
    pub nodes_per_curve: usize,
    pub base_point: [f64; 2],
    pub sources: Vec<[f64; 2]>,
    pub signs: SignRecord,
    pub entries: Vec<Entry>,
    pub pass: bool,
}

impl Report {
    pub fn entry(&self, identity: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.identity == identity)
    }
}

/// Running maximum of one identity's residuals.
#[derive(Clone, Debug)]
struct Tally {
    identity: &'static str,
    tolerance: f64,
    probes: usize,
    max: f64,
    error: Option<String>,
}

impl Tally {
    fn new(identity: &'static str, tolerance: f64) -> Self {
        Self {
            identity,
            tolerance,
            probes: 0,
            max: 0.0,
            error: None,
        }
    }

    fn record(&mut self, residual: f64) {
        self.probes += 1;
        self.max = worst(self.max, residual);
    }

    fn outcome(&mut self, result: crate::Result<f64>) {
        match result {
            Ok(r) => self.record(r),
            Err(e) => self.fail(e.to_string()),
        }
    }

    fn fail(&mut self, message: String) {
        self.error.get_or_insert(message);
    }

    fn merge(&mut self, other: &Tally) {
        self.probes += other.probes;
        self.max = worst(self.max, other.max);
        if self.error.is_none() {
            self.error.clone_from(&other.error);
        }
    }

    fn entry(&self, domain: &str) -> Entry {
        let pass = self.error.is_none() && self.max <= self.tolerance;
        Entry {
            identity: self.identity.to_string(),
            domain: domain.to_string(),
            probes: self.probes,
            max_residual: self.max,
            tolerance: self.tolerance,
            pass,
            error: self.error.clone(),
        }
    }
}

/// Larger of two residuals; NaN wins so that it fails the identity.
fn worst(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// Run the identity suite.
pub fn verify(config: &RunConfig) -> Result<Report, CliError> {
    let session = Session::new(config)?;
    let tol = &config.tolerances;
    let mut tallies = domain_checks(&session, tol);

    let sources = config.sources();
    let per_source: Vec<Vec<Tally>> = std::thread::scope(|scope| {
        let handles: Vec<_> = sources
            .iter()
            .map(|&w| {
                let session = &session;
                scope.spawn(move || source_checks(session, w))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("verification worker panicked"))
            .collect()
    });
    let mut merged = source_tallies(tol);
    for batch in &per_source {
        for (m, t) in merged.iter_mut().zip(batch) {
            m.merge(t);
        }
    }
    tallies.extend(merged);

    let label = config.label();
    let entries: Vec<Entry> = tallies.iter().map(|t| t.entry(&label)).collect();
    let pass = entries.iter().all(|e| e.pass);
    let ctx = &session.ctx;
    Ok(Report {
        domain: label,
        connectivity: ctx.grid().connectivity(),
        nodes_per_curve: ctx.grid().nodes_per_curve(),
        base_point: pair(ctx.ahlfors.a),
        sources: sources.iter().map(|&w| pair(w)).collect(),
        signs: SignRecord {
            eps1: ctx.signs.eps1,
            eps2: ctx.signs.eps2,
        },
        entries,
        pass,
    })
}

fn domain_checks(session: &Session, tol: &Tolerances) -> Vec<Tally> {
    let ctx = &session.ctx;
    let grid = ctx.grid();
    let n = grid.connectivity();
    let frame = &ctx.frame;
    let f = &ctx.ahlfors;

    let mut purity = Tally::new("frame_period_purity", tol.frame_period_purity);
    let mut normalization = Tally::new("frame_normalization", tol.frame_normalization);
    let mut i_sigma = Tally::new("frame_i_sigma_real", tol.frame_i_sigma_real);
    if n > 1 {
        purity.record(frame.period_purity());
        normalization.record(frame.u_normalization_residual());
        i_sigma.record(frame.i_sigma_imaginary());
    }

    let mut unimodular = Tally::new("ahlfors_unimodular", tol.ahlfors_unimodular);
    unimodular.record(f.unimodularity_residual());
    let mut degree = Tally::new("ahlfors_degree", tol.ahlfors_degree);
    degree.record((f.boundary_argument_change() / (2.0 * PI) - n as f64).abs());
    let mut zero = Tally::new("ahlfors_zero", tol.ahlfors_zero);
    zero.record(f.value(f.a).norm());
    let mut derivative = Tally::new("ahlfors_derivative", tol.ahlfors_derivative);
    let want = 2.0 * PI * f.kernel.s_diag;
    derivative.record((f.derivative(f.a) - want).norm() / want);
    let mut log_derivative = Tally::new("ahlfors_log_derivative", tol.ahlfors_log_derivative);
    log_derivative.record(f.log_derivative_residual());
    let mut branch = Tally::new("branch_count", tol.branch_count);
    let count: usize = ctx.branch_points.iter().map(|b| b.multiplicity).sum();
    branch.record((count as f64 - (2 * n - 2) as f64).abs());

    let mut interpolation = Tally::new("kernel_interpolation", tol.kernel_interpolation);
    let mut garabedian = Tally::new("garabedian_interpolation", tol.garabedian_interpolation);
    match szego_zeros(&f.kernel).and_then(|zeros| fit_interpolation_coeffs(&ctx.szego, f, &zeros)) {
        Ok(fit) => {
            interpolation.record(fit.heldout_residual);
            garabedian.record(fit.garabedian_residual);
        }
        Err(e) => {
            interpolation.fail(e.to_string());
            garabedian.fail(e.to_string());
        }
    }
    vec![
        purity,
        normalization,
        i_sigma,
        unimodular,
        degree,
        zero,
        derivative,
        log_derivative,
        branch,
        interpolation,
        garabedian,
    ]
}

const SOURCE_IDENTITIES: [&str; 18] = [
    "kernel_boundary_identity",
    "kernel_reproducing",
    "lambda_sum",
    "boundary_reflection",
    "green_gradient",
    "green_by_path",
    "green_symmetry",
    "green_decomposition",
    "path_independence",
    "type2_v",
    "type2_v_imaginary",
    "lambda_contour",
    "lambda_contour_imaginary",
    "green_composition",
    "poisson_real",
    "poisson_positive",
    "poisson_mass",
    "poisson_periods",
];

fn source_tallies(tol: &Tolerances) -> Vec<Tally> {
    let t = [
        tol.kernel_boundary_identity,
        tol.kernel_reproducing,
        tol.lambda_sum,
        tol.boundary_reflection,
        tol.green_gradient,
        tol.green_by_path,
        tol.green_symmetry,
        tol.green_decomposition,
        tol.path_independence,
        tol.type2_v,
        tol.type2_v_imaginary,
        tol.lambda_contour,
        tol.lambda_contour_imaginary,
        tol.green_composition,
        tol.poisson_real,
        tol.poisson_positive,
        tol.poisson_mass,
        tol.poisson_periods,
    ];
    SOURCE_IDENTITIES
        .iter()
        .zip(t)
        .map(|(name, tol)| Tally::new(name, tol))
        .collect()
}

/// Probes for source `w`: the interior probe lattice minus a disc about `w`.
pub fn probes_for(session: &Session, w: Complex64) -> Vec<Complex64> {
    let ctx = &session.ctx;
    let grid = ctx.grid();
    let cfg = &session.config.probe_grid;
    let clearance = (cfg.source_clearance * grid.domain().diameter()).max(ctx.exclusion_radius());
    grid.domain()
        .interior_lattice(cfg.per_axis, cfg.boundary_spacings * grid.max_spacing())
        .into_iter()
        .filter(|z| (z - w).norm() > clearance)
        .collect()
}

fn source_checks(session: &Session, w: Complex64) -> Vec<Tally> {
    let mut t = source_tallies(&session.config.tolerances);
    let ctx = &session.ctx;
    let asm = match ctx.assemble(w) {
        Ok(a) => a,
        Err(e) => {
            for tally in &mut t {
                tally.fail(e.to_string());
            }
            return t;
        }
    };
    let [bi, rep, lsum, refl, grad, by_path, sym, thm2, indep, v2, v2im, thm3, thm3im, thm1, preal, ppos, pmass, pper] =
        &mut t[..]
    else {
        unreachable!()
    };
    let holes = ctx.grid().connectivity() - 1;
    let diameter = ctx.grid().domain().diameter();
    let step = session.config.probe_grid.fd_step * diameter;

    bi.record(asm.kernel.boundary_identity_residual());
    rep.record(asm.kernel.reproducing_residual(5));
    lsum.record((asm.lambda.iter().sum::<f64>() - 1.0).abs());
    refl.record(asm.boundary_reflection_residual());

    let probes = probes_for(session, w);
    for &z in &probes {
        let direct = match asm.direct.value(z) {
            Ok(v) => v,
            Err(e) => {
                for tally in [&mut *grad, &mut *by_path, &mut *sym, &mut *thm2, &mut *thm1] {
                    tally.fail(e.to_string());
                }
                continue;
            }
        };
        grad.outcome(
            asm.green_z(z)
                .and_then(|g| Ok((g - asm.direct.fd_gradient(z, step)?).norm())),
        );
        by_path.outcome(asm.green_by_path(z, None).map(|g| (g - direct).abs()));
        sym.outcome(DirectGreen::new(&ctx.dirichlet, z).and_then(|g| Ok((g.value(w)? - direct).abs())));
        thm2.outcome(asm.theorem2_decompose(z, None).map(|d| (d.total - direct).abs()));
        thm1.outcome(
            asm.theorem1_compose(z, None)
                .map(|c| (c.reconstruction - c.correction).abs().max((c.total - direct).abs())),
        );
    }
    for &z in probes.iter().take(session.config.probe_grid.path_probes) {
        for hole in 0..holes {
            indep.outcome(path_gap(&asm, z, hole));
        }
    }
    for k in 0..holes {
        match asm.type2_v(k) {
            Ok(v) => {
                v2.record((v.by_path - v.by_frame).abs());
                v2im.record(v.imaginary.abs());
            }
            Err(e) => {
                v2.fail(e.to_string());
                v2im.fail(e.to_string());
            }
        }
        let (l, im) = asm.theorem3_lambda(k);
        thm3.record((l - asm.lambda[k]).abs());
        thm3im.record(im.abs());
        pper.record((asm.green_z_period(k) - Complex64::new(0.0, PI * asm.omega[k])).norm());
    }
    let mut lowest = f64::INFINITY;
    let mut imag = 0f64;
    for i in 0..ctx.grid().len() {
        let (re, im) = asm.poisson_kernel(i);
        lowest = lowest.min(re);
        imag = imag.max(im.abs());
    }
    preal.record(imag);
    ppos.record((-lowest).max(0.0));
    pmass.record((asm.poisson_mass() - 1.0).abs());
    t
}

/// Largest disagreement of `alpha_re` and of `G` between two homotopy classes.
fn path_gap(asm: &GreenAssembly<'_>, z: Complex64, hole: usize) -> crate::Result<f64> {
    let (a, b) = asm.homotopy_pair(z, hole)?;
    let da = asm.theorem2_decompose(z, Some(&a))?;
    let db = asm.theorem2_decompose(z, Some(&b))?;
    let ga = asm.green_by_path(z, Some(&a))?;
    let gb = asm.green_by_path(z, Some(&b))?;
    Ok((da.alpha_re - db.alpha_re).abs().max((ga - gb).abs()))
}
