//! Acceptance checks against closed forms on the disc and the annulus and
//! against identities on a disc with two holes. One line per criterion;
//! the process exits nonzero when any criterion fails.

use std::f64::consts::PI;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use ahlfors_green::geometry::{discretize, BoundaryGrid, CurveSpec, DomainSpec, Role};
use ahlfors_green::green::{calibrated_signs, DirectGreen, GreenContext};
use ahlfors_green::harmonic::{harmonic_frame, lambda, DirichletSolver};
use ahlfors_green::oracle::{annulus_green, annulus_harmonic};
use ahlfors_green::path::PathSpec;
use ahlfors_green::szego::{ahlfors, fit_interpolation_coeffs, szego_zeros, SzegoSolver};
use ahlfors_green::{Complex64, Result};

const Q: f64 = 0.5;
/// Residuals at or below this level are round-off for the sizes used here.
const ROUNDOFF_FLOOR: f64 = 1e-11;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn disc() -> DomainSpec {
    DomainSpec::new(vec![CurveSpec::circle(c(0.0, 0.0), 1.0, Role::Outer)]).unwrap()
}

fn annulus() -> DomainSpec {
    DomainSpec::new(vec![
        CurveSpec::circle(c(0.0, 0.0), Q, Role::Inner),
        CurveSpec::circle(c(0.0, 0.0), 1.0, Role::Outer),
    ])
    .unwrap()
}

fn two_holes() -> DomainSpec {
    DomainSpec::new(vec![
        CurveSpec::circle(c(-0.45, 0.1), 0.2, Role::Inner),
        CurveSpec::circle(c(0.4, -0.15), 0.15, Role::Inner),
        CurveSpec::circle(c(0.0, 0.0), 1.0, Role::Outer),
    ])
    .unwrap()
}

fn grid(d: &DomainSpec, m: usize) -> Arc<BoundaryGrid> {
    Arc::new(discretize(d, m).unwrap())
}

/// 25 points on five circles.
fn polar_probes(radii: [f64; 5]) -> Vec<Complex64> {
    let mut out = Vec::new();
    for (i, r) in radii.iter().enumerate() {
        for k in 0..5 {
            out.push(Complex64::from_polar(*r, 0.3 + 0.17 * i as f64 + 2.0 * PI * k as f64 / 5.0));
        }
    }
    out
}

fn disc_probes() -> Vec<Complex64> {
    polar_probes([0.1, 0.3, 0.5, 0.7, 0.85])
}

fn annulus_probes() -> Vec<Complex64> {
    polar_probes([0.6, 0.7, 0.75, 0.8, 0.9])
}

/// 25 lattice points of the two-hole domain away from `w`.
fn two_hole_probes(w: Complex64) -> Vec<Complex64> {
    let p: Vec<Complex64> = two_holes()
        .interior_lattice(9, 0.05)
        .into_iter()
        .filter(|z| (z - w).norm() > 0.15)
        .take(25)
        .collect();
    assert_eq!(p.len(), 25);
    p
}

fn max(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |a, b| if a.is_nan() || b.is_nan() { f64::NAN } else { a.max(b) })
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn disc_calibration() -> Result<Outcome> {
    let start = Instant::now();
    let g = grid(&disc(), 128);
    let solver = SzegoSolver::new(g.clone())?;
    let mut err = 0f64;
    for a in [c(0.0, 0.0), c(0.3, 0.0), c(-0.2, 0.4)] {
        let s = |z: Complex64| 1.0 / (2.0 * PI * (1.0 - a.conj() * z));
        let l = |z: Complex64| 1.0 / (2.0 * PI * (z - a));
        let mobius = |z: Complex64| (z - a) / (1.0 - a.conj() * z);
        let f = ahlfors(&solver, a)?;
        for i in 0..g.len() {
            let z = g.z[i];
            err = err.max((f.kernel.s[i] - s(z)).norm());
            err = err.max((f.kernel.l[i] - l(z)).norm());
            err = err.max((f.f[i] - mobius(z)).norm());
        }
        for z in disc_probes() {
            if (z - a).norm() < 0.05 {
                continue;
            }
            err = err.max((f.kernel.s_at(z) - s(z)).norm());
            err = err.max((f.kernel.l_at(z) - l(z)).norm());
            err = err.max((f.value(z) - mobius(z)).norm());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        err < 1e-8 && secs < 5.0,
        format!("max error {err:.2e} (tol 1e-8), {secs:.2} s (limit 5 s)"),
    )
}

fn annulus_frame() -> Result<Outcome> {
    let start = Instant::now();
    let frame = harmonic_frame(&DirichletSolver::new(grid(&annulus(), 256))?)?;
    let omega_err = max(annulus_probes()
        .into_iter()
        .map(|z| (frame.omega_at(0, z) - annulus_harmonic(Q, z).unwrap()).abs()));
    let p_want = c(0.0, 2.0 * PI / 2f64.ln());
    let p_err = (frame.periods[(0, 0)] - p_want).norm() / p_want.norm();
    let s_err = (frame.i_sigma()[(0, 0)] - 0.110_317_8).abs();
    let s_exact = (frame.i_sigma()[(0, 0)] - 2f64.ln() / (2.0 * PI)).abs();
    let secs = start.elapsed().as_secs_f64();
    check(
        omega_err < 1e-6 && p_err < 1e-6 && s_err < 1e-8 && secs < 30.0,
        format!(
            "omega err {omega_err:.2e} (1e-6), P11 rel err {p_err:.2e} (1e-6), iσ11 err {s_err:.2e} vs 0.1103178 (1e-8; {s_exact:.1e} vs ln2/2π), {secs:.2} s (limit 30 s)"
        ),
    )
}

fn direct_green() -> Result<Outcome> {
    let solver = DirichletSolver::new(grid(&annulus(), 256))?;
    let sources = [c(0.75, 0.0), c(-0.3, 0.65), c(0.1, -0.8), c(-0.6, -0.4), c(0.0, 0.55)];
    let probes = annulus_probes();
    let mut oracle_err = 0f64;
    let mut pairs = 0;
    let direct: Vec<DirectGreen> = sources
        .iter()
        .map(|&w| DirectGreen::new(&solver, w))
        .collect::<Result<_>>()?;
    for (k, g) in direct.iter().enumerate() {
        for z in probes.iter().skip(k).step_by(5) {
            oracle_err = oracle_err.max((g.value(*z)? - annulus_green(Q, *z, g.w)?).abs());
            pairs += 1;
        }
    }
    // symmetry on a 5×5 set: sources against sources and probes
    let mut sym = 0f64;
    for (i, gi) in direct.iter().enumerate() {
        for (j, gj) in direct.iter().enumerate() {
            if i != j {
                sym = sym.max((gi.value(gj.w)? - gj.value(gi.w)?).abs());
            }
        }
    }
    let solver3 = DirichletSolver::new(grid(&two_holes(), 256))?;
    let pts: Vec<Complex64> = two_hole_probes(c(9.0, 9.0)).into_iter().step_by(5).collect();
    let greens: Vec<DirectGreen> = pts.iter().map(|&w| DirectGreen::new(&solver3, w)).collect::<Result<_>>()?;
    for gi in &greens {
        for gj in &greens {
            if gi.w != gj.w {
                sym = sym.max((gi.value(gj.w)? - gj.value(gi.w)?).abs());
            }
        }
    }
    // boundary vanishing toward both circles
    let g = &direct[0];
    let mut levels = Vec::new();
    for d in [0.04, 0.02, 0.01] {
        let mut worst = 0f64;
        for k in 0..8 {
            let t = 0.2 + 2.0 * PI * k as f64 / 8.0;
            worst = worst.max(g.value(Complex64::from_polar(1.0 - d, t))?.abs());
            worst = worst.max(g.value(Complex64::from_polar(Q + d, t))?.abs());
        }
        levels.push(worst);
    }
    let monotone = levels.windows(2).all(|w| w[1] < w[0]);
    check(
        pairs == 25 && oracle_err < 1e-6 && sym < 1e-6 && monotone,
        format!(
            "oracle err {oracle_err:.2e} over {pairs} pairs (1e-6), symmetry {sym:.2e} (1e-6), boundary max |G| {:.2e} > {:.2e} > {:.2e}",
            levels[0], levels[1], levels[2]
        ),
    )
}

fn gradient_identity() -> Result<Outcome> {
    let signs = calibrated_signs()?;
    let mut parts = Vec::new();
    let mut pass = true;
    let cases = [
        ("disc", disc(), 128, c(0.0, 0.0), c(0.3, 0.0), disc_probes()),
        ("annulus", annulus(), 256, c(0.72, 0.0), c(0.75, 0.0), annulus_probes()),
        ("two holes", two_holes(), 256, c(0.0, 0.5), c(0.1, -0.6), two_hole_probes(c(0.1, -0.6))),
    ];
    for (name, domain, m, a, w, probes) in cases {
        let ctx = GreenContext::new(grid(&domain, m), a)?;
        let asm = ctx.assemble(w)?;
        let step = 1e-5 * domain.diameter();
        let mut err = 0f64;
        let mut n = 0;
        for z in probes {
            if (z - w).norm() < 0.05 {
                continue;
            }
            err = err.max((asm.green_z(z)? - asm.direct.fd_gradient(z, step)?).norm());
            n += 1;
        }
        pass &= err < 1e-4 && n >= 25 - 1;
        parts.push(format!("{name} {err:.2e} ({n} probes)"));
    }
    check(
        pass,
        format!("ε1 = {}, ε2 = {}; max |G_z − FD| {} (tol 1e-4)", signs.eps1, signs.eps2, parts.join(", ")),
    )
}

fn decomposition() -> Result<Outcome> {
    let mut parts = Vec::new();
    let mut pass = true;
    let cases = [
        ("annulus", annulus(), c(0.72, 0.0), c(0.75, 0.0), annulus_probes()),
        ("two holes", two_holes(), c(0.0, 0.5), c(0.1, -0.6), two_hole_probes(c(0.1, -0.6))),
    ];
    for (name, domain, a, w, probes) in cases {
        let ctx = GreenContext::new(grid(&domain, 256), a)?;
        let asm = ctx.assemble(w)?;
        let (mut err, mut literal, mut independence) = (0f64, 0f64, 0f64);
        let mut n = 0;
        for (k, &z) in probes.iter().enumerate() {
            if (z - w).norm() < 0.05 {
                continue;
            }
            let direct = asm.direct.value(z)?;
            let d = asm.theorem2_decompose(z, None)?;
            err = err.max((d.total - direct).abs());
            literal = literal.max((d.alpha_re + 0.5 * d.correction - direct).abs());
            n += 1;
            if k % 5 == 0 {
                for hole in 0..domain.connectivity() - 1 {
                    let (p1, p2) = asm.homotopy_pair(z, hole)?;
                    let a1 = asm.theorem2_decompose(z, Some(&p1))?.alpha_re;
                    let a2 = asm.theorem2_decompose(z, Some(&p2))?.alpha_re;
                    independence = independence.max((a1 - a2).abs());
                }
            }
        }
        pass &= err < 1e-5 && independence < 1e-6 && n >= 24;
        parts.push(format!(
            "{name}: {err:.2e} over {n} probes, homotopy gap {independence:.2e} (single-π form misses by {literal:.1e})"
        ));
    }
    // annulus paths above and below the hole
    let ctx = GreenContext::new(grid(&annulus(), 256), c(0.72, 0.0))?;
    let asm = ctx.assemble(c(0.75, 0.0))?;
    let z = c(-0.75, 0.0);
    let above = PathSpec::new(vec![ctx.z0.z, c(0.6, 0.6), c(-0.6, 0.6), z]);
    let below = PathSpec::new(vec![ctx.z0.z, c(0.6, -0.6), c(-0.6, -0.6), z]);
    let gap = (asm.theorem2_decompose(z, Some(&above))?.alpha_re - asm.theorem2_decompose(z, Some(&below))?.alpha_re).abs();
    let g_gap = (asm.green_by_path(z, Some(&above))? - asm.green_by_path(z, Some(&below))?).abs();
    let oracle = (asm.green_by_path(z, Some(&above))? - annulus_green(Q, z, c(0.75, 0.0))?).abs();
    pass &= gap < 1e-6 && g_gap < 1e-6 && oracle < 1e-5;
    parts.push(format!("above/below hole: α gap {gap:.2e}, G gap {g_gap:.2e}, G vs oracle {oracle:.2e}"));
    check(pass, format!("{} (tol 1e-5 / 1e-6)", parts.join("; ")))
}

fn contour_lambda() -> Result<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();
    let cases = [
        ("annulus", annulus(), c(0.72, 0.0), vec![c(0.75, 0.0), c(-0.3, 0.65), c(0.1, -0.8), c(0.55, 0.0), c(-0.95, 0.1)]),
        ("two holes", two_holes(), c(0.0, 0.5), vec![c(0.1, -0.6), c(0.6, 0.4), c(-0.5, -0.5), c(0.0, 0.0), c(-0.8, 0.4)]),
    ];
    for (name, domain, a, sources) in cases {
        let ctx = GreenContext::new(grid(&domain, 256), a)?;
        let (mut err, mut imag, mut sum) = (0f64, 0f64, 0f64);
        for w in sources {
            let asm = ctx.assemble(w)?;
            for k in 0..domain.connectivity() {
                let (l, im) = asm.theorem3_lambda(k);
                err = err.max((l - asm.lambda[k]).abs());
                imag = imag.max(im.abs());
            }
            sum = sum.max((asm.lambda.iter().sum::<f64>() - 1.0).abs());
        }
        pass &= err < 1e-6 && sum < 1e-8 && imag < 1e-8;
        parts.push(format!("{name}: contour err {err:.2e}, imag {imag:.1e}, |Σλ−1| {sum:.1e}"));
    }
    // boundary agreement on the two-hole domain
    let domain = two_holes();
    let g = grid(&domain, 256);
    let solver = SzegoSolver::new(g.clone())?;
    let frame = harmonic_frame(&DirichletSolver::new(g)?)?;
    let mut levels = Vec::new();
    // below about half the smallest hole radius, where the gap decays
    for d in [0.08, 0.05, 0.03] {
        let mut probes: Vec<Complex64> = (0..8).map(|k| Complex64::from_polar(1.0 - d, 0.4 + PI * k as f64 / 4.0)).collect();
        for (center, r) in [(c(-0.45, 0.1), 0.2), (c(0.4, -0.15), 0.15)] {
            probes.extend((0..8).map(|k| center + Complex64::from_polar(r + d, 0.4 + PI * k as f64 / 4.0)));
        }
        let mut worst = 0f64;
        for w in probes {
            if (domain.min_boundary_distance(w) - d).abs() > 1e-9 {
                continue;
            }
            let l = lambda(&solver.solve(w)?);
            for j in 0..3 {
                worst = worst.max((l[j] - frame.omega_at(j, w)).abs());
            }
        }
        levels.push(worst);
    }
    let monotone = levels.windows(2).all(|w| w[1] < w[0]);
    pass &= monotone;
    parts.push(format!(
        "sup |λ−ω| at 0.08/0.05/0.03 from the boundary: {:.2e} > {:.2e} > {:.2e}",
        levels[0], levels[1], levels[2]
    ));
    check(pass, format!("{} (tol 1e-6, 1e-8)", parts.join("; ")))
}

fn type_two() -> Result<Outcome> {
    let ctx = GreenContext::new(grid(&annulus(), 256), c(0.72, 0.0))?;
    let (mut err, mut imag) = (0f64, 0f64);
    let mut values = Vec::new();
    for w in [c(0.75, 0.0), c(-0.3, 0.65), c(0.1, -0.8), c(0.6, 0.5), c(-0.85, 0.0)] {
        let v = ctx.assemble(w)?.type2_v(0)?;
        err = err.max((v.by_path - v.by_frame).abs());
        imag = imag.max(v.imaginary.abs());
        values.push(v.by_path);
    }
    let w = Complex64::from_polar(Q.sqrt(), 1.0);
    let conj = (ctx.assemble(w)?.type2_v(0)?.by_path - ctx.assemble(w.conj())?.type2_v(0)?.by_path).abs();
    check(
        err < 1e-5 && imag < 1e-8 && conj < 1e-6,
        format!(
            "path vs frame {err:.2e} (1e-5), imaginary {imag:.1e} (1e-8), v(w) − v(w̄) {conj:.1e} (1e-6); v range [{:.3e}, {:.3e}]",
            values.iter().cloned().fold(f64::INFINITY, f64::min),
            values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        ),
    )
}

fn interpolation() -> Result<Outcome> {
    let solver = SzegoSolver::new(grid(&annulus(), 256))?;
    let f = ahlfors(&solver, c(0.72, 0.0))?;
    let fit = fit_interpolation_coeffs(&solver, &f, &szego_zeros(&f.kernel)?)?;
    let solver = SzegoSolver::new(grid(&disc(), 128))?;
    let f = ahlfors(&solver, c(0.0, 0.0))?;
    let disc_fit = fit_interpolation_coeffs(&solver, &f, &[])?;
    let c00 = (disc_fit.c[(0, 0)] - 2.0 * PI).norm() / (2.0 * PI);
    check(
        fit.heldout_residual < 1e-6 && fit.garabedian_residual < 1e-5 && c00 < 1e-8 && disc_fit.c.len() == 1,
        format!(
            "annulus held-out {:.2e} (1e-6), Garabedian {:.2e} (1e-5); disc c00 rel err {c00:.1e} (1e-8)",
            fit.heldout_residual, fit.garabedian_residual
        ),
    )
}

fn ahlfors_properties() -> Result<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, domain, m, a) in [
        ("disc", disc(), 128, c(0.3, 0.0)),
        ("annulus", annulus(), 256, c(0.72, 0.0)),
        ("two holes", two_holes(), 256, c(0.0, 0.5)),
    ] {
        let n = domain.connectivity();
        let ctx = GreenContext::new(grid(&domain, m), a)?;
        let f = &ctx.ahlfors;
        let unimodular = f.unimodularity_residual();
        let turn = (f.boundary_argument_change() - 2.0 * PI * n as f64).abs();
        let zero = f.value(a).norm();
        let want = 2.0 * PI * f.kernel.s_diag;
        let deriv = (f.derivative(a) - want).norm() / want;
        let branch: usize = ctx.branch_points.iter().map(|b| b.multiplicity).sum();
        pass &= unimodular < 1e-8 && turn < 1e-6 && zero < 1e-8 && deriv < 1e-6 && branch == 2 * n - 2;
        parts.push(format!(
            "{name}: ||f|−1| {unimodular:.1e}, Δarg−2πn {turn:.1e}, |f(a)| {zero:.1e}, f'(a) rel {deriv:.1e}, branch points {branch}"
        ));
    }
    check(pass, parts.join("; "))
}

fn poisson() -> Result<Outcome> {
    let ctx = GreenContext::new(grid(&annulus(), 256), c(0.72, 0.0))?;
    let (mut lowest, mut mass, mut period) = (f64::INFINITY, 0f64, 0f64);
    let mut at_075 = c(0.0, 0.0);
    for w in [c(0.75, 0.0), c(-0.3, 0.65), c(0.1, -0.8), c(0.0, 0.9), c(-0.6, 0.0)] {
        let asm = ctx.assemble(w)?;
        for i in 0..ctx.grid().len() {
            lowest = lowest.min(asm.poisson_kernel(i).0);
        }
        mass = mass.max((asm.poisson_mass() - 1.0).abs());
        let p = asm.green_z_period(0);
        period = period.max((p - c(0.0, PI * annulus_harmonic(Q, w)?)).norm());
        if w == c(0.75, 0.0) {
            at_075 = p;
        }
    }
    check(
        lowest > 0.0 && mass < 1e-7 && period < 1e-6,
        format!(
            "min P {lowest:.3e} (> 0), |mass−1| {mass:.1e} (1e-7), |∮G_z − iπω| {period:.1e} (1e-6); at w=0.75: i·{:.6}",
            at_075.im
        ),
    )
}

/// Residuals of the checks above at node count `m`.
fn residuals(m: usize) -> Result<Vec<(&'static str, f64)>> {
    let mut out = Vec::new();

    let g = grid(&annulus(), m);
    let dirichlet = DirichletSolver::new(g.clone())?;
    let frame = harmonic_frame(&dirichlet)?;
    out.push((
        "annulus ω vs closed form",
        max(annulus_probes().into_iter().map(|z| (frame.omega_at(0, z) - annulus_harmonic(Q, z).unwrap()).abs())),
    ));
    out.push(("annulus P11", (frame.periods[(0, 0)] - c(0.0, 2.0 * PI / 2f64.ln())).norm()));
    let w = c(0.75, 0.0);
    let direct = DirectGreen::new(&dirichlet, w)?;
    out.push((
        "annulus G vs oracle",
        max(annulus_probes().into_iter().map(|z| (direct.value(z).unwrap() - annulus_green(Q, z, w).unwrap()).abs())),
    ));
    let solver = SzegoSolver::new(g)?;
    let f = ahlfors(&solver, c(0.72, 0.0))?;
    let fit = fit_interpolation_coeffs(&solver, &f, &szego_zeros(&f.kernel)?)?;
    out.push(("annulus kernel interpolation held-out", fit.heldout_residual));
    out.push(("annulus Garabedian interpolation", fit.garabedian_residual));

    let domain = two_holes();
    let w = c(0.1, -0.6);
    let ctx = GreenContext::new(grid(&domain, m), c(0.0, 0.5))?;
    let f = &ctx.ahlfors;
    out.push(("Ahlfors log derivative", f.log_derivative_residual()));
    out.push(("|f| on boundary", f.unimodularity_residual()));
    let want = 2.0 * PI * f.kernel.s_diag;
    out.push(("f'(a) vs 2πS(a,a)", (f.derivative(f.a) - want).norm() / want));
    out.push(("frame normalization", ctx.frame.u_normalization_residual()));
    out.push(("period purity", ctx.frame.period_purity()));
    let asm = ctx.assemble(w)?;
    out.push(("boundary reflection", asm.boundary_reflection_residual()));
    let probes = two_hole_probes(w);
    let mut grad = 0f64;
    let mut thm2 = 0f64;
    for &z in &probes {
        grad = grad.max((asm.green_z(z)? - asm.direct.gradient(z)?).norm());
        thm2 = thm2.max((asm.theorem2_decompose(z, None)?.total - asm.direct.value(z)?).abs());
    }
    out.push(("G_z vs direct gradient", grad));
    out.push(("principal-term reconstruction", thm2));
    let (mut thm3, mut v2) = (0f64, 0f64);
    for k in 0..2 {
        thm3 = thm3.max((asm.theorem3_lambda(k).0 - asm.lambda[k]).abs());
        let v = asm.type2_v(k)?;
        v2 = v2.max((v.by_path - v.by_frame).abs());
    }
    out.push(("contour λ", thm3));
    out.push(("v_k path vs frame", v2));
    out.push(("Poisson mass", (asm.poisson_mass() - 1.0).abs()));
    out.push(("Σλ − 1", (asm.lambda.iter().sum::<f64>() - 1.0).abs()));
    Ok(out)
}

fn convergence() -> Result<Outcome> {
    let coarse = residuals(128)?;
    let fine = residuals(256)?;
    let mut failed = Vec::new();
    let mut floor = 0;
    let mut reduced = Vec::new();
    for ((name, r1), (_, r2)) in coarse.iter().zip(&fine) {
        if *r2 <= ROUNDOFF_FLOOR {
            floor += 1;
        } else if *r2 <= r1 / 10.0 {
            reduced.push(format!("{name} {r1:.1e}→{r2:.1e}"));
        } else {
            failed.push(format!("{name} {r1:.1e}→{r2:.1e}"));
        }
    }
    check(
        failed.is_empty(),
        format!(
            "{} residuals reduced ≥10× [{}]; {floor} at round-off (≤ {ROUNDOFF_FLOOR:.0e}) at m=256{}",
            reduced.len(),
            reduced.join(", "),
            if failed.is_empty() {
                String::new()
            } else {
                format!("; not reduced: {}", failed.join(", "))
            }
        ),
    )
}

fn determinism() -> Result<Outcome> {
    let dir = tempfile::TempDir::new().unwrap();
    let config = dir.path().join("two_holes.json");
    std::fs::write(
        &config,
        r#"{
  "name": "two-holes",
  "curves": [
    {"kind": "circle", "center": [-0.45, 0.1], "radius": 0.2, "role": "inner"},
    {"kind": "circle", "center": [0.4, -0.15], "radius": 0.15, "role": "inner"},
    {"kind": "circle", "center": [0.0, 0.0], "radius": 1.0, "role": "outer"}
  ],
  "nodes_per_curve": 256,
  "base_point": [0.0, 0.5],
  "sources": [[0.1, -0.6], [0.6, 0.4]],
  "probe_grid": {"per_axis": 5, "path_probes": 1}
}"#,
    )
    .unwrap();
    let mut reports = Vec::new();
    let mut codes = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let o = Command::new(env!("CARGO_BIN_EXE_ahlfors-green"))
            .args(["verify", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .output()
            .unwrap();
        codes.push(o.status.code());
        reports.push(std::fs::read(out.join("report.json")).unwrap_or_default());
    }
    let same = !reports[0].is_empty() && reports[0] == reports[1];
    check(
        same && codes == [Some(0), Some(0)],
        format!("two verify runs: exit codes {codes:?}, reports identical: {same} ({} bytes)", reports[0].len()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Result<Outcome>); 12] = [
        ("disc calibration", disc_calibration),
        ("annulus frame", annulus_frame),
        ("direct Green vs oracle", direct_green),
        ("G_z decomposition vs finite differences", gradient_identity),
        ("Green reconstruction from the principal term", decomposition),
        ("λ by contour integral", contour_lambda),
        ("type II constants v_k", type_two),
        ("kernel interpolation coefficients", interpolation),
        ("Ahlfors map properties", ahlfors_properties),
        ("Poisson kernel", poisson),
        ("convergence under doubling m", convergence),
        ("determinism of verify", determinism),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "{} {:>2} {name}: {detail} [{:.1} s]",
            if pass { "PASS" } else { "FAIL" },
            k + 1,
            start.elapsed().as_secs_f64()
        );
    }
    if failures > 0 {
        println!("{failures} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
