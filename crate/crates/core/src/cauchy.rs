//! Interior evaluation of holomorphic boundary data and spectral
//! differentiation along the boundary.
//!
//! Cauchy integrals use the barycentric form
//! `Σ h_j w_j/(ζ_j−z) / Σ w_j/(ζ_j−z)`, which is exact for constants and
//! stays accurate up to the boundary for traces of functions holomorphic in
//! a neighbourhood of the closed domain.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::Result;
use crate::geometry::BoundaryGrid;

/// `(1/2πi) ∮ h(ζ)/(ζ−z) dζ` for `z` inside the domain, without a
/// membership check.
pub fn cauchy_eval_unchecked(grid: &BoundaryGrid, values: &[Complex64], z: Complex64) -> Complex64 {
    let mut num = Complex64::default();
    let mut den = Complex64::default();
    for (i, (&zeta, &v)) in grid.z.iter().zip(values).enumerate() {
        let d = zeta - z;
        if d.norm_sqr() == 0.0 {
            return v;
        }
        let w = grid.dz[i] / d;
        num += v * w;
        den += w;
    }
    num / den
}

/// Checked Cauchy evaluation: `z` must be strictly inside the domain.
pub fn cauchy_eval(grid: &BoundaryGrid, values: &[Complex64], z: Complex64) -> Result<Complex64> {
    grid.require_interior(z)?;
    Ok(cauchy_eval_unchecked(grid, values, z))
}

/// Derivative of the Cauchy integral, `(1/2πi) ∮ h(ζ)/(ζ−z)² dζ`, written in
/// barycentric form with the value at `z` subtracted.
pub fn cauchy_derivative_unchecked(
    grid: &BoundaryGrid,
    values: &[Complex64],
    z: Complex64,
) -> Complex64 {
    let hz = cauchy_eval_unchecked(grid, values, z);
    let mut num = Complex64::default();
    let mut den = Complex64::default();
    for (i, (&zeta, &v)) in grid.z.iter().zip(values).enumerate() {
        let d = zeta - z;
        let w = grid.dz[i] / d;
        num += (v - hz) * w / d;
        den += w;
    }
    num / den
}

pub fn cauchy_derivative(grid: &BoundaryGrid, values: &[Complex64], z: Complex64) -> Result<Complex64> {
    grid.require_interior(z)?;
    Ok(cauchy_derivative_unchecked(grid, values, z))
}

/// `d/dt` of periodic samples on each curve, by FFT.
pub fn spectral_dt(grid: &BoundaryGrid, values: &[Complex64]) -> Vec<Complex64> {
    let m = grid.nodes_per_curve();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    let mut out = Vec::with_capacity(values.len());
    for j in 0..grid.connectivity() {
        let mut buf: Vec<Complex64> = values[grid.curve_range(j)].to_vec();
        fwd.process(&mut buf);
        for (idx, c) in buf.iter_mut().enumerate() {
            let k = if idx < m / 2 {
                idx as f64
            } else if idx == m / 2 {
                0.0
            } else {
                idx as f64 - m as f64
            };
            *c *= Complex64::new(0.0, k / m as f64);
        }
        inv.process(&mut buf);
        out.extend(buf);
    }
    out
}

/// Boundary values of `h'` from boundary values of a holomorphic `h`.
pub fn boundary_derivative(grid: &BoundaryGrid, values: &[Complex64]) -> Vec<Complex64> {
    spectral_dt(grid, values)
        .into_iter()
        .zip(&grid.dz)
        .map(|(ht, dz)| ht / dz)
        .collect()
}

/// Continuous change of `arg h` along each curve, summed over the boundary.
pub fn boundary_argument_change(grid: &BoundaryGrid, values: &[Complex64]) -> f64 {
    let mut total = 0.0;
    for j in 0..grid.connectivity() {
        let r = grid.curve_range(j);
        let vals = &values[r.clone()];
        for i in 0..vals.len() {
            total += (vals[(i + 1) % vals.len()] / vals[i]).arg();
        }
    }
    total
}
