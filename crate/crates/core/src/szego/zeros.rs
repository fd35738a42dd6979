//! Zeros of holomorphic functions given by boundary traces.
//!
//! The count comes from the argument principle on the boundary. Locations
//! come from the power sums `(1/2πi) ∮ (z−c)^p h'/h dz`, turned into a
//! polynomial by Newton's identities, and are then polished with Newton's
//! method on the Cauchy-evaluated function.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::{AhlforsEvaluator, KernelSet, SzegoSolver};
use crate::cauchy::{cauchy_derivative_unchecked, cauchy_eval_unchecked, spectral_dt};
use crate::error::{Error, Result};
use crate::geometry::{discretize, BoundaryGrid};

/// Relative distance (units of the domain diameter) under which polished
/// zeros are merged into one zero of higher multiplicity.
pub const CLUSTER_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Zero {
    pub z: Complex64,
    pub multiplicity: usize,
}

/// Roots of the monic polynomial with coefficients `coef[k]` of `x^k`
/// (leading coefficient omitted) by the Aberth iteration.
fn polynomial_roots(coef: &[Complex64]) -> Vec<Complex64> {
    let n = coef.len();
    let eval = |x: Complex64| {
        let mut p = Complex64::new(1.0, 0.0);
        let mut dp = Complex64::default();
        for k in (0..n).rev() {
            dp = dp * x + p;
            p = p * x + coef[k];
        }
        (p, dp)
    };
    let radius = 1.0 + coef.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut roots: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(0.5 * radius, 2.0 * PI * k as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..500 {
        let mut biggest: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = eval(roots[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| 1.0 / (roots[i] - roots[j]))
                .sum();
            let step = ratio / (1.0 - ratio * repulsion);
            roots[i] -= step;
            biggest = biggest.max(step.norm());
        }
        if biggest < 1e-15 * radius {
            break;
        }
    }
    roots
}

/// Zeros of the holomorphic function with boundary trace `h` on `grid`.
///
/// When `expected` is given, a different argument-principle count is an
/// error.
pub fn locate_zeros(grid: &BoundaryGrid, h: &[Complex64], expected: Option<usize>) -> Result<Vec<Zero>> {
    let ht = spectral_dt(grid, h);
    let step = grid.step();
    let log_deriv: Vec<Complex64> = ht.iter().zip(h).map(|(d, v)| d / v * step).collect();
    let count = log_deriv.iter().sum::<Complex64>() / Complex64::new(0.0, 2.0 * PI);
    let n = count.re.round();
    if (count - n).norm() > 0.05 || n < 0.0 || expected.is_some_and(|e| e as f64 != n) {
        return Err(Error::CountMismatch {
            expected: expected.unwrap_or(n.max(0.0) as usize),
            found: count.re,
        });
    }
    let n = n as usize;
    if n == 0 {
        return Ok(Vec::new());
    }

    let outer = grid.curve_range(grid.outer());
    let center: Complex64 = grid.z[outer.clone()].iter().sum::<Complex64>() / outer.len() as f64;
    let power_sums: Vec<Complex64> = (1..=n)
        .map(|p| {
            grid.z
                .iter()
                .zip(&log_deriv)
                .map(|(z, d)| (z - center).powi(p as i32) * d)
                .sum::<Complex64>()
                / Complex64::new(0.0, 2.0 * PI)
        })
        .collect();
    // Newton's identities: elementary symmetric polynomials from power sums
    let mut e = vec![Complex64::new(1.0, 0.0)];
    for k in 1..=n {
        let mut acc = Complex64::default();
        for i in 1..=k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * e[k - i] * power_sums[i - 1];
        }
        e.push(acc / k as f64);
    }
    // x^n − e1 x^{n−1} + e2 x^{n−2} − …
    let coef: Vec<Complex64> = (0..n)
        .map(|k| {
            let idx = n - k;
            if idx % 2 == 1 {
                -e[idx]
            } else {
                e[idx]
            }
        })
        .collect();
    let estimates: Vec<Complex64> = polynomial_roots(&coef).into_iter().map(|r| r + center).collect();

    let diameter = grid.domain().diameter();
    let hprime = crate::cauchy::boundary_derivative(grid, h);
    let mut polished = Vec::with_capacity(n);
    for z0 in estimates {
        let mut z = z0;
        for _ in 0..60 {
            let v = cauchy_eval_unchecked(grid, h, z);
            let d = cauchy_eval_unchecked(grid, &hprime, z);
            let mut dz = v / d;
            let cap = 0.05 * diameter;
            if dz.norm() > cap {
                dz *= cap / dz.norm();
            }
            z -= dz;
            if dz.norm() < 1e-15 * diameter {
                break;
            }
        }
        if !grid.domain().contains(z).unwrap_or(false) {
            return Err(Error::CountMismatch {
                expected: n,
                found: polished.len() as f64,
            });
        }
        polished.push(z);
    }

    let mut zeros: Vec<Zero> = Vec::new();
    for z in polished {
        match zeros
            .iter_mut()
            .find(|q| (q.z - z).norm() < CLUSTER_TOLERANCE * diameter)
        {
            Some(q) => q.multiplicity += 1,
            None => zeros.push(Zero { z, multiplicity: 1 }),
        }
    }
    zeros.sort_by(|a, b| a.z.re.total_cmp(&b.z.re).then(a.z.im.total_cmp(&b.z.im)));
    Ok(zeros)
}

/// The `n − 1` zeros of `S(·, a)` in the domain.
pub fn szego_zeros(kernel: &KernelSet) -> Result<Vec<Complex64>> {
    let grid = kernel.grid();
    let expected = grid.connectivity() - 1;
    let zeros = locate_zeros(grid, &kernel.s, Some(expected))?;
    let diameter = grid.domain().diameter();
    let distinct = zeros.iter().all(|z| z.multiplicity == 1)
        && zeros.iter().enumerate().all(|(i, a)| {
            zeros[i + 1..]
                .iter()
                .all(|b| (a.z - b.z).norm() > 1e-6 * diameter)
        });
    if !distinct || zeros.len() != expected {
        return Err(Error::NotDistinct(kernel.w));
    }
    // residual check against the Cauchy-evaluated kernel
    for z in &zeros {
        let scale = kernel.s_derivative_at(z.z).norm().max(1.0);
        if cauchy_eval_unchecked(grid, &kernel.s, z.z).norm() > 1e-8 * scale {
            return Err(Error::NotDistinct(kernel.w));
        }
    }
    Ok(zeros.into_iter().map(|z| z.z).collect())
}

/// Branch points of the Ahlfors map: zeros of `f'` in the domain, counted
/// with multiplicity (`2n − 2` in total). A count mismatch triggers one
/// refinement on a grid with twice the nodes before failing.
pub fn branch_locus(f: &AhlforsEvaluator) -> Result<Vec<Zero>> {
    let grid = f.grid();
    let expected = 2 * grid.connectivity() - 2;
    match locate_zeros(grid, &f.fprime, None) {
        Ok(z) if total(&z) == expected => Ok(z),
        _ => {
            let finer = Arc::new(discretize(grid.domain(), 2 * grid.nodes_per_curve())?);
            let solver = SzegoSolver::new(finer)?;
            let refined = super::ahlfors(&solver, f.a)?;
            let zeros = locate_zeros(refined.grid(), &refined.fprime, None)?;
            if total(&zeros) != expected {
                return Err(Error::CountMismatch {
                    expected,
                    found: total(&zeros) as f64,
                });
            }
            Ok(zeros)
        }
    }
}

fn total(z: &[Zero]) -> usize {
    z.iter().map(|z| z.multiplicity).sum()
}

/// Newton residual `|f'(z)|/|f''(z)|` at a computed branch point.
pub fn branch_point_residual(f: &AhlforsEvaluator, z: Complex64) -> f64 {
    let d = cauchy_eval_unchecked(f.grid(), &f.fprime, z);
    let dd = cauchy_derivative_unchecked(f.grid(), &f.fprime, z);
    d.norm() / dd.norm().max(1e-300)
}
