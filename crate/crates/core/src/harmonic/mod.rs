//! Harmonic measures, the functions `F_j' = 2 ∂ω_j/∂z`, their period
//! matrix, the dual bases `u_j`, `μ_j` and the functionals `λ_j`.
//!
//! Curve indices follow the grid: holes are `0..n−1`, the outer curve is
//! `n − 1`. Harmonic measures of the holes are solved for; the outer one is
//! `1 − Σ` of the others.

mod dirichlet;

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::cauchy::cauchy_eval_unchecked;
use crate::error::{Error, Result};
use crate::geometry::BoundaryGrid;
use crate::path::{integrate_along_path, PathSpec};
use crate::szego::KernelSet;

pub use dirichlet::{DirichletSolver, HarmonicFunction};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Harmonic extension of `data` (real samples on the grid).
pub fn solve_dirichlet(grid: Arc<BoundaryGrid>, data: &[f64]) -> Result<HarmonicFunction> {
    DirichletSolver::new(grid)?.solve(data)
}

pub struct HarmonicFrame {
    grid: Arc<BoundaryGrid>,
    /// `ω_j` for each hole `j`.
    pub omega: Vec<HarmonicFunction>,
    /// Outward normal derivatives of `ω_j` at the nodes.
    pub normal_derivatives: Vec<Vec<f64>>,
    /// Boundary samples of `F_j'`.
    pub fprime: Vec<Vec<Complex64>>,
    /// `P_kj = ∮_{γ_k} F_j' dz`.
    pub periods: DMatrix<Complex64>,
    /// `σ` with `Σ_m σ_jm P_km = δ_kj`.
    pub sigma: DMatrix<Complex64>,
    /// Boundary samples of `u_j = Σ_m σ_jm F_m'`.
    pub u: Vec<Vec<Complex64>>,
}

/// Build the frame from the Dirichlet solver. A simply connected domain
/// gives an empty frame.
pub fn harmonic_frame(solver: &DirichletSolver) -> Result<HarmonicFrame> {
    let grid = solver.grid().clone();
    let holes = grid.connectivity() - 1;
    let mut omega = Vec::with_capacity(holes);
    for j in 0..holes {
        let range = grid.curve_range(j);
        let data: Vec<f64> = (0..grid.len()).map(|i| if range.contains(&i) { 1.0 } else { 0.0 }).collect();
        omega.push(solver.solve(&data)?);
    }
    let normal_derivatives: Vec<Vec<f64>> = omega.iter().map(|w| w.normal_derivative()).collect();
    let fprime: Vec<Vec<Complex64>> = omega.iter().map(|w| w.fprime_boundary().to_vec()).collect();
    let periods = DMatrix::from_fn(holes, holes, |k, j| grid.contour_integral(k, &fprime[j]));
    let sigma = if holes == 0 {
        DMatrix::zeros(0, 0)
    } else {
        periods
            .transpose()
            .try_inverse()
            .ok_or_else(|| Error::SingularSystem {
                context: "period matrix".into(),
                condition: f64::INFINITY,
            })?
    };
    let u = (0..holes)
        .map(|j| {
            (0..grid.len())
                .map(|i| (0..holes).map(|m| sigma[(j, m)] * fprime[m][i]).sum())
                .collect()
        })
        .collect();
    Ok(HarmonicFrame {
        grid,
        omega,
        normal_derivatives,
        fprime,
        periods,
        sigma,
        u,
    })
}

impl HarmonicFrame {
    pub fn grid(&self) -> &Arc<BoundaryGrid> {
        &self.grid
    }

    pub fn holes(&self) -> usize {
        self.omega.len()
    }

    /// `ω_j(z)`; `j = n − 1` is the outer curve.
    pub fn omega_at(&self, j: usize, z: Complex64) -> f64 {
        if j < self.holes() {
            self.omega[j].value(z)
        } else {
            1.0 - self.omega.iter().map(|w| w.value(z)).sum::<f64>()
        }
    }

    /// `(ω_0(z), …, ω_{n−2}(z))` over the holes.
    pub fn omega_vector(&self, z: Complex64) -> Vec<f64> {
        self.omega.iter().map(|w| w.value(z)).collect()
    }

    /// `F_j'(z)` for `z` in the closed domain.
    pub fn fprime_at(&self, j: usize, z: Complex64) -> Complex64 {
        self.omega[j].fprime(z)
    }

    /// `u_j(z)` by Cauchy evaluation of its boundary trace.
    pub fn u_at(&self, j: usize, z: Complex64) -> Complex64 {
        cauchy_eval_unchecked(&self.grid, &self.u[j], z)
    }

    /// The real matrix `iσ`.
    pub fn i_sigma(&self) -> DMatrix<f64> {
        self.sigma.map(|s| (I * s).re)
    }

    /// `max |Im(iσ)|`.
    pub fn i_sigma_imaginary(&self) -> f64 {
        self.sigma.iter().map(|s| (I * s).im.abs()).fold(0.0, f64::max)
    }

    /// `max |Re P| / max |P|`.
    pub fn period_purity(&self) -> f64 {
        let scale = self.periods.iter().map(|p| p.norm()).fold(0.0, f64::max);
        self.periods.iter().map(|p| p.re.abs()).fold(0.0, f64::max) / scale.max(f64::MIN_POSITIVE)
    }

    /// `max_{j,k} |∮_{γ_k} u_j dz − δ_kj|`.
    pub fn u_normalization_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.holes() {
            for k in 0..self.holes() {
                let want = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((self.grid.contour_integral(k, &self.u[j]) - want).norm());
            }
        }
        worst
    }

    /// `μ_j(z) = Σ_m (iσ)_jm ω_m(z)`.
    pub fn mu_at(&self, j: usize, z: Complex64) -> f64 {
        let w = self.omega_vector(z);
        (0..self.holes()).map(|m| (I * self.sigma[(j, m)]).re * w[m]).sum()
    }

    /// `max |F_j' − i (∂ω_j/∂n) conj(T)|` over the nodes.
    pub fn normal_relation_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.holes() {
            for i in 0..self.grid.len() {
                let alt = I * self.normal_derivatives[j][i] * self.grid.tangent[i].conj();
                worst = worst.max((self.fprime[j][i] - alt).norm());
            }
        }
        worst
    }

    /// `ω_j(z) − ω_j(start) = Re ∫ F_j'(ζ) dζ` along `path`.
    pub fn reconstruct_omega_by_path(&self, j: usize, path: &PathSpec) -> Result<f64> {
        if j >= self.holes() {
            return Err(Error::OutOfRange {
                index: j,
                limit: self.holes(),
            });
        }
        let resolved = path.resolve(self.grid.domain())?;
        Ok(integrate_along_path(|z| self.fprime_at(j, z), &resolved, 1e-12)?.re)
    }
}

/// `λ_j(w) = ∫_{γ_j} |S(ζ,w)|² ds / S(w,w)` for every curve (the last entry
/// is the outer curve).
pub fn lambda(kernel: &KernelSet) -> Vec<f64> {
    let grid = kernel.grid();
    (0..grid.connectivity())
        .map(|j| {
            grid.curve_range(j)
                .map(|i| kernel.s[i].norm_sqr() * grid.ds[i])
                .sum::<f64>()
                / kernel.s_diag
        })
        .collect()
}
