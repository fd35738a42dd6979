//! Dirichlet problem by a double-layer potential with one logarithmic
//! source per hole.
//!
//! The solution is written `u = Re Φ + Σ_k A_k ln|z − c_k|` where
//! `Φ(z) = (1/2πi) ∮ μ(ζ)/(ζ − z) dζ` has a real density `μ` and `c_k` lies
//! inside hole `k`. The boundary condition gives the second-kind system
//!
//! ```text
//! ½ μ(z) + ∮ k(z,ζ) μ(ζ) dt + Σ_k A_k ln|z − c_k| = g(z)
//! ```
//!
//! with `k(z,ζ) = (1/2π) Im(ζ'/(ζ − z))`, bordered by `∮_{γ_k} μ ds = 0` for
//! each hole. The side conditions remove the null space of the double-layer
//! operator on multiply connected domains.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Dyn, LU};
use num_complex::Complex64;

use crate::cauchy::{cauchy_eval_unchecked, spectral_dt};
use crate::error::{Error, Result};
use crate::geometry::BoundaryGrid;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Factored Nyström system; reusable for any boundary data on one grid.
pub struct DirichletSolver {
    grid: Arc<BoundaryGrid>,
    lu: LU<f64, Dyn, Dyn>,
    condition: f64,
}

impl DirichletSolver {
    pub fn new(grid: Arc<BoundaryGrid>) -> Result<Self> {
        let n = grid.len();
        let holes = grid.domain().hole_points().to_vec();
        let size = n + holes.len();
        let h = grid.step();
        let mut m = DMatrix::<f64>::zeros(size, size);
        for i in 0..n {
            m[(i, i)] = 0.5 + (grid.d2z[i] / grid.dz[i]).im / (4.0 * PI) * h;
            for j in 0..n {
                if i != j {
                    m[(i, j)] = (grid.dz[j] / (grid.z[j] - grid.z[i])).im / (2.0 * PI) * h;
                }
            }
            for (k, c) in holes.iter().enumerate() {
                m[(i, n + k)] = (grid.z[i] - c).norm().ln();
            }
        }
        for k in 0..holes.len() {
            for j in grid.curve_range(k) {
                m[(n + k, j)] = grid.ds[j];
            }
        }
        let lu = m.lu();
        let diag: Vec<f64> = (0..size).map(|i| lu.u()[(i, i)].abs()).collect();
        let hi = diag.iter().cloned().fold(0.0, f64::max);
        let lo = diag.iter().cloned().fold(f64::INFINITY, f64::min);
        let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        if !condition.is_finite() || condition > 1e12 {
            return Err(Error::SingularSystem {
                context: "Dirichlet double-layer system".into(),
                condition,
            });
        }
        Ok(Self { grid, lu, condition })
    }

    pub fn grid(&self) -> &Arc<BoundaryGrid> {
        &self.grid
    }

    pub fn condition_estimate(&self) -> f64 {
        self.condition
    }

    /// Harmonic extension of the real boundary samples `data`.
    pub fn solve(&self, data: &[f64]) -> Result<HarmonicFunction> {
        let grid = &self.grid;
        let n = grid.len();
        let holes = grid.domain().hole_points();
        let mut rhs = DVector::zeros(n + holes.len());
        rhs.rows_mut(0, n).copy_from_slice(data);
        let x = self.lu.solve(&rhs).ok_or_else(|| Error::SingularSystem {
            context: "Dirichlet solve".into(),
            condition: self.condition,
        })?;
        let density: Vec<f64> = x.rows(0, n).iter().cloned().collect();
        let sources: Vec<(Complex64, f64)> = holes
            .iter()
            .enumerate()
            .map(|(k, &c)| (c, x[n + k]))
            .collect();
        Ok(HarmonicFunction::from_density(grid.clone(), density, sources))
    }
}

/// `u = Re Φ + Σ A_k ln|z − c_k|` with boundary traces of `Φ` and `Φ'`.
#[derive(Clone, Debug)]
pub struct HarmonicFunction {
    grid: Arc<BoundaryGrid>,
    pub density: Vec<f64>,
    /// `(c_k, A_k)` for each hole.
    pub sources: Vec<(Complex64, f64)>,
    /// Interior boundary values of `Φ`.
    phi: Vec<Complex64>,
    /// Boundary values of `F' = 2 ∂u/∂z`.
    fprime: Vec<Complex64>,
    /// Boundary values of `Φ'`.
    dphi: Vec<Complex64>,
}

impl HarmonicFunction {
    fn from_density(grid: Arc<BoundaryGrid>, density: Vec<f64>, sources: Vec<(Complex64, f64)>) -> Self {
        let n = grid.len();
        let h = grid.step();
        let mu: Vec<Complex64> = density.iter().map(|&d| Complex64::new(d, 0.0)).collect();
        let mu_t = spectral_dt(&grid, &mu);
        let phi: Vec<Complex64> = (0..n)
            .map(|i| {
                let mut acc = mu_t[i] * h;
                for j in 0..n {
                    if j != i {
                        acc += (density[j] - density[i]) * grid.dz[j] * h / (grid.z[j] - grid.z[i]);
                    }
                }
                density[i] + acc / (2.0 * PI * I)
            })
            .collect();
        let dphi: Vec<Complex64> = spectral_dt(&grid, &phi)
            .into_iter()
            .zip(&grid.dz)
            .map(|(d, dz)| d / dz)
            .collect();
        let fprime = (0..n)
            .map(|i| dphi[i] + sources.iter().map(|(c, a)| a / (grid.z[i] - c)).sum::<Complex64>())
            .collect();
        Self {
            grid,
            density,
            sources,
            phi,
            fprime,
            dphi,
        }
    }

    pub fn grid(&self) -> &Arc<BoundaryGrid> {
        &self.grid
    }

    /// `u(z)` for `z` in the closed domain.
    pub fn value(&self, z: Complex64) -> f64 {
        cauchy_eval_unchecked(&self.grid, &self.phi, z).re + self.log_part(z)
    }

    fn log_part(&self, z: Complex64) -> f64 {
        self.sources.iter().map(|(c, a)| a * (z - c).norm().ln()).sum()
    }

    /// Boundary values of `u` reproduced from the representation.
    pub fn boundary_values(&self) -> Vec<f64> {
        (0..self.grid.len())
            .map(|i| self.phi[i].re + self.log_part(self.grid.z[i]))
            .collect()
    }

    /// `F'(z) = 2 ∂u/∂z` for `z` in the closed domain.
    pub fn fprime(&self, z: Complex64) -> Complex64 {
        cauchy_eval_unchecked(&self.grid, &self.dphi, z)
            + self.sources.iter().map(|(c, a)| a / (z - c)).sum::<Complex64>()
    }

    /// Boundary samples of `F' = 2 ∂u/∂z`.
    pub fn fprime_boundary(&self) -> &[Complex64] {
        &self.fprime
    }

    /// Outward normal derivative `∂u/∂n = Re(−i F' T)` at the nodes.
    pub fn normal_derivative(&self) -> Vec<f64> {
        self.fprime
            .iter()
            .zip(&self.grid.tangent)
            .map(|(f, t)| (-I * f * t).re)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{discretize, CurveSpec, DomainSpec, Role};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn annulus(m: usize) -> Arc<BoundaryGrid> {
        let d = DomainSpec::new(vec![
            CurveSpec::circle(c(0.0, 0.0), 0.5, Role::Inner),
            CurveSpec::circle(c(0.0, 0.0), 1.0, Role::Outer),
        ])
        .unwrap();
        Arc::new(discretize(&d, m).unwrap())
    }

    #[test]
    fn real_part_on_disc() {
        let d = DomainSpec::new(vec![CurveSpec::circle(c(0.0, 0.0), 1.0, Role::Outer)]).unwrap();
        let g = Arc::new(discretize(&d, 64).unwrap());
        let data: Vec<f64> = g.z.iter().map(|z| z.re).collect();
        let u = DirichletSolver::new(g).unwrap().solve(&data).unwrap();
        assert!((u.value(c(0.3, 0.4)) - 0.3).abs() < 1e-12);
        assert!((u.fprime(c(0.3, 0.4)) - 1.0).norm() < 1e-11);
    }

    #[test]
    fn constant_data_gives_constant() {
        let g = annulus(64);
        let u = DirichletSolver::new(g.clone()).unwrap().solve(&vec![1.0; g.len()]).unwrap();
        assert!((u.value(c(0.0, 0.7)) - 1.0).abs() < 1e-12);
        assert!(u.normal_derivative().iter().all(|d| d.abs() < 1e-10));
    }

    #[test]
    fn annulus_radial_solution() {
        let g = annulus(128);
        let data: Vec<f64> = (0..g.len()).map(|i| if i < 128 { 1.0 } else { 0.0 }).collect();
        let u = DirichletSolver::new(g.clone()).unwrap().solve(&data).unwrap();
        let want = 0.75f64.ln() / 0.5f64.ln();
        assert!((want - 0.415_037).abs() < 1e-6);
        for k in 0..8 {
            let z = Complex64::from_polar(0.75, 0.3 + k as f64);
            assert!((u.value(z) - want).abs() < 1e-12);
        }
        // the outward normal is −r̂ on the inner circle and r̂ on the outer one
        let dn = u.normal_derivative();
        let lq = 0.5f64.ln();
        assert!((dn[0] + 1.0 / (0.5 * lq)).abs() < 1e-10);
        assert!((dn[200] - 1.0 / lq).abs() < 1e-10);
        let residual = u
            .boundary_values()
            .iter()
            .zip(&data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(residual < 1e-12);
    }

    #[test]
    fn harmonic_data_with_pole_in_hole() {
        let d = DomainSpec::new(vec![
            CurveSpec::ellipse(c(0.1, 0.0), [0.3, 0.2], 0.4, Role::Inner),
            CurveSpec::ellipse(c(0.0, 0.0), [1.2, 0.9], 0.0, Role::Outer),
        ])
        .unwrap();
        let g = Arc::new(discretize(&d, 256).unwrap());
        let exact = |z: Complex64| (1.0 / (z - 0.1)).re + 2.0 * (z - 0.05).norm().ln();
        let data: Vec<f64> = g.z.iter().map(|&z| exact(z)).collect();
        let u = DirichletSolver::new(g).unwrap().solve(&data).unwrap();
        for z in [c(0.7, 0.1), c(-0.5, -0.4), c(0.0, 0.6)] {
            assert!((u.value(z) - exact(z)).abs() < 1e-10);
        }
    }
}
