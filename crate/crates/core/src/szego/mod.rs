//! Szegő and Garabedian kernels, the Ahlfors map and derived data.
//!
//! The boundary Szegő kernel `S(·,w)` solves the second-kind equation
//!
//! ```text
//! S(z,w) + ∮ A(z,ζ) S(ζ,w) ds_ζ = conj(H(w,z)),   z ∈ bΩ
//! ```
//!
//! where `H(w,z) = T(z) / (2πi (z − w))` is the Cauchy kernel and
//! `A(z,ζ) = conj(H(ζ,z)) − H(z,ζ)` is the smooth skew-hermitian
//! Kerzman–Stein kernel (`A(z,z) = 0`). The Garabedian kernel follows from
//! the boundary identity `conj(S) = (1/i) L T`. With this normalization the
//! disc gives `S = 1/(2π(1 − w̄z))`, `L = 1/(2π(z − w))`.

mod interp;
mod zeros;

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Dyn, LU};
use num_complex::Complex64;

use crate::cauchy::{boundary_derivative, cauchy_derivative_unchecked, cauchy_eval_unchecked};
use crate::error::{Error, Result};
use crate::geometry::BoundaryGrid;

pub use interp::{fit_interpolation_coeffs, InterpolationCoeffs};
pub use zeros::{branch_locus, branch_point_residual, locate_zeros, szego_zeros, Zero};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Cauchy kernel `H(w,ζ) = T(ζ) / (2πi (ζ − w))`.
fn cauchy_kernel(w: Complex64, zeta: Complex64, t_zeta: Complex64) -> Complex64 {
    t_zeta / (2.0 * PI * I * (zeta - w))
}

/// Kerzman–Stein kernel `A(z,ζ)` for boundary points `z ≠ ζ`.
fn kerzman_stein(z: Complex64, t_z: Complex64, zeta: Complex64, t_zeta: Complex64) -> Complex64 {
    let d = zeta - z;
    (t_z.conj() / d.conj() - t_zeta / d) / (2.0 * PI * I)
}

/// Dense LU factorization of the Nyström system for one boundary grid.
/// Factor once, then solve for any number of source points.
pub struct SzegoSolver {
    grid: Arc<BoundaryGrid>,
    lu: LU<Complex64, Dyn, Dyn>,
    condition: f64,
}

impl SzegoSolver {
    pub fn new(grid: Arc<BoundaryGrid>) -> Result<Self> {
        let n = grid.len();
        let mut m = DMatrix::<Complex64>::identity(n, n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m[(i, j)] +=
                        kerzman_stein(grid.z[i], grid.tangent[i], grid.z[j], grid.tangent[j]) * grid.ds[j];
                }
            }
        }
        let lu = m.lu();
        let diag: Vec<f64> = (0..n).map(|i| lu.u()[(i, i)].norm()).collect();
        let (lo, hi) = diag
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &d| (lo.min(d), hi.max(d)));
        let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        if !condition.is_finite() || condition > 1e12 {
            return Err(Error::SingularSystem {
                context: "Szegő Nyström matrix".into(),
                condition,
            });
        }
        Ok(Self { grid, lu, condition })
    }

    pub fn grid(&self) -> &Arc<BoundaryGrid> {
        &self.grid
    }

    /// Pivot-ratio condition estimate of the factored system.
    pub fn condition_estimate(&self) -> f64 {
        self.condition
    }

    /// Boundary Szegő and Garabedian kernels for the source `w`.
    pub fn solve(&self, w: Complex64) -> Result<KernelSet> {
        let grid = &self.grid;
        grid.require_interior(w)?;
        let (distance, spacing) = grid.resolution_at(w);
        if distance <= spacing {
            return Err(Error::SourceTooClose {
                point: w,
                distance,
                spacing,
            });
        }
        let rhs = DVector::from_iterator(
            grid.len(),
            (0..grid.len()).map(|i| cauchy_kernel(w, grid.z[i], grid.tangent[i]).conj()),
        );
        let s = self.lu.solve(&rhs).ok_or_else(|| Error::SingularSystem {
            context: "Szegő solve".into(),
            condition: self.condition,
        })?;
        let s: Vec<Complex64> = s.iter().cloned().collect();
        Ok(KernelSet::from_boundary(grid.clone(), w, s))
    }

    /// `S(z(t), w)` at an arbitrary boundary parameter via the Nyström
    /// interpolant of the solved density.
    pub fn interpolate(&self, kernel: &KernelSet, curve: usize, t: f64) -> Complex64 {
        let grid = &self.grid;
        let [z, dz, _] = grid.domain().eval(curve, t);
        let tz = dz / dz.norm();
        let mut s = cauchy_kernel(kernel.w, z, tz).conj();
        for i in 0..grid.len() {
            if (grid.z[i] - z).norm() > 1e-14 {
                s -= kerzman_stein(z, tz, grid.z[i], grid.tangent[i]) * kernel.s[i] * grid.ds[i];
            }
        }
        s
    }
}

/// Boundary samples of `S(·,w)` and `L(·,w)` for one interior source `w`.
#[derive(Clone, Debug)]
pub struct KernelSet {
    grid: Arc<BoundaryGrid>,
    pub w: Complex64,
    /// `S(z_i, w)`.
    pub s: Vec<Complex64>,
    /// `L(z_i, w)`.
    pub l: Vec<Complex64>,
    /// `L(z_i, w) − 1/(2π(z_i − w))`, holomorphic in the domain.
    l_regular: Vec<Complex64>,
    /// `S(w, w)` from the reproducing sum.
    pub s_diag: f64,
}

impl KernelSet {
    fn from_boundary(grid: Arc<BoundaryGrid>, w: Complex64, s: Vec<Complex64>) -> Self {
        let l: Vec<Complex64> = s
            .iter()
            .zip(&grid.tangent)
            .map(|(s, t)| I * s.conj() * t.conj())
            .collect();
        let l_regular = l
            .iter()
            .zip(&grid.z)
            .map(|(l, z)| l - 1.0 / (2.0 * PI * (z - w)))
            .collect();
        let s_diag = s.iter().zip(&grid.ds).map(|(s, ds)| s.norm_sqr() * ds).sum();
        Self {
            grid,
            w,
            s,
            l,
            l_regular,
            s_diag,
        }
    }

    pub fn grid(&self) -> &Arc<BoundaryGrid> {
        &self.grid
    }

    /// `S(z, w)` for interior `z` (Cauchy integral of the boundary trace).
    pub fn s_at(&self, z: Complex64) -> Complex64 {
        cauchy_eval_unchecked(&self.grid, &self.s, z)
    }

    pub fn s_derivative_at(&self, z: Complex64) -> Complex64 {
        cauchy_derivative_unchecked(&self.grid, &self.s, z)
    }

    /// `L(z, w)` for interior `z ≠ w`: the regular part is Cauchy-evaluated
    /// and the pole `1/(2π(z − w))` restored.
    pub fn l_at(&self, z: Complex64) -> Complex64 {
        cauchy_eval_unchecked(&self.grid, &self.l_regular, z) + 1.0 / (2.0 * PI * (z - self.w))
    }

    /// Regular part of `L(·, w)` at interior `z`.
    pub fn l_regular_at(&self, z: Complex64) -> Complex64 {
        cauchy_eval_unchecked(&self.grid, &self.l_regular, z)
    }

    /// `S(w, w)` from the Cauchy integral rather than the reproducing sum.
    pub fn s_diag_cauchy(&self) -> f64 {
        self.s_at(self.w).re
    }

    /// `max_i |conj(S_i) − (1/i) L_i T_i|`.
    pub fn boundary_identity_residual(&self) -> f64 {
        self.s
            .iter()
            .zip(&self.l)
            .zip(&self.grid.tangent)
            .map(|((s, l), t)| (s.conj() - l * t / I).norm())
            .fold(0.0, f64::max)
    }

    /// `max_k |Σ_i z_i^k conj(S_i) ds_i − w^k|` for `k = 0..=kmax`.
    pub fn reproducing_residual(&self, kmax: i32) -> f64 {
        (0..=kmax)
            .map(|k| {
                let got: Complex64 = (0..self.grid.len())
                    .map(|i| self.grid.z[i].powi(k) * self.s[i].conj() * self.grid.ds[i])
                    .sum();
                (got - self.w.powi(k)).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Cauchy integrals of the boundary traces of `S` and of the regular
    /// part of `L` at points outside the closed domain; both vanish when the
    /// traces extend holomorphically inside.
    pub fn holomorphy_defect(&self, exterior: &[Complex64]) -> f64 {
        exterior
            .iter()
            .map(|&p| {
                let mut a = Complex64::default();
                let mut b = Complex64::default();
                for i in 0..self.grid.len() {
                    let w = self.grid.dz_weight(i) / (self.grid.z[i] - p);
                    a += self.s[i] * w;
                    b += self.l_regular[i] * w;
                }
                (a.norm().max(b.norm())) / (2.0 * PI)
            })
            .fold(0.0, f64::max)
    }
}

/// Solve for the Szegő kernel with source `w` on `grid`.
pub fn solve_szego(grid: Arc<BoundaryGrid>, w: Complex64) -> Result<KernelSet> {
    SzegoSolver::new(grid)?.solve(w)
}

/// Ahlfors map `f = S(·,a)/L(·,a)` with `f(a) = 0`, `f'(a) > 0`.
#[derive(Clone, Debug)]
pub struct AhlforsEvaluator {
    pub a: Complex64,
    pub kernel: KernelSet,
    /// Boundary values `f(z_i)`.
    pub f: Vec<Complex64>,
    /// Boundary values `f'(z_i)`.
    pub fprime: Vec<Complex64>,
}

/// Build the Ahlfors map for base point `a`.
pub fn ahlfors(solver: &SzegoSolver, a: Complex64) -> Result<AhlforsEvaluator> {
    let kernel = solver.solve(a)?;
    AhlforsEvaluator::from_kernel(kernel)
}

impl AhlforsEvaluator {
    pub fn from_kernel(kernel: KernelSet) -> Result<Self> {
        let grid = kernel.grid().clone();
        let f: Vec<Complex64> = kernel.s.iter().zip(&kernel.l).map(|(s, l)| s / l).collect();
        let fprime = boundary_derivative(&grid, &f);
        let ev = Self {
            a: kernel.w,
            kernel,
            f,
            fprime,
        };
        let d = ev.derivative(ev.a);
        if !(d.re > 0.0) || d.im.abs() > 1e-6 * d.norm() {
            return Err(Error::RotationCorrection(d));
        }
        Ok(ev)
    }

    pub fn grid(&self) -> &Arc<BoundaryGrid> {
        self.kernel.grid()
    }

    /// `f(z)` for `z` in the closed domain.
    pub fn value(&self, z: Complex64) -> Complex64 {
        cauchy_eval_unchecked(self.grid(), &self.f, z)
    }

    /// `f'(z)` for `z` in the closed domain.
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        cauchy_eval_unchecked(self.grid(), &self.fprime, z)
    }

    /// `f''(z)` for interior `z`.
    pub fn second_derivative(&self, z: Complex64) -> Complex64 {
        cauchy_derivative_unchecked(self.grid(), &self.fprime, z)
    }

    /// `f` at boundary parameter `t` of `curve`, from the Nyström interpolant.
    pub fn on_curve(&self, solver: &SzegoSolver, curve: usize, t: f64) -> Complex64 {
        let s = solver.interpolate(&self.kernel, curve, t);
        let [_, dz, _] = self.grid().domain().eval(curve, t);
        let tz = dz / dz.norm();
        s / (I * s.conj() * tz.conj())
    }

    pub fn unimodularity_residual(&self) -> f64 {
        self.f.iter().map(|f| (f.norm() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Continuous change of `arg f` over the whole boundary.
    pub fn boundary_argument_change(&self) -> f64 {
        crate::cauchy::boundary_argument_change(self.grid(), &self.f)
    }

    /// Degree of the map, `Δ arg f / 2π` rounded.
    pub fn degree(&self) -> i64 {
        (self.boundary_argument_change() / (2.0 * PI)).round() as i64
    }

    /// `max |(f'/f) T + conj(f'/f) conj(T)|` over the boundary nodes.
    pub fn log_derivative_residual(&self) -> f64 {
        let grid = self.grid();
        (0..grid.len())
            .map(|i| {
                let q = self.fprime[i] / self.f[i] * grid.tangent[i];
                (q + q.conj()).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// A point on a boundary curve with its parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryPoint {
    pub curve: usize,
    pub t: f64,
    pub z: Complex64,
}

/// The boundary point `z_j` of `curve` with `f(z_j) = 1`.
pub fn ahlfors_boundary_root(
    solver: &SzegoSolver,
    f: &AhlforsEvaluator,
    curve: usize,
) -> Result<BoundaryPoint> {
    let grid = f.grid();
    if curve >= grid.connectivity() {
        return Err(Error::OutOfRange {
            index: curve,
            limit: grid.connectivity(),
        });
    }
    let r = grid.curve_range(curve);
    let m = grid.nodes_per_curve();
    let step = grid.step();
    let mut brackets = Vec::new();
    for k in 0..m {
        let (p, q) = (f.f[r.start + k].arg(), f.f[r.start + (k + 1) % m].arg());
        if p <= 0.0 && q > 0.0 && q - p < PI {
            brackets.push(k);
        }
    }
    if brackets.len() != 1 {
        return Err(Error::CountMismatch {
            expected: 1,
            found: brackets.len() as f64,
        });
    }
    let k = brackets[0];
    let (mut lo, mut hi) = (k as f64 * step, (k + 1) as f64 * step);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f.on_curve(solver, curve, mid).arg() <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    Ok(BoundaryPoint {
        curve,
        t,
        z: grid.domain().eval(curve, t)[0],
    })
}
