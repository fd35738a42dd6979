//! Least-squares fit of the kernel interpolation coefficients
//!
//! ```text
//! S(z,w)(1 − conj(f(w)) f(z)) = Σ_{j,k} c_jk S(z,a_j) conj(S(w,a_k))
//! ```
//!
//! with `a_0 = a`, `a_1..a_{n−1}` the zeros of `S(·,a)`, and `c_0j = c_j0 = 0`
//! for `j ≠ 0`. The companion Garabedian identity
//!
//! ```text
//! L(z,w) = f(w)/(f(z) − f(w)) Σ_{j,k} conj(c_kj) S(z,a_j) L(w,a_k)
//! ```
//!
//! is checked on held-out pairs with the fitted coefficients. The matrix `c`
//! is hermitian, so `conj(c_kj) = c_jk`; the two index orders only agree
//! when `c` is real, which holds for the annulus but not in general.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{AhlforsEvaluator, KernelSet, SzegoSolver};
use crate::error::{Error, Result};

/// Singular-value ratio below which the fit is declared rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// Lattice resolution used to pick interior sample points.
const LATTICE: usize = 15;

#[derive(Clone, Debug)]
pub struct InterpolationCoeffs {
    /// Base point `a_0 = a`.
    pub a: Complex64,
    /// Zeros `a_1..a_{n−1}` of `S(·,a)`.
    pub zeros: Vec<Complex64>,
    /// `c_jk` for `j,k = 0..n−1`, with `c_0j = c_j0 = 0` off the corner.
    pub c: DMatrix<Complex64>,
    /// Smallest over largest singular value of the fit matrix.
    pub singular_ratio: f64,
    /// Max residual on the fitting pairs.
    pub fit_residual: f64,
    /// Max residual of the first identity on held-out pairs.
    pub heldout_residual: f64,
    /// Max residual of the Garabedian identity on held-out pairs.
    pub garabedian_residual: f64,
}

struct Basis<'a> {
    f: &'a AhlforsEvaluator,
    /// Kernels at `a_0..a_{n−1}`.
    kernels: Vec<KernelSet>,
}

impl Basis<'_> {
    fn unknowns(&self) -> usize {
        let n1 = self.kernels.len() - 1;
        1 + n1 * n1
    }

    /// `(j, k)` of the unknown with flat index `u`.
    fn pair(&self, u: usize) -> (usize, usize) {
        if u == 0 {
            return (0, 0);
        }
        let n1 = self.kernels.len() - 1;
        (1 + (u - 1) / n1, 1 + (u - 1) % n1)
    }

    /// Row of the first identity at boundary node `i` and interior `w`:
    /// (coefficients, right-hand side).
    fn row(&self, kw: &KernelSet, i: usize) -> (Vec<Complex64>, Complex64) {
        let w = kw.w;
        let fw = self.f.value(w);
        let rhs = kw.s[i] * (1.0 - fw.conj() * self.f.f[i]);
        let sw: Vec<Complex64> = self.kernels.iter().map(|k| k.s_at(w).conj()).collect();
        let coeffs = (0..self.unknowns())
            .map(|u| {
                let (j, k) = self.pair(u);
                self.kernels[j].s[i] * sw[k]
            })
            .collect();
        (coeffs, rhs)
    }

    fn garabedian_residual(&self, c: &DMatrix<Complex64>, kw: &KernelSet, i: usize) -> f64 {
        let w = kw.w;
        let fw = self.f.value(w);
        let lw: Vec<Complex64> = self.kernels.iter().map(|k| k.l_at(w)).collect();
        let mut sum = Complex64::default();
        for u in 0..self.unknowns() {
            let (j, k) = self.pair(u);
            sum += c[(k, j)].conj() * self.kernels[j].s[i] * lw[k];
        }
        (kw.l[i] - fw / (self.f.f[i] - fw) * sum).norm()
    }
}

/// Fit the coefficients from sampled pairs `(z, w)` with `z` on boundary
/// nodes and `w` on an interior lattice kept away from the boundary and
/// from the points `a_j`.
pub fn fit_interpolation_coeffs(
    solver: &SzegoSolver,
    f: &AhlforsEvaluator,
    zeros: &[Complex64],
) -> Result<InterpolationCoeffs> {
    let grid = solver.grid();
    let n = grid.connectivity();
    if zeros.len() != n - 1 {
        return Err(Error::CountMismatch {
            expected: n - 1,
            found: zeros.len() as f64,
        });
    }
    let mut kernels = vec![f.kernel.clone()];
    for &z in zeros {
        kernels.push(solver.solve(z)?);
    }
    let basis = Basis { f, kernels };

    let margin = (5.0 * grid.max_spacing()).min(0.1 * grid.domain().diameter());
    let centers: Vec<Complex64> = std::iter::once(f.a).chain(zeros.iter().cloned()).collect();
    let samples: Vec<Complex64> = grid
        .domain()
        .interior_lattice(LATTICE, margin)
        .into_iter()
        .filter(|p| centers.iter().all(|c| (p - c).norm() > margin))
        .collect();
    let fit_w: Vec<Complex64> = samples.iter().step_by(2).cloned().collect();
    let held_w: Vec<Complex64> = samples.iter().skip(1).step_by(2).cloned().collect();
    let unknowns = basis.unknowns();
    let fit_nodes: Vec<usize> = (0..grid.len()).step_by(3).collect();
    let held_nodes: Vec<usize> = (1..grid.len()).step_by(3).collect();
    if fit_w.len() * fit_nodes.len() < 3 * unknowns + 3 || held_w.is_empty() {
        return Err(Error::RankDeficient { ratio: 0.0 });
    }
    let fit_kernels = fit_w.iter().map(|&w| solver.solve(w)).collect::<Result<Vec<_>>>()?;
    let held_kernels = held_w.iter().map(|&w| solver.solve(w)).collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for kw in &fit_kernels {
        for &i in &fit_nodes {
            let (r, b) = basis.row(kw, i);
            rows.extend(r);
            rhs.push(b);
        }
    }
    let a_mat = DMatrix::from_row_slice(rhs.len(), unknowns, &rows);
    let b_vec = DVector::from_vec(rhs);
    let svd = a_mat.clone().svd(true, true);
    let (lo, hi) = svd
        .singular_values
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &s| (lo.min(s), hi.max(s)));
    let singular_ratio = if hi > 0.0 { lo / hi } else { 0.0 };
    if singular_ratio < RANK_TOLERANCE {
        return Err(Error::RankDeficient {
            ratio: singular_ratio,
        });
    }
    let x = svd
        .solve(&b_vec, 0.0)
        .map_err(|_| Error::RankDeficient {
            ratio: singular_ratio,
        })?;
    let fit_residual = (&a_mat * &x - &b_vec).camax();

    let mut c = DMatrix::zeros(n, n);
    for u in 0..unknowns {
        let (j, k) = basis.pair(u);
        c[(j, k)] = x[u];
    }

    let mut heldout_residual: f64 = 0.0;
    let mut garabedian_residual: f64 = 0.0;
    for kw in &held_kernels {
        for &i in &held_nodes {
            let (r, b) = basis.row(kw, i);
            let got: Complex64 = r.iter().zip(x.iter()).map(|(r, x)| r * x).sum();
            heldout_residual = heldout_residual.max((got - b).norm());
            garabedian_residual = garabedian_residual.max(basis.garabedian_residual(&c, kw, i));
        }
    }

    Ok(InterpolationCoeffs {
        a: f.a,
        zeros: zeros.to_vec(),
        c,
        singular_ratio,
        fit_residual,
        heldout_residual,
        garabedian_residual,
    })
}
