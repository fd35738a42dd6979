//! Domain description and boundary discretization.
//!
//! A domain is bounded by `n` analytic Jordan curves. The outer curve is
//! listed last. Every curve is parametrized over `[0, 2π)`; at construction
//! the parameter direction is flipped where needed so that traversal keeps
//! the domain on the left (outer counterclockwise, holes clockwise).

use std::f64::consts::PI;
use std::ops::Range;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative distance (in units of the domain diameter) below which a point
/// is treated as lying on the boundary.
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

/// Dense sample count used for validation and nearest-point searches.
const DENSE_SAMPLES: usize = 512;

pub(crate) mod pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq([z.re, z.im])
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Outer,
    Inner,
}

/// One term `c_k e^{ikt}` of a Fourier curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierMode {
    pub k: i32,
    #[serde(with = "pair")]
    pub c: Complex64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CurveKind {
    Circle {
        #[serde(with = "pair")]
        center: Complex64,
        radius: f64,
    },
    Ellipse {
        #[serde(with = "pair")]
        center: Complex64,
        semi_axes: [f64; 2],
        #[serde(default)]
        rotation: f64,
    },
    Fourier {
        coefficients: Vec<FourierMode>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    #[serde(flatten)]
    pub kind: CurveKind,
    pub role: Role,
}

impl CurveSpec {
    pub fn circle(center: Complex64, radius: f64, role: Role) -> Self {
        Self {
            kind: CurveKind::Circle { center, radius },
            role,
        }
    }

    pub fn ellipse(center: Complex64, semi_axes: [f64; 2], rotation: f64, role: Role) -> Self {
        Self {
            kind: CurveKind::Ellipse {
                center,
                semi_axes,
                rotation,
            },
            role,
        }
    }

    pub fn fourier(coefficients: Vec<FourierMode>, role: Role) -> Self {
        Self {
            kind: CurveKind::Fourier { coefficients },
            role,
        }
    }

    /// `z(t)`, `z'(t)`, `z''(t)` in the curve's own parameter direction.
    pub fn eval(&self, t: f64) -> [Complex64; 3] {
        let eit = Complex64::from_polar(1.0, t);
        match &self.kind {
            CurveKind::Circle { center, radius } => {
                let r = eit * *radius;
                [center + r, r * Complex64::i(), -r]
            }
            CurveKind::Ellipse {
                center,
                semi_axes: [a, b],
                rotation,
            } => {
                let rot = Complex64::from_polar(1.0, *rotation);
                let (s, c) = t.sin_cos();
                [
                    center + rot * Complex64::new(a * c, b * s),
                    rot * Complex64::new(-a * s, b * c),
                    rot * Complex64::new(-a * c, -b * s),
                ]
            }
            CurveKind::Fourier { coefficients } => {
                let mut out = [Complex64::default(); 3];
                for mode in coefficients {
                    let k = mode.k as f64;
                    let term = mode.c * Complex64::from_polar(1.0, k * t);
                    out[0] += term;
                    out[1] += term * Complex64::new(0.0, k);
                    out[2] += term * (-k * k);
                }
                out
            }
        }
    }

    fn check_parameters(&self, index: usize) -> Result<()> {
        let bad = |reason: &str| {
            Err(Error::InvalidCurve {
                curve: index,
                reason: reason.to_string(),
            })
        };
        match &self.kind {
            CurveKind::Circle { radius, .. } if !(*radius > 0.0) => bad("radius must be positive"),
            CurveKind::Ellipse {
                semi_axes: [a, b], ..
            } if !(*a > 0.0 && *b > 0.0) => bad("semi-axes must be positive"),
            CurveKind::Fourier { coefficients } if coefficients.is_empty() => {
                bad("no Fourier coefficients")
            }
            _ => Ok(()),
        }
    }
}

/// A validated domain: inner curves first, outer curve last.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawDomain", into = "RawDomain")]
pub struct DomainSpec {
    curves: Vec<CurveSpec>,
    reversed: Vec<bool>,
    diameter: f64,
    hole_points: Vec<Complex64>,
    samples: Vec<Vec<Complex64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawDomain {
    curves: Vec<CurveSpec>,
}

impl TryFrom<RawDomain> for DomainSpec {
    type Error = Error;
    fn try_from(raw: RawDomain) -> Result<Self> {
        DomainSpec::new(raw.curves)
    }
}

impl From<DomainSpec> for RawDomain {
    fn from(d: DomainSpec) -> Self {
        RawDomain { curves: d.curves }
    }
}

impl DomainSpec {
    pub fn new(curves: Vec<CurveSpec>) -> Result<Self> {
        if curves.is_empty() {
            return Err(Error::InvalidDomain("no boundary curves".into()));
        }
        let outer: Vec<usize> = curves
            .iter()
            .enumerate()
            .filter(|(_, c)| c.role == Role::Outer)
            .map(|(i, _)| i)
            .collect();
        if outer != [curves.len() - 1] {
            return Err(Error::InvalidDomain(
                "exactly one outer curve is required, listed last".into(),
            ));
        }

        let mut samples = Vec::with_capacity(curves.len());
        let mut reversed = Vec::with_capacity(curves.len());
        for (j, curve) in curves.iter().enumerate() {
            curve.check_parameters(j)?;
            let pts: Vec<[Complex64; 3]> = (0..DENSE_SAMPLES)
                .map(|i| curve.eval(2.0 * PI * i as f64 / DENSE_SAMPLES as f64))
                .collect();
            let scale = pts.iter().map(|p| p[1].norm()).fold(0.0, f64::max);
            if !(scale > 0.0) || pts.iter().any(|p| p[1].norm() <= 1e-9 * scale) {
                return Err(Error::InvalidCurve {
                    curve: j,
                    reason: "z'(t) vanishes".into(),
                });
            }
            let poly: Vec<Complex64> = pts.iter().map(|p| p[0]).collect();
            if polyline_self_intersects(&poly) {
                return Err(Error::InvalidCurve {
                    curve: j,
                    reason: "curve is not simple".into(),
                });
            }
            let ccw = signed_area(&poly) > 0.0;
            // outer must run counterclockwise, holes clockwise
            reversed.push(match curve.role {
                Role::Outer => !ccw,
                Role::Inner => ccw,
            });
            samples.push(poly);
        }

        for a in 0..curves.len() {
            for b in a + 1..curves.len() {
                if polylines_intersect(&samples[a], &samples[b]) {
                    return Err(Error::InvalidDomain(format!("curves {a} and {b} intersect")));
                }
            }
        }
        let n = curves.len();
        let outer_poly = &samples[n - 1];
        for j in 0..n - 1 {
            if polygon_winding(outer_poly, samples[j][0]) == 0 {
                return Err(Error::InvalidDomain(format!(
                    "inner curve {j} is not inside the outer curve"
                )));
            }
            for k in 0..n - 1 {
                if k != j && polygon_winding(&samples[k], samples[j][0]) != 0 {
                    return Err(Error::InvalidDomain(format!(
                        "inner curve {j} lies inside inner curve {k}"
                    )));
                }
            }
        }

        let mut diameter: f64 = 0.0;
        for p in outer_poly.iter().step_by(2) {
            for q in outer_poly.iter().step_by(2) {
                diameter = diameter.max((p - q).norm());
            }
        }

        let mut hole_points = Vec::with_capacity(n - 1);
        for j in 0..n - 1 {
            hole_points.push(interior_point(&curves[j], &samples[j]).ok_or_else(|| {
                Error::InvalidCurve {
                    curve: j,
                    reason: "could not locate a point inside the hole".into(),
                }
            })?);
        }

        Ok(Self {
            curves,
            reversed,
            diameter,
            hole_points,
            samples,
        })
    }

    pub fn curves(&self) -> &[CurveSpec] {
        &self.curves
    }

    /// Connectivity `n`.
    pub fn connectivity(&self) -> usize {
        self.curves.len()
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// One point strictly inside each hole, in curve order.
    pub fn hole_points(&self) -> &[Complex64] {
        &self.hole_points
    }

    /// `z, z', z''` of curve `j` in the standard orientation.
    pub fn eval(&self, j: usize, t: f64) -> [Complex64; 3] {
        if self.reversed[j] {
            let [z, dz, d2z] = self.curves[j].eval(-t);
            [z, -dz, d2z]
        } else {
            self.curves[j].eval(t)
        }
    }

    /// Nearest boundary point to `p`: (distance, curve, parameter).
    pub fn nearest(&self, p: Complex64) -> (f64, usize, f64) {
        let mut best = (f64::INFINITY, 0, 0.0);
        let step = 2.0 * PI / DENSE_SAMPLES as f64;
        for j in 0..self.curves.len() {
            let (i0, _) = self.samples[j]
                .iter()
                .enumerate()
                .map(|(i, z)| (i, (z - p).norm_sqr()))
                .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
            // sample i is at parameter i*step in the raw direction
            let raw = |t: f64| (self.curves[j].eval(t)[0] - p).norm_sqr();
            let t_raw = golden_min(raw, i0 as f64 * step - step, i0 as f64 * step + step);
            let d = raw(t_raw).sqrt();
            if d < best.0 {
                let t = if self.reversed[j] { -t_raw } else { t_raw };
                best = (d, j, t.rem_euclid(2.0 * PI));
            }
        }
        best
    }

    pub fn min_boundary_distance(&self, p: Complex64) -> f64 {
        self.nearest(p).0
    }

    pub fn boundary_tolerance(&self) -> f64 {
        BOUNDARY_TOLERANCE * self.diameter
    }

    /// Membership test; errors when `p` is within the boundary tolerance.
    pub fn contains(&self, p: Complex64) -> Result<bool> {
        let (d, j, t) = self.nearest(p);
        let tol = self.boundary_tolerance();
        if d < tol {
            return Err(Error::BoundaryProximity {
                point: p,
                tolerance: tol,
            });
        }
        // the domain lies to the left of the oriented tangent at the nearest point
        let [z, dz, _] = self.eval(j, t);
        Ok(((p - z) * dz.conj()).im > 0.0)
    }

    /// Membership test that treats boundary points as members.
    pub fn contains_closed(&self, p: Complex64) -> bool {
        self.contains(p).unwrap_or(true)
    }

    /// Total winding number of the oriented boundary about `p`.
    pub fn winding_number(&self, p: Complex64) -> i32 {
        (0..self.curves.len())
            .map(|j| {
                let w = polygon_winding(&self.samples[j], p);
                if self.reversed[j] {
                    -w
                } else {
                    w
                }
            })
            .sum()
    }

    /// Axis-aligned bounding box of the outer curve: (min corner, max corner).
    pub fn bounding_box(&self) -> (Complex64, Complex64) {
        let outer = &self.samples[self.curves.len() - 1];
        let (mut lo, mut hi) = (outer[0], outer[0]);
        for p in outer {
            lo = Complex64::new(lo.re.min(p.re), lo.im.min(p.im));
            hi = Complex64::new(hi.re.max(p.re), hi.im.max(p.im));
        }
        (lo, hi)
    }

    /// Points of a `per_axis × per_axis` lattice over the bounding box that
    /// lie inside the domain at distance greater than `margin` from the
    /// boundary, in row-major order.
    pub fn interior_lattice(&self, per_axis: usize, margin: f64) -> Vec<Complex64> {
        let (lo, hi) = self.bounding_box();
        let span = hi - lo;
        let mut out = Vec::new();
        for r in 0..per_axis {
            for c in 0..per_axis {
                let p = lo
                    + Complex64::new(
                        span.re * (c as f64 + 0.5) / per_axis as f64,
                        span.im * (r as f64 + 0.5) / per_axis as f64,
                    );
                if matches!(self.contains(p), Ok(true)) && self.min_boundary_distance(p) > margin {
                    out.push(p);
                }
            }
        }
        out
    }
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..100 {
        if (b - a).abs() < 1e-15 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

fn signed_area(poly: &[Complex64]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let (p, q) = (poly[i], poly[(i + 1) % n]);
            p.re * q.im - q.re * p.im
        })
        .sum::<f64>()
        * 0.5
}

/// Winding number of a closed polygon about `p`.
pub(crate) fn polygon_winding(poly: &[Complex64], p: Complex64) -> i32 {
    let n = poly.len();
    let mut total = 0.0;
    for i in 0..n {
        let a = poly[i] - p;
        let b = poly[(i + 1) % n] - p;
        total += (b / a).arg();
    }
    (total / (2.0 * PI)).round() as i32
}

fn segments_cross(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> bool {
    let cross = |u: Complex64, v: Complex64| u.re * v.im - u.im * v.re;
    let d1 = cross(b - a, c - a);
    let d2 = cross(b - a, d - a);
    let d3 = cross(d - c, a - c);
    let d4 = cross(d - c, b - c);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

fn polyline_self_intersects(poly: &[Complex64]) -> bool {
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_cross(a, b, poly[j], poly[(j + 1) % n]) {
                return true;
            }
        }
    }
    false
}

fn polylines_intersect(p: &[Complex64], q: &[Complex64]) -> bool {
    for i in 0..p.len() {
        let (a, b) = (p[i], p[(i + 1) % p.len()]);
        for j in 0..q.len() {
            if segments_cross(a, b, q[j], q[(j + 1) % q.len()]) {
                return true;
            }
        }
    }
    // touching curves
    let min_gap = p
        .iter()
        .flat_map(|a| q.iter().map(move |b| (a - b).norm()))
        .fold(f64::INFINITY, f64::min);
    min_gap == 0.0
}

fn interior_point(curve: &CurveSpec, poly: &[Complex64]) -> Option<Complex64> {
    match curve.kind {
        CurveKind::Circle { center, .. } | CurveKind::Ellipse { center, .. } => return Some(center),
        CurveKind::Fourier { .. } => {}
    }
    // area centroid, then a search along inward normals
    let n = poly.len();
    let (mut cx, mut cy, mut a2) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let (p, q) = (poly[i], poly[(i + 1) % n]);
        let w = p.re * q.im - q.re * p.im;
        a2 += w;
        cx += (p.re + q.re) * w;
        cy += (p.im + q.im) * w;
    }
    let centroid = Complex64::new(cx / (3.0 * a2), cy / (3.0 * a2));
    if polygon_winding(poly, centroid) != 0 {
        return Some(centroid);
    }
    for i in (0..n).step_by(n / 16) {
        let chord = poly[(i + 1) % n] - poly[i];
        for &scale in &[0.5, 0.1, 0.02] {
            for sign in [1.0, -1.0] {
                let cand = poly[i] + chord * Complex64::new(0.0, sign) * (scale * n as f64 / 8.0);
                if polygon_winding(poly, cand) != 0 {
                    return Some(cand);
                }
            }
        }
    }
    None
}

/// Uniform-parameter Nyström grid on the boundary.
#[derive(Clone, Debug)]
pub struct BoundaryGrid {
    domain: DomainSpec,
    m: usize,
    /// Parameter of each node on its own curve.
    pub t: Vec<f64>,
    pub z: Vec<Complex64>,
    /// `z'(t)` at each node.
    pub dz: Vec<Complex64>,
    /// `z''(t)` at each node.
    pub d2z: Vec<Complex64>,
    /// Unit tangent in the standard orientation.
    pub tangent: Vec<Complex64>,
    /// Arc-length weights `|z'| 2π/m`.
    pub ds: Vec<f64>,
}

/// Discretize every boundary curve with `m` equispaced parameter nodes.
pub fn discretize(spec: &DomainSpec, m: usize) -> Result<BoundaryGrid> {
    if m < 32 || m % 2 != 0 {
        return Err(Error::InvalidNodeCount(m));
    }
    let n = spec.connectivity();
    let h = 2.0 * PI / m as f64;
    let mut grid = BoundaryGrid {
        domain: spec.clone(),
        m,
        t: Vec::with_capacity(n * m),
        z: Vec::with_capacity(n * m),
        dz: Vec::with_capacity(n * m),
        d2z: Vec::with_capacity(n * m),
        tangent: Vec::with_capacity(n * m),
        ds: Vec::with_capacity(n * m),
    };
    for j in 0..n {
        for i in 0..m {
            let t = i as f64 * h;
            let [z, dz, d2z] = spec.eval(j, t);
            grid.t.push(t);
            grid.z.push(z);
            grid.dz.push(dz);
            grid.d2z.push(d2z);
            grid.tangent.push(dz / dz.norm());
            grid.ds.push(dz.norm() * h);
        }
    }
    Ok(grid)
}

impl BoundaryGrid {
    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    /// Nodes per curve.
    pub fn nodes_per_curve(&self) -> usize {
        self.m
    }

    pub fn connectivity(&self) -> usize {
        self.domain.connectivity()
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    /// Parameter step `2π/m`.
    pub fn step(&self) -> f64 {
        2.0 * PI / self.m as f64
    }

    /// Index of the outer curve.
    pub fn outer(&self) -> usize {
        self.connectivity() - 1
    }

    pub fn curve_range(&self, j: usize) -> Range<usize> {
        j * self.m..(j + 1) * self.m
    }

    /// Flat index to (curve, local index).
    pub fn local(&self, i: usize) -> (usize, usize) {
        (i / self.m, i % self.m)
    }

    pub fn flat(&self, curve: usize, local: usize) -> usize {
        curve * self.m + local
    }

    /// Quadrature weight for `∮ g dz`: `z'(t_i) 2π/m`.
    pub fn dz_weight(&self, i: usize) -> Complex64 {
        self.dz[i] * self.step()
    }

    /// Largest arc-length spacing between neighbouring nodes.
    pub fn max_spacing(&self) -> f64 {
        self.ds.iter().cloned().fold(0.0, f64::max)
    }

    /// Largest node spacing on curve `j`.
    pub fn curve_spacing(&self, j: usize) -> f64 {
        self.ds[self.curve_range(j)].iter().cloned().fold(0.0, f64::max)
    }

    /// Distance from `p` to the boundary and the node spacing of the
    /// nearest curve.
    pub fn resolution_at(&self, p: Complex64) -> (f64, f64) {
        let (d, j, _) = self.domain.nearest(p);
        (d, self.curve_spacing(j))
    }

    pub fn contains(&self, p: Complex64) -> Result<bool> {
        self.domain.contains(p)
    }

    pub fn min_boundary_distance(&self, p: Complex64) -> f64 {
        self.domain.min_boundary_distance(p)
    }

    /// Errors with [`Error::NotInDomain`] unless `p` is strictly inside.
    pub fn require_interior(&self, p: Complex64) -> Result<()> {
        match self.contains(p) {
            Ok(true) => Ok(()),
            Ok(false) | Err(Error::BoundaryProximity { .. }) => Err(Error::NotInDomain(p)),
            Err(e) => Err(e),
        }
    }

    /// `∮_{γ_j} g dz` by the trapezoid rule.
    pub fn contour_integral(&self, j: usize, values: &[Complex64]) -> Complex64 {
        self.curve_range(j)
            .map(|i| values[i] * self.dz_weight(i))
            .sum()
    }

    /// Winding number of curve `j` about `p`, from the grid quadrature.
    pub fn winding(&self, j: usize, p: Complex64) -> f64 {
        let s: Complex64 = self
            .curve_range(j)
            .map(|i| self.dz_weight(i) / (self.z[i] - p))
            .sum();
        (s / Complex64::new(0.0, 2.0 * PI)).re
    }

    /// Perimeter of curve `j`.
    pub fn length(&self, j: usize) -> f64 {
        self.ds[self.curve_range(j)].iter().sum()
    }
}
