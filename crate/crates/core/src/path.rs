//! Integration paths in the closed domain and adaptive Gauss–Legendre
//! contour quadrature along them.

use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::DomainSpec;

/// Gauss–Legendre order per panel.
pub const ORDER: usize = 16;
/// Maximum bisection depth of the adaptive rule.
pub const MAX_DEPTH: usize = 50;
/// Points sampled per segment when checking that a path stays in the domain.
const CHECK_SAMPLES: usize = 64;

fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(NonZeroUsize::new(ORDER).unwrap()))
        .as_node_weight_pairs()
}

/// A disc the path must not enter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Obstacle {
    pub center: Complex64,
    pub radius: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Segment {
    Line {
        from: Complex64,
        to: Complex64,
    },
    /// `center + radius e^{i(start + sweep s)}` for `s ∈ [0, 1]`.
    Arc {
        center: Complex64,
        radius: f64,
        start: f64,
        sweep: f64,
    },
}

impl Segment {
    /// Point and derivative at `s ∈ [0, 1]`.
    pub fn eval(&self, s: f64) -> (Complex64, Complex64) {
        match *self {
            Segment::Line { from, to } => (from + (to - from) * s, to - from),
            Segment::Arc {
                center,
                radius,
                start,
                sweep,
            } => {
                let e = Complex64::from_polar(radius, start + sweep * s);
                (center + e, Complex64::new(0.0, sweep) * e)
            }
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { from, to } => (to - from).norm(),
            Segment::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }
}

/// A requested path: waypoints joined by straight pieces, with circular
/// detours around obstacles that a piece would cross.
#[derive(Clone, Debug, Default)]
pub struct PathSpec {
    pub waypoints: Vec<Complex64>,
    pub obstacles: Vec<Obstacle>,
}

impl PathSpec {
    pub fn new(waypoints: Vec<Complex64>) -> Self {
        Self {
            waypoints,
            obstacles: Vec::new(),
        }
    }

    pub fn segment(from: Complex64, to: Complex64) -> Self {
        Self::new(vec![from, to])
    }

    pub fn avoiding(mut self, center: Complex64, radius: f64) -> Self {
        self.obstacles.push(Obstacle { center, radius });
        self
    }

    pub fn start(&self) -> Option<Complex64> {
        self.waypoints.first().copied()
    }

    pub fn end(&self) -> Option<Complex64> {
        self.waypoints.last().copied()
    }

    /// This path followed by `next`, which should start where this one ends.
    pub fn join(mut self, next: PathSpec) -> Self {
        let mut points = next.waypoints.into_iter().peekable();
        if let (Some(end), Some(first)) = (self.end(), points.peek()) {
            if (end - first).norm() < 1e-12 {
                points.next();
            }
        }
        self.waypoints.extend(points);
        for ob in next.obstacles {
            if !self.obstacles.contains(&ob) {
                self.obstacles.push(ob);
            }
        }
        self
    }

    /// Winding number of the waypoint polygon about `p`, when closed.
    pub fn winding_about(&self, p: Complex64) -> i32 {
        let turn: f64 = self
            .waypoints
            .windows(2)
            .map(|w| ((w[1] - p) / (w[0] - p)).arg())
            .sum();
        (turn / (2.0 * PI)).round() as i32
    }

    /// Resolve into segments and arcs and check that the result stays in
    /// the closed domain and outside every exclusion disc.
    pub fn resolve(&self, domain: &DomainSpec) -> Result<ResolvedPath> {
        if self.waypoints.is_empty() {
            return Err(Error::Routing("path has no waypoints".into()));
        }
        for p in &self.waypoints {
            if let Some(ob) = self.obstacles.iter().find(|ob| (p - ob.center).norm() < ob.radius) {
                return Err(Error::Routing(format!(
                    "waypoint inside exclusion disc about ({}, {})",
                    ob.center.re, ob.center.im
                )));
            }
        }
        let mut segments = Vec::new();
        for pair in self.waypoints.windows(2) {
            self.resolve_piece(domain, pair[0], pair[1], &mut segments)?;
        }
        let path = ResolvedPath {
            segments,
            start: self.waypoints[0],
            end: *self.waypoints.last().unwrap(),
        };
        path.check(domain, &self.obstacles)?;
        Ok(path)
    }

    fn resolve_piece(
        &self,
        domain: &DomainSpec,
        a: Complex64,
        b: Complex64,
        out: &mut Vec<Segment>,
    ) -> Result<()> {
        let d = b - a;
        if d.norm() == 0.0 {
            return Ok(());
        }
        // crossings of the chord with each exclusion disc, as parameter pairs
        let mut cuts: Vec<(f64, f64, Obstacle)> = Vec::new();
        for ob in &self.obstacles {
            let f = a - ob.center;
            let qa = d.norm_sqr();
            let qb = 2.0 * (f.conj() * d).re;
            let qc = f.norm_sqr() - ob.radius * ob.radius;
            let disc = qb * qb - 4.0 * qa * qc;
            if disc <= 0.0 {
                continue;
            }
            let r = disc.sqrt();
            let (s0, s1) = ((-qb - r) / (2.0 * qa), (-qb + r) / (2.0 * qa));
            if s1 <= 0.0 || s0 >= 1.0 {
                continue;
            }
            if s0 < 0.0 || s1 > 1.0 {
                return Err(Error::Routing(format!(
                    "waypoint inside exclusion disc about ({}, {})",
                    ob.center.re, ob.center.im
                )));
            }
            cuts.push((s0, s1, *ob));
        }
        cuts.sort_by(|x, y| x.0.total_cmp(&y.0));
        if cuts.windows(2).any(|w| w[1].0 < w[0].1) {
            return Err(Error::Routing("overlapping exclusion discs".into()));
        }
        let mut s = 0.0;
        for (s0, s1, ob) in cuts {
            let (p, q) = (a + d * s0, a + d * s1);
            out.push(Segment::Line { from: a + d * s, to: p });
            let start = (p - ob.center).arg();
            let mut sweep = ((q - ob.center) / (p - ob.center)).arg();
            // the short way round lies on the far side of the chord from the
            // centre; `arg` already picks the short way unless the chord
            // passes through the centre, where we go counterclockwise
            if sweep.abs() >= PI - 1e-12 {
                sweep = PI;
            }
            let arc = Segment::Arc {
                center: ob.center,
                radius: ob.radius,
                start,
                sweep,
            };
            let long = Segment::Arc {
                center: ob.center,
                radius: ob.radius,
                start,
                sweep: sweep - 2.0 * PI * sweep.signum(),
            };
            if segment_inside(domain, &arc) {
                out.push(arc);
            } else if segment_inside(domain, &long) {
                out.push(long);
            } else {
                return Err(Error::Routing(format!(
                    "no detour around ({}, {}) stays in the domain",
                    ob.center.re, ob.center.im
                )));
            }
            s = s1;
        }
        out.push(Segment::Line { from: a + d * s, to: b });
        Ok(())
    }
}

fn segment_inside(domain: &DomainSpec, seg: &Segment) -> bool {
    (0..=CHECK_SAMPLES).all(|k| domain.contains_closed(seg.eval(k as f64 / CHECK_SAMPLES as f64).0))
}

#[derive(Clone, Debug)]
pub struct ResolvedPath {
    pub segments: Vec<Segment>,
    pub start: Complex64,
    pub end: Complex64,
}

impl ResolvedPath {
    pub fn length(&self) -> f64 {
        self.segments.iter().map(Segment::length).sum()
    }

    fn check(&self, domain: &DomainSpec, obstacles: &[Obstacle]) -> Result<()> {
        for seg in &self.segments {
            for k in 0..=CHECK_SAMPLES {
                let p = seg.eval(k as f64 / CHECK_SAMPLES as f64).0;
                if !domain.contains_closed(p) {
                    return Err(Error::Routing(format!("path leaves the domain at ({}, {})", p.re, p.im)));
                }
                if let Some(ob) = obstacles
                    .iter()
                    .find(|ob| (p - ob.center).norm() < ob.radius * (1.0 - 1e-9))
                {
                    return Err(Error::Routing(format!(
                        "path enters the exclusion disc about ({}, {})",
                        ob.center.re, ob.center.im
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `∫_path g(ζ) dζ` by adaptive composite Gauss–Legendre quadrature.
///
/// Each panel is accepted when the single-panel estimate and the sum over
/// its two halves agree to `tol` (absolute, scaled by the panel's share of
/// the path length).
pub fn integrate_along_path(
    integrand: impl Fn(Complex64) -> Complex64,
    path: &ResolvedPath,
    tol: f64,
) -> Result<Complex64> {
    let total = path.length();
    let mut sum = Complex64::default();
    for seg in &path.segments {
        if seg.length() == 0.0 {
            continue;
        }
        let share = if total > 0.0 { seg.length() / total } else { 1.0 };
        let whole = panel(&integrand, seg, 0.0, 1.0);
        sum += adapt(&integrand, seg, 0.0, 1.0, whole, tol * share, 0)?;
    }
    Ok(sum)
}

fn panel(g: &impl Fn(Complex64) -> Complex64, seg: &Segment, a: f64, b: f64) -> Complex64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    rule()
        .iter()
        .map(|&(x, w)| {
            let (z, dz) = seg.eval(mid + half * x);
            g(z) * dz * (w * half)
        })
        .sum()
}

fn adapt(
    g: &impl Fn(Complex64) -> Complex64,
    seg: &Segment,
    a: f64,
    b: f64,
    whole: Complex64,
    tol: f64,
    depth: usize,
) -> Result<Complex64> {
    let mid = 0.5 * (a + b);
    let left = panel(g, seg, a, mid);
    let right = panel(g, seg, mid, b);
    let error = (left + right - whole).norm();
    if error <= tol || (error <= 1e-14 * whole.norm().max(1.0)) {
        return Ok(left + right);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::NonConvergence {
            estimate: left + right,
            error,
        });
    }
    Ok(adapt(g, seg, a, mid, left, 0.5 * tol, depth + 1)? + adapt(g, seg, mid, b, right, 0.5 * tol, depth + 1)?)
}

/// Find a path from `from` to `to` inside the closed domain that avoids the
/// obstacles: the straight segment when admissible, otherwise a shortest
/// route through an interior lattice, shortened greedily.
pub fn route(domain: &DomainSpec, from: Complex64, to: Complex64, obstacles: &[Obstacle]) -> Result<PathSpec> {
    let with = |waypoints: Vec<Complex64>| PathSpec {
        waypoints,
        obstacles: obstacles.to_vec(),
    };
    let direct = with(vec![from, to]);
    if direct.resolve(domain).is_ok() {
        return Ok(direct);
    }
    let spacing = domain.diameter() / 24.0;
    let lattice: Vec<Complex64> = domain
        .interior_lattice(24, 0.5 * spacing)
        .into_iter()
        .filter(|p| obstacles.iter().all(|ob| (p - ob.center).norm() > ob.radius + 0.5 * spacing))
        .collect();
    let mut nodes = vec![from, to];
    nodes.extend(lattice);
    let ok = |a: Complex64, b: Complex64| with(vec![a, b]).resolve(domain).is_ok();

    // Dijkstra with neighbour edges on the lattice and free edges from the
    // two endpoints to every visible node
    let n = nodes.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![usize::MAX; n];
    let mut done = vec![false; n];
    dist[0] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Entry(0.0, 0));
    while let Some(Entry(d, u)) = heap.pop() {
        let d = -d;
        if done[u] {
            continue;
        }
        done[u] = true;
        if u == 1 {
            break;
        }
        for v in 0..n {
            if done[v] || v == u {
                continue;
            }
            let len = (nodes[u] - nodes[v]).norm();
            let endpoint = u < 2 || v < 2;
            if !endpoint && len > 1.5 * spacing {
                continue;
            }
            let nd = d + len;
            if nd < dist[v] && ok(nodes[u], nodes[v]) {
                dist[v] = nd;
                prev[v] = u;
                heap.push(Entry(-nd, v));
            }
        }
    }
    if !dist[1].is_finite() {
        return Err(Error::Routing(format!(
            "no admissible path from ({}, {}) to ({}, {})",
            from.re, from.im, to.re, to.im
        )));
    }
    let mut chain = vec![1];
    while *chain.last().unwrap() != 0 {
        chain.push(prev[*chain.last().unwrap()]);
    }
    chain.reverse();
    let points: Vec<Complex64> = chain.iter().map(|&i| nodes[i]).collect();
    // greedy shortcutting
    let mut waypoints = vec![points[0]];
    let mut i = 0;
    while i + 1 < points.len() {
        let mut j = points.len() - 1;
        while j > i + 1 && !ok(points[i], points[j]) {
            j -= 1;
        }
        waypoints.push(points[j]);
        i = j;
    }
    let path = with(waypoints);
    path.resolve(domain)?;
    Ok(path)
}

/// A closed path around hole `hole` through the middle of the gap between
/// that hole and the rest of the boundary, avoiding `obstacles`.
pub fn loop_around(domain: &DomainSpec, hole: usize, obstacles: &[Obstacle]) -> Result<PathSpec> {
    let holes = domain.hole_points();
    let center = *holes.get(hole).ok_or(Error::OutOfRange {
        index: hole,
        limit: holes.len(),
    })?;
    let step = domain.diameter() / 800.0;
    let mut anchors = Vec::new();
    for k in 0..LOOP_ANCHORS {
        let dir = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / LOOP_ANCHORS as f64);
        let mut best: Option<(f64, Complex64)> = None;
        let mut r = step;
        while r < domain.diameter() {
            let p = center + r * dir;
            if domain.contains_closed(p) {
                let d = domain.min_boundary_distance(p);
                if best.is_none_or(|(b, _)| d > b) {
                    best = Some((d, p));
                }
            } else if best.is_some() {
                break;
            }
            r += step;
        }
        if let Some((_, p)) = best {
            if obstacles.iter().all(|ob| (p - ob.center).norm() > ob.radius) {
                anchors.push(p);
            }
        }
    }
    if anchors.len() < 3 {
        return Err(Error::Routing(format!("no loop around hole {hole}")));
    }
    let mut path = PathSpec::new(vec![anchors[0]]);
    for k in 0..anchors.len() {
        let next = anchors[(k + 1) % anchors.len()];
        path = path.join(route(domain, anchors[k], next, obstacles)?);
    }
    path.obstacles = obstacles.to_vec();
    for (j, &c) in holes.iter().enumerate() {
        let want = if j == hole { 1 } else { 0 };
        if path.winding_about(c).abs() != want {
            return Err(Error::Routing(format!("loop around hole {hole} also winds about hole {j}")));
        }
    }
    Ok(path)
}

/// Anchor points tried around a hole by [`loop_around`].
const LOOP_ANCHORS: usize = 12;

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0).then(other.1.cmp(&self.1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CurveSpec, Role};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn disc() -> DomainSpec {
        DomainSpec::new(vec![CurveSpec::circle(c(0.0, 0.0), 1.0, Role::Outer)]).unwrap()
    }

    fn annulus() -> DomainSpec {
        DomainSpec::new(vec![
            CurveSpec::circle(c(0.0, 0.0), 0.5, Role::Inner),
            CurveSpec::circle(c(0.0, 0.0), 1.0, Role::Outer),
        ])
        .unwrap()
    }

    #[test]
    fn upper_semicircle_of_reciprocal() {
        let path = ResolvedPath {
            segments: vec![Segment::Arc {
                center: c(0.0, 0.0),
                radius: 1.0,
                start: 0.0,
                sweep: PI,
            }],
            start: c(1.0, 0.0),
            end: c(-1.0, 0.0),
        };
        let v = integrate_along_path(|z| 1.0 / z, &path, 1e-13).unwrap();
        assert!((v - c(0.0, PI)).norm() < 1e-10);
    }

    #[test]
    fn identity_on_unit_segment() {
        let path = PathSpec::segment(c(0.0, 0.0), c(1.0, 0.0)).resolve(&disc()).unwrap();
        let v = integrate_along_path(|z| z, &path, 1e-13).unwrap();
        assert!((v - 0.5).norm() < 1e-15);
    }

    #[test]
    fn near_pole_converges() {
        let domain = disc();
        let path = PathSpec::segment(c(-0.5, 0.0), c(0.5, 0.0)).resolve(&domain).unwrap();
        for d in [1e-1, 1e-2, 1e-3] {
            let p = c(0.1, d);
            let v = integrate_along_path(|z| 1.0 / (z - p), &path, 1e-12).unwrap();
            let want = ((c(0.5, 0.0) - p) / (c(-0.5, 0.0) - p)).ln();
            assert!((v - want).norm() < 1e-10, "d={d}");
        }
    }

    #[test]
    fn detour_around_obstacle() {
        let domain = disc();
        let path = PathSpec::segment(c(-0.5, 0.0), c(0.5, 0.0))
            .avoiding(c(0.0, 0.01), 0.1)
            .resolve(&domain)
            .unwrap();
        assert_eq!(path.segments.len(), 3);
        // the detour goes below the obstacle, so the pole is not enclosed
        let v = integrate_along_path(|z| 1.0 / (z - c(0.0, 0.01)), &path, 1e-13).unwrap();
        let straight = ((c(0.5, -0.01)) / (c(-0.5, -0.01))).ln();
        assert!((v - straight).norm() < 1e-10);
        for k in 0..=50 {
            let s = k as f64 / 50.0;
            let z = path.segments[1].eval(s).0;
            assert!((z - c(0.0, 0.01)).norm() >= 0.1 - 1e-12);
        }
    }

    #[test]
    fn rejects_paths_leaving_the_domain() {
        let domain = annulus();
        assert!(PathSpec::segment(c(0.75, 0.0), c(-0.75, 0.0)).resolve(&domain).is_err());
        assert!(PathSpec::segment(c(0.75, 0.0), c(0.75, 0.0))
            .avoiding(c(0.75, 0.0), 0.01)
            .resolve(&domain)
            .is_err());
    }

    #[test]
    fn router_goes_around_the_hole() {
        let domain = annulus();
        let path = route(&domain, c(1.0, 0.0), c(-0.75, 0.0), &[]).unwrap();
        let resolved = path.resolve(&domain).unwrap();
        assert!(path.waypoints.len() >= 3);
        assert!((resolved.start - 1.0).norm() < 1e-12);
        assert!((resolved.end + 0.75).norm() < 1e-12);
        let v = integrate_along_path(|z| 2.0 * z, &resolved, 1e-13).unwrap();
        assert!((v - (0.5625 - 1.0)).norm() < 1e-12);
    }

    #[test]
    fn loop_encircles_one_hole() {
        let domain = DomainSpec::new(vec![
            CurveSpec::circle(c(-0.45, 0.1), 0.2, Role::Inner),
            CurveSpec::circle(c(0.4, -0.15), 0.15, Role::Inner),
            CurveSpec::circle(c(0.0, 0.0), 1.0, Role::Outer),
        ])
        .unwrap();
        let ob = [Obstacle {
            center: c(-0.45, 0.5),
            radius: 0.01,
        }];
        for hole in 0..2 {
            let path = loop_around(&domain, hole, &ob).unwrap();
            assert_eq!(path.start(), path.end());
            let resolved = path.resolve(&domain).unwrap();
            let z = domain.hole_points()[hole];
            let v = integrate_along_path(|p| 1.0 / (p - z), &resolved, 1e-12).unwrap();
            assert!((v.im.abs() - 2.0 * PI).abs() < 1e-9);
            let other = domain.hole_points()[1 - hole];
            let v = integrate_along_path(|p| 1.0 / (p - other), &resolved, 1e-12).unwrap();
            assert!(v.norm() < 1e-9);
        }
        assert!(loop_around(&domain, 2, &[]).is_err());
    }

    #[test]
    fn zero_length_path() {
        let path = PathSpec::new(vec![c(0.2, 0.1)]).resolve(&disc()).unwrap();
        assert_eq!(integrate_along_path(|z| z, &path, 1e-12).unwrap(), c(0.0, 0.0));
    }
}
