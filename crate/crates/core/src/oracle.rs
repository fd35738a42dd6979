//! Closed-form references for the unit disc and the annulus `q < |z| < 1`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{CurveSpec, DomainSpec, Role};
use crate::path::{integrate_along_path, PathSpec};

/// Largest modulus accepted by the annulus series.
pub const MAX_MODULUS: f64 = 0.9;
const SERIES_TOLERANCE: f64 = 1e-14;
const MAX_TERMS: usize = 200;

fn unit_disc() -> DomainSpec {
    DomainSpec::new(vec![CurveSpec::circle(Complex64::default(), 1.0, Role::Outer)])
        .expect("unit circle is a valid domain")
}

/// `−ln |(z − w)/(1 − w̄z)|`.
pub fn disc_green(z: Complex64, w: Complex64) -> Result<f64> {
    for p in [z, w] {
        if p.norm() >= 1.0 {
            return Err(Error::NotInDomain(p));
        }
    }
    if z == w {
        return Err(Error::Singularity(z));
    }
    Ok(-((z - w) / (1.0 - w.conj() * z)).norm().ln())
}

/// `Re ∫ 2R(ζ, w, w̄) dζ` along `path` from `1` to `z`, with
/// `R(ζ,w,v) = −(1 − wv)/(2(ζ − w)(1 − vζ))`.
pub fn disc_alpha_path(z: Complex64, w: Complex64, path: &PathSpec) -> Result<f64> {
    let (start, end) = match (path.start(), path.end()) {
        (Some(s), Some(e)) => (s, e),
        _ => return Err(Error::Routing("empty path".into())),
    };
    if (start - 1.0).norm() > 1e-12 || (end - z).norm() > 1e-12 {
        return Err(Error::Routing("path must run from 1 to z".into()));
    }
    let resolved = path.resolve(&unit_disc())?;
    for seg in &resolved.segments {
        for k in 0..=256 {
            if (seg.eval(k as f64 / 256.0).0 - w).norm() < 1e-10 {
                return Err(Error::Singularity(w));
            }
        }
    }
    let two_r = |zeta: Complex64| -(1.0 - w * w.conj()) / ((zeta - w) * (1.0 - w.conj() * zeta));
    Ok(integrate_along_path(two_r, &resolved, 1e-13)?.re)
}

/// The annulus `q < |z| < 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnulusSpec {
    q: f64,
}

impl AnnulusSpec {
    pub fn new(q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidDomain(format!("annulus modulus {q} not in (0, 1)")));
        }
        Ok(Self { q })
    }

    pub fn modulus(&self) -> f64 {
        self.q
    }

    pub fn domain(&self) -> DomainSpec {
        DomainSpec::new(vec![
            CurveSpec::circle(Complex64::default(), self.q, Role::Inner),
            CurveSpec::circle(Complex64::default(), 1.0, Role::Outer),
        ])
        .expect("annulus is a valid domain")
    }

    fn check(&self, z: Complex64) -> Result<()> {
        let r = z.norm();
        if r <= self.q || r >= 1.0 {
            return Err(Error::NotInDomain(z));
        }
        Ok(())
    }

    /// Green's function by the product (image) series
    ///
    /// ```text
    /// G = ln(r</q) ln(1/r>)/ln(1/q)
    ///   + Σ_k [−ln|1 − x₁q^{2k}e^{iθ}| + ln|1 − x₂q^{2k}e^{iθ}|
    ///          + ln|1 − x₃q^{2k}e^{iθ}| − ln|1 − x₄q^{2k}e^{iθ}|]
    /// ```
    ///
    /// with `x₁ = r</r>`, `x₂ = r<r>`, `x₃ = q²/(r<r>)`, `x₄ = q²r>/r<`.
    pub fn green(&self, z: Complex64, w: Complex64) -> Result<f64> {
        self.check(z)?;
        self.check(w)?;
        if z == w {
            return Err(Error::Singularity(z));
        }
        let q = self.q;
        if q > MAX_MODULUS {
            return Err(Error::InvalidDomain(format!(
                "annulus series needs q <= {MAX_MODULUS}, got {q}"
            )));
        }
        let (rz, rw) = (z.norm(), w.norm());
        let (lo, hi) = if rz < rw { (rz, rw) } else { (rw, rz) };
        let e = Complex64::from_polar(1.0, z.arg() - w.arg());
        let xs = [lo / hi, lo * hi, q * q / (lo * hi), q * q * hi / lo];
        let signs = [-1.0, 1.0, 1.0, -1.0];
        let mut g = (lo / q).ln() * (1.0 / hi).ln() / (1.0 / q).ln();
        let mut scale = 1.0;
        for _ in 0..MAX_TERMS {
            let mut biggest: f64 = 0.0;
            for (x, s) in xs.iter().zip(signs) {
                let t = s * (1.0 - x * scale * e).norm().ln();
                biggest = biggest.max(t.abs());
                g += t;
            }
            if biggest < SERIES_TOLERANCE {
                return Ok(g);
            }
            scale *= q * q;
        }
        Err(Error::NonConvergence {
            estimate: Complex64::new(g, 0.0),
            error: f64::NAN,
        })
    }

    /// Harmonic measure of the inner circle, `ln|z|/ln q`.
    pub fn harmonic(&self, z: Complex64) -> f64 {
        z.norm().ln() / self.q.ln()
    }

    /// `∮_{|z|=q, clockwise} F' dz` for the inner harmonic measure.
    pub fn period(&self) -> Complex64 {
        Complex64::new(0.0, -2.0 * PI / self.q.ln())
    }
}

pub fn annulus_green(q: f64, z: Complex64, w: Complex64) -> Result<f64> {
    AnnulusSpec::new(q)?.green(z, w)
}

pub fn annulus_harmonic(q: f64, z: Complex64) -> Result<f64> {
    let a = AnnulusSpec::new(q)?;
    let r = z.norm();
    if r < q || r > 1.0 {
        return Err(Error::NotInDomain(z));
    }
    Ok(a.harmonic(z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use proptest::strategy::ValueTree;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Fourier-mode form of the annulus Green's function, summed directly
    /// (converges geometrically only for distinct radii).
    fn fourier_green(q: f64, z: Complex64, w: Complex64) -> f64 {
        let (rz, rw) = (z.norm(), w.norm());
        let (lo, hi) = if rz < rw { (rz, rw) } else { (rw, rz) };
        let theta = z.arg() - w.arg();
        let mut g = (lo / q).ln() * (1.0 / hi).ln() / (1.0 / q).ln();
        for n in 1..400 {
            let nf = n as f64;
            let a = (lo.powf(nf) - q.powf(2.0 * nf) * lo.powf(-nf)) * (hi.powf(-nf) - hi.powf(nf));
            g += a / (nf * (1.0 - q.powf(2.0 * nf))) * (nf * theta).cos();
        }
        g
    }

    #[test]
    fn disc_values() {
        assert!((disc_green(c(0.5, 0.0), c(0.0, 0.0)).unwrap() - 2f64.ln()).abs() < 1e-15);
        let g = disc_green(c(0.5, 0.0), c(0.3, 0.0)).unwrap();
        assert!((g - (0.85f64 / 0.2).ln()).abs() < 1e-14);
        assert!((g - 1.446_919).abs() < 1e-6);
        assert!(disc_green(c(0.3, 0.0), c(0.3, 0.0)).is_err());
    }

    #[test]
    fn disc_alpha_matches_green() {
        let straight = PathSpec::segment(c(1.0, 0.0), c(0.5, 0.0));
        let v = disc_alpha_path(c(0.5, 0.0), c(0.0, 0.0), &straight).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-8);
        let w = c(0.3, 0.0);
        let above = PathSpec::segment(c(1.0, 0.0), c(0.5, 0.0)).avoiding(w, 0.1);
        let v = disc_alpha_path(c(0.5, 0.0), w, &above).unwrap();
        assert!((v - disc_green(c(0.5, 0.0), w).unwrap()).abs() < 1e-8);
        // endpoint on the far side of w, reached above and below it
        let z = c(0.1, 0.0);
        let up = PathSpec::new(vec![c(1.0, 0.0), c(0.3, 0.3), z]);
        let down = PathSpec::new(vec![c(1.0, 0.0), c(0.3, -0.3), z]);
        let a = disc_alpha_path(z, w, &up).unwrap();
        let b = disc_alpha_path(z, w, &down).unwrap();
        assert!((a - b).abs() < 1e-8);
        assert!((a - disc_green(z, w).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn disc_alpha_on_random_pairs() {
        let mut runner = proptest::test_runner::TestRunner::deterministic();
        let strategy = (0.05f64..0.9, -PI..PI, 0.05f64..0.9, -PI..PI);
        for _ in 0..20 {
            let (rz, tz, rw, tw) = strategy.new_tree(&mut runner).unwrap().current();
            let z = Complex64::from_polar(rz, tz);
            let w = Complex64::from_polar(rw, tw);
            if (z - w).norm() < 0.05 {
                continue;
            }
            let radius = 0.5 * (z - w).norm().min(1.0 - rw).min(0.05);
            let path = PathSpec::new(vec![c(1.0, 0.0), c(0.0, 0.0), z]).avoiding(w, radius);
            let Ok(v) = disc_alpha_path(z, w, &path) else {
                continue;
            };
            assert!((v - disc_green(z, w).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn annulus_series_matches_fourier_form() {
        for (z, w) in [
            (c(0.0, 0.7), c(0.8, 0.0)),
            (c(-0.6, 0.2), c(0.9, 0.1)),
            (c(0.55, -0.1), c(0.3, 0.62)),
        ] {
            let a = annulus_green(0.5, z, w).unwrap();
            let b = fourier_green(0.5, z, w);
            assert!((a - b).abs() < 1e-10, "{a} {b}");
        }
    }

    #[test]
    fn annulus_boundary_and_limits() {
        let w = c(0.75, 0.0);
        let z = Complex64::from_polar(1.0 - 1e-4, 1.0);
        let g = annulus_green(0.5, z, w).unwrap();
        assert!(g > 0.0 && g < 1e-3);
        assert!(annulus_green(0.95, c(0.97, 0.0), c(0.0, 0.97)).is_err());
        assert!(annulus_green(0.5, c(0.3, 0.0), w).is_err());
        assert!((annulus_harmonic(0.5, c(0.75, 0.0)).unwrap() - 0.415_037).abs() < 1e-6);
        assert!((annulus_harmonic(0.5, c(0.5, 0.0)).unwrap() - 1.0).abs() < 1e-15);
        assert!(annulus_harmonic(0.5, c(0.0, 1.0)).unwrap().abs() < 1e-15);
        assert!((annulus_harmonic(0.5, c(0.5f64.sqrt(), 0.0)).unwrap() - 0.5).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn annulus_symmetries(
            rz in 0.52f64..0.98, tz in -PI..PI,
            rw in 0.52f64..0.98, tw in -PI..PI,
            rot in -PI..PI,
        ) {
            let z = Complex64::from_polar(rz, tz);
            let w = Complex64::from_polar(rw, tw);
            prop_assume!((z - w).norm() > 1e-3);
            let g = annulus_green(0.5, z, w).unwrap();
            prop_assert!(g > 0.0);
            prop_assert!((g - annulus_green(0.5, w, z).unwrap()).abs() < 1e-10);
            prop_assert!((g - annulus_green(0.5, z.conj(), w.conj()).unwrap()).abs() < 1e-10);
            let e = Complex64::from_polar(1.0, rot);
            prop_assert!((g - annulus_green(0.5, z * e, w * e).unwrap()).abs() < 1e-10);
        }

        #[test]
        fn disc_green_is_symmetric(
            rz in 0.0f64..0.95, tz in -PI..PI,
            rw in 0.0f64..0.95, tw in -PI..PI,
        ) {
            let z = Complex64::from_polar(rz, tz);
            let w = Complex64::from_polar(rw, tw);
            prop_assume!((z - w).norm() > 1e-6);
            let g = disc_green(z, w).unwrap();
            prop_assert!((g - disc_green(w, z).unwrap()).abs() < 1e-12);
        }
    }
}
