use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::geometry::DomainSpec;

/// Run configuration: the domain document plus run parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub domain: DomainSpec,
    pub nodes_per_curve: usize,
    /// Label used in reports.
    #[serde(default)]
    pub name: Option<String>,
    /// Ahlfors base point `a`; chosen deep inside the domain when absent.
    #[serde(default)]
    pub base_point: Option<[f64; 2]>,
    /// Green's function sources `w`; a few lattice points when empty.
    #[serde(default)]
    pub sources: Vec<[f64; 2]>,
    #[serde(default)]
    pub probe_grid: ProbeGrid,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct ProbeGrid {
    /// Lattice points per axis for identity probes.
    pub per_axis: usize,
    /// Minimum probe distance from the boundary in node spacings.
    pub boundary_spacings: f64,
    /// Minimum probe distance from the source, relative to the diameter.
    pub source_clearance: f64,
    /// Probes per source for the path-independence check.
    pub path_probes: usize,
    /// Lattice points per axis for exported fields.
    pub field_per_axis: usize,
    /// Finite-difference step relative to the diameter.
    pub fd_step: f64,
}

impl Default for ProbeGrid {
    fn default() -> Self {
        Self {
            per_axis: 7,
            boundary_spacings: 5.0,
            source_clearance: 0.1,
            path_probes: 3,
            field_per_axis: 41,
            fd_step: 1e-5,
        }
    }
}

/// Pass thresholds, one per identity in the verification report.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub frame_period_purity: f64,
    pub frame_normalization: f64,
    pub frame_i_sigma_real: f64,
    pub ahlfors_unimodular: f64,
    pub ahlfors_degree: f64,
    pub ahlfors_zero: f64,
    pub ahlfors_derivative: f64,
    pub ahlfors_log_derivative: f64,
    pub branch_count: f64,
    pub kernel_interpolation: f64,
    pub garabedian_interpolation: f64,
    pub kernel_boundary_identity: f64,
    pub kernel_reproducing: f64,
    pub lambda_sum: f64,
    pub boundary_reflection: f64,
    pub green_gradient: f64,
    pub green_by_path: f64,
    pub green_symmetry: f64,
    pub green_decomposition: f64,
    pub path_independence: f64,
    pub type2_v: f64,
    pub type2_v_imaginary: f64,
    pub lambda_contour: f64,
    pub lambda_contour_imaginary: f64,
    pub green_composition: f64,
    pub poisson_real: f64,
    pub poisson_positive: f64,
    pub poisson_mass: f64,
    pub poisson_periods: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            frame_period_purity: 1e-8,
            frame_normalization: 1e-8,
            frame_i_sigma_real: 1e-10,
            ahlfors_unimodular: 1e-8,
            ahlfors_degree: 1e-6,
            ahlfors_zero: 1e-8,
            ahlfors_derivative: 1e-6,
            ahlfors_log_derivative: 1e-6,
            branch_count: 0.0,
            kernel_interpolation: 1e-6,
            garabedian_interpolation: 1e-5,
            kernel_boundary_identity: 1e-8,
            kernel_reproducing: 1e-7,
            lambda_sum: 1e-8,
            boundary_reflection: 1e-6,
            green_gradient: 1e-4,
            green_by_path: 1e-5,
            green_symmetry: 1e-6,
            green_decomposition: 1e-5,
            path_independence: 1e-6,
            type2_v: 1e-5,
            type2_v_imaginary: 1e-8,
            lambda_contour: 1e-6,
            lambda_contour_imaginary: 1e-8,
            green_composition: 1e-5,
            poisson_real: 1e-8,
            poisson_positive: 0.0,
            poisson_mass: 1e-7,
            poisson_periods: 1e-6,
        }
    }
}

impl Tolerances {
    fn values(&self) -> Vec<(String, f64)> {
        match serde_json::to_value(self) {
            Ok(serde_json::Value::Object(map)) => map
                .into_iter()
                .map(|(k, v)| (k, v.as_f64().unwrap_or(f64::NAN)))
                .collect(),
            _ => Vec::new(),
        }
    }
}

fn point([re, im]: [f64; 2]) -> Complex64 {
    Complex64::new(re, im)
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        for (name, value) in self.tolerances.values() {
            if !(value >= 0.0) {
                return Err(CliError::Config(format!("tolerance {name} must be non-negative")));
            }
        }
        let g = &self.probe_grid;
        if g.per_axis == 0 || g.field_per_axis == 0 || !(g.fd_step > 0.0) || !(g.source_clearance >= 0.0) {
            return Err(CliError::Config("probe_grid entries must be positive".into()));
        }
        for p in self.base_point.iter().chain(&self.sources) {
            self.require_inside(point(*p))?;
        }
        Ok(())
    }

    fn require_inside(&self, p: Complex64) -> Result<(), CliError> {
        if self.domain.contains(p)? {
            Ok(())
        } else {
            Err(crate::Error::NotInDomain(p).into())
        }
    }

    pub fn label(&self) -> String {
        self.name
            .clone()
            .unwrap_or_else(|| format!("{}-connected", self.domain.connectivity()))
    }

    /// Override the node count and the sources from the command line.
    pub fn apply_overrides(&mut self, m: Option<usize>, sources: &[Complex64]) -> Result<(), CliError> {
        if let Some(m) = m {
            self.nodes_per_curve = m;
        }
        if !sources.is_empty() {
            for &w in sources {
                self.require_inside(w)?;
            }
            self.sources = sources.iter().map(|w| [w.re, w.im]).collect();
        }
        Ok(())
    }

    pub fn base_point(&self) -> Result<Complex64, CliError> {
        if let Some(p) = self.base_point {
            return Ok(point(p));
        }
        let lattice = self.domain.interior_lattice(9, 0.0);
        let mut best = *lattice
            .first()
            .ok_or_else(|| CliError::Config("no interior lattice point; set base_point".into()))?;
        for &p in &lattice {
            if self.domain.min_boundary_distance(p) > self.domain.min_boundary_distance(best) + 1e-12 {
                best = p;
            }
        }
        Ok(best)
    }

    pub fn sources(&self) -> Vec<Complex64> {
        if !self.sources.is_empty() {
            return self.sources.iter().map(|&p| point(p)).collect();
        }
        let lattice = self.domain.interior_lattice(5, 0.1 * self.domain.diameter());
        let picks = [lattice.len() / 4, lattice.len() / 2, 3 * lattice.len() / 4];
        let mut out: Vec<Complex64> = picks.iter().filter_map(|&i| lattice.get(i).copied()).collect();
        out.dedup();
        out
    }
}

/// Parse `"re,im"`.
pub fn parse_point(text: &str) -> Result<Complex64, String> {
    let (re, im) = text
        .split_once(',')
        .ok_or_else(|| format!("expected \"re,im\", got {text:?}"))?;
    let re: f64 = re.trim().parse().map_err(|e| format!("{re:?}: {e}"))?;
    let im: f64 = im.trim().parse().map_err(|e| format!("{im:?}: {e}"))?;
    Ok(Complex64::new(re, im))
}
