//! Built-in initial profiles on `[c - r, c + r]` with smooth (umbilic) tips.

use std::f64::consts::PI;

use crate::error::{HmcfError, Result};
use crate::geometry::profile::ProfileGrid;
use crate::geometry::surface::{validate_initial, ChartSpec, ValidationReport};

/// Candidate bump amplitudes, tried from the largest down.
pub const BUMPY_BETAS: [f64; 3] = [0.05, 0.10, 0.15];

/// Default semi-axis ratio of the squashed preset.
pub const SQUASHED_DEFAULT: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preset {
    /// Round sphere of radius `r0` centered at the origin.
    Sphere { r0: f64 },
    /// Spheroid `f = a sqrt(1 - x^2)`.
    Squashed { a: f64 },
    /// `f = sqrt(1 - x^2) (1 + beta cos 2 pi x)`: star-shaped, mean convex
    /// and non-convex near `x = +-1/2`.
    Bumpy { beta: f64 },
}

impl Preset {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::Sphere { .. } => "sphere",
            Preset::Squashed { .. } => "squashed",
            Preset::Bumpy { .. } => "bumpy",
        }
    }

    /// Samples the profile at `samples` uniform nodes including both tips.
    pub fn sample(&self, samples: usize) -> ProfileGrid {
        match *self {
            Preset::Sphere { r0 } => {
                ProfileGrid::from_fn(-r0, r0, samples, 0.0, |x| (r0 * r0 - x * x).max(0.0).sqrt())
            }
            Preset::Squashed { a } => {
                ProfileGrid::from_fn(-1.0, 1.0, samples, 0.0, |x| a * (1.0 - x * x).max(0.0).sqrt())
            }
            Preset::Bumpy { beta } => ProfileGrid::from_fn(-1.0, 1.0, samples, 0.0, |x| {
                (1.0 - x * x).max(0.0).sqrt() * (1.0 + beta * (2.0 * PI * x).cos())
            }),
        }
    }

    fn check_parameters(&self) -> Result<()> {
        let bad = |reason: String| Err(HmcfError::InvalidPreset { name: self.name().into(), reason });
        match *self {
            Preset::Sphere { r0 } if !(r0 > 0.0 && r0.is_finite()) => bad(format!("radius {r0} must be positive")),
            Preset::Squashed { a } if !(a > 0.0 && a.is_finite()) => bad(format!("semi-axis {a} must be positive")),
            Preset::Bumpy { beta } if !(0.0..1.0).contains(&beta) => bad(format!("amplitude {beta} outside [0, 1)")),
            _ => Ok(()),
        }
    }

    /// Sampled profile for a solver with `n` interior nodes, checked against
    /// the hypotheses of the flow.
    pub fn build(&self, n: usize) -> Result<ProfileGrid> {
        self.check_parameters()?;
        let grid = self.sample(samples_for(n));
        let report = validate_initial(&grid, &ChartSpec::for_nodes(n));
        if !report.passed() {
            return Err(invalid(self.name(), &report));
        }
        Ok(grid)
    }
}

/// Sampling density of preset profiles relative to the solver grid.
fn samples_for(n: usize) -> usize {
    2 * n + 1
}

fn invalid(name: &str, report: &ValidationReport) -> HmcfError {
    let reason = report.failures.iter().map(|f| format!("{}: {}", f.name, f.detail)).collect::<Vec<_>>().join("; ");
    HmcfError::InvalidPreset { name: name.into(), reason }
}

/// The largest bump amplitude in [`BUMPY_BETAS`] whose profile passes
/// validation at resolution `n`.
pub fn bumpy_beta(n: usize) -> Result<f64> {
    let mut last = None;
    for &beta in BUMPY_BETAS.iter().rev() {
        match (Preset::Bumpy { beta }).build(n) {
            Ok(_) => return Ok(beta),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or_else(|| HmcfError::UnknownPreset("bumpy".into())))
}

/// Resolves a preset by name with default parameters.
pub fn preset_by_name(name: &str, n: usize) -> Result<Preset> {
    match name {
        "sphere" => Ok(Preset::Sphere { r0: 1.0 }),
        "squashed" => Ok(Preset::Squashed { a: SQUASHED_DEFAULT }),
        "bumpy" => Ok(Preset::Bumpy { beta: bumpy_beta(n)? }),
        other => Err(HmcfError::UnknownPreset(other.into())),
    }
}

/// Validated profile of a named preset for `n` interior nodes.
pub fn make_preset(name: &str, n: usize) -> Result<ProfileGrid> {
    preset_by_name(name, n)?.build(n)
}
