use std::path::Path;

use anyhow::{bail, Context, Result};
use legendre_core::classify::ClassifyConfig;
use legendre_core::forms::{LimitConfig, DEFAULT_DELTA, GREEN_TOL};
use legendre_core::quadrature::GRADED_TOL;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

/// Settings shared by every subcommand. Loaded from JSON, then overridden
/// by command-line flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Tolerance for smooth quadrature (Green residual integrals).
    pub quadrature_tol: f64,
    /// Tolerance for shell integrals toward ±1.
    pub graded_tol: f64,
    /// Agreement tolerance of extrapolated limits.
    pub limit_tol: f64,
    /// Floor below which a limit counts as zero.
    pub zero_tol: f64,
    /// Guard band of the square-integrability exponent test.
    pub guard: f64,
    /// Deepest ladder rung, as a power of 1/2.
    pub ladder: u32,
    /// Plateau width of the boundary-condition functions.
    pub delta: f64,
    /// Largest accepted Green residual.
    pub green_threshold: f64,
    pub format: Format,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let limit = LimitConfig::default();
        RunConfig {
            quadrature_tol: GREEN_TOL,
            graded_tol: GRADED_TOL,
            limit_tol: limit.tol,
            zero_tol: limit.zero_tol,
            guard: ClassifyConfig::default().guard,
            ladder: limit.ladder,
            delta: DEFAULT_DELTA,
            green_threshold: 1e-8,
            format: Format::Json,
            seed: 17,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("quadrature_tol", self.quadrature_tol),
            ("graded_tol", self.graded_tol),
            ("limit_tol", self.limit_tol),
            ("zero_tol", self.zero_tol),
            ("guard", self.guard),
            ("green_threshold", self.green_threshold),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                bail!("{name} must be a positive number (got {v})");
            }
        }
        if !(self.delta > 0.0 && self.delta < 0.5) {
            bail!("delta must lie in (0, 0.5) (got {})", self.delta);
        }
        let first = LimitConfig::default().first;
        if self.ladder < first + 8 || self.ladder > 1000 {
            bail!(
                "ladder must lie in [{}, 1000] (got {})",
                first + 8,
                self.ladder
            );
        }
        Ok(())
    }

    pub fn limit(&self) -> LimitConfig {
        LimitConfig {
            ladder: self.ladder,
            tol: self.limit_tol,
            zero_tol: self.zero_tol,
            ..LimitConfig::default()
        }
    }

    pub fn classify(&self) -> ClassifyConfig {
        let mut c = ClassifyConfig {
            limit: self.limit(),
            guard: self.guard,
            ..ClassifyConfig::default()
        };
        c.graded.tol = self.graded_tol;
        c
    }
}
