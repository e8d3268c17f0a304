//! Experiment configuration files.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sonarknot::{
    linspace, uniform_angles, Complex64, CompositeScatterer, Geometry, PointScatterer,
    PullbackOptions, TargetModel,
};

use crate::exit::{CliError, CliResult};
use crate::schema;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub targets: Vec<TargetSpec>,
    #[serde(default)]
    pub geometry: GeometrySpec,
    #[serde(default)]
    pub angles: AngleSpec,
    #[serde(default)]
    pub frequencies: FrequencySpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distortion: Option<DistortionSpec>,
    #[serde(default)]
    pub estimator: EstimatorSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torus: Option<TorusSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    pub name: String,
    #[serde(default)]
    pub composites: Vec<CompositeSpec>,
    #[serde(default)]
    pub extras: Vec<PointSpec>,
}

fn unit_amplitude() -> [f64; 2] {
    [1.0, 0.0]
}

fn unit_radius() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompositeSpec {
    pub fold: u32,
    #[serde(default)]
    pub reference_angle_deg: f64,
    #[serde(default = "unit_radius")]
    pub radius: f64,
    #[serde(default = "unit_amplitude")]
    pub amplitude: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    pub radius: f64,
    pub angle_deg: f64,
    #[serde(default = "unit_amplitude")]
    pub amplitude: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub standoff: f64,
    pub phase_speed: f64,
}

impl Default for GeometrySpec {
    fn default() -> Self {
        let g = Geometry::<f64>::default();
        Self {
            standoff: g.standoff,
            phase_speed: g.phase_speed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AngleSpec {
    pub pulses: usize,
}

impl Default for AngleSpec {
    fn default() -> Self {
        Self { pulses: 720 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencySpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Default for FrequencySpec {
    fn default() -> Self {
        Self {
            start: 100.0,
            stop: 1000.0,
            count: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistortionSpec {
    pub seed: u64,
    #[serde(default = "default_order")]
    pub max_order: u32,
    #[serde(default = "default_strength")]
    pub strength: f64,
}

fn default_order() -> u32 {
    4
}

fn default_strength() -> f64 {
    0.8
}

impl DistortionSpec {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            max_order: default_order(),
            strength: default_strength(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSpec {
    pub torus_grid: [usize; 2],
    pub continuity_window: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_tolerance: Option<f64>,
    pub spectral_threshold: f64,
    pub freq_index: usize,
}

impl Default for EstimatorSpec {
    fn default() -> Self {
        Self {
            torus_grid: [256, 256],
            continuity_window: 8,
            residual_tolerance: None,
            spectral_threshold: 1e-6,
            freq_index: 0,
        }
    }
}

impl EstimatorSpec {
    pub fn pullback(&self, tol: Option<f64>) -> PullbackOptions {
        PullbackOptions {
            continuity_window: self.continuity_window,
            residual_tolerance: tol.or(self.residual_tolerance),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusSpec {
    pub grid: [usize; 2],
    pub frequency: f64,
}

impl TargetSpec {
    pub fn model(&self) -> CliResult<TargetModel> {
        let composites = self
            .composites
            .iter()
            .map(|c| {
                CompositeScatterer::new(
                    c.fold,
                    Complex64::new(c.amplitude[0], c.amplitude[1]),
                    c.radius,
                    c.reference_angle_deg.to_radians(),
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        let extras = self
            .extras
            .iter()
            .map(|p| {
                PointScatterer::new(
                    Complex64::new(p.amplitude[0], p.amplitude[1]),
                    p.radius,
                    p.angle_deg.to_radians(),
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut model = TargetModel::from_composites(composites);
        model.extras = extras;
        Ok(model)
    }
}

impl ExperimentConfig {
    /// Parse and validate a config document. Any failure is a config error.
    pub fn from_json(text: &str) -> CliResult<Self> {
        let doc: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::config(format!("config is not valid JSON: {e}")))?;
        let errors = schema::validate_str(schema::EXPERIMENT_CONFIG, &doc);
        if !errors.is_empty() {
            return Err(CliError::config(format!("config violates schema:\n  {}", errors.join("\n  "))));
        }
        let cfg: Self =
            serde_json::from_value(doc).map_err(|e| CliError::config(format!("config: {e}")))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn check(&self) -> CliResult<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::config(format!(
                "unsupported schema_version {}",
                self.schema_version
            )));
        }
        if self.targets.is_empty() {
            return Err(CliError::config("config lists no targets"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for t in &self.targets {
            let safe = !t.name.is_empty()
                && t.name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
                && !t.name.starts_with('.');
            if !safe {
                return Err(CliError::config(format!(
                    "target name `{}` must use only letters, digits, `_`, `-` and `.`",
                    t.name
                )));
            }
            if !seen.insert(&t.name) {
                return Err(CliError::config(format!("duplicate target name `{}`", t.name)));
            }
            if t.composites.is_empty() && t.extras.is_empty() {
                return Err(CliError::config(format!("target `{}` has no scatterers", t.name)));
            }
        }
        if self.frequencies.count > 1 && self.frequencies.stop <= self.frequencies.start {
            return Err(CliError::config("frequency stop must exceed start"));
        }
        Ok(())
    }

    pub fn geometry(&self) -> CliResult<Geometry> {
        Ok(Geometry::new(self.geometry.standoff, self.geometry.phase_speed)?)
    }

    pub fn angle_axis(&self) -> Vec<f64> {
        uniform_angles(self.angles.pulses)
    }

    pub fn frequency_axis(&self) -> Vec<f64> {
        linspace(self.frequencies.start, self.frequencies.stop, self.frequencies.count)
    }

    pub fn target(&self, name: Option<&str>) -> CliResult<&TargetSpec> {
        match name {
            Some(n) => self
                .targets
                .iter()
                .find(|t| t.name == n)
                .ok_or_else(|| CliError::config(format!("no target named `{n}` in config"))),
            None => Ok(&self.targets[0]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"schema_version": 1, "targets": [{"name": "p2q3",
        "composites": [{"fold": 2}, {"fold": 3, "reference_angle_deg": 28}]}]}"#;

    #[test]
    fn defaults_fill_in() {
        let cfg = ExperimentConfig::from_json(MINIMAL).unwrap();
        assert_eq!(cfg.angles.pulses, 720);
        assert_eq!(cfg.frequency_axis().len(), 64);
        let t = cfg.targets[0].model().unwrap();
        assert_eq!(t.knot_folds(), Some((2, 3)));
        assert!((t.composites[1].reference_angle - 28f64.to_radians()).abs() < 1e-15);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        let extra = MINIMAL.replacen("\"schema_version\": 1", "\"schema_version\": 1, \"colour\": 3", 1);
        assert!(ExperimentConfig::from_json(&extra).is_err());
        let v2 = MINIMAL.replacen("\"schema_version\": 1", "\"schema_version\": 2", 1);
        assert!(ExperimentConfig::from_json(&v2).is_err());
        let empty = r#"{"schema_version": 1, "targets": []}"#;
        assert!(ExperimentConfig::from_json(empty).is_err());
        let strong = MINIMAL.replacen("\"targets\"", "\"distortion\": {\"seed\": 1, \"strength\": 1.0}, \"targets\"", 1);
        assert!(ExperimentConfig::from_json(&strong).is_err());
        let path = MINIMAL.replacen("p2q3", "../up", 1);
        assert!(ExperimentConfig::from_json(&path).is_err());
    }
}
