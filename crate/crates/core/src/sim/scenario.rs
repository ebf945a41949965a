use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::comparators::BaselineKind;
use crate::error::{Error, Result};
use crate::gl::{GlConfig, GridPolicy, DEFAULT_C0};
use crate::grid::GridMode;
use crate::kernels::Kernel;
use crate::sim::model::{DesignSpec, ModelId};
use crate::vonmises::VonMises;

/// Version stamped into every scenario and report file.
pub const SCHEMA_VERSION: u32 = 1;

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

fn default_noise() -> VonMises {
    VonMises::new(0.0, 10.0).expect("valid default noise")
}

fn default_c0() -> f64 {
    DEFAULT_C0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum WarpKind {
    /// Plug-in empirical distribution function.
    #[default]
    Empirical,
    /// The design's true distribution function.
    Known,
}

/// Bandwidth of a baseline smoother: a fixed value or `"cv"`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum BandwidthSpec {
    #[default]
    Cv,
    Fixed(f64),
}

impl Serialize for BandwidthSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BandwidthSpec::Cv => s.serialize_str("cv"),
            BandwidthSpec::Fixed(h) => s.serialize_f64(*h),
        }
    }
}

impl<'de> Deserialize<'de> for BandwidthSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Value(f64),
            Name(String),
        }
        match Raw::deserialize(d)? {
            Raw::Value(h) => Ok(BandwidthSpec::Fixed(h)),
            Raw::Name(s) if s == "cv" => Ok(BandwidthSpec::Cv),
            Raw::Name(s) => Err(serde::de::Error::custom(format!(
                "expected a number or \"cv\", got \"{s}\""
            ))),
        }
    }
}

/// One estimator to run on every simulated dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase", deny_unknown_fields)]
pub enum EstimatorConfig {
    Gl {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        #[serde(default)]
        kernel: Kernel,
        #[serde(default = "default_c0")]
        c0_sine: f64,
        #[serde(default = "default_c0")]
        c0_cosine: f64,
        #[serde(default)]
        grid: GridMode,
        #[serde(default)]
        warp: WarpKind,
    },
    Nw {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        #[serde(default)]
        kernel: Kernel,
        #[serde(default)]
        bandwidth: BandwidthSpec,
    },
    Ll {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        #[serde(default)]
        kernel: Kernel,
        #[serde(default)]
        bandwidth: BandwidthSpec,
    },
}

impl EstimatorConfig {
    pub fn gl(kernel: Kernel, c0: f64) -> Self {
        EstimatorConfig::Gl {
            label: None,
            kernel,
            c0_sine: c0,
            c0_cosine: c0,
            grid: GridMode::Simulation,
            warp: WarpKind::Empirical,
        }
    }

    pub fn baseline_cv(kind: BaselineKind, kernel: Kernel) -> Self {
        match kind {
            BaselineKind::Nw => EstimatorConfig::Nw {
                label: None,
                kernel,
                bandwidth: BandwidthSpec::Cv,
            },
            BaselineKind::Ll => EstimatorConfig::Ll {
                label: None,
                kernel,
                bandwidth: BandwidthSpec::Cv,
            },
        }
    }

    pub fn label(&self) -> String {
        match self {
            EstimatorConfig::Gl { label, .. } => label.clone().unwrap_or_else(|| "gl".into()),
            EstimatorConfig::Nw { label, .. } => label.clone().unwrap_or_else(|| "nw".into()),
            EstimatorConfig::Ll { label, .. } => label.clone().unwrap_or_else(|| "ll".into()),
        }
    }

    pub fn kernel(&self) -> Kernel {
        match self {
            EstimatorConfig::Gl { kernel, .. }
            | EstimatorConfig::Nw { kernel, .. }
            | EstimatorConfig::Ll { kernel, .. } => *kernel,
        }
    }

    pub fn is_gl(&self) -> bool {
        matches!(self, EstimatorConfig::Gl { .. })
    }

    /// GL selection settings; `None` for baselines.
    pub fn gl_config(&self) -> Option<GlConfig> {
        match *self {
            EstimatorConfig::Gl {
                kernel,
                c0_sine,
                c0_cosine,
                grid,
                ..
            } => Some(GlConfig {
                kernel,
                c0_sine,
                c0_cosine,
                grid: GridPolicy::from_mode(grid),
                strict_theory: false,
            }),
            _ => None,
        }
    }

    fn validate(&self, path: &str, n: usize) -> Result<()> {
        match *self {
            EstimatorConfig::Gl { c0_sine, c0_cosine, .. } => {
                for (name, c0) in [("c0_sine", c0_sine), ("c0_cosine", c0_cosine)] {
                    if !(c0.is_finite() && c0 > 0.0) {
                        return Err(Error::scenario(
                            format!("{path}.{name}"),
                            format!("must be positive, got {c0}"),
                        ));
                    }
                }
            }
            EstimatorConfig::Nw { bandwidth, .. } | EstimatorConfig::Ll { bandwidth, .. } => match bandwidth {
                BandwidthSpec::Fixed(h) if !(h.is_finite() && h > 0.0) => {
                    return Err(Error::scenario(
                        format!("{path}.bandwidth"),
                        format!("must be positive, got {h}"),
                    ));
                }
                BandwidthSpec::Cv if n < 3 => {
                    return Err(Error::scenario(
                        format!("{path}.bandwidth"),
                        "cross-validation needs n >= 3",
                    ));
                }
                _ => {}
            },
        }
        Ok(())
    }
}

/// A Monte Carlo experiment: model, design, noise and estimators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub model: ModelId,
    pub design: DesignSpec,
    #[serde(default = "default_noise")]
    pub noise: VonMises,
    pub n: usize,
    pub x_eval: f64,
    pub estimators: Vec<EstimatorConfig>,
    pub runs: usize,
    pub seed: u64,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::scenario(path, e.into_inner().to_string())
        })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::scenario(
                "schema_version",
                format!(
                    "unsupported version {} (expected {SCHEMA_VERSION})",
                    self.schema_version
                ),
            ));
        }
        if self.runs < 1 {
            return Err(Error::scenario("runs", "must be at least 1"));
        }
        if self.n < 2 {
            return Err(Error::scenario("n", format!("must be at least 2, got {}", self.n)));
        }
        if !self.x_eval.is_finite() {
            return Err(Error::scenario("x_eval", "must be finite"));
        }
        self.design.validate()?;
        if let Some((lo, hi)) = self.model.domain() {
            let (a, b) = self.design.support();
            if a < lo || b > hi {
                return Err(Error::scenario(
                    "design",
                    format!(
                        "model {} is only defined on [{lo}, {hi}] but the design {:?} has support [{a}, {b}]",
                        self.model, self.design
                    ),
                ));
            }
            if !(lo..=hi).contains(&self.x_eval) {
                return Err(Error::scenario(
                    "x_eval",
                    format!(
                        "model {} is only defined on [{lo}, {hi}], got {}",
                        self.model, self.x_eval
                    ),
                ));
            }
        }
        if self.estimators.is_empty() {
            return Err(Error::scenario("estimators", "at least one estimator is required"));
        }
        let mut labels = HashSet::new();
        for (i, e) in self.estimators.iter().enumerate() {
            let path = format!("estimators[{i}]");
            e.validate(&path, self.n)?;
            if !labels.insert(e.label()) {
                return Err(Error::scenario(
                    format!("{path}.label"),
                    format!("duplicate estimator label `{}`", e.label()),
                ));
            }
        }
        Ok(())
    }

    /// The first GL estimator, used as the template for c0 calibration.
    pub fn gl_template(&self) -> Option<&EstimatorConfig> {
        self.estimators.iter().find(|e| e.is_gl())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{
        "model": "m1",
        "design": {"kind": "uniform", "a": -5, "b": 5},
        "n": 200,
        "x_eval": -2,
        "estimators": [{"method": "gl"}, {"method": "nw"}, {"method": "ll", "bandwidth": 0.5}],
        "runs": 5,
        "seed": 1
    }"#;

    #[test]
    fn parses_with_defaults() {
        let s = Scenario::from_json(BASE).unwrap();
        assert_eq!(s.noise.kappa(), 10.0);
        assert_eq!(s.estimators[0], EstimatorConfig::gl(Kernel::EPANECHNIKOV, 0.04));
        assert_eq!(s.estimators[2].label(), "ll");
        let back = Scenario::from_json(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn errors_carry_field_paths() {
        let bad = BASE.replace(r#""bandwidth": 0.5"#, r#""bandwidth": "silverman""#);
        let err = Scenario::from_json(&bad).unwrap_err();
        match err {
            Error::Scenario { path, .. } => assert_eq!(path, "estimators[2]"),
            other => panic!("{other:?}"),
        }
        let bad = BASE.replace(r#""runs": 5"#, r#""runs": 0"#);
        assert!(matches!(Scenario::from_json(&bad), Err(Error::Scenario { path, .. }) if path == "runs"));
        let bad = BASE.replace(r#""n": 200"#, r#""n": 0"#);
        assert!(matches!(Scenario::from_json(&bad), Err(Error::Scenario { path, .. }) if path == "n"));
    }

    #[test]
    fn m3_needs_unit_interval_design() {
        let bad = BASE.replace(r#""m1""#, r#""m3""#);
        match Scenario::from_json(&bad).unwrap_err() {
            Error::Scenario { path, message } => {
                assert_eq!(path, "design");
                assert!(message.contains("m3"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplicate_labels_rejected() {
        let bad = BASE.replace(r#"{"method": "nw"}"#, r#"{"method": "gl"}"#);
        assert!(matches!(Scenario::from_json(&bad), Err(Error::Scenario { .. })));
    }
}
