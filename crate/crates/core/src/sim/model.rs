use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::circular::{atan2c, wrap, Angle};
use crate::error::{Error, Result};
use crate::warp::WarpMap;

/// Regression functions of the simulation study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelId {
    /// `atan2c(2x - 1, x² + 2)`
    M1,
    /// `atan2c(-2x + 1, x² - 1)`
    M2,
    /// `arccos(x⁵ - 1) + 3 arcsin(x³ - x + 1)`, defined on [0, 1]
    M3,
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelId::M1 => "m1",
            ModelId::M2 => "m2",
            ModelId::M3 => "m3",
        })
    }
}

impl ModelId {
    /// Interval on which the model is defined, if restricted.
    pub fn domain(self) -> Option<(f64, f64)> {
        match self {
            ModelId::M3 => Some((0.0, 1.0)),
            _ => None,
        }
    }
}

pub fn true_regression(model: ModelId, x: f64) -> Result<Angle> {
    match model {
        ModelId::M1 => atan2c(2.0 * x - 1.0, x * x + 2.0),
        ModelId::M2 => atan2c(-2.0 * x + 1.0, x * x - 1.0),
        ModelId::M3 => {
            let a = x.powi(5) - 1.0;
            let b = x.powi(3) - x + 1.0;
            if !((-1.0..=1.0).contains(&a) && (-1.0..=1.0).contains(&b)) {
                return Err(Error::domain(format!(
                    "model m3 is undefined at x = {x} (arccos/arcsin argument outside [-1, 1])"
                )));
            }
            wrap(a.acos() + 3.0 * b.asin())
        }
    }
}

/// Distribution of the predictors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DesignSpec {
    Uniform {
        a: f64,
        b: f64,
    },
    /// `sigma` is the standard deviation.
    Gaussian {
        mu: f64,
        sigma: f64,
    },
}

impl DesignSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DesignSpec::Uniform { a, b } => {
                if !(a.is_finite() && b.is_finite() && a < b) {
                    return Err(Error::scenario(
                        "design",
                        format!("uniform design needs finite a < b, got a = {a}, b = {b}"),
                    ));
                }
            }
            DesignSpec::Gaussian { mu, sigma } => {
                if !(mu.is_finite() && sigma.is_finite() && sigma > 0.0) {
                    return Err(Error::scenario(
                        "design.sigma",
                        format!("gaussian design needs sigma > 0, got {sigma}"),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Smallest closed interval containing the support.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            DesignSpec::Uniform { a, b } => (a, b),
            DesignSpec::Gaussian { .. } => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Result<Vec<f64>> {
        match *self {
            DesignSpec::Uniform { a, b } => {
                let dist = Uniform::new(a, b).map_err(|e| Error::domain(format!("uniform design: {e}")))?;
                Ok(dist.sample_iter(rng).take(count).collect())
            }
            DesignSpec::Gaussian { mu, sigma } => {
                let dist = Normal::new(mu, sigma).map_err(|e| Error::domain(format!("gaussian design: {e}")))?;
                Ok(dist.sample_iter(rng).take(count).collect())
            }
        }
    }

    /// The design's own distribution function, as a warp.
    pub fn cdf(&self) -> Result<WarpMap> {
        match *self {
            DesignSpec::Uniform { a, b } => Ok(WarpMap::uniform(a, b)),
            DesignSpec::Gaussian { mu, sigma } => WarpMap::normal(mu, sigma),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn model_values() {
        let m = true_regression(ModelId::M1, -2.0).unwrap().radians();
        assert!((m - (-5.0f64).atan2(6.0)).abs() < 1e-15);
        assert!((m + 0.694_738).abs() < 1e-6);
        let m = true_regression(ModelId::M1, 1.25).unwrap().radians();
        assert!((m - 1.5f64.atan2(3.5625)).abs() < 1e-15);
        assert!((m - 0.398_522).abs() < 1e-6, "{m}");
        let m = true_regression(ModelId::M3, 0.0).unwrap().radians();
        assert!((m - FRAC_PI_2).abs() < 1e-12);
        assert!(true_regression(ModelId::M3, -0.5).is_err());
        assert!(true_regression(ModelId::M3, 1.2).is_err());
    }

    #[test]
    fn m2_branches() {
        // x² - 1 < 0 inside (-1, 1): cosine-like coordinate negative
        let m = true_regression(ModelId::M2, 0.0).unwrap().radians();
        assert!((m - (1.0f64).atan2(-1.0)).abs() < 1e-15);
        let m = true_regression(ModelId::M2, 1.05).unwrap().radians();
        assert!((m - (-1.1f64).atan2(0.1025)).abs() < 1e-15);
    }

    #[test]
    fn design_validation() {
        assert!(DesignSpec::Uniform { a: 1.0, b: 1.0 }.validate().is_err());
        assert!(DesignSpec::Gaussian { mu: 0.0, sigma: 0.0 }.validate().is_err());
        let d: DesignSpec = serde_json::from_str(r#"{"kind":"gaussian","mu":0,"sigma":1.5}"#).unwrap();
        assert_eq!(d, DesignSpec::Gaussian { mu: 0.0, sigma: 1.5 });
    }
}
