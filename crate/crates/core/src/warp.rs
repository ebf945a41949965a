//! Paired samples and the design warping maps.

use std::fmt;
use std::sync::Arc;

use statrs::distribution::{ContinuousCDF, Normal};

use crate::circular::Angle;
use crate::error::{Error, Result};

/// Observations `(x_i, θ_i)` with a linear predictor and circular response.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    xs: Vec<f64>,
    thetas: Vec<Angle>,
}

impl Sample {
    pub fn new(xs: Vec<f64>, thetas: Vec<Angle>) -> Result<Self> {
        if xs.len() != thetas.len() {
            return Err(Error::InvalidInput(format!(
                "predictor and response lengths differ ({} vs {})",
                xs.len(),
                thetas.len()
            )));
        }
        if xs.is_empty() {
            return Err(Error::InvalidInput(
                "sample must contain at least one observation".into(),
            ));
        }
        if let Some(i) = xs.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!("predictor {i} is not finite")));
        }
        Ok(Self { xs, thetas })
    }

    /// Builds a sample from raw radians, wrapping each response.
    pub fn from_radians(xs: Vec<f64>, thetas: &[f64]) -> Result<Self> {
        let thetas = thetas.iter().map(|&t| Angle::new(t)).collect::<Result<Vec<_>>>()?;
        Self::new(xs, thetas)
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn thetas(&self) -> &[Angle] {
        &self.thetas
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, Angle)> + Clone + '_ {
        self.xs.iter().copied().zip(self.thetas.iter().copied())
    }

    /// Copy of the sample with observation `i` removed.
    pub fn without(&self, i: usize) -> Sample {
        let mut xs = self.xs.clone();
        let mut thetas = self.thetas.clone();
        xs.remove(i);
        thetas.remove(i);
        Sample { xs, thetas }
    }
}

/// Empirical distribution function of the predictors.
#[derive(Debug, Clone, PartialEq)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    pub fn new(xs: &[f64]) -> Self {
        let mut sorted = xs.to_vec();
        sorted.sort_by(f64::total_cmp);
        Self { sorted }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// `#{i : x_i ≤ y} / n`.
    pub fn eval(&self, y: f64) -> f64 {
        let count = self.sorted.partition_point(|&x| x <= y);
        count as f64 / self.sorted.len() as f64
    }
}

/// Map from the design scale to (0, 1).
#[derive(Clone)]
pub enum WarpMap {
    /// The design distribution function is known.
    Known(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    /// Plug-in empirical distribution function.
    Empirical(Ecdf),
}

impl fmt::Debug for WarpMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WarpMap::Known(_) => f.write_str("WarpMap::Known(..)"),
            WarpMap::Empirical(e) => f.debug_tuple("WarpMap::Empirical").field(&e.len()).finish(),
        }
    }
}

impl WarpMap {
    pub fn known<F>(cdf: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        WarpMap::Known(Arc::new(cdf))
    }

    /// CDF of U(a, b).
    pub fn uniform(a: f64, b: f64) -> Self {
        Self::known(move |y| ((y - a) / (b - a)).clamp(0.0, 1.0))
    }

    /// CDF of N(mu, sigma²).
    pub fn normal(mu: f64, sigma: f64) -> Result<Self> {
        let dist = Normal::new(mu, sigma).map_err(|e| Error::domain(format!("normal design: {e}")))?;
        Ok(Self::known(move |y| dist.cdf(y)))
    }

    pub fn ecdf(sample: &Sample) -> Self {
        WarpMap::Empirical(Ecdf::new(sample.xs()))
    }

    pub fn is_empirical(&self) -> bool {
        matches!(self, WarpMap::Empirical(_))
    }

    pub fn eval(&self, y: f64) -> f64 {
        match self {
            WarpMap::Known(f) => f(y),
            WarpMap::Empirical(e) => e.eval(y),
        }
    }

    /// Warped evaluation point. The empirical map reaches 0 and 1, so its
    /// output is clamped into [1/(2n), 1 - 1/(2n)].
    pub fn eval_point(&self, x: f64) -> f64 {
        match self {
            WarpMap::Known(f) => f(x),
            WarpMap::Empirical(e) => {
                let edge = 0.5 / e.len() as f64;
                e.eval(x).clamp(edge, 1.0 - edge)
            }
        }
    }
}

/// Which trigonometric component of the response is smoothed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComponentId {
    /// `sin Θ` (j = 1)
    Sine,
    /// `cos Θ` (j = 2)
    Cosine,
}

impl ComponentId {
    pub const BOTH: [ComponentId; 2] = [ComponentId::Sine, ComponentId::Cosine];

    pub fn apply(self, theta: Angle) -> f64 {
        match self {
            ComponentId::Sine => theta.sin(),
            ComponentId::Cosine => theta.cos(),
        }
    }

    pub(crate) fn index(self) -> usize {
        match self {
            ComponentId::Sine => 0,
            ComponentId::Cosine => 1,
        }
    }
}
