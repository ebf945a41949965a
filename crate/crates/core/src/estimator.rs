//! Warped kernel estimators of the sine and cosine regression components.
//!
//! After warping the design through a distribution function `F`, each
//! component is a plain kernel average on (0, 1):
//!
//! ```text
//! ĝ_{1,h}(v) = (1/n) Σ sin(Θ_i) K_h(v - F(X_i))
//! ĝ_{2,h}(v) = (1/n) Σ cos(Θ_i) K_h(v - F(X_i))
//! ```
//!
//! and the circular estimate is `m̂(x) = atan2c(ĝ_{1,h1}(F(x)), ĝ_{2,h2}(F(x)))`.
//! No ratio is involved, so each component gets its own bandwidth.

use crate::circular::{atan2c, Angle};
use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::warp::{ComponentId, Sample, WarpMap};

#[derive(Debug, Clone, Copy)]
struct Point {
    u: f64,
    sin: f64,
    cos: f64,
}

/// A sample with its design warped and its responses split into components.
///
/// Points are kept sorted by warped position so compact kernels only visit
/// the observations inside their window.
#[derive(Debug, Clone)]
pub struct WarpedSample {
    points: Vec<Point>,
    warp: WarpMap,
}

impl WarpedSample {
    pub fn new(sample: &Sample, warp: WarpMap) -> Self {
        let mut points: Vec<Point> = sample
            .iter()
            .map(|(x, theta)| Point {
                u: warp.eval(x),
                sin: theta.sin(),
                cos: theta.cos(),
            })
            .collect();
        points.sort_by(|a, b| a.u.total_cmp(&b.u));
        Self { points, warp }
    }

    /// Warps with the sample's own empirical distribution function.
    pub fn empirical(sample: &Sample) -> Self {
        Self::new(sample, WarpMap::ecdf(sample))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn warp(&self) -> &WarpMap {
        &self.warp
    }

    /// Warped positions `F(X_i)`, sorted.
    pub fn warped_design(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.u)
    }

    /// The warped evaluation point for `x`.
    pub fn eval_point(&self, x: f64) -> f64 {
        self.warp.eval_point(x)
    }

    fn window(&self, v: f64, radius: Option<f64>) -> &[Point] {
        match radius {
            None => &self.points,
            Some(r) => {
                let lo = self.points.partition_point(|p| p.u < v - r);
                let hi = self.points.partition_point(|p| p.u <= v + r);
                &self.points[lo..hi]
            }
        }
    }

    /// Both components at bandwidth `h`, from one pass over the data.
    pub fn components(&self, kernel: &Kernel, h: f64, v: f64) -> (f64, f64) {
        let radius = kernel.is_compact().then(|| kernel.support_radius() * h);
        let (s, c) = self.window(v, radius).iter().fold((0.0, 0.0), |(s, c), p| {
            let w = kernel.scaled(h, v - p.u);
            (s + p.sin * w, c + p.cos * w)
        });
        let n = self.points.len() as f64;
        (s / n, c / n)
    }

    /// Both double-smoothed components `(K_hp * ĝ_h)(v)`, from one pass.
    pub fn aux_components(&self, kernel: &Kernel, h: f64, hp: f64, v: f64) -> (f64, f64) {
        let (s, c) = self
            .window(v, kernel.convolved_radius(h, hp))
            .iter()
            .fold((0.0, 0.0), |(s, c), p| {
                let w = kernel.convolved(h, hp, v - p.u);
                (s + p.sin * w, c + p.cos * w)
            });
        let n = self.points.len() as f64;
        (s / n, c / n)
    }

    /// `ĝ_{j,h}(v)`.
    pub fn g_hat(&self, component: ComponentId, kernel: &Kernel, h: f64, v: f64) -> Result<f64> {
        kernel.scaled_eval(h, 0.0)?;
        let (s, c) = self.components(kernel, h, v);
        Ok(pick(component, s, c))
    }

    /// `ĝ_{j,h,h'}(v) = (K_{h'} * ĝ_{j,h})(v)`; symmetric in `(h, h')`.
    pub fn g_hat_aux(&self, component: ComponentId, kernel: &Kernel, h: f64, hp: f64, v: f64) -> Result<f64> {
        kernel.convolved_eval(h, hp, 0.0)?;
        let (s, c) = self.aux_components(kernel, h, hp, v);
        Ok(pick(component, s, c))
    }

    /// `m̂_h(x) = atan2c(ĝ_{1,h1}(v), ĝ_{2,h2}(v))` with `v` the warped `x`.
    pub fn m_hat(&self, kernel: &Kernel, h1: f64, h2: f64, x: f64) -> Result<Angle> {
        let v = self.eval_point(x);
        let g1 = self.g_hat(ComponentId::Sine, kernel, h1, v)?;
        let g2 = self.g_hat(ComponentId::Cosine, kernel, h2, v)?;
        combine(g1, g2, x)
    }
}

/// Combines the two component estimates, reporting a degenerate fit when both vanish.
pub(crate) fn combine(g1: f64, g2: f64, x: f64) -> Result<Angle> {
    if g1 == 0.0 && g2 == 0.0 {
        return Err(Error::DegenerateFit { x });
    }
    atan2c(g1, g2)
}

fn pick(component: ComponentId, s: f64, c: f64) -> f64 {
    match component {
        ComponentId::Sine => s,
        ComponentId::Cosine => c,
    }
}
