//! Baseline circular smoothers: Nadaraya–Watson and local-linear fits of the
//! sine and cosine components, with leave-one-out cross-validated bandwidths.

use serde::{Deserialize, Serialize};

use crate::circular::{angular_distance, atan2c, Angle};
use crate::error::{Error, Result};
use crate::grid::BandwidthGrid;
use crate::kernels::Kernel;
use crate::warp::Sample;

/// Local designs with condition number above this are treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaselineKind {
    Nw,
    Ll,
}

impl std::str::FromStr for BaselineKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nw" => Ok(BaselineKind::Nw),
            "ll" => Ok(BaselineKind::Ll),
            other => Err(Error::InvalidInput(format!(
                "unknown baseline `{other}` (expected `nw` or `ll`)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineMethod {
    pub kind: BaselineKind,
    pub kernel: Kernel,
    pub h: f64,
}

impl BaselineMethod {
    pub fn new(kind: BaselineKind, kernel: Kernel, h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::domain(format!("bandwidth must be positive, got {h}")));
        }
        Ok(Self { kind, kernel, h })
    }

    pub fn estimate(&self, sample: &Sample, x: f64) -> Result<Angle> {
        match self.kind {
            BaselineKind::Nw => nw_estimate(sample, self, x),
            BaselineKind::Ll => ll_estimate(sample, self, x),
        }
    }
}

/// Circular Nadaraya–Watson: `atan2c(Σ sin Θ_i K_h(x - X_i), Σ cos Θ_i K_h(x - X_i))`.
pub fn nw_estimate(sample: &Sample, method: &BaselineMethod, x: f64) -> Result<Angle> {
    nw_at(sample.iter(), &method.kernel, method.h, x)
}

fn nw_at(points: impl Iterator<Item = (f64, Angle)>, kernel: &Kernel, h: f64, x: f64) -> Result<Angle> {
    let (mut s, mut c, mut total) = (0.0, 0.0, 0.0);
    for (xi, theta) in points {
        let w = kernel.scaled(h, x - xi);
        s += w * theta.sin();
        c += w * theta.cos();
        total += w;
    }
    if total <= 0.0 || (s == 0.0 && c == 0.0) {
        return Err(Error::DegenerateFit { x });
    }
    atan2c(s, c)
}

/// Circular local-linear estimate: local-linear fits of `sin Θ` and `cos Θ`
/// at `x`, combined with `atan2c`.
pub fn ll_estimate(sample: &Sample, method: &BaselineMethod, x: f64) -> Result<Angle> {
    ll_at(sample.iter(), &method.kernel, method.h, x)
}

fn ll_at(points: impl Iterator<Item = (f64, Angle)> + Clone, kernel: &Kernel, h: f64, x: f64) -> Result<Angle> {
    // moments in the scaled offset (X_i - x)/h; the fitted intercept is
    // invariant to that scaling and the condition number is not
    let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
    for (xi, _) in points.clone() {
        let t = (xi - x) / h;
        let k = kernel.scaled(h, x - xi);
        s0 += k;
        s1 += k * t;
        s2 += k * t * t;
    }
    if s0 <= 0.0 {
        return Err(Error::DegenerateFit { x });
    }
    let condition = condition_2x2(s0, s1, s2);
    if condition.is_nan() || condition > MAX_CONDITION {
        return Err(Error::SingularDesign { x, condition });
    }
    let (mut num_s, mut num_c, mut den) = (0.0, 0.0, 0.0);
    for (xi, theta) in points {
        let t = (xi - x) / h;
        let w = kernel.scaled(h, x - xi) * (s2 - t * s1);
        num_s += w * theta.sin();
        num_c += w * theta.cos();
        den += w;
    }
    // den = s0 s2 - s1² > 0 for a well-conditioned design
    let (fs, fc) = (num_s / den, num_c / den);
    if fs == 0.0 && fc == 0.0 {
        return Err(Error::DegenerateFit { x });
    }
    atan2c(fs, fc)
}

/// Condition number of the symmetric matrix [[a, b], [b, c]].
fn condition_2x2(a: f64, b: f64, c: f64) -> f64 {
    let mean = 0.5 * (a + c);
    let radius = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    let (hi, lo) = (mean + radius, mean - radius);
    if lo <= 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

fn fit(kind: BaselineKind, sample: &Sample, skip: usize, kernel: &Kernel, h: f64, x: f64) -> Result<Angle> {
    let points = sample
        .iter()
        .enumerate()
        .filter(move |&(j, _)| j != skip)
        .map(|(_, p)| p);
    match kind {
        BaselineKind::Nw => nw_at(points, kernel, h, x),
        BaselineKind::Ll => ll_at(points, kernel, h, x),
    }
}

/// Leave-one-out angular loss `Σ_i [1 - cos(Θ_i - m̂_h^{(-i)}(X_i))]`.
///
/// Folds whose fit fails contribute the maximal loss 2.
pub fn cv_loss(sample: &Sample, kind: BaselineKind, kernel: &Kernel, h: f64) -> f64 {
    sample
        .iter()
        .enumerate()
        .map(|(i, (xi, theta))| match fit(kind, sample, i, kernel, h, xi) {
            Ok(pred) => angular_distance(theta, pred),
            Err(_) => 2.0,
        })
        .sum()
}

/// Grid bandwidth minimizing the leave-one-out angular loss; ties go to the
/// smaller bandwidth.
pub fn cv_select(sample: &Sample, kind: BaselineKind, kernel: &Kernel, grid: &BandwidthGrid) -> Result<f64> {
    if sample.len() < 3 {
        return Err(Error::domain("cross-validation needs at least 3 observations"));
    }
    let mut best: Option<(f64, f64)> = None;
    for &h in grid.values().iter().rev() {
        let loss = cv_loss(sample, kind, kernel, h);
        match best {
            Some((_, b)) if b <= loss => {}
            _ => best = Some((h, loss)),
        }
    }
    best.map(|(h, _)| h)
        .ok_or_else(|| Error::EmptyGrid("cross-validation over an empty grid".into()))
}
