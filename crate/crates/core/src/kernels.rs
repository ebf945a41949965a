//! Smoothing kernels and their convolutions.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, GaussLegendre};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelFamily {
    Epanechnikov,
    Gaussian,
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelFamily::Epanechnikov => "epanechnikov",
            KernelFamily::Gaussian => "gaussian",
        })
    }
}

impl FromStr for KernelFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "epanechnikov" => Ok(KernelFamily::Epanechnikov),
            "gaussian" => Ok(KernelFamily::Gaussian),
            other => Err(Error::InvalidInput(format!(
                "unknown kernel `{other}` (expected `epanechnikov` or `gaussian`)"
            ))),
        }
    }
}

/// L¹, squared L² and sup norms of a kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelNorms {
    pub l1: f64,
    pub l2_sq: f64,
    pub sup: f64,
}

/// Radius beyond which the Gaussian kernel is treated as negligible
/// (mass outside ±5 is below 6e-7). Only used for admissibility checks.
pub const GAUSSIAN_EFFECTIVE_RADIUS: f64 = 5.0;

const INV_SQRT_TAU: f64 = 0.398_942_280_401_432_7;

/// A kernel family with its analytic constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Kernel {
    family: KernelFamily,
}

impl Kernel {
    pub const EPANECHNIKOV: Kernel = Kernel {
        family: KernelFamily::Epanechnikov,
    };
    pub const GAUSSIAN: Kernel = Kernel {
        family: KernelFamily::Gaussian,
    };

    pub fn new(family: KernelFamily) -> Self {
        Self { family }
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    /// Half-width A of the support; the Gaussian reports its effective radius.
    pub fn support_radius(&self) -> f64 {
        match self.family {
            KernelFamily::Epanechnikov => 1.0,
            KernelFamily::Gaussian => GAUSSIAN_EFFECTIVE_RADIUS,
        }
    }

    pub fn is_compact(&self) -> bool {
        matches!(self.family, KernelFamily::Epanechnikov)
    }

    pub fn norms(&self) -> KernelNorms {
        match self.family {
            KernelFamily::Epanechnikov => KernelNorms {
                l1: 1.0,
                l2_sq: 0.6,
                sup: 0.75,
            },
            KernelFamily::Gaussian => KernelNorms {
                l1: 1.0,
                l2_sq: 0.5 / PI.sqrt(),
                sup: INV_SQRT_TAU,
            },
        }
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        match self.family {
            KernelFamily::Epanechnikov => {
                if u.abs() <= 1.0 {
                    0.75 * (1.0 - u * u)
                } else {
                    0.0
                }
            }
            KernelFamily::Gaussian => INV_SQRT_TAU * (-0.5 * u * u).exp(),
        }
    }

    /// `K_h(u) = K(u / h) / h`.
    pub fn scaled_eval(&self, h: f64, u: f64) -> Result<f64> {
        check_bandwidth(h)?;
        Ok(self.scaled(h, u))
    }

    #[inline]
    pub(crate) fn scaled(&self, h: f64, u: f64) -> f64 {
        self.eval(u / h) / h
    }

    /// `(K_hp * K_h)(u)`.
    pub fn convolved_eval(&self, h: f64, hp: f64, u: f64) -> Result<f64> {
        check_bandwidth(h)?;
        check_bandwidth(hp)?;
        Ok(self.convolved(h, hp, u))
    }

    #[inline]
    pub(crate) fn convolved(&self, h: f64, hp: f64, u: f64) -> f64 {
        match self.family {
            KernelFamily::Gaussian => {
                let var = h * h + hp * hp;
                (-0.5 * u * u / var).exp() / (TAU * var).sqrt()
            }
            KernelFamily::Epanechnikov => {
                // the product is a single degree-4 polynomial on the overlap
                // of the two supports, so 3-point Gauss-Legendre is exact
                let lo = (-h).max(u - hp);
                let hi = h.min(u + hp);
                if lo >= hi {
                    return 0.0;
                }
                let mid = 0.5 * (lo + hi);
                let half = 0.5 * (hi - lo);
                let mut acc = 0.0;
                for (x, w) in GL3_NODES.iter().zip(GL3_WEIGHTS.iter()) {
                    let t = mid + half * x;
                    acc += w * epa_poly(t / h) * epa_poly((u - t) / hp);
                }
                acc * half / (h * hp)
            }
        }
    }

    /// Radius outside which `(K_hp * K_h)` vanishes, if the kernel is compact.
    pub(crate) fn convolved_radius(&self, h: f64, hp: f64) -> Option<f64> {
        self.is_compact().then(|| self.support_radius() * (h + hp))
    }

    /// True iff ∫ yʲ K(y) dy = 0 (to 1e-10) for every j in 1..=order.
    pub fn moment_order_check(&self, order: u32) -> bool {
        (1..=order).all(|j| self.moment(j).abs() <= 1e-10)
    }

    /// ∫ yʲ K(y) dy by quadrature.
    pub fn moment(&self, j: u32) -> f64 {
        self.integrate(|y| y.powi(j as i32) * self.eval(y))
    }

    /// Integrates `f` over the kernel's (effective) real line by quadrature.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        match self.family {
            KernelFamily::Epanechnikov => quadrature::integrate(f, -1.0, 1.0, 1e-13),
            KernelFamily::Gaussian => quadrature::integrate(f, -40.0, 40.0, 1e-13),
        }
    }
}

impl Default for Kernel {
    fn default() -> Self {
        Kernel::EPANECHNIKOV
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.family.fmt(f)
    }
}

impl FromStr for Kernel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.parse().map(Kernel::new)
    }
}

impl From<KernelFamily> for Kernel {
    fn from(family: KernelFamily) -> Self {
        Kernel::new(family)
    }
}

#[inline]
fn epa_poly(u: f64) -> f64 {
    0.75 * (1.0 - u * u)
}

const GL3_NODES: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
const GL3_WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];

fn check_bandwidth(h: f64) -> Result<()> {
    if h.is_finite() && h > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("bandwidth must be positive and finite, got {h}")))
    }
}

/// Reference convolution by a high-order rule; used to cross-check the fast path.
pub fn convolved_reference(kernel: &Kernel, h: f64, hp: f64, u: f64) -> f64 {
    let rule = GaussLegendre::new(32);
    match kernel.family() {
        KernelFamily::Epanechnikov => {
            let lo = (-h).max(u - hp);
            let hi = h.min(u + hp);
            if lo >= hi {
                0.0
            } else {
                rule.integrate(|t| kernel.scaled(h, t) * kernel.scaled(hp, u - t), lo, hi)
            }
        }
        KernelFamily::Gaussian => quadrature::integrate(
            |t| kernel.scaled(h, t) * kernel.scaled(hp, u - t),
            -40.0 * h,
            40.0 * h,
            1e-13,
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        assert_eq!(Kernel::EPANECHNIKOV.eval(0.0), 0.75);
        assert_eq!(Kernel::EPANECHNIKOV.eval(2.0), 0.0);
        assert!((Kernel::GAUSSIAN.eval(0.0) - 1.0 / TAU.sqrt()).abs() < 1e-16);
    }

    #[test]
    fn scaled_examples() {
        let k = Kernel::EPANECHNIKOV;
        assert_eq!(k.scaled_eval(1.0, 0.0).unwrap(), 0.75);
        assert_eq!(k.scaled_eval(0.5, 0.0).unwrap(), 1.5);
        assert!(k.scaled_eval(0.0, 0.0).is_err());
        assert!(k.scaled_eval(-1.0, 0.0).is_err());
    }

    #[test]
    fn convolution_examples() {
        let g = Kernel::GAUSSIAN.convolved_eval(1.0, 1.0, 0.0).unwrap();
        assert!((g - 0.5 / PI.sqrt()).abs() < 1e-15);
        let e = Kernel::EPANECHNIKOV;
        assert_eq!(e.convolved_eval(0.3, 0.3, 0.61).unwrap(), 0.0);
        assert_eq!(e.convolved_eval(0.3, 0.3, -0.61).unwrap(), 0.0);
        assert!(e.convolved_eval(0.3, 0.0, 0.1).is_err());
    }

    #[test]
    fn epanechnikov_fast_path_matches_reference() {
        let e = Kernel::EPANECHNIKOV;
        for &(h, hp) in &[(0.1, 0.1), (0.05, 0.5), (1.0, 0.25), (0.2, 1.0 / 3.0)] {
            for i in 0..=200 {
                let u = -1.6 + i as f64 * 0.016;
                let fast = e.convolved(h, hp, u);
                let slow = convolved_reference(&e, h, hp, u);
                assert!((fast - slow).abs() < 1e-12 * (1.0 + slow.abs()), "h={h} hp={hp} u={u}");
            }
        }
    }

    #[test]
    fn moment_examples() {
        assert!(Kernel::EPANECHNIKOV.moment_order_check(1));
        assert!(Kernel::GAUSSIAN.moment_order_check(1));
        assert!(!Kernel::EPANECHNIKOV.moment_order_check(2));
        assert!((Kernel::EPANECHNIKOV.moment(2) - 0.2).abs() < 1e-13);
    }

    #[test]
    fn names_round_trip() {
        for k in [Kernel::EPANECHNIKOV, Kernel::GAUSSIAN] {
            assert_eq!(k.to_string().parse::<Kernel>().unwrap(), k);
        }
        assert!("triangular".parse::<Kernel>().is_err());
        let json = serde_json::to_string(&Kernel::GAUSSIAN).unwrap();
        assert_eq!(json, "\"gaussian\"");
    }
}
