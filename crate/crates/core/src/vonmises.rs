//! The von Mises distribution and the modified Bessel function I₀.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circular::{wrap, Angle};
use crate::error::{Error, Result};
use crate::quadrature;

const SERIES_CUTOFF: f64 = 15.0;

/// `e^{-x} I₀(x)` for `x ≥ 0`.
///
/// Ascending series up to 15, the large-argument asymptotic expansion above
/// (its smallest term there is below 1e-13 relative).
pub fn bessel_i0_scaled(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain(format!("I0 requires a non-negative argument, got {x}")));
    }
    if x <= SERIES_CUTOFF {
        return Ok(i0_series(x) * (-x).exp());
    }
    let mut sum = 1.0;
    let mut term = 1.0;
    let mut k = 1.0;
    loop {
        let next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * x);
        if next >= term || next < sum * 1e-17 {
            break;
        }
        sum += next;
        term = next;
        k += 1.0;
    }
    Ok(sum / (TAU * x).sqrt())
}

/// Modified Bessel function of the first kind, order zero.
pub fn bessel_i0(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain(format!("I0 requires a non-negative argument, got {x}")));
    }
    if x <= SERIES_CUTOFF {
        Ok(i0_series(x))
    } else {
        Ok(bessel_i0_scaled(x)? * x.exp())
    }
}

fn i0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    while term > sum * 1e-18 {
        term *= q / (k * k);
        sum += term;
        k += 1.0;
    }
    sum
}

/// Result of comparing a von Mises density with its shifted copy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KlShift {
    /// ∫ p(u) log(p(u) / p(u + y)) du over one period.
    pub kl: f64,
    /// `p* y²` with `p* = c(κ) κ C(κ) / 2`.
    pub bound: f64,
}

/// von Mises distribution vM(μ, κ) on [-π, π).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawVonMises", into = "RawVonMises")]
pub struct VonMises {
    mu: Angle,
    kappa: f64,
    log_norm: f64,
}

#[derive(Serialize, Deserialize)]
struct RawVonMises {
    mu: f64,
    kappa: f64,
}

impl TryFrom<RawVonMises> for VonMises {
    type Error = Error;
    fn try_from(raw: RawVonMises) -> Result<Self> {
        VonMises::new(raw.mu, raw.kappa)
    }
}

impl From<VonMises> for RawVonMises {
    fn from(d: VonMises) -> Self {
        RawVonMises {
            mu: d.mu.radians(),
            kappa: d.kappa,
        }
    }
}

const QUAD_TOL: f64 = 1e-10;

impl VonMises {
    pub fn new(mu: f64, kappa: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::domain(format!(
                "von Mises concentration must be positive and finite, got {kappa}"
            )));
        }
        let mu = wrap(mu)?;
        // log(2π I0(κ)) = log 2π + κ + log(e^{-κ} I0(κ))
        let log_norm = TAU.ln() + kappa + bessel_i0_scaled(kappa)?.ln();
        Ok(Self { mu, kappa, log_norm })
    }

    pub fn mu(&self) -> Angle {
        self.mu
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Log density; periodic in `theta`, so any real argument is accepted.
    pub fn log_density(&self, theta: f64) -> f64 {
        self.kappa * (theta - self.mu.radians()).cos() - self.log_norm
    }

    pub fn density(&self, theta: Angle) -> f64 {
        self.log_density(theta.radians()).exp()
    }

    /// Draws `count` angles with Best–Fisher rejection sampling.
    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<Angle> {
        let kappa = self.kappa;
        let s = if kappa < 1e-5 {
            1.0 / kappa + kappa
        } else {
            let r = 1.0 + (1.0 + 4.0 * kappa * kappa).sqrt();
            let rho = (r - (2.0 * r).sqrt()) / (2.0 * kappa);
            (1.0 + rho * rho) / (2.0 * rho)
        };
        (0..count)
            .map(|_| {
                let w = loop {
                    let u: f64 = rng.random();
                    let z = (PI * u).cos();
                    let w = (1.0 + s * z) / (s + z);
                    let y = kappa * (s - w);
                    let v: f64 = rng.random();
                    if y * (2.0 - y) - v >= 0.0 || (y / v).ln() + 1.0 - y >= 0.0 {
                        break w;
                    }
                };
                let magnitude = w.clamp(-1.0, 1.0).acos();
                let signed = if rng.random::<f64>() < 0.5 {
                    -magnitude
                } else {
                    magnitude
                };
                Angle::new(signed + self.mu.radians()).expect("finite sample")
            })
            .collect()
    }

    /// Draws `count` angles from a ChaCha stream seeded with `seed`.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<Angle> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(&mut rng, count)
    }

    /// `E cos(Θ - μ)`, by quadrature.
    pub fn mean_resultant_length(&self) -> f64 {
        let mu = self.mu.radians();
        quadrature::integrate(
            |u| self.log_density(u).exp() * (u - mu).cos(),
            mu - PI,
            mu + PI,
            QUAD_TOL,
        )
    }

    /// Kullback–Leibler divergence between the density and its shift by `y`,
    /// with the quadratic upper bound `p* y²`.
    pub fn kl_shift(&self, y: f64) -> Result<KlShift> {
        if !y.is_finite() {
            return Err(Error::domain(format!("shift must be finite, got {y}")));
        }
        if y == 0.0 {
            return Ok(KlShift { kl: 0.0, bound: 0.0 });
        }
        let mu = self.mu.radians();
        let kl = quadrature::integrate(
            |u| {
                let lp = self.log_density(u);
                lp.exp() * (lp - self.log_density(u + y))
            },
            mu - PI,
            mu + PI,
            QUAD_TOL,
        );
        // c(κ) C(κ) = ∫ p(u) cos(u - μ) du
        let p_star = 0.5 * self.kappa * self.mean_resultant_length();
        Ok(KlShift {
            kl,
            bound: p_star * y * y,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // independent oracle: (1/π) ∫₀^π e^{x cos t} dt by the periodic trapezoid rule
    fn i0_trapezoid(x: f64) -> f64 {
        let n = 2000;
        let h = TAU / n as f64;
        (0..n).map(|k| (x * (k as f64 * h).cos()).exp()).sum::<f64>() / n as f64
    }

    #[test]
    fn i0_examples() {
        assert_eq!(bessel_i0(0.0).unwrap(), 1.0);
        assert!((bessel_i0(1.0).unwrap() - 1.266_065_877_752_008_4).abs() < 1e-15);
        let v = bessel_i0(10.0).unwrap();
        assert!((v / 2_815.716_628_466_254 - 1.0).abs() < 1e-13, "{v}");
        assert!(bessel_i0(-1.0).is_err());
    }

    #[test]
    fn i0_matches_trapezoid_oracle() {
        for i in 0..=400 {
            let x = i as f64 * 0.25;
            let got = bessel_i0(x).unwrap();
            let want = i0_trapezoid(x);
            assert!((got / want - 1.0).abs() < 1e-12, "x = {x}: {got} vs {want}");
        }
    }

    #[test]
    fn i0_continuous_at_cutoff() {
        let below = bessel_i0(SERIES_CUTOFF).unwrap();
        let above = bessel_i0(SERIES_CUTOFF * (1.0 + 1e-15)).unwrap();
        assert!((below / above - 1.0).abs() < 1e-12);
    }

    #[test]
    fn density_examples() {
        let d = VonMises::new(0.0, 10.0).unwrap();
        let at_mode = d.density(Angle::ZERO);
        assert!((at_mode - 1.245_02).abs() < 1e-4, "{at_mode}");
        for k in 1..100 {
            let t = Angle::new(-PI + k as f64 * 0.0628).unwrap();
            assert!(d.density(t) <= at_mode);
        }
        assert!(VonMises::new(0.0, 0.0).is_err());
        assert!(VonMises::new(0.0, -2.0).is_err());
    }

    #[test]
    fn sampler_is_seeded() {
        let d = VonMises::new(0.3, 4.0).unwrap();
        assert!(d.sample(0, 7).is_empty());
        assert_eq!(d.sample(50, 7), d.sample(50, 7));
        assert_ne!(d.sample(50, 7), d.sample(50, 8));
    }

    #[test]
    fn kl_zero_shift() {
        let d = VonMises::new(0.0, 5.0).unwrap();
        assert_eq!(d.kl_shift(0.0).unwrap(), KlShift { kl: 0.0, bound: 0.0 });
    }
}
