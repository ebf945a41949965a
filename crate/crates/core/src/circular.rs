//! Circular arithmetic on angles represented in the half-open interval [-π, π).

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An angle in radians, always stored wrapped to [-π, π).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);

    /// Wraps `radians` into [-π, π).
    pub fn new(radians: f64) -> Result<Self> {
        wrap(radians)
    }

    #[inline]
    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn sin(self) -> f64 {
        self.0.sin()
    }

    pub fn cos(self) -> f64 {
        self.0.cos()
    }

    /// Signed circular difference `self - other`, wrapped to [-π, π).
    pub fn diff(self, other: Angle) -> Angle {
        Angle(wrap_finite(self.0 - other.0))
    }

    /// Rotates by `phi` radians.
    pub fn rotate(self, phi: f64) -> Result<Angle> {
        wrap(self.0 + phi)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<Angle> for f64 {
    fn from(a: Angle) -> f64 {
        a.0
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = f64::deserialize(d)?;
        wrap(raw).map_err(serde::de::Error::custom)
    }
}

fn wrap_finite(x: f64) -> f64 {
    if (-PI..PI).contains(&x) {
        return x;
    }
    let mut r = x - TAU * (x / TAU).round();
    if r >= PI {
        r -= TAU;
    } else if r < -PI {
        r += TAU;
    }
    // r can land on π again after rounding in the subtraction above
    if r >= PI {
        -PI
    } else {
        r
    }
}

/// Returns `x - 2πk` in [-π, π) for the unique integer `k`.
pub fn wrap(x: f64) -> Result<Angle> {
    if !x.is_finite() {
        return Err(Error::domain(format!("cannot wrap non-finite value {x}")));
    }
    Ok(Angle(wrap_finite(x)))
}

/// Four-branch arctangent of `w1 / w2` with arctan(±∞) = ±π/2.
///
/// `w1` is the sine-like and `w2` the cosine-like coordinate, so
/// `atan2c(θ.sin(), θ.cos())` recovers θ.
pub fn atan2c(w1: f64, w2: f64) -> Result<Angle> {
    if !w1.is_finite() || !w2.is_finite() {
        return Err(Error::domain(format!("atan2c({w1}, {w2}): non-finite argument")));
    }
    let value = if w1 == 0.0 && w2 == 0.0 {
        return Err(Error::domain("atan2c(0, 0) is undefined"));
    } else if w2 >= 0.0 && w1 != 0.0 {
        if w2 == 0.0 {
            FRAC_PI_2.copysign(w1)
        } else {
            (w1 / w2).atan()
        }
    } else if w2 > 0.0 {
        0.0
    } else if w1 > 0.0 {
        (w1 / w2).atan() + PI
    } else {
        (w1 / w2).atan() - PI
    };
    // the w2 < 0 branches can hit ±π exactly when w1 / w2 underflows
    Ok(Angle(wrap_finite(value)))
}

/// Angular distance `1 - cos(a - b)`, in [0, 2].
pub fn angular_distance(a: Angle, b: Angle) -> f64 {
    1.0 - (a.0 - b.0).cos()
}

/// Mean direction `atan2c(Σ sin θ, Σ cos θ)`.
pub fn circular_mean(angles: &[Angle]) -> Result<Angle> {
    let (s, c) = angles.iter().fold((0.0, 0.0), |(s, c), a| (s + a.sin(), c + a.cos()));
    atan2c(s, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atan2c_branches() {
        assert_eq!(atan2c(0.0, 1.0).unwrap().radians(), 0.0);
        assert_eq!(atan2c(1.0, 0.0).unwrap().radians(), FRAC_PI_2);
        assert_eq!(atan2c(-1.0, 0.0).unwrap().radians(), -FRAC_PI_2);
        let v = atan2c(1.0, -1.0).unwrap().radians();
        assert!((v - 3.0 * PI / 4.0).abs() < 1e-15);
        let v = atan2c(-1.0, -1.0).unwrap().radians();
        assert!((v + 3.0 * PI / 4.0).abs() < 1e-15);
        // w2 < 0, w1 = 0 falls in the "w1 <= 0" branch
        assert_eq!(atan2c(0.0, -2.0).unwrap().radians(), -PI);
    }

    #[test]
    fn atan2c_origin_is_domain_error() {
        assert!(matches!(atan2c(0.0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn atan2c_underflow_stays_in_range() {
        let a = atan2c(1e-320, -1.0).unwrap().radians();
        assert!((-PI..PI).contains(&a));
    }

    #[test]
    fn wrap_examples() {
        assert_eq!(wrap(0.0).unwrap().radians(), 0.0);
        assert_eq!(wrap(-FRAC_PI_2).unwrap().radians(), -FRAC_PI_2);
        assert_eq!(wrap(PI).unwrap().radians(), -PI);
        let w = wrap(3.0 * PI).unwrap().radians();
        assert!((w + PI).abs() < 1e-12, "{w}");
        assert!(wrap(f64::NAN).is_err());
        assert!(wrap(f64::INFINITY).is_err());
    }

    #[test]
    fn wrap_is_idempotent_near_boundary() {
        let below_pi = f64::from_bits(PI.to_bits() - 1);
        assert_eq!(wrap(below_pi).unwrap().radians(), below_pi);
        assert_eq!(wrap(-PI).unwrap().radians(), -PI);
    }

    #[test]
    fn distance_examples() {
        let t = Angle::new(0.7).unwrap();
        assert_eq!(angular_distance(t, t), 0.0);
        let zero = Angle::ZERO;
        let half = Angle::new(PI).unwrap();
        assert!((angular_distance(zero, half) - 2.0).abs() < 1e-15);
        let quarter = Angle::new(FRAC_PI_2).unwrap();
        assert!((angular_distance(zero, quarter) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn serde_wraps_on_load() {
        let a: Angle = serde_json::from_str("7.0").unwrap();
        assert!((a.radians() - (7.0 - TAU)).abs() < 1e-15);
    }
}
