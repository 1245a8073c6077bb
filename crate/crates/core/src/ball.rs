//! Midpoint-radius enclosures over `f64`.
//!
//! Every operation widens the radius by a bound on the rounding error of the
//! midpoint computation, so `[value - radius, value + radius]` always contains
//! the exact result of the same operation on any members of the input balls.
//! Library transcendental functions are assumed accurate to within two ulps.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rational::{format_rational, parse_rational, q_from_f64, q_to_f64, Q};

pub const EPS: f64 = f64::EPSILON;
const TINY: f64 = 1e-300;

/// Upward-biased sum, used mostly to accumulate error terms.
#[inline]
pub fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s >= 0.0 {
        s * (1.0 + 2.0 * EPS) + TINY
    } else {
        s * (1.0 - 2.0 * EPS) + TINY
    }
}

/// Sum rounded towards `-∞`.
#[inline]
pub fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    if e < 0.0 {
        s.next_down()
    } else {
        s
    }
}

/// Rounding error bound for a computed magnitude `x` carrying `k` roundings.
#[inline]
pub fn ulps(x: f64, k: f64) -> f64 {
    x.abs() * k * EPS
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertifiedReal {
    pub value: f64,
    pub radius: f64,
}

impl CertifiedReal {
    pub fn new(value: f64, radius: f64) -> Self {
        debug_assert!(radius >= 0.0 || radius.is_nan());
        Self { value, radius }
    }

    /// A float that is itself the exact quantity.
    pub fn exact(value: f64) -> Self {
        Self { value, radius: 0.0 }
    }

    /// A value computed by one correctly rounded operation.
    pub fn rounded(value: f64) -> Self {
        Self { value, radius: ulps(value, 1.0) + TINY }
    }

    pub fn from_q(x: &Q) -> Self {
        let v = q_to_f64(x);
        Self { value: v, radius: ulps(v, 1.0) + TINY }
    }

    pub fn pi() -> Self {
        Self { value: std::f64::consts::PI, radius: 2e-16 }
    }

    pub fn two_pi() -> Self {
        Self { value: 2.0 * std::f64::consts::PI, radius: 4e-16 }
    }

    pub fn lo(&self) -> f64 {
        if self.radius == 0.0 {
            return self.value;
        }
        (self.value - self.radius) - ulps(self.value - self.radius, 1.0)
    }

    pub fn hi(&self) -> f64 {
        if self.radius == 0.0 {
            return self.value;
        }
        (self.value + self.radius) + ulps(self.value + self.radius, 1.0)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo() <= x && x <= self.hi()
    }

    pub fn contains_q(&self, x: &Q) -> bool {
        let lo = q_from_f64(self.lo());
        let hi = q_from_f64(self.hi());
        &lo <= x && x <= &hi
    }

    pub fn widen(self, extra: f64) -> Self {
        Self { value: self.value, radius: add_up(self.radius, extra.abs()) }
    }

    pub fn scale(self, s: f64) -> Self {
        let v = self.value * s;
        Self { value: v, radius: add_up(self.radius * s.abs(), ulps(v, 1.0)) }
    }

    pub fn abs(self) -> Self {
        Self { value: self.value.abs(), radius: self.radius }
    }

    /// Enclosure of `max(x, y)` over the two balls.
    pub fn max(self, o: Self) -> Self {
        Self::hull(self.lo().max(o.lo()), self.hi().max(o.hi()))
    }

    pub fn min(self, o: Self) -> Self {
        Self::hull(self.lo().min(o.lo()), self.hi().min(o.hi()))
    }

    pub fn hull(lo: f64, hi: f64) -> Self {
        let v = 0.5 * (lo + hi);
        let r = (hi - v).max(v - lo);
        Self { value: v, radius: r + ulps(r, 2.0) + ulps(v, 1.0) + TINY }
    }

    pub fn sqrt(self) -> Self {
        let lo = self.lo().max(0.0);
        let hi = self.hi().max(0.0);
        let v = self.value.max(0.0).sqrt();
        let r = (v - lo.sqrt()).max(hi.sqrt() - v);
        Self { value: v, radius: add_up(r, ulps(v, 3.0)) }
    }

    /// Natural logarithm; the ball must be strictly positive.
    pub fn ln(self) -> Self {
        let lo = self.lo();
        let v = self.value.ln();
        if lo <= 0.0 {
            return Self { value: v, radius: f64::INFINITY };
        }
        Self { value: v, radius: add_up(self.radius / lo, ulps(v, 2.0) + 4.0 * EPS * EPS) }
    }

    pub fn exp(self) -> Self {
        let v = self.value.exp();
        let hi = self.hi().exp();
        Self { value: v, radius: add_up(hi - v, ulps(hi, 3.0)) }
    }

    pub fn powf(self, e: f64) -> Self {
        if self.lo() <= 0.0 {
            let v = self.value.max(0.0).powf(e);
            let hi = self.hi().max(0.0).powf(e);
            return Self::hull(0.0, hi.max(v) * (1.0 + 4.0 * EPS));
        }
        (self.ln().scale(e)).exp()
    }
}

impl Add for CertifiedReal {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let v = self.value + o.value;
        Self { value: v, radius: add_up(self.radius + o.radius, ulps(v, 1.0)) }
    }
}

impl Sub for CertifiedReal {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let v = self.value - o.value;
        Self { value: v, radius: add_up(self.radius + o.radius, ulps(v, 1.0)) }
    }
}

impl Neg for CertifiedReal {
    type Output = Self;
    fn neg(self) -> Self {
        Self { value: -self.value, radius: self.radius }
    }
}

impl Mul for CertifiedReal {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let v = self.value * o.value;
        let r = self.value.abs() * o.radius + o.value.abs() * self.radius + self.radius * o.radius;
        Self { value: v, radius: add_up(r, ulps(v, 1.0)) }
    }
}

impl Div for CertifiedReal {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let den = o.value.abs() - o.radius;
        let v = self.value / o.value;
        if den <= 0.0 {
            return Self { value: v, radius: f64::INFINITY };
        }
        let r = (self.radius + v.abs() * o.radius) / den;
        Self { value: v, radius: add_up(r, ulps(v, 2.0)) }
    }
}

impl fmt::Display for CertifiedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.17e} ± {:.3e}", self.value, self.radius)
    }
}

#[derive(Serialize, Deserialize)]
struct CertifiedRealJson {
    value: String,
    radius: String,
}

impl Serialize for CertifiedReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let radius = if self.radius.is_finite() {
            format_rational(&q_from_f64(self.radius))
        } else {
            "inf".to_string()
        };
        CertifiedRealJson { value: format!("{:.17e}", self.value), radius }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CertifiedReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = CertifiedRealJson::deserialize(d)?;
        let value: f64 = j.value.parse().map_err(serde::de::Error::custom)?;
        let radius = if j.radius == "inf" {
            f64::INFINITY
        } else {
            q_to_f64(&parse_rational(&j.radius).map_err(serde::de::Error::custom)?)
        };
        Ok(Self { value, radius })
    }
}

/// Complex disk enclosure: the true value lies within `radius` of `mid`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CBall {
    pub mid: Complex64,
    pub radius: f64,
}

impl CBall {
    pub fn new(mid: Complex64, radius: f64) -> Self {
        Self { mid, radius }
    }

    pub fn exact(mid: Complex64) -> Self {
        Self { mid, radius: 0.0 }
    }

    pub fn re(&self) -> CertifiedReal {
        CertifiedReal::new(self.mid.re, self.radius)
    }

    pub fn im(&self) -> CertifiedReal {
        CertifiedReal::new(self.mid.im, self.radius)
    }

    pub fn abs(&self) -> CertifiedReal {
        let v = self.mid.norm();
        CertifiedReal::new(v, add_up(self.radius, ulps(v, 2.0)))
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.mid).norm() <= self.radius * (1.0 + 4.0 * EPS) + ulps(z.norm(), 4.0) + TINY
    }

    pub fn scale(self, s: f64) -> Self {
        let m = self.mid * s;
        Self { mid: m, radius: add_up(self.radius * s.abs(), ulps(m.norm(), 2.0)) }
    }
}

impl Add for CBall {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let m = self.mid + o.mid;
        Self { mid: m, radius: add_up(self.radius + o.radius, ulps(m.norm(), 2.0)) }
    }
}

impl Sub for CBall {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let m = self.mid - o.mid;
        Self { mid: m, radius: add_up(self.radius + o.radius, ulps(m.norm(), 2.0)) }
    }
}

impl Mul for CBall {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let m = self.mid * o.mid;
        let r = self.mid.norm() * o.radius + o.mid.norm() * self.radius + self.radius * o.radius;
        Self { mid: m, radius: add_up(r, ulps(self.mid.norm() * o.mid.norm(), 4.0)) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_encloses() {
        let a = CertifiedReal::rounded(0.1);
        let b = CertifiedReal::rounded(0.2);
        let s = a + b;
        assert!(s.contains(0.30000000000000004));
        assert!(s.contains(0.3));
        let p = a * b;
        assert!(p.contains(0.02));
        let d = a / b;
        assert!(d.contains(0.5));
    }

    #[test]
    fn sqrt_and_ln() {
        let two = CertifiedReal::exact(2.0);
        assert!(two.sqrt().contains(std::f64::consts::SQRT_2));
        assert!(two.ln().contains(std::f64::consts::LN_2));
        let z = CertifiedReal::new(0.0, 1.0);
        assert!(z.ln().radius.is_infinite());
    }

    #[test]
    fn json_shape() {
        let x = CertifiedReal::new(1.5, 0.25);
        let s = serde_json::to_string(&x).unwrap();
        assert!(s.contains("\"radius\":\"1/4\""));
        let back: CertifiedReal = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
    }
}
