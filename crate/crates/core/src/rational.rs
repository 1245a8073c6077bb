//! Exact rational scalars and complex rationals, with the string forms used
//! by every JSON schema in the crate (`"p/q"`, integers, or finite decimals).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// 2^e for any signed exponent.
pub fn pow2(e: i64) -> Q {
    let m = BigInt::one() << (e.unsigned_abs() as usize);
    if e >= 0 {
        Q::from_integer(m)
    } else {
        Q::new(BigInt::one(), m)
    }
}

/// Parses `"p/q"`, `"-7"`, or a finite decimal such as `"0.125"` / `"1e-3"`.
pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let d: BigInt = d
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Q::new(n, d));
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Result<Q> {
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let v = if scale >= 0 {
        Q::from_integer(n * num_traits::pow(ten, scale as usize))
    } else {
        Q::new(n, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(if neg { -v } else { v })
}

pub fn format_rational(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Exact conversion of a finite float.
pub fn q_from_f64(x: f64) -> Q {
    Q::from_float(x).expect("finite float")
}

/// Rounds `x` to the nearest multiple of 2^-bits.
pub fn round_dyadic(x: f64, bits: u32) -> Q {
    let exact = q_from_f64(x);
    let scale = pow2(bits as i64);
    (exact * &scale).round() / scale
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Largest float not above `x`.
pub fn floor_to_f64(x: &Q) -> f64 {
    let v = q_to_f64(x);
    if q_from_f64(v) > *x {
        v.next_down()
    } else {
        v
    }
}

/// Smallest float not below `x`.
pub fn ceil_to_f64(x: &Q) -> f64 {
    let v = q_to_f64(x);
    if q_from_f64(v) < *x {
        v.next_up()
    } else {
        v
    }
}

/// Floor of `x` on the grid 2^-bits.
pub fn floor_dyadic(x: &Q, bits: u32) -> Q {
    let scale = pow2(bits as i64);
    (x * &scale).floor() / scale
}

pub fn ceil_dyadic(x: &Q, bits: u32) -> Q {
    let scale = pow2(bits as i64);
    (x * &scale).ceil() / scale
}

/// Rational enclosure `lo < pi < hi` with width below 2^-bits, via Machin's formula.
pub fn pi_enclosure(bits: u32) -> (Q, Q) {
    static CACHE: OnceLock<(u32, Q, Q)> = OnceLock::new();
    if bits <= 300 {
        let (_, lo, hi) = CACHE.get_or_init(|| {
            let (lo, hi) = machin_pi(300);
            (300, lo, hi)
        });
        return (lo.clone(), hi.clone());
    }
    machin_pi(bits)
}

fn machin_pi(bits: u32) -> (Q, Q) {
    let guard = 16u32;
    let shift = (bits + guard) as usize;
    let one = BigInt::one() << shift;
    // atan(1/x) = sum (-1)^k / ((2k+1) x^(2k+1)); each truncated term is off by at most two units.
    let atan_inv = |x: i64| -> (BigInt, i64) {
        let x = BigInt::from(x);
        let x2 = &x * &x;
        let mut power = &one / &x;
        let mut sum = BigInt::zero();
        let mut k = 0i64;
        let mut terms = 0i64;
        while !power.is_zero() {
            let term = &power / BigInt::from(2 * k + 1);
            if k.is_even() {
                sum += term;
            } else {
                sum -= term;
            }
            power /= &x2;
            k += 1;
            terms += 1;
        }
        (sum, 2 * terms + 1)
    };
    let (a, ea) = atan_inv(5);
    let (b, eb) = atan_inv(239);
    let approx = a * 16 - b * 4;
    let err = BigInt::from(16 * ea + 4 * eb);
    let den = Q::from_integer(one);
    (
        Q::from_integer(&approx - &err) / &den,
        Q::from_integer(&approx + &err) / &den,
    )
}

pub fn pi_f64() -> f64 {
    std::f64::consts::PI
}

/// Sign of `r + s*pi`, decided exactly with refined pi enclosures.
pub fn sign_r_plus_s_pi(r: &Q, s: &Q) -> Sign {
    if s.is_zero() {
        return sign_of(r);
    }
    let mut bits = 64;
    loop {
        let (lo, hi) = pi_enclosure(bits);
        let (a, b) = if s.is_positive() { (r + s * &lo, r + s * &hi) } else { (r + s * &hi, r + s * &lo) };
        if a.is_positive() {
            return Sign::Plus;
        }
        if b.is_negative() {
            return Sign::Minus;
        }
        // pi is irrational, so r + s*pi != 0 and refinement terminates.
        bits *= 2;
    }
}

fn sign_of(x: &Q) -> Sign {
    if x.is_positive() {
        Sign::Plus
    } else if x.is_negative() {
        Sign::Minus
    } else {
        Sign::NoSign
    }
}

/// Complex number with exact rational parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QComplex {
    pub re: Q,
    pub im: Q,
}

impl QComplex {
    pub fn new(re: Q, im: Q) -> Self {
        Self { re, im }
    }

    pub fn real(re: Q) -> Self {
        Self { re, im: Q::zero() }
    }

    pub fn zero() -> Self {
        Self::real(Q::zero())
    }

    pub fn one() -> Self {
        Self::real(Q::one())
    }

    pub fn i() -> Self {
        Self::new(Q::zero(), Q::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> Q {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn scale(&self, s: &Q) -> Self {
        Self::new(&self.re * s, &self.im * s)
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(q_to_f64(&self.re), q_to_f64(&self.im))
    }

    pub fn from_c64_dyadic(z: Complex64, bits: u32) -> Self {
        Self::new(round_dyadic(z.re, bits), round_dyadic(z.im, bits))
    }
}

impl fmt::Display for QComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({})i", format_rational(&self.re), format_rational(&self.im))
    }
}

impl Add for &QComplex {
    type Output = QComplex;
    fn add(self, o: &QComplex) -> QComplex {
        QComplex::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl Sub for &QComplex {
    type Output = QComplex;
    fn sub(self, o: &QComplex) -> QComplex {
        QComplex::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl Mul for &QComplex {
    type Output = QComplex;
    fn mul(self, o: &QComplex) -> QComplex {
        QComplex::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl Neg for &QComplex {
    type Output = QComplex;
    fn neg(self) -> QComplex {
        QComplex::new(-self.re.clone(), -self.im.clone())
    }
}

/// Serde adapter writing a rational as `"p/q"`.
pub mod q_string {
    use super::{format_rational, parse_rational, Q};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        parse_rational(&String::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}
