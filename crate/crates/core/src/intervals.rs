//! Exact angles of the form `r + s·π` and finite unions of closed intervals
//! of `[-π, π]` with exactly computable Lebesgue measure.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::Sign;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::ball::CertifiedReal;
use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, q_to_f64, sign_r_plus_s_pi, Q};

/// The real number `rad + pi·π`. The representation is unique because π is irrational.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Angle {
    pub rad: Q,
    pub pi: Q,
}

impl Angle {
    pub fn new(rad: Q, pi: Q) -> Self {
        Self { rad, pi }
    }

    pub fn rad(r: Q) -> Self {
        Self { rad: r, pi: Q::zero() }
    }

    pub fn pi_multiple(s: Q) -> Self {
        Self { rad: Q::zero(), pi: s }
    }

    pub fn zero() -> Self {
        Self::rad(Q::zero())
    }

    pub fn pi_() -> Self {
        Self::pi_multiple(Q::one())
    }

    pub fn is_zero(&self) -> bool {
        self.rad.is_zero() && self.pi.is_zero()
    }

    pub fn sign(&self) -> Sign {
        sign_r_plus_s_pi(&self.rad, &self.pi)
    }

    pub fn to_f64(&self) -> f64 {
        q_to_f64(&self.rad) + q_to_f64(&self.pi) * std::f64::consts::PI
    }

    pub fn to_ball(&self) -> CertifiedReal {
        CertifiedReal::from_q(&self.rad) + CertifiedReal::from_q(&self.pi) * CertifiedReal::pi()
    }

    pub fn scale(&self, s: &Q) -> Self {
        Self::new(&self.rad * s, &self.pi * s)
    }

    pub fn parse(s: &str) -> Result<Self> {
        let t: String = s.trim().replace('π', "pi").chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(Error::Parse("empty angle".into()));
        }
        // Split into signed terms at '+'/'-' that are not exponent signs or leading.
        let bytes: Vec<char> = t.chars().collect();
        let mut terms = Vec::new();
        let mut start = 0;
        for i in 1..bytes.len() {
            if (bytes[i] == '+' || bytes[i] == '-') && !matches!(bytes[i - 1], 'e' | 'E' | '/') {
                terms.push(bytes[start..i].iter().collect::<String>());
                start = i;
            }
        }
        terms.push(bytes[start..].iter().collect::<String>());
        let mut out = Angle::zero();
        for term in terms {
            if let Some(coef) = term.strip_suffix("pi") {
                let coef = coef.trim_end_matches('*');
                let c = match coef {
                    "" | "+" => Q::one(),
                    "-" => -Q::one(),
                    c => parse_rational(c)?,
                };
                out.pi += c;
            } else {
                out.rad += parse_rational(&term)?;
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.rad.is_zero(), self.pi.is_zero()) {
            (_, true) => write!(f, "{}", format_rational(&self.rad)),
            (true, false) => write!(f, "{}pi", format_rational(&self.pi)),
            (false, false) => {
                let sign = if self.pi.is_negative() { '-' } else { '+' };
                write!(f, "{}{}{}pi", format_rational(&self.rad), sign, format_rational(&self.pi.abs()))
            }
        }
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Angle::parse(&s).map_err(serde::de::Error::custom)
    }
}

impl Add for &Angle {
    type Output = Angle;
    fn add(self, o: &Angle) -> Angle {
        Angle::new(&self.rad + &o.rad, &self.pi + &o.pi)
    }
}

impl Sub for &Angle {
    type Output = Angle;
    fn sub(self, o: &Angle) -> Angle {
        Angle::new(&self.rad - &o.rad, &self.pi - &o.pi)
    }
}

impl Neg for &Angle {
    type Output = Angle;
    fn neg(self) -> Angle {
        Angle::new(-self.rad.clone(), -self.pi.clone())
    }
}

impl PartialOrd for Angle {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Angle {
    fn cmp(&self, o: &Self) -> Ordering {
        match (self - o).sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }
}

/// Finite union of closed intervals inside `[-π, π]`, kept sorted and merged.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalSet {
    intervals: Vec<(Angle, Angle)>,
}

impl IntervalSet {
    /// Builds the union; degenerate intervals (measure zero) are dropped.
    pub fn new(raw: Vec<(Angle, Angle)>) -> Result<Self> {
        let lo_bound = -&Angle::pi_();
        let hi_bound = Angle::pi_();
        for (a, b) in &raw {
            if a < &lo_bound || b > &hi_bound {
                return Err(Error::Domain(format!("interval [{a}, {b}] leaves [-pi, pi]")));
            }
        }
        Ok(Self { intervals: merge(raw) })
    }

    /// Intersects each interval with `[-π, π]` before building the union.
    pub fn clipped(raw: Vec<(Angle, Angle)>) -> Self {
        let lo_bound = -&Angle::pi_();
        let hi_bound = Angle::pi_();
        let clipped = raw
            .into_iter()
            .map(|(a, b)| (a.max(lo_bound.clone()), b.min(hi_bound.clone())))
            .collect();
        Self { intervals: merge(clipped) }
    }

    pub fn empty() -> Self {
        Self { intervals: Vec::new() }
    }

    pub fn from_rad(raw: &[(Q, Q)]) -> Result<Self> {
        Self::new(raw.iter().map(|(a, b)| (Angle::rad(a.clone()), Angle::rad(b.clone()))).collect())
    }

    pub fn from_pi_multiples(raw: &[(Q, Q)]) -> Result<Self> {
        Self::new(
            raw.iter()
                .map(|(a, b)| (Angle::pi_multiple(a.clone()), Angle::pi_multiple(b.clone())))
                .collect(),
        )
    }

    pub fn intervals(&self) -> &[(Angle, Angle)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    /// Exact Lebesgue measure.
    pub fn measure(&self) -> Angle {
        self.intervals.iter().fold(Angle::zero(), |acc, (a, b)| &acc + &(b - a))
    }

    /// `λ(G)/(2π)` when it is rational (no radian part).
    pub fn normalized_measure_exact(&self) -> Option<Q> {
        let m = self.measure();
        m.rad.is_zero().then(|| m.pi / Q::from_integer(2.into()))
    }

    pub fn normalized_measure(&self) -> CertifiedReal {
        match self.normalized_measure_exact() {
            Some(a) => CertifiedReal::from_q(&a),
            None => self.measure().to_ball() / CertifiedReal::two_pi(),
        }
    }

    pub fn contains(&self, t: &Angle) -> bool {
        self.intervals.iter().any(|(a, b)| a <= t && t <= b)
    }

    pub fn contains_rad(&self, t: &Q) -> bool {
        self.contains(&Angle::rad(t.clone()))
    }

    pub fn intervals_f64(&self) -> Vec<(f64, f64)> {
        self.intervals.iter().map(|(a, b)| (a.to_f64(), b.to_f64())).collect()
    }
}

fn merge(mut raw: Vec<(Angle, Angle)>) -> Vec<(Angle, Angle)> {
    raw.retain(|(a, b)| a < b);
    raw.sort_by(|x, y| x.0.cmp(&y.0));
    let mut out: Vec<(Angle, Angle)> = Vec::with_capacity(raw.len());
    for (a, b) in raw {
        match out.last_mut() {
            Some(last) if a <= last.1 => {
                if b > last.1 {
                    last.1 = b;
                }
            }
            _ => out.push((a, b)),
        }
    }
    out
}

#[derive(Serialize, Deserialize)]
struct IntervalSetJson {
    #[serde(default = "schema_v1")]
    schema: String,
    intervals: Vec<(Angle, Angle)>,
}

fn schema_v1() -> String {
    "v1".into()
}

impl Serialize for IntervalSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        IntervalSetJson { schema: schema_v1(), intervals: self.intervals.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntervalSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = IntervalSetJson::deserialize(d)?;
        IntervalSet::new(j.intervals).map_err(serde::de::Error::custom)
    }
}
