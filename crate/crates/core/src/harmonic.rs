//! Harmonic measure of finite unions of open arcs of the unit circle.
//!
//! For one arc `A = {e^{iθ} : θ1 < θ < θ2}` with half-length `α = (θ2-θ1)/2`
//! and `w = (z - e^{iθ2})/(z - e^{iθ1})`, the analytic extension is
//!
//! ```text
//! ω̂(z, A) = 1/2 + Log(-i e^{-iα} w) / (πi)
//! ```
//!
//! The rotated argument `-i e^{-iα} w` has argument `π(ω - 1/2)`, which stays in
//! `[-π/2, π/2]` on the closed disk, so the principal logarithm is continuous
//! there. The conjugate is `ω̃ = Im ω̂ = -(1/π) ln|w|`.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::ball::{add_up, CBall, CertifiedReal, EPS};
use crate::error::{Error, Result};
use crate::quad::{integrate, QuadOptions};
use crate::rational::{format_rational, parse_rational, q_to_f64, Q};

/// Points closer than this to an arc endpoint are rejected.
pub const ENDPOINT_GUARD: f64 = 1.0 / 1_048_576.0;

/// Open arc with endpoints `t1·π < t2·π`, both strictly inside `(-π, π)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arc {
    pub t1: Q,
    pub t2: Q,
}

impl Arc {
    pub fn new(t1: Q, t2: Q) -> Result<Self> {
        let one = Q::one();
        if !(t1 < t2 && -&one < t1 && t2 < one) {
            return Err(Error::Domain(format!(
                "arc endpoints {}π, {}π must satisfy -π < θ1 < θ2 < π",
                format_rational(&t1),
                format_rational(&t2)
            )));
        }
        Ok(Self { t1, t2 })
    }

    /// Normalized length `(θ2 - θ1)/(2π)`.
    pub fn normalized_length(&self) -> Q {
        (&self.t2 - &self.t1) / Q::from_integer(2.into())
    }

    pub fn theta1(&self) -> f64 {
        q_to_f64(&self.t1) * PI
    }

    pub fn theta2(&self) -> f64 {
        q_to_f64(&self.t2) * PI
    }
}

/// Pairwise disjoint arcs separated by positive gaps, sorted by angle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArcSet {
    arcs: Vec<Arc>,
}

impl ArcSet {
    pub fn new(mut arcs: Vec<Arc>) -> Result<Self> {
        if arcs.is_empty() {
            return Err(Error::Domain("arc set must be nonempty".into()));
        }
        arcs.sort_by(|a, b| a.t1.cmp(&b.t1));
        for pair in arcs.windows(2) {
            if pair[0].t2 >= pair[1].t1 {
                return Err(Error::Domain("arcs must be separated by positive gaps".into()));
            }
        }
        Ok(Self { arcs })
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Exact `λ(F)/(2π)`.
    pub fn total(&self) -> Q {
        self.arcs.iter().map(Arc::normalized_length).fold(Q::zero(), |a, b| a + b)
    }

    /// Smallest distance from `z` to an arc endpoint.
    pub fn endpoint_distance(&self, z: Complex64) -> f64 {
        self.arcs
            .iter()
            .flat_map(|a| [a.theta1(), a.theta2()])
            .map(|th| (z - Complex64::from_polar(1.0, th)).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Serialize, Deserialize)]
struct ArcJson {
    t1: String,
    t2: String,
}

#[derive(Serialize, Deserialize)]
struct ArcSetJson {
    #[serde(default = "schema_v1")]
    schema: String,
    arcs: Vec<ArcJson>,
    #[serde(default)]
    total: Option<String>,
}

fn schema_v1() -> String {
    "v1".into()
}

impl Serialize for ArcSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ArcSetJson {
            schema: schema_v1(),
            arcs: self
                .arcs
                .iter()
                .map(|a| ArcJson { t1: format_rational(&a.t1), t2: format_rational(&a.t2) })
                .collect(),
            total: Some(format_rational(&self.total())),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ArcSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = ArcSetJson::deserialize(d)?;
        let mut arcs = Vec::with_capacity(j.arcs.len());
        for a in j.arcs {
            let t1 = parse_rational(&a.t1).map_err(D::Error::custom)?;
            let t2 = parse_rational(&a.t2).map_err(D::Error::custom)?;
            arcs.push(Arc::new(t1, t2).map_err(D::Error::custom)?);
        }
        let set = ArcSet::new(arcs).map_err(D::Error::custom)?;
        if let Some(t) = j.total {
            let t = parse_rational(&t).map_err(D::Error::custom)?;
            if t != set.total() {
                return Err(D::Error::custom("stated total disagrees with the arcs"));
            }
        }
        Ok(set)
    }
}

/// `ω̂(z, F)` for `z` in the closed disk, enclosing every point of the input ball.
pub fn hat_omega_ball(z: CBall, set: &ArcSet) -> Result<CBall> {
    let r = z.radius;
    if z.mid.norm() - r > 1.0 + 4.0 * EPS {
        return Err(Error::Domain(format!("|z| > 1 at z = {}", z.mid)));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let mut err = 0.0f64;
    for arc in &set.arcs {
        let (th1, th2) = (arc.theta1(), arc.theta2());
        let c1 = Complex64::from_polar(1.0, th1);
        let c2 = Complex64::from_polar(1.0, th2);
        let (n1, n2) = (z.mid - c1, z.mid - c2);
        let (d1, d2) = (n1.norm() - r - 8.0 * EPS, n2.norm() - r - 8.0 * EPS);
        if d1.min(d2) < ENDPOINT_GUARD {
            return Err(Error::Singular(format!("z = {} is within 2^-20 of an arc endpoint", z.mid)));
        }
        let alpha = 0.5 * (th2 - th1);
        let rot = Complex64::from_polar(1.0, -(alpha + 0.5 * PI));
        let u = rot * n2 / n1;
        let val = Complex64::new(0.5 + u.arg() / PI, -u.norm().ln() / PI);
        acc += val;
        let rel = 8.0 * EPS / d1 + 8.0 * EPS / d2 + 12.0 * EPS;
        err += rel / PI + 4.0 * EPS * val.norm();
        err += r / PI * (1.0 / d1 + 1.0 / d2);
    }
    err += acc.norm() * set.arcs.len() as f64 * 2.0 * EPS;
    Ok(CBall::new(acc, add_up(err, 0.0)))
}

pub fn hat_omega(z: Complex64, set: &ArcSet) -> Result<CBall> {
    hat_omega_ball(CBall::exact(z), set)
}

/// `ω(z, F)`, the real part of `ω̂`, for `|z| < 1`.
pub fn harmonic_measure(z: Complex64, set: &ArcSet) -> Result<CertifiedReal> {
    if z.norm() >= 1.0 {
        return Err(Error::Domain(format!("harmonic measure needs |z| < 1, got {z}")));
    }
    Ok(hat_omega(z, set)?.re())
}

/// The conjugate `ω̃(z, F) = -(1/π) Σ ln|(z - e^{iθ2})/(z - e^{iθ1})|`.
pub fn omega_tilde(z: Complex64, set: &ArcSet) -> Result<CertifiedReal> {
    if z.norm() > 1.0 {
        return Err(Error::Domain(format!("|z| > 1 at z = {z}")));
    }
    let mut acc = 0.0;
    let mut err = 0.0;
    for arc in &set.arcs {
        let d1 = (z - Complex64::from_polar(1.0, arc.theta1())).norm();
        let d2 = (z - Complex64::from_polar(1.0, arc.theta2())).norm();
        if d1.min(d2) < ENDPOINT_GUARD {
            return Err(Error::Singular(format!("z = {z} is within 2^-20 of an arc endpoint")));
        }
        let v = -(d2.ln() - d1.ln()) / PI;
        acc += v;
        err += (8.0 * EPS / d1 + 8.0 * EPS / d2) / PI + 4.0 * EPS * v.abs();
    }
    Ok(CertifiedReal::new(acc, add_up(err, 4.0 * EPS * f64::abs(acc))))
}

/// Maclaurin coefficients `b_0..=b_{n_max}` of `ω̂(·, F)`:
/// `b_0 = λ(F)/(2π)` and `b_n = Σ (e^{-inθ1} - e^{-inθ2}) / (πin)` for `n ≥ 1`.
pub fn hat_omega_taylor(set: &ArcSet, n_max: usize) -> Vec<CBall> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(CBall::new(Complex64::new(q_to_f64(&set.total()), 0.0), 2.0 * EPS));
    let pi_i = Complex64::new(0.0, PI);
    for n in 1..=n_max {
        let nf = n as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        for arc in &set.arcs {
            let (x1, x2) = (nf * arc.theta1(), nf * arc.theta2());
            acc += Complex64::from_polar(1.0, -x1) - Complex64::from_polar(1.0, -x2);
            err += (x1.abs() + x2.abs() + 8.0) * EPS;
        }
        let v = acc / (pi_i * nf);
        out.push(CBall::new(v, add_up(err / (PI * nf), 4.0 * EPS * v.norm())));
    }
    out
}

/// Poisson integral `(1/2π)∫_F (1-|z|²)/|e^{iθ}-z|² dθ` by adaptive quadrature.
pub fn poisson_oracle(z: Complex64, set: &ArcSet, tol: f64) -> Result<CertifiedReal> {
    if z.norm() >= 1.0 - 1.0 / 1024.0 {
        return Err(Error::Domain(format!("Poisson oracle needs |z| < 1 - 2^-10, got {z}")));
    }
    let k = 1.0 - z.norm_sqr();
    let kernel = |th: f64| k / (Complex64::from_polar(1.0, th) - z).norm_sqr();
    let per_arc = tol / set.arcs.len() as f64 * 2.0 * PI;
    let mut total = CertifiedReal::exact(0.0);
    for arc in &set.arcs {
        let opts = QuadOptions { abs_tol: per_arc, max_panels: 100_000 };
        total = total + integrate(kernel, arc.theta1(), arc.theta2(), &[z.arg()], opts)?;
    }
    Ok(total.scale(1.0 / (2.0 * PI)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn single(a: Q, b: Q) -> ArcSet {
        ArcSet::new(vec![Arc::new(a, b).unwrap()]).unwrap()
    }

    #[test]
    fn value_at_origin_is_normalized_length() {
        let f = single(q(-1, 4), q(1, 4));
        let w = harmonic_measure(Complex64::new(0.0, 0.0), &f).unwrap();
        assert!(w.contains(0.25) && w.radius < 1e-13);
        let f = single(q(-9, 10), q(7, 10));
        assert!(hat_omega(Complex64::new(0.0, 0.0), &f).unwrap().contains(Complex64::new(0.8, 0.0)));
    }

    #[test]
    fn two_arcs_add() {
        let f = ArcSet::new(vec![Arc::new(q(-1, 2), q(-1, 4)).unwrap(), Arc::new(q(1, 8), q(1, 2)).unwrap()]).unwrap();
        assert_eq!(f.total(), q(5, 16));
        assert!(harmonic_measure(Complex64::new(0.0, 0.0), &f).unwrap().contains(5.0 / 16.0));
    }

    #[test]
    fn matches_poisson_integral() {
        let f = single(q(-3, 10), q(3, 10));
        let z = Complex64::new(0.5, 0.0);
        let a = harmonic_measure(z, &f).unwrap();
        let b = poisson_oracle(z, &f, 1e-11).unwrap();
        assert!((a.value - b.value).abs() < 1e-8, "{a} vs {b}");
    }

    #[test]
    fn long_arc_has_no_branch_jump() {
        let f = single(q(-9, 10), q(9, 10));
        for &z in &[Complex64::new(-0.9, 0.01), Complex64::new(-0.9, -0.01), Complex64::new(0.3, 0.8)] {
            let a = harmonic_measure(z, &f).unwrap();
            let b = poisson_oracle(z, &f, 1e-11).unwrap();
            assert!((a.value - b.value).abs() < 1e-8, "{z}: {a} vs {b}");
        }
    }

    #[test]
    fn conjugate_matches_imaginary_part() {
        let f = single(q(-1, 5), q(2, 5));
        let z = Complex64::new(0.3, -0.4);
        let h = hat_omega(z, &f).unwrap();
        let t = omega_tilde(z, &f).unwrap();
        assert!((h.mid.im - t.value).abs() < 1e-14);
        assert!(omega_tilde(Complex64::new(0.0, 0.0), &f).unwrap().contains(0.0));
    }

    #[test]
    fn rejects_endpoints_and_outside() {
        let f = single(q(-1, 4), q(1, 4));
        let e = Complex64::from_polar(1.0, PI / 4.0);
        assert!(matches!(hat_omega(e, &f), Err(Error::Singular(_))));
        assert!(matches!(harmonic_measure(Complex64::new(1.0, 0.0), &f), Err(Error::Domain(_))));
        assert!(matches!(hat_omega(Complex64::new(1.5, 0.0), &f), Err(Error::Domain(_))));
    }

    #[test]
    fn taylor_symmetric_arc_is_imaginary_sine() {
        let f = single(q(-1, 3), q(1, 3));
        let b = hat_omega_taylor(&f, 8);
        assert!(b[0].contains(Complex64::new(1.0 / 3.0, 0.0)));
        let alpha = PI / 3.0;
        for (n, bn) in b.iter().enumerate().skip(1) {
            // (e^{inα} - e^{-inα})/(πin) = 2 sin(nα)/(πn)
            let expect = 2.0 * (n as f64 * alpha).sin() / (PI * n as f64);
            assert!((bn.mid.re - expect).abs() < 1e-14, "n={n}");
            assert!(bn.mid.im.abs() < 1e-14);
        }
    }

    #[test]
    fn arc_validation_and_json() {
        assert!(Arc::new(q(1, 2), q(1, 4)).is_err());
        assert!(Arc::new(q(-1, 1), q(0, 1)).is_err());
        assert!(ArcSet::new(vec![Arc::new(q(0, 1), q(1, 2)).unwrap(), Arc::new(q(1, 2), q(3, 4)).unwrap()]).is_err());
        let f = single(q(-1, 4), q(1, 4));
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"schema":"v1","arcs":[{"t1":"-1/4","t2":"1/4"}],"total":"1/4"}"#);
        let back: ArcSet = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<ArcSet>(r#"{"arcs":[{"t1":"-1/4","t2":"1/4"}],"total":"1/3"}"#).is_err());
    }
}
