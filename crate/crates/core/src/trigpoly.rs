//! Trigonometric polynomials with exact rational coefficients.
//!
//! `TrigPoly` is the carrier for every function in the crate: `e_n`, partial
//! sums `S_N`, Cesàro means `σ_N`, the divergence polynomials and the Cauchy
//! name terms. Coefficients follow the reconstructing convention
//! `c_n(f) = (1/2π)∫ f(t) e^{-int} dt`, so `c_n(e_m) = δ_{nm}`, and all norms use
//! the normalized measure `dt/2π`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::ball::{add_up, CBall, CertifiedReal, EPS};
use crate::error::{Error, Result};
use crate::intervals::IntervalSet;
use crate::quad::{integrate, QuadOptions};
use crate::rational::{format_rational, parse_rational, q_to_f64, QComplex, Q};

/// Floating-point image of the coefficients, used by all evaluators.
#[derive(Clone, Debug, Default)]
struct Numeric {
    lo: i64,
    dense: Vec<Complex64>,
    /// Upper bound on Σ|c_n|.
    abs_sum: f64,
    /// Upper bound on Σ|n||c_n|, the Bernstein bound on ‖p′‖∞.
    deriv_sum: f64,
    /// Upper bound on Σ|n - lo||c_n|.
    shifted_deriv_sum: f64,
}

#[derive(Clone)]
pub struct TrigPoly {
    coeffs: BTreeMap<i64, QComplex>,
    num: Numeric,
}

impl PartialEq for TrigPoly {
    fn eq(&self, o: &Self) -> bool {
        self.coeffs == o.coeffs
    }
}
impl Eq for TrigPoly {}

impl fmt::Debug for TrigPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.coeffs.iter().map(|(n, c)| (n, c.to_string()))).finish()
    }
}

impl Default for TrigPoly {
    fn default() -> Self {
        Self::zero()
    }
}

impl TrigPoly {
    fn from_map(mut coeffs: BTreeMap<i64, QComplex>) -> Self {
        coeffs.retain(|_, c| !c.is_zero());
        let num = numeric(&coeffs);
        Self { coeffs, num }
    }

    pub fn zero() -> Self {
        Self::from_map(BTreeMap::new())
    }

    /// `c·e_n`.
    pub fn monomial(n: i64, c: QComplex) -> Self {
        Self::from_map(BTreeMap::from([(n, c)]))
    }

    /// The exponential `e_n(t) = e^{int}`.
    pub fn e(n: i64) -> Self {
        Self::monomial(n, QComplex::one())
    }

    /// Sums duplicate frequencies and drops zero coefficients.
    pub fn from_coeffs<I: IntoIterator<Item = (i64, QComplex)>>(it: I) -> Self {
        let mut m: BTreeMap<i64, QComplex> = BTreeMap::new();
        for (n, c) in it {
            let e = m.entry(n).or_insert_with(QComplex::zero);
            *e = &*e + &c;
        }
        Self::from_map(m)
    }

    /// Rational polynomial from float coefficients rounded to the grid 2^-bits.
    pub fn from_f64_dyadic<I: IntoIterator<Item = (i64, Complex64)>>(it: I, bits: u32) -> Self {
        Self::from_coeffs(it.into_iter().map(|(n, z)| (n, QComplex::from_c64_dyadic(z, bits))))
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (i64, &QComplex)> + '_ {
        self.coeffs.iter().map(|(n, c)| (*n, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `c_n(p)`; zero for absent frequencies.
    pub fn fourier_coeff(&self, n: i64) -> QComplex {
        self.coeffs.get(&n).cloned().unwrap_or_else(QComplex::zero)
    }

    /// Smallest `d` with `S_d(p) = p`.
    pub fn degree(&self) -> u64 {
        self.coeffs.keys().map(|n| n.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn is_analytic(&self) -> bool {
        self.coeffs.keys().all(|&n| n >= 0)
    }

    /// Lowest and highest frequency with a nonzero coefficient.
    pub fn support(&self) -> Option<(i64, i64)> {
        Some((*self.coeffs.keys().next()?, *self.coeffs.keys().next_back()?))
    }

    /// Upper bound on Σ|c_n| (hence on ‖p‖∞).
    pub fn abs_sum(&self) -> f64 {
        self.num.abs_sum
    }

    /// Upper bound on Σ|n||c_n| (hence on ‖p′‖∞).
    pub fn derivative_bound(&self) -> f64 {
        self.num.deriv_sum
    }

    pub fn partial_sum(&self, n: u64) -> Self {
        Self::from_map(
            self.coeffs
                .iter()
                .filter(|(k, _)| k.unsigned_abs() <= n)
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        )
    }

    /// Frequencies in `[lo, hi]`.
    pub fn band(&self, lo: i64, hi: i64) -> Self {
        Self::from_map(self.coeffs.range(lo..=hi).map(|(k, c)| (*k, c.clone())).collect())
    }

    /// `σ_N(p)`: coefficient `c_n` damped by `1 - |n|/(N+1)` for `|n| ≤ N`.
    pub fn cesaro_mean(&self, n: u64) -> Self {
        let den = Q::from_integer((n + 1).into());
        Self::from_map(
            self.coeffs
                .iter()
                .filter(|(k, _)| k.unsigned_abs() <= n)
                .map(|(k, c)| {
                    let w = Q::one() - Q::from_integer(k.unsigned_abs().into()) / &den;
                    (*k, c.scale(&w))
                })
                .collect(),
        )
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut m = self.coeffs.clone();
        for (n, c) in &o.coeffs {
            let e = m.entry(*n).or_insert_with(QComplex::zero);
            *e = &*e + c;
        }
        Self::from_map(m)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        Self::from_map(self.coeffs.iter().map(|(n, c)| (*n, -c)).collect())
    }

    pub fn scale(&self, s: &QComplex) -> Self {
        Self::from_map(self.coeffs.iter().map(|(n, c)| (*n, c * s)).collect())
    }

    pub fn scale_q(&self, s: &Q) -> Self {
        Self::from_map(self.coeffs.iter().map(|(n, c)| (*n, c.scale(s))).collect())
    }

    /// `e_k · p`.
    pub fn shift(&self, k: i64) -> Self {
        Self::from_map(self.coeffs.iter().map(|(n, c)| (n + k, c.clone())).collect())
    }

    /// Exact product (convolution of coefficient sequences).
    pub fn mul(&self, o: &Self) -> Self {
        let mut m: BTreeMap<i64, QComplex> = BTreeMap::new();
        for (a, ca) in &self.coeffs {
            for (b, cb) in &o.coeffs {
                let e = m.entry(a + b).or_insert_with(QComplex::zero);
                *e = &*e + &(ca * cb);
            }
        }
        Self::from_map(m)
    }

    /// The pointwise conjugate `t ↦ conj(p(t))`.
    pub fn conj_fn(&self) -> Self {
        Self::from_map(self.coeffs.iter().map(|(n, c)| (-n, c.conj())).collect())
    }

    /// Pointwise real part `(p + p̄)/2`.
    pub fn real_part(&self) -> Self {
        self.add(&self.conj_fn()).scale_q(&Q::new(1.into(), 2.into()))
    }

    /// Pointwise imaginary part `(p - p̄)/(2i)`.
    pub fn imag_part(&self) -> Self {
        let minus_half_i = QComplex::new(Q::zero(), Q::new((-1).into(), 2.into()));
        self.sub(&self.conj_fn()).scale(&minus_half_i)
    }

    /// Σ|c_n|², which equals ‖p‖₂² under the normalized measure.
    pub fn l2_norm_sq(&self) -> Q {
        self.coeffs.values().map(QComplex::norm_sqr).fold(Q::zero(), |a, b| a + b)
    }

    /// Evaluates at an exactly known float point.
    pub fn eval(&self, t: f64) -> CBall {
        self.eval_ball(CertifiedReal::exact(t))
    }

    /// Encloses `p(t)` for every `t` in the input ball.
    pub fn eval_ball(&self, t: CertifiedReal) -> CBall {
        let num = &self.num;
        if num.dense.is_empty() {
            return CBall::exact(Complex64::new(0.0, 0.0));
        }
        let x = t.value;
        let (s, c) = x.sin_cos();
        let w = Complex64::new(c, s);
        let mut acc = Complex64::new(0.0, 0.0);
        for d in num.dense.iter().rev() {
            acc = acc * w + d;
        }
        let (s0, c0) = (num.lo as f64 * x).sin_cos();
        let val = acc * Complex64::new(c0, s0);
        let len = num.dense.len() as f64;
        let horner = num.abs_sum * (8.0 * len + 8.0 + (num.lo as f64 * x).abs()) * EPS;
        let power = num.shifted_deriv_sum * 3.0 * EPS;
        let input = num.deriv_sum * t.radius;
        CBall::new(val, add_up(add_up(horner, power), input))
    }

    /// Parallel evaluation at many exact points, order preserved.
    pub fn eval_many(&self, ts: &[f64]) -> Vec<CBall> {
        ts.par_iter().map(|&t| self.eval(t)).collect()
    }

    /// Individual terms `c_n e^{int}` in increasing `n`, each with its own error bound.
    pub fn terms_at(&self, t: f64) -> Vec<(i64, Complex64, f64)> {
        self.coeffs
            .iter()
            .map(|(n, c)| {
                let z = c.to_c64();
                let (s, co) = (*n as f64 * t).sin_cos();
                let v = z * Complex64::new(co, s);
                let err = z.norm() * ((*n as f64 * t).abs() + 6.0) * EPS;
                (*n, v, err)
            })
            .collect()
    }

    /// `((1/2π)∫|p|^exp dt)^{1/exp}` enclosed within `tol`.
    pub fn lp_norm(&self, exp: &Q, tol: f64) -> Result<CertifiedReal> {
        if exp < &Q::one() {
            return Err(Error::Domain(format!("L^p exponent {} < 1", format_rational(exp))));
        }
        if !(tol > 0.0) {
            return Err(Error::Domain("tolerance must be positive".into()));
        }
        if self.is_zero() {
            return Ok(CertifiedReal::exact(0.0));
        }
        if exp == &Q::from_integer(2.into()) {
            return Ok(CertifiedReal::from_q(&self.l2_norm_sq()).sqrt());
        }
        let e = q_to_f64(exp);
        let panels = 4 * (self.degree() as usize + 1);
        let h = 2.0 * std::f64::consts::PI / panels as f64;
        let breaks: Vec<f64> = (1..panels).map(|j| -std::f64::consts::PI + j as f64 * h).collect();
        let f = |t: f64| self.eval(t).mid.norm().powf(e);
        let run = |abs_tol: f64| {
            integrate(f, -std::f64::consts::PI, std::f64::consts::PI, &breaks, QuadOptions { abs_tol, max_panels: 200_000 })
                .map(|v| v.scale(1.0 / (2.0 * std::f64::consts::PI)))
        };
        let finish = |mean: CertifiedReal| mean.powf(1.0 / e);
        let rough = run(1e-6).or_else(|err| match err {
            Error::QuadratureBudget { best } => Ok(best),
            other => Err(other),
        })?;
        // d(x^{1/e})/dx = x^{1/e - 1}/e; pick the integral tolerance from it.
        let slope = rough.value.max(1e-300).powf(1.0 / e - 1.0) / e;
        let abs_tol = (0.25 * tol / slope.max(1e-300)).min(1e-6) * 2.0 * std::f64::consts::PI;
        match run(abs_tol) {
            Ok(mean) => {
                let out = finish(mean);
                if out.radius <= tol {
                    Ok(out)
                } else {
                    Err(Error::QuadratureBudget { best: out })
                }
            }
            Err(Error::QuadratureBudget { best }) => Err(Error::QuadratureBudget { best: finish(best) }),
            Err(other) => Err(other),
        }
    }

    /// Encloses `max_t |p(t)|` within roughly `tol`.
    ///
    /// Samples a uniform grid and bounds the gap with Bernstein's inequality for
    /// the second derivative of `|p|²`, whose frequencies lie in `[-W, W]` with
    /// `W` the support width. At a maximizer the first derivative vanishes, so
    /// the nearest sample undershoots by at most a factor `1 - W²h²/8`.
    pub fn sup_norm_certificate(&self, tol: f64) -> CertifiedReal {
        let Some((lo, hi)) = self.support() else {
            return CertifiedReal::exact(0.0);
        };
        if lo == hi {
            return CertifiedReal::from_q(&self.coeffs[&lo].norm_sqr()).sqrt();
        }
        let width = (hi - lo) as f64;
        let s = self.num.abs_sum.max(1e-300);
        let x = (tol / s).clamp(1e-16, 0.5);
        let h = (8.0 * x).sqrt() / width;
        let m = ((2.0 * std::f64::consts::PI / h).ceil() as usize).max(2);
        let step = 2.0 * std::f64::consts::PI / m as f64;
        let (lower, upper) = (0..m)
            .into_par_iter()
            .map(|j| {
                let a = self.eval(-std::f64::consts::PI + j as f64 * step).abs();
                (a.lo().max(0.0), a.hi())
            })
            .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
        let hstep = step;
        let factor = 1.0 - width * width * hstep * hstep / 8.0;
        let upper = upper / factor.sqrt() * (1.0 + 8.0 * EPS);
        CertifiedReal::hull(lower, upper)
    }

    /// Certified lower bound on `min_{t∈G} Re p(t)`, sampling with spacing small
    /// enough that the second-order Bernstein correction is at most `tol`.
    pub fn min_real_part_on(&self, set: &IntervalSet, tol: f64) -> CertifiedReal {
        let d = self.degree() as f64;
        let s = self.num.abs_sum;
        let h = if d == 0.0 { 1.0 } else { (8.0 * tol / (d * d * s.max(1e-300))).sqrt() };
        let correction = d * d * s * h * h / 8.0;
        let samples = sample_set(set, h);
        let lows: Vec<(f64, f64)> = samples
            .par_iter()
            .map(|t| {
                let v = self.eval_ball(*t).re();
                (v.lo(), v.value)
            })
            .collect();
        let min_lo = lows.iter().map(|x| x.0).fold(f64::INFINITY, f64::min);
        let min_val = lows.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
        let bound = min_lo - correction * (1.0 + 4.0 * EPS);
        CertifiedReal::hull(bound, min_val.max(bound))
    }

    /// Certified lower bound on `min_{t∈G} |p(t)|` via samples of `|p|²`.
    pub fn min_modulus_on(&self, set: &IntervalSet, tol: f64) -> CertifiedReal {
        let Some((lo, hi)) = self.support() else {
            return CertifiedReal::exact(0.0);
        };
        let w = (hi - lo) as f64;
        let s2 = self.num.abs_sum * self.num.abs_sum;
        let h = if w == 0.0 { 1.0 } else { (8.0 * tol / (w * w * s2.max(1e-300))).sqrt() };
        let correction = w * w * s2 * h * h / 8.0;
        let samples = sample_set(set, h);
        let vals: Vec<(f64, f64)> = samples
            .par_iter()
            .map(|t| {
                let a = self.eval_ball(*t).abs();
                let lo = a.lo().max(0.0);
                (lo * lo * (1.0 - 4.0 * EPS), a.value)
            })
            .collect();
        let min_sq = vals.iter().map(|x| x.0).fold(f64::INFINITY, f64::min);
        let min_val = vals.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
        let bound_sq = (min_sq - correction * (1.0 + 4.0 * EPS)).max(0.0);
        let bound = bound_sq.sqrt() * (1.0 - 2.0 * EPS);
        CertifiedReal::hull(bound, min_val.max(bound))
    }
}

/// Sample points covering each interval: both endpoints (as enclosures of the
/// exact endpoints) and a uniform interior grid with spacing at most `h`.
fn sample_set(set: &IntervalSet, h: f64) -> Vec<CertifiedReal> {
    let mut out = Vec::new();
    for (a, b) in set.intervals() {
        let (ab, bb) = (a.to_ball(), b.to_ball());
        let (x0, x1) = (ab.value, bb.value);
        let k = (((x1 - x0) / h).ceil() as usize).max(1);
        out.push(ab);
        for j in 1..k {
            out.push(CertifiedReal::exact(x0 + (x1 - x0) * j as f64 / k as f64));
        }
        out.push(bb);
    }
    out
}

fn numeric(coeffs: &BTreeMap<i64, QComplex>) -> Numeric {
    let Some((&lo, _)) = coeffs.iter().next() else {
        return Numeric::default();
    };
    let hi = *coeffs.keys().next_back().expect("nonempty");
    let mut dense = vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize];
    let (mut abs_sum, mut deriv_sum, mut shifted) = (0.0f64, 0.0f64, 0.0f64);
    for (n, c) in coeffs {
        let z = c.to_c64();
        dense[(n - lo) as usize] = z;
        let a = z.norm() * (1.0 + 4.0 * EPS);
        abs_sum += a;
        deriv_sum += n.unsigned_abs() as f64 * a;
        shifted += (n - lo) as f64 * a;
    }
    let grow = 1.0 + (coeffs.len() as f64 + 4.0) * EPS;
    Numeric {
        lo,
        dense,
        abs_sum: abs_sum * grow,
        deriv_sum: deriv_sum * grow,
        shifted_deriv_sum: shifted * grow,
    }
}

/// The Fejér kernel `F_N(x) = sin²(Nx/2) / (N sin²(x/2))`, with the removable
/// singularity at multiples of 2π evaluated by its Taylor expansion.
pub fn fejer_kernel(n: u64, x: f64) -> f64 {
    assert!(n >= 1, "Fejér kernel needs N >= 1");
    let two_pi = 2.0 * std::f64::consts::PI;
    let r = x - two_pi * (x / two_pi).round();
    let nf = n as f64;
    if r.abs() < 2f64.powi(-30) {
        return nf * (1.0 - (nf * nf - 1.0) * r * r / 12.0);
    }
    let num = (nf * r / 2.0).sin();
    let den = (r / 2.0).sin();
    (num * num) / (nf * den * den)
}

#[derive(Serialize, Deserialize)]
struct CoeffJson {
    n: i64,
    re: String,
    im: String,
}

#[derive(Serialize, Deserialize)]
struct TrigPolyJson {
    #[serde(default = "schema_v1")]
    schema: String,
    coeffs: Vec<CoeffJson>,
}

fn schema_v1() -> String {
    "v1".into()
}

impl Serialize for TrigPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TrigPolyJson {
            schema: schema_v1(),
            coeffs: self
                .coeffs
                .iter()
                .map(|(n, c)| CoeffJson { n: *n, re: format_rational(&c.re), im: format_rational(&c.im) })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TrigPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = TrigPolyJson::deserialize(d)?;
        let mut out = Vec::with_capacity(j.coeffs.len());
        for c in j.coeffs {
            let re = parse_rational(&c.re).map_err(serde::de::Error::custom)?;
            let im = parse_rational(&c.im).map_err(serde::de::Error::custom)?;
            out.push((c.n, QComplex::new(re, im)));
        }
        Ok(TrigPoly::from_coeffs(out))
    }
}

/// Random rational polynomial with `|n| ≤ degree` and coefficient parts `k/denom`,
/// `|k| ≤ denom`. Used by the verification suites and tests.
pub fn random_trig_poly<R: rand::Rng>(rng: &mut R, degree: i64, denom: i64) -> TrigPoly {
    let mut out = Vec::new();
    for n in -degree..=degree {
        if !rng.gen_bool(0.7) {
            continue;
        }
        let re = Q::new(rng.gen_range(-denom..=denom).into(), denom.into());
        let im = Q::new(rng.gen_range(-denom..=denom).into(), denom.into());
        out.push((n, QComplex::new(re, im)));
    }
    TrigPoly::from_coeffs(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn half() -> Q {
        q(1, 2)
    }

    #[test]
    fn constant_and_unimodular_eval() {
        let v = TrigPoly::e(0).eval(1.3);
        assert!(v.contains(Complex64::new(1.0, 0.0)));
        assert!(v.radius < 1e-14);
        let v = TrigPoly::e(1).eval(std::f64::consts::FRAC_PI_2);
        assert!(v.contains(Complex64::new(0.0, 1.0)));
    }

    #[test]
    fn eval_ball_propagates_input_radius() {
        let p = TrigPoly::e(3);
        let v = p.eval_ball(CertifiedReal::new(0.5, 1e-3));
        assert!(v.radius >= 3e-3);
        assert!(v.contains(Complex64::from_polar(1.0, 3.0 * 0.5009)));
    }

    #[test]
    fn coefficients_and_truncation() {
        let e3 = TrigPoly::e(3);
        assert_eq!(e3.fourier_coeff(3), QComplex::one());
        assert_eq!(e3.fourier_coeff(2), QComplex::zero());
        assert!(TrigPoly::e(1).partial_sum(0).is_zero());
        let p = TrigPoly::e(-2).add(&TrigPoly::e(-1)).add(&TrigPoly::e(0));
        assert_eq!(p.partial_sum(p.degree()), p);
        assert_eq!(p.partial_sum(1), TrigPoly::e(-1).add(&TrigPoly::e(0)));
        assert_eq!(p.degree(), 2);
        assert!(!p.is_analytic());
        assert!(TrigPoly::e(4).is_analytic());
    }

    #[test]
    fn parseval_examples() {
        let n = TrigPoly::e(5).lp_norm(&q(2, 1), 1e-12).unwrap();
        assert!(n.contains(1.0) && n.radius < 1e-12);
        let n = TrigPoly::e(0).add(&TrigPoly::e(1)).lp_norm(&q(2, 1), 1e-12).unwrap();
        assert!(n.contains(std::f64::consts::SQRT_2) && n.radius < 1e-12);
    }

    #[test]
    fn lp_norm_rejects_bad_exponent() {
        assert!(matches!(TrigPoly::e(0).lp_norm(&half(), 1e-6), Err(Error::Domain(_))));
        assert!(TrigPoly::zero().lp_norm(&q(3, 1), 1e-6).unwrap().contains(0.0));
    }

    #[test]
    fn cesaro_examples() {
        for n in 0..5 {
            assert_eq!(TrigPoly::e(0).cesaro_mean(n), TrigPoly::e(0));
        }
        assert_eq!(TrigPoly::e(1).cesaro_mean(1), TrigPoly::monomial(1, QComplex::real(half())));
    }

    #[test]
    fn fejer_kernel_values() {
        for &x in &[0.1, 1.0, -2.5, 3.0] {
            assert!((fejer_kernel(1, x) - 1.0).abs() < 1e-14);
        }
        for n in 1..20 {
            assert_eq!(fejer_kernel(n, 0.0), n as f64);
            assert!((fejer_kernel(n, 2.0 * std::f64::consts::PI) - n as f64).abs() < 1e-9);
        }
        assert!(fejer_kernel(7, 1e-12) > 6.999);
    }

    #[test]
    fn sup_norm_examples() {
        let s = TrigPoly::e(7).sup_norm_certificate(1e-10);
        assert!(s.contains(1.0) && s.radius <= 1e-10);
        assert_eq!(TrigPoly::zero().sup_norm_certificate(1e-10), CertifiedReal::exact(0.0));
        let cos = TrigPoly::e(1).add(&TrigPoly::e(-1)).scale_q(&half());
        let s = cos.sup_norm_certificate(1e-6);
        assert!(s.contains(1.0), "{s}");
        assert!(s.radius <= 1e-6);
    }

    #[test]
    fn real_and_imag_parts() {
        let p = TrigPoly::monomial(2, QComplex::new(q(1, 3), q(2, 5)));
        let t = 0.37;
        let v = p.eval(t).mid;
        assert!((p.real_part().eval(t).mid.re - v.re).abs() < 1e-14);
        assert!((p.imag_part().eval(t).mid.re - v.im).abs() < 1e-14);
        assert!(p.imag_part().eval(t).mid.im.abs() < 1e-14);
    }

    #[test]
    fn product_constant_term_is_parseval() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_trig_poly(&mut rng, 6, 7);
        let prod = p.mul(&p.conj_fn());
        assert_eq!(prod.fourier_coeff(0), QComplex::real(p.l2_norm_sq()));
    }

    #[test]
    fn min_real_part_on_interval() {
        let cos = TrigPoly::e(1).add(&TrigPoly::e(-1)).scale_q(&half());
        let g = IntervalSet::from_rad(&[(q(-1, 2), q(1, 2))]).unwrap();
        let m = cos.min_real_part_on(&g, 1e-6);
        assert!(m.lo() <= 0.5f64.cos());
        assert!(m.lo() >= 0.5f64.cos() - 2e-6);
        let mm = cos.min_modulus_on(&g, 1e-6);
        assert!(mm.lo() <= 0.5f64.cos() && mm.lo() >= 0.5f64.cos() - 1e-5);
    }

    #[test]
    fn json_schema() {
        let p = TrigPoly::monomial(-2, QComplex::real(q(1, 3)));
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"schema":"v1","coeffs":[{"n":-2,"re":"1/3","im":"0/1"}]}"#);
        let back: TrigPoly = serde_json::from_str(r#"{"coeffs":[{"n":-2,"re":"1/3","im":"0"}]}"#).unwrap();
        assert_eq!(back, p);
    }
}
