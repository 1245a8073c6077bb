//! Cauchy names: sequences of rational trigonometric polynomials `τ_n` with
//! `‖τ_n - τ_{n+1}‖_p < 2^{-(n+1)}`, their canonical values at a point, and the
//! moduli of almost-everywhere convergence attached to them.

use std::fmt;
use std::sync::{Arc, Mutex};

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::ball::{CBall, CertifiedReal};
use crate::error::{Error, Result};
use crate::maximal::{superlevel_measure, AeModulus, Provenance};
use crate::rational::{format_rational, parse_rational, pow2, q_to_f64, QComplex, Q};
use crate::trigpoly::TrigPoly;

/// Built-in generator families, addressable from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Family {
    /// `τ_n = poly` for every `n`.
    Constant { poly: TrigPoly },
    /// `τ_n = Σ_{j ≤ n} 2^{-j-1} e_j`.
    Geometric,
    /// `τ_n = S_{stride·n + offset}(poly)`.
    PartialSums { poly: TrigPoly, stride: u64, offset: u64 },
}

impl Family {
    pub fn term(&self, n: usize) -> TrigPoly {
        match self {
            Family::Constant { poly } => poly.clone(),
            Family::Geometric => TrigPoly::from_coeffs((0..=n as i64).map(|j| (j, QComplex::real(pow2(-j - 1))))),
            Family::PartialSums { poly, stride, offset } => poly.partial_sum(stride * n as u64 + offset),
        }
    }
}

type Generator = dyn Fn(usize) -> TrigPoly + Send + Sync;

#[derive(Clone)]
enum Source {
    /// Finite list, continued by repeating its last entry.
    Explicit(Vec<TrigPoly>),
    Family(Family),
    Generator(Arc<Generator>),
}

struct SeqInner {
    source: Source,
    memo: Mutex<Vec<Arc<TrigPoly>>>,
}

/// Lazily materialized, memoized sequence of polynomials.
#[derive(Clone)]
pub struct PolySequence {
    inner: Arc<SeqInner>,
}

impl fmt::Debug for PolySequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.inner.memo.lock().map(|m| m.len()).unwrap_or(0);
        f.debug_struct("PolySequence").field("materialized", &n).finish_non_exhaustive()
    }
}

impl PolySequence {
    fn from_source(source: Source) -> Self {
        Self { inner: Arc::new(SeqInner { source, memo: Mutex::new(Vec::new()) }) }
    }

    pub fn explicit(terms: Vec<TrigPoly>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Domain("explicit sequence needs at least one term".into()));
        }
        Ok(Self::from_source(Source::Explicit(terms)))
    }

    pub fn family(f: Family) -> Self {
        Self::from_source(Source::Family(f))
    }

    pub fn generator<F: Fn(usize) -> TrigPoly + Send + Sync + 'static>(f: F) -> Self {
        Self::from_source(Source::Generator(Arc::new(f)))
    }

    pub fn get(&self, n: usize) -> Arc<TrigPoly> {
        let mut memo = self.inner.memo.lock().expect("sequence memo poisoned");
        while memo.len() <= n {
            let i = memo.len();
            let t = match &self.inner.source {
                Source::Explicit(v) => v[i.min(v.len() - 1)].clone(),
                Source::Family(f) => f.term(i),
                Source::Generator(g) => g(i),
            };
            memo.push(Arc::new(t));
        }
        memo[n].clone()
    }
}

/// A Cauchy name in `L^p`. The rate is checked for every consecutive pair as
/// terms are materialized; a violation surfaces as [`Error::NameRate`].
pub struct CauchyName {
    seq: PolySequence,
    pub p: Q,
    steps: Mutex<Vec<CertifiedReal>>,
}

impl fmt::Debug for CauchyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CauchyName").field("p", &format_rational(&self.p)).field("seq", &self.seq).finish()
    }
}

impl CauchyName {
    pub fn new(seq: PolySequence, p: Q) -> Result<Self> {
        if p < Q::one() {
            return Err(Error::Domain("exponent must be at least 1".into()));
        }
        Ok(Self { seq, p, steps: Mutex::new(Vec::new()) })
    }

    pub fn sequence(&self) -> &PolySequence {
        &self.seq
    }

    /// Certified `‖τ_i - τ_{i+1}‖_p`, validating the rate through index `i`.
    pub fn step_norm(&self, i: usize) -> Result<CertifiedReal> {
        let mut steps = self.steps.lock().expect("name memo poisoned");
        while steps.len() <= i {
            let j = steps.len();
            let d = self.seq.get(j + 1).sub(&self.seq.get(j));
            let bound = pow2(-(j as i64) - 1);
            let two = Q::from_integer(2.into());
            let (norm, ok) = if self.p == two {
                let sq = d.l2_norm_sq();
                let ok = sq < &bound * &bound;
                (CertifiedReal::from_q(&sq).sqrt(), ok)
            } else {
                let tol = q_to_f64(&bound) * 1e-3;
                let n = match d.lp_norm(&self.p, tol) {
                    Ok(v) => v,
                    Err(Error::QuadratureBudget { best }) => best,
                    Err(e) => return Err(e),
                };
                (n, n.hi() < q_to_f64(&bound))
            };
            if !ok {
                return Err(Error::NameRate { index: j, next: j + 1, distance: norm.value, bound: q_to_f64(&bound) });
            }
            steps.push(norm);
        }
        Ok(steps[i])
    }

    /// `τ_n`, after checking the rate on every pair up to it.
    pub fn term(&self, n: usize) -> Result<Arc<TrigPoly>> {
        if n > 0 {
            self.step_norm(n - 1)?;
        }
        Ok(self.seq.get(n))
    }
}

#[derive(Serialize, Deserialize)]
struct CauchyNameJson {
    #[serde(default = "schema_v1")]
    schema: String,
    p: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    terms: Option<Vec<TrigPoly>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    family: Option<Family>,
}

fn schema_v1() -> String {
    "v1".into()
}

impl CauchyName {
    pub fn from_json(s: &str) -> Result<Self> {
        let j: CauchyNameJson = serde_json::from_str(s)?;
        let p = parse_rational(&j.p)?;
        let seq = match (j.terms, j.family) {
            (Some(t), None) => PolySequence::explicit(t)?,
            (None, Some(f)) => PolySequence::family(f),
            _ => return Err(Error::Parse("a name needs exactly one of \"terms\" or \"family\"".into())),
        };
        CauchyName::new(seq, p)
    }

    /// JSON for names backed by an explicit list or a built-in family.
    pub fn to_json(&self) -> Option<String> {
        let (terms, family) = match &self.seq.inner.source {
            Source::Explicit(v) => (Some(v.clone()), None),
            Source::Family(f) => (None, Some(f.clone())),
            Source::Generator(_) => return None,
        };
        serde_json::to_string(&CauchyNameJson { schema: schema_v1(), p: format_rational(&self.p), terms, family }).ok()
    }
}

/// `η(k, m) = ⌈((m+1)/p + k + 1)/2⌉`, a modulus of almost-everywhere convergence
/// for the even subsequence `τ_{2n}` of a Cauchy name in `L^p`.
pub fn subsequence_modulus(p: &Q) -> Result<AeModulus> {
    if p < &Q::one() {
        return Err(Error::Domain("exponent must be at least 1".into()));
    }
    let p = p.clone();
    Ok(AeModulus::from_fn(
        move |k, m| {
            let x = (Q::from_integer((m + 1).into()) / &p + Q::from_integer((k + 1).into())) / Q::from_integer(2.into());
            x.ceil().to_integer().try_into().unwrap_or(u64::MAX)
        },
        Provenance::Subsequence,
    ))
}

#[derive(Clone, Copy, Debug)]
pub struct CanonicalValue {
    /// `τ_{2·depth}(t)`.
    pub estimate: CBall,
    /// `max |τ_{2i}(t) - τ_{2j}(t)|` over `⌈depth/2⌉ ≤ i, j ≤ depth`.
    pub oscillation: f64,
}

/// Estimate of the value a name assigns at `t`. No limit is claimed: the even
/// subsequence converges almost everywhere, not at every point.
pub fn canonical_value(name: &CauchyName, t: &Q, depth: usize) -> Result<CanonicalValue> {
    if depth < 2 {
        return Err(Error::Domain("depth must be at least 2".into()));
    }
    let tb = CertifiedReal::from_q(t);
    let lo = depth.div_ceil(2);
    let mut vals = Vec::with_capacity(depth - lo + 1);
    for i in lo..=depth {
        vals.push(name.term(2 * i)?.eval_ball(tb));
    }
    let mut osc: f64 = 0.0;
    for a in &vals {
        for b in &vals {
            osc = osc.max((a.mid - b.mid).norm() + a.radius + b.radius);
        }
    }
    Ok(CanonicalValue { estimate: *vals.last().expect("nonempty"), oscillation: osc })
}

/// The interleaving `h_{2n} = f_n`, `h_{2n+1} = g_n`.
pub fn interleave(f: &PolySequence, g: &PolySequence) -> PolySequence {
    let (f, g) = (f.clone(), g.clone());
    PolySequence::generator(move |n| if n % 2 == 0 { (*f.get(n / 2)).clone() } else { (*g.get(n / 2)).clone() })
}

/// `η(k, m) = η0(k+1, m+2) + η1(k+1, m+2)` for the interleaved sequence.
pub fn merge_names(eta0: &AeModulus, eta1: &AeModulus) -> AeModulus {
    let (a, b) = (eta0.clone(), eta1.clone());
    AeModulus::from_fn(move |k, m| a.eval(k + 1, m + 2) + b.eval(k + 1, m + 2), Provenance::Merge)
}

/// Chebyshev bound `2^{p(r-2n)}` on the normalized measure of
/// `{t : |τ_{2n+1}(t) - τ_{2n}(t)| ≥ 2^{-r}}`. Exact when `p(r-2n)` is an integer.
pub fn chebyshev_step_bound(name: &CauchyName, n: usize, r: u32) -> Result<CertifiedReal> {
    name.term(2 * n + 1)?;
    let e = &name.p * Q::from_integer((r as i64 - 2 * n as i64).into());
    if e.is_integer() {
        let k: i64 = e.to_integer().try_into().map_err(|_| Error::Domain("exponent overflow".into()))?;
        return Ok(CertifiedReal::from_q(&pow2(k)));
    }
    let v = 2f64.powf(q_to_f64(&e));
    Ok(CertifiedReal::rounded(v).widen(v * 1e-15))
}

/// Grid outer estimate (normalized) of `{t : |τ_{2n+1}(t) - τ_{2n}(t)| ≥ 2^{-r}}`.
pub fn measured_step(name: &CauchyName, n: usize, r: u32, grid: usize) -> Result<f64> {
    let d = name.term(2 * n + 1)?.sub(&*name.term(2 * n)?);
    if d.is_zero() {
        return Ok(0.0);
    }
    Ok(superlevel_measure(&d, 2f64.powi(-(r as i32)), grid) / (2.0 * std::f64::consts::PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use num_complex::Complex64;

    #[test]
    fn subsequence_modulus_values() {
        let eta = subsequence_modulus(&q(2, 1)).unwrap();
        assert_eq!(eta.eval(3, 5), 4);
        let eta1 = subsequence_modulus(&q(1, 1)).unwrap();
        assert_eq!(eta1.eval(0, 0), 1);
        for k in 0..4 {
            for m in 0..4 {
                assert!(eta.eval(k, m) <= eta.eval(k + 1, m));
                assert!(eta.eval(k, m) <= eta.eval(k, m + 1));
            }
        }
    }

    #[test]
    fn merge_values() {
        let zero = AeModulus::from_fn(|_, _| 0, Provenance::Table);
        assert_eq!(merge_names(&zero, &zero).eval(5, 5), 0);
        let e0 = AeModulus::from_fn(|k, m| (k + m) as u64, Provenance::Table);
        let e1 = AeModulus::from_fn(|k, m| 2 * (k + m) as u64, Provenance::Table);
        assert_eq!(merge_names(&e0, &e1).eval(3, 4), 30);
    }

    #[test]
    fn constant_name_value() {
        let name = CauchyName::new(PolySequence::family(Family::Constant { poly: TrigPoly::e(0) }), q(2, 1)).unwrap();
        let v = canonical_value(&name, &q(1, 3), 4).unwrap();
        assert!(v.estimate.contains(Complex64::new(1.0, 0.0)));
        assert!(v.oscillation < 1e-14);
        assert!(canonical_value(&name, &q(0, 1), 1).is_err());
    }

    #[test]
    fn geometric_name_is_valid() {
        let name = CauchyName::new(PolySequence::family(Family::Geometric), q(2, 1)).unwrap();
        for i in 0..20 {
            assert!(name.step_norm(i).unwrap().hi() < 2f64.powi(-(i as i32) - 1));
        }
    }

    #[test]
    fn rate_violation_is_an_error() {
        let seq = PolySequence::explicit(vec![TrigPoly::zero(), TrigPoly::e(3)]).unwrap();
        let name = CauchyName::new(seq, q(2, 1)).unwrap();
        assert!(name.term(0).is_ok());
        assert!(matches!(name.term(1), Err(Error::NameRate { index: 0, .. })));
    }

    #[test]
    fn chebyshev_examples() {
        let name = CauchyName::new(PolySequence::family(Family::Geometric), q(2, 1)).unwrap();
        assert_eq!(chebyshev_step_bound(&name, 3, 3).unwrap().value, 2f64.powi(-6));
        let c = CauchyName::new(PolySequence::family(Family::Constant { poly: TrigPoly::e(1) }), q(2, 1)).unwrap();
        assert_eq!(measured_step(&c, 2, 4, 512).unwrap(), 0.0);
    }

    #[test]
    fn json_roundtrip() {
        let s = r#"{"p":"2","family":{"kind":"geometric"}}"#;
        let name = CauchyName::from_json(s).unwrap();
        assert_eq!(name.term(2).unwrap().num_terms(), 3);
        let back = CauchyName::from_json(&name.to_json().unwrap()).unwrap();
        assert_eq!(*back.term(5).unwrap(), *name.term(5).unwrap());
        assert!(CauchyName::from_json(r#"{"p":"2"}"#).is_err());
    }

    #[test]
    fn interleaving() {
        let a = PolySequence::family(Family::Constant { poly: TrigPoly::e(1) });
        let b = PolySequence::family(Family::Constant { poly: TrigPoly::e(2) });
        let h = interleave(&a, &b);
        assert_eq!(*h.get(4), TrigPoly::e(1));
        assert_eq!(*h.get(5), TrigPoly::e(2));
    }
}
