//! Carleson maximal operator for polynomials, moduli of almost-everywhere
//! convergence, and grid estimators for exceptional sets.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ball::{add_up, CertifiedReal, EPS};
use crate::error::{Error, Result};
use crate::names::CauchyName;
use crate::quad::{integrate, QuadOptions};
use crate::rational::{pow2, q_to_f64, Q};
use crate::trigpoly::TrigPoly;

/// Constant and exponent in `‖sup_N |S_N f|‖₁ ≤ C ‖f‖_p` (normalized norms).
#[derive(Clone, Debug, PartialEq)]
pub struct FeffermanConfig {
    pub c: u32,
    pub p: Q,
}

impl FeffermanConfig {
    pub fn new(c: u32, p: Q) -> Result<Self> {
        if c < 1 {
            return Err(Error::Domain("Fefferman constant must be at least 1".into()));
        }
        if p <= Q::one() {
            return Err(Error::Domain("exponent must exceed 1".into()));
        }
        Ok(Self { c, p })
    }
}

impl Default for FeffermanConfig {
    /// `C = 4`, `p = 2`. The constant is a heuristic, not a proven value.
    fn default() -> Self {
        Self { c: 4, p: Q::from_integer(2.into()) }
    }
}

/// Where a modulus came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Located from a Cauchy name through the Fefferman inequality.
    Fefferman,
    /// The closed form for the even subsequence of a Cauchy name.
    Subsequence,
    /// Merge of two moduli for an interleaved sequence.
    Merge,
    Table,
}

type EtaFn = dyn Fn(u32, u32) -> u64 + Send + Sync;

/// `η: ℕ² → ℕ`, made monotone by taking running maxima.
#[derive(Clone)]
pub struct AeModulus {
    raw: Arc<EtaFn>,
    pub provenance: Provenance,
}

impl fmt::Debug for AeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AeModulus").field("provenance", &self.provenance).finish_non_exhaustive()
    }
}

impl AeModulus {
    pub fn from_fn<F: Fn(u32, u32) -> u64 + Send + Sync + 'static>(f: F, provenance: Provenance) -> Self {
        Self { raw: Arc::new(f), provenance }
    }

    /// Table lookup; entries missing from the table count as 0.
    pub fn from_table(entries: &[(u32, u32, u64)]) -> Self {
        let map: BTreeMap<(u32, u32), u64> = entries.iter().map(|&(k, m, v)| ((k, m), v)).collect();
        Self::from_fn(move |k, m| map.get(&(k, m)).copied().unwrap_or(0), Provenance::Table)
    }

    /// The unmonotonized value.
    pub fn raw(&self, k: u32, m: u32) -> u64 {
        (self.raw)(k, m)
    }

    /// `max_{k' ≤ k, m' ≤ m} raw(k', m')`.
    pub fn eval(&self, k: u32, m: u32) -> u64 {
        let mut best = 0;
        for kk in 0..=k {
            for mm in 0..=m {
                best = best.max(self.raw(kk, mm));
            }
        }
        best
    }

    pub fn to_json(&self, k_max: u32, m_max: u32) -> AeModulusJson {
        let mut eta = Vec::new();
        for k in 0..=k_max {
            for m in 0..=m_max {
                eta.push([k as u64, m as u64, self.eval(k, m)]);
            }
        }
        AeModulusJson { eta, provenance: self.provenance }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AeModulusJson {
    pub eta: Vec<[u64; 3]>,
    pub provenance: Provenance,
}

impl From<AeModulusJson> for AeModulus {
    fn from(j: AeModulusJson) -> Self {
        let entries: Vec<(u32, u32, u64)> = j.eta.iter().map(|e| (e[0] as u32, e[1] as u32, e[2])).collect();
        let mut m = AeModulus::from_table(&entries);
        m.provenance = j.provenance;
        m
    }
}

/// `max_{0 ≤ N ≤ deg p} |S_N(p)(t)|`.
pub fn carleson_max(p: &TrigPoly, t: f64) -> CertifiedReal {
    let mut groups: BTreeMap<u64, (Complex64, f64)> = BTreeMap::new();
    for (n, v, e) in p.terms_at(t) {
        let g = groups.entry(n.unsigned_abs()).or_insert((Complex64::new(0.0, 0.0), 0.0));
        g.0 += v;
        g.1 += e + 2.0 * EPS * v.norm();
    }
    let mut lo: f64 = 0.0;
    let mut hi: f64 = 0.0;
    let mut s = Complex64::new(0.0, 0.0);
    let (mut err, mut mag) = (0.0f64, 0.0f64);
    for (i, (_, (v, e))) in groups.iter().enumerate() {
        s += v;
        err += e;
        mag += v.norm();
        let r = add_up(err, (i as f64 + 2.0) * 2.0 * EPS * mag);
        let a = s.norm();
        lo = lo.max(a - r);
        hi = hi.max(a + r);
    }
    CertifiedReal::hull(lo.max(0.0), hi)
}

/// Lower estimate of the Fefferman constant: the largest observed
/// `‖sup_N |S_N f|‖₁ / ‖f‖_p` over the samples (normalized norms).
pub fn estimate_fefferman(samples: &[TrigPoly], p: &Q) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Domain("no samples".into()));
    }
    let ratios: Vec<Result<f64>> = samples
        .par_iter()
        .map(|f| {
            if f.is_zero() {
                return Err(Error::Domain("zero sample".into()));
            }
            let opts = QuadOptions { abs_tol: 1e-7, max_panels: 100_000 };
            let panels = 4 * (f.degree() as usize + 1);
            let h = 2.0 * std::f64::consts::PI / panels as f64;
            let breaks: Vec<f64> = (1..panels).map(|j| -std::f64::consts::PI + j as f64 * h).collect();
            let l1 = match integrate(|t| carleson_max(f, t).value, -std::f64::consts::PI, std::f64::consts::PI, &breaks, opts) {
                Ok(v) => v,
                Err(Error::QuadratureBudget { best }) => best,
                Err(e) => return Err(e),
            };
            let lp = match f.lp_norm(p, 1e-7) {
                Ok(v) => v,
                Err(Error::QuadratureBudget { best }) => best,
                Err(e) => return Err(e),
            };
            Ok(l1.value / (2.0 * std::f64::consts::PI) / lp.value)
        })
        .collect();
    let mut best: f64 = 0.0;
    for r in ratios {
        best = best.max(r?);
    }
    Ok(best)
}

/// Modulus located from a Cauchy name: `η(k, m)` is the degree of the first
/// term `τ_j` certified within `2^{-(m+k+3)}/(2πC)` of the limit in `L^p`.
///
/// The distance is bounded by `Σ_{i=j}^{j+15} ‖τ_i - τ_{i+1}‖_p + 2^{-(j+16)}`,
/// the tail coming from the name's rate. The `2π` turns the normalized `L¹`
/// bound of the Fefferman inequality into a Lebesgue-measure bound.
pub fn fefferman_modulus(name: Arc<CauchyName>, cfg: &FeffermanConfig) -> AeModulus {
    let c = cfg.c as f64;
    let memo: Arc<std::sync::Mutex<BTreeMap<u32, u64>>> = Arc::default();
    AeModulus::from_fn(
        move |k, m| {
            let s = m + k;
            if let Some(v) = memo.lock().expect("memo").get(&s) {
                return *v;
            }
            let threshold = 2f64.powi(-((s + 3) as i32)) / (2.0 * std::f64::consts::PI * c);
            let mut j = 0usize;
            let v = loop {
                let mut sum = 2f64.powi(-((j + 16) as i32));
                let mut ok = true;
                for i in j..j + 16 {
                    match name.step_norm(i) {
                        Ok(d) => sum += d.hi(),
                        Err(_) => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok && sum * (1.0 + 1e-12) <= threshold {
                    break name.term(j).map(|t| t.degree()).unwrap_or(0);
                }
                j += 1;
                if j > 4096 {
                    break u64::MAX;
                }
            };
            memo.lock().expect("memo").insert(s, v);
            v
        },
        Provenance::Fefferman,
    )
}

/// Outer grid estimate of the Lebesgue measure of
/// `{t : ∃ M, N ∈ [n0, n_max], |S_M(f)(t) - S_N(f)(t)| ≥ 2^{-k}}`.
pub fn exceptional_measure_estimate(f: &TrigPoly, k: u32, n0: u64, n_max: u64, grid: usize) -> Result<f64> {
    if n0 > n_max {
        return Err(Error::Domain("need n0 <= n_max".into()));
    }
    if grid < 2 {
        return Err(Error::Domain("grid must be at least 2".into()));
    }
    let threshold = q_to_f64(&pow2(-(k as i64)));
    let window = f.band(-(n_max as i64), n_max as i64);
    let lip: f64 = window
        .coeffs()
        .filter(|(n, _)| n.unsigned_abs() > n0)
        .map(|(n, c)| n.unsigned_abs() as f64 * c.to_c64().norm())
        .sum::<f64>()
        * (1.0 + 1e-12);
    let h = 2.0 * std::f64::consts::PI / grid as f64;
    let count: usize = (0..grid)
        .into_par_iter()
        .filter(|&i| {
            let t = -std::f64::consts::PI + (i as f64 + 0.5) * h;
            let diam = partial_sum_diameter(&window, t, n0);
            diam + lip * 0.5 * h >= threshold
        })
        .count();
    Ok(count as f64 * h)
}

/// Upper bound on `max_{M,N ≥ n0} |S_M(p)(t) - S_N(p)(t)|` for the finite polynomial `p`.
fn partial_sum_diameter(p: &TrigPoly, t: f64, n0: u64) -> f64 {
    let mut groups: BTreeMap<u64, (Complex64, f64)> = BTreeMap::new();
    for (n, v, e) in p.terms_at(t) {
        let g = groups.entry(n.unsigned_abs()).or_insert((Complex64::new(0.0, 0.0), 0.0));
        g.0 += v;
        g.1 += e + 2.0 * EPS * v.norm();
    }
    // Differences S_M - S_N only involve frequencies above n0.
    let mut points = vec![Complex64::new(0.0, 0.0)];
    let mut s = Complex64::new(0.0, 0.0);
    let (mut err, mut mag) = (0.0, 0.0);
    for (&a, &(v, e)) in &groups {
        if a <= n0 {
            continue;
        }
        s += v;
        err += e;
        mag += v.norm();
        points.push(s);
    }
    let mut diam: f64 = 0.0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            diam = diam.max((points[i] - points[j]).norm());
        }
    }
    diam + 2.0 * err + 4.0 * (points.len() as f64 + 1.0) * EPS * mag
}

/// Outer grid estimate of the Lebesgue measure of `{t : |g(t)| ≥ threshold}`.
pub fn superlevel_measure(g: &TrigPoly, threshold: f64, grid: usize) -> f64 {
    let h = 2.0 * std::f64::consts::PI / grid as f64;
    let lip = g.derivative_bound();
    let count = (0..grid)
        .into_par_iter()
        .filter(|&i| {
            let t = -std::f64::consts::PI + (i as f64 + 0.5) * h;
            g.eval(t).abs().hi() + lip * 0.5 * h >= threshold
        })
        .count();
    count as f64 * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, QComplex};

    #[test]
    fn carleson_examples() {
        assert!(carleson_max(&TrigPoly::e(0), 0.7).contains(1.0));
        assert!(carleson_max(&TrigPoly::e(1), 0.0).contains(1.0));
        let p = TrigPoly::e(1).scale_q(&q(-3, 1)).add(&TrigPoly::e(2));
        // S_1(0) = -3, S_2(0) = -2.
        assert!(carleson_max(&p, 0.0).contains(3.0));
    }

    #[test]
    fn carleson_dominates_value() {
        let p = TrigPoly::from_coeffs([(-2, QComplex::real(q(1, 2))), (3, QComplex::new(q(1, 3), q(-1, 5)))]);
        for &t in &[0.0, 0.4, -2.2] {
            assert!(carleson_max(&p, t).hi() >= p.eval(t).abs().lo());
        }
    }

    #[test]
    fn fefferman_estimate_trivial_samples() {
        let two = q(2, 1);
        let v = estimate_fefferman(&[TrigPoly::e(0)], &two).unwrap();
        assert!((v - 1.0).abs() < 1e-6);
        let v = estimate_fefferman(&[TrigPoly::e(3), TrigPoly::e(-2)], &two).unwrap();
        assert!((v - 1.0).abs() < 1e-6);
        assert!(estimate_fefferman(&[], &two).is_err());
    }

    #[test]
    fn exceptional_examples() {
        assert_eq!(exceptional_measure_estimate(&TrigPoly::e(1), 0, 1, 8, 256).unwrap(), 0.0);
        let m = exceptional_measure_estimate(&TrigPoly::e(5), 10, 0, 5, 256).unwrap();
        assert!((m - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!(exceptional_measure_estimate(&TrigPoly::e(5), 0, 3, 2, 256).is_err());
    }

    #[test]
    fn modulus_monotone_and_json() {
        let eta = AeModulus::from_table(&[(0, 0, 5), (1, 0, 2), (0, 1, 7)]);
        assert_eq!(eta.eval(1, 0), 5);
        assert_eq!(eta.eval(1, 1), 7);
        let j = eta.to_json(1, 1);
        let s = serde_json::to_string(&j).unwrap();
        assert!(s.contains(r#""provenance":"table""#));
        let back: AeModulus = serde_json::from_str::<AeModulusJson>(&s).unwrap().into();
        assert_eq!(back.eval(1, 1), 7);
    }

    #[test]
    fn config_validation() {
        assert!(FeffermanConfig::new(0, q(2, 1)).is_err());
        assert!(FeffermanConfig::new(4, q(1, 1)).is_err());
        assert_eq!(FeffermanConfig::default().c, 4);
    }
}
