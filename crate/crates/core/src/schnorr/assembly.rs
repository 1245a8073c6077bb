//! Assembly of a continuous function whose Fourier series diverges at every
//! point captured by a Schnorr test.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{build_gnk, SchnorrTest};
use crate::ball::{ulps, CBall, CertifiedReal, EPS};
use crate::error::{Error, Result};
use crate::intervals::IntervalSet;
use crate::kahane::{run_pipeline, KKCertificate, KahaneOptions};
use crate::rational::{format_rational, pow2, q_from_f64, q_string, q_to_f64, Q};
use crate::trigpoly::TrigPoly;

/// Cantor pairing `⟨n,k⟩ = (n+k)(n+k+1)/2 + k`.
pub fn cantor_pair(n: u32, k: u32) -> u64 {
    let s = n as u64 + k as u64;
    s * (s + 1) / 2 + k as u64
}

/// `1/(8π)` as a ball.
fn gap_target() -> CertifiedReal {
    CertifiedReal::exact(1.0) / (CertifiedReal::pi().scale(8.0))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduledCell {
    pub n: u32,
    pub k: u32,
    pub pair: u64,
    /// Frequency shift `r_{n,k}`.
    pub r: i64,
    /// Lowest and highest frequency of `e_r p_{n,k}`.
    pub lo: i64,
    pub hi: i64,
}

/// Frequency shifts placing the polynomials in disjoint blocks, in pairing order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    #[serde(default = "schema_v1")]
    pub schema: String,
    pub pairing: String,
    pub cells: Vec<ScheduledCell>,
}

fn schema_v1() -> String {
    "v1".into()
}

impl Schedule {
    pub fn get(&self, n: u32, k: u32) -> Option<&ScheduledCell> {
        self.cells.iter().find(|c| c.n == n && c.k == k)
    }

    pub fn r(&self, n: u32, k: u32) -> Option<i64> {
        self.get(n, k).map(|c| c.r)
    }
}

/// Greedy shifts: each nonzero polynomial, taken in `⟨n,k⟩` order, starts at
/// or above both `⟨n,k⟩` and one past the previous block. Zero polynomials
/// get no block.
pub fn make_schedule(polys: &BTreeMap<(u32, u32), TrigPoly>) -> Schedule {
    let mut order: Vec<(&(u32, u32), &TrigPoly)> = polys.iter().collect();
    order.sort_by_key(|((n, k), _)| cantor_pair(*n, *k));
    let mut cells = Vec::new();
    let mut next_free = i64::MIN;
    for (&(n, k), p) in order {
        let Some((lo, hi)) = p.support() else {
            continue;
        };
        let pair = cantor_pair(n, k) as i64;
        let r = 0.max(pair - lo).max(next_free.saturating_sub(lo));
        next_free = r + hi + 1;
        cells.push(ScheduledCell { n, k, pair: pair as u64, r, lo: r + lo, hi: r + hi });
    }
    Schedule { schema: schema_v1(), pairing: "cantor".into(), cells }
}

/// Per-cell record of the assembly.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CellReport {
    pub n: u32,
    pub k: u32,
    pub pair: u64,
    pub g: IntervalSet,
    /// Exact Lebesgue measure of `G_{n,k}`, as an angle.
    pub measure: String,
    pub measure_bound: String,
    pub measure_ok: bool,
    pub certificate: Option<KKCertificate>,
    /// `2^{-(n+k+1)}`.
    #[serde(with = "q_string")]
    pub scale: Q,
    /// Lower bound on `min_{G_{n,k}} |S_N(p_{n,k})|` with `N = deg R`.
    pub scaled_min: CertifiedReal,
    pub gap_target: CertifiedReal,
    pub gap_ok: bool,
    /// Upper bound on `‖p_{n,k}‖∞`.
    pub scaled_sup: CertifiedReal,
    pub sup_ok: bool,
}

impl CellReport {
    pub fn passed(&self) -> bool {
        self.measure_ok && self.gap_ok && self.sup_ok
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AssemblyReport {
    #[serde(default = "schema_v1")]
    pub schema: String,
    pub grid: (u32, u32),
    pub cells: Vec<CellReport>,
    /// `Σ 2^{-(n+k+1)}` over the cells outside the grid, bounding `‖f_full - f‖∞`.
    #[serde(with = "q_string")]
    pub tail_sup: Q,
    pub passed: bool,
}

/// A truncated assembly `f = Σ_{n ≤ n_max, k ≤ k_max} e_{r_{n,k}} p_{n,k}`.
#[derive(Clone, Debug)]
pub struct Assembly {
    pub f: TrigPoly,
    pub schedule: Schedule,
    pub report: AssemblyReport,
    /// Degree of the analytic polynomial behind each nonempty cell.
    pub r_degree: BTreeMap<(u32, u32), u64>,
}

/// `2 - (1 - 2^{-n_max-1})(2 - 2^{-k_max})`.
fn tail_outside_grid(n_max: u32, k_max: u32) -> Q {
    let two = Q::from_integer(2.into());
    &two - (Q::from_integer(1.into()) - pow2(-(n_max as i64) - 1)) * (&two - pow2(-(k_max as i64)))
}

pub fn assemble_divergence(test: &SchnorrTest, n_max: u32, k_max: u32, opts: &KahaneOptions) -> Result<Assembly> {
    let mut sets = Vec::new();
    for n in 0..=n_max {
        for k in 0..=k_max {
            sets.push(((n, k), build_gnk(test, n, k)?));
        }
    }
    let built: Vec<Result<(CellReport, Option<(TrigPoly, u64)>)>> = sets
        .into_par_iter()
        .map(|((n, k), g)| build_cell(n, k, g, opts))
        .collect();
    let mut cells = Vec::new();
    let mut polys = BTreeMap::new();
    let mut r_degree = BTreeMap::new();
    for b in built {
        let (report, poly) = b?;
        if let Some((p, deg)) = poly {
            polys.insert((report.n, report.k), p);
            r_degree.insert((report.n, report.k), deg);
        }
        cells.push(report);
    }
    cells.sort_by_key(|c| c.pair);
    let schedule = make_schedule(&polys);
    let mut f = TrigPoly::zero();
    for c in &schedule.cells {
        f = f.add(&polys[&(c.n, c.k)].shift(c.r));
    }
    let passed = cells.iter().all(CellReport::passed);
    let report = AssemblyReport {
        schema: schema_v1(),
        grid: (n_max, k_max),
        cells,
        tail_sup: tail_outside_grid(n_max, k_max),
        passed,
    };
    Ok(Assembly { f, schedule, report, r_degree })
}

#[allow(clippy::type_complexity)]
fn build_cell(n: u32, k: u32, g: IntervalSet, opts: &KahaneOptions) -> Result<(CellReport, Option<(TrigPoly, u64)>)> {
    let scale = pow2(-(n as i64 + k as i64 + 1));
    let bound = format!("2^-{}", 1u64 << (n + k));
    let measure_ok = super::cell_measure_ok(&g, n, k)?;
    let measure = g.measure().to_string();
    let mut report = CellReport {
        n,
        k,
        pair: cantor_pair(n, k),
        g,
        measure,
        measure_bound: bound,
        measure_ok,
        certificate: None,
        scale: scale.clone(),
        scaled_min: CertifiedReal::exact(0.0),
        gap_target: gap_target(),
        gap_ok: true,
        scaled_sup: CertifiedReal::exact(0.0),
        sup_ok: true,
    };
    if report.g.is_empty() {
        return Ok((report, None));
    }
    let out = run_pipeline(&report.g, opts).map_err(|e| Error::CellFailure { n, k, reason: e.to_string() })?;
    out.p_certificate.ensure().map_err(|e| Error::CellFailure { n, k, reason: e.to_string() })?;
    let s = q_to_f64(&scale);
    let cert = out.p_certificate;
    report.scaled_min = cert.measured_min.scale(s);
    report.gap_ok = report.scaled_min.lo() > report.gap_target.hi();
    report.scaled_sup = cert.sup_norm.scale(s);
    report.sup_ok = report.scaled_sup.hi() < s;
    let deg = cert.n;
    report.certificate = Some(cert);
    Ok((report, Some((out.p.scale_q(&scale), deg))))
}

/// A certified divergence witness `|S_N(f)(t0) - S_M(f)(t0)| > 1/(8π)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapWitness {
    pub n: u32,
    pub k: u32,
    #[serde(rename = "M")]
    pub m: u64,
    #[serde(rename = "N")]
    pub big_n: u64,
    pub gap: CertifiedReal,
    pub target: CertifiedReal,
}

/// Finds a cell `G_{n,k}` containing `t0` with `⟨n,0⟩ ≥ n_floor` and certifies
/// the jump of the partial sums across its frequency block.
///
/// With `R` of degree `d` and block top `r`, the partial sums `S_r(f) - S_{r-d-1}(f)`
/// equal `e_r S_d(p_{n,k})`, whose modulus on `G_{n,k}` is the scaled Kahane bound.
pub fn verify_gap(asm: &Assembly, t0: &Q, n_floor: u64) -> Result<GapWitness> {
    let target = gap_target();
    let t = CertifiedReal::from_q(t0);
    let mut failures = Vec::new();
    for c in &asm.report.cells {
        if c.certificate.is_none() || cantor_pair(c.n, 0) < n_floor || !c.g.contains_rad(t0) {
            continue;
        }
        let (Some(sc), Some(&d)) = (asm.schedule.get(c.n, c.k), asm.r_degree.get(&(c.n, c.k))) else {
            continue;
        };
        let top = sc.r;
        let m = top - d as i64 - 1;
        if m < n_floor as i64 {
            failures.push(format!("cell ({},{}): block starts below the floor", c.n, c.k));
            continue;
        }
        let gap = asm.f.band(m + 1, top).eval_ball(t).abs();
        if gap.lo() > target.hi() {
            return Ok(GapWitness { n: c.n, k: c.k, m: m as u64, big_n: top as u64, gap, target });
        }
        failures.push(format!("cell ({},{}): gap {} not above {}", c.n, c.k, gap, target));
    }
    if failures.is_empty() {
        Err(Error::NotCaptured(format!(
            "t0 = {} lies in no built cell with <n,0> >= {n_floor}",
            format_rational(t0)
        )))
    } else {
        Err(Error::Certificate(failures.join("; ")))
    }
}

/// `S_N(f)(t)` for `N = 0..=deg f`, each with a certified radius.
pub fn partial_sum_series(f: &TrigPoly, t: &Q) -> Vec<(u64, CBall)> {
    let tf = q_to_f64(t);
    let dt = q_to_f64(&(t - q_from_f64(tf))).abs() + ulps(tf, 0.5);
    let deg = f.degree();
    let mut by_freq: Vec<(Complex64, f64)> = vec![(Complex64::new(0.0, 0.0), 0.0); deg as usize + 1];
    for (n, v, e) in f.terms_at(tf) {
        let a = n.unsigned_abs() as usize;
        by_freq[a].0 += v;
        by_freq[a].1 += e + v.norm() * (n.unsigned_abs() as f64 * dt + 2.0 * EPS);
    }
    let mut s = Complex64::new(0.0, 0.0);
    let (mut err, mut mag) = (0.0, 0.0);
    by_freq
        .into_iter()
        .enumerate()
        .map(|(n, (v, e))| {
            s += v;
            err += e;
            mag += v.norm();
            let rounding = 2.0 * (n as f64 + 2.0) * EPS * mag;
            (n as u64, CBall::new(s, err + rounding))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, QComplex};

    fn poly(lo: i64, hi: i64) -> TrigPoly {
        TrigPoly::from_coeffs([(lo, QComplex::one()), (hi, QComplex::one())])
    }

    #[test]
    fn pairing_values() {
        assert_eq!(cantor_pair(0, 0), 0);
        assert_eq!(cantor_pair(1, 0), 1);
        assert_eq!(cantor_pair(0, 1), 2);
        assert_eq!(cantor_pair(2, 0), 3);
        assert_eq!(cantor_pair(1, 1), 4);
    }

    #[test]
    fn single_polynomial_schedule() {
        let mut m = BTreeMap::new();
        m.insert((1, 1), poly(-10, 0));
        let s = make_schedule(&m);
        assert_eq!(s.r(1, 1), Some(4 + 10));
        assert_eq!(s.cells[0].lo, 4);
    }

    #[test]
    fn blocks_are_disjoint() {
        let mut m = BTreeMap::new();
        for n in 0..3 {
            for k in 0..4 {
                m.insert((n, k), poly(-(3 * n as i64 + k as i64 + 1) * 7, 0));
            }
        }
        m.insert((2, 2), TrigPoly::zero());
        let s = make_schedule(&m);
        assert_eq!(s.cells.len(), 11);
        for (i, a) in s.cells.iter().enumerate() {
            assert!(a.lo >= a.pair as i64 && a.r >= 0);
            for b in &s.cells[i + 1..] {
                assert!(a.hi < b.lo || b.hi < a.lo);
            }
        }
        let mut f = TrigPoly::zero();
        for c in &s.cells {
            f = f.add(&m[&(c.n, c.k)].shift(c.r));
        }
        for c in &s.cells {
            assert_eq!(f.band(c.lo, c.hi), m[&(c.n, c.k)].shift(c.r));
        }
    }

    #[test]
    fn tail_formula() {
        assert_eq!(tail_outside_grid(0, 0), q(3, 2));
        let mut direct = Q::from_integer(0.into());
        for n in 0..=3 {
            for k in 0..=2 {
                direct += pow2(-(n + k + 1));
            }
        }
        assert_eq!(tail_outside_grid(3, 2), Q::from_integer(2.into()) - direct);
    }

    #[test]
    fn partial_sum_series_matches_eval() {
        let f = TrigPoly::from_coeffs([(0, QComplex::one()), (2, QComplex::real(q(1, 3))), (-1, QComplex::real(q(-1, 5)))]);
        let rows = partial_sum_series(&f, &q(1, 7));
        assert_eq!(rows.len(), 3);
        for (n, b) in rows {
            assert!(b.contains(f.partial_sum(n).eval(1.0 / 7.0).mid));
        }
    }

    #[test]
    fn single_cell_assembly() {
        let test = SchnorrTest::rational_point(q(1, 3)).unwrap();
        let asm = assemble_divergence(&test, 0, 0, &KahaneOptions::default()).unwrap();
        assert!(asm.report.passed);
        let c = &asm.schedule.cells[0];
        let p = asm.f.shift(-c.r);
        assert_eq!(asm.f, p.shift(c.r));
        let w = verify_gap(&asm, &q(1, 3), 0).unwrap();
        assert!(w.gap.lo() > w.target.hi());
        assert!(matches!(verify_gap(&asm, &q(1, 1), 0), Err(Error::NotCaptured(_))));
        assert!(matches!(verify_gap(&asm, &q(1, 3), 1), Err(Error::NotCaptured(_))));
    }
}
