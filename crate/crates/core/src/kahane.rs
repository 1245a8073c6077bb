//! Divergence polynomials for small compact sets.
//!
//! Given `G ⊂ [-π, π]` with `a = λ(G)/(2π)` small, the pipeline
//!
//! 1. rotates `G` so that its largest circular gap is centred at `π`, and
//!    covers the rotated set `G'` by open arcs `F` with `a' = λ(F)/(2π) ≤ a^{3/4}`;
//! 2. forms `ψ = Log ω̂(·, F) - ln a'`, analytic on the disk with `ψ(0) = 0`,
//!    `|Im ψ| < π/2` and `Re ψ ≥ -(3/4) ln a` on `G'`;
//! 3. picks `r0 < 1` with `Re ψ(r0 ζ) ≥ -(5/8) ln a` on `G'`, truncates the
//!    Maclaurin series of `ψ(r0 ·)` to an analytic polynomial `R`, undoing the
//!    rotation, so that `Re R ≥ -(1/2) ln a` on `G` and `|Im R| < π`;
//! 4. sets `p = (1/π) e_{-N} Im R`, whence `|S_N(p)| = |R|/(2π)` and `‖p‖∞ < 1`.
//!
//! Coefficients are produced in floating point and then frozen as rationals.
//! Every claimed inequality is re-checked on the frozen polynomial by the
//! certified evaluators of [`TrigPoly`], so the floating-point construction
//! only affects whether a certificate passes, never whether it is sound.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ball::{add_up, CBall, CertifiedReal, EPS};
use crate::error::{Error, Result};
use crate::harmonic::{hat_omega_ball, hat_omega_taylor, Arc, ArcSet};
use crate::intervals::{Angle, IntervalSet};
use crate::rational::{pi_enclosure, q_string, pow2, q_from_f64, q_to_f64, QComplex, Q};
use crate::trigpoly::TrigPoly;

/// Grid (in units of π) for cover endpoints.
const COVER_BITS: u32 = 40;
/// Fraction of the `a^{3/4} - a` slack handed to the cover.
const BUDGET_FRACTION: f64 = 0.98;
const MAX_CELLS: usize = 4_000_000;

#[derive(Clone, Copy, Debug)]
pub struct KahaneOptions {
    /// Coefficients of `R` are rounded to the grid `2^-bits`.
    pub bits: u32,
    /// Give up if the truncation degree would exceed this.
    pub max_degree: usize,
}

impl Default for KahaneOptions {
    fn default() -> Self {
        Self { bits: 128, max_degree: 40_000 }
    }
}

/// Open-arc cover of the rotated set.
#[derive(Clone, Debug)]
pub struct Cover {
    pub arcs: ArcSet,
    /// Rotation applied to `G`, in units of π.
    pub rotation: Q,
    /// `G' = G + rotation·π`, reduced into `[-π, π]`.
    pub rotated: IntervalSet,
    /// Rational lower bound on the distance from `G'` to the endpoints of `F`.
    pub delta: Q,
}

/// `ψ(z) = Log ω̂(z, F) - ln a'` together with the data it was built from.
#[derive(Clone, Debug)]
pub struct PsiHandle {
    pub cover: Cover,
    /// `λ(G)/(2π)`.
    pub a: CertifiedReal,
    /// `a` when it is rational.
    pub a_exact: Option<Q>,
    /// `λ(F)/(2π)`.
    pub a_prime: Q,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KKCertificate {
    pub bound_target: CertifiedReal,
    pub measured_min: CertifiedReal,
    pub sup_norm: CertifiedReal,
    pub degree: u64,
    #[serde(with = "q_string")]
    pub r0: Q,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(with = "pi_string")]
    pub rotation: Q,
    /// Coefficient-level check of `S_N(p) = (q_π/2i) e_{-N} R`, with `q_π ≈ 1/π`.
    #[serde(default)]
    pub identity_exact: Option<bool>,
    pub passed: bool,
}

impl KKCertificate {
    fn decide(mut self) -> Self {
        self.passed = self.measured_min.lo() >= self.bound_target.hi()
            && self.sup_norm.hi() < 1.0
            && self.identity_exact.unwrap_or(true);
        self
    }

    /// Converts a failing certificate into an error carrying its numbers.
    pub fn ensure(&self) -> Result<()> {
        if self.passed {
            return Ok(());
        }
        Err(Error::Certificate(format!(
            "measured_min {} vs target {}, sup_norm {}, identity {:?}",
            self.measured_min, self.bound_target, self.sup_norm, self.identity_exact
        )))
    }
}

mod pi_string {
    use super::{Angle, Q};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&Angle::pi_multiple(x.clone()).to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let a = Angle::parse(&String::deserialize(d)?).map_err(serde::de::Error::custom)?;
        if !num_traits::Zero::is_zero(&a.rad) {
            return Err(serde::de::Error::custom("rotation must be a rational multiple of pi"));
        }
        Ok(a.pi)
    }
}

fn check_measure(g: &IntervalSet) -> Result<(CertifiedReal, Option<Q>)> {
    if g.is_empty() {
        return Err(Error::Domain("G must have positive measure".into()));
    }
    let a_exact = g.normalized_measure_exact();
    let a = g.normalized_measure();
    if let Some(x) = &a_exact {
        if x >= &Q::one() {
            return Err(Error::InfeasibleCover("G has full measure".into()));
        }
    }
    Ok((a, a_exact))
}

/// Rotation (a dyadic multiple of π) moving the midpoint of the largest circular
/// gap of `G` to `π`, and the rotated set.
fn rotate(g: &IntervalSet) -> Result<(Q, IntervalSet, f64)> {
    let iv = g.intervals();
    let two_pi = Angle::pi_multiple(Q::from_integer(2.into()));
    let mut best: Option<(Angle, Angle)> = None;
    for i in 0..iv.len() {
        let start = iv[i].1.clone();
        let end = if i + 1 < iv.len() { iv[i + 1].0.clone() } else { &iv[0].0 + &two_pi };
        let len = &end - &start;
        if best.as_ref().map_or(true, |(l, _)| &len > l) {
            let mid = (&start + &end).scale(&Q::new(1.into(), 2.into()));
            best = Some((len, mid));
        }
    }
    let (gap, mid) = best.expect("nonempty");
    let gap_f = gap.to_f64();
    if gap_f <= 0.0 {
        return Err(Error::InfeasibleCover("G has no gap on the circle".into()));
    }
    let bits = (24.0f64).max((8.0 * PI / gap_f).log2().ceil() + 4.0) as u32;
    if bits > 60 {
        return Err(Error::InfeasibleCover(format!("largest gap {gap_f:e} is too small")));
    }
    let target = 1.0 - mid.to_f64() / PI;
    let mut s = crate::rational::round_dyadic(target, bits);
    // Reduce into (-1, 1].
    let two = Q::from_integer(2.into());
    while s > Q::one() {
        s -= &two;
    }
    while s <= -Q::one() {
        s += &two;
    }
    let rho = Angle::pi_multiple(s.clone());
    let pi = Angle::pi_();
    let neg_pi = -&pi;
    let mut out = Vec::with_capacity(iv.len());
    for (a, b) in iv {
        let (mut x, mut y) = (a + &rho, b + &rho);
        if y > pi {
            x = &x - &two_pi;
            y = &y - &two_pi;
        } else if x < neg_pi {
            x = &x + &two_pi;
            y = &y + &two_pi;
        }
        out.push((x, y));
    }
    Ok((s, IntervalSet::new(out)?, gap_f))
}

/// Covers `G` (after rotation) by open arcs of total normalized length at most `a^{3/4}`.
pub fn choose_cover(g: &IntervalSet) -> Result<Cover> {
    let (a, a_exact) = check_measure(g)?;
    let (rotation, rotated, _) = rotate(g)?;
    let iv: Vec<(f64, f64)> = rotated.intervals_f64();
    let left_room = iv[0].0 + PI;
    let right_room = PI - iv[iv.len() - 1].1;
    let cap = 0.9 * left_room.min(right_room);
    let mut budget = BUDGET_FRACTION * 2.0 * PI * (a.value.powf(0.75) - a.value);
    for _ in 0..40 {
        if let Some(c) = try_cover(&rotated, &iv, budget, cap, &a, a_exact.as_ref(), &rotation)? {
            return Ok(c);
        }
        budget *= 0.5;
    }
    Err(Error::InfeasibleCover(format!("no cover with a' <= a^(3/4) for a = {}", a)))
}

fn try_cover(
    rotated: &IntervalSet,
    iv: &[(f64, f64)],
    budget: f64,
    cap: f64,
    a: &CertifiedReal,
    a_exact: Option<&Q>,
    rotation: &Q,
) -> Result<Option<Cover>> {
    if !(budget > 0.0) {
        return Ok(None);
    }
    // Clusters as index ranges into the interval list.
    let mut clusters: Vec<(usize, usize)> = (0..iv.len()).map(|i| (i, i)).collect();
    let mut absorbed = 0.0;
    let delta = loop {
        let k = clusters.len() as f64;
        let delta = ((budget - absorbed) / (2.0 * k)).min(cap);
        let mut merged = Vec::with_capacity(clusters.len());
        let mut changed = false;
        for c in clusters.iter().copied() {
            match merged.last_mut() {
                Some(last) => {
                    let l: &mut (usize, usize) = last;
                    let gap = iv[c.0].0 - iv[l.1].1;
                    if gap <= 2.0 * delta * 1.01 {
                        absorbed += gap;
                        l.1 = c.1;
                        changed = true;
                    } else {
                        merged.push(c);
                    }
                }
                None => merged.push(c),
            }
        }
        clusters = merged;
        if !changed {
            break delta;
        }
    };
    if !(delta > 0.0) {
        return Ok(None);
    }
    let exact = rotated.intervals();
    let grid = pow2(COVER_BITS as i64);
    let mut arcs = Vec::with_capacity(clusters.len());
    let mut min_dist: Option<CertifiedReal> = None;
    for (i, j) in clusters {
        let lo = &exact[i].0;
        let hi = &exact[j].1;
        let mut t1 = ((q_from_f64((iv[i].0 - delta) / PI) * &grid).floor()) / &grid;
        let mut t2 = ((q_from_f64((iv[j].1 + delta) / PI) * &grid).ceil()) / &grid;
        while Angle::pi_multiple(t1.clone()) >= *lo {
            t1 -= Q::one() / &grid;
        }
        while Angle::pi_multiple(t2.clone()) <= *hi {
            t2 += Q::one() / &grid;
        }
        let d1 = (lo - &Angle::pi_multiple(t1.clone())).to_ball();
        let d2 = (&Angle::pi_multiple(t2.clone()) - hi).to_ball();
        let d = d1.min(d2);
        min_dist = Some(min_dist.map_or(d, |m| m.min(d)));
        arcs.push(Arc::new(t1, t2)?);
    }
    let arcs = match ArcSet::new(arcs) {
        Ok(s) => s,
        Err(_) => return Ok(None),
    };
    let a_prime = arcs.total();
    let ok = match a_exact {
        Some(a) => {
            let ap2 = &a_prime * &a_prime;
            &ap2 * &ap2 <= a * a * a
        }
        None => {
            let ap = CertifiedReal::from_q(&a_prime);
            let lhs = ap * ap * ap * ap;
            lhs.hi() <= (*a * *a * *a).lo()
        }
    };
    if !ok {
        return Ok(None);
    }
    let dist = min_dist.expect("nonempty").lo();
    if !(dist > 0.0) {
        return Ok(None);
    }
    Ok(Some(Cover {
        arcs,
        rotation: rotation.clone(),
        rotated: rotated.clone(),
        delta: q_from_f64(dist),
    }))
}

pub fn build_psi(g: &IntervalSet) -> Result<PsiHandle> {
    let (a, a_exact) = check_measure(g)?;
    let cover = choose_cover(g)?;
    let a_prime = cover.arcs.total();
    Ok(PsiHandle { cover, a, a_exact, a_prime })
}

impl PsiHandle {
    fn ln_a_prime(&self) -> CertifiedReal {
        CertifiedReal::from_q(&self.a_prime).ln()
    }

    /// Encloses `ψ` on the disk ball `z` (which must lie in the closed disk).
    pub fn eval_ball(&self, z: CBall) -> Result<CBall> {
        let w = hat_omega_ball(z, &self.cover.arcs)?;
        let zmax = z.mid.norm() + z.radius;
        let harnack = if zmax < 1.0 {
            q_to_f64(&self.a_prime) * (1.0 - zmax) / (1.0 + zmax) * (1.0 - 1e-12)
        } else {
            0.0
        };
        let m = w.mid.norm();
        let lower = (m - w.radius).max(harnack);
        if !(lower > 0.0) {
            return Ok(CBall::new(w.mid, f64::INFINITY));
        }
        let upper = m + w.radius;
        let (ln_lo, ln_hi) = (lower.ln(), upper.ln());
        let (arg_lo, arg_hi) = if w.radius < m {
            let spread = (w.radius / m).asin();
            let c = w.mid.arg();
            ((c - spread).max(-0.5 * PI), (c + spread).min(0.5 * PI))
        } else {
            (-0.5 * PI, 0.5 * PI)
        };
        let la = self.ln_a_prime();
        let re = 0.5 * (ln_lo + ln_hi) - la.value;
        let im = 0.5 * (arg_lo + arg_hi);
        let hr = 0.5 * (ln_hi - ln_lo) + la.radius + 4.0 * EPS * (ln_lo.abs() + ln_hi.abs() + la.value.abs());
        let hi_ = 0.5 * (arg_hi - arg_lo) + 4.0 * EPS;
        Ok(CBall::new(Complex64::new(re, im), add_up(hr.hypot(hi_), 0.0)))
    }

    pub fn eval(&self, z: Complex64) -> Result<CBall> {
        self.eval_ball(CBall::exact(z))
    }

    /// Certified lower bound on `min Re ψ(r e^{iθ})` over `θ ∈ G'`, or `None` if some
    /// cell is found below `target` or the cell budget runs out.
    pub fn min_re_on_rotated(&self, r: f64, target: f64) -> Option<f64> {
        let pad = 1e-14;
        let mut stack: Vec<(f64, f64)> = Vec::new();
        for (x, y) in self.cover.rotated.intervals_f64() {
            let (x, y) = (x - pad, y + pad);
            let k = (((y - x) / (0.25 * (1.0 - r).max(1e-6))).ceil() as usize).clamp(8, 1 << 16);
            for j in 0..k {
                let c0 = x + (y - x) * j as f64 / k as f64;
                let c1 = x + (y - x) * (j + 1) as f64 / k as f64;
                stack.push((c0, c1));
            }
        }
        let mut min = f64::INFINITY;
        let mut cells = 0usize;
        while !stack.is_empty() {
            cells += stack.len();
            if cells > MAX_CELLS {
                return None;
            }
            let results: Vec<(f64, f64, f64, f64)> = stack
                .par_iter()
                .map(|&(c0, c1)| {
                    let c = 0.5 * (c0 + c1);
                    let hw = 0.5 * (c1 - c0);
                    let ball = CBall::new(Complex64::from_polar(r, c), r * hw * (1.0 + 1e-12) + 4.0 * EPS);
                    match self.eval_ball(ball) {
                        Ok(v) => (c0, c1, v.re().lo(), v.mid.re),
                        Err(_) => (c0, c1, f64::NEG_INFINITY, f64::NEG_INFINITY),
                    }
                })
                .collect();
            let mut next = Vec::new();
            for (c0, c1, lo, mid) in results {
                if lo >= target {
                    min = min.min(lo);
                } else if mid < target || c1 - c0 < 1e-12 {
                    return None;
                } else {
                    let m = 0.5 * (c0 + c1);
                    next.push((c0, m));
                    next.push((m, c1));
                }
            }
            stack = next;
        }
        Some(min)
    }

    /// Certified upper bound on `max |ψ|` over the circle `|z| = rho < 1`.
    pub fn max_modulus_on_circle(&self, rho: f64) -> f64 {
        let k = ((16.0 * PI / (1.0 - rho)).ceil() as usize).max(64);
        let mut stack: Vec<(f64, f64)> = (0..k)
            .map(|j| (-PI + 2.0 * PI * j as f64 / k as f64, -PI + 2.0 * PI * (j + 1) as f64 / k as f64))
            .collect();
        let mut max: f64 = 0.0;
        let mut rounds = 0;
        while !stack.is_empty() && rounds < 30 {
            rounds += 1;
            let results: Vec<(f64, f64, f64)> = stack
                .par_iter()
                .map(|&(c0, c1)| {
                    let c = 0.5 * (c0 + c1);
                    let ball = CBall::new(Complex64::from_polar(rho, c), rho * 0.5 * (c1 - c0) * (1.0 + 1e-12) + 4.0 * EPS);
                    let v = self.eval_ball(ball).map(|v| v.mid.norm() + v.radius).unwrap_or(f64::INFINITY);
                    (c0, c1, v)
                })
                .collect();
            let mut next = Vec::new();
            for (c0, c1, v) in results {
                if v.is_finite() {
                    max = max.max(v);
                } else {
                    let m = 0.5 * (c0 + c1);
                    next.push((c0, m));
                    next.push((m, c1));
                }
            }
            stack = next;
        }
        if stack.is_empty() {
            max * (1.0 + 1e-12)
        } else {
            f64::INFINITY
        }
    }

    /// Maclaurin coefficients `c_0..=c_n` of `ψ` by the power-series logarithm
    /// recurrence `n b_0 c_n = n b_n - Σ_{0<k<n} k c_k b_{n-k}`.
    pub fn taylor(&self, n: usize) -> Vec<Complex64> {
        let b: Vec<Complex64> = hat_omega_taylor(&self.cover.arcs, n).into_iter().map(|x| x.mid).collect();
        let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
        for m in 1..=n {
            let mut s = b[m] * m as f64;
            for k in 1..m {
                s -= c[k] * b[m - k] * k as f64;
            }
            c[m] = s / (b[0] * m as f64);
        }
        c
    }
}

/// Everything the pipeline produces for one set `G`.
#[derive(Clone, Debug)]
pub struct KKOutput {
    pub psi: PsiHandle,
    pub r0: Q,
    pub r: TrigPoly,
    pub r_certificate: KKCertificate,
    pub p: TrigPoly,
    pub p_certificate: KKCertificate,
}

/// `-(s) ln a` as a ball.
fn log_target(a: &CertifiedReal, s: f64) -> CertifiedReal {
    a.ln().scale(-s)
}

pub fn build_r(g: &IntervalSet, opts: &KahaneOptions) -> Result<(TrigPoly, KKCertificate)> {
    let (_, r, cert, _) = build_r_inner(g, opts)?;
    Ok((r, cert))
}

fn build_r_inner(g: &IntervalSet, opts: &KahaneOptions) -> Result<(PsiHandle, TrigPoly, KKCertificate, Q)> {
    let psi = build_psi(g)?;
    let target5 = log_target(&psi.a, 5.0 / 8.0).hi();
    let target_r = log_target(&psi.a, 0.5);
    let mut j0 = None;
    for j in 1..=40u32 {
        let r0 = 1.0 - 2f64.powi(-(j as i32));
        if psi.min_re_on_rotated(r0, target5).is_some() {
            j0 = Some(j);
            break;
        }
    }
    let j0 = j0.ok_or_else(|| Error::PrecisionBudget("no r0 = 1 - 2^-j with j <= 40 certifies Re ψ(r0 ζ) on G'".into()))?;
    let mut last = None;
    for j in j0..j0 + 4 {
        let r0f = 1.0 - 2f64.powi(-(j as i32));
        let Some(min5) = psi.min_re_on_rotated(r0f, target5) else {
            continue;
        };
        let rho = 0.5 * (1.0 + r0f);
        let m = psi.max_modulus_on_circle(rho);
        let q = r0f / rho;
        let margin = (min5 - target_r.hi()).min(0.5 * PI) * 0.5;
        if !(m.is_finite() && margin > 0.0) {
            continue;
        }
        // Cauchy: |c_n| r0^n ≤ M q^n, so the tail after N is at most M q^{N+1}/(1-q).
        let n_est = ((margin * (1.0 - q) / m).ln() / q.ln()).ceil().max(1.0) as usize;
        if n_est > opts.max_degree {
            last = Some(Error::PrecisionBudget(format!(
                "truncation degree {n_est} exceeds the cap {} at r0 = 1 - 2^-{j}",
                opts.max_degree
            )));
            continue;
        }
        let r0 = Q::one() - pow2(-(j as i64));
        let r = r_polynomial(&psi, r0f, n_est, opts.bits);
        let tol = 0.05 * target_r.value.abs().max(0.1);
        let measured_min = r.min_real_part_on(g, tol);
        let sup_im = r.imag_part().sup_norm_certificate(0.05);
        let cert = KKCertificate {
            bound_target: target_r,
            measured_min,
            sup_norm: sup_im.scale(1.0 / PI).widen(4.0 * EPS),
            degree: r.degree(),
            r0: r0.clone(),
            n: n_est as u64,
            rotation: psi.cover.rotation.clone(),
            identity_exact: None,
            passed: false,
        }
        .decide();
        if cert.passed {
            return Ok((psi, r, cert, r0));
        }
        last = Some(Error::Certificate(format!(
            "R at r0 = 1 - 2^-{j}, N = {n_est}: min Re R {} vs {}, sup|Im R|/π {}",
            cert.measured_min, cert.bound_target, cert.sup_norm
        )));
    }
    Err(last.unwrap_or_else(|| Error::PrecisionBudget("could not bound ψ on the Cauchy circle".into())))
}

/// `R(t) = Σ_{n=1}^{N} c_n(ψ) r0^n e^{in(t + rotation)}` on the dyadic grid `2^-bits`.
fn r_polynomial(psi: &PsiHandle, r0: f64, n: usize, bits: u32) -> TrigPoly {
    let c = psi.taylor(n);
    let rot = q_to_f64(&psi.cover.rotation) * PI;
    TrigPoly::from_f64_dyadic(
        (1..=n).map(|k| {
            let z = c[k] * r0.powi(k as i32) * Complex64::from_polar(1.0, k as f64 * rot);
            (k as i64, z)
        }),
        bits,
    )
}

/// Rational approximation of `1/π` accurate to about 2^-130.
pub fn inv_pi_rational() -> Q {
    let (_, hi) = pi_enclosure(140);
    let scale = pow2(130);
    let x = (Q::one() / hi * &scale).round() / scale;
    debug_assert!(x > Q::zero());
    x
}

/// `p = q_π e_{-N} Im R` with `q_π ≈ 1/π`.
pub fn p_from_r(r: &TrigPoly, n: u64) -> TrigPoly {
    r.imag_part().shift(-(n as i64)).scale_q(&inv_pi_rational())
}

pub fn build_p(g: &IntervalSet, opts: &KahaneOptions) -> Result<(TrigPoly, KKCertificate)> {
    let out = run_pipeline(g, opts)?;
    Ok((out.p, out.p_certificate))
}

pub fn run_pipeline(g: &IntervalSet, opts: &KahaneOptions) -> Result<KKOutput> {
    let (psi, r, r_cert, r0) = build_r_inner(g, opts)?;
    let n = r.degree();
    let p = p_from_r(&r, n);
    let sn = p.partial_sum(n);
    let half_i = QComplex::new(Q::zero(), Q::new(BigInt::from(-1), BigInt::from(2)));
    let expect = r.shift(-(n as i64)).scale(&half_i).scale_q(&inv_pi_rational());
    let identity = sn == expect;
    let bound_target = log_target(&psi.a, 1.0 / (4.0 * PI));
    let tol = 0.05 * bound_target.value.abs().max(0.01);
    let measured_min = sn.min_modulus_on(g, tol);
    let sup_norm = p.sup_norm_certificate(0.02);
    let p_cert = KKCertificate {
        bound_target,
        measured_min,
        sup_norm,
        degree: p.degree(),
        r0: r0.clone(),
        n,
        rotation: psi.cover.rotation.clone(),
        identity_exact: Some(identity),
        passed: false,
    }
    .decide();
    Ok(KKOutput { psi, r0, r, r_certificate: r_cert, p, p_certificate: p_cert })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn centred(a: Q) -> IntervalSet {
        IntervalSet::from_pi_multiples(&[(-a.clone(), a)]).unwrap()
    }

    #[test]
    fn cover_of_centred_interval() {
        let g = centred(q(1, 64));
        let c = choose_cover(&g).unwrap();
        assert_eq!(c.arcs.arcs().len(), 1);
        let ap = c.arcs.total();
        let a = q(1, 64);
        assert!(ap > a);
        assert!(&ap * &ap * &ap * &ap <= &a * &a * &a);
        assert!(c.delta > Q::zero());
        assert_eq!(c.rotation, Q::zero());
    }

    #[test]
    fn cover_of_two_far_intervals() {
        let g = IntervalSet::from_pi_multiples(&[(q(-9, 16), q(-7, 16)), (q(7, 16), q(9, 16))]).unwrap();
        let c = choose_cover(&g).unwrap();
        assert_eq!(c.arcs.arcs().len(), 2);
        for arc in c.arcs.arcs() {
            let meets = c.rotated.intervals().iter().any(|(x, y)| {
                Angle::pi_multiple(arc.t1.clone()) < *y && *x < Angle::pi_multiple(arc.t2.clone())
            });
            assert!(meets);
        }
    }

    #[test]
    fn rotation_moves_gap_to_minus_one() {
        let g = IntervalSet::from_pi_multiples(&[(q(7, 8), q(1, 1)), (q(-1, 1), q(-7, 8))]).unwrap();
        let c = choose_cover(&g).unwrap();
        assert_eq!(c.rotated.len(), 1);
        let (x, y) = &c.rotated.intervals()[0];
        assert!(x.to_f64().abs() < 0.5 && y.to_f64().abs() < 0.5);
    }

    #[test]
    fn rejects_empty_and_full() {
        assert!(matches!(choose_cover(&IntervalSet::empty()), Err(Error::Domain(_))));
        let full = IntervalSet::from_pi_multiples(&[(q(-1, 1), q(1, 1))]).unwrap();
        assert!(matches!(choose_cover(&full), Err(Error::InfeasibleCover(_))));
    }

    #[test]
    fn psi_vanishes_at_origin() {
        let psi = build_psi(&centred(q(1, 64))).unwrap();
        let v = psi.eval(Complex64::new(0.0, 0.0)).unwrap();
        assert!(v.contains(Complex64::new(0.0, 0.0)));
        assert!(v.radius < 1e-12);
    }

    #[test]
    fn psi_bounds_on_g() {
        let a = q(1, 256);
        let psi = build_psi(&centred(a.clone())).unwrap();
        let target = 0.75 * 8.0 * std::f64::consts::LN_2;
        assert!(psi.min_re_on_rotated(1.0, target).is_some());
        for k in 0..50 {
            let t = -PI / 256.0 + (2.0 * PI / 256.0) * k as f64 / 49.0;
            let v = psi.eval(Complex64::from_polar(1.0, t)).unwrap();
            assert!(v.mid.im.abs() < 0.5 * PI);
        }
    }

    #[test]
    fn psi_series_matches_direct_evaluation() {
        let psi = build_psi(&centred(q(1, 16))).unwrap();
        let c = psi.taylor(400);
        assert!(c[0].norm() < 1e-14);
        for &(r, t) in &[(0.5, 0.3), (0.7, -2.0), (0.8, 3.0)] {
            let z = Complex64::from_polar(r, t);
            let series: Complex64 = c.iter().enumerate().map(|(n, cn)| cn * z.powi(n as i32)).sum();
            let direct = psi.eval(z).unwrap();
            assert!((series - direct.mid).norm() < 1e-9, "r={r} t={t}");
        }
    }

    #[test]
    fn p_certificate_passes_for_a_sixteenth() {
        let g = centred(q(1, 16));
        let out = run_pipeline(&g, &KahaneOptions::default()).unwrap();
        assert!(out.r_certificate.passed, "{:?}", out.r_certificate);
        assert!(out.p_certificate.passed, "{:?}", out.p_certificate);
        assert_eq!(out.r.fourier_coeff(0), QComplex::zero());
        assert!(out.r.is_analytic());
        let n = out.r.degree() as i64;
        let (lo, hi) = out.p.support().unwrap();
        assert!(lo >= -2 * n && hi <= 0);
        let s = serde_json::to_value(&out.p_certificate).unwrap();
        for key in ["bound_target", "measured_min", "sup_norm", "r0", "N", "rotation"] {
            assert!(s.get(key).is_some(), "{key}");
        }
    }
}
