//! Verification suites. Each suite returns a [`SuiteReport`] whose checks carry
//! a target and a measured value.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ball::{CertifiedReal, EPS};
use crate::error::{Error, Result};
use crate::harmonic::{self, ArcSet};
use crate::intervals::IntervalSet;
use crate::kahane::{run_pipeline, KahaneOptions};
use crate::maximal::{exceptional_measure_estimate, fefferman_modulus, AeModulus, FeffermanConfig, Provenance};
use crate::names::{
    chebyshev_step_bound, interleave, measured_step, merge_names, subsequence_modulus, CauchyName, Family,
    PolySequence,
};
use crate::quad::{integrate, QuadOptions};
use crate::rational::{pow2, q, q_to_f64, QComplex, Q};
use crate::schnorr::{
    assemble_divergence, cantor_pair, cesaro_divergence_demo, eval_integral_test, integral_test_from_modulus,
    lsc_from_null_cover, verify_gap, IntegralTest, SchnorrTest,
};
use crate::trigpoly::{fejer_kernel, random_trig_poly, TrigPoly};

pub const SUITE_NAMES: [&str; 9] = [
    "parseval",
    "harmonic",
    "taylor",
    "kahane",
    "divergence",
    "fefferman-modulus",
    "integral-test",
    "subsequence",
    "fejer",
];

pub const DEFAULT_SEED: u64 = 20_240_611;

/// One bound claim: `measured <relation> target`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub relation: String,
    pub target: CertifiedReal,
    pub measured: CertifiedReal,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, relation: &str, target: CertifiedReal, measured: CertifiedReal, passed: bool) -> Self {
        Self { name: name.into(), relation: relation.into(), target, measured, passed }
    }

    /// `measured ≤ target` with both sides as plain floats.
    fn at_most(name: impl Into<String>, measured: f64, target: f64) -> Self {
        Self::new(name, "<=", CertifiedReal::exact(target), CertifiedReal::exact(measured), measured <= target)
    }

    fn below(name: impl Into<String>, measured: f64, target: f64) -> Self {
        Self::new(name, "<", CertifiedReal::exact(target), CertifiedReal::exact(measured), measured < target)
    }

    /// `passed` out of `total` cases.
    fn count(name: impl Into<String>, passed: usize, total: usize) -> Self {
        Self::new(
            name,
            "==",
            CertifiedReal::exact(total as f64),
            CertifiedReal::exact(passed as f64),
            passed == total,
        )
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub seconds: f64,
}

impl SuiteReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

pub fn is_suite(name: &str) -> bool {
    SUITE_NAMES.contains(&name)
}

pub fn run_suite(name: &str, seed: u64) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checks = match name {
        "parseval" => parseval(&mut rng)?,
        "harmonic" => harmonic_suite(&mut rng)?,
        "taylor" => taylor(&mut rng)?,
        "kahane" => kahane()?,
        "divergence" => divergence()?,
        "fefferman-modulus" => fefferman()?,
        "integral-test" => integral()?,
        "subsequence" => subsequence(&mut rng)?,
        "fejer" => fejer(&mut rng)?,
        other => return Err(Error::Parse(format!("unknown suite '{other}'"))),
    };
    let passed = checks.iter().all(|c| c.passed);
    Ok(SuiteReport { suite: name.into(), seed, checks, passed, seconds: start.elapsed().as_secs_f64() })
}

fn parseval(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let polys: Vec<TrigPoly> = (0..500)
        .map(|_| {
            let d = rng.gen_range(0..=32);
            random_trig_poly(rng, d, 64)
        })
        .collect();
    let cuts: Vec<u64> = (0..500).map(|_| rng.gen_range(0..=32)).collect();
    let two = q(2, 1);
    let mut exact = 0;
    let mut enclosed = 0;
    let mut rebuilt = 0;
    let mut split = 0;
    let mut worst_sampling: f64 = 0.0;
    for (p, &cut) in polys.iter().zip(&cuts) {
        let sum = p.coeffs().fold(Q::from_integer(0.into()), |acc, (_, c)| acc + c.norm_sqr());
        exact += (p.l2_norm_sq() == sum) as usize;
        let norm = p.lp_norm(&two, 1e-12)?;
        enclosed += (norm * norm).contains_q(&sum) as usize;

        // |p|² has frequencies below 2·33, so 256 equispaced samples average it exactly.
        let m = 256;
        let mean: f64 = (0..m).map(|i| p.eval(2.0 * PI * i as f64 / m as f64).mid.norm_sqr()).sum::<f64>() / m as f64;
        let s = q_to_f64(&sum);
        worst_sampling = worst_sampling.max((mean - s).abs() / s.max(1.0));

        let d = p.degree() as i64;
        let from_coeffs = TrigPoly::from_coeffs((-d..=d).map(|n| (n, p.fourier_coeff(n))));
        rebuilt += (from_coeffs == *p && p.partial_sum(p.degree()) == *p) as usize;
        let low = p.partial_sum(cut);
        let high = p.sub(&low);
        let low_ok = low.coeffs().all(|(n, c)| n.unsigned_abs() <= cut && *c == p.fourier_coeff(n));
        let high_ok = high.coeffs().all(|(n, _)| n.unsigned_abs() > cut);
        split += (low_ok && high_ok && low.add(&high) == *p) as usize;
    }
    Ok(vec![
        Check::count("l2 norm squared equals coefficient sum exactly", exact, polys.len()),
        Check::count("lp_norm(2) squared encloses coefficient sum", enclosed, polys.len()),
        Check::at_most("sampled mean of |p|^2 vs coefficient sum (relative)", worst_sampling, 1e-12),
        Check::count("reconstruction from coefficients", rebuilt, polys.len()),
        Check::count("partial sum keeps exactly the low band", split, polys.len()),
    ])
}

fn random_arc_set(rng: &mut ChaCha8Rng) -> Result<ArcSet> {
    let k = rng.gen_range(1..=3);
    let mut ends: Vec<i64> = Vec::new();
    while ends.len() < 2 * k {
        let e = rng.gen_range(-63..=63);
        if !ends.contains(&e) {
            ends.push(e);
        }
    }
    ends.sort_unstable();
    let arcs = ends
        .chunks(2)
        .map(|w| harmonic::Arc::new(q(w[0], 64), q(w[1], 64)))
        .collect::<Result<Vec<_>>>()?;
    ArcSet::new(arcs)
}

fn random_point(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    let r = radius * rng.gen::<f64>().sqrt();
    Complex64::from_polar(r, rng.gen_range(-PI..PI))
}

fn harmonic_suite(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let cases: Vec<(Complex64, ArcSet)> =
        (0..200).map(|_| Ok((random_point(rng, 0.9), random_arc_set(rng)?))).collect::<Result<_>>()?;
    let diffs = cases
        .par_iter()
        .map(|(z, set)| {
            let a = harmonic::harmonic_measure(*z, set)?;
            let b = harmonic::poisson_oracle(*z, set, 1e-10)?;
            Ok((a.value - b.value).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    let worst = diffs.iter().cloned().fold(0.0, f64::max);
    let mut worst_origin: f64 = 0.0;
    for (_, set) in &cases {
        let w = harmonic::harmonic_measure(Complex64::new(0.0, 0.0), set)?;
        worst_origin = worst_origin.max((w.value - q_to_f64(&set.total())).abs());
    }
    Ok(vec![
        Check::at_most("harmonic_measure vs Poisson quadrature, 200 points", worst, 1e-7),
        Check::at_most("omega(0) vs normalized arc length", worst_origin, 1e-12),
    ])
}

fn taylor(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    const N: usize = 64;
    let mut coeff_err: f64 = 0.0;
    let mut series_excess = f64::NEG_INFINITY;
    let mut series_err: f64 = 0.0;
    for _ in 0..8 {
        let set = random_arc_set(rng)?;
        let b = harmonic::hat_omega_taylor(&set, N - 1);

        // Trapezoid rule on |z| = 0.9; aliasing from b_{n+M} is below 0.9^2048.
        let (rho, m) = (0.9, 2048usize);
        let samples = (0..m)
            .into_par_iter()
            .map(|j| harmonic::hat_omega(Complex64::from_polar(rho, 2.0 * PI * j as f64 / m as f64), &set).map(|v| v.mid))
            .collect::<Result<Vec<_>>>()?;
        for (n, bn) in b.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, v) in samples.iter().enumerate() {
                acc += v * Complex64::from_polar(1.0, -2.0 * PI * (j * n % m) as f64 / m as f64);
            }
            let c = acc / (m as f64 * rho.powi(n as i32));
            coeff_err = coeff_err.max((c - bn.mid).norm());
        }

        // |b_n| ≤ 2K/(πn) gives the tail Σ_{n ≥ N} |b_n| ρ^n ≤ 2K ρ^N / (π N (1 - ρ)).
        let k = set.arcs().len() as f64;
        let half: f64 = 0.5;
        let tail = 2.0 * k * half.powi(N as i32) / (PI * N as f64 * (1.0 - half));
        for j in 0..64 {
            let z = Complex64::from_polar(half, 2.0 * PI * j as f64 / 64.0);
            let mut s = Complex64::new(0.0, 0.0);
            let mut radii = 0.0;
            let mut mags = 0.0;
            let mut zn = Complex64::new(1.0, 0.0);
            for bn in &b {
                s += bn.mid * zn;
                radii += bn.radius * zn.norm();
                mags += bn.mid.norm() * zn.norm();
                zn *= z;
            }
            let exact = harmonic::hat_omega(z, &set)?;
            let allowed = tail + radii + exact.radius + 4.0 * N as f64 * EPS * mags;
            let err = (s - exact.mid).norm();
            series_err = series_err.max(err);
            series_excess = series_excess.max(err - allowed);
        }
    }
    Ok(vec![
        Check::below("first 64 coefficients vs contour quadrature", coeff_err, 1e-8),
        Check::new(
            "truncated series at |z| = 1/2 minus its tail bound",
            "<=",
            CertifiedReal::exact(0.0),
            CertifiedReal::exact(series_excess),
            series_excess <= 0.0,
        ),
        Check::below("truncated series at |z| = 1/2, absolute", series_err, 1e-12),
    ])
}

/// Test sets of normalized measure `a`: one interval around 0, or two around ±π/2.
pub fn kahane_test_set(a: &Q, two: bool) -> Result<IntervalSet> {
    if two {
        let h = a / Q::from_integer(2.into());
        let c = q(1, 2);
        IntervalSet::from_pi_multiples(&[(-&c - &h, -&c + &h), (&c - &h, &c + &h)])
    } else {
        IntervalSet::from_pi_multiples(&[(-a.clone(), a.clone())])
    }
}

fn kahane() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for e in [4i64, 6, 8] {
        for two in [false, true] {
            let a = pow2(-e);
            let g = kahane_test_set(&a, two)?;
            let label = format!("a = 2^-{e}, {}", if two { "two intervals" } else { "one interval" });
            let out = run_pipeline(&g, &KahaneOptions::default())?;
            let cert = &out.p_certificate;
            checks.push(Check::new(
                format!("{label}: min of Carleson maximal function on G (degree {})", cert.degree),
                ">=",
                cert.bound_target,
                cert.measured_min,
                cert.measured_min.lo() >= cert.bound_target.hi(),
            ));
            checks.push(Check::new(
                format!("{label}: sup norm of p"),
                "<",
                CertifiedReal::exact(1.0),
                cert.sup_norm,
                cert.sup_norm.hi() < 1.0,
            ));
            let sn = out.p.partial_sum(cert.n);
            let worst = (0..1000)
                .into_par_iter()
                .map(|i| {
                    let t = -PI + 2.0 * PI * (i as f64 + 0.5) / 1000.0;
                    (sn.eval(t).mid.norm() - out.r.eval(t).mid.norm() / (2.0 * PI)).abs()
                })
                .reduce(|| 0.0, f64::max);
            checks.push(Check::at_most(format!("{label}: |S_N(p)| vs |R|/(2 pi) at 1000 points"), worst, 1e-9));
        }
    }
    Ok(checks)
}

fn divergence() -> Result<Vec<Check>> {
    let t0 = q(1, 3);
    let test = SchnorrTest::rational_point(t0.clone())?;
    let asm = assemble_divergence(&test, 1, 1, &KahaneOptions::default())?;
    let mut checks = Vec::new();
    for cell in &asm.report.cells {
        checks.push(Check::new(
            format!("measure of G_({},{}) = {}", cell.n, cell.k, cell.measure),
            "<",
            CertifiedReal::from_q(&pow2(-(1i64 << (cell.n + cell.k)))),
            cell.g.measure().to_ball(),
            cell.measure_ok,
        ));
        checks.push(Check::new(
            format!("cell ({},{}) certificate", cell.n, cell.k),
            "==",
            CertifiedReal::exact(1.0),
            CertifiedReal::exact(cell.passed() as u8 as f64),
            cell.passed(),
        ));
    }
    for floor in [0, cantor_pair(1, 0)] {
        let w = verify_gap(&asm, &t0, floor)?;
        checks.push(Check::new(
            format!("gap at t0 = 1/3, floor {floor}: cell ({},{}), M = {}, N = {}", w.n, w.k, w.m, w.big_n),
            ">",
            w.target,
            w.gap,
            w.gap.lo() > w.target.hi(),
        ));
    }
    Ok(checks)
}

/// `f = Σ_{j ≤ 24} 2^{-j/2-1} e_j`, rounded to dyadics at `2^{-60}`.
pub fn fefferman_test_vector() -> TrigPoly {
    TrigPoly::from_f64_dyadic((0..=24).map(|j| (j, Complex64::new(2f64.powf(-(j as f64) / 2.0 - 1.0), 0.0))), 60)
}

fn fefferman() -> Result<Vec<Check>> {
    let f = fefferman_test_vector();
    let seq = PolySequence::family(Family::PartialSums { poly: f.clone(), stride: 2, offset: 1 });
    let name = Arc::new(CauchyName::new(seq, q(2, 1))?);
    let eta = fefferman_modulus(name, &FeffermanConfig::default());
    let deg = f.degree();
    let grid = 1 << 14;
    let mut checks = Vec::new();
    for k in 0..3u32 {
        for m in 0..4u32 {
            let n0 = eta.eval(k, m);
            let measure = if n0 >= deg { 0.0 } else { exceptional_measure_estimate(&f, k, n0, deg, grid)? };
            checks.push(Check::below(format!("mu(E) at k = {k}, m = {m}, eta = {n0}"), measure, 2f64.powi(-(m as i32))));
        }
    }
    Ok(checks)
}

/// `f_n = (-1)^n (9/64) F_{n+1}/(n+1)`, whose value at 0 alternates between ±9/64.
pub fn oscillating_sequence() -> PolySequence {
    PolySequence::generator(|n| {
        let m = n as i64 + 1;
        let sign = if n % 2 == 0 { 1 } else { -1 };
        TrigPoly::from_coeffs((-(m - 1)..=(m - 1)).map(|j| {
            let c = Q::new((sign * 9 * (m - j.abs())).into(), (64 * m * m).into());
            (j, QComplex::real(c))
        }))
    })
}

fn linear_modulus() -> AeModulus {
    AeModulus::from_fn(|k, m| (k + m) as u64, Provenance::Table)
}

fn integral() -> Result<Vec<Check>> {
    let f = fefferman_test_vector();
    let regression: Vec<(&str, IntegralTest)> = vec![
        (
            "partial sums of the test vector",
            integral_test_from_modulus(
                PolySequence::family(Family::PartialSums { poly: f, stride: 2, offset: 1 }),
                linear_modulus(),
            ),
        ),
        ("geometric family", integral_test_from_modulus(PolySequence::family(Family::Geometric), linear_modulus())),
    ];
    let mut checks = Vec::new();
    for (label, t) in &regression {
        let mut bounded = 0;
        let mut worst_ratio: f64 = 0.0;
        for k in 0..=12 {
            let v = t.term_integral(k);
            let bound = q_to_f64(&t.term_tail_bound(k));
            bounded += (v.hi() <= bound) as usize;
            worst_ratio = worst_ratio.max(v.hi() / bound);
        }
        checks.push(Check::count(format!("{label}: integral of g_k within 2^(4-k), k <= 12"), bounded, 13));
        checks.push(Check::at_most(format!("{label}: worst ratio to 2^(4-k)"), worst_ratio, 1.0));
    }
    let cover = lsc_from_null_cover(SchnorrTest::rational_point(q(1, 3))?);
    let mut all: Vec<(&str, &IntegralTest)> = regression.iter().map(|(l, t)| (*l, t)).collect();
    all.push(("indicator cover at 1/3", &cover));
    for (label, t) in all {
        let bounds: Vec<(f64, f64)> = (1..=13).map(|d| t.integral_bounds(d)).collect();
        let nested = bounds.windows(2).filter(|w| w[1].0 >= w[0].0 && w[1].1 <= w[0].1).count();
        let shrinking = bounds.windows(2).filter(|w| w[1].1 - w[1].0 < w[0].1 - w[0].0).count();
        checks.push(Check::count(format!("{label}: enclosures nested, depth 1..13"), nested, 12));
        checks.push(Check::count(format!("{label}: enclosure widths shrink"), shrinking, 12));
    }
    let osc = integral_test_from_modulus(oscillating_sequence(), linear_modulus());
    let e = eval_integral_test(&osc, &q(0, 1), 20);
    let mut prev = 0.0;
    let mut min_step = f64::INFINITY;
    for p in &e.partials {
        min_step = min_step.min(p - prev);
        prev = *p;
    }
    checks.push(Check::new(
        "oscillating sequence: smallest growth per window at t0 = 0, d <= 20",
        ">=",
        CertifiedReal::exact(0.25),
        CertifiedReal::exact(min_step),
        min_step >= 0.25,
    ));
    Ok(checks)
}

/// A name whose steps `τ_{n+1} - τ_n` have three random frequencies with
/// coefficients of modulus at most `2^{-n-3}`, so every `L^p` step is below `2^{-n-1}`.
pub fn random_name(rng: &mut ChaCha8Rng, len: usize, p: Q) -> Result<CauchyName> {
    let mut terms = vec![TrigPoly::zero()];
    for n in 0..len {
        let step = TrigPoly::from_coeffs((0..3).map(|_| {
            let j = rng.gen_range(-12..=12);
            let c = Q::new(rng.gen_range(-64..=64i64).into(), 64.into()) * pow2(-(n as i64) - 3);
            (j, QComplex::real(c))
        }));
        let next = terms.last().expect("nonempty").add(&step);
        terms.push(next);
    }
    CauchyName::new(PolySequence::explicit(terms)?, p)
}

fn subsequence(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let v2 = subsequence_modulus(&q(2, 1))?.eval(3, 5);
    let v1 = subsequence_modulus(&q(1, 1))?.eval(0, 0);
    checks.push(Check::count("formula at p = 2, k = 3, m = 5 gives 4", (v2 == 4) as usize, 1));
    checks.push(Check::count("formula at p = 1, k = 0, m = 0 gives 1", (v1 == 1) as usize, 1));

    let exponents = [q(1, 1), q(3, 2), q(2, 1), q(3, 1)];
    let names: Vec<CauchyName> =
        (0..20).map(|i| random_name(rng, 10, exponents[i % 4].clone())).collect::<Result<_>>()?;
    let results = names
        .par_iter()
        .map(|name| {
            let mut cases = 0;
            let mut ok = 0;
            let mut worst = f64::NEG_INFINITY;
            for n in 0..4usize {
                for r in 0..=(2 * n as u32 + 2) {
                    let bound = chebyshev_step_bound(name, n, r)?;
                    let measured = measured_step(name, n, r, 4096)?;
                    cases += 1;
                    ok += (measured <= bound.lo()) as usize;
                    worst = worst.max(measured - bound.lo());
                }
            }
            Ok((cases, ok, worst))
        })
        .collect::<Result<Vec<_>>>()?;
    let cases: usize = results.iter().map(|r| r.0).sum();
    let ok: usize = results.iter().map(|r| r.1).sum();
    checks.push(Check::count("Chebyshev bound dominates measured step, 20 names", ok, cases));

    // Two names of the test vector: τ_n = S_{2n+1}(f) and σ_n = S_{2n+2}(f).
    let f = fefferman_test_vector();
    let even_tau = PolySequence::family(Family::PartialSums { poly: f.clone(), stride: 4, offset: 1 });
    let even_sigma = PolySequence::family(Family::PartialSums { poly: f.clone(), stride: 4, offset: 2 });
    let eta = subsequence_modulus(&q(2, 1))?;
    let merged = merge_names(&eta, &eta);
    let h = interleave(&even_tau, &even_sigma);
    let idx = merged.eval(2, 3);
    // Terms past idx are partial sums of degree at least deg(h_idx).
    let n0 = h.get(idx as usize).degree();
    let measure = if n0 >= f.degree() { 0.0 } else { exceptional_measure_estimate(&f, 2, n0, f.degree(), 1 << 14)? };
    checks.push(Check::below(format!("interleaved names at (k, m) = (2, 3), eta = {idx}"), measure, 0.125));
    Ok(checks)
}

fn fejer(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let worst_one = (0..1001).map(|i| (fejer_kernel(1, -PI + 2.0 * PI * i as f64 / 1000.0) - 1.0).abs()).fold(0.0, f64::max);
    checks.push(Check::at_most("F_1 is identically 1", worst_one, 4.0 * EPS));

    let opts = QuadOptions { abs_tol: 1e-12, max_panels: 100_000 };
    let mut worst_mass: f64 = 0.0;
    for n in 1..=32u64 {
        let v = integrate(|x| fejer_kernel(n, x), -PI, PI, &[0.0], opts)? / CertifiedReal::two_pi();
        worst_mass = worst_mass.max((v.value - 1.0).abs() + v.radius);
    }
    checks.push(Check::at_most("normalized integral of F_N, N <= 32", worst_mass, 1e-9));

    let polys: Vec<TrigPoly> = (0..20)
        .map(|_| {
            let d = rng.gen_range(0..=8);
            random_trig_poly(rng, d, 32)
        })
        .collect();
    let points = [-2.5, -1.0, 0.0, 0.7, 2.9];
    let opts = QuadOptions { abs_tol: 1e-11, max_panels: 100_000 };
    let mut worst_damp: f64 = 0.0;
    for p in &polys {
        for n in [0u64, 1, 3, 7, 15] {
            let sigma = p.cesaro_mean(n);
            for &t in &points {
                let direct = sigma.eval(t).mid;
                let re = integrate(|x| p.eval(t - x).mid.re * fejer_kernel(n + 1, x), -PI, PI, &[0.0], opts)?;
                let im = integrate(|x| p.eval(t - x).mid.im * fejer_kernel(n + 1, x), -PI, PI, &[0.0], opts)?;
                let conv = Complex64::new(re.value, im.value) / (2.0 * PI);
                worst_damp = worst_damp.max((direct - conv).norm());
            }
        }
    }
    checks.push(Check::at_most("coefficient damping vs Fejér convolution", worst_damp, 1e-7));

    let t0 = q(1, 3);
    let test = lsc_from_null_cover(SchnorrTest::rational_point(t0.clone())?);
    let n_max = 256;
    let rows: Vec<Vec<CertifiedReal>> = (1..=4)
        .map(|d| Ok(cesaro_divergence_demo(&test, &t0, n_max, d)?.into_iter().map(|r| r.value).collect()))
        .collect::<Result<_>>()?;
    let mut monotone = 0;
    let mut total = 0;
    for w in rows.windows(2) {
        for (a, b) in w[0].iter().zip(&w[1]) {
            total += 1;
            monotone += (b.hi() >= a.lo() && b.value >= a.value - (a.radius + b.radius)) as usize;
        }
    }
    checks.push(Check::count("Cesàro lower bounds nondecreasing in depth", monotone, total));
    for (i, r) in rows.iter().enumerate() {
        let d = i + 1;
        let last = r[n_max as usize];
        checks.push(Check::new(
            format!("sigma_{n_max} lower bound at depth {d}"),
            ">=",
            CertifiedReal::exact((d - 1) as f64),
            last,
            last.lo() >= (d - 1) as f64,
        ));
    }
    Ok(checks)
}
