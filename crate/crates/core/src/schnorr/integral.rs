//! Integral tests `T = Σ_k g_k` with `0 ≤ g_k ≤ 1` and computable `∫T`.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;

use super::SchnorrTest;
use crate::ball::{add_down, add_up, CBall, CertifiedReal, EPS};
use crate::maximal::AeModulus;
use crate::names::PolySequence;
use crate::rational::{pow2, q_to_f64, Q};
use crate::trigpoly::TrigPoly;

/// Largest grid used for one term integral.
const MAX_GRID: usize = 1 << 16;

#[derive(Clone)]
enum Kind {
    /// `g_k = min(1, max_{N_k < M,N ≤ N_{k+1}} |f_M - f_N|)` with `N_k = η(k,k)`.
    Window { seq: PolySequence, eta: AeModulus },
    /// `g_k = χ_{U_k}`.
    Cover { test: SchnorrTest },
}

/// A Schnorr integral test. Integrals use the normalized measure `dt/(2π)`.
#[derive(Clone)]
pub struct IntegralTest {
    kind: Kind,
}

impl fmt::Debug for IntegralTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Window { eta, .. } => f.debug_struct("IntegralTest::Window").field("eta", eta).finish(),
            Kind::Cover { test } => f.debug_struct("IntegralTest::Cover").field("test", test).finish(),
        }
    }
}

/// Telescoping test built from a sequence and a modulus of a.e. convergence.
pub fn integral_test_from_modulus(seq: PolySequence, eta: AeModulus) -> IntegralTest {
    IntegralTest { kind: Kind::Window { seq, eta } }
}

/// `T = Σ_n χ_{U_n}`, lower semicontinuous with `∫T ≤ Σ 2^{-n}/(2π)`.
pub fn lsc_from_null_cover(test: SchnorrTest) -> IntegralTest {
    IntegralTest { kind: Kind::Cover { test } }
}

impl IntegralTest {
    /// Index window `(N_k, N_{k+1}]` of term `k`, for the telescoping kind.
    pub fn window(&self, k: u32) -> Option<(u64, u64)> {
        match &self.kind {
            Kind::Window { eta, .. } => Some((eta.eval(k, k), eta.eval(k + 1, k + 1))),
            Kind::Cover { .. } => None,
        }
    }

    /// Nonzero differences `f_M - f_N` over the window of term `k`.
    fn window_diffs(&self, k: u32) -> Vec<TrigPoly> {
        match &self.kind {
            Kind::Window { seq, eta } => {
                let (a, b) = (eta.eval(k, k), eta.eval(k + 1, k + 1));
                let polys: Vec<_> = (a + 1..=b).map(|i| seq.get(i as usize)).collect();
                let mut out = Vec::new();
                for (i, p) in polys.iter().enumerate() {
                    for q in &polys[i + 1..] {
                        let d = p.sub(q);
                        if !d.is_zero() && !out.contains(&d) {
                            out.push(d);
                        }
                    }
                }
                out
            }
            Kind::Cover { .. } => Vec::new(),
        }
    }

    /// Rational bound on `∫g_k`.
    pub fn term_tail_bound(&self, k: u32) -> Q {
        match &self.kind {
            Kind::Window { .. } => pow2(4 - k as i64),
            // μ(U_k)/(2π) ≤ 2^{-k}/(2π) < 2^{-k-2}.
            Kind::Cover { .. } => pow2(-(k as i64) - 2),
        }
    }

    /// Enclosure of `g_k(t)`.
    pub fn term(&self, k: u32, t: &Q) -> CertifiedReal {
        match &self.kind {
            Kind::Window { .. } => {
                let tb = CertifiedReal::from_q(t);
                spread(&self.window_diffs(k), |d| d.eval_ball(tb))
            }
            Kind::Cover { test } => match test.interior_membership(k, t) {
                Some(true) => CertifiedReal::exact(1.0),
                Some(false) => CertifiedReal::exact(0.0),
                None => CertifiedReal::hull(0.0, 1.0),
            },
        }
    }

    /// A function `h ≤ g_k` on floats, with breakpoints for quadrature.
    pub(crate) fn lower_term(&self, k: u32) -> LowerTerm {
        match &self.kind {
            Kind::Window { .. } => LowerTerm::Spread(self.window_diffs(k)),
            Kind::Cover { test } => LowerTerm::Pieces(test.inner_pieces(k)),
        }
    }

    /// Enclosure of `∫g_k` under the normalized measure.
    pub fn term_integral(&self, k: u32) -> CertifiedReal {
        match &self.kind {
            Kind::Window { .. } => {
                let diffs = self.window_diffs(k);
                if diffs.is_empty() {
                    return CertifiedReal::exact(0.0);
                }
                grid_integral(&diffs, 2f64.powi(-(k as i32) - 12))
            }
            Kind::Cover { test } => {
                let two_pi = CertifiedReal::two_pi();
                let lo = CertifiedReal::from_q(&test.level_measure_lower(k)) / two_pi;
                let hi = CertifiedReal::from_q(&test.level_measure_exact(k)) / two_pi;
                CertifiedReal::hull(lo.lo().max(0.0), hi.hi())
            }
        }
    }

    /// Enclosure of `∫T`: exact terms below `depth` plus the tail bounds beyond.
    pub fn integral(&self, depth: u32) -> CertifiedReal {
        let (lo, hi) = self.integral_bounds(depth);
        CertifiedReal::hull(lo, hi)
    }

    /// Endpoints of the enclosure returned by [`IntegralTest::integral`].
    pub fn integral_bounds(&self, depth: u32) -> (f64, f64) {
        let mut lo = 0.0;
        let mut hi = 0.0;
        for k in 0..depth {
            let v = self.term_integral(k);
            lo = add_down(lo, v.lo().max(0.0));
            hi = add_up(hi, v.hi());
        }
        // Σ_{k ≥ depth} of the term bounds.
        let tail = match &self.kind {
            Kind::Window { .. } => pow2(5 - depth as i64),
            Kind::Cover { .. } => pow2(-(depth as i64) - 1),
        };
        hi = add_up(hi, q_to_f64(&tail) * (1.0 + EPS));
        (lo, hi)
    }
}

pub(crate) enum LowerTerm {
    Spread(Vec<TrigPoly>),
    Pieces(Vec<(f64, f64)>),
}

impl LowerTerm {
    pub(crate) fn eval(&self, x: f64) -> f64 {
        match self {
            LowerTerm::Spread(diffs) => spread(diffs, |d| d.eval(x)).lo().max(0.0),
            LowerTerm::Pieces(p) => p.iter().any(|&(a, b)| a < x && x < b) as u8 as f64,
        }
    }

    pub(crate) fn breakpoints(&self) -> Vec<f64> {
        match self {
            LowerTerm::Spread(_) => Vec::new(),
            LowerTerm::Pieces(p) => p.iter().flat_map(|&(a, b)| [a, b]).collect(),
        }
    }
}

/// `min(1, max_d |d(t)|)` from enclosures of the differences.
fn spread(diffs: &[TrigPoly], eval: impl Fn(&TrigPoly) -> CBall) -> CertifiedReal {
    if diffs.is_empty() {
        return CertifiedReal::exact(0.0);
    }
    let best = diffs.iter().map(|d| eval(d).abs()).reduce(CertifiedReal::max).expect("nonempty");
    if best.lo() >= 1.0 {
        return CertifiedReal::exact(1.0);
    }
    best.min(CertifiedReal::exact(1.0))
}

/// Midpoint rule for `∫ min(1, max_d |d|) dt/(2π)`. The integrand is Lipschitz
/// with constant `L = max_d ‖d'‖∞`, so a cell of width `h` contributes an error
/// of at most `L h/4` times its normalized width.
fn grid_integral(diffs: &[TrigPoly], tol: f64) -> CertifiedReal {
    let lip = diffs.iter().map(TrigPoly::derivative_bound).fold(0.0, f64::max);
    let want = (lip * PI / (2.0 * tol)).ceil();
    let grid = if want.is_finite() { (want as usize).clamp(64, MAX_GRID) } else { MAX_GRID };
    let h = 2.0 * PI / grid as f64;
    let cells: Vec<(f64, f64)> = (0..grid)
        .into_par_iter()
        .map(|i| {
            let t = -PI + (i as f64 + 0.5) * h;
            let s = spread(diffs, |d| d.eval(t));
            (s.lo().max(0.0), s.hi().min(1.0))
        })
        .collect();
    let (lo, hi) = cells.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = grid as f64;
    let err = lip * h / 4.0;
    // Summation error of n nonnegative terms.
    let (lo, hi) = (lo / n, hi / n);
    let lo = (lo - err - 2.0 * n * EPS * lo).max(0.0);
    let hi = (hi + err + 2.0 * n * EPS * hi).min(1.0);
    CertifiedReal::hull(lo, hi.max(lo))
}

/// Lower bound on `T(t)` from the first `depth` terms.
#[derive(Clone, Debug)]
pub struct IntegralEval {
    pub lower_bound: f64,
    pub terms: Vec<CertifiedReal>,
    /// Lower bounds after each term.
    pub partials: Vec<f64>,
    /// Every term in the second half of the range has a positive lower bound.
    pub growing: bool,
}

pub fn eval_integral_test(test: &IntegralTest, t: &Q, depth: u32) -> IntegralEval {
    let terms: Vec<CertifiedReal> = (0..depth).map(|k| test.term(k, t)).collect();
    let mut partials = Vec::with_capacity(terms.len());
    let mut s = 0.0;
    for g in &terms {
        s = add_down(s, g.lo().max(0.0));
        partials.push(s);
    }
    let half = terms.len() / 2;
    let growing = !terms.is_empty() && terms[half..].iter().all(|g| g.lo() > 0.0);
    IntegralEval { lower_bound: s, terms, partials, growing }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maximal::Provenance;
    use crate::names::Family;
    use crate::rational::{q, QComplex};

    fn linear_eta() -> AeModulus {
        AeModulus::from_fn(|k, m| (k + m) as u64, Provenance::Table)
    }

    #[test]
    fn constant_sequence_is_zero() {
        let seq = PolySequence::family(Family::Constant { poly: TrigPoly::e(2) });
        let t = integral_test_from_modulus(seq, linear_eta());
        for k in 0..6 {
            assert!(t.term_integral(k).hi() < 1e-200);
            assert!(t.term(k, &q(1, 2)).hi() < 1e-200);
        }
        let e = eval_integral_test(&t, &q(1, 5), 8);
        assert_eq!(e.lower_bound, 0.0);
        assert!(!e.growing);
        assert!(t.integral(8).contains(0.0));
    }

    #[test]
    fn single_jump_integral() {
        // Window k = 2 is (4, 6]; the jump between indices 5 and 6 has modulus 1/2.
        let seq = PolySequence::generator(|n| {
            if n >= 6 {
                TrigPoly::from_coeffs([(1, QComplex::real(q(1, 2)))])
            } else {
                TrigPoly::zero()
            }
        });
        let t = integral_test_from_modulus(seq, linear_eta());
        assert_eq!(t.window(2), Some((4, 6)));
        let v = t.term_integral(2);
        assert!(v.contains(0.5), "{v}");
        assert!(v.radius < 1e-3);
        assert!(t.term_integral(1).hi() < 1e-200);
        assert!(t.term_integral(3).hi() < 1e-200);
    }

    #[test]
    fn cover_terms() {
        let test = SchnorrTest::rational_point(q(1, 3)).unwrap();
        let t = lsc_from_null_cover(test);
        let e = eval_integral_test(&t, &q(1, 3), 12);
        assert_eq!(e.lower_bound, 12.0);
        assert!(e.growing);
        let off = eval_integral_test(&t, &(q(1, 3) + q(1, 20)), 12);
        assert!(off.lower_bound <= 3.0);
        assert!(!off.growing);
        let i = t.integral(20);
        assert!(i.hi() <= 2.0);
        assert!(i.contains(1.0 / (2.0 * PI)));
    }
}
