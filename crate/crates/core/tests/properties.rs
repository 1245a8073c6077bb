use num_bigint::BigInt;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rfourier::ball::{add_down, add_up};
use rfourier::harmonic::{harmonic_measure, Arc, ArcSet};
use rfourier::names::subsequence_modulus;
use rfourier::rational::{format_rational, parse_rational, q, q_from_f64, QComplex};
use rfourier::schnorr::{cantor_pair, SchnorrTest};
use rfourier::trigpoly::random_trig_poly;
use rfourier::{fejer_kernel, TrigPoly, Q};

fn poly(seed: u64, degree: i64) -> TrigPoly {
    random_trig_poly(&mut ChaCha8Rng::seed_from_u64(seed), degree, 97)
}

fn arb_poly() -> impl Strategy<Value = TrigPoly> {
    (any::<u64>(), 0i64..24).prop_map(|(s, d)| poly(s, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn partial_sums_are_linear_and_idempotent(p in arb_poly(), g in arb_poly(), n in 0u64..30) {
        let s = p.partial_sum(n);
        prop_assert_eq!(s.partial_sum(n), s.clone());
        prop_assert_eq!(p.add(&g).partial_sum(n), s.add(&g.partial_sum(n)));
        prop_assert!(s.degree() <= n);
    }

    #[test]
    fn parseval_is_exact(p in arb_poly()) {
        let sum = p.coeffs().fold(Q::from_integer(0.into()), |acc, (_, c)| acc + c.norm_sqr());
        prop_assert_eq!(p.l2_norm_sq(), sum);
    }

    #[test]
    fn cesaro_mean_damps_coefficients(p in arb_poly(), n in 0u64..30) {
        let s = p.cesaro_mean(n);
        for k in -(n as i64)..=(n as i64) {
            let w = q(n as i64 + 1 - k.abs(), n as i64 + 1);
            prop_assert_eq!(s.fourier_coeff(k), p.fourier_coeff(k).scale(&w));
        }
        prop_assert!(s.degree() <= n);
    }

    #[test]
    fn product_coefficients_convolve(p in (any::<u64>(), 0i64..6).prop_map(|(s, d)| poly(s, d)),
                                     g in (any::<u64>(), 0i64..6).prop_map(|(s, d)| poly(s, d))) {
        let prod = p.mul(&g);
        for n in -12i64..=12 {
            let mut c = QComplex::zero();
            for k in -6i64..=6 {
                let a = p.fourier_coeff(k);
                let b = g.fourier_coeff(n - k);
                c = QComplex::new(
                    &c.re + &a.re * &b.re - &a.im * &b.im,
                    &c.im + &a.re * &b.im + &a.im * &b.re,
                );
            }
            prop_assert_eq!(prod.fourier_coeff(n), c);
        }
    }

    /// Exact rational summation of f64 trig values must fall inside the evaluation ball.
    #[test]
    fn eval_ball_contains_exact_sum(p in arb_poly(), t in -3.1f64..3.1) {
        let (mut re, mut im) = (Q::from_integer(0.into()), Q::from_integer(0.into()));
        let mut slack = 0.0;
        for (n, c) in p.coeffs() {
            let (s, co) = (n as f64 * t).sin_cos();
            let (s, co) = (q_from_f64(s), q_from_f64(co));
            re += &c.re * &co - &c.im * &s;
            im += &c.re * &s + &c.im * &co;
            slack += c.to_c64().norm() * 4.0 * f64::EPSILON * (1.0 + (n as f64 * t).abs());
        }
        let v = p.eval(t);
        let exact = Complex64::new(rfourier::rational::q_to_f64(&re), rfourier::rational::q_to_f64(&im));
        prop_assert!((v.mid - exact).norm() <= v.radius + slack, "{} vs {}", v.mid, exact);
    }

    #[test]
    fn fejer_kernel_is_nonnegative_and_peaks_at_zero(n in 1u64..200, x in -3.2f64..3.2) {
        let v = fejer_kernel(n, x);
        prop_assert!(v >= 0.0);
        prop_assert!(v <= n as f64 * (1.0 + 1e-12));
    }

    #[test]
    fn directed_addition_brackets_the_exact_sum(a in -1e6f64..1e6, b in -1e6f64..1e6) {
        let exact = q_from_f64(a) + q_from_f64(b);
        prop_assert!(q_from_f64(add_down(a, b)) <= exact);
        prop_assert!(q_from_f64(add_up(a, b)) >= exact);
    }

    #[test]
    fn rationals_roundtrip_through_text(n in -10_000i64..10_000, d in 1i64..10_000) {
        let x = q(n, d);
        prop_assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
    }

    #[test]
    fn harmonic_measure_lies_in_unit_interval(a in -60i64..0, b in 1i64..60, r in 0.0f64..0.95, th in -3.1f64..3.1) {
        let set = ArcSet::new(vec![Arc::new(q(a, 64), q(b, 64)).unwrap()]).unwrap();
        let w = harmonic_measure(Complex64::from_polar(r, th), &set).unwrap();
        prop_assert!(w.lo() > -1e-12 && w.hi() < 1.0 + 1e-12);
    }

    #[test]
    fn subsequence_modulus_is_monotone(num in 1i64..8, den in 1i64..4, k in 0u32..20, m in 0u32..20) {
        let p = q(num + den, den);
        let eta = subsequence_modulus(&p).unwrap();
        prop_assert!(eta.eval(k, m) <= eta.eval(k + 1, m));
        prop_assert!(eta.eval(k, m) <= eta.eval(k, m + 1));
    }

    #[test]
    fn rational_point_streams_respect_their_tails(num in -200i64..200, level in 0u32..6, j in 0usize..40) {
        let t0 = q(num, 100);
        let test = SchnorrTest::rational_point(t0).unwrap();
        // Listed intervals up to j plus the tail bound cover the level measure.
        let listed: Q = (0..=j).map(|i| { let (a, b) = test.interval(level, i).unwrap(); b - a }).sum();
        prop_assert_eq!(listed + test.tail_bound(level, j), test.level_measure_exact(level));
        prop_assert!(test.tail_bound(level, j + 1) <= test.tail_bound(level, j));
        prop_assert!(test.level_measure_exact(level) <= rfourier::rational::pow2(-(level as i64)));
    }
}

#[test]
fn cantor_pairing_is_a_bijection_on_a_square() {
    let mut seen = std::collections::BTreeSet::new();
    for n in 0..40u32 {
        for k in 0..40u32 {
            assert!(seen.insert(cantor_pair(n, k)));
        }
    }
    // Every code below the smallest missing diagonal is hit.
    for c in 0..(40 * 41 / 2) as u64 {
        assert!(seen.contains(&c));
    }
}

#[test]
fn rational_point_intervals_are_disjoint() {
    let test = SchnorrTest::rational_point(q(1, 3)).unwrap();
    for level in 0..4 {
        let mut ivs: Vec<(Q, Q)> = (0..30).map(|j| test.interval(level, j).unwrap()).collect();
        ivs.sort();
        for w in ivs.windows(2) {
            assert!(w[0].1 <= w[1].0);
        }
    }
}

#[test]
fn large_rationals_roundtrip() {
    // Guard that BigInt-backed rationals do not overflow at large denominators.
    let x = Q::new(BigInt::from(1) << 200u32, BigInt::from(3));
    assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
}
