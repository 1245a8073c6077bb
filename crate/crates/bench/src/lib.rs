//! Fixtures shared by the benchmarks.

use rfourier::rational::{pow2, q};
use rfourier::{IntervalSet, QComplex, TrigPoly};

/// `Σ_{|n| ≤ degree} 2^{-|n|/4 - 1} e_n` with dyadic coefficients.
pub fn sample_poly(degree: i64) -> TrigPoly {
    TrigPoly::from_coeffs((-degree..=degree).map(|n| (n, QComplex::new(pow2(-n.abs() / 4 - 1), q(n % 3, 8)))))
}

/// One interval of normalized measure `2^-e` centred at 0.
pub fn small_set(e: i64) -> IntervalSet {
    let a = pow2(-e);
    IntervalSet::from_pi_multiples(&[(-a.clone(), a)]).expect("valid interval")
}
