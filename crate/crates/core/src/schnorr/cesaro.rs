//! Cesàro means of integral tests through the Fejér convolution.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::integral::IntegralTest;
use crate::ball::CertifiedReal;
use crate::error::Result;
use crate::quad::{integrate, QuadOptions};
use crate::rational::{q_to_f64, Q};
use crate::trigpoly::fejer_kernel;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CesaroRow {
    #[serde(rename = "N")]
    pub n: u64,
    pub value: CertifiedReal,
}

fn wrap(s: f64) -> f64 {
    let mut x = s;
    while x > PI {
        x -= 2.0 * PI;
    }
    while x < -PI {
        x += 2.0 * PI;
    }
    x
}

/// `σ_N(h)(t0)` for `N = 0..=n_max`, where `h = Σ_{k<depth} g_k` is evaluated
/// from below. Since the Fejér kernel is nonnegative, each value bounds
/// `σ_N(T)(t0)` from below.
///
/// Computed as `(1/2π) ∫ h(s) F(t0 - s) ds` over one period by adaptive quadrature
/// split at the jumps of `h`.
pub fn cesaro_divergence_demo(test: &IntegralTest, t0: &Q, n_max: u64, depth: u32) -> Result<Vec<CesaroRow>> {
    let terms: Vec<_> = (0..depth).map(|k| test.lower_term(k)).collect();
    let t = q_to_f64(t0);
    let (a, b) = (t - PI, t + PI);
    let mut breaks: Vec<f64> = terms
        .iter()
        .flat_map(|g| g.breakpoints())
        .flat_map(|x| [x - 2.0 * PI, x, x + 2.0 * PI])
        .filter(|&x| x > a && x < b)
        .collect();
    breaks.push(t);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let opts = QuadOptions { abs_tol: 1e-9, max_panels: 200_000 };
    (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let h = |s: f64| -> f64 {
                let x = wrap(s);
                let v: f64 = terms.iter().map(|g| g.eval(x)).sum();
                if v == 0.0 {
                    0.0
                } else {
                    v * fejer_kernel(n + 1, t - s)
                }
            };
            let v = integrate(h, a, b, &breaks, opts)?;
            Ok(CesaroRow { n, value: v / CertifiedReal::two_pi() })
        })
        .collect()
}
