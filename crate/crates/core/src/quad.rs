//! Adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.
//!
//! The reported radius is the Kronrod–Gauss difference summed over the final
//! panels plus a floating-point accumulation term. It is an error estimate,
//! not a proof; callers that need a hard bound use grid enclosures instead.

use std::collections::BinaryHeap;

use crate::ball::{CertifiedReal, EPS};
use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-10, max_panels: 20_000 }
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    abs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&o.err)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut abs = WGK[7] * fc.abs();
    for j in 0..7 {
        let x = h * XGK[j];
        let (f1, f2) = (f(c - x), f(c + x));
        kron += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kron * h;
    let err = ((kron - gauss) * h).abs();
    Panel { a, b, value, err, abs: abs * h.abs() }
}

/// Integrates `f` over `[a, b]`, first splitting at the given interior points.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    opts: QuadOptions,
) -> Result<CertifiedReal> {
    let mut pts: Vec<f64> = std::iter::once(a)
        .chain(breaks.iter().copied().filter(|&x| x > a && x < b))
        .chain(std::iter::once(b))
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut heap = BinaryHeap::new();
    for w in pts.windows(2) {
        if w[1] > w[0] {
            heap.push(gk15(&f, w[0], w[1]));
        }
    }
    let mut panels = heap.len();
    loop {
        let err: f64 = heap.iter().map(|p| p.err).sum();
        let abs: f64 = heap.iter().map(|p| p.abs).sum();
        let round = 50.0 * EPS * abs;
        if err <= opts.abs_tol || panels >= opts.max_panels {
            let value: f64 = heap.iter().map(|p| p.value).sum();
            let best = CertifiedReal::new(value, err + round);
            if err <= opts.abs_tol {
                return Ok(best);
            }
            return Err(Error::QuadratureBudget { best });
        }
        let worst = heap.pop().expect("nonempty");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            // Panel cannot be split further in floating point.
            let value: f64 = heap.iter().map(|p| p.value).sum::<f64>() + worst.value;
            let best = CertifiedReal::new(value, err + round);
            return Err(Error::QuadratureBudget { best });
        }
        heap.push(gk15(&f, worst.a, m));
        heap.push(gk15(&f, m, worst.b));
        panels += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let v = integrate(|x| x * x * x - x, 0.0, 2.0, &[], QuadOptions::default()).unwrap();
        assert!((v.value - 2.0).abs() < 1e-14);
    }

    #[test]
    fn kink_with_break() {
        let v = integrate(|x: f64| x.abs(), -1.0, 2.0, &[0.0], QuadOptions::default()).unwrap();
        assert!((v.value - 2.5).abs() < 1e-13);
    }

    #[test]
    fn step_function_adapts() {
        let opts = QuadOptions { abs_tol: 1e-9, max_panels: 5000 };
        let v = integrate(|x| if x < 0.3 { 1.0 } else { 0.0 }, 0.0, 1.0, &[], opts).unwrap();
        assert!((v.value - 0.3).abs() < 1e-8);
    }

    #[test]
    fn budget_reports_best() {
        let opts = QuadOptions { abs_tol: 1e-300, max_panels: 8 };
        match integrate(|x: f64| x.sqrt(), 0.0, 1.0, &[], opts) {
            Err(Error::QuadratureBudget { best }) => assert!((best.value - 2.0 / 3.0).abs() < 1e-3),
            other => panic!("expected budget error, got {other:?}"),
        }
    }
}
