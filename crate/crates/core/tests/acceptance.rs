use std::process::ExitCode;

use rfourier::suites::{run_suite, DEFAULT_SEED};

const CRITERIA: [(u8, &str, &str); 9] = [
    (1, "parseval", "Parseval and coefficient reconstruction"),
    (2, "harmonic", "harmonic measure vs Poisson quadrature"),
    (3, "taylor", "Taylor coefficients vs contour quadrature"),
    (4, "kahane", "Kahane-Katznelson certificates"),
    (5, "divergence", "divergence assembly gap at t0 = 1/3"),
    (6, "fefferman-modulus", "empirical Fefferman modulus"),
    (7, "integral-test", "Schnorr integral test bounds"),
    (8, "subsequence", "subsequence modulus and Chebyshev steps"),
    (9, "fejer", "Fejer kernel and Cesaro means"),
];

fn main() -> ExitCode {
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, suite, title) in CRITERIA {
        if !only.is_empty() && !only.iter().any(|o| suite.contains(o.as_str())) {
            continue;
        }
        match run_suite(suite, DEFAULT_SEED) {
            Ok(r) => {
                let status = if r.passed { "PASS" } else { "FAIL" };
                println!("criterion {i} [{suite}] {title}: {status} ({:.1} s, {} checks)", r.seconds, r.checks.len());
                for c in r.failures() {
                    println!("    failed: {}: measured {} {} target {}", c.name, c.measured, c.relation, c.target);
                }
                failed += !r.passed as u32;
            }
            Err(e) => {
                println!("criterion {i} [{suite}] {title}: FAIL (error: {e})");
                failed += 1;
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
