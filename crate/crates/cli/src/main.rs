use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;

use rfourier::ball::CertifiedReal;
use rfourier::kahane::{run_pipeline, KahaneOptions};
use rfourier::maximal::{carleson_max, estimate_fefferman};
use rfourier::rational::{format_rational, parse_rational, q_to_f64};
use rfourier::schnorr::{
    assemble_divergence, cantor_pair, cesaro_divergence_demo, lsc_from_null_cover, partial_sum_series, verify_gap,
    SchnorrTest,
};
use rfourier::suites::{is_suite, run_suite, Check, SuiteReport, DEFAULT_SEED, SUITE_NAMES};
use rfourier::{Error, IntervalSet, TrigPoly, Q};

#[derive(Parser)]
#[command(name = "rfourier", version, about = "Certified constructions around Carleson's theorem and Schnorr randomness")]
struct Cli {
    /// Bits of the dyadic grid used for constructed coefficients.
    #[arg(long, global = true, default_value_t = 128, value_parser = clap::value_parser!(u32).range(16..=4096))]
    precision: u32,
    /// Output directory (created if missing).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for the randomized suites.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a bounded polynomial whose partial sums are large on a set G.
    Kk {
        /// IntervalSet JSON describing G.
        input: PathBuf,
    },
    /// Assemble a divergent polynomial from a Schnorr test and certify the gap at t0.
    Diverge {
        /// SchnorrTest JSON.
        input: PathBuf,
        /// Largest cell indices, as `n,k`.
        #[arg(long, default_value = "1,1", value_parser = parse_grid)]
        grid: (u32, u32),
        /// Rational point; defaults to the center of a rational-point test.
        #[arg(long)]
        t0: Option<String>,
    },
    /// Cesàro means at t0 of a polynomial, or of the integral test of a Schnorr test.
    Fejer {
        /// TrigPoly JSON or SchnorrTest JSON.
        input: PathBuf,
        #[arg(long)]
        t0: String,
        #[arg(long = "n-max", default_value_t = 64)]
        n_max: u64,
        /// Number of integral-test terms, for SchnorrTest input.
        #[arg(long, default_value_t = 4)]
        depth: u32,
    },
    /// Carleson maximal function of a polynomial on a grid or at one point.
    Carleson {
        /// TrigPoly JSON.
        input: PathBuf,
        #[arg(long)]
        t0: Option<String>,
        #[arg(long, default_value_t = 256)]
        points: usize,
        /// Exponent for the ratio ‖sup_N |S_N p|‖₁ / ‖p‖_p.
        #[arg(long, default_value = "2")]
        p: String,
    },
    /// Run a verification suite, or `all`.
    Verify { suite: String },
}

fn parse_grid(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s.split_once(',').ok_or("expected n,k")?;
    Ok((a.trim().parse().map_err(|e| format!("{e}"))?, b.trim().parse().map_err(|e| format!("{e}"))?))
}

struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Self { code: 2, msg: msg.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::Json(_) | Error::Domain(_) => 2,
            Error::NotCaptured(_) => 3,
            _ => 1,
        };
        Self { code, msg: e.to_string() }
    }
}

#[derive(Serialize)]
struct RunReport {
    schema: &'static str,
    command: String,
    parameters: BTreeMap<String, String>,
    outputs: Vec<String>,
    certificates: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    suites: Vec<SuiteReport>,
    passed: bool,
    seconds: f64,
}

impl RunReport {
    fn new(command: &str) -> Self {
        Self {
            schema: "v1",
            command: command.into(),
            parameters: BTreeMap::new(),
            outputs: Vec::new(),
            certificates: Vec::new(),
            suites: Vec::new(),
            passed: true,
            seconds: 0.0,
        }
    }

    fn param(&mut self, k: &str, v: impl ToString) {
        self.parameters.insert(k.into(), v.to_string());
    }

    fn write(&mut self, dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
        fs::create_dir_all(dir).map_err(|e| Failure { code: 1, msg: format!("{}: {e}", dir.display()) })?;
        let path = dir.join(name);
        fs::write(&path, contents).map_err(|e| Failure { code: 1, msg: format!("{}: {e}", path.display()) })?;
        self.outputs.push(path.display().to_string());
        Ok(())
    }

    fn check(&mut self, c: Check) {
        self.passed &= c.passed;
        self.certificates.push(c);
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn json<T: Serialize>(v: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| Failure { code: 1, msg: e.to_string() })
}

fn rational(s: &str) -> Result<Q, Failure> {
    parse_rational(s).map_err(|e| Failure::usage(format!("t0: {e}")))
}

fn csv_header() -> String {
    "N,re,im,radius\n".to_string()
}

fn cmd_kk(cli: &Cli, input: &Path, report: &mut RunReport) -> Result<(), Failure> {
    let g: IntervalSet = serde_json::from_str(&read_input(input)?).map_err(|e| Failure::usage(format!("G: {e}")))?;
    report.param("input", input.display());
    report.param("precision", cli.precision);
    let opts = KahaneOptions { bits: cli.precision, ..KahaneOptions::default() };
    let out = run_pipeline(&g, &opts)?;
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    report.write(&dir, "r.json", &json(&out.r)?)?;
    report.write(&dir, "p.json", &json(&out.p)?)?;
    report.write(&dir, "certificate.json", &json(&out.p_certificate)?)?;
    let c = &out.p_certificate;
    report.param("degree", c.degree);
    report.param("N", c.n);
    report.check(Check::new(
        "min over G of the Carleson maximal function of p",
        ">=",
        c.bound_target,
        c.measured_min,
        c.measured_min.lo() >= c.bound_target.hi(),
    ));
    report.check(Check::new("sup norm of p", "<", CertifiedReal::exact(1.0), c.sup_norm, c.sup_norm.hi() < 1.0));
    if let Some(ok) = c.identity_exact {
        report.check(Check::new(
            "coefficient identity for S_N(p)",
            "==",
            CertifiedReal::exact(1.0),
            CertifiedReal::exact(ok as u8 as f64),
            ok,
        ));
    }
    Ok(())
}

fn cmd_diverge(cli: &Cli, input: &Path, grid: (u32, u32), t0: Option<&str>, report: &mut RunReport) -> Result<(), Failure> {
    let test = SchnorrTest::from_json(&read_input(input)?).map_err(|e| Failure::usage(format!("test: {e}")))?;
    let t0 = match (t0, &test) {
        (Some(s), _) => rational(s)?,
        (None, SchnorrTest::RationalPoint { t0 }) => t0.clone(),
        (None, _) => return Err(Failure::usage("--t0 is required for table tests")),
    };
    report.param("input", input.display());
    report.param("grid", format!("{},{}", grid.0, grid.1));
    report.param("t0", format_rational(&t0));
    report.param("precision", cli.precision);
    let opts = KahaneOptions { bits: cli.precision, ..KahaneOptions::default() };
    let asm = assemble_divergence(&test, grid.0, grid.1, &opts)?;
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    report.write(&dir, "f.json", &json(&asm.f)?)?;
    report.write(&dir, "schedule.json", &json(&asm.schedule)?)?;
    report.write(&dir, "assembly.json", &json(&asm.report)?)?;
    report.param("degree", asm.f.degree());
    for cell in &asm.report.cells {
        report.check(Check::new(
            format!("measure of G_({},{})", cell.n, cell.k),
            "<",
            CertifiedReal::from_q(&rfourier::rational::pow2(-(1i64 << (cell.n + cell.k)))),
            cell.g.measure().to_ball(),
            cell.measure_ok,
        ));
        report.check(Check::new(
            format!("scaled minimum on G_({},{})", cell.n, cell.k),
            ">",
            cell.gap_target,
            cell.scaled_min,
            cell.gap_ok,
        ));
    }

    let mut csv = csv_header();
    for (n, v) in partial_sum_series(&asm.f, &t0) {
        writeln!(csv, "{n},{},{},{:e}", v.mid.re, v.mid.im, v.radius).expect("string write");
    }
    report.write(&dir, "partial_sums.csv", &csv)?;

    let mut witnesses = Vec::new();
    let mut first_err = None;
    for n in 0..=grid.0 {
        match verify_gap(&asm, &t0, cantor_pair(n, 0)) {
            Ok(w) => witnesses.push(w),
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    report.write(&dir, "gaps.json", &json(&witnesses)?)?;
    for w in &witnesses {
        report.check(Check::new(
            format!("gap from cell ({},{}), M = {}, N = {}", w.n, w.k, w.m, w.big_n),
            ">",
            w.target,
            w.gap,
            w.gap.lo() > w.target.hi(),
        ));
    }
    if witnesses.is_empty() {
        return Err(first_err.map(Failure::from).unwrap_or_else(|| Failure::usage("empty grid")));
    }
    Ok(())
}

fn cmd_fejer(cli: &Cli, input: &Path, t0: &str, n_max: u64, depth: u32, report: &mut RunReport) -> Result<(), Failure> {
    let text = read_input(input)?;
    let t = rational(t0)?;
    report.param("input", input.display());
    report.param("t0", format_rational(&t));
    report.param("n_max", n_max);
    let mut csv = csv_header();
    if let Ok(p) = serde_json::from_str::<TrigPoly>(&text) {
        let tb = CertifiedReal::from_q(&t);
        for n in 0..=n_max {
            let v = p.cesaro_mean(n).eval_ball(tb);
            writeln!(csv, "{n},{},{},{:e}", v.mid.re, v.mid.im, v.radius).expect("string write");
        }
    } else {
        let test = SchnorrTest::from_json(&text).map_err(|e| Failure::usage(format!("input: {e}")))?;
        report.param("depth", depth);
        for row in cesaro_divergence_demo(&lsc_from_null_cover(test), &t, n_max, depth)? {
            writeln!(csv, "{},{},0,{:e}", row.n, row.value.value, row.value.radius).expect("string write");
        }
    }
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    report.write(&dir, "fejer.csv", &csv)
}

#[derive(Serialize)]
struct CarlesonSummary {
    schema: &'static str,
    p: String,
    /// max over the grid of sup_N |S_N p|.
    max: CertifiedReal,
    /// ‖sup_N |S_N p|‖₁ / ‖p‖_p, a lower bound on any admissible Fefferman constant.
    l1_over_lp: f64,
}

fn cmd_carleson(cli: &Cli, input: &Path, t0: Option<&str>, points: usize, p: &str, report: &mut RunReport) -> Result<(), Failure> {
    let poly: TrigPoly = serde_json::from_str(&read_input(input)?).map_err(|e| Failure::usage(format!("input: {e}")))?;
    let exp = parse_rational(p).map_err(|e| Failure::usage(format!("--p: {e}")))?;
    report.param("input", input.display());
    report.param("p", format_rational(&exp));
    let ts: Vec<f64> = match t0 {
        Some(s) => vec![q_to_f64(&rational(s)?)],
        None => {
            if points == 0 {
                return Err(Failure::usage("--points must be positive"));
            }
            (0..points).map(|i| -std::f64::consts::PI + 2.0 * std::f64::consts::PI * i as f64 / points as f64).collect()
        }
    };
    report.param("points", ts.len());
    let mut csv = String::from("t,value,radius\n");
    let mut max = CertifiedReal::exact(0.0);
    for &t in &ts {
        let v = carleson_max(&poly, t);
        max = max.max(v);
        writeln!(csv, "{t},{},{:e}", v.value, v.radius).expect("string write");
    }
    let ratio = if poly.is_zero() { 0.0 } else { estimate_fefferman(std::slice::from_ref(&poly), &exp)? };
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    report.write(&dir, "carleson.csv", &csv)?;
    let summary = CarlesonSummary { schema: "v1", p: format_rational(&exp), max, l1_over_lp: ratio };
    report.write(&dir, "carleson.json", &json(&summary)?)
}

fn cmd_verify(cli: &Cli, suite: &str, report: &mut RunReport) -> Result<(), Failure> {
    let names: Vec<&str> = if suite == "all" {
        SUITE_NAMES.to_vec()
    } else if is_suite(suite) {
        vec![suite]
    } else {
        return Err(Failure::usage(format!("unknown suite '{suite}'; expected one of: all, {}", SUITE_NAMES.join(", "))));
    };
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    report.param("suite", suite);
    report.param("seed", seed);
    for name in names {
        let r = run_suite(name, seed)?;
        report.passed &= r.passed;
        if let Some(dir) = &cli.out {
            let mut stable = r.clone();
            stable.seconds = 0.0;
            report.write(dir, &format!("verify-{name}.json"), &json(&stable)?)?;
        }
        report.suites.push(r);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let command = match &cli.cmd {
        Cmd::Kk { .. } => "kk",
        Cmd::Diverge { .. } => "diverge",
        Cmd::Fejer { .. } => "fejer",
        Cmd::Carleson { .. } => "carleson",
        Cmd::Verify { .. } => "verify",
    };
    let mut report = RunReport::new(command);
    let result = match &cli.cmd {
        Cmd::Kk { input } => cmd_kk(&cli, input, &mut report),
        Cmd::Diverge { input, grid, t0 } => cmd_diverge(&cli, input, *grid, t0.as_deref(), &mut report),
        Cmd::Fejer { input, t0, n_max, depth } => cmd_fejer(&cli, input, t0, *n_max, *depth, &mut report),
        Cmd::Carleson { input, t0, points, p } => cmd_carleson(&cli, input, t0.as_deref(), *points, p, &mut report),
        Cmd::Verify { suite } => cmd_verify(&cli, suite, &mut report),
    };
    if let Err(f) = result {
        eprintln!("error: {}", f.msg);
        return ExitCode::from(f.code);
    }
    report.seconds = start.elapsed().as_secs_f64();
    match serde_json::to_string_pretty(&report) {
        Ok(s) => {
            use std::io::Write;
            // A closed pipe downstream is not an error of the run.
            let _ = writeln!(std::io::stdout().lock(), "{s}");
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    if report.passed {
        return ExitCode::SUCCESS;
    }
    for c in report.certificates.iter().filter(|c| !c.passed) {
        eprintln!("certificate failed: {}", c.name);
    }
    for s in report.suites.iter().filter(|s| !s.passed) {
        eprintln!("suite failed: {}", s.suite);
    }
    ExitCode::from(1)
}
