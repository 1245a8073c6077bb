//! Schnorr tests given as streams of rational intervals, the cells `G_{n,k}`
//! carved out of them, integral tests, and the divergence constructions built
//! on top.
//!
//! Measures of sets are Lebesgue measures on `[-π, π]`. Integrals of integral
//! tests are taken against the normalized measure `dt/(2π)`.

mod assembly;
mod cesaro;
mod integral;

pub use assembly::{
    assemble_divergence, cantor_pair, make_schedule, partial_sum_series, verify_gap, Assembly, AssemblyReport,
    CellReport, GapWitness, Schedule, ScheduledCell,
};
pub use cesaro::{cesaro_divergence_demo, CesaroRow};
pub use integral::{
    eval_integral_test, integral_test_from_modulus, lsc_from_null_cover, IntegralEval, IntegralTest,
};

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::ball::CertifiedReal;
use crate::error::{Error, Result};
use crate::intervals::{Angle, IntervalSet};
use crate::rational::{format_rational, parse_rational, pow2, Q};

/// Streams longer than this are treated as exhausted by the index search.
const MAX_STREAM_SEARCH: usize = 1 << 20;
/// Largest `n + k` for which `2^{-2^{n+k+1}}` is formed.
const MAX_CELL_ORDER: u32 = 40;

/// How a tabulated level bounds what its listed intervals miss.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TailSpec {
    /// The listed intervals are all of `U_n`; the tail after `j` is the
    /// measure of the later intervals.
    Exact,
    /// `tails[j]` bounds `μ(U_n - ∪_{i≤j} I_{n,i})`.
    Table(Vec<Q>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableLevel {
    pub intervals: Vec<(Q, Q)>,
    pub tail: TailSpec,
}

/// A Schnorr test `{U_n}` with `μ(U_n) ≤ 2^{-n}`, each level enumerated as a
/// stream of closed rational intervals `I_{n,0}, I_{n,1}, …`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SchnorrTest {
    /// `U_n = (t0 - 2^{-n-2}, t0 + 2^{-n-2})`, streamed as a central interval
    /// followed by intervals alternating left and right, halving towards
    /// the ends. Captures exactly the point `t0`.
    RationalPoint { t0: Q },
    /// Finitely many listed levels; unlisted levels are empty.
    Table { levels: BTreeMap<u32, TableLevel> },
}

fn in_circle(a: &Q, b: &Q) -> bool {
    let lo = -&Angle::pi_();
    let hi = Angle::pi_();
    Angle::rad(a.clone()) >= lo && Angle::rad(b.clone()) <= hi
}

impl SchnorrTest {
    pub fn rational_point(t0: Q) -> Result<Self> {
        let r = pow2(-2);
        if !in_circle(&(&t0 - &r), &(&t0 + &r)) {
            return Err(Error::Domain(format!("t0 = {} is too close to ±π", format_rational(&t0))));
        }
        Ok(SchnorrTest::RationalPoint { t0 })
    }

    /// Validates a table: intervals inside `[-π, π]` with pairwise overlaps of
    /// measure zero, honest nonincreasing tails and `μ(U_n) ≤ 2^{-n}`.
    pub fn table(levels: BTreeMap<u32, TableLevel>) -> Result<Self> {
        for (&n, level) in &levels {
            let iv = &level.intervals;
            for (a, b) in iv {
                if a >= b || !in_circle(a, b) {
                    return Err(Error::Domain(format!(
                        "level {n}: interval [{}, {}] is empty or leaves [-pi, pi]",
                        format_rational(a),
                        format_rational(b)
                    )));
                }
            }
            let mut sorted = iv.clone();
            sorted.sort();
            if sorted.windows(2).any(|w| w[1].0 < w[0].1) {
                return Err(Error::Domain(format!("level {n}: intervals overlap in positive measure")));
            }
            let total: Q = iv.iter().map(|(a, b)| b - a).sum();
            if total > pow2(-(n as i64)) {
                return Err(Error::Domain(format!("level {n}: measure {} exceeds 2^-{n}", format_rational(&total))));
            }
            if let TailSpec::Table(tails) = &level.tail {
                if tails.len() != iv.len() {
                    return Err(Error::Domain(format!("level {n}: need one tail bound per interval")));
                }
                if tails.windows(2).any(|w| w[1] > w[0]) {
                    return Err(Error::Domain(format!("level {n}: tail bounds must be nonincreasing")));
                }
                let mut rest = total.clone();
                for (j, (a, b)) in iv.iter().enumerate() {
                    rest -= b - a;
                    if tails[j] < rest {
                        return Err(Error::Domain(format!("level {n}: tail bound {j} is below the unlisted measure")));
                    }
                }
                if let Some(last) = tails.last() {
                    if &total + last > pow2(-(n as i64)) {
                        return Err(Error::Domain(format!("level {n}: listed measure plus tail exceeds 2^-{n}")));
                    }
                }
            }
        }
        Ok(SchnorrTest::Table { levels })
    }

    /// Number of intervals in level `n`, or `None` for an infinite stream.
    pub fn stream_len(&self, n: u32) -> Option<usize> {
        match self {
            SchnorrTest::RationalPoint { .. } => None,
            SchnorrTest::Table { levels } => Some(levels.get(&n).map_or(0, |l| l.intervals.len())),
        }
    }

    /// `I_{n,j}`, or `None` past the end of a finite stream.
    pub fn interval(&self, n: u32, j: usize) -> Option<(Q, Q)> {
        match self {
            SchnorrTest::RationalPoint { t0 } => {
                let r = pow2(-(n as i64) - 2);
                if j == 0 {
                    let h = &r / Q::from_integer(2.into());
                    return Some((t0 - &h, t0 + &h));
                }
                let i = j.div_ceil(2) as i64;
                let near = &r * (Q::one() - pow2(-i));
                let far = &r * (Q::one() - pow2(-i - 1));
                if j % 2 == 1 {
                    Some((t0 - far, t0 - near))
                } else {
                    Some((t0 + near, t0 + far))
                }
            }
            SchnorrTest::Table { levels } => levels.get(&n).and_then(|l| l.intervals.get(j).cloned()),
        }
    }

    /// Upper bound on `μ(U_n - ∪_{i≤j} I_{n,i})`.
    pub fn tail_bound(&self, n: u32, j: usize) -> Q {
        match self {
            SchnorrTest::RationalPoint { .. } => {
                let r = pow2(-(n as i64) - 2);
                if j == 0 {
                    return r;
                }
                let i = j.div_ceil(2) as i64;
                if j % 2 == 0 {
                    r * pow2(-i)
                } else {
                    r * pow2(-i - 1) * Q::from_integer(3.into())
                }
            }
            SchnorrTest::Table { levels } => {
                let Some(level) = levels.get(&n) else {
                    return Q::zero();
                };
                match &level.tail {
                    TailSpec::Exact => level.intervals.iter().skip(j + 1).map(|(a, b)| b - a).sum(),
                    TailSpec::Table(t) => t.get(j).or(t.last()).cloned().unwrap_or_else(Q::zero),
                }
            }
        }
    }

    /// Exact upper bound on `μ(U_n)`.
    pub fn level_measure_exact(&self, n: u32) -> Q {
        match self {
            SchnorrTest::RationalPoint { .. } => pow2(-(n as i64) - 1),
            SchnorrTest::Table { levels } => levels.get(&n).map_or_else(Q::zero, |l| {
                let listed: Q = l.intervals.iter().map(|(a, b)| b - a).sum();
                match &l.tail {
                    TailSpec::Exact => listed,
                    TailSpec::Table(t) => listed + t.last().cloned().unwrap_or_else(Q::zero),
                }
            }),
        }
    }

    /// Exact lower bound on `μ(U_n)`.
    pub fn level_measure_lower(&self, n: u32) -> Q {
        match self {
            SchnorrTest::RationalPoint { .. } => self.level_measure_exact(n),
            SchnorrTest::Table { levels } => {
                levels.get(&n).map_or_else(Q::zero, |l| l.intervals.iter().map(|(a, b)| b - a).sum())
            }
        }
    }

    /// Whether `t` lies in the open set `U_n`, when that is decidable from the
    /// listed data: `None` for points of a tabulated level outside every
    /// listed interval when the level has an unlisted remainder.
    pub fn interior_membership(&self, n: u32, t: &Q) -> Option<bool> {
        match self {
            SchnorrTest::RationalPoint { t0 } => Some((t - t0).abs() < pow2(-(n as i64) - 2)),
            SchnorrTest::Table { levels } => {
                let Some(l) = levels.get(&n) else {
                    return Some(false);
                };
                let iv = &l.intervals;
                if iv.iter().any(|(a, b)| a < t && t < b) {
                    return Some(true);
                }
                let joint = iv.iter().any(|(_, b)| b == t) && iv.iter().any(|(a, _)| a == t);
                if joint {
                    return Some(true);
                }
                match &l.tail {
                    TailSpec::Exact => Some(false),
                    TailSpec::Table(tails) if tails.last().is_none_or(Zero::is_zero) => Some(false),
                    TailSpec::Table(_) => None,
                }
            }
        }
    }

    /// Float intervals certainly contained in `U_n`.
    pub fn inner_pieces(&self, n: u32) -> Vec<(f64, f64)> {
        let raw: Vec<(Q, Q)> = match self {
            SchnorrTest::RationalPoint { t0 } => {
                let r = pow2(-(n as i64) - 2);
                vec![(t0 - &r, t0 + &r)]
            }
            SchnorrTest::Table { levels } => levels.get(&n).map_or_else(Vec::new, |l| l.intervals.clone()),
        };
        raw.iter()
            .filter_map(|(a, b)| {
                let lo = crate::rational::ceil_to_f64(a);
                let hi = crate::rational::floor_to_f64(b);
                (lo < hi).then_some((lo, hi))
            })
            .collect()
    }

    pub fn level_measure(&self, n: u32) -> CertifiedReal {
        CertifiedReal::from_q(&self.level_measure_exact(n))
    }

    /// Whether `t` lies in the interior of some listed interval among the
    /// first `limit` of level `n`. Endpoints are never counted.
    pub fn strictly_inside(&self, n: u32, t: &Q, limit: usize) -> bool {
        let len = self.stream_len(n).unwrap_or(limit).min(limit);
        (0..len).any(|j| self.interval(n, j).is_some_and(|(a, b)| &a < t && t < &b))
    }

    /// Listed intervals of level `n` until the tail drops below `2^-tail_bits`
    /// or `limit` intervals have been produced.
    pub fn enumerate(&self, n: u32, tail_bits: u32, limit: usize) -> Vec<(Q, Q)> {
        let goal = pow2(-(tail_bits as i64));
        let len = self.stream_len(n).unwrap_or(limit).min(limit);
        let mut out = Vec::new();
        for j in 0..len {
            match self.interval(n, j) {
                Some(iv) => out.push(iv),
                None => break,
            }
            if self.tail_bound(n, j) < goal {
                break;
            }
        }
        out
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: TestJson = serde_json::from_str(s)?;
        match (j.family.as_deref(), j.t0, j.levels) {
            (Some("rational-point"), Some(t0), None) => SchnorrTest::rational_point(parse_rational(&t0)?),
            (Some(other), _, None) => Err(Error::Parse(format!("unknown test family {other:?} or missing t0"))),
            (None, None, Some(levels)) => {
                let mut map = BTreeMap::new();
                for l in levels {
                    let intervals = l
                        .intervals
                        .iter()
                        .map(|(a, b)| Ok((parse_rational(a)?, parse_rational(b)?)))
                        .collect::<Result<Vec<_>>>()?;
                    let tail = match l.tail {
                        TailJson::Name(s) if s == "exact" => TailSpec::Exact,
                        TailJson::Name(s) => return Err(Error::Parse(format!("unknown tail formula {s:?}"))),
                        TailJson::Table(v) => TailSpec::Table(v.iter().map(|x| parse_rational(x)).collect::<Result<_>>()?),
                    };
                    if map.insert(l.n, TableLevel { intervals, tail }).is_some() {
                        return Err(Error::Parse(format!("level {} listed twice", l.n)));
                    }
                }
                SchnorrTest::table(map)
            }
            _ => Err(Error::Parse("a test needs either a family with t0 or a list of levels".into())),
        }
    }

    pub fn to_json(&self) -> String {
        let j = match self {
            SchnorrTest::RationalPoint { t0 } => TestJson {
                schema: "v1".into(),
                family: Some("rational-point".into()),
                t0: Some(format_rational(t0)),
                levels: None,
            },
            SchnorrTest::Table { levels } => TestJson {
                schema: "v1".into(),
                family: None,
                t0: None,
                levels: Some(
                    levels
                        .iter()
                        .map(|(&n, l)| LevelJson {
                            n,
                            intervals: l.intervals.iter().map(|(a, b)| (format_rational(a), format_rational(b))).collect(),
                            tail: match &l.tail {
                                TailSpec::Exact => TailJson::Name("exact".into()),
                                TailSpec::Table(t) => TailJson::Table(t.iter().map(format_rational).collect()),
                            },
                        })
                        .collect(),
                ),
            },
        };
        serde_json::to_string(&j).expect("test JSON")
    }
}

#[derive(Serialize, Deserialize)]
struct TestJson {
    #[serde(default = "schema_v1")]
    schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t0: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    levels: Option<Vec<LevelJson>>,
}

#[derive(Serialize, Deserialize)]
struct LevelJson {
    n: u32,
    intervals: Vec<(String, String)>,
    tail: TailJson,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TailJson {
    Name(String),
    Table(Vec<String>),
}

fn schema_v1() -> String {
    "v1".into()
}

/// Sorts the intervals and clips each against the ones before it, so the
/// union is unchanged and overlaps have measure zero.
pub fn disjointify(intervals: &[(Q, Q)]) -> Vec<(Q, Q)> {
    let mut v: Vec<(Q, Q)> = intervals.iter().filter(|(a, b)| a < b).cloned().collect();
    v.sort();
    let mut out: Vec<(Q, Q)> = Vec::with_capacity(v.len());
    let mut reach: Option<Q> = None;
    for (a, b) in v {
        let a = match &reach {
            Some(r) if r > &a => r.clone(),
            _ => a,
        };
        if a < b {
            reach = Some(b.clone());
            out.push((a, b));
        }
    }
    out
}

/// `2^{-2^e}`.
fn doubly_exponential(e: u32) -> Result<Q> {
    if e > MAX_CELL_ORDER + 1 {
        return Err(Error::Domain(format!("cell order {e} is beyond the supported range")));
    }
    Ok(pow2(-(1i64 << e)))
}

/// `m_{n,0} < m_{n,1} < … < m_{n,k}` for level `2^n` of the test.
pub fn select_m_all(test: &SchnorrTest, n: u32, k: u32) -> Result<Vec<usize>> {
    if n >= 31 {
        return Err(Error::Domain("level 2^n needs n < 31".into()));
    }
    let level = 1u32 << n;
    let mut out: Vec<usize> = Vec::with_capacity(k as usize + 1);
    let mut j = 0usize;
    for kk in 0..=k {
        let target = doubly_exponential(n + kk + 1)?;
        if let Some(&prev) = out.last() {
            j = j.max(prev + 1);
        }
        loop {
            if test.tail_bound(level, j) < target {
                break;
            }
            let past_end = test.stream_len(level).is_some_and(|len| j >= len);
            if past_end || j >= MAX_STREAM_SEARCH {
                return Err(Error::InsufficientCover(format!(
                    "level {level}: tail never drops below 2^-{} (searched to index {j})",
                    1u64 << (n + kk + 1)
                )));
            }
            j += 1;
        }
        out.push(j);
    }
    Ok(out)
}

/// `m_{n,k}`: least index whose tail is below `2^{-2^{n+k+1}}`, forced to
/// increase strictly in `k`.
pub fn select_m(test: &SchnorrTest, n: u32, k: u32) -> Result<usize> {
    Ok(*select_m_all(test, n, k)?.last().expect("nonempty"))
}

/// `G_{n,0} = ∪_{j ≤ m_{n,0}} I_{2^n,j}` and `G_{n,k} = ∪_{m_{n,k} < j ≤ m_{n,k+1}} I_{2^n,j}`,
/// intersected with `[-π, π]`. The exact bound `μ(G_{n,k}) < 2^{-2^{n+k}}` is checked.
pub fn build_gnk(test: &SchnorrTest, n: u32, k: u32) -> Result<IntervalSet> {
    let m = select_m_all(test, n, k + 1)?;
    let level = 1u32 << n;
    let range = if k == 0 { 0..=m[0] } else { m[k as usize] + 1..=m[k as usize + 1] };
    let mut raw = Vec::new();
    for j in range {
        match test.interval(level, j) {
            Some((a, b)) => raw.push((Angle::rad(a), Angle::rad(b))),
            None => break,
        }
    }
    let g = IntervalSet::clipped(raw);
    let bound = Angle::rad(doubly_exponential(n + k)?);
    if g.measure() >= bound {
        return Err(Error::CellFailure {
            n,
            k,
            reason: format!("measure {} is not below 2^-{}", g.measure(), 1u64 << (n + k)),
        });
    }
    Ok(g)
}

/// Exact check of `μ(G_{n,k}) < 2^{-2^{n+k}}`.
pub fn cell_measure_ok(g: &IntervalSet, n: u32, k: u32) -> Result<bool> {
    Ok(g.measure() < Angle::rad(doubly_exponential(n + k)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn disjointify_examples() {
        assert_eq!(disjointify(&[(q(1, 1), q(3, 1)), (q(0, 1), q(2, 1))]), vec![(q(0, 1), q(2, 1)), (q(2, 1), q(3, 1))]);
        let d = vec![(q(2, 1), q(3, 1)), (q(-1, 1), q(0, 1))];
        assert_eq!(disjointify(&d), vec![(q(-1, 1), q(0, 1)), (q(2, 1), q(3, 1))]);
        assert_eq!(disjointify(&[(q(0, 1), q(3, 1)), (q(1, 1), q(2, 1))]), vec![(q(0, 1), q(3, 1))]);
    }

    #[test]
    fn canonical_stream_tiles_the_level() {
        let t = SchnorrTest::rational_point(q(1, 3)).unwrap();
        for n in 0..4 {
            let total = t.level_measure_exact(n);
            let mut listed = Q::zero();
            for j in 0..40 {
                let (a, b) = t.interval(n, j).unwrap();
                listed += &b - &a;
                assert_eq!(&listed + t.tail_bound(n, j), total, "n={n} j={j}");
            }
            assert!(total <= pow2(-(n as i64)));
        }
    }

    #[test]
    fn canonical_indices() {
        let t = SchnorrTest::rational_point(q(1, 3)).unwrap();
        assert_eq!(select_m_all(&t, 0, 2).unwrap(), vec![0, 3, 11]);
        assert_eq!(select_m_all(&t, 1, 2).unwrap(), vec![1, 9, 25]);
        let g00 = build_gnk(&t, 0, 0).unwrap();
        assert_eq!(g00.len(), 1);
        assert!(g00.contains_rad(&q(1, 3)));
        assert!(!build_gnk(&t, 0, 1).unwrap().contains_rad(&q(1, 3)));
        for n in 0..3 {
            for k in 0..3 {
                let g = build_gnk(&t, n, k).unwrap();
                assert!(cell_measure_ok(&g, n, k).unwrap());
            }
        }
    }

    #[test]
    fn single_interval_table() {
        let mut levels = BTreeMap::new();
        levels.insert(1, TableLevel { intervals: vec![(q(0, 1), q(1, 4))], tail: TailSpec::Exact });
        let t = SchnorrTest::table(levels).unwrap();
        assert_eq!(select_m_all(&t, 0, 3).unwrap(), vec![0, 1, 2, 3]);
        assert!(build_gnk(&t, 0, 1).unwrap().is_empty());
        assert_eq!(build_gnk(&t, 0, 0).unwrap().len(), 1);
    }

    #[test]
    fn table_validation() {
        let mut levels = BTreeMap::new();
        levels.insert(0, TableLevel { intervals: vec![(q(0, 1), q(1, 1)), (q(1, 2), q(3, 4))], tail: TailSpec::Exact });
        assert!(SchnorrTest::table(levels).is_err());
        let mut levels = BTreeMap::new();
        levels.insert(2, TableLevel { intervals: vec![(q(0, 1), q(1, 2))], tail: TailSpec::Exact });
        assert!(SchnorrTest::table(levels).is_err());
        let mut levels = BTreeMap::new();
        levels.insert(
            0,
            TableLevel { intervals: vec![(q(0, 1), q(1, 4)), (q(1, 2), q(3, 4))], tail: TailSpec::Table(vec![q(1, 8), q(0, 1)]) },
        );
        assert!(SchnorrTest::table(levels).is_err());
    }

    #[test]
    fn exhausted_table_tail() {
        let mut levels = BTreeMap::new();
        levels.insert(
            1,
            TableLevel { intervals: vec![(q(0, 1), q(1, 8))], tail: TailSpec::Table(vec![q(1, 16)]) },
        );
        let t = SchnorrTest::table(levels).unwrap();
        assert_eq!(select_m(&t, 0, 0).unwrap(), 0);
        assert!(matches!(select_m(&t, 0, 1), Err(Error::InsufficientCover(_))));
    }

    #[test]
    fn json_roundtrip() {
        let s = r#"{"schema":"v1","family":"rational-point","t0":"1/3"}"#;
        let t = SchnorrTest::from_json(s).unwrap();
        assert_eq!(t.to_json(), s);
        let s = r#"{"schema":"v1","levels":[{"n":0,"intervals":[["0","1/4"]],"tail":"exact"},{"n":1,"intervals":[["1","9/8"]],"tail":["1/16"]}]}"#;
        let t = SchnorrTest::from_json(s).unwrap();
        assert_eq!(SchnorrTest::from_json(&t.to_json()).unwrap(), t);
        assert_eq!(t.tail_bound(1, 5), q(1, 16));
        assert!(SchnorrTest::from_json(r#"{"family":"nope","t0":"0"}"#).is_err());
        assert!(SchnorrTest::from_json(r#"{"family":"rational-point","t0":"3"}"#).is_err());
    }
}
