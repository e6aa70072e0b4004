//! Exact check of the stabilization statement: inside the certified range
//! the zero coefficients `g_{j,k}` coincide with the coefficients
//! `r̃_{k;m,j}` of `(H_{m,j})`.
//!
//! A pair `(m, j)` is admissible when `j(j+3) >= (m+2j)(m+1)`, and then
//! the equality holds for `k <= (m+2j)(m+1)/2 - 1 - j`. Both sides are
//! computed by independent pipelines: the nonlinear elimination in
//! [`crate::zero_series`] and recurrence plus convolution in
//! [`crate::qsequences`].

use std::collections::BTreeMap;

use rayon::prelude::*;
use rug::Integer;
use serde::Serialize;

use crate::qsequences::{h_series_from, r_sequence};
use crate::series::Coef;
use crate::zero_series::{solve_zero_series, SolveError};

/// Number of indices past `k_max` that are probed and reported.
pub const PROBE_BEYOND: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TheoremRange {
    pub m: u64,
    pub j: u64,
    /// `(m+2j)(m+1)/2 - 1 - j`; only certified when `j_admissible`.
    pub k_max: u64,
    pub j_admissible: bool,
}

pub fn theorem_range(m: u64, j: u64) -> TheoremRange {
    assert!(m >= 1, "m must be positive");
    let width = (m + 2 * j) * (m + 1);
    TheoremRange { m, j, k_max: width / 2 - 1 - j, j_admissible: j * (j + 3) >= width }
}

/// The same admissibility test through the radical form
/// `j >= (2m - 1 + √(8m²+1)) / 2`, evaluated exactly with an integer
/// ceiling square root.
pub fn admissible_by_radical(m: u64, j: u64) -> bool {
    let disc = Integer::from(8 * m * m + 1);
    let root = disc.clone().sqrt();
    let ceil_root = if Integer::from(root.square_ref()) == disc { root } else { root + 1 };
    // 2j - 2m + 1 >= √(8m²+1), compared as integers
    Integer::from(2 * j + 1) - Integer::from(2 * m) >= ceil_root
}

/// Largest `m` for which `j` is admissible (0 if none).
pub fn largest_certified_m(j: u64) -> u64 {
    assert!(j >= 2, "j must be at least 2");
    let mut m = 0;
    while theorem_range(m + 1, j).j_admissible {
        m += 1;
    }
    m
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportEntry {
    pub m: u64,
    pub j: u64,
    pub k: u64,
    #[serde(serialize_with = "as_decimal")]
    pub g_value: Coef,
    #[serde(serialize_with = "as_decimal")]
    pub r_tilde_value: Coef,
    pub in_range: bool,
    pub equal: bool,
}

fn as_decimal<S: serde::Serializer>(c: &Coef, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&c.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairSummary {
    pub m: u64,
    pub j: u64,
    pub admissible: bool,
    pub k_max: u64,
    /// Inadmissible pairs are reported but never asserted.
    pub probed_only: bool,
    pub in_range_matches: u64,
    pub in_range_mismatches: u64,
    /// First `k` past the certified range where the two sides differ,
    /// among the probed indices.
    pub first_out_of_range_deviation: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportSummary {
    pub m_max: u64,
    pub j_max: u64,
    pub in_range_matches: u64,
    pub in_range_mismatches: u64,
    pub verified: bool,
    pub pairs: Vec<PairSummary>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StabilizationReport {
    pub entries: Vec<ReportEntry>,
    pub summary: ReportSummary,
}

impl StabilizationReport {
    pub fn first_violation(&self) -> Option<&ReportEntry> {
        self.entries.iter().find(|e| e.in_range && !e.equal)
    }

    /// CSV with columns `m,j,k,in_range,g,r_tilde,equal`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,j,k,in_range,g,r_tilde,equal\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                e.m, e.j, e.k, e.in_range, e.g_value, e.r_tilde_value, e.equal
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StabilizationError {
    #[error("g_{{{},{}}} = {} but r~_{{{};{},{}}} = {}", .0.j, .0.k, .0.g_value, .0.k, .0.m, .0.j, .0.r_tilde_value)]
    TheoremViolation(Box<ReportEntry>),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Computes every comparison for `1 <= m <= m_max`, `2 <= j <= j_max`,
/// `0 <= k <= k_max + 2` without judging the outcome. Work is spread over
/// the rayon pool by `j`; the result is ordered by `(m, j, k)`.
pub fn build_report(m_max: u64, j_max: u64) -> Result<StabilizationReport, SolveError> {
    assert!(m_max >= 1 && j_max >= 2, "need m_max >= 1 and j_max >= 2");
    let depth = |m: u64, j: u64| theorem_range(m, j).k_max + PROBE_BEYOND;
    let deepest = (2..=j_max).flat_map(|j| (1..=m_max).map(move |m| depth(m, j))).max().unwrap_or(0);
    let r = r_sequence(deepest as usize);

    let per_j: Vec<Vec<(PairSummary, Vec<ReportEntry>)>> = (2..=j_max)
        .into_par_iter()
        .map(|j| {
            let n = (1..=m_max).map(|m| depth(m, j)).max().unwrap_or(0);
            let zs = solve_zero_series(j as i64, n as usize)?;
            Ok((1..=m_max)
                .map(|m| {
                    let range = theorem_range(m, j);
                    let top = depth(m, j);
                    let h = h_series_from(&r, m, j, top as usize);
                    let entries: Vec<ReportEntry> = (0..=top)
                        .map(|k| {
                            let g_value = zs.coeffs()[k as usize].clone();
                            let r_tilde_value = h.coeff(k as usize).expect("within order").clone();
                            ReportEntry {
                                m,
                                j,
                                k,
                                equal: g_value == r_tilde_value,
                                in_range: range.j_admissible && k <= range.k_max,
                                g_value,
                                r_tilde_value,
                            }
                        })
                        .collect();
                    let count = |pred: &dyn Fn(&ReportEntry) -> bool| entries.iter().filter(|e| pred(e)).count() as u64;
                    let summary = PairSummary {
                        m,
                        j,
                        admissible: range.j_admissible,
                        k_max: range.k_max,
                        probed_only: !range.j_admissible,
                        in_range_matches: count(&|e| e.in_range && e.equal),
                        in_range_mismatches: count(&|e| e.in_range && !e.equal),
                        first_out_of_range_deviation: entries
                            .iter()
                            .find(|e| e.k > range.k_max && !e.equal)
                            .map(|e| e.k),
                    };
                    (summary, entries)
                })
                .collect())
        })
        .collect::<Result<_, SolveError>>()?;

    let mut by_pair: BTreeMap<(u64, u64), (PairSummary, Vec<ReportEntry>)> = BTreeMap::new();
    for (summary, entries) in per_j.into_iter().flatten() {
        by_pair.insert((summary.m, summary.j), (summary, entries));
    }
    let mut entries = Vec::new();
    let mut pairs = Vec::new();
    for (_, (summary, mut e)) in by_pair {
        pairs.push(summary);
        entries.append(&mut e);
    }
    let in_range_matches = pairs.iter().map(|p| p.in_range_matches).sum();
    let in_range_mismatches = pairs.iter().map(|p| p.in_range_mismatches).sum();
    Ok(StabilizationReport {
        entries,
        summary: ReportSummary {
            m_max,
            j_max,
            in_range_matches,
            in_range_mismatches,
            verified: in_range_mismatches == 0,
            pairs,
        },
    })
}

/// [`build_report`] followed by the check that no certified comparison
/// failed.
pub fn verify_theorem(m_max: u64, j_max: u64) -> Result<StabilizationReport, StabilizationError> {
    let report = build_report(m_max, j_max)?;
    if let Some(witness) = report.first_violation() {
        return Err(StabilizationError::TheoremViolation(Box::new(witness.clone())));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::{ops::Pow, Float};

    #[test]
    fn range_examples() {
        for j in 1..=30 {
            let r = theorem_range(1, j);
            assert_eq!(r.j_admissible, j >= 2);
            assert_eq!(r.k_max, j);
        }
        assert!(theorem_range(2, 5).j_admissible);
        assert!(!theorem_range(2, 4).j_admissible);
        assert_eq!(theorem_range(2, 5).k_max, 12);
        assert!(theorem_range(3, 7).j_admissible);
        assert_eq!(theorem_range(3, 7).k_max, 26);
    }

    #[test]
    fn largest_m_examples() {
        assert_eq!(largest_certified_m(2), 1);
        assert_eq!(largest_certified_m(5), 2);
        assert_eq!(largest_certified_m(7), 3);
    }

    #[test]
    fn radical_and_integer_forms_agree() {
        for m in 1..=10 {
            for j in 0..=100 {
                assert_eq!(theorem_range(m, j).j_admissible, admissible_by_radical(m, j), "m={m} j={j}");
            }
        }
    }

    #[test]
    fn smallest_admissible_j_matches_high_precision_radical() {
        for m in 1..=4u64 {
            let smallest = (1..).find(|&j| theorem_range(m, j).j_admissible).unwrap();
            let disc = Float::with_val(256, 8 * m * m + 1);
            let bound: Float = (Float::with_val(256, 2 * m - 1) + disc.sqrt()) / 2u32;
            let ceil = bound.ceil().to_integer().unwrap();
            assert_eq!(Integer::from(smallest), ceil, "m={m}");
        }
        // sanity on the Pell boundary 8m²+1 = 17² at m = 6
        assert_eq!(Integer::from(17).pow(2u32), 8 * 36 + 1);
        assert!(theorem_range(6, 14).j_admissible && !theorem_range(6, 13).j_admissible);
    }

    #[test]
    fn small_sweep_verifies() {
        let report = verify_theorem(2, 6).unwrap();
        assert!(report.summary.verified);
        let p = report.summary.pairs.iter().find(|p| p.m == 2 && p.j == 4).unwrap();
        assert!(p.probed_only);
        assert_eq!(p.in_range_matches + p.in_range_mismatches, 0);
        let e = report.entries.iter().find(|e| e.m == 2 && e.j == 5 && e.k == 6).unwrap();
        assert_eq!(e.g_value, Coef::from(220));
        assert!(e.in_range && e.equal);
        let keys: Vec<_> = report.entries.iter().map(|e| (e.m, e.j, e.k)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn m1_reproduces_prior_result() {
        let report = verify_theorem(1, 8).unwrap();
        for e in report.entries.iter().filter(|e| e.in_range) {
            assert!(e.k <= e.j);
            assert!(e.equal);
        }
    }

    #[test]
    fn nested_ranges_agree() {
        let report = build_report(4, 12).unwrap();
        let value = |m: u64, j: u64, k: u64| {
            report.entries.iter().find(|e| e.m == m && e.j == j && e.k == k).map(|e| e.r_tilde_value.clone())
        };
        for j in 2..=12 {
            let top = largest_certified_m(j).min(4);
            for m in 1..top {
                for m2 in m + 1..=top {
                    for k in 0..=theorem_range(m, j).k_max {
                        assert_eq!(value(m, j, k), value(m2, j, k), "m={m} m'={m2} j={j} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn csv_layout() {
        let report = build_report(1, 2).unwrap();
        let csv = report.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("m,j,k,in_range,g,r_tilde,equal"));
        assert_eq!(lines.next(), Some("1,2,0,true,1,1,true"));
        assert_eq!(csv.lines().count(), 1 + report.entries.len());
    }
}
