//! Table rows: one verified triple `(n, a, p)` each, rendered as CSV or
//! JSON with a fixed field order.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use imagclass::arith::is_prime_u64;
use imagclass::fieldparams::build_u64;
use imagclass::theorem::{verify_u64, TheoremError, Verdict};

use crate::reference::{expected_mark, Mark, NoteField, Reference};

pub const CSV_HEADER: &str = "n,a,p,a2_minus_4pn,d,h,order,cond_i,cond_ii,exceptional,paper_h,mismatch";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub n: u32,
    pub a: u64,
    pub p: u64,
    #[serde(with = "crate::jsonnum")]
    pub a2_minus_4pn: BigInt,
    #[serde(with = "crate::jsonnum")]
    pub d: BigInt,
    pub h: u64,
    pub order: u64,
    pub cond_i: bool,
    pub cond_ii: bool,
    pub exceptional: bool,
    pub paper_h: Option<u64>,
    pub mismatch: bool,
}

impl TableRow {
    pub fn from_verdict(v: &Verdict) -> Self {
        let a = u64::try_from(&v.params.a).expect("table triples fit u64");
        let p = u64::try_from(&v.params.p).expect("table triples fit u64");
        TableRow {
            n: v.params.n,
            a,
            p,
            a2_minus_4pn: v.params.signed_value(),
            d: v.params.d.clone(),
            h: v.class_number.expect("table rows carry class numbers"),
            order: v.order_of_class,
            cond_i: v.cond_i.holds,
            cond_ii: v.cond_ii.holds,
            exceptional: v.exceptional,
            paper_h: None,
            mismatch: false,
        }
    }

    pub fn key(&self) -> (u32, u64, u64) {
        (self.n, self.a, self.p)
    }

    /// Hypotheses hold outside the exceptional set but the order is not `n`.
    pub fn violates(&self) -> bool {
        (self.a == 1 || self.cond_i || self.cond_ii) && !self.exceptional && self.order != self.n as u64
    }

    pub fn csv_line(&self) -> String {
        let paper_h = self.paper_h.map(|h| h.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.a,
            self.p,
            self.a2_minus_4pn,
            self.d,
            self.h,
            self.order,
            self.cond_i,
            self.cond_ii,
            self.exceptional,
            paper_h,
            self.mismatch
        )
    }
}

pub fn render_csv(rows: &[TableRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}

pub fn render_json(rows: &[TableRow]) -> String {
    let mut s = serde_json::to_string_pretty(rows).expect("rows serialize");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub a_max: u64,
    pub p_max: u64,
    pub n_max: u32,
    pub d_max: Option<u64>,
}

/// Every `(n, a, p)` with odd `a <= a_max`, prime `p <= p_max`, odd
/// `3 <= n <= n_max` that passes parameter validation, sorted.
pub fn candidate_triples(b: &Bounds) -> Vec<(u32, u64, u64)> {
    let primes: Vec<u64> = (2..=b.p_max).filter(|&p| is_prime_u64(p)).collect();
    let mut out = Vec::new();
    for n in (3..=b.n_max).step_by(2) {
        for a in (1..=b.a_max).step_by(2) {
            for &p in &primes {
                if a % p != 0 && fits(a, p, n) {
                    out.push((n, a, p));
                }
            }
        }
    }
    out
}

fn fits(a: u64, p: u64, n: u32) -> bool {
    BigInt::from(a).pow(2) < BigInt::from(4) * BigInt::from(p).pow(n)
}

/// Where a row came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Computed,
    Cached,
}

/// Computes rows for every candidate triple in parallel (on the current
/// rayon pool). Cached rows are reused; rows with `d > d_max` are dropped
/// before any class number is computed.
pub fn compute_rows(
    b: &Bounds,
    cache: &HashMap<(u32, u64, u64), TableRow>,
) -> Result<Vec<(TableRow, Origin)>, TheoremError> {
    let triples = candidate_triples(b);
    let results: Vec<Option<(TableRow, Origin)>> = triples
        .par_iter()
        .map(|&(n, a, p)| -> Result<_, TheoremError> {
            if let Some(row) = cache.get(&(n, a, p)) {
                if b.d_max.map_or(true, |m| row.d <= BigInt::from(m)) {
                    return Ok(Some((row.clone(), Origin::Cached)));
                }
                return Ok(None);
            }
            if let Some(m) = b.d_max {
                let params = build_u64(a, p, n).map_err(TheoremError::from)?;
                if params.d > BigInt::from(m) {
                    return Ok(None);
                }
            }
            let v = verify_u64(a, p, n, true)?;
            Ok(Some((TableRow::from_verdict(&v), Origin::Computed)))
        })
        .collect::<Result<_, _>>()?;
    Ok(results.into_iter().flatten().collect())
}

/// Outcome of comparing computed rows with the reference table.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Comparison {
    pub joined: usize,
    pub h_matches: usize,
    pub known: Vec<String>,
    pub regressions: Vec<String>,
    /// Reference rows with no computed counterpart under the bounds.
    pub uncovered: usize,
}

/// Fills `paper_h` and `mismatch`, then classifies every disagreement in
/// `h`, `d` or the condition mark as known (listed in the notes) or a
/// regression.
pub fn join_reference(rows: &mut [TableRow], reference: &Reference) -> Comparison {
    let mut cmp = Comparison::default();
    for row in rows.iter_mut() {
        let Some(pr) = reference.get(row.n, row.a, row.p) else {
            continue;
        };
        cmp.joined += 1;
        row.paper_h = Some(pr.h);
        row.mismatch = pr.h != row.h;
        let (n, a, p) = row.key();
        let mut check = |field: NoteField, label: &str, printed: String, ours: String| {
            if printed == ours {
                return;
            }
            let msg = format!("({n}, {a}, {p}) {label}: printed {printed}, computed {ours}");
            match reference.note(n, a, p, field) {
                Some(note) if note.expected == ours && note.printed == printed => {
                    cmp.known.push(format!("{msg} [known: {}]", note.note))
                }
                _ => cmp.regressions.push(msg),
            }
        };
        check(NoteField::H, "h", pr.h.to_string(), row.h.to_string());
        check(NoteField::D, "d", pr.d.to_string(), row.d.to_string());
        let ours: Mark = expected_mark(row.cond_i, row.cond_ii, row.exceptional);
        check(NoteField::Mark, "mark", mark_label(pr.mark), mark_label(ours));
        if !row.mismatch {
            cmp.h_matches += 1;
        }
    }
    cmp.uncovered = reference.rows.len() - cmp.joined;
    cmp
}

fn mark_label(m: Mark) -> String {
    match m {
        Mark::None => "(none)".into(),
        other => other.to_string(),
    }
}

/// Human summary of a table run, written to the summary stream.
pub fn summary(rows: &[(TableRow, Origin)], cmp: Option<&Comparison>) -> String {
    let mut s = String::new();
    let cached = rows.iter().filter(|(_, o)| *o == Origin::Cached).count();
    let exceptional = rows.iter().filter(|(r, _)| r.exceptional).count();
    let violations: Vec<_> = rows.iter().filter(|(r, _)| r.violates()).collect();
    let _ = writeln!(s, "rows: {} ({} from cache)", rows.len(), cached);
    let _ = writeln!(s, "exceptional rows: {exceptional}");
    let _ = writeln!(s, "violations: {}", violations.len());
    for (r, _) in violations {
        let _ = writeln!(s, "  VIOLATION ({}, {}, {}): order {} != n", r.n, r.a, r.p, r.order);
    }
    if let Some(c) = cmp {
        let _ = writeln!(s, "reference rows joined: {} (not in range: {})", c.joined, c.uncovered);
        let _ = writeln!(s, "class numbers matching: {}/{}", c.h_matches, c.joined);
        let _ = writeln!(s, "known reference discrepancies: {}", c.known.len());
        for k in &c.known {
            let _ = writeln!(s, "  {k}");
        }
        let _ = writeln!(s, "regressions: {}", c.regressions.len());
        for r in &c.regressions {
            let _ = writeln!(s, "  REGRESSION {r}");
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows_for(b: Bounds) -> Vec<TableRow> {
        compute_rows(&b, &HashMap::new())
            .unwrap()
            .into_iter()
            .map(|(r, _)| r)
            .collect()
    }

    #[test]
    fn small_tables() {
        let b = Bounds {
            a_max: 1,
            p_max: 2,
            n_max: 9,
            d_max: None,
        };
        let rows = rows_for(b);
        let got: Vec<(u32, i64, u64)> = rows.iter().map(|r| (r.n, i64::try_from(&r.d).unwrap(), r.h)).collect();
        assert_eq!(got, vec![(3, 31, 3), (5, 127, 5), (7, 511, 14), (9, 2047, 18)]);

        let b = Bounds {
            a_max: 15,
            p_max: 13,
            n_max: 3,
            d_max: None,
        };
        let rows = rows_for(b);
        assert!(rows.len() >= 20);
        assert_eq!(rows[0].csv_line(), "3,1,2,-31,31,3,3,true,true,false,,false");

        let b = Bounds {
            a_max: 15,
            p_max: 13,
            n_max: 9,
            d_max: Some(0),
        };
        assert!(rows_for(b).is_empty());
    }

    #[test]
    fn d_max_filters_before_computing() {
        let b = Bounds {
            a_max: 15,
            p_max: 13,
            n_max: 5,
            d_max: Some(1000),
        };
        let rows = rows_for(b);
        assert!(!rows.is_empty());
        assert!(rows.iter().all(|r| r.d <= BigInt::from(1000)));
    }

    #[test]
    fn csv_and_json_shapes() {
        let b = Bounds {
            a_max: 5,
            p_max: 2,
            n_max: 3,
            d_max: None,
        };
        let rows = rows_for(b);
        let csv = render_csv(&rows);
        assert!(csv.starts_with(&format!("{CSV_HEADER}\n")));
        assert!(csv.contains("3,5,2,-7,7,1,1,false,false,true,,false\n"));
        let json: serde_json::Value = serde_json::from_str(&render_json(&rows)).unwrap();
        let first = &json[0];
        let keys: Vec<&str> = first.as_object().unwrap().keys().map(|k| k.as_str()).collect();
        assert_eq!(keys.join(","), CSV_HEADER);
        let back: Vec<TableRow> = serde_json::from_str(&render_json(&rows)).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn reference_join() {
        let b = Bounds {
            a_max: 15,
            p_max: 13,
            n_max: 3,
            d_max: None,
        };
        let mut rows = rows_for(b);
        let cmp = join_reference(&mut rows, &Reference::bundled());
        assert!(cmp.regressions.is_empty(), "{:?}", cmp.regressions);
        assert_eq!(cmp.joined, cmp.h_matches);
        assert!(cmp.known.iter().any(|k| k.starts_with("(3, 5, 2) mark")));
        let r = rows.iter().find(|r| r.key() == (3, 1, 2)).unwrap();
        assert_eq!((r.paper_h, r.mismatch), (Some(3), false));
    }
}
