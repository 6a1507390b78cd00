//! The transcribed reference table and its sidecar of known misprints.
//!
//! The table file holds values exactly as printed, typos included. The
//! notes file lists each known misprint so a comparison can tell a
//! documented discrepancy apart from a regression.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Deserialize;
use thiserror::Error;

pub const TABLE_HEADER: &str = "n,a,p,a2_minus_4pn,d,h,mark";
pub const NOTES_HEADER: &str = "n,a,p,field,printed,expected,note";

/// The shipped transcription and its notes.
pub const BUNDLED_TABLE: &str = include_str!("../data/paper_table1.csv");
pub const BUNDLED_NOTES: &str = include_str!("../data/paper_table1.notes.csv");

#[derive(Debug, Error)]
pub enum RefError {
    #[error("expected header `{expected}`, found `{found}`")]
    Header { expected: &'static str, found: String },
    #[error("line {line}: {msg}")]
    Record { line: u64, msg: String },
    #[error("duplicate entry for (n, a, p) = ({0}, {1}, {2})")]
    Duplicate(u32, u64, u64),
}

/// Annotation printed next to a class number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mark {
    None,
    /// Condition (ii) fails, or the triple is exceptional.
    Star,
    /// Both conditions fail.
    DoubleStar,
}

impl FromStr for Mark {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "" => Ok(Mark::None),
            "*" => Ok(Mark::Star),
            "**" => Ok(Mark::DoubleStar),
            other => Err(format!("unknown mark `{other}`")),
        }
    }
}

impl fmt::Display for Mark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mark::None => "",
            Mark::Star => "*",
            Mark::DoubleStar => "**",
        })
    }
}

/// The mark the legend prescribes for the given condition outcomes.
pub fn expected_mark(cond_i: bool, cond_ii: bool, exceptional: bool) -> Mark {
    if !cond_i && !cond_ii {
        Mark::DoubleStar
    } else if !cond_ii || exceptional {
        Mark::Star
    } else {
        Mark::None
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefRow {
    pub n: u32,
    pub a: u64,
    pub p: u64,
    pub a2_minus_4pn: i128,
    pub d: u64,
    pub h: u64,
    pub mark: Mark,
}

#[derive(Deserialize)]
struct RawRow {
    n: u32,
    a: u64,
    p: u64,
    a2_minus_4pn: i128,
    d: u64,
    h: u64,
    mark: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoteField {
    D,
    H,
    Mark,
}

impl FromStr for NoteField {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "d" => Ok(NoteField::D),
            "h" => Ok(NoteField::H),
            "mark" => Ok(NoteField::Mark),
            other => Err(format!("unknown field `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefNote {
    pub n: u32,
    pub a: u64,
    pub p: u64,
    pub field: NoteField,
    pub printed: String,
    pub expected: String,
    pub note: String,
}

#[derive(Deserialize)]
struct RawNote {
    n: u32,
    a: u64,
    p: u64,
    field: String,
    printed: String,
    expected: String,
    note: String,
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn check_header(rdr: &mut csv::Reader<&[u8]>, expected: &'static str) -> Result<(), RefError> {
    let found = rdr
        .headers()
        .map_err(|e| RefError::Record {
            line: 1,
            msg: e.to_string(),
        })?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if found != expected {
        return Err(RefError::Header { expected, found });
    }
    Ok(())
}

fn record_err(e: csv::Error) -> RefError {
    let line = e.position().map_or(0, |p| p.line());
    RefError::Record {
        line,
        msg: e.to_string(),
    }
}

/// Parses the transcribed table. Rows keep file order; `(n, a, p)` must
/// be unique.
pub fn parse_reference_table(text: &str) -> Result<Vec<RefRow>, RefError> {
    let mut rdr = reader(text);
    check_header(&mut rdr, TABLE_HEADER)?;
    let mut seen = HashMap::new();
    let mut rows = Vec::new();
    for rec in rdr.deserialize::<RawRow>() {
        let raw = rec.map_err(record_err)?;
        let mark = raw.mark.parse().map_err(|msg| RefError::Record {
            line: rows.len() as u64 + 2,
            msg,
        })?;
        if seen.insert((raw.n, raw.a, raw.p), ()).is_some() {
            return Err(RefError::Duplicate(raw.n, raw.a, raw.p));
        }
        rows.push(RefRow {
            n: raw.n,
            a: raw.a,
            p: raw.p,
            a2_minus_4pn: raw.a2_minus_4pn,
            d: raw.d,
            h: raw.h,
            mark,
        });
    }
    Ok(rows)
}

pub fn parse_notes(text: &str) -> Result<Vec<RefNote>, RefError> {
    let mut rdr = reader(text);
    check_header(&mut rdr, NOTES_HEADER)?;
    let mut notes = Vec::new();
    for rec in rdr.deserialize::<RawNote>() {
        let raw = rec.map_err(record_err)?;
        let field = raw.field.parse().map_err(|msg| RefError::Record {
            line: notes.len() as u64 + 2,
            msg,
        })?;
        notes.push(RefNote {
            n: raw.n,
            a: raw.a,
            p: raw.p,
            field,
            printed: raw.printed,
            expected: raw.expected,
            note: raw.note,
        });
    }
    Ok(notes)
}

/// Reference rows keyed by `(n, a, p)`, plus the known misprints.
#[derive(Debug, Clone, Default)]
pub struct Reference {
    pub rows: HashMap<(u32, u64, u64), RefRow>,
    pub notes: Vec<RefNote>,
}

impl Reference {
    pub fn new(rows: Vec<RefRow>, notes: Vec<RefNote>) -> Self {
        Reference {
            rows: rows.into_iter().map(|r| ((r.n, r.a, r.p), r)).collect(),
            notes,
        }
    }

    pub fn bundled() -> Self {
        let rows = parse_reference_table(BUNDLED_TABLE).expect("bundled table parses");
        let notes = parse_notes(BUNDLED_NOTES).expect("bundled notes parse");
        Reference::new(rows, notes)
    }

    pub fn get(&self, n: u32, a: u64, p: u64) -> Option<&RefRow> {
        self.rows.get(&(n, a, p))
    }

    pub fn note(&self, n: u32, a: u64, p: u64, field: NoteField) -> Option<&RefNote> {
        self.notes.iter().find(|x| (x.n, x.a, x.p, x.field) == (n, a, p, field))
    }
}
