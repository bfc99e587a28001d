//! Text formats for matrices (`.wam`) and assignment tables (`.wat`).
//!
//! `.wam`: a header line `n k`, then `n` lines of `k` space-separated 0/1
//! digits. `.wat`: the same header, then `n` lines `i: c1 c2 ...` listing
//! user `i`'s codes in ascending order. Every line ends with `\n`.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;
use walsh_core::{AssignmentTable, BinaryMatrix};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Invalid(#[from] walsh_core::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
}

fn parse_err(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn write_matrix(m: &BinaryMatrix) -> String {
    format!("{} {}\n{}", m.n(), m.k(), m)
}

pub fn write_table(s: &AssignmentTable) -> String {
    let mut out = format!("{} {}\n", s.n(), s.k());
    for (i, codes) in s.rows().iter().enumerate() {
        write!(out, "{}:", i + 1).unwrap();
        for c in codes {
            write!(out, " {c}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Numbered lines with trailing blank lines dropped.
fn content_lines(text: &str) -> Vec<(usize, &str)> {
    let mut lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
    while lines.last().is_some_and(|(_, l)| l.trim().is_empty()) {
        lines.pop();
    }
    lines
}

fn parse_header(lines: &[(usize, &str)]) -> Result<(usize, usize), FormatError> {
    let &(no, first) = lines
        .first()
        .ok_or_else(|| parse_err(1, "missing header \"n k\""))?;
    let fields: Vec<&str> = first.split_whitespace().collect();
    let [n, k] = fields[..] else {
        return Err(parse_err(no, "header must be \"n k\""));
    };
    let dim = |s: &str, name: &str| -> Result<usize, FormatError> {
        match s.parse::<usize>() {
            Ok(v) if v > 0 => Ok(v),
            _ => Err(parse_err(
                no,
                format!("{name} must be a positive integer, got {s:?}"),
            )),
        }
    };
    Ok((dim(n, "n")?, dim(k, "k")?))
}

fn check_row_count(lines: &[(usize, &str)], n: usize) -> Result<(), FormatError> {
    let found = lines.len() - 1;
    if found < n {
        let next = lines.last().map_or(1, |l| l.0) + 1;
        return Err(parse_err(
            next,
            format!("expected {n} rows, file ends after {found}"),
        ));
    }
    if found > n {
        return Err(parse_err(
            lines[n + 1].0,
            format!("expected {n} rows, found more"),
        ));
    }
    Ok(())
}

pub fn parse_matrix(text: &str) -> Result<BinaryMatrix, FormatError> {
    let lines = content_lines(text);
    let (n, k) = parse_header(&lines)?;
    check_row_count(&lines, n)?;
    let mut rows = Vec::with_capacity(n);
    for &(no, line) in &lines[1..] {
        let row = line
            .split_whitespace()
            .map(|tok| match tok {
                "0" => Ok(0u8),
                "1" => Ok(1u8),
                _ => Err(parse_err(no, format!("expected 0 or 1, got {tok:?}"))),
            })
            .collect::<Result<Vec<u8>, _>>()?;
        if row.len() != k {
            return Err(parse_err(
                no,
                format!("expected {k} entries, found {}", row.len()),
            ));
        }
        rows.push(row);
    }
    Ok(BinaryMatrix::from_rows(&rows)?)
}

pub fn parse_table(text: &str) -> Result<AssignmentTable, FormatError> {
    let lines = content_lines(text);
    let (n, k) = parse_header(&lines)?;
    check_row_count(&lines, n)?;
    let mut rows = Vec::with_capacity(n);
    for (idx, &(no, line)) in lines[1..].iter().enumerate() {
        let (user, codes) = line
            .split_once(':')
            .ok_or_else(|| parse_err(no, "expected \"i: c1 c2 ...\""))?;
        if user.trim().parse::<usize>().ok() != Some(idx + 1) {
            return Err(parse_err(
                no,
                format!("expected user {}, got {:?}", idx + 1, user.trim()),
            ));
        }
        let codes = codes
            .split_whitespace()
            .map(|tok| {
                tok.parse::<usize>()
                    .map_err(|_| parse_err(no, format!("bad code number {tok:?}")))
            })
            .collect::<Result<Vec<usize>, _>>()?;
        rows.push(codes);
    }
    Ok(AssignmentTable::new(k, rows)?)
}

/// Loads a matrix from a `.wam` file, or from a `.wat` table by extension.
pub fn load_matrix(path: &Path) -> Result<BinaryMatrix, FormatError> {
    let text = fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })?;
    if path.extension().is_some_and(|e| e == "wat") {
        Ok(parse_table(&text)?.to_matrix()?)
    } else {
        parse_matrix(&text)
    }
}
