//! Plain-text matrix and request-sequence formats.
//!
//! Matrix files start with a header line `k n`, followed by `k` rows of `n`
//! characters from `{0,1}`. Column `j` is read top to bottom, the first row
//! giving the most significant bit. Request files hold one `k`-character
//! bitstring per line. Blank lines are ignored in request files and after the
//! last matrix row.

use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use crate::gf2::{check_dim, GroupVector, Matrix, RequestSeq};

/// A parse failure at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, column, message: message.into() }
}

fn bit_at(ch: char, line: usize, column: usize) -> Result<u32, ParseError> {
    match ch {
        '0' => Ok(0),
        '1' => Ok(1),
        other => Err(err(line, column, format!("expected '0' or '1', found {other:?}"))),
    }
}

pub fn parse_matrix(text: &str) -> Result<Matrix, ParseError> {
    let mut lines = text.lines().map(|l| l.trim_end_matches('\r')).enumerate();
    let (_, header) = lines.next().ok_or_else(|| err(1, 1, "missing header line \"k n\""))?;
    let mut fields = header.split_whitespace();
    let mut field = |name: &str| -> Result<u32, ParseError> {
        let raw = fields.next().ok_or_else(|| err(1, 1, format!("header is missing {name}")))?;
        raw.parse::<u32>()
            .map_err(|_| err(1, header.find(raw).unwrap_or(0) + 1, format!("bad {name} {raw:?}")))
    };
    let k = field("k")?;
    let n = field("n")? as usize;
    let k = check_dim(k).map_err(|e| err(1, 1, e.to_string()))?;
    if fields.next().is_some() {
        return Err(err(1, 1, "header must contain exactly two integers"));
    }

    let mut columns = vec![0u32; n];
    for row in 0..k as usize {
        let (idx, line) = match lines.next() {
            Some(l) => l,
            None if n == 0 => continue,
            None => return Err(err(row + 2, 1, format!("expected {k} matrix rows, found {row}"))),
        };
        let lineno = idx + 1;
        let line = line.trim_end();
        let width = line.chars().count();
        if width != n {
            return Err(err(lineno, width.min(n) + 1, format!("row has {width} entries, expected {n}")));
        }
        for (j, ch) in line.chars().enumerate() {
            columns[j] = (columns[j] << 1) | bit_at(ch, lineno, j + 1)?;
        }
    }
    for (idx, line) in lines {
        if !line.trim().is_empty() {
            return Err(err(idx + 1, 1, "unexpected content after the last matrix row"));
        }
    }
    let columns = columns.into_iter().map(|b| GroupVector::new(k, b).expect("k-bit column")).collect();
    Ok(Matrix::new(k, columns).expect("validated dimension"))
}

pub fn format_matrix(m: &Matrix) -> String {
    let mut out = format!("{} {}\n", m.k(), m.n());
    for row in (0..m.k()).rev() {
        for c in m.columns() {
            out.push(if c.bits() >> row & 1 == 1 { '1' } else { '0' });
        }
        out.push('\n');
    }
    out
}

/// Parses a request file. When `k` is given every line must have that width;
/// otherwise the first line fixes it.
pub fn parse_requests(text: &str, k: Option<u8>) -> Result<RequestSeq, ParseError> {
    let mut width = k;
    let mut requests = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let len = line.chars().count();
        let k = match width {
            Some(k) => k,
            None => {
                let k = check_dim(len as u32).map_err(|e| err(lineno, 1, e.to_string()))?;
                width = Some(k);
                k
            }
        };
        if len != k as usize {
            return Err(err(lineno, len.min(k as usize) + 1, format!("request has width {len}, expected {k}")));
        }
        let mut bits = 0u32;
        for (j, ch) in line.chars().enumerate() {
            bits = (bits << 1) | bit_at(ch, lineno, j + 1)?;
        }
        if bits == 0 {
            return Err(err(lineno, 1, "zero request is not allowed"));
        }
        requests.push(GroupVector::new(k, bits).expect("k-bit request"));
    }
    let k = width.ok_or_else(|| err(1, 1, "empty request file and no dimension given"))?;
    Ok(RequestSeq::new(k, requests).expect("validated requests"))
}

/// Parses a sequence of bitstrings, one per line, allowing the zero vector.
pub fn parse_vectors(text: &str) -> Result<Vec<GroupVector>, ParseError> {
    let mut width: Option<usize> = None;
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let len = line.chars().count();
        match width {
            Some(w) if w != len => {
                return Err(err(lineno, len.min(w) + 1, format!("vector has width {len}, expected {w}")))
            }
            None => width = Some(len),
            _ => {}
        }
        for (j, ch) in line.chars().enumerate() {
            bit_at(ch, lineno, j + 1)?;
        }
        out.push(GroupVector::parse(line).map_err(|e| err(lineno, 1, e.to_string()))?);
    }
    Ok(out)
}

pub fn format_requests(r: &RequestSeq) -> String {
    let mut out = String::new();
    for v in r.requests() {
        let _ = writeln!(out, "{v}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const FOUR_COLUMNS: &str = "3 4\n1111\n0011\n0101\n";

    #[test]
    fn reads_four_columns_columns_top_to_bottom() {
        let m = parse_matrix(FOUR_COLUMNS).unwrap();
        let cols: Vec<String> = m.columns().iter().map(|c| c.to_string()).collect();
        assert_eq!(cols, ["100", "101", "110", "111"]);
        assert_eq!(format_matrix(&m), FOUR_COLUMNS);
    }

    #[test]
    fn empty_matrix() {
        let m = parse_matrix("2 0\n").unwrap();
        assert_eq!(m.n(), 0);
        assert_eq!(m.k(), 2);
        assert_eq!(parse_matrix("2 0\n\n\n").unwrap().n(), 0);
    }

    #[test]
    fn matrix_diagnostics() {
        let e = parse_matrix("3 4\n1111\n001\n0101\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 4));
        let e = parse_matrix("3 4\n1111\n0021\n0101\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 3));
        let e = parse_matrix("3 4\n1111\n0011\n").unwrap_err();
        assert_eq!(e.line, 4);
        assert!(parse_matrix("x 4\n").is_err());
        assert!(parse_matrix("0 4\n").is_err());
        assert!(parse_matrix("3 4\n1111\n0011\n0101\n1111\n").is_err());
    }

    #[test]
    fn requests_roundtrip_and_errors() {
        let r = parse_requests("001\n010\n\n", Some(3)).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(format_requests(&r), "001\n010\n");
        let e = parse_requests("001\n01\n", Some(3)).unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        let e = parse_requests("001\n000\n", None).unwrap_err();
        assert_eq!(e.line, 2);
        assert!(parse_requests("", None).is_err());
        assert_eq!(parse_requests("", Some(2)).unwrap().len(), 0);
    }

    #[test]
    fn vectors_allow_zero() {
        let v = parse_vectors("00\n11\n").unwrap();
        assert_eq!(v.len(), 2);
        assert!(v[0].is_zero());
        assert!(parse_vectors("00\n1\n").is_err());
    }
}
