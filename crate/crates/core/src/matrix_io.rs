//! Plain-text complex matrices: one row per line, entries separated by
//! whitespace or commas, each written like `0.5`, `-1e-3+2i` or `0.7j`.
//! Blank lines and text after `#` are ignored.

use num_complex::Complex64;
use std::fmt::Write;

use crate::coherence::CMatrix;
use crate::error::{Error, Result};

pub fn parse_matrix(text: &str) -> Result<CMatrix> {
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<Complex64>().map_err(|e| Error::Parse {
                    line: n + 1,
                    msg: format!("`{s}`: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse {
                    line: n + 1,
                    msg: format!("expected {} entries, found {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 0,
            msg: "no rows".into(),
        });
    }
    let (r, c) = (rows.len(), rows[0].len());
    Ok(CMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

fn entry(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

/// Inverse of [`parse_matrix`]; values round-trip exactly.
pub fn write_matrix(m: &CMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| entry(m[(i, j)])).collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
    out
}
