//! Plain-text generator matrices.
//!
//! ```text
//! # comment lines and blank lines are ignored
//! q n k
//! <row 1: k entries>
//! ...
//! <row n>
//! ```
//!
//! Entries are integer encodings of GF(q) elements. A row may be written as
//! k whitespace-separated integers or, when q <= 10, as one run of k digits.

use std::path::Path;

use super::LinearCode;
use crate::error::{bail, Error, Result};
use crate::gf::FieldCtx;

fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let l = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let (mut rest, mut m) = (q, 0);
    while rest % l == 0 {
        rest /= l;
        m += 1;
    }
    (rest == 1).then_some((l, m))
}

pub fn parse_generator(text: &str, name: &str) -> Result<LinearCode> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .enumerate()
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse("empty generator file".into()))?;
    let nums: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad header token {t:?}"))))
        .collect::<Result<_>>()?;
    let [q, n, k] = nums[..] else {
        bail!(Parse, "header must be \"q n k\", got {header:?}");
    };
    let Some((l, m)) = u32::try_from(q).ok().and_then(prime_power) else {
        bail!(Parse, "q = {q} is not a prime power");
    };
    let ctx = FieldCtx::new(l, m)?;
    let mut rows = Vec::with_capacity(n);
    for (lineno, line) in lines {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let row: Vec<u32> = if tokens.len() == 1 && k > 1 && q <= 10 {
            tokens[0]
                .chars()
                .map(|c| {
                    c.to_digit(10)
                        .ok_or_else(|| Error::Parse(format!("line {}: bad digit {c:?}", lineno + 1)))
                })
                .collect::<Result<_>>()?
        } else {
            tokens
                .iter()
                .map(|t| {
                    t.parse()
                        .map_err(|_| Error::Parse(format!("line {}: bad entry {t:?}", lineno + 1)))
                })
                .collect::<Result<_>>()?
        };
        if row.len() != k {
            bail!(Parse, "line {}: expected {k} entries, got {}", lineno + 1, row.len());
        }
        if let Some(e) = row.iter().find(|&&e| e as usize >= q) {
            bail!(Parse, "line {}: entry {e} is not an element of GF({q})", lineno + 1);
        }
        rows.push(row);
    }
    if rows.len() != n {
        bail!(Parse, "expected {n} rows, found {}", rows.len());
    }
    LinearCode::from_rows(&ctx, &rows, name)
}

pub fn read_generator_file(path: &Path) -> Result<LinearCode> {
    let text = std::fs::read_to_string(path)?;
    parse_generator(&text, &format!("file({})", path.display()))
}

pub fn write_generator(code: &LinearCode) -> String {
    let q = code.field_size();
    let mut out = format!("{} {} {}\n", q, code.len(), code.dimension());
    for row in code.rows() {
        let cells: Vec<String> = row.iter().map(u32::to_string).collect();
        out.push_str(&cells.join(if q <= 10 { "" } else { " " }));
        out.push('\n');
    }
    out
}
