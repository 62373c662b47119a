//! Plain-text matrix files.
//!
//! ```text
//! # optional comment lines
//! 2 2
//! 1 0
//! 0 1
//! ```
//!
//! The first non-comment line holds `rows cols`, followed by `rows` lines of
//! `cols` whitespace-separated reals. Lines starting with `#` and blank lines
//! are skipped anywhere. Numbers are written with 17 significant digits,
//! which round-trips every finite double.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// `%.17g`-style formatting: 17 significant digits, trailing zeros removed,
/// scientific notation outside `1e-4 <= |x| < 1e17`.
pub fn format_g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_zeros(mantissa), exp.abs())
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Tokens of a line with their 1-based character columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (ci, (bi, ch)) in line.char_indices().enumerate() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some((ci, bi)),
            (true, Some((c0, b0))) => {
                out.push((c0 + 1, &line[b0..bi]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some((c0, b0)) = start {
        out.push((c0 + 1, &line[b0..]));
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<DMatrix<f64>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| {
            let t = l.trim_start();
            !t.is_empty() && !t.starts_with('#')
        });

    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_error(1, 1, "missing 'rows cols' header"))?;
    let htoks = tokens(header);
    if htoks.len() != 2 {
        let col = htoks.get(2).map_or(header.chars().count() + 1, |t| t.0);
        return Err(parse_error(
            hline,
            col,
            format!("header needs 2 integers, found {}", htoks.len()),
        ));
    }
    let dim = |(col, tok): (usize, &str)| -> Result<usize> {
        tok.parse::<usize>()
            .map_err(|_| parse_error(hline, col, format!("'{tok}' is not a nonnegative integer")))
    };
    let rows = dim(htoks[0])?;
    let cols = dim(htoks[1])?;

    let mut data = DMatrix::zeros(rows, cols);
    let mut r = 0;
    let mut last_line = hline;
    for (lno, line) in lines {
        last_line = lno;
        let toks = tokens(line);
        if r == rows {
            return Err(parse_error(
                lno,
                toks[0].0,
                format!("unexpected data after {rows} rows"),
            ));
        }
        if toks.len() != cols {
            let col = toks.get(cols).map_or(line.chars().count() + 1, |t| t.0);
            return Err(parse_error(
                lno,
                col,
                format!("expected {cols} values, found {}", toks.len()),
            ));
        }
        for (c, (col, tok)) in toks.into_iter().enumerate() {
            let v: f64 = tok
                .parse()
                .map_err(|_| parse_error(lno, col, format!("'{tok}' is not a number")))?;
            if !v.is_finite() {
                return Err(parse_error(lno, col, format!("non-finite value '{tok}'")));
            }
            data[(r, c)] = v;
        }
        r += 1;
    }
    if r != rows {
        return Err(parse_error(
            last_line + 1,
            1,
            format!("expected {rows} rows, found {r}"),
        ));
    }
    Ok(data)
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<DMatrix<f64>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| with_path(e, path))?;
    parse_matrix(&text)
}

fn with_path(e: std::io::Error, path: &Path) -> crate::Error {
    crate::Error::Io(std::io::Error::new(
        e.kind(),
        format!("{}: {e}", path.display()),
    ))
}

pub fn format_matrix(m: &DMatrix<f64>) -> String {
    let mut out = format!("{} {}\n", m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        let row: Vec<String> = m.row(i).iter().map(|&x| format_g17(x)).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_matrix(path: impl AsRef<Path>, m: &DMatrix<f64>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_matrix(m)).map_err(|e| with_path(e, path))
}
