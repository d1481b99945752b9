//! Plain-text generator matrices.
//!
//! The first line holds `d n`; it is followed by `d` lines of `n`
//! whitespace-separated integers. Columns are the generators. Blank lines
//! are ignored, anything else out of place is an error.

use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exactla::IntMat;

struct Token<'a> {
    line: usize,
    column: usize,
    text: &'a str,
}

fn tokens(line_no: usize, line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (pos, ch) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(pos),
            (true, Some(s)) => {
                out.push(Token {
                    line: line_no,
                    column: line[..s].chars().count() + 1,
                    text: &line[s..pos],
                });
                start = None;
            }
            _ => {}
        }
    }
    out
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn parse_size(tok: &Token<'_>, what: &str) -> Result<usize> {
    match tok.text.parse::<usize>() {
        Ok(0) => Err(parse_error(tok.line, tok.column, format!("{what} must be positive"))),
        Ok(v) => Ok(v),
        Err(_) => Err(parse_error(
            tok.line,
            tok.column,
            format!("expected {what}, found {:?}", tok.text),
        )),
    }
}

/// Parses matrix text.
pub fn parse_matrix_str(text: &str) -> Result<IntMat> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());

    let Some((hline, header)) = lines.next() else {
        return Err(parse_error(1, 1, "missing header \"d n\""));
    };
    let htoks = tokens(hline, header);
    if htoks.len() != 2 {
        let column = htoks.get(2).map_or(header.len() + 1, |t| t.column);
        return Err(parse_error(hline, column, "header must be exactly \"d n\""));
    }
    let d = parse_size(&htoks[0], "row count d")?;
    let n = parse_size(&htoks[1], "column count n")?;

    let mut m = IntMat::zeros(d, n);
    let mut last_line = hline;
    for i in 0..d {
        let Some((lno, line)) = lines.next() else {
            return Err(parse_error(
                last_line + 1,
                1,
                format!("expected {d} matrix rows, found {i}"),
            ));
        };
        last_line = lno;
        let toks = tokens(lno, line);
        if toks.len() != n {
            let column = toks.get(n).map_or(line.len() + 1, |t| t.column);
            return Err(parse_error(
                lno,
                column,
                format!("expected {n} entries, found {}", toks.len()),
            ));
        }
        for (j, tok) in toks.iter().enumerate() {
            m[(i, j)] = tok.text.parse::<BigInt>().map_err(|_| {
                parse_error(tok.line, tok.column, format!("not an integer: {:?}", tok.text))
            })?;
        }
    }
    if let Some((lno, line)) = lines.next() {
        let column = tokens(lno, line).first().map_or(1, |t| t.column);
        return Err(parse_error(lno, column, "trailing content after the matrix"));
    }
    Ok(m)
}

/// Reads and parses a matrix file.
pub fn parse_matrix(path: impl AsRef<Path>) -> Result<IntMat> {
    parse_matrix_str(&std::fs::read_to_string(path)?)
}

/// Renders a matrix in the file format.
pub fn format_matrix(m: &IntMat) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if j > 0 {
                out.push(' ');
            }
            write!(out, "{}", m[(i, j)]).expect("writing to a String");
        }
        out.push('\n');
    }
    out
}

pub fn write_matrix(path: impl AsRef<Path>, m: &IntMat) -> Result<()> {
    std::fs::write(path, format_matrix(m))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err_pos(text: &str) -> (usize, usize) {
        match parse_matrix_str(text) {
            Err(Error::Parse { line, column, .. }) => (line, column),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn parses_small_matrix() {
        let m = parse_matrix_str("2 4\n1 1 1 1\n0 2 3 4\n").unwrap();
        assert_eq!(m, IntMat::from_rows_i64(&[&[1, 1, 1, 1], &[0, 2, 3, 4]]));
        assert_eq!(parse_matrix_str(&format_matrix(&m)).unwrap(), m);
    }

    #[test]
    fn blank_lines_and_negatives() {
        let m = parse_matrix_str("\n1 2\n\n  -3   7 \n\n").unwrap();
        assert_eq!(m, IntMat::from_rows_i64(&[&[-3, 7]]));
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(err_pos("2 4 1\n"), (1, 5));
        assert_eq!(err_pos("2 4\n1 1 1 1\n0 2 3\n"), (3, 6));
        assert_eq!(err_pos("2 4\n1 1 1 1\n0 2 3 4 5\n"), (3, 9));
        assert_eq!(err_pos("2 4\n1 1 x 1\n0 2 3 4\n"), (2, 5));
        assert_eq!(err_pos("2 4\n1 1 1 1\n"), (3, 1));
        assert_eq!(err_pos("1 1\n5\n6\n"), (3, 1));
        assert_eq!(err_pos("0 1\n"), (1, 1));
        assert_eq!(err_pos(""), (1, 1));
    }
}
