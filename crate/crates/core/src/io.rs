//! Plain-text file formats.
//!
//! * Matrix: one row per line, whitespace-separated, dot-decimal. Written with
//!   17 significant digits so values round-trip exactly.
//! * Blocks: one block per line, `lambda i1,j1 i2,j2 ...`, 0-based.
//! * Groups: one group per line, space-separated 0-based variable indices.
//!
//! Blank lines and lines starting with `#` are skipped everywhere.

use std::fmt::Write as _;

use ndarray::{Array2, ArrayView1, ArrayView2};

use crate::error::{GmrfError, Result};
use crate::model::Block;

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|e| GmrfError::Parse { line, reason: format!("{tok:?}: {e}") })
}

fn parse_index(tok: &str, line: usize) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|e| GmrfError::Parse { line, reason: format!("{tok:?}: {e}") })
}

/// Parses a rectangular numeric grid.
pub fn parse_matrix(text: &str) -> Result<Array2<f64>> {
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (line, l) in content_lines(text) {
        let before = data.len();
        for tok in l.split_whitespace() {
            data.push(parse_f64(tok, line)?);
        }
        let width = data.len() - before;
        match cols {
            None => cols = Some(width),
            Some(c) if c != width => {
                return Err(GmrfError::Parse {
                    line,
                    reason: format!("expected {c} columns, found {width}"),
                })
            }
            _ => {}
        }
        rows += 1;
    }
    let cols = cols.unwrap_or(0);
    Ok(Array2::from_shape_vec((rows, cols), data).expect("row widths checked"))
}

fn push_value(out: &mut String, v: f64) {
    write!(out, "{v:.16e}").expect("write to String");
}

/// Formats a matrix, one row per line.
pub fn format_matrix(m: ArrayView2<f64>) -> String {
    let mut out = String::new();
    for row in m.rows() {
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            push_value(&mut out, *v);
        }
        out.push('\n');
    }
    out
}

/// Formats a vector as a single row.
pub fn format_vector(v: ArrayView1<f64>) -> String {
    let mut out = String::new();
    for (j, x) in v.iter().enumerate() {
        if j > 0 {
            out.push(' ');
        }
        push_value(&mut out, *x);
    }
    out.push('\n');
    out
}

pub fn parse_blocks(text: &str) -> Result<Vec<Block>> {
    let mut blocks = Vec::new();
    for (line, l) in content_lines(text) {
        let mut toks = l.split_whitespace();
        let radius = parse_f64(toks.next().expect("non-empty line"), line)?;
        let mut pairs = Vec::new();
        for tok in toks {
            let (a, b) = tok.split_once(',').ok_or_else(|| GmrfError::Parse {
                line,
                reason: format!("expected i,j pair, found {tok:?}"),
            })?;
            pairs.push((parse_index(a, line)?, parse_index(b, line)?));
        }
        blocks.push(Block::new(pairs, radius));
    }
    Ok(blocks)
}

pub fn format_blocks(blocks: &[Block]) -> String {
    let mut out = String::new();
    for b in blocks {
        push_value(&mut out, b.radius);
        for (i, j) in &b.pairs {
            write!(out, " {i},{j}").expect("write to String");
        }
        out.push('\n');
    }
    out
}

pub fn parse_groups(text: &str) -> Result<Vec<Vec<usize>>> {
    content_lines(text)
        .map(|(line, l)| l.split_whitespace().map(|t| parse_index(t, line)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    #[test]
    fn parses_grid() {
        let m = parse_matrix("1 0.5\n# comment\n\n0.5   1\n").unwrap();
        assert_eq!(m, array![[1.0, 0.5], [0.5, 1.0]]);
    }

    #[test]
    fn ragged_grid_rejected() {
        let err = parse_matrix("1 2\n3\n").unwrap_err();
        assert!(matches!(err, GmrfError::Parse { line: 2, .. }));
        assert!(matches!(parse_matrix("1 x\n"), Err(GmrfError::Parse { line: 1, .. })));
    }

    #[test]
    fn blocks_and_groups() {
        let b = parse_blocks("0.5 0,1 0,2\n1 1,2\n").unwrap();
        assert_eq!(b, vec![Block::new(vec![(0, 1), (0, 2)], 0.5), Block::new(vec![(1, 2)], 1.0)]);
        assert_eq!(parse_blocks(&format_blocks(&b)).unwrap(), b);
        assert!(parse_blocks("0.5 0-1\n").is_err());
        assert_eq!(parse_groups("0 1\n2\n").unwrap(), vec![vec![0, 1], vec![2]]);
    }

    proptest! {
        #[test]
        fn matrix_round_trip_is_bit_exact(
            raw in proptest::collection::vec(proptest::num::f64::NORMAL | proptest::num::f64::ZERO, 6),
        ) {
            let m = Array2::from_shape_vec((2, 3), raw).unwrap();
            let back = parse_matrix(&format_matrix(m.view())).unwrap();
            for (a, b) in m.iter().zip(back.iter()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
