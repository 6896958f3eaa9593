//! The alist sparse-matrix text format.
//!
//! Grammar (tokens separated by ASCII whitespace, one logical record per
//! line):
//!
//! ```text
//! line 1:        n m              # columns (variable nodes), rows (checks)
//! line 2:        dc_max dr_max    # maximum column / row degree
//! line 3:        n column degrees
//! line 4:        m row degrees
//! lines 5..5+n:  per column: 1-based row indices of its ones, the first
//!                `degree` entries nonzero, optionally padded with 0 to dc_max
//! then m lines:  per row: 1-based column indices, same padding rule
//! ```
//!
//! The serializer always pads to the maximum degree with single spaces and a
//! trailing newline per line, which makes serialize(parse(.)) idempotent.

use thiserror::Error;

use super::ParityCheckMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlistError {
    #[error("line {line}: expected {what}, found end of input")]
    Truncated { line: usize, what: &'static str },
    #[error("line {line}: bad integer {token:?}")]
    BadInteger { line: usize, token: String },
    #[error("line {line}: index {value} out of range 1..={max}")]
    IndexOutOfRange { line: usize, value: usize, max: usize },
    #[error("line {line}: zero entry inside the first {degree} indices")]
    ZeroInsideDegree { line: usize, degree: usize },
    #[error("line {line}: degree {got} exceeds declared maximum {max}")]
    DegreeTooLarge { line: usize, got: usize, max: usize },
    #[error("line {line}: duplicate index {value}")]
    DuplicateIndex { line: usize, value: usize },
    #[error("row and column adjacency disagree on edge (row {row}, col {col})")]
    InconsistentAdjacency { row: usize, col: usize },
    #[error("dimensions must be positive, got n={n} m={m}")]
    BadDimensions { n: usize, m: usize },
}

struct Tokens<'a> {
    lines: Vec<(usize, std::str::SplitAsciiWhitespace<'a>)>,
    cur: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            lines: text
                .lines()
                .enumerate()
                .filter(|(_, l)| !l.trim().is_empty())
                .map(|(i, l)| (i + 1, l.split_ascii_whitespace()))
                .collect(),
            cur: 0,
        }
    }

    /// All integers from the next non-empty line, with its 1-based number.
    fn next_line(&mut self, what: &'static str) -> Result<(usize, Vec<usize>), AlistError> {
        let last_line = self.lines.last().map_or(0, |(i, _)| *i);
        let (line_no, toks) = self
            .lines
            .get_mut(self.cur)
            .ok_or(AlistError::Truncated { line: last_line + 1, what })?;
        let line_no = *line_no;
        self.cur += 1;
        let mut vals = Vec::new();
        for t in toks {
            let v = t.parse::<usize>().map_err(|_| AlistError::BadInteger {
                line: line_no,
                token: t.to_string(),
            })?;
            vals.push(v);
        }
        Ok((line_no, vals))
    }
}

fn fixed_pair(vals: &(usize, Vec<usize>), what: &'static str) -> Result<(usize, usize), AlistError> {
    if vals.1.len() < 2 {
        return Err(AlistError::Truncated { line: vals.0, what });
    }
    Ok((vals.1[0], vals.1[1]))
}

/// Parse alist text into a validated parity-check matrix.
pub fn parse_alist(text: &str) -> Result<ParityCheckMatrix, AlistError> {
    let mut toks = Tokens::new(text);

    let header = toks.next_line("n m header")?;
    let (n, m) = fixed_pair(&header, "n m header")?;
    if n == 0 || m == 0 {
        return Err(AlistError::BadDimensions { n, m });
    }
    let maxima = toks.next_line("maximum degrees")?;
    let (dc_max, dr_max) = fixed_pair(&maxima, "maximum degrees")?;

    let (dl_line, col_degrees) = toks.next_line("column degrees")?;
    if col_degrees.len() != n {
        return Err(AlistError::Truncated { line: dl_line, what: "n column degrees" });
    }
    let (rl_line, row_degrees) = toks.next_line("row degrees")?;
    if row_degrees.len() != m {
        return Err(AlistError::Truncated { line: rl_line, what: "m row degrees" });
    }
    for (line, degs, max) in [
        (dl_line, &col_degrees, dc_max),
        (rl_line, &row_degrees, dr_max),
    ] {
        for &d in degs {
            if d > max {
                return Err(AlistError::DegreeTooLarge { line, got: d, max });
            }
        }
    }

    // Column adjacency: the authoritative edge list.
    let mut edges = Vec::new();
    for (c, &deg) in col_degrees.iter().enumerate() {
        let (line, vals) = toks.next_line("column adjacency")?;
        if vals.len() < deg {
            return Err(AlistError::Truncated { line, what: "column adjacency entries" });
        }
        let mut seen = Vec::with_capacity(deg);
        for (pos, &v) in vals.iter().enumerate() {
            if pos < deg {
                if v == 0 {
                    return Err(AlistError::ZeroInsideDegree { line, degree: deg });
                }
                if v > m {
                    return Err(AlistError::IndexOutOfRange { line, value: v, max: m });
                }
                if seen.contains(&v) {
                    return Err(AlistError::DuplicateIndex { line, value: v });
                }
                seen.push(v);
                edges.push((v - 1, c));
            } else if v != 0 {
                // Trailing entries are padding and must be zero.
                return Err(AlistError::IndexOutOfRange { line, value: v, max: 0 });
            }
        }
    }

    // Row adjacency: parsed and cross-checked against the column view.
    let mut row_edges = Vec::new();
    for (r, &deg) in row_degrees.iter().enumerate() {
        let (line, vals) = toks.next_line("row adjacency")?;
        if vals.len() < deg {
            return Err(AlistError::Truncated { line, what: "row adjacency entries" });
        }
        let mut seen = Vec::with_capacity(deg);
        for (pos, &v) in vals.iter().enumerate() {
            if pos < deg {
                if v == 0 {
                    return Err(AlistError::ZeroInsideDegree { line, degree: deg });
                }
                if v > n {
                    return Err(AlistError::IndexOutOfRange { line, value: v, max: n });
                }
                if seen.contains(&v) {
                    return Err(AlistError::DuplicateIndex { line, value: v });
                }
                seen.push(v);
                row_edges.push((r, v - 1));
            } else if v != 0 {
                return Err(AlistError::IndexOutOfRange { line, value: v, max: 0 });
            }
        }
    }

    let mut a = edges.clone();
    let mut b = row_edges;
    a.sort_unstable();
    b.sort_unstable();
    if a != b {
        // First disagreement, for the error message.
        let (row, col) = a
            .iter()
            .zip(&b)
            .find(|(x, y)| x != y)
            .map(|(&(r, c), _)| (r, c))
            .unwrap_or_else(|| {
                let e = if a.len() > b.len() { a.last() } else { b.last() };
                *e.unwrap()
            });
        return Err(AlistError::InconsistentAdjacency { row, col });
    }

    Ok(ParityCheckMatrix::from_edges(n, m, &edges))
}

/// Canonical alist serialization: sorted adjacency, zero-padded to the
/// maximum degree, single spaces, trailing newline.
pub fn serialize_alist(h: &ParityCheckMatrix) -> String {
    let n = h.n();
    let m = h.m();
    let dc_max = (0..n).map(|c| h.col(c).len()).max().unwrap_or(0);
    let dr_max = (0..m).map(|r| h.row(r).len()).max().unwrap_or(0);
    let mut out = String::new();
    out.push_str(&format!("{n} {m}\n{dc_max} {dr_max}\n"));
    let col_degs: Vec<String> = (0..n).map(|c| h.col(c).len().to_string()).collect();
    out.push_str(&col_degs.join(" "));
    out.push('\n');
    let row_degs: Vec<String> = (0..m).map(|r| h.row(r).len().to_string()).collect();
    out.push_str(&row_degs.join(" "));
    out.push('\n');
    for c in 0..n {
        let mut entries: Vec<String> = h.col(c).iter().map(|&r| (r + 1).to_string()).collect();
        entries.resize(dc_max, "0".to_string());
        out.push_str(&entries.join(" "));
        out.push('\n');
    }
    for r in 0..m {
        let mut entries: Vec<String> = h.row(r).iter().map(|&c| (c + 1).to_string()).collect();
        entries.resize(dr_max, "0".to_string());
        out.push_str(&entries.join(" "));
        out.push('\n');
    }
    out
}
