//! LDPC machinery: parity-check matrices, the alist interchange format, a
//! PEG-style code constructor for fixtures, systematic encoding via GF(2)
//! elimination, sum-product decoding, and bit/symbol belief conversion for
//! the turbo loop.

mod alist;
mod decode;
mod encode;
mod mapping;
mod peg;

pub use alist::{parse_alist, serialize_alist, AlistError};
pub use decode::{decode_bp, BpResult, LLR_CLAMP};
pub use encode::{Encoder, LdpcCode};
pub use mapping::{bits_to_symbol_beliefs, symbol_pu_to_bit_llrs, LlrCombine};
pub use peg::peg_construct;

/// Sparse binary parity-check matrix with consistent row and column
/// adjacency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCheckMatrix {
    n: usize,
    m: usize,
    /// Check node -> sorted variable indices.
    rows: Vec<Vec<usize>>,
    /// Variable node -> sorted check indices.
    cols: Vec<Vec<usize>>,
}

impl ParityCheckMatrix {
    /// Build from an edge list. Panics on out-of-range or duplicate edges;
    /// the alist parser reports those as structured errors instead.
    pub fn from_edges(n: usize, m: usize, edges: &[(usize, usize)]) -> Self {
        let mut rows = vec![Vec::new(); m];
        let mut cols = vec![Vec::new(); n];
        for &(r, c) in edges {
            assert!(r < m && c < n, "edge ({r}, {c}) out of range");
            rows[r].push(c);
            cols[c].push(r);
        }
        for row in &mut rows {
            row.sort_unstable();
            assert!(row.windows(2).all(|w| w[0] != w[1]), "duplicate edge");
        }
        for col in &mut cols {
            col.sort_unstable();
        }
        Self { n, m, rows, cols }
    }

    /// Codeword length (number of variable nodes / columns).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of parity checks (rows).
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn row(&self, r: usize) -> &[usize] {
        &self.rows[r]
    }

    pub fn col(&self, c: usize) -> &[usize] {
        &self.cols[c]
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    /// Design rate `(n - m) / n`; the effective rate uses the GF(2) rank
    /// (see [`LdpcCode`]).
    pub fn design_rate(&self) -> f64 {
        (self.n as f64 - self.m as f64) / self.n as f64
    }

    /// Syndrome check: does `H c = 0` over GF(2)?
    pub fn syndrome_ok(&self, codeword: &[u8]) -> bool {
        assert_eq!(codeword.len(), self.n);
        self.rows
            .iter()
            .all(|row| row.iter().fold(0u8, |acc, &c| acc ^ (codeword[c] & 1)) == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjacency_consistency() {
        let h = ParityCheckMatrix::from_edges(6, 3, &[(0, 0), (0, 3), (1, 1), (1, 4), (2, 2), (2, 5), (0, 1)]);
        assert_eq!(h.n(), 6);
        assert_eq!(h.m(), 3);
        assert_eq!(h.row(0), &[0, 1, 3]);
        assert_eq!(h.col(1), &[0, 1]);
        assert_eq!(h.edge_count(), 7);
    }

    #[test]
    fn syndrome() {
        let h = ParityCheckMatrix::from_edges(4, 2, &[(0, 0), (0, 1), (1, 2), (1, 3)]);
        assert!(h.syndrome_ok(&[1, 1, 0, 0]));
        assert!(!h.syndrome_ok(&[1, 0, 0, 0]));
    }
}
