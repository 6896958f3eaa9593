//! Systematic encoding through GF(2) Gaussian elimination.
//!
//! The parity-check matrix is brought to reduced row-echelon form over
//! GF(2). Pivot columns become parity positions, free columns carry the
//! information bits, and each parity bit is the XOR of the information bits
//! appearing in its reduced row. Dependent rows (rank deficiency) are
//! punctured: they are linear combinations of the others, so every original
//! check still holds on the encoded output.

use super::ParityCheckMatrix;

/// Dense GF(2) row as 64-bit limbs.
#[derive(Clone)]
struct BitRow {
    limbs: Vec<u64>,
}

impl BitRow {
    fn zero(n: usize) -> Self {
        Self {
            limbs: vec![0; n.div_ceil(64)],
        }
    }

    fn get(&self, i: usize) -> bool {
        (self.limbs[i / 64] >> (i % 64)) & 1 == 1
    }

    fn set(&mut self, i: usize) {
        self.limbs[i / 64] |= 1 << (i % 64);
    }

    fn xor_assign(&mut self, other: &BitRow) {
        for (a, b) in self.limbs.iter_mut().zip(&other.limbs) {
            *a ^= b;
        }
    }
}

/// Cached systematic encoder for a parity-check matrix.
#[derive(Debug, Clone)]
pub struct Encoder {
    n: usize,
    rank: usize,
    /// Codeword positions holding information bits, in the order the
    /// information word fills them.
    info_positions: Vec<usize>,
    /// Pivot (parity) positions, aligned with `parity_deps`.
    parity_positions: Vec<usize>,
    /// For each parity position, the information positions XORed into it
    /// (indices into the information word).
    parity_deps: Vec<Vec<usize>>,
    /// Number of dependent rows dropped during elimination.
    punctured_rows: usize,
}

impl Encoder {
    fn build(h: &ParityCheckMatrix) -> Self {
        let n = h.n();
        let m = h.m();
        let mut rows: Vec<BitRow> = (0..m)
            .map(|r| {
                let mut br = BitRow::zero(n);
                for &c in h.row(r) {
                    br.set(c);
                }
                br
            })
            .collect();

        // Forward elimination with full back-substitution (RREF).
        let mut pivot_of_row = Vec::new();
        let mut rank = 0usize;
        for col in 0..n {
            let Some(pr) = (rank..m).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(rank, pr);
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivot_of_row.push(col);
            rank += 1;
            if rank == m {
                break;
            }
        }

        let is_pivot = {
            let mut v = vec![false; n];
            for &c in &pivot_of_row {
                v[c] = true;
            }
            v
        };
        let info_positions: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
        let info_index_of = {
            let mut v = vec![usize::MAX; n];
            for (i, &c) in info_positions.iter().enumerate() {
                v[c] = i;
            }
            v
        };

        // Row r of the RREF ties pivot pivot_of_row[r] to the free columns
        // set in that row: p = XOR of those info bits.
        let parity_deps: Vec<Vec<usize>> = (0..rank)
            .map(|r| {
                let mut deps = Vec::new();
                for (i, &c) in info_positions.iter().enumerate() {
                    if rows[r].get(c) {
                        deps.push(i);
                        let _ = info_index_of[c];
                    }
                }
                deps
            })
            .collect();

        Self {
            n,
            rank,
            info_positions,
            parity_positions: pivot_of_row,
            parity_deps,
            punctured_rows: m - rank,
        }
    }

    /// Information bits per codeword.
    pub fn k(&self) -> usize {
        self.n - self.rank
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Dependent rows dropped during elimination (0 for a full-rank matrix).
    pub fn punctured_rows(&self) -> usize {
        self.punctured_rows
    }

    /// Effective code rate `k / n`.
    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n as f64
    }

    /// Codeword positions of the information bits.
    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    /// Systematically encode `info` (length `k`). `H c = 0` by construction.
    pub fn encode(&self, info: &[u8]) -> Vec<u8> {
        assert_eq!(info.len(), self.k(), "information word length mismatch");
        let mut cw = vec![0u8; self.n];
        for (i, &pos) in self.info_positions.iter().enumerate() {
            cw[pos] = info[i] & 1;
        }
        for (r, &pos) in self.parity_positions.iter().enumerate() {
            let mut p = 0u8;
            for &dep in &self.parity_deps[r] {
                p ^= info[dep] & 1;
            }
            cw[pos] = p;
        }
        cw
    }

    /// Recover the information bits from (the hard decisions of) a codeword.
    pub fn extract_info(&self, codeword: &[u8]) -> Vec<u8> {
        assert_eq!(codeword.len(), self.n);
        self.info_positions.iter().map(|&p| codeword[p] & 1).collect()
    }
}

/// A parity-check matrix bundled with its cached encoder.
#[derive(Debug, Clone)]
pub struct LdpcCode {
    h: ParityCheckMatrix,
    encoder: Encoder,
}

impl LdpcCode {
    pub fn new(h: ParityCheckMatrix) -> Self {
        let encoder = Encoder::build(&h);
        Self { h, encoder }
    }

    pub fn h(&self) -> &ParityCheckMatrix {
        &self.h
    }

    pub fn encoder(&self) -> &Encoder {
        &self.encoder
    }

    pub fn n(&self) -> usize {
        self.h.n()
    }

    pub fn k(&self) -> usize {
        self.encoder.k()
    }

    pub fn rate(&self) -> f64 {
        self.encoder.rate()
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_alist;
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn toy() -> ParityCheckMatrix {
        parse_alist("6 3\n2 3\n2 2 2 1 1 1\n3 3 3\n1 3\n1 2\n2 3\n1 0\n2 0\n3 0\n1 2 4\n2 3 5\n1 3 6\n")
            .unwrap()
    }

    #[test]
    fn zero_info_gives_zero_codeword() {
        let code = LdpcCode::new(toy());
        let cw = code.encoder().encode(&vec![0; code.k()]);
        assert!(cw.iter().all(|&b| b == 0));
    }

    #[test]
    fn every_codeword_satisfies_all_checks() {
        let code = LdpcCode::new(toy());
        let k = code.k();
        for w in 0..(1u32 << k) {
            let info: Vec<u8> = (0..k).map(|i| ((w >> i) & 1) as u8).collect();
            let cw = code.encoder().encode(&info);
            assert!(code.h().syndrome_ok(&cw));
            assert_eq!(code.encoder().extract_info(&cw), info);
        }
    }

    #[test]
    fn parity_matches_dense_multiply() {
        // Independent check: recompute H c with a dense row-major matrix.
        let h = toy();
        let code = LdpcCode::new(h.clone());
        let mut dense = vec![vec![0u8; h.n()]; h.m()];
        for r in 0..h.m() {
            for &c in h.row(r) {
                dense[r][c] = 1;
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let info: Vec<u8> = (0..code.k()).map(|_| rng.gen_range(0..2u8)).collect();
            let cw = code.encoder().encode(&info);
            for row in &dense {
                let s: u8 = row.iter().zip(&cw).map(|(a, b)| a & b).fold(0, |x, y| x ^ y);
                assert_eq!(s, 0);
            }
        }
    }

    #[test]
    fn rank_deficient_rows_are_punctured() {
        // Duplicate check row: rank 2, one punctured row, k = n - rank.
        let h = ParityCheckMatrix::from_edges(
            4,
            3,
            &[(0, 0), (0, 1), (1, 2), (1, 3), (2, 0), (2, 1)],
        );
        let code = LdpcCode::new(h.clone());
        assert_eq!(code.encoder().rank(), 2);
        assert_eq!(code.encoder().punctured_rows(), 1);
        assert_eq!(code.k(), 2);
        let cw = code.encoder().encode(&[1, 1]);
        assert!(h.syndrome_ok(&cw));
    }
}
