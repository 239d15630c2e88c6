//! Dense GF(2) elimination on bit-packed rows.

use crate::par::Exec;

/// Below this many words per elimination step the row updates run
/// sequentially; a rayon split costs more than the XORs it spreads.
const PARALLEL_MIN_WORDS: usize = 1 << 14;

/// A GF(2) matrix with `ncols` columns, one bit vector per row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    ncols: usize,
    words: usize,
    rows: Vec<Vec<u64>>,
}

impl BitMatrix {
    pub fn new(ncols: usize) -> Self {
        Self { ncols, words: ncols.div_ceil(64), rows: Vec::new() }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn push_zero_row(&mut self) -> usize {
        self.rows.push(vec![0; self.words]);
        self.rows.len() - 1
    }

    pub fn flip(&mut self, row: usize, col: usize) {
        self.rows[row][col / 64] ^= 1 << (col % 64);
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.rows[row][col / 64] >> (col % 64) & 1 == 1
    }

    /// Reduced row echelon form in place; returns the pivot column of each
    /// leading row, in order.
    pub fn rref(&mut self, exec: Exec) -> Vec<usize> {
        self.rows.retain(|r| r.iter().any(|&w| w != 0));
        let exec = if self.rows.len() * self.words < PARALLEL_MIN_WORDS { Exec::Sequential } else { exec };
        let mut pivots = Vec::new();
        let mut top = 0;
        for col in 0..self.ncols {
            if top == self.rows.len() {
                break;
            }
            let (w, bit) = (col / 64, 1u64 << (col % 64));
            let Some(p) = (top..self.rows.len()).find(|&i| self.rows[i][w] & bit != 0) else {
                continue;
            };
            self.rows.swap(top, p);
            let pivot = self.rows[top].clone();
            exec.for_each_mut(&mut self.rows, |i, row| {
                if i != top && row[w] & bit != 0 {
                    for (a, b) in row[w..].iter_mut().zip(&pivot[w..]) {
                        *a ^= b;
                    }
                }
            });
            pivots.push(col);
            top += 1;
        }
        self.rows.truncate(top);
        pivots
    }

    /// A basis of the right kernel, one bit vector per free column.
    pub fn kernel(mut self, exec: Exec) -> Vec<Vec<u64>> {
        let pivots = self.rref(exec);
        let mut is_pivot = vec![false; self.ncols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.ncols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![0u64; self.words];
                v[free / 64] |= 1 << (free % 64);
                for (row, &p) in self.rows.iter().zip(&pivots) {
                    if row[free / 64] >> (free % 64) & 1 == 1 {
                        v[p / 64] |= 1 << (p % 64);
                    }
                }
                v
            })
            .collect()
    }

    /// `self * v` as a bit vector over the rows.
    pub fn apply(&self, v: &[u64]) -> Vec<bool> {
        self.rows
            .iter()
            .map(|r| r.iter().zip(v).fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones()) & 1 == 1)
            .collect()
    }
}
