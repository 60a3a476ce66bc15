//! Sparse exact linear systems over the rationals.
//!
//! Elimination is incremental and deterministic: rows are reduced in
//! insertion order, pivoting always on the smallest remaining column.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::algebra::Rational;

pub type SparseRow = BTreeMap<usize, Rational>;

#[derive(Clone, Debug, Default)]
pub struct LinSys {
    ncols: usize,
    rows: Vec<(SparseRow, Rational)>,
}

#[derive(Clone, Debug)]
pub struct LinSolution {
    /// A particular solution; free columns are set to zero.
    pub values: Vec<Rational>,
    pub rank: usize,
    pub kernel_dim: usize,
    /// Indices of rows that reduced to `0 = c` with `c ≠ 0`. They are
    /// skipped, so `values` solves the remaining rows.
    pub inconsistent_rows: Vec<usize>,
}

impl LinSolution {
    pub fn is_consistent(&self) -> bool {
        self.inconsistent_rows.is_empty()
    }
}

impl LinSys {
    pub fn new(ncols: usize) -> Self {
        LinSys {
            ncols,
            rows: Vec::new(),
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    /// Appends `Σ row[j] x_j = rhs`. Zero entries are dropped.
    ///
    /// # Panics
    /// If a column index is out of range.
    pub fn push(&mut self, row: SparseRow, rhs: Rational) {
        let row: SparseRow = row.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        if let Some((&c, _)) = row.iter().next_back() {
            assert!(c < self.ncols, "column {c} out of range ({})", self.ncols);
        }
        self.rows.push((row, rhs));
    }

    pub fn solve(&self) -> LinSolution {
        // pivot column -> (row normalized to leading coefficient 1, rhs)
        let mut pivots: BTreeMap<usize, (SparseRow, Rational)> = BTreeMap::new();
        let mut inconsistent_rows = Vec::new();
        for (idx, (row, rhs)) in self.rows.iter().enumerate() {
            let mut row = row.clone();
            let mut rhs = rhs.clone();
            loop {
                let Some((&lead, lead_val)) = row.iter().next() else {
                    if !rhs.is_zero() {
                        inconsistent_rows.push(idx);
                    }
                    break;
                };
                match pivots.get(&lead) {
                    Some((prow, prhs)) => {
                        let factor = lead_val.clone();
                        for (c, v) in prow {
                            let entry = row.entry(*c).or_insert_with(Rational::zero);
                            *entry -= &factor * v;
                            if entry.is_zero() {
                                row.remove(c);
                            }
                        }
                        rhs -= &factor * prhs;
                    }
                    None => {
                        let inv = lead_val.recip();
                        for v in row.values_mut() {
                            *v *= &inv;
                        }
                        rhs *= &inv;
                        debug_assert!(row[&lead].is_one());
                        pivots.insert(lead, (row, rhs));
                        break;
                    }
                }
            }
        }

        let mut values = vec![Rational::zero(); self.ncols];
        for (col, (row, rhs)) in pivots.iter().rev() {
            let mut v = rhs.clone();
            for (c, a) in row.range(col + 1..) {
                v -= a * &values[*c];
            }
            values[*col] = v;
        }
        let rank = pivots.len();
        LinSolution {
            values,
            rank,
            kernel_dim: self.ncols - rank,
            inconsistent_rows,
        }
    }
}
