//! Column determinants of matrices with operator entries.
//!
//! With noncommuting entries there is no single determinant; the *column
//! determinant* fixes an order in which the columns are multiplied out:
//!
//! ```text
//! cdet_o(M) = sum_sigma sign(sigma) * M[sigma(o1), o1] * M[sigma(o2), o2] * ...
//! ```
//!
//! For commuting entries every column order gives the ordinary determinant;
//! the identity verifiers care precisely about the orders where they differ.

use crate::configs::Permutation;
use crate::polynomial::Grid;
use crate::weyl::WeylElement;

/// The order in which columns are multiplied out, as a sequence of 1-based
/// column indices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ColumnOrder {
    seq: Vec<usize>,
}

impl ColumnOrder {
    /// Left-to-right: `1, 2, ..., n`.
    pub fn natural(n: usize) -> Self {
        ColumnOrder { seq: (1..=n).collect() }
    }

    /// Right-to-left: `n, ..., 2, 1`.
    pub fn reversed(n: usize) -> Self {
        ColumnOrder { seq: (1..=n).rev().collect() }
    }

    /// Any permutation of `1..=n`. Panics if `seq` is not one.
    pub fn from_seq(seq: Vec<usize>) -> Self {
        Permutation::from_one_line(seq.clone()).expect("column order must be a permutation");
        ColumnOrder { seq }
    }

    pub fn n(&self) -> usize {
        self.seq.len()
    }

    pub fn seq(&self) -> &[usize] {
        &self.seq
    }
}

/// A square matrix of operators, all on one grid.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OperatorMatrix {
    n: usize,
    entries: Vec<WeylElement>,
}

impl OperatorMatrix {
    /// Row-major construction. Panics on ragged/non-square input or when the
    /// entries mix grids.
    pub fn from_rows(rows: Vec<Vec<WeylElement>>) -> Self {
        let n = rows.len();
        assert!(n >= 1, "operator matrix needs n >= 1");
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            assert!(row.len() == n, "operator matrix must be square");
            entries.extend(row);
        }
        let mut grid: Option<Grid> = None;
        for e in &entries {
            match (grid, e.grid()) {
                (None, g) => grid = g,
                (Some(a), Some(b)) => {
                    assert!(a == b, "operator matrix entries mix grids");
                }
                _ => {}
            }
        }
        OperatorMatrix { n, entries }
    }

    /// Builds entry `(i, j)` from `f(i, j)` with 1-based indices.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> WeylElement) -> Self {
        Self::from_rows((1..=n).map(|i| (1..=n).map(|j| f(i, j)).collect()).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// 1-based access.
    pub fn entry(&self, i: usize, j: usize) -> &WeylElement {
        assert!((1..=self.n).contains(&i) && (1..=self.n).contains(&j), "index out of range");
        &self.entries[(i - 1) * self.n + (j - 1)]
    }

    /// The column determinant under the given multiplication order.
    pub fn column_det(&self, order: &ColumnOrder) -> WeylElement {
        assert!(order.n() == self.n, "column order size mismatch");
        let mut out = WeylElement::zero();
        for sigma in Permutation::all(self.n) {
            let mut prod = WeylElement::scalar(sigma.sign());
            for &col in order.seq() {
                prod = &prod * self.entry(sigma.apply(col), col);
            }
            out = &out + &prod;
        }
        out
    }
}
