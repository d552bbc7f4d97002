use super::echelon::SparseRow;
use super::field::{Elem, FiniteField};
use super::matrix::FieldMatrix;

/// Row-compressed matrix, used for module actions and blow-ups where almost
/// every entry is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseRow>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, data: vec![Vec::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix { rows: n, cols: n, data: (0..n).map(|i| vec![(i, 1)]).collect() }
    }

    pub fn from_dense(m: &FieldMatrix) -> Self {
        let data = (0..m.rows())
            .map(|i| m.row(i).iter().enumerate().filter(|(_, &v)| v != 0).map(|(j, &v)| (j, v)).collect())
            .collect();
        SparseMatrix { rows: m.rows(), cols: m.cols(), data }
    }

    /// Rows must have sorted, distinct columns.
    pub fn from_rows(rows: Vec<SparseRow>, cols: usize) -> Self {
        SparseMatrix { rows: rows.len(), cols, data: rows }
    }

    pub fn to_dense(&self) -> FieldMatrix {
        let mut m = FieldMatrix::zeros(self.rows, self.cols);
        for (i, r) in self.data.iter().enumerate() {
            for &(j, v) in r {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[(usize, Elem)] {
        &self.data[i]
    }

    pub fn row_data(&self) -> &[SparseRow] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_empty())
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.len()).sum()
    }

    pub fn mul(&self, other: &Self, f: &FiniteField) -> Self {
        assert_eq!(self.cols, other.rows, "sparse product shape");
        let mut acc = vec![0 as Elem; other.cols];
        let mut touched: Vec<usize> = Vec::new();
        let data = self
            .data
            .iter()
            .map(|r| {
                for &(k, a) in r {
                    for &(j, b) in &other.data[k] {
                        if acc[j] == 0 {
                            touched.push(j);
                        }
                        acc[j] = f.mul_add(a, b, acc[j]);
                    }
                }
                touched.sort_unstable();
                touched.dedup();
                let row: SparseRow = touched.iter().filter(|&&j| acc[j] != 0).map(|&j| (j, acc[j])).collect();
                for &j in &touched {
                    acc[j] = 0;
                }
                touched.clear();
                row
            })
            .collect();
        SparseMatrix { rows: self.rows, cols: other.cols, data }
    }

    pub fn mul_vec(&self, v: &[Elem], f: &FiniteField) -> Vec<Elem> {
        self.data.iter().map(|r| r.iter().fold(0, |acc, &(j, a)| f.mul_add(a, v[j], acc))).collect()
    }
}
