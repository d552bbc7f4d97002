use std::fmt;

use super::echelon::Echelon;
use super::field::{Elem, FiniteField};
use super::GfError;

/// Dense row-major matrix over a finite field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl fmt::Debug for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{} ", self.rows, self.cols)?;
        f.debug_list().entries(self.row_vecs()).finish()
    }
}

impl FieldMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FieldMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = FieldMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Elem>) -> Result<Self, GfError> {
        if data.len() != rows * cols {
            return Err(GfError::ShapeMismatch { expected: (rows, cols), found: (data.len(), 1) });
        }
        Ok(FieldMatrix { rows, cols, data })
    }

    /// Builds a matrix from rows; `cols` is needed when there are no rows.
    pub fn from_rows(rows: &[Vec<Elem>], cols: usize) -> Result<Self, GfError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(GfError::ShapeMismatch { expected: (rows.len(), cols), found: (rows.len(), r.len()) });
            }
            data.extend_from_slice(r);
        }
        Ok(FieldMatrix { rows: rows.len(), cols, data })
    }

    /// Matrix whose columns are the given vectors of length `len`.
    pub fn from_columns(columns: &[Vec<Elem>], len: usize) -> Self {
        let mut m = FieldMatrix::zeros(len, columns.len());
        for (j, c) in columns.iter().enumerate() {
            for (i, &v) in c.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    /// Checks every entry is a valid element code of `field`.
    pub fn check_in(&self, field: &FiniteField) -> Result<(), GfError> {
        for &v in &self.data {
            field.elem(v as u64)?;
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Elem] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Elem>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<Elem> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Elem>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = FieldMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &Self, f: &FiniteField) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out = FieldMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                let orow = other.row(k);
                let base = i * other.cols;
                for (j, &b) in orow.iter().enumerate() {
                    if b != 0 {
                        out.data[base + j] = f.mul_add(a, b, out.data[base + j]);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Elem], f: &FiniteField) -> Vec<Elem> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(0, |acc, (&a, &b)| f.mul_add(a, b, acc)))
            .collect()
    }

    pub fn add(&self, other: &Self, f: &FiniteField) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix sum shape");
        FieldMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect(),
        }
    }

    pub fn sub(&self, other: &Self, f: &FiniteField) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix difference shape");
        FieldMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f.sub(a, b)).collect(),
        }
    }

    pub fn scale(&self, c: Elem, f: &FiniteField) -> Self {
        FieldMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| f.mul(a, c)).collect() }
    }

    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "hstack shape");
        let mut out = FieldMatrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            out.data[i * out.cols..i * out.cols + self.cols].copy_from_slice(self.row(i));
            out.data[i * out.cols + self.cols..(i + 1) * out.cols].copy_from_slice(other.row(i));
        }
        out
    }

    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "vstack shape");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        FieldMatrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn block_diag(&self, other: &Self) -> Self {
        let mut out = FieldMatrix::zeros(self.rows + other.rows, self.cols + other.cols);
        out.put_block(0, 0, self);
        out.put_block(self.rows, self.cols, other);
        out
    }

    pub fn put_block(&mut self, r0: usize, c0: usize, b: &Self) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self.set(r0 + i, c0 + j, b.get(i, j));
            }
        }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = FieldMatrix::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out.set(a, b, self.get(i, j));
            }
        }
        out
    }

    fn echelon(&self, f: &FiniteField) -> Echelon {
        let mut e = Echelon::new(f, self.cols);
        for i in 0..self.rows {
            e.insert_dense(self.row(i));
        }
        e
    }

    pub fn rank(&self, f: &FiniteField) -> usize {
        if self.rows > self.cols {
            return self.transpose().rank(f);
        }
        self.echelon(f).rank()
    }

    /// Reduced row echelon form with zero rows removed.
    pub fn rref(&self, f: &FiniteField) -> Self {
        FieldMatrix::from_rows(&self.echelon(f).rref_rows(), self.cols).expect("consistent rows")
    }

    /// Columns form a basis of `{x : A x = 0}`.
    pub fn kernel_basis(&self, f: &FiniteField) -> Self {
        FieldMatrix::from_columns(&self.echelon(f).null_space(), self.cols)
    }

    /// Inverse of a square matrix, `None` if singular.
    pub fn inverse(&self, f: &FiniteField) -> Option<Self> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let aug = self.hstack(&FieldMatrix::identity(n));
        let r = aug.rref(f);
        if r.rows() < n || (0..n).any(|i| r.get(i, i) != 1) {
            return None;
        }
        Some(r.submatrix(&(0..n).collect::<Vec<_>>(), &(n..2 * n).collect::<Vec<_>>()))
    }
}
