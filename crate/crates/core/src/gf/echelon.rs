//! Incremental row echelon form.
//!
//! Blow-up matrices are large and very sparse, so pivot rows are kept as
//! sorted `(column, value)` lists and a dense scratch row is used while
//! reducing.

use super::field::{Elem, FiniteField};

pub type SparseRow = Vec<(usize, Elem)>;

#[derive(Clone, Debug)]
pub struct Echelon {
    field: FiniteField,
    ncols: usize,
    /// Pivot rows, each normalised to leading coefficient 1.
    rows: Vec<SparseRow>,
    /// `pivot_row[c]` is the index in `rows` of the row with leading column `c`.
    pivot_row: Vec<Option<usize>>,
    scratch: Vec<Elem>,
}

impl Echelon {
    pub fn new(field: &FiniteField, ncols: usize) -> Self {
        Echelon {
            field: field.clone(),
            ncols,
            rows: Vec::new(),
            pivot_row: vec![None; ncols],
            scratch: vec![0; ncols],
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivot_rows(&self) -> &[SparseRow] {
        &self.rows
    }

    /// Leading columns in increasing order.
    pub fn pivots(&self) -> Vec<usize> {
        (0..self.ncols).filter(|&c| self.pivot_row[c].is_some()).collect()
    }

    fn reduce_scratch(&mut self, start: usize) -> Option<usize> {
        let f = &self.field;
        for c in start..self.ncols {
            let v = self.scratch[c];
            if v == 0 {
                continue;
            }
            match self.pivot_row[c] {
                Some(r) => {
                    let neg = f.neg(v);
                    for &(j, x) in &self.rows[r] {
                        self.scratch[j] = f.mul_add(neg, x, self.scratch[j]);
                    }
                }
                None => return Some(c),
            }
        }
        None
    }

    fn take_scratch(&mut self, lead: usize) -> SparseRow {
        let f = &self.field;
        let inv = f.inv(self.scratch[lead]).expect("nonzero lead");
        let mut row = Vec::new();
        for c in lead..self.ncols {
            let v = self.scratch[c];
            if v != 0 {
                row.push((c, f.mul(v, inv)));
                self.scratch[c] = 0;
            }
        }
        row
    }

    fn load(&mut self, row: &[(usize, Elem)]) -> usize {
        let mut start = self.ncols;
        for &(c, v) in row {
            if v != 0 {
                self.scratch[c] = self.field.add(self.scratch[c], v);
                start = start.min(c);
            }
        }
        start
    }

    /// Adds a sparse row; returns true if it was independent of the rows
    /// already present.
    pub fn insert_sparse(&mut self, row: &[(usize, Elem)]) -> bool {
        let start = self.load(row);
        match self.reduce_scratch(start) {
            Some(lead) => {
                let r = self.take_scratch(lead);
                self.pivot_row[lead] = Some(self.rows.len());
                self.rows.push(r);
                true
            }
            None => false,
        }
    }

    pub fn insert_dense(&mut self, row: &[Elem]) -> bool {
        debug_assert_eq!(row.len(), self.ncols);
        let start = row.iter().position(|&v| v != 0).unwrap_or(self.ncols);
        self.scratch.copy_from_slice(row);
        match self.reduce_scratch(start) {
            Some(lead) => {
                let r = self.take_scratch(lead);
                self.pivot_row[lead] = Some(self.rows.len());
                self.rows.push(r);
                true
            }
            None => false,
        }
    }

    /// True if `row` lies in the span of the inserted rows.
    pub fn contains_dense(&mut self, row: &[Elem]) -> bool {
        let start = row.iter().position(|&v| v != 0).unwrap_or(self.ncols);
        self.scratch.copy_from_slice(row);
        let lead = self.reduce_scratch(start);
        self.scratch.iter_mut().for_each(|v| *v = 0);
        lead.is_none()
    }

    /// Fully reduced basis: each row has a leading 1 and zeros in every
    /// other pivot column. Rows are ordered by leading column.
    pub fn rref_rows(&self) -> Vec<Vec<Elem>> {
        let f = &self.field;
        let pivots = self.pivots();
        let mut dense: Vec<Vec<Elem>> = pivots
            .iter()
            .map(|&c| {
                let mut d = vec![0; self.ncols];
                for &(j, x) in &self.rows[self.pivot_row[c].unwrap()] {
                    d[j] = x;
                }
                d
            })
            .collect();
        for i in (0..dense.len()).rev() {
            let pc = pivots[i];
            let (above, rest) = dense.split_at_mut(i);
            let pr = &rest[0];
            for row in above.iter_mut() {
                let v = row[pc];
                if v != 0 {
                    let neg = f.neg(v);
                    for j in pc..self.ncols {
                        if pr[j] != 0 {
                            row[j] = f.mul_add(neg, pr[j], row[j]);
                        }
                    }
                }
            }
        }
        dense
    }

    /// Basis of the right null space of the inserted rows, one vector per
    /// free column in increasing column order.
    pub fn null_space(&self) -> Vec<Vec<Elem>> {
        let f = &self.field;
        let pivots = self.pivots();
        let rref = self.rref_rows();
        let mut is_pivot = vec![false; self.ncols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        (0..self.ncols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![0; self.ncols];
                v[free] = 1;
                for (i, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(rref[i][free]);
                }
                v
            })
            .collect()
    }
}
