use std::collections::BTreeMap;

use rand::Rng;

use super::{AlgebraError, StringAlgebra};
use crate::gf::{Elem, FiniteField};

/// Element of `R` in the path basis; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct AlgebraElement {
    coeffs: BTreeMap<usize, Elem>,
}

impl AlgebraElement {
    pub fn zero() -> Self {
        AlgebraElement::default()
    }

    pub fn basis(i: usize) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(i, 1);
        AlgebraElement { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `(basis index, coefficient)` pairs in basis order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, Elem)> + '_ {
        self.coeffs.iter().map(|(&i, &c)| (i, c))
    }

    pub fn coeff(&self, i: usize) -> Elem {
        self.coeffs.get(&i).copied().unwrap_or(0)
    }

    pub fn add_term(&mut self, i: usize, c: Elem, f: &FiniteField) {
        let v = f.add(self.coeff(i), c);
        if v == 0 {
            self.coeffs.remove(&i);
        } else {
            self.coeffs.insert(i, v);
        }
    }

    pub fn add(&self, other: &Self, f: &FiniteField) -> Self {
        let mut out = self.clone();
        for (i, c) in other.terms() {
            out.add_term(i, c, f);
        }
        out
    }

    pub fn scale(&self, c: Elem, f: &FiniteField) -> Self {
        if c == 0 {
            return AlgebraElement::zero();
        }
        AlgebraElement { coeffs: self.coeffs.iter().map(|(&i, &v)| (i, f.mul(v, c))).collect() }
    }

    pub fn neg(&self, f: &FiniteField) -> Self {
        self.scale(f.neg(1), f)
    }

    pub fn mul(&self, other: &Self, r: &StringAlgebra) -> Self {
        let f = r.field();
        let mut out = AlgebraElement::zero();
        for (i, a) in self.terms() {
            for (j, b) in other.terms() {
                if let Some(k) = r.basis_product(i, j) {
                    out.add_term(k, f.mul(a, b), f);
                }
            }
        }
        out
    }

    /// Rendering used by the R-matrix grammar, e.g. `e_v + 2*x y`.
    pub fn render(&self, r: &StringAlgebra) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms()
            .map(|(i, c)| {
                let p = r.path_basis()[i].render(r.quiver());
                if c == 1 {
                    p
                } else {
                    format!("{c}*{p}")
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Uniformly random element (each basis coefficient uniform in `K`).
    pub fn random<G: Rng + ?Sized>(r: &StringAlgebra, rng: &mut G) -> Self {
        let f = r.field();
        let mut out = AlgebraElement::zero();
        for i in 0..r.dim() {
            out.add_term(i, rng.gen_range(0..f.order()), f);
        }
        out
    }
}

/// A `rows × cols` matrix with entries in `R`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<AlgebraElement>,
}

impl RMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RMatrix { rows, cols, entries: vec![AlgebraElement::zero(); rows * cols] }
    }

    pub fn identity(n: usize, r: &StringAlgebra) -> Self {
        let mut m = RMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, r.unit());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<AlgebraElement>>) -> Result<Self, AlgebraError> {
        let cols = rows.first().map(|r| r.len()).unwrap_or(0);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(AlgebraError::ShapeMismatch("ragged rows".into()));
        }
        let n = rows.len();
        Ok(RMatrix { rows: n, cols, entries: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &AlgebraElement {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, e: AlgebraElement) {
        self.entries[i * self.cols + j] = e;
    }

    pub fn mul(&self, other: &Self, r: &StringAlgebra) -> Result<Self, AlgebraError> {
        if self.cols != other.rows {
            return Err(AlgebraError::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = r.field();
        let mut out = RMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = AlgebraElement::zero();
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).mul(other.get(k, j), r), f);
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// Block matrix `[[a, 0], [c, b]]`.
    pub fn lower_block(a: &Self, c: &Self, b: &Self) -> Result<Self, AlgebraError> {
        if c.rows != b.rows || c.cols != a.cols {
            return Err(AlgebraError::ShapeMismatch("lower block".into()));
        }
        let mut out = RMatrix::zeros(a.rows + b.rows, a.cols + b.cols);
        for i in 0..a.rows {
            for j in 0..a.cols {
                out.set(i, j, a.get(i, j).clone());
            }
        }
        for i in 0..b.rows {
            for j in 0..a.cols {
                out.set(a.rows + i, j, c.get(i, j).clone());
            }
            for j in 0..b.cols {
                out.set(a.rows + i, a.cols + j, b.get(i, j).clone());
            }
        }
        Ok(out)
    }

    /// Block diagonal matrix `[[a, 0], [0, b]]`.
    pub fn block_diag(a: &Self, b: &Self) -> Self {
        let c = RMatrix::zeros(b.rows, a.cols);
        RMatrix::lower_block(a, &c, b).expect("shapes agree")
    }

    pub fn random<G: Rng + ?Sized>(rows: usize, cols: usize, r: &StringAlgebra, rng: &mut G) -> Self {
        let mut m = RMatrix::zeros(rows, cols);
        for e in m.entries.iter_mut() {
            *e = AlgebraElement::random(r, rng);
        }
        m
    }
}
