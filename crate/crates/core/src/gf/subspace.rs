use super::echelon::Echelon;
use super::field::{Elem, FiniteField};
use super::matrix::FieldMatrix;
use super::GfError;

/// A subspace of `K^n`, stored as its reduced row echelon basis so that
/// equality is entrywise comparison.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<Elem>>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        let basis = (0..ambient)
            .map(|i| {
                let mut v = vec![0; ambient];
                v[i] = 1;
                v
            })
            .collect();
        Subspace { ambient, basis }
    }

    pub fn span<'a>(ambient: usize, vectors: impl IntoIterator<Item = &'a [Elem]>, f: &FiniteField) -> Self {
        let mut e = Echelon::new(f, ambient);
        for v in vectors {
            e.insert_dense(v);
        }
        Subspace { ambient, basis: e.rref_rows() }
    }

    /// Span of the columns of `m`.
    pub fn column_span(m: &FieldMatrix, f: &FiniteField) -> Self {
        let cols = m.columns();
        Subspace::span(m.rows(), cols.iter().map(|c| c.as_slice()), f)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Elem>] {
        &self.basis
    }

    /// Basis vectors as matrix columns.
    pub fn to_columns(&self) -> FieldMatrix {
        FieldMatrix::from_columns(&self.basis, self.ambient)
    }

    pub fn contains(&self, v: &[Elem], f: &FiniteField) -> bool {
        let mut e = Echelon::new(f, self.ambient);
        for b in &self.basis {
            e.insert_dense(b);
        }
        e.contains_dense(v)
    }

    pub fn is_subspace_of(&self, other: &Self, f: &FiniteField) -> bool {
        let mut e = Echelon::new(f, other.ambient);
        for b in &other.basis {
            e.insert_dense(b);
        }
        self.basis.iter().all(|v| e.contains_dense(v))
    }

    pub fn sum(&self, other: &Self, f: &FiniteField) -> Result<Self, GfError> {
        if self.ambient != other.ambient {
            return Err(GfError::AmbientMismatch(self.ambient, other.ambient));
        }
        Ok(Subspace::span(
            self.ambient,
            self.basis.iter().chain(&other.basis).map(|v| v.as_slice()),
            f,
        ))
    }

    /// `U ∩ V` from the kernel of `[U | -V]`: a kernel vector `(a, b)` gives
    /// the common vector `Σ a_i u_i`.
    pub fn intersect(&self, other: &Self, f: &FiniteField) -> Result<Self, GfError> {
        if self.ambient != other.ambient {
            return Err(GfError::AmbientMismatch(self.ambient, other.ambient));
        }
        let du = self.dim();
        let u = self.to_columns();
        let v = other.to_columns().scale(f.neg(1), f);
        let ker = u.hstack(&v).kernel_basis(f);
        let common: Vec<Vec<Elem>> = ker
            .columns()
            .iter()
            .map(|k| {
                let mut w = vec![0; self.ambient];
                for (i, &a) in k[..du].iter().enumerate() {
                    if a != 0 {
                        for (x, &b) in w.iter_mut().zip(&self.basis[i]) {
                            *x = f.mul_add(a, b, *x);
                        }
                    }
                }
                w
            })
            .collect();
        Ok(Subspace::span(self.ambient, common.iter().map(|v| v.as_slice()), f))
    }

    /// Image of the subspace under a linear map given as a matrix acting on
    /// column vectors.
    pub fn image(&self, m: &FieldMatrix, f: &FiniteField) -> Self {
        let imgs: Vec<Vec<Elem>> = self.basis.iter().map(|b| m.mul_vec(b, f)).collect();
        Subspace::span(m.rows(), imgs.iter().map(|v| v.as_slice()), f)
    }
}

fn check_same_ambient(u: &FieldMatrix, v: &FieldMatrix) -> Result<(), GfError> {
    if u.rows() != v.rows() {
        return Err(GfError::AmbientMismatch(u.rows(), v.rows()));
    }
    Ok(())
}

/// Canonical basis (as columns) of the sum of two column spans.
pub fn subspace_sum(u: &FieldMatrix, v: &FieldMatrix, f: &FiniteField) -> Result<FieldMatrix, GfError> {
    check_same_ambient(u, v)?;
    Ok(Subspace::column_span(u, f).sum(&Subspace::column_span(v, f), f)?.to_columns())
}

/// Canonical basis (as columns) of the intersection of two column spans.
pub fn subspace_intersect(u: &FieldMatrix, v: &FieldMatrix, f: &FiniteField) -> Result<FieldMatrix, GfError> {
    check_same_ambient(u, v)?;
    Ok(Subspace::column_span(u, f).intersect(&Subspace::column_span(v, f), f)?.to_columns())
}
