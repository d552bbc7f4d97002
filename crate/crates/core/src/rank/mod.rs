//! Normalised Sylvester rank functions `rk_M(A) = rank(A ⊗ M) / dim M`.

mod audit;
mod suite;

pub use audit::{
    sylvester_audit, trim_bound_check, weight_identity_check, AuditReport, TrimReport, WeightReport,
};
pub use suite::{random_entry, TestSuite, DEFAULT_MAX_TESTS};

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{rmatrix_emit, RMatrix, StringAlgebra};
use crate::gf::{Echelon, FieldMatrix, SparseMatrix, SparseRow};
use crate::module::{ModuleError, RModule};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RankError {
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error("matrix refers to paths outside the module's algebra")]
    AlgebraMismatch,
    #[error("profiles were computed on different suites")]
    SuiteMismatch,
    #[error("subspace is not a submodule")]
    NotSubmodule,
    #[error("rank of the zero module is undefined")]
    ZeroModule,
}

/// Rank oracle for one module.
///
/// The module is split along the connected components of the nonzero
/// pattern of its action matrices (each spans a submodule, and the blow-up
/// rank is additive over them); identical components are evaluated once.
#[derive(Debug, Clone)]
pub struct Ranker {
    dim: usize,
    algebra_dim: usize,
    field: crate::gf::FiniteField,
    /// `(basis-path actions, dimension, multiplicity)` per distinct part.
    parts: Vec<(Vec<SparseMatrix>, usize, usize)>,
}

fn support_components(m: &RModule) -> Vec<Vec<usize>> {
    let n = m.dim();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for a in 0..m.algebra().quiver().num_arrows() {
        let s = m.sparse_action(a);
        for i in 0..n {
            for &(j, _) in s.row(i) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        let g = *slot.entry(root).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }
    groups
}

impl Ranker {
    /// Splits the module into support components first.
    pub fn new(m: &RModule) -> Self {
        let mut index: HashMap<(Vec<usize>, Vec<FieldMatrix>), usize> = HashMap::new();
        let mut parts: Vec<(Vec<SparseMatrix>, usize, usize)> = Vec::new();
        for comp in support_components(m) {
            let sub = m.permuted(&comp);
            let key = (sub.vertex_of_basis().to_vec(), sub.actions().to_vec());
            match index.get(&key) {
                Some(&i) => parts[i].2 += 1,
                None => {
                    index.insert(key, parts.len());
                    parts.push((sub.basis_actions(), sub.dim(), 1));
                }
            }
        }
        Ranker { dim: m.dim(), algebra_dim: m.algebra().dim(), field: m.algebra().field().clone(), parts }
    }

    /// One blow-up of the whole module, no splitting.
    pub fn full(m: &RModule) -> Self {
        Ranker {
            dim: m.dim(),
            algebra_dim: m.algebra().dim(),
            field: m.algebra().field().clone(),
            parts: vec![(m.basis_actions(), m.dim(), 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check(&self, a: &RMatrix) -> Result<(), RankError> {
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                if a.get(i, j).terms().any(|(b, _)| b >= self.algebra_dim) {
                    return Err(RankError::AlgebraMismatch);
                }
            }
        }
        Ok(())
    }

    /// `rank(A ⊗ M)` over `K`.
    pub fn rank(&self, a: &RMatrix) -> Result<usize, RankError> {
        self.check(a)?;
        Ok(self.parts.iter().map(|(acts, d, mult)| mult * blow_up_rank(acts, *d, a, &self.field)).sum())
    }

    pub fn rk(&self, a: &RMatrix) -> Result<Rational, RankError> {
        if self.dim == 0 {
            return Err(RankError::ZeroModule);
        }
        Ok(rational::ratio(self.rank(a)?, self.dim))
    }
}

/// Sparse rows of the blow-up of `A` on `M`, row `i·dim + r`.
pub(crate) fn blow_up_sparse(m: &RModule, a: &RMatrix) -> Result<Vec<SparseRow>, RankError> {
    let n = m.algebra().dim();
    if (0..a.rows()).any(|i| (0..a.cols()).any(|j| a.get(i, j).terms().any(|(b, _)| b >= n))) {
        return Err(RankError::AlgebraMismatch);
    }
    Ok(blow_up_rows(&m.basis_actions(), m.dim(), a, m.algebra().field()))
}

fn blow_up_rows(acts: &[SparseMatrix], dim: usize, a: &RMatrix, f: &crate::gf::FiniteField) -> Vec<SparseRow> {
    let mut rows = Vec::with_capacity(a.rows() * dim);
    for i in 0..a.rows() {
        for r in 0..dim {
            let mut row: SparseRow = Vec::new();
            for j in 0..a.cols() {
                for (b, c) in a.get(i, j).terms() {
                    for &(col, v) in acts[b].row(r) {
                        row.push((j * dim + col, f.mul(c, v)));
                    }
                }
            }
            rows.push(row);
        }
    }
    rows
}

fn blow_up_rank(acts: &[SparseMatrix], dim: usize, a: &RMatrix, f: &crate::gf::FiniteField) -> usize {
    let mut e = Echelon::new(f, a.cols() * dim);
    for row in blow_up_rows(acts, dim, a, f) {
        if !row.is_empty() {
            e.insert_sparse(&row);
        }
    }
    e.rank()
}

/// The `k·dim M × l·dim M` matrix of `A` acting on `M^l`.
pub fn blow_up(m: &RModule, a: &RMatrix) -> Result<FieldMatrix, RankError> {
    let acts = m.basis_actions();
    let ranker = Ranker::full(m);
    ranker.check(a)?;
    let rows = blow_up_rows(&acts, m.dim(), a, m.algebra().field());
    let mut out = FieldMatrix::zeros(a.rows() * m.dim(), a.cols() * m.dim());
    let f = m.algebra().field();
    for (i, row) in rows.iter().enumerate() {
        for &(j, v) in row {
            out.set(i, j, f.add(out.get(i, j), v));
        }
    }
    Ok(out)
}

pub fn rk(m: &RModule, a: &RMatrix) -> Result<Rational, RankError> {
    Ranker::new(m).rk(a)
}

/// Values of `rk_M` on a suite, in suite order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankProfile {
    pub tests: Vec<String>,
    #[serde(serialize_with = "crate::rational::ser_vec")]
    pub values: Vec<Rational>,
}

pub fn profile(m: &RModule, suite: &TestSuite) -> Result<RankProfile, RankError> {
    let ranker = Ranker::new(m);
    profile_with(&ranker, suite, m.algebra())
}

pub fn profile_with(ranker: &Ranker, suite: &TestSuite, r: &StringAlgebra) -> Result<RankProfile, RankError> {
    let values =
        suite.matrices().par_iter().map(|a| ranker.rk(a)).collect::<Result<Vec<_>, _>>()?;
    Ok(RankProfile { tests: suite.matrices().iter().map(|a| rmatrix_emit(a, r)).collect(), values })
}

/// `Σ_{i≥1} 2^{-i} |p_i - q_i|`.
pub fn profile_distance(p: &RankProfile, q: &RankProfile) -> Result<Rational, RankError> {
    if p.tests != q.tests {
        return Err(RankError::SuiteMismatch);
    }
    Ok(p.values
        .iter()
        .zip(&q.values)
        .enumerate()
        .map(|(i, (a, b))| rational::inv_pow2(i + 1) * rational::abs_diff(a, b))
        .sum())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::algebra::rmatrix_parse;
    use crate::gf::FiniteField;
    use crate::module::{string_module, StringWord};

    #[test]
    fn string_x_examples() {
        let r = Arc::new(StringAlgebra::gelfand_ponomarev(FiniteField::prime(2).unwrap(), 2, 2));
        let m = string_module(&StringWord::parse("x", &r).unwrap(), &r).unwrap();
        let x = rmatrix_parse("[[x]]", &r).unwrap();
        let b = blow_up(&m, &x).unwrap();
        assert_eq!(b.row_vecs(), vec![vec![0, 1], vec![0, 0]]);
        assert_eq!(rk(&m, &x).unwrap(), rational::ratio(1, 2));
        let one = rmatrix_parse("[[1]]", &r).unwrap();
        assert_eq!(blow_up(&m, &one).unwrap(), FieldMatrix::identity(2));
        assert_eq!(rk(&m, &one).unwrap(), rational::int(1));
    }

    #[test]
    fn split_and_full_agree() {
        let r = Arc::new(StringAlgebra::gelfand_ponomarev(FiniteField::prime(3).unwrap(), 2, 2));
        let a = string_module(&StringWord::parse("x y^-1", &r).unwrap(), &r).unwrap();
        let b = string_module(&StringWord::parse("y", &r).unwrap(), &r).unwrap();
        let m = a.direct_sum(&b).unwrap().direct_sum(&a).unwrap();
        let t = rmatrix_parse("[[x, y], [2*y, x + 1]]", &r).unwrap();
        assert_eq!(Ranker::new(&m).rank(&t).unwrap(), Ranker::full(&m).rank(&t).unwrap());
        assert_eq!(Ranker::new(&m).parts.len(), 2);
    }
}
