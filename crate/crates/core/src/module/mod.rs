//! Finite-dimensional modules over a string algebra, given as
//! representations: a vertex grading of the basis plus one matrix per arrow.

mod construct;
mod decomp;
mod hom;
mod spec;
mod word;

pub use construct::{band_module, string_module};
pub use decomp::{Decomposition, Indecomposable};
pub use hom::{hom_dim, hom_space, HomSpace};
pub use spec::{parse_module_spec, ModuleSpec};
pub use word::{BandData, Letter, StringWord};

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{AlgebraError, StringAlgebra};
use crate::gf::{Echelon, Elem, FieldMatrix, GfError, SparseMatrix, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuleError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Field(#[from] GfError),
    #[error("string condition ({condition}) fails at letter {position}")]
    InvalidString { condition: usize, position: usize },
    #[error("band word is not cyclic")]
    NotCyclic,
    #[error("band word is a proper power")]
    ProperPower,
    #[error("band polynomial is not monic irreducible")]
    ReducibleF,
    #[error("band polynomial vanishes at zero")]
    FVanishesAtZero,
    #[error("modules over different algebras")]
    AlgebraMismatch,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("not a submodule: {0}")]
    NotASubmodule(String),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("{0}")]
    Parse(String),
}

/// A module as a representation: `vertex_of_basis[i]` is the vertex `a`
/// with `e_a z_i = z_i`, and `action[α]` is the matrix of `α` acting on
/// column vectors.
#[derive(Debug, Clone)]
pub struct RModule {
    algebra: Arc<StringAlgebra>,
    vertex_of_basis: Vec<usize>,
    action: Vec<FieldMatrix>,
    sparse: Vec<SparseMatrix>,
}

impl PartialEq for RModule {
    fn eq(&self, other: &Self) -> bool {
        same_algebra(&self.algebra, &other.algebra)
            && self.vertex_of_basis == other.vertex_of_basis
            && self.action == other.action
    }
}

impl Eq for RModule {}

pub(crate) fn same_algebra(a: &Arc<StringAlgebra>, b: &Arc<StringAlgebra>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Outcome of [`module_check`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModuleReport {
    pub ok: bool,
    /// Which axiom failed.
    pub violation: Option<String>,
    /// The path (or arrow) witnessing the failure.
    pub witness: Option<String>,
}

impl ModuleReport {
    fn ok() -> Self {
        ModuleReport { ok: true, violation: None, witness: None }
    }

    fn fail(violation: &str, witness: String) -> Self {
        ModuleReport { ok: false, violation: Some(violation.into()), witness: Some(witness) }
    }
}

impl RModule {
    fn build(algebra: Arc<StringAlgebra>, vertex_of_basis: Vec<usize>, action: Vec<FieldMatrix>) -> Self {
        let sparse = action.iter().map(SparseMatrix::from_dense).collect();
        RModule { algebra, vertex_of_basis, action, sparse }
    }

    /// Builds a module without checking relations; see [`module_check`].
    pub fn new(
        algebra: Arc<StringAlgebra>,
        vertex_of_basis: Vec<usize>,
        action: Vec<FieldMatrix>,
    ) -> Result<Self, ModuleError> {
        let dim = vertex_of_basis.len();
        if action.len() != algebra.quiver().num_arrows() {
            return Err(ModuleError::ShapeMismatch(format!(
                "{} action matrices for {} arrows",
                action.len(),
                algebra.quiver().num_arrows()
            )));
        }
        if let Some(m) = action.iter().find(|m| m.rows() != dim || m.cols() != dim) {
            return Err(ModuleError::ShapeMismatch(format!("{}x{} action on dimension {dim}", m.rows(), m.cols())));
        }
        if vertex_of_basis.iter().any(|&v| v >= algebra.quiver().num_vertices()) {
            return Err(ModuleError::ShapeMismatch("basis vertex out of range".into()));
        }
        for m in &action {
            m.check_in(algebra.field())?;
        }
        Ok(RModule::build(algebra, vertex_of_basis, action))
    }

    pub fn zero(algebra: Arc<StringAlgebra>) -> Self {
        let n = algebra.quiver().num_arrows();
        RModule::build(algebra, Vec::new(), vec![FieldMatrix::zeros(0, 0); n])
    }

    /// The simple module at vertex `v`.
    pub fn simple(algebra: Arc<StringAlgebra>, v: usize) -> Self {
        let n = algebra.quiver().num_arrows();
        RModule::build(algebra, vec![v], vec![FieldMatrix::zeros(1, 1); n])
    }

    pub fn algebra(&self) -> &Arc<StringAlgebra> {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.vertex_of_basis.len()
    }

    pub fn vertex_of_basis(&self) -> &[usize] {
        &self.vertex_of_basis
    }

    pub fn action(&self, arrow: usize) -> &FieldMatrix {
        &self.action[arrow]
    }

    pub fn actions(&self) -> &[FieldMatrix] {
        &self.action
    }

    /// `dim e_v M`.
    pub fn vertex_dim(&self, v: usize) -> usize {
        self.vertex_of_basis.iter().filter(|&&w| w == v).count()
    }

    pub fn sparse_action(&self, arrow: usize) -> &SparseMatrix {
        &self.sparse[arrow]
    }

    /// Matrix of a path given in written order (first arrow applied last).
    pub fn path_action_sparse(&self, arrows: &[usize]) -> SparseMatrix {
        let f = self.algebra.field();
        match arrows.split_first() {
            None => SparseMatrix::identity(self.dim()),
            Some((&a, rest)) => rest.iter().fold(self.sparse[a].clone(), |m, &b| m.mul(&self.sparse[b], f)),
        }
    }

    pub fn path_action(&self, arrows: &[usize]) -> FieldMatrix {
        self.path_action_sparse(arrows).to_dense()
    }

    /// Action of a basis path of `R`.
    pub fn basis_action(&self, basis_index: usize) -> SparseMatrix {
        let p = &self.algebra.path_basis()[basis_index];
        if p.arrows.is_empty() {
            let rows = self
                .vertex_of_basis
                .iter()
                .enumerate()
                .map(|(i, &v)| if v == p.vertex { vec![(i, 1)] } else { Vec::new() })
                .collect();
            SparseMatrix::from_rows(rows, self.dim())
        } else {
            self.path_action_sparse(&p.arrows)
        }
    }

    /// Actions of every basis path, indexed like the path basis.
    pub fn basis_actions(&self) -> Vec<SparseMatrix> {
        (0..self.algebra.dim()).map(|b| self.basis_action(b)).collect()
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(&self, other: &RModule) -> Result<RModule, ModuleError> {
        if !same_algebra(&self.algebra, &other.algebra) {
            return Err(ModuleError::AlgebraMismatch);
        }
        let mut vob = self.vertex_of_basis.clone();
        vob.extend_from_slice(&other.vertex_of_basis);
        let action = self.action.iter().zip(&other.action).map(|(a, b)| a.block_diag(b)).collect();
        Ok(RModule::build(self.algebra.clone(), vob, action))
    }

    pub fn direct_sum_all<'a>(
        algebra: Arc<StringAlgebra>,
        parts: impl IntoIterator<Item = &'a RModule>,
    ) -> Result<RModule, ModuleError> {
        let parts: Vec<&RModule> = parts.into_iter().collect();
        if parts.iter().any(|p| !same_algebra(&algebra, &p.algebra)) {
            return Err(ModuleError::AlgebraMismatch);
        }
        let dim: usize = parts.iter().map(|p| p.dim()).sum();
        let mut vob = Vec::with_capacity(dim);
        let mut action = vec![FieldMatrix::zeros(dim, dim); algebra.quiver().num_arrows()];
        let mut off = 0;
        for p in parts {
            vob.extend_from_slice(&p.vertex_of_basis);
            for (a, m) in action.iter_mut().enumerate() {
                m.put_block(off, off, &p.action[a]);
            }
            off += p.dim();
        }
        Ok(RModule::build(algebra, vob, action))
    }

    /// `k`-fold direct sum of the module with itself.
    pub fn power(&self, k: usize) -> RModule {
        RModule::direct_sum_all(self.algebra.clone(), std::iter::repeat_n(self, k)).expect("same algebra")
    }

    /// `JM`, the span of the images of all arrows.
    pub fn radical(&self) -> Subspace {
        let f = self.algebra.field();
        let mut e = Echelon::new(f, self.dim());
        for m in &self.action {
            for j in 0..m.cols() {
                e.insert_dense(&m.column(j));
            }
        }
        Subspace::span(self.dim(), e.rref_rows().iter().map(|v| v.as_slice()), f)
    }

    /// Smallest submodule containing the given vectors.
    pub fn generated_submodule(&self, vectors: &[Vec<Elem>]) -> Subspace {
        let f = self.algebra.field();
        let n = self.dim();
        let mut e = Echelon::new(f, n);
        let mut queue: Vec<Vec<Elem>> = Vec::new();
        let push = |v: Vec<Elem>, e: &mut Echelon, queue: &mut Vec<Vec<Elem>>| {
            if v.iter().any(|&x| x != 0) && e.insert_dense(&v) {
                queue.push(v);
            }
        };
        for v in vectors {
            for vert in 0..self.algebra.quiver().num_vertices() {
                let proj: Vec<Elem> =
                    v.iter().enumerate().map(|(i, &x)| if self.vertex_of_basis[i] == vert { x } else { 0 }).collect();
                push(proj, &mut e, &mut queue);
            }
        }
        while let Some(v) = queue.pop() {
            for m in &self.sparse {
                push(m.mul_vec(&v, f), &mut e, &mut queue);
            }
        }
        Subspace::span(n, e.rref_rows().iter().map(|v| v.as_slice()), f)
    }

    /// True if the subspace is stable under every `e_a` and every arrow.
    pub fn is_submodule(&self, u: &Subspace) -> bool {
        self.generated_submodule(u.basis()).dim() == u.dim()
    }

    /// The submodule `U` as a module in its own right. The new basis is the
    /// reduced echelon basis of each `e_a U`, vertices in order.
    pub fn restrict(&self, u: &Subspace) -> Result<RModule, ModuleError> {
        let f = self.algebra.field();
        if u.ambient() != self.dim() {
            return Err(ModuleError::ShapeMismatch("ambient dimension".into()));
        }
        if !self.is_submodule(u) {
            return Err(ModuleError::NotASubmodule("not closed under the action".into()));
        }
        let nv = self.algebra.quiver().num_vertices();
        let mut basis: Vec<Vec<Elem>> = Vec::new();
        let mut vob = Vec::new();
        for vert in 0..nv {
            let projs: Vec<Vec<Elem>> = u
                .basis()
                .iter()
                .map(|b| b.iter().enumerate().map(|(i, &x)| if self.vertex_of_basis[i] == vert { x } else { 0 }).collect())
                .collect();
            let s = Subspace::span(self.dim(), projs.iter().map(|v| v.as_slice()), f);
            for b in s.basis() {
                basis.push(b.clone());
                vob.push(vert);
            }
        }
        let coords = |v: &[Elem]| -> Vec<Elem> { coordinates(&basis, v) };
        let k = basis.len();
        let action = self
            .action
            .iter()
            .map(|m| {
                let cols: Vec<Vec<Elem>> = basis.iter().map(|b| coords(&m.mul_vec(b, f))).collect();
                FieldMatrix::from_columns(&cols, k)
            })
            .collect();
        Ok(RModule::build(self.algebra.clone(), vob, action))
    }

    /// Quotient `M / U` with basis the standard vectors outside the pivot
    /// columns of `U`.
    pub fn quotient(&self, u: &Subspace) -> Result<RModule, ModuleError> {
        let f = self.algebra.field();
        if !self.is_submodule(u) {
            return Err(ModuleError::NotASubmodule("not closed under the action".into()));
        }
        let pivots: Vec<usize> =
            u.basis().iter().map(|b| b.iter().position(|&x| x != 0).expect("nonzero basis vector")).collect();
        let keep: Vec<usize> = (0..self.dim()).filter(|c| !pivots.contains(c)).collect();
        // Reduce a vector modulo U, then read off the kept coordinates.
        let reduce = |mut v: Vec<Elem>| -> Vec<Elem> {
            for (b, &p) in u.basis().iter().zip(&pivots) {
                let c = v[p];
                if c != 0 {
                    let neg = f.neg(c);
                    for (x, &y) in v.iter_mut().zip(b) {
                        *x = f.mul_add(neg, y, *x);
                    }
                }
            }
            keep.iter().map(|&i| v[i]).collect()
        };
        let action = self
            .action
            .iter()
            .map(|m| {
                let cols: Vec<Vec<Elem>> = keep.iter().map(|&j| reduce(m.column(j))).collect();
                FieldMatrix::from_columns(&cols, keep.len())
            })
            .collect();
        let vob = keep.iter().map(|&i| self.vertex_of_basis[i]).collect();
        Ok(RModule::build(self.algebra.clone(), vob, action))
    }

    /// Module with the basis permuted: new vector `i` is old vector `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> RModule {
        let vob = perm.iter().map(|&i| self.vertex_of_basis[i]).collect();
        let action = self.action.iter().map(|m| m.submatrix(perm, perm)).collect();
        RModule::build(self.algebra.clone(), vob, action)
    }
}

/// Coordinates of `v` in a basis given in reduced echelon form per block:
/// the coefficient of each basis vector is the entry of `v` at its pivot.
fn coordinates(basis: &[Vec<Elem>], v: &[Elem]) -> Vec<Elem> {
    basis.iter().map(|b| v[b.iter().position(|&x| x != 0).expect("nonzero")]).collect()
}

/// Verifies grading, arrow blocks, relations and nilpotency.
pub fn module_check(m: &RModule) -> ModuleReport {
    let r = &m.algebra;
    let q = r.quiver();
    for (a, mat) in m.action.iter().enumerate() {
        let arrow = q.arrow(a);
        for i in 0..mat.rows() {
            for j in 0..mat.cols() {
                if mat.get(i, j) != 0 && (m.vertex_of_basis[j] != arrow.source || m.vertex_of_basis[i] != arrow.target)
                {
                    return ModuleReport::fail("arrow leaves its vertex blocks", arrow.label.clone());
                }
            }
        }
    }
    for p in r.forbidden() {
        if !m.path_action_sparse(p).is_zero() {
            let labels: Vec<&str> = p.iter().map(|&a| r.arrow_label(a)).collect();
            return ModuleReport::fail("forbidden path acts nonzero", labels.join(" "));
        }
    }
    // Every composable path of length q must vanish; extend nonzero products
    // one arrow at a time so zero prefixes prune the search.
    let qn = r.nilpotency_bound();
    let mut layer: Vec<(Vec<usize>, SparseMatrix)> =
        (0..q.num_arrows()).map(|a| (vec![a], m.sparse[a].clone())).filter(|(_, x)| !x.is_zero()).collect();
    for _ in 1..qn {
        let mut next = Vec::new();
        for (p, x) in &layer {
            for b in 0..q.num_arrows() {
                if q.arrow(b).source != q.arrow(p[0]).target {
                    continue;
                }
                let y = m.sparse[b].mul(x, r.field());
                if !y.is_zero() {
                    let mut np = vec![b];
                    np.extend_from_slice(p);
                    next.push((np, y));
                }
            }
        }
        layer = next;
    }
    if let Some((p, _)) = layer.first() {
        if qn > 0 && p.len() >= qn {
            let labels: Vec<&str> = p.iter().map(|&a| r.arrow_label(a)).collect();
            return ModuleReport::fail("path of length q acts nonzero", labels.join(" "));
        }
    }
    ModuleReport::ok()
}
