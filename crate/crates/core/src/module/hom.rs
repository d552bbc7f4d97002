use std::collections::HashMap;

use super::{same_algebra, ModuleError, RModule};
use crate::gf::{Echelon, FieldMatrix, SparseRow};

/// `Hom_R(Q, M)` as explicit `dim M × dim Q` matrices.
#[derive(Debug, Clone)]
pub struct HomSpace {
    pub dim: usize,
    pub basis: Vec<FieldMatrix>,
}

/// Unknowns are the entries `f[i][j]` with `i`, `j` at the same vertex;
/// each arrow contributes the equations `f Q_α - M_α f = 0`.
fn hom_system(q: &RModule, m: &RModule) -> Result<(Vec<(usize, usize)>, Echelon), ModuleError> {
    if !same_algebra(q.algebra(), m.algebra()) {
        return Err(ModuleError::AlgebraMismatch);
    }
    let r = q.algebra();
    let field = r.field();
    let mut unknowns = Vec::new();
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    for i in 0..m.dim() {
        for j in 0..q.dim() {
            if m.vertex_of_basis()[i] == q.vertex_of_basis()[j] {
                index.insert((i, j), unknowns.len());
                unknowns.push((i, j));
            }
        }
    }
    let mut ech = Echelon::new(field, unknowns.len());
    let by_vertex = |vob: &[usize], v: usize| -> Vec<usize> { (0..vob.len()).filter(|&i| vob[i] == v).collect() };
    for (a, arrow) in r.quiver().arrows().iter().enumerate() {
        let qa = q.action(a).transpose();
        let ma = m.action(a);
        // (f Q_α)[i][j] = Σ_k f[i][k] Q_α[k][j], (M_α f)[i][j] = Σ_k M_α[i][k] f[k][j]
        for &i in &by_vertex(m.vertex_of_basis(), arrow.target) {
            for &j in &by_vertex(q.vertex_of_basis(), arrow.source) {
                let mut row: SparseRow = Vec::new();
                for (k, &v) in qa.row(j).iter().enumerate() {
                    if v != 0 {
                        row.push((index[&(i, k)], v));
                    }
                }
                for (k, &v) in ma.row(i).iter().enumerate() {
                    if v != 0 {
                        row.push((index[&(k, j)], field.neg(v)));
                    }
                }
                if !row.is_empty() {
                    ech.insert_sparse(&row);
                }
            }
        }
    }
    Ok((unknowns, ech))
}

pub fn hom_dim(q: &RModule, m: &RModule) -> Result<usize, ModuleError> {
    let (unknowns, ech) = hom_system(q, m)?;
    Ok(unknowns.len() - ech.rank())
}

pub fn hom_space(q: &RModule, m: &RModule) -> Result<HomSpace, ModuleError> {
    let (unknowns, ech) = hom_system(q, m)?;
    let basis: Vec<FieldMatrix> = ech
        .null_space()
        .into_iter()
        .map(|v| {
            let mut f = FieldMatrix::zeros(m.dim(), q.dim());
            for (u, &(i, j)) in unknowns.iter().enumerate() {
                f.set(i, j, v[u]);
            }
            f
        })
        .collect();
    Ok(HomSpace { dim: basis.len(), basis })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::algebra::StringAlgebra;
    use crate::gf::FiniteField;
    use crate::module::{string_module, StringWord};

    #[test]
    fn simples_and_string_x() {
        let r = Arc::new(StringAlgebra::kronecker(FiniteField::prime(3).unwrap()));
        let sa = RModule::simple(r.clone(), 0);
        let sb = RModule::simple(r.clone(), 1);
        assert_eq!(hom_dim(&sa, &sa).unwrap(), 1);
        assert_eq!(hom_dim(&sa, &sb).unwrap(), 0);
        let g = Arc::new(StringAlgebra::gelfand_ponomarev(FiniteField::prime(2).unwrap(), 2, 2));
        let mx = string_module(&StringWord::parse("x", &g).unwrap(), &g).unwrap();
        let h = hom_space(&mx, &mx).unwrap();
        assert_eq!(h.dim, 2);
        let f = g.field();
        for b in &h.basis {
            for a in 0..2 {
                assert_eq!(b.mul(mx.action(a), f), mx.action(a).mul(b, f));
            }
        }
    }
}
