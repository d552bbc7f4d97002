use super::LimitError;
use crate::gf::{FieldMatrix, FiniteField, Subspace};
use crate::rational::{self, Rational};

/// `{v ∈ V : T v ∈ V}`, the kernel of `V → (T V + V)/V`.
fn stays_inside(v: &Subspace, t: &FieldMatrix, f: &FiniteField) -> Subspace {
    let b = v.to_columns();
    let tb = t.mul(&b, f);
    // (c, d) with T B c = B d
    let system = tb.hstack(&b.scale(f.neg(1), f));
    let kernel = system.kernel_basis(f);
    let k = v.dim();
    let coeffs: Vec<Vec<_>> = kernel.columns().into_iter().map(|col| col[..k].to_vec()).collect();
    let images: Vec<Vec<_>> = coeffs.iter().map(|c| b.mul_vec(c, f)).collect();
    Subspace::span(v.ambient(), images.iter().map(|x| x.as_slice()), f)
}

/// A subspace `W ⊆ V` with `T(W) ⊆ V` for every operator and
/// `dim W ≥ (1 - Σ ε_T) dim V`, as the intersection of the kernels of the
/// quotient maps `V → (T V + V)/V`.
///
/// Fails when some operator has `dim(T V + V) > (1 + ε_T) dim V`.
pub fn find_invariant_subspace(
    v: &Subspace,
    operators: &[FieldMatrix],
    budgets: &[Rational],
    f: &FiniteField,
) -> Result<Subspace, LimitError> {
    let dim = rational::int(v.dim());
    let mut w = v.clone();
    let mut spent = rational::zero();
    for (i, (t, eps)) in operators.iter().zip(budgets).enumerate() {
        let image = v.image(t, f);
        let grown = image.sum(v, f).map_err(|_| LimitError::BudgetExceeded { operator: i })?;
        if rational::int(grown.dim()) > (rational::int(1) + eps) * &dim {
            return Err(LimitError::BudgetExceeded { operator: i });
        }
        spent += eps;
        let k = stays_inside(v, t, f);
        w = w.intersect(&k, f).map_err(|_| LimitError::BudgetExceeded { operator: i })?;
    }
    debug_assert!(rational::int(w.dim()) >= (rational::int(1) - spent) * dim);
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_on_a_block() {
        let f = FiniteField::prime(3).unwrap();
        let n = 6;
        let mut shift = FieldMatrix::zeros(n, n);
        for i in 0..n - 1 {
            shift.set(i + 1, i, 1);
        }
        let units: Vec<Vec<u32>> = (0..4).map(|i| (0..n).map(|j| u32::from(i == j)).collect()).collect();
        let v = Subspace::span(n, units.iter().map(|x| x.as_slice()), &f);
        let w = find_invariant_subspace(&v, &[shift.clone()], &[rational::ratio(1, 4)], &f).unwrap();
        assert_eq!(w.dim(), 3);
        for b in w.basis() {
            assert!(v.contains(&shift.mul_vec(b, &f), &f));
        }
        assert!(find_invariant_subspace(&v, &[shift], &[rational::ratio(1, 8)], &f).is_err());
        let w = find_invariant_subspace(&v, &[FieldMatrix::identity(n)], &[rational::zero()], &f).unwrap();
        assert_eq!(w, v);
    }
}
