use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::field::{Elem, FiniteField};
use super::matrix::FieldMatrix;
use super::GfError;

/// Polynomial over a finite field, coefficients lowest degree first.
///
/// Trailing zeros are always stripped, so the zero polynomial has no
/// coefficients and `degree()` returns `None`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<Elem>", into = "Vec<Elem>")]
pub struct FieldPolynomial {
    coeffs: Vec<Elem>,
}

impl From<Vec<Elem>> for FieldPolynomial {
    fn from(v: Vec<Elem>) -> Self {
        FieldPolynomial::new(v)
    }
}

impl From<FieldPolynomial> for Vec<Elem> {
    fn from(p: FieldPolynomial) -> Self {
        p.coeffs
    }
}

impl PartialOrd for FieldPolynomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Degree first, then coefficients from the top down.
impl Ord for FieldPolynomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl FieldPolynomial {
    pub fn new(mut coeffs: Vec<Elem>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        FieldPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        FieldPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        FieldPolynomial { coeffs: vec![1] }
    }

    /// The monomial `x^n`.
    pub fn x_pow(n: usize) -> Self {
        let mut c = vec![0; n + 1];
        c[n] = 1;
        FieldPolynomial { coeffs: c }
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Elem {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` stands for the degree of the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Elem {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    /// Checks every coefficient is an element of `field`.
    pub fn check_in(&self, field: &FiniteField) -> Result<(), GfError> {
        for &c in &self.coeffs {
            field.elem(c as u64)?;
        }
        Ok(())
    }

    pub fn add(&self, other: &Self, f: &FiniteField) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        FieldPolynomial::new((0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn sub(&self, other: &Self, f: &FiniteField) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        FieldPolynomial::new((0..n).map(|i| f.sub(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn scale(&self, c: Elem, f: &FiniteField) -> Self {
        FieldPolynomial::new(self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &Self, f: &FiniteField) -> Self {
        if self.is_zero() || other.is_zero() {
            return FieldPolynomial::zero();
        }
        let mut out = vec![0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.mul_add(a, b, out[i + j]);
            }
        }
        FieldPolynomial::new(out)
    }

    pub fn pow(&self, n: u32, f: &FiniteField) -> Self {
        let mut acc = FieldPolynomial::one();
        for _ in 0..n {
            acc = acc.mul(self, f);
        }
        acc
    }

    /// Euclidean division; `None` if the divisor is zero.
    pub fn divrem(&self, d: &Self, f: &FiniteField) -> Option<(Self, Self)> {
        let dd = d.degree()?;
        let inv = f.inv(d.leading())?;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Some((FieldPolynomial::zero(), self.clone()));
        }
        let mut q = vec![0; r.len() - dd];
        for top in (dd..r.len()).rev() {
            let c = f.mul(r[top], inv);
            if c == 0 {
                continue;
            }
            q[top - dd] = c;
            for (i, &di) in d.coeffs.iter().enumerate() {
                let idx = top - dd + i;
                r[idx] = f.sub(r[idx], f.mul(c, di));
            }
        }
        Some((FieldPolynomial::new(q), FieldPolynomial::new(r)))
    }

    pub fn eval(&self, x: Elem, f: &FiniteField) -> Elem {
        self.coeffs.iter().rev().fold(0, |acc, &c| f.mul_add(acc, x, c))
    }

    /// `f*(x) = x^deg f · f(1/x) / f(0)`, the minimal polynomial of the
    /// inverse companion map. Requires `f(0) != 0`.
    pub fn reciprocal(&self, f: &FiniteField) -> Option<Self> {
        let c0 = *self.coeffs.first()?;
        let inv = f.inv(c0)?;
        Some(FieldPolynomial::new(self.coeffs.iter().rev().map(|&c| f.mul(c, inv)).collect()))
    }

    /// Monic polynomials of degree `d` in code order of their lower
    /// coefficients (lowest coefficient varying fastest).
    pub fn monic_of_degree(field: &FiniteField, d: usize) -> impl Iterator<Item = FieldPolynomial> {
        let q = field.order() as u64;
        let count = q.checked_pow(d as u32).unwrap_or(u64::MAX);
        (0..count).map(move |mut code| {
            let mut c = Vec::with_capacity(d + 1);
            for _ in 0..d {
                c.push((code % q) as Elem);
                code /= q;
            }
            c.push(1);
            FieldPolynomial { coeffs: c }
        })
    }

    /// Trial division by every monic polynomial of degree `1..=deg/2`.
    pub fn is_irreducible(&self, field: &FiniteField) -> Result<bool, GfError> {
        if !self.is_monic() {
            return Err(GfError::NotMonic);
        }
        let d = self.degree().unwrap_or(0);
        if d == 0 {
            return Ok(false);
        }
        for k in 1..=d / 2 {
            for g in FieldPolynomial::monic_of_degree(field, k) {
                let (_, r) = self.divrem(&g, field).expect("nonzero divisor");
                if r.is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Companion matrix: column `j` is the coordinate vector of `x^{j+1}`
    /// modulo `self` in the basis `1, x, ..., x^{d-1}`.
    pub fn companion(&self, f: &FiniteField) -> FieldMatrix {
        let d = self.degree().unwrap_or(0);
        let mut m = FieldMatrix::zeros(d, d);
        for j in 0..d {
            if j + 1 < d {
                m.set(j + 1, j, 1);
            } else {
                let inv = f.inv(self.leading()).unwrap_or(1);
                for i in 0..d {
                    m.set(i, j, f.neg(f.mul(self.coeff(i), inv)));
                }
            }
        }
        m
    }

    /// Evaluates the polynomial at a square matrix.
    pub fn eval_matrix(&self, a: &FieldMatrix, f: &FiniteField) -> FieldMatrix {
        let n = a.rows();
        let mut acc = FieldMatrix::zeros(n, n);
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(a, f);
            for i in 0..n {
                let v = f.add(acc.get(i, i), c);
                acc.set(i, i, v);
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[Elem]) -> FieldPolynomial {
        FieldPolynomial::new(c.to_vec())
    }

    #[test]
    fn irreducibility_examples() {
        let f2 = FiniteField::prime(2).unwrap();
        let f3 = FiniteField::prime(3).unwrap();
        assert!(p(&[1, 1, 1]).is_irreducible(&f2).unwrap());
        assert!(p(&[1, 0, 1]).is_irreducible(&f3).unwrap());
        assert!(!p(&[0, 1, 0, 1]).is_irreducible(&f2).unwrap());
        assert!(matches!(p(&[1, 2]).is_irreducible(&f3), Err(GfError::NotMonic)));
    }

    #[test]
    fn irreducible_counts_match_necklace_formula() {
        // number of monic irreducibles of degree d over GF(q): (1/d) Σ_{e|d} μ(e) q^{d/e}
        let f2 = FiniteField::prime(2).unwrap();
        let counts: Vec<usize> = (1..=6)
            .map(|d| FieldPolynomial::monic_of_degree(&f2, d).filter(|g| g.is_irreducible(&f2).unwrap()).count())
            .collect();
        assert_eq!(counts, vec![2, 1, 2, 3, 6, 9]);
        let f3 = FiniteField::prime(3).unwrap();
        let c3: Vec<usize> = (1..=3)
            .map(|d| FieldPolynomial::monic_of_degree(&f3, d).filter(|g| g.is_irreducible(&f3).unwrap()).count())
            .collect();
        assert_eq!(c3, vec![3, 3, 8]);
    }

    #[test]
    fn divrem_reconstructs() {
        let f = FiniteField::prime(5).unwrap();
        let a = p(&[3, 0, 4, 1, 2]);
        let b = p(&[1, 3]);
        let (q, r) = a.divrem(&b, &f).unwrap();
        assert_eq!(q.mul(&b, &f).add(&r, &f), a);
        assert!(r.degree().unwrap_or(0) < 1);
    }

    #[test]
    fn companion_is_annihilated() {
        let f = FiniteField::prime(3).unwrap();
        let g = p(&[2, 1, 0, 1]);
        let c = g.companion(&f);
        assert!(g.eval_matrix(&c, &f).is_zero());
    }

    #[test]
    fn reciprocal_of_companion_inverse() {
        let f = FiniteField::prime(3).unwrap();
        let g = p(&[2, 1, 1]);
        let c = g.companion(&f);
        let ci = c.inverse(&f).unwrap();
        let gs = g.reciprocal(&f).unwrap();
        assert!(gs.eval_matrix(&ci, &f).is_zero());
    }
}
