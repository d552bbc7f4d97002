use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{AlgebraElement, RMatrix, StringAlgebra};

/// Deterministic list of test matrices over `R`.
///
/// Order: every `1×1` matrix whose entry is a single basis path, then
/// `1×1` sums of two paths, then seeded random matrices of every shape
/// up to `s×s` in round-robin, until `max_tests` matrices; user extras
/// come last. Coefficients range over `1..=h` (as field element codes).
#[derive(Debug, Clone)]
pub struct TestSuite {
    pub s: usize,
    pub h: u32,
    pub max_tests: usize,
    pub seed: u64,
    matrices: Vec<RMatrix>,
}

pub const DEFAULT_MAX_TESTS: usize = 40;

impl TestSuite {
    pub fn new(r: &StringAlgebra, s: usize, h: u32, max_tests: usize, seed: u64) -> Self {
        let f = r.field();
        let h = h.clamp(1, f.order() - 1);
        let n = r.dim();
        let mut mats: Vec<RMatrix> = Vec::new();
        let single = |i: usize, c: u32| {
            let mut e = AlgebraElement::zero();
            e.add_term(i, c, f);
            e
        };
        let one_by_one = |e: AlgebraElement| RMatrix::from_rows(vec![vec![e]]).expect("1x1");
        'paths: for c in 1..=h {
            for i in 0..n {
                if mats.len() >= max_tests {
                    break 'paths;
                }
                mats.push(one_by_one(single(i, c)));
            }
        }
        'pairs: for i in 0..n {
            for j in i + 1..n {
                if mats.len() >= max_tests {
                    break 'pairs;
                }
                mats.push(one_by_one(single(i, 1).add(&single(j, 1), f)));
            }
        }
        let shapes: Vec<(usize, usize)> = (1..=s)
            .flat_map(|k| (1..=s).map(move |l| (k, l)))
            .filter(|&(k, l)| (k, l) != (1, 1))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut idx = 0;
        while mats.len() < max_tests && !shapes.is_empty() {
            let (k, l) = shapes[idx % shapes.len()];
            idx += 1;
            let mut m = RMatrix::zeros(k, l);
            for i in 0..k {
                for j in 0..l {
                    m.set(i, j, random_entry_with(r, h, &mut rng));
                }
            }
            mats.push(m);
        }
        TestSuite { s, h, max_tests, seed, matrices: mats }
    }

    /// Defaults `s = 3`, `h = 1`.
    pub fn default_for(r: &StringAlgebra) -> Self {
        TestSuite::new(r, 3, 1, DEFAULT_MAX_TESTS, 0)
    }

    pub fn with_extras(mut self, extras: Vec<RMatrix>) -> Self {
        self.matrices.extend(extras);
        self
    }

    pub fn matrices(&self) -> &[RMatrix] {
        &self.matrices
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }
}

fn random_entry_with<G: Rng + ?Sized>(r: &StringAlgebra, h: u32, rng: &mut G) -> AlgebraElement {
    let f = r.field();
    let n = r.dim();
    let mut e = AlgebraElement::zero();
    match rng.gen_range(0..4) {
        0 => {}
        1 => e.add_term(rng.gen_range(0..n), rng.gen_range(1..=h), f),
        2 => {
            for _ in 0..2 {
                e.add_term(rng.gen_range(0..n), rng.gen_range(1..=h), f);
            }
        }
        _ => {
            for i in 0..n {
                if rng.gen_bool(0.5) {
                    e.add_term(i, rng.gen_range(1..=h), f);
                }
            }
        }
    }
    e
}

/// Random entry: zero, one path, two paths, or a random subset of paths,
/// with coefficients anywhere in the field.
pub fn random_entry<G: Rng + ?Sized>(r: &StringAlgebra, rng: &mut G) -> AlgebraElement {
    random_entry_with(r, r.field().order() - 1, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FiniteField;

    #[test]
    fn deterministic_and_covers_paths() {
        let r = StringAlgebra::kronecker(FiniteField::prime(2).unwrap());
        let a = TestSuite::default_for(&r);
        let b = TestSuite::default_for(&r);
        assert_eq!(a.matrices(), b.matrices());
        assert_eq!(a.len(), DEFAULT_MAX_TESTS);
        for i in 0..r.dim() {
            assert_eq!(a.matrices()[i].get(0, 0), &AlgebraElement::basis(i));
        }
    }
}
