use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::suite::random_entry;
use super::{RankError, Ranker, TestSuite};
use crate::algebra::{rmatrix_emit, RMatrix, StringAlgebra};
use crate::gf::Subspace;
use crate::module::RModule;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub trials: usize,
    pub checks: usize,
    pub violations: Vec<String>,
}

impl AuditReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn random_matrix(r: &StringAlgebra, k: usize, l: usize, rng: &mut ChaCha8Rng) -> RMatrix {
    let mut m = RMatrix::zeros(k, l);
    for i in 0..k {
        for j in 0..l {
            m.set(i, j, random_entry(r, rng));
        }
    }
    m
}

/// Checks the Sylvester axioms on random triples `A` (`a1×a2`), `B`
/// (`a2×b2`), `C` (`a2×a2`) with every size at most the suite's `s`:
/// `rk(1) = 1`, `rk(AB) ≤ min(rk A, rk B)`, `rk(A⊕B) = rk A + rk B` and
/// `rk([[A,0],[C,B]]) ≥ rk A + rk B`, all in exact integer ranks.
pub fn sylvester_audit(m: &RModule, suite: &TestSuite, trials: usize, seed: u64) -> Result<AuditReport, RankError> {
    let r = m.algebra();
    let ranker = Ranker::new(m);
    let dim = m.dim();
    if dim == 0 {
        return Err(RankError::ZeroModule);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = Vec::new();
    let mut checks = 0;
    let s = suite.s.max(1);
    for k in 1..=s {
        checks += 1;
        if ranker.rank(&RMatrix::identity(k, r))? != k * dim {
            violations.push(format!("rk(I_{k}) != {k}"));
        }
    }
    for t in 0..trials {
        let a1 = rng.gen_range(1..=s);
        let a2 = rng.gen_range(1..=s);
        let b2 = rng.gen_range(1..=s);
        let a = random_matrix(r, a1, a2, &mut rng);
        let b = random_matrix(r, a2, b2, &mut rng);
        let c = random_matrix(r, a2, a2, &mut rng);
        let ra = ranker.rank(&a)?;
        let rb = ranker.rank(&b)?;
        let rab = ranker.rank(&a.mul(&b, r).expect("composable"))?;
        let rdiag = ranker.rank(&RMatrix::block_diag(&a, &b))?;
        let rlow = ranker.rank(&RMatrix::lower_block(&a, &c, &b).expect("shapes"))?;
        checks += 4;
        let describe = || format!("trial {t}: A={} B={}", rmatrix_emit(&a, r), rmatrix_emit(&b, r));
        if ra > a1.min(a2) * dim || rb > a2.min(b2) * dim {
            violations.push(format!("{}: rank exceeds size", describe()));
        }
        if rab > ra.min(rb) {
            violations.push(format!("{}: rk(AB) > min(rk A, rk B)", describe()));
        }
        if rdiag != ra + rb {
            violations.push(format!("{}: rk(A⊕B) != rk A + rk B", describe()));
        }
        if rlow < ra + rb {
            violations.push(format!("{}: rk([[A,0],[C,B]]) < rk A + rk B", describe()));
        }
    }
    Ok(AuditReport { trials, checks, violations })
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightReport {
    #[serde(serialize_with = "crate::rational::ser_vec")]
    pub weights: Vec<Rational>,
    pub checked: usize,
    pub mismatches: Vec<String>,
}

impl WeightReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// `rk_{⊕ Q_i^{n_i}}(A) = Σ w_i rk_{Q_i}(A)` with `w_i = n_i dim Q_i / dim M`.
/// The left side is one blow-up of the assembled sum, without splitting.
pub fn weight_identity_check(components: &[(RModule, usize)], suite: &TestSuite) -> Result<WeightReport, RankError> {
    let first = components.first().ok_or(RankError::ZeroModule)?;
    let r = first.0.algebra().clone();
    let total = RModule::direct_sum_all(
        r.clone(),
        components.iter().flat_map(|(q, n)| std::iter::repeat_n(q, *n)),
    )?;
    if total.dim() == 0 {
        return Err(RankError::ZeroModule);
    }
    let whole = Ranker::full(&total);
    let weights: Vec<Rational> =
        components.iter().map(|(q, n)| rational::ratio(n * q.dim(), total.dim())).collect();
    let rankers: Vec<Ranker> = components.iter().map(|(q, _)| Ranker::full(q)).collect();
    let mut mismatches = Vec::new();
    for a in suite.matrices() {
        let lhs = whole.rk(a)?;
        let mut rhs = rational::zero();
        for ((w, rk), (q, _)) in weights.iter().zip(&rankers).zip(components) {
            if q.dim() > 0 {
                rhs += w * rk.rk(a)?;
            }
        }
        if lhs != rhs {
            mismatches.push(format!(
                "{}: {} != {}",
                rmatrix_emit(a, &r),
                rational::render(&lhs),
                rational::render(&rhs)
            ));
        }
    }
    Ok(WeightReport { weights, checked: suite.len(), mismatches })
}

#[derive(Debug, Clone, Serialize)]
pub struct TrimReport {
    #[serde(serialize_with = "crate::rational::ser")]
    pub epsilon: Rational,
    pub checked: usize,
    #[serde(serialize_with = "crate::rational::ser")]
    pub max_slack_used: Rational,
    pub violations: Vec<String>,
}

impl TrimReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `|rk_M(A) - rk_N(A)| ≤ 2εl` for every `k×l` suite matrix, where
/// `ε = 1 - dim N / dim M` and `N ≤ M` is a submodule.
pub fn trim_bound_check(m: &RModule, n: &Subspace, suite: &TestSuite) -> Result<TrimReport, RankError> {
    if !m.is_submodule(n) {
        return Err(RankError::NotSubmodule);
    }
    let sub = m.restrict(n).map_err(|_| RankError::NotSubmodule)?;
    if sub.dim() == 0 {
        return Err(RankError::ZeroModule);
    }
    let eps = rational::int(1) - rational::ratio(n.dim(), m.dim());
    let rm = Ranker::new(m);
    let rn = Ranker::new(&sub);
    let mut violations = Vec::new();
    let mut max_slack = rational::zero();
    for a in suite.matrices() {
        let gap = rational::abs_diff(&rm.rk(a)?, &rn.rk(a)?);
        let bound = rational::int(2 * a.cols()) * &eps;
        if gap > bound {
            violations.push(format!("{}: gap {} > {}", rmatrix_emit(a, m.algebra()), rational::render(&gap), rational::render(&bound)));
        } else if bound > rational::zero() {
            let used = gap / bound;
            if used > max_slack {
                max_slack = used;
            }
        }
    }
    Ok(TrimReport { epsilon: eps, checked: suite.len(), max_slack_used: max_slack, violations })
}
