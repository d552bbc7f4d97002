//! Positive primitive formulas and the dimensions of their solution sets.
//!
//! A formula of type `t` is an `m×n` matrix `A` over `R`; a tuple
//! `v ∈ M^t` satisfies it when some `y ∈ M^{n-t}` makes `A (v, y) = 0`.

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{rmatrix_emit, rmatrix_parse, AlgebraElement, AlgebraError, RMatrix, StringAlgebra};
use crate::gf::{Echelon, Subspace};
use crate::module::{ModuleError, RModule, StringWord};
use crate::rank::{blow_up_sparse, RankError, Ranker};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PpError {
    #[error("formula refers to paths outside the module's algebra")]
    AlgebraMismatch,
    #[error("type {t} is not within 1..={n}")]
    BadType { t: usize, n: usize },
    #[error("formulas have different types ({0} and {1})")]
    TypeMismatch(usize, usize),
    #[error("kernel projection gives {direct} but the rank formula gives {formula}")]
    MethodDisagreement { direct: String, formula: String },
    #[error("pair does not isolate the module: {0}")]
    NotIsolating(String),
    #[error("psi-solutions are not contained in phi-solutions")]
    NotContained,
    #[error("module has dimension zero")]
    ZeroModule,
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("syntax error: {0}")]
    Syntax(String),
}

impl From<RankError> for PpError {
    fn from(e: RankError) -> Self {
        match e {
            RankError::Module(m) => PpError::Module(m),
            RankError::ZeroModule => PpError::ZeroModule,
            _ => PpError::AlgebraMismatch,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PPFormula {
    pub matrix: RMatrix,
    pub t: usize,
}

impl PPFormula {
    pub fn new(matrix: RMatrix, t: usize) -> Result<Self, PpError> {
        if t == 0 || t > matrix.cols() {
            return Err(PpError::BadType { t, n: matrix.cols() });
        }
        Ok(PPFormula { matrix, t })
    }

    /// No equations: every tuple satisfies it.
    pub fn top(t: usize) -> Self {
        PPFormula { matrix: RMatrix::zeros(1, t), t }
    }

    /// `v = 0`.
    pub fn bottom(t: usize, r: &StringAlgebra) -> Self {
        PPFormula { matrix: RMatrix::identity(t, r), t }
    }

    pub fn vars(&self) -> usize {
        self.matrix.cols()
    }

    /// Formula whose solution set is the intersection.
    pub fn conjunction(&self, other: &PPFormula) -> Result<PPFormula, PpError> {
        if self.t != other.t {
            return Err(PpError::TypeMismatch(self.t, other.t));
        }
        let t = self.t;
        let (ea, eb) = (self.vars() - t, other.vars() - t);
        let mut m = RMatrix::zeros(self.matrix.rows() + other.matrix.rows(), t + ea + eb);
        for i in 0..self.matrix.rows() {
            for j in 0..self.vars() {
                m.set(i, j, self.matrix.get(i, j).clone());
            }
        }
        let off = self.matrix.rows();
        for i in 0..other.matrix.rows() {
            for j in 0..other.vars() {
                let col = if j < t { j } else { j + ea };
                m.set(off + i, col, other.matrix.get(i, j).clone());
            }
        }
        Ok(PPFormula { matrix: m, t })
    }

    /// Formula whose solution set is the sum: `v = v₁ + v₂` with `v₁`
    /// satisfying `self` and `v₂` satisfying `other`.
    pub fn sum(&self, other: &PPFormula, r: &StringAlgebra) -> Result<PPFormula, PpError> {
        if self.t != other.t {
            return Err(PpError::TypeMismatch(self.t, other.t));
        }
        let f = r.field();
        let t = self.t;
        let (na, nb) = (self.vars(), other.vars());
        let rows = t + self.matrix.rows() + other.matrix.rows();
        let mut m = RMatrix::zeros(rows, t + na + nb);
        let minus_one = r.unit().neg(f);
        for i in 0..t {
            m.set(i, i, r.unit());
            m.set(i, t + i, minus_one.clone());
            m.set(i, t + na + i, minus_one.clone());
        }
        for i in 0..self.matrix.rows() {
            for j in 0..na {
                m.set(t + i, t + j, self.matrix.get(i, j).clone());
            }
        }
        let off = t + self.matrix.rows();
        for i in 0..other.matrix.rows() {
            for j in 0..nb {
                m.set(off + i, t + na + j, other.matrix.get(i, j).clone());
            }
        }
        Ok(PPFormula { matrix: m, t })
    }

    /// `t=<k> [[...]]`.
    pub fn render(&self, r: &StringAlgebra) -> String {
        format!("t={} {}", self.t, rmatrix_emit(&self.matrix, r))
    }

    pub fn parse(text: &str, r: &StringAlgebra) -> Result<Self, PpError> {
        let text = text.trim();
        let rest = text.strip_prefix("t=").ok_or_else(|| PpError::Syntax("formula must start with t=<k>".into()))?;
        let split = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        let t: usize = rest[..split].parse().map_err(|_| PpError::Syntax("bad type".into()))?;
        let matrix = rmatrix_parse(&rest[split..], r)?;
        PPFormula::new(matrix, t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PPPair {
    pub phi: PPFormula,
    pub psi: PPFormula,
}

impl PPPair {
    pub fn new(phi: PPFormula, psi: PPFormula) -> Result<Self, PpError> {
        if phi.t != psi.t {
            return Err(PpError::TypeMismatch(phi.t, psi.t));
        }
        Ok(PPPair { phi, psi })
    }

    pub fn render(&self, r: &StringAlgebra) -> String {
        format!("phi: {}\npsi: {}\n", self.phi.render(r), self.psi.render(r))
    }

    /// Two lines, `phi: <formula>` and `psi: <formula>`.
    pub fn parse(text: &str, r: &StringAlgebra) -> Result<Self, PpError> {
        let (mut phi, mut psi) = (None, None);
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("phi:") {
                phi = Some(PPFormula::parse(rest, r)?);
            } else if let Some(rest) = line.strip_prefix("psi:") {
                psi = Some(PPFormula::parse(rest, r)?);
            } else {
                return Err(PpError::Syntax(format!("unexpected line {line:?}")));
            }
        }
        match (phi, psi) {
            (Some(a), Some(b)) => PPPair::new(a, b),
            _ => Err(PpError::Syntax("pair needs both phi: and psi:".into())),
        }
    }
}

/// `M(φ) ⊆ M^t`.
///
/// Existential columns are eliminated first, so the echelon rows whose
/// leading column lies among the free variables cut out the projection.
pub fn pp_subspace(m: &RModule, phi: &PPFormula) -> Result<Subspace, PpError> {
    let d = m.dim();
    let f = m.algebra().field();
    let rows = blow_up_sparse(m, &phi.matrix)?;
    let free = phi.t * d;
    let exist = phi.vars() * d - free;
    let relabel = |c: usize| if c < free { c + exist } else { c - free };
    let mut e = Echelon::new(f, free + exist);
    for row in rows {
        let mut row: Vec<_> = row.into_iter().map(|(c, v)| (relabel(c), v)).collect();
        row.sort_by_key(|&(c, _)| c);
        if !row.is_empty() {
            e.insert_sparse(&row);
        }
    }
    let mut constraints = Echelon::new(f, free);
    for row in e.pivot_rows() {
        if row[0].0 >= exist {
            let shifted: Vec<_> = row.iter().map(|&(c, v)| (c - exist, v)).collect();
            constraints.insert_sparse(&shifted);
        }
    }
    let kernel = constraints.null_space();
    Ok(Subspace::span(free, kernel.iter().map(|v| v.as_slice()), f))
}

/// `D_M(φ) = dim M(φ) / dim M`, checked against `t + rk_M(B) - rk_M(A)`
/// where `B` is `A` with its first `t` columns zeroed.
pub fn pp_dim(m: &RModule, phi: &PPFormula) -> Result<Rational, PpError> {
    if m.dim() == 0 {
        return Err(PpError::ZeroModule);
    }
    let direct = rational::ratio(pp_subspace(m, phi)?.dim(), m.dim());
    let formula = pp_dim_by_rank(&Ranker::new(m), phi)?;
    if direct != formula {
        return Err(PpError::MethodDisagreement { direct: rational::render(&direct), formula: rational::render(&formula) });
    }
    Ok(direct)
}

/// The rank-only side of [`pp_dim`].
pub fn pp_dim_by_rank(ranker: &Ranker, phi: &PPFormula) -> Result<Rational, PpError> {
    let mut b = phi.matrix.clone();
    for i in 0..b.rows() {
        for j in 0..phi.t {
            b.set(i, j, AlgebraElement::zero());
        }
    }
    Ok(rational::int(phi.t) + ranker.rk(&b)? - ranker.rk(&phi.matrix)?)
}

/// `dim N(φ) - dim N(ψ)`, after checking `N(ψ) ⊆ N(φ)`.
pub fn pair_gap(n: &RModule, pair: &PPPair) -> Result<usize, PpError> {
    let a = pp_subspace(n, &pair.phi)?;
    let b = pp_subspace(n, &pair.psi)?;
    if !b.is_subspace_of(&a, n.algebra().field()) {
        return Err(PpError::NotContained);
    }
    Ok(a.dim() - b.dim())
}

/// `D_M(φ) - D_M(ψ)`.
pub fn pair_value(m: &RModule, pair: &PPPair) -> Result<Rational, PpError> {
    if m.dim() == 0 {
        return Err(PpError::ZeroModule);
    }
    Ok(rational::ratio(pair_gap(m, pair)?, m.dim()))
}

/// `w_Q(M) = (D_M(φ) - D_M(ψ)) / (D_Q(φ) - D_Q(ψ))`.
///
/// When `others` is given, every listed module must have a zero gap.
pub fn weight_from_isolating_pair(
    m: &RModule,
    q: &RModule,
    pair: &PPPair,
    others: Option<&[RModule]>,
) -> Result<Rational, PpError> {
    let denom = pair_value(q, pair)?;
    if denom == rational::zero() {
        return Err(PpError::NotIsolating("the pair vanishes on Q".into()));
    }
    if let Some(others) = others {
        for (i, p) in others.iter().enumerate() {
            if p.dim() > 0 && pair_gap(p, pair)? != 0 {
                return Err(PpError::NotIsolating(format!("component {i} has a nonzero gap")));
            }
        }
    }
    Ok(pair_value(m, pair)? / denom)
}

/// The pair counting right endvertices of `S`-shaped substrings.
///
/// Variables are ordered `n_k, n_0, …, n_{k-1}` so that `n_k` is free.
/// Equation `i` is `C_i n_i - n_{i-1} = 0` for a direct letter and
/// `α n_{i-1} - n_i = 0` for `C_i = α^{-1}`; `ψ` adds `n_0 = 0`.
pub fn string_counting_pair(s: &StringWord, r: &StringAlgebra) -> Result<PPPair, PpError> {
    s.validate(r)?;
    let k = s.len();
    if k == 0 {
        return Err(PpError::Module(ModuleError::InvalidString { condition: 0, position: 0 }));
    }
    let f = r.field();
    let col = |i: usize| if i == k { 0 } else { i + 1 };
    let minus_one = r.unit().neg(f);
    let mut phi = RMatrix::zeros(k, k + 1);
    for (i, l) in s.letters.iter().enumerate() {
        let i = i + 1;
        let a = r.arrow_element(l.arrow);
        if l.inverse {
            phi.set(i - 1, col(i - 1), a);
            phi.set(i - 1, col(i), minus_one.clone());
        } else {
            phi.set(i - 1, col(i), a);
            phi.set(i - 1, col(i - 1), minus_one.clone());
        }
    }
    let mut psi = RMatrix::zeros(k + 1, k + 1);
    for i in 0..k {
        for j in 0..=k {
            psi.set(i, j, phi.get(i, j).clone());
        }
    }
    psi.set(k, col(0), r.unit());
    PPPair::new(PPFormula::new(phi, 1)?, PPFormula::new(psi, 1)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct DimAuditReport {
    pub formulas: usize,
    pub checks: usize,
    pub violations: Vec<String>,
}

impl DimAuditReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that `D_M` behaves as a dimension function on the given formulas:
/// bottom and top values, two-method agreement, the modular law
/// `D(a∧b) + D(a+b) = D(a) + D(b)`, monotonicity, and that the formula
/// conjunction and sum realise subspace intersection and sum.
pub fn dimension_function_audit(m: &RModule, formulas: &[PPFormula], trials: usize, seed: u64) -> Result<DimAuditReport, PpError> {
    use rand::{Rng, SeedableRng};
    let r = m.algebra();
    let f = r.field();
    let mut violations = Vec::new();
    let mut checks = 0;
    let Some(first) = formulas.first() else {
        return Ok(DimAuditReport { formulas: 0, checks, violations });
    };
    let t = first.t;
    if let Some(bad) = formulas.iter().find(|p| p.t != t) {
        return Err(PpError::TypeMismatch(t, bad.t));
    }
    if pp_dim(m, &PPFormula::bottom(t, r))? != rational::zero() {
        violations.push("D(bottom) != 0".into());
    }
    if pp_dim(m, &PPFormula::top(t))? != rational::int(t) {
        violations.push(format!("D(top) != {t}"));
    }
    checks += 2;
    let spaces = formulas.iter().map(|p| pp_subspace(m, p)).collect::<Result<Vec<_>, _>>()?;
    for p in formulas {
        pp_dim(m, p)?;
        checks += 1;
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let i = rng.gen_range(0..formulas.len());
        let j = rng.gen_range(0..formulas.len());
        let (u, v) = (&spaces[i], &spaces[j]);
        let meet = u.intersect(v, f).map_err(|_| PpError::AlgebraMismatch)?;
        let join = u.sum(v, f).map_err(|_| PpError::AlgebraMismatch)?;
        checks += 4;
        if meet.dim() + join.dim() != u.dim() + v.dim() {
            violations.push(format!("modular law fails for formulas {i}, {j}"));
        }
        if u.is_subspace_of(v, f) && u.dim() > v.dim() {
            violations.push(format!("monotonicity fails for formulas {i}, {j}"));
        }
        if pp_subspace(m, &formulas[i].conjunction(&formulas[j])?)? != meet {
            violations.push(format!("conjunction of {i}, {j} is not the intersection"));
        }
        if pp_subspace(m, &formulas[i].sum(&formulas[j], r)?)? != join {
            violations.push(format!("sum of {i}, {j} is not the subspace sum"));
        }
    }
    Ok(DimAuditReport { formulas: formulas.len(), checks, violations })
}
