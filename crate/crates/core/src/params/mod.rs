//! Module parameters: generating and independence numbers, weights,
//! homomorphism numbers and matrix ranks, with the constant-size tester.

mod tester;

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{rmatrix_emit, rmatrix_parse, AlgebraError, RMatrix, StringAlgebra};
use crate::gf::{Echelon, Elem, FieldMatrix, FiniteField, Subspace};
use crate::limitlab::LimitError;
use crate::module::{hom_dim, parse_module_spec, Decomposition, Indecomposable, ModuleError, RModule};
use crate::pp::{weight_from_isolating_pair, PPPair, PpError};
use crate::rank::{RankError, Ranker};
use crate::rational::{self, Rational};

pub use tester::{build_tester, exact_estimates, run_tester, Tester, TesterAnswer, TesterConfig};

#[derive(Debug, Error)]
pub enum ParamError {
    #[error("weight needs a component decomposition or an isolating pair")]
    UnknownDecomposition,
    #[error("exhaustive search over {size} vectors exceeds the cap {cap}")]
    BudgetExceeded { size: usize, cap: usize },
    #[error("modules over different algebras")]
    AlgebraMismatch,
    #[error("no tile within κ = {kappa}; best radius {radius}")]
    NoTileWithinKappa { radius: String, kappa: String },
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("pp route {pp} disagrees with the component count {multiset}")]
    WeightDisagreement { multiset: String, pp: String },
    #[error("bad tester bundle: {0}")]
    Bundle(String),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Rank(#[from] RankError),
    #[error(transparent)]
    Limit(#[from] LimitError),
    #[error(transparent)]
    Pp(#[from] PpError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Which parameter to evaluate; indecomposables are canonical labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParameterId {
    G,
    I,
    Weight(Indecomposable),
    HomL(Indecomposable),
    HomR(Indecomposable),
    Rank(RMatrix),
}

fn parse_indecomposable(text: &str, r: &Arc<StringAlgebra>) -> Result<Indecomposable, ParamError> {
    let spec = parse_module_spec(text, r)?;
    let parts = spec.decomposition.parts();
    match (parts.len(), spec.raw.is_empty()) {
        (1, true) if *parts.values().next().expect("one part") == 1 => Ok(parts.keys().next().expect("one").clone()),
        _ => Err(ParamError::BadParameter(format!("expected one indecomposable, got {text:?}"))),
    }
}

impl ParameterId {
    /// `g`, `i`, `weight(string: x)`, `homL(...)`, `homR(...)`, `rank([[x]])`.
    pub fn render(&self, r: &StringAlgebra) -> String {
        match self {
            ParameterId::G => "g".into(),
            ParameterId::I => "i".into(),
            ParameterId::Weight(q) => format!("weight({})", q.render(r)),
            ParameterId::HomL(q) => format!("homL({})", q.render(r)),
            ParameterId::HomR(q) => format!("homR({})", q.render(r)),
            ParameterId::Rank(a) => format!("rank({})", rmatrix_emit(a, r)),
        }
    }

    pub fn parse(text: &str, r: &Arc<StringAlgebra>) -> Result<Self, ParamError> {
        let text = text.trim();
        match text {
            "g" => return Ok(ParameterId::G),
            "i" => return Ok(ParameterId::I),
            _ => {}
        }
        let (kind, rest) = text
            .split_once('(')
            .ok_or_else(|| ParamError::BadParameter(format!("unknown parameter {text:?}")))?;
        let inner = rest
            .strip_suffix(')')
            .ok_or_else(|| ParamError::BadParameter(format!("missing ')' in {text:?}")))?;
        match kind.trim() {
            "weight" => Ok(ParameterId::Weight(parse_indecomposable(inner, r)?)),
            "homL" => Ok(ParameterId::HomL(parse_indecomposable(inner, r)?)),
            "homR" => Ok(ParameterId::HomR(parse_indecomposable(inner, r)?)),
            "rank" => Ok(ParameterId::Rank(rmatrix_parse(inner, r)?)),
            other => Err(ParamError::BadParameter(format!("unknown parameter kind {other:?}"))),
        }
    }
}

fn share(n: usize, d: usize) -> Rational {
    if d == 0 {
        rational::zero()
    } else {
        rational::ratio(n, d)
    }
}

/// The left regular module `R`, with basis the path basis.
pub fn regular_module(r: &Arc<StringAlgebra>) -> RModule {
    let n = r.dim();
    let q = r.quiver();
    let vob = r.path_basis().iter().map(|p| p.target(q)).collect();
    let action = (0..q.num_arrows())
        .map(|a| {
            let ai = r.basis_index(&crate::algebra::Path { vertex: q.arrow(a).source, arrows: vec![a] }).expect("arrow");
            let mut m = FieldMatrix::zeros(n, n);
            for p in 0..n {
                if let Some(t) = r.basis_product(ai, p) {
                    m.set(t, p, 1);
                }
            }
            m
        })
        .collect();
    RModule::new(r.clone(), vob, action).expect("regular module")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenCount {
    pub count: usize,
    /// `dim e_a (M/JM)` for every vertex `a`.
    pub top: Vec<usize>,
    #[serde(serialize_with = "crate::rational::ser")]
    pub value: Rational,
}

/// `G(M) = max_a dim e_a(M/JM)`: generators of `M/JM` over `K^{Q₀}` lift
/// to generators of `M`.
pub fn gen_number(m: &RModule) -> GenCount {
    let r = m.algebra();
    let f = r.field();
    let rad = m.radical();
    let vob = m.vertex_of_basis();
    let top: Vec<usize> = (0..r.quiver().num_vertices())
        .map(|a| {
            let coords: Vec<usize> = (0..m.dim()).filter(|&i| vob[i] == a).collect();
            let mut e = Echelon::new(f, coords.len());
            for v in rad.basis() {
                let p: Vec<Elem> = coords.iter().map(|&i| v[i]).collect();
                e.insert_dense(&p);
            }
            coords.len() - e.rank()
        })
        .collect();
    let count = top.iter().copied().max().unwrap_or(0);
    GenCount { count, value: share(count, m.dim()), top }
}

/// Every vector of `K^n` in lexicographic order of codes, or `None` when
/// there are more than `cap`.
fn all_vectors(f: &FiniteField, n: usize, cap: usize) -> Option<Vec<Vec<Elem>>> {
    let q = f.order() as usize;
    let size = q.checked_pow(n as u32)?;
    if size > cap {
        return None;
    }
    Some(
        (0..size)
            .map(|mut k| {
                (0..n)
                    .map(|_| {
                        let c = (k % q) as Elem;
                        k /= q;
                        c
                    })
                    .collect()
            })
            .collect(),
    )
}

pub const DEFAULT_SEARCH_CAP: usize = 1 << 10;

/// Smallest number of generators by exhaustive search: the submodules
/// generated by `k + 1` elements are `U + Rv` for `U` generated by `k`.
pub fn gen_number_brute(m: &RModule, cap: usize) -> Result<usize, ParamError> {
    let f = m.algebra().field();
    let n = m.dim();
    let vectors = all_vectors(f, n, cap)
        .ok_or(ParamError::BudgetExceeded { size: (f.order() as usize).saturating_pow(n as u32), cap })?;
    let full = Subspace::full(n);
    let mut layer: HashSet<Subspace> = HashSet::from([Subspace::zero(n)]);
    for k in 0..=n {
        if layer.contains(&full) {
            return Ok(k);
        }
        let mut next = HashSet::new();
        for u in &layer {
            for v in &vectors {
                if u.contains(v, f) {
                    continue;
                }
                let mut gens = u.basis().to_vec();
                gens.push(v.clone());
                next.insert(m.generated_submodule(&gens));
            }
        }
        layer = next;
    }
    unreachable!("the basis generates")
}

/// `Rv` as the span of `b v` over the basis paths.
fn cyclic(actions: &[crate::gf::SparseMatrix], v: &[Elem], f: &FiniteField) -> Vec<Vec<Elem>> {
    actions.iter().map(|a| a.mul_vec(v, f)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IndepMode {
    Exact { cap: usize },
    Randomized { trials: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndepCount {
    /// Exact value, or a certified lower bound.
    pub count: usize,
    /// `⌊dim M / dim R⌋`.
    pub upper: usize,
    pub exact: bool,
    /// Elements `m_1..m_count` with `R^count → M` injective.
    pub witness: Vec<Vec<Elem>>,
    #[serde(serialize_with = "crate::rational::ser")]
    pub value: Rational,
}

/// Whether `(r_i) ↦ Σ r_i m_i` is injective on `R^k`.
pub fn is_independent(m: &RModule, elements: &[Vec<Elem>]) -> bool {
    let f = m.algebra().field();
    let actions = m.basis_actions();
    let mut e = Echelon::new(f, m.dim());
    let mut rank = 0;
    for v in elements {
        if v.len() != m.dim() {
            return false;
        }
        for w in cyclic(&actions, v, f) {
            rank += usize::from(e.insert_dense(&w));
        }
    }
    rank == elements.len() * m.algebra().dim()
}

/// `I(M)`, the largest `k` with an injective `R^k → M`. Exact mode explores
/// the free submodules `Rm_1 ⊕ … ⊕ Rm_k` layer by layer; randomized mode
/// grows random independent systems greedily and keeps the longest.
pub fn indep_number(m: &RModule, mode: &IndepMode) -> Result<IndepCount, ParamError> {
    let r = m.algebra();
    let f = r.field();
    let n = m.dim();
    let rd = r.dim();
    let upper = n / rd;
    let actions = m.basis_actions();
    let grow = |u: &Subspace, v: &[Elem]| -> Option<Subspace> {
        let mut gens = u.basis().to_vec();
        gens.extend(cyclic(&actions, v, f));
        let w = Subspace::span(n, gens.iter().map(|x| x.as_slice()), f);
        (w.dim() == u.dim() + rd).then_some(w)
    };
    let (count, exact, witness) = match mode {
        IndepMode::Exact { cap } => {
            let vectors = all_vectors(f, n, *cap)
                .ok_or(ParamError::BudgetExceeded { size: (f.order() as usize).saturating_pow(n as u32), cap: *cap })?;
            let mut layer: HashMap<Subspace, Vec<Vec<Elem>>> = HashMap::from([(Subspace::zero(n), Vec::new())]);
            let mut k = 0;
            while k < upper {
                let mut next: HashMap<Subspace, Vec<Vec<Elem>>> = HashMap::new();
                let mut keys: Vec<&Subspace> = layer.keys().collect();
                keys.sort();
                for u in keys {
                    for v in &vectors {
                        if let Some(w) = grow(u, v) {
                            next.entry(w).or_insert_with(|| {
                                let mut wit = layer[u].clone();
                                wit.push(v.clone());
                                wit
                            });
                        }
                    }
                }
                if next.is_empty() {
                    break;
                }
                layer = next;
                k += 1;
            }
            let witness = layer.into_iter().min().map(|(_, w)| w).unwrap_or_default();
            (k, true, witness)
        }
        IndepMode::Randomized { trials, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut best: Vec<Vec<Elem>> = Vec::new();
            for _ in 0..*trials {
                let mut u = Subspace::zero(n);
                let mut wit = Vec::new();
                let mut misses = 0;
                while wit.len() < upper && misses < 4 * n.max(1) {
                    let v: Vec<Elem> = (0..n).map(|_| rng.gen_range(0..f.order())).collect();
                    match grow(&u, &v) {
                        Some(w) => {
                            u = w;
                            wit.push(v);
                        }
                        None => misses += 1,
                    }
                }
                if wit.len() > best.len() {
                    best = wit;
                }
                if best.len() == upper {
                    break;
                }
            }
            (best.len(), upper == best.len(), best)
        }
    };
    debug_assert!(is_independent(m, &witness));
    Ok(IndepCount { count, upper, exact, witness, value: share(count, n) })
}

/// `w_Q(M) = n_Q dim Q / dim M` from the component multiset.
pub fn weight(parts: &Decomposition, q: &Indecomposable) -> Rational {
    share(parts.multiplicity(q) * q.dim(), parts.dim())
}

/// The multiset weight, cross-checked against the pp route when a pair is
/// supplied; the two must agree exactly.
pub fn weight_checked(parts: &Decomposition, q: &Indecomposable, pair: Option<&PPPair>) -> Result<Rational, ParamError> {
    let w = weight(parts, q);
    if let Some(pair) = pair {
        let r = parts.algebra();
        let m = parts.to_module()?;
        let qm = q.to_module(r)?;
        let others: Vec<RModule> =
            parts.parts().keys().filter(|k| *k != q).map(|k| k.to_module(r)).collect::<Result<_, _>>()?;
        let pp = weight_from_isolating_pair(&m, &qm, pair, Some(&others))?;
        if pp != w {
            return Err(ParamError::WeightDisagreement { multiset: rational::render(&w), pp: rational::render(&pp) });
        }
    }
    Ok(w)
}

/// `L_Q(M) = dim Hom(Q, M) / dim M`.
pub fn hom_param_l(q: &RModule, m: &RModule) -> Result<Rational, ParamError> {
    hom_dim(q, m).map(|h| share(h, m.dim())).map_err(hom_err)
}

/// `R_Q(M) = dim Hom(M, Q) / dim M`; stable when `Q` is injective.
pub fn hom_param_r(q: &RModule, m: &RModule) -> Result<Rational, ParamError> {
    hom_dim(m, q).map(|h| share(h, m.dim())).map_err(hom_err)
}

fn hom_err(e: ModuleError) -> ParamError {
    match e {
        ModuleError::AlgebraMismatch => ParamError::AlgebraMismatch,
        e => ParamError::Module(e),
    }
}

/// `p(M)`. Weights need `parts`, a decomposition of `M`; `i` is computed
/// exactly under [`DEFAULT_SEARCH_CAP`].
pub fn evaluate(p: &ParameterId, m: &RModule, parts: Option<&Decomposition>) -> Result<Rational, ParamError> {
    let r = m.algebra();
    match p {
        ParameterId::G => Ok(gen_number(m).value),
        ParameterId::I => Ok(indep_number(m, &IndepMode::Exact { cap: DEFAULT_SEARCH_CAP })?.value),
        ParameterId::Weight(q) => match parts {
            Some(d) if d.dim() == m.dim() => Ok(weight(d, q)),
            _ => Err(ParamError::UnknownDecomposition),
        },
        ParameterId::HomL(q) => hom_param_l(&q.to_module(r)?, m),
        ParameterId::HomR(q) => hom_param_r(&q.to_module(r)?, m),
        ParameterId::Rank(a) => Ok(Ranker::new(m).rk(a)?),
    }
}

/// `p` on a decomposed module.
pub fn evaluate_decomposition(p: &ParameterId, d: &Decomposition) -> Result<Rational, ParamError> {
    evaluate(p, &d.to_module()?, Some(d))
}

/// Largest submodule inside `ker F`: `{v : F b v = 0 for every basis path b}`.
pub fn submodule_core(m: &RModule, functionals: &[Vec<Elem>]) -> Subspace {
    let f = m.algebra().field();
    let n = m.dim();
    let mut e = Echelon::new(f, n);
    for a in m.basis_actions() {
        let at = a.to_dense().transpose();
        for phi in functionals {
            e.insert_dense(&at.mul_vec(phi, f));
        }
    }
    let kernel = e.null_space();
    Subspace::span(n, kernel.iter().map(|v| v.as_slice()), f)
}

/// A seeded random submodule of codimension at most `⌊δ dim M⌋`.
///
/// Functionals are drawn one at a time and kept while the core stays within
/// budget. Half the draws vanish on `JM` and live on a single vertex, so
/// their cores are maximal submodules and small budgets still trim.
pub fn random_trim(m: &RModule, delta: &Rational, rng: &mut impl Rng) -> Subspace {
    use num_traits::ToPrimitive;
    let f = m.algebra().field();
    let n = m.dim();
    let budget = (rational::int(n) * delta).floor().to_integer().to_usize().unwrap_or(0);
    let mut kept: Vec<Vec<Elem>> = Vec::new();
    let mut core = Subspace::full(n);
    if budget == 0 || n == 0 {
        return core;
    }
    let top = top_functionals(m);
    for _ in 0..4 * budget + 4 {
        let phi = if !top.is_empty() && rng.gen_bool(0.5) {
            let basis = &top[rng.gen_range(0..top.len())];
            let mut phi = vec![0; n];
            for b in basis {
                let c = rng.gen_range(0..f.order());
                for (x, &y) in phi.iter_mut().zip(b) {
                    *x = f.add(*x, f.mul(c, y));
                }
            }
            phi
        } else {
            (0..n).map(|_| rng.gen_range(0..f.order())).collect()
        };
        if phi.iter().all(|&x| x == 0) {
            continue;
        }
        kept.push(phi);
        let next = submodule_core(m, &kept);
        if n - next.dim() <= budget {
            core = next;
            if n - core.dim() == budget {
                break;
            }
        } else {
            kept.pop();
        }
    }
    core
}

/// Per vertex, a basis of the functionals vanishing on `JM` and on every
/// other vertex.
fn top_functionals(m: &RModule) -> Vec<Vec<Vec<Elem>>> {
    let f = m.algebra().field();
    let n = m.dim();
    let rad = m.radical();
    let vob = m.vertex_of_basis();
    (0..m.algebra().quiver().num_vertices())
        .filter_map(|a| {
            let mut e = Echelon::new(f, n);
            for r in rad.basis() {
                e.insert_dense(r);
            }
            for (i, &v) in vob.iter().enumerate() {
                if v != a {
                    e.insert_sparse(&[(i, 1)]);
                }
            }
            let ns = e.null_space();
            (!ns.is_empty()).then_some(ns)
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub parameter: String,
    #[serde(serialize_with = "crate::rational::ser")]
    pub value: Rational,
    /// `(codimension, |p(M) - p(N)|)` per trim.
    pub trims: Vec<(usize, String)>,
    #[serde(serialize_with = "crate::rational::ser")]
    pub max_trim_gap: Rational,
    /// `p(M^k)` for `k = 1..`.
    #[serde(serialize_with = "crate::rational::ser_vec")]
    pub powers: Vec<Rational>,
    /// `max_{j,l ≥ k} |p(M^j) - p(M^l)|`.
    #[serde(serialize_with = "crate::rational::ser_vec")]
    pub cauchy: Vec<Rational>,
}

impl StabilityReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("kind,index,value\n");
        for (i, (c, gap)) in self.trims.iter().enumerate() {
            out.push_str(&format!("trim,{i},{gap} (codim {c})\n"));
        }
        for (k, v) in self.powers.iter().enumerate() {
            out.push_str(&format!("power,{},{}\n", k + 1, rational::render(v)));
        }
        out
    }
}

/// Probes both stability conditions on one module: random trims of
/// codimension share at most `δ`, and the powers `M^k` for `k ≤ max_power`.
/// Nothing is judged; the report only tabulates.
pub fn stability_probe(
    p: &ParameterId,
    m: &RModule,
    parts: Option<&Decomposition>,
    delta: &Rational,
    trials: usize,
    max_power: usize,
    seed: u64,
) -> Result<StabilityReport, ParamError> {
    let r = m.algebra();
    let value = evaluate(p, m, parts)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trims = Vec::new();
    let mut max_trim_gap = rational::zero();
    for _ in 0..trials {
        let n = random_trim(m, delta, &mut rng);
        let sub = m.restrict(&n)?;
        let pn = match p {
            // N is not decomposed; weights are only probed through powers.
            ParameterId::Weight(_) => continue,
            _ => evaluate(p, &sub, None)?,
        };
        let gap = rational::abs_diff(&value, &pn);
        max_trim_gap = max_trim_gap.max(gap.clone());
        trims.push((m.dim() - n.dim(), rational::render(&gap)));
    }
    let mut powers = Vec::new();
    for k in 1..=max_power {
        let mk = m.power(k);
        let pk = parts.map(|d| {
            let mut e = Decomposition::new(r.clone());
            for (ind, &c) in d.parts() {
                e.add(ind.clone(), c * k);
            }
            e
        });
        powers.push(evaluate(p, &mk, pk.as_ref())?);
    }
    let cauchy = (0..powers.len())
        .map(|k| {
            let tail = &powers[k..];
            let hi = tail.iter().max().expect("nonempty");
            let lo = tail.iter().min().expect("nonempty");
            hi - lo
        })
        .collect();
    Ok(StabilityReport { parameter: p.render(r), value, trims, max_trim_gap, powers, cauchy })
}
