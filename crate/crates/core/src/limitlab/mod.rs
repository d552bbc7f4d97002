//! Hyperfinite tilings, tile catalogs and ε-isomorphism certificates.

mod catalog;
mod invariant;
mod iso;

pub use catalog::{build_tile_catalog, epsilon_tiles, split_band_string, CatalogCaps, TileCatalog, TilingMatch};
pub use invariant::find_invariant_subspace;
pub use iso::{
    band_to_string_approx, epsilon_isomorphism, tolerance_schedule, verify_band_approx, verify_certificate, BandApprox,
    IsoCertificate, IsoOutcome, MatchedSegment, Segment,
};

use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::StringAlgebra;
use crate::gf::{Echelon, Elem, FieldPolynomial, FiniteField, SparseMatrix, SparseRow};
use crate::module::{band_module, BandData, Decomposition, Indecomposable, ModuleError, StringWord};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LimitError {
    #[error("epsilon must lie strictly between 0 and 1")]
    BadEpsilon,
    #[error("polynomial is not monic irreducible")]
    ReducibleF,
    #[error("operator {operator} expands V beyond its budget")]
    BudgetExceeded { operator: usize },
    #[error("raw modules have no component labels")]
    UnsupportedRawModule,
    #[error("catalog would exceed {limit} tiles")]
    ExplosionGuard { limit: usize },
    #[error("band of dimension {dim} is below the threshold {threshold}")]
    TooSmall { dim: usize, threshold: usize },
    #[error(transparent)]
    Module(#[from] ModuleError),
}

/// `m = ⌈2/ε⌉ + 2`, `k = ⌈1/ε⌉`, `m_ε = ⌈m/ε⌉`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TilingConstants {
    pub m: usize,
    pub k: usize,
    pub m_eps: usize,
}

fn ceil(r: &Rational) -> usize {
    r.ceil().to_integer().to_usize().expect("small constant")
}

impl TilingConstants {
    pub fn for_epsilon(eps: &Rational) -> Result<Self, LimitError> {
        if *eps <= rational::zero() || *eps >= rational::int(1) {
            return Err(LimitError::BadEpsilon);
        }
        let m = ceil(&(rational::int(2) / eps)) + 2;
        let k = ceil(&(rational::int(1) / eps));
        let m_eps = ceil(&(rational::int(m) / eps));
        Ok(TilingConstants { m, k, m_eps })
    }
}

/// A named subspace given by sparse basis vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Piece {
    pub label: String,
    pub basis: Vec<SparseRow>,
}

impl Piece {
    fn units(label: String, indices: impl IntoIterator<Item = usize>) -> Self {
        Piece { label, basis: indices.into_iter().map(|i| vec![(i, 1)]).collect() }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Tiling {
    pub regime: String,
    pub ambient: usize,
    #[serde(serialize_with = "crate::rational::ser")]
    pub epsilon: Rational,
    pub constants: TilingConstants,
    /// Upper bound `L_ε` on piece dimensions.
    pub bound: usize,
    #[serde(serialize_with = "crate::rational::ser")]
    pub coverage: Rational,
    /// Largest `dim(N + Σ T N) / dim N` over the pieces.
    #[serde(serialize_with = "crate::rational::ser")]
    pub expansion: Rational,
    pub pieces: Vec<Piece>,
}

/// Operators as column lists, for images of sparse vectors.
struct Columns(Vec<Vec<(usize, Elem)>>);

impl Columns {
    fn of(op: &SparseMatrix) -> Self {
        let mut cols = vec![Vec::new(); op.cols()];
        for i in 0..op.rows() {
            for &(j, v) in op.row(i) {
                cols[j].push((i, v));
            }
        }
        Columns(cols)
    }

    fn apply(&self, v: &[(usize, Elem)], f: &FiniteField, n: usize) -> SparseRow {
        let mut acc: std::collections::BTreeMap<usize, Elem> = std::collections::BTreeMap::new();
        for &(j, c) in v {
            for &(i, a) in &self.0[j] {
                let e = acc.entry(i).or_insert(0);
                *e = f.mul_add(c, a, *e);
            }
        }
        debug_assert!(acc.keys().all(|&i| i < n));
        acc.into_iter().filter(|&(_, v)| v != 0).collect()
    }
}

fn sorted(mut v: SparseRow) -> SparseRow {
    v.sort_by_key(|&(c, _)| c);
    v
}

/// `(dim N + Σ_T T N, dim N)`.
fn expansion_of(piece: &Piece, ops: &[Columns], ambient: usize, f: &FiniteField) -> (usize, usize) {
    let mut e = Echelon::new(f, ambient);
    for v in &piece.basis {
        e.insert_sparse(&sorted(v.clone()));
    }
    let own = e.rank();
    for op in ops {
        for v in &piece.basis {
            let w = op.apply(v, f, ambient);
            if !w.is_empty() {
                e.insert_sparse(&w);
            }
        }
    }
    (e.rank(), own)
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    regime: &str,
    ambient: usize,
    eps: &Rational,
    constants: TilingConstants,
    bound: usize,
    pieces: Vec<Piece>,
    ops: &[SparseMatrix],
    f: &FiniteField,
) -> Tiling {
    let cols: Vec<Columns> = ops.iter().map(Columns::of).collect();
    let covered: usize = pieces.iter().map(Piece::dim).sum();
    let mut expansion = rational::zero();
    for p in &pieces {
        let (big, own) = expansion_of(p, &cols, ambient, f);
        if own > 0 {
            expansion = expansion.max(rational::ratio(big, own));
        }
    }
    let coverage = if ambient == 0 { rational::int(1) } else { rational::ratio(covered, ambient) };
    Tiling { regime: regime.into(), ambient, epsilon: eps.clone(), constants, bound, coverage, expansion, pieces }
}

/// Outcome of [`verify_tiling`].
#[derive(Debug, Clone, Serialize)]
pub struct TilingCheck {
    pub independent: bool,
    #[serde(serialize_with = "crate::rational::ser")]
    pub coverage: Rational,
    #[serde(serialize_with = "crate::rational::ser")]
    pub expansion: Rational,
    pub max_piece_dim: usize,
    pub failures: Vec<String>,
}

impl TilingCheck {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Recomputes every tiling invariant from the raw piece bases and the
/// operators: independence, coverage `≥ 1-ε`, expansion `≤ 1+ε`, piece
/// dimensions `≤ L`, and agreement with the recorded figures.
pub fn verify_tiling(t: &Tiling, ops: &[SparseMatrix], f: &FiniteField) -> TilingCheck {
    let mut failures = Vec::new();
    let mut all = Echelon::new(f, t.ambient);
    let mut total = 0;
    for p in &t.pieces {
        for v in &p.basis {
            if v.iter().any(|&(c, x)| c >= t.ambient || x >= f.order()) {
                failures.push(format!("piece {} has an entry outside the ambient space", p.label));
                return TilingCheck {
                    independent: false,
                    coverage: rational::zero(),
                    expansion: rational::zero(),
                    max_piece_dim: 0,
                    failures,
                };
            }
            all.insert_sparse(&sorted(v.clone()));
            total += 1;
        }
    }
    let independent = all.rank() == total;
    if !independent {
        failures.push("pieces are not independent".into());
    }
    let coverage = if t.ambient == 0 { rational::int(1) } else { rational::ratio(total, t.ambient) };
    let one = rational::int(1);
    if coverage < &one - &t.epsilon {
        failures.push(format!("coverage {} below 1 - ε", rational::render(&coverage)));
    }
    let cols: Vec<Columns> = ops.iter().map(Columns::of).collect();
    let mut expansion = rational::zero();
    let mut max_piece_dim = 0;
    for p in &t.pieces {
        let (big, own) = expansion_of(p, &cols, t.ambient, f);
        max_piece_dim = max_piece_dim.max(own);
        if own == 0 {
            failures.push(format!("piece {} is empty", p.label));
            continue;
        }
        let x = rational::ratio(big, own);
        if x > &one + &t.epsilon {
            failures.push(format!("piece {} expands by {}", p.label, rational::render(&x)));
        }
        expansion = expansion.max(x);
    }
    if max_piece_dim > t.bound {
        failures.push(format!("piece of dimension {max_piece_dim} exceeds L = {}", t.bound));
    }
    if coverage != t.coverage || expansion != t.expansion {
        failures.push("recorded coverage or expansion does not match".into());
    }
    TilingCheck { independent, coverage, expansion, max_piece_dim, failures }
}

/// Consecutive blocks of `m` basis vectors of `M(S)`, or the whole module
/// when it has at most `m_ε` basis vectors.
pub fn tile_string_module(s: &StringWord, eps: &Rational, r: &std::sync::Arc<StringAlgebra>) -> Result<(Tiling, Vec<SparseMatrix>), LimitError> {
    let c = TilingConstants::for_epsilon(eps)?;
    let module = crate::module::string_module(s, r)?;
    let ops = module.algebra().quiver().arrows().iter().enumerate().map(|(a, _)| module.sparse_action(a).clone()).collect::<Vec<_>>();
    let n = module.dim();
    let (regime, pieces) = if n <= c.m_eps {
        ("single", vec![Piece::units(format!("z[0..{}]", n - 1), 0..n)])
    } else {
        let t = n / c.m;
        ("blocks", (0..t).map(|i| Piece::units(format!("z[{}..{}]", i * c.m, (i + 1) * c.m - 1), i * c.m..(i + 1) * c.m)).collect())
    };
    Ok((assemble(regime, n, eps, c, c.m_eps.max(c.m), pieces, &ops, r.field()), ops))
}

/// Band tiling in three regimes: blocks of `m` slices away from the twist
/// when the word is longer than `m_ε`; blocks `Z_q` of `m` consecutive powers
/// of `x` in every slice when `V` is large; otherwise one piece.
/// `L_ε = max(m·m_ε, m_ε²)`.
pub fn tile_band_module(b: &BandData, eps: &Rational, r: &std::sync::Arc<StringAlgebra>) -> Result<(Tiling, Vec<SparseMatrix>), LimitError> {
    let c = TilingConstants::for_epsilon(eps)?;
    let module = band_module(b, r)?;
    let ops = (0..r.quiver().num_arrows()).map(|a| module.sparse_action(a).clone()).collect::<Vec<_>>();
    let n = b.word.len();
    let d = b.slice_dim();
    let idx = |slice: usize, j: usize| (slice - 1) * d + j;
    let bound = (c.m * c.m_eps).max(c.m_eps * c.m_eps);
    let (regime, pieces) = if n > c.m_eps {
        let t = (n - 1) / c.m;
        let mut pieces = Vec::new();
        for i in 0..t {
            for j in 0..d {
                let slices = i * c.m + 2..=(i + 1) * c.m + 1;
                pieces.push(Piece::units(format!("W[{i}][{j}]"), slices.map(|s| idx(s, j))));
            }
        }
        ("long-word", pieces)
    } else if d > c.m_eps {
        let t = d / c.m;
        let pieces = (0..t)
            .map(|q| {
                let cells = (1..=n).flat_map(|s| (q * c.m..(q + 1) * c.m).map(move |j| (s, j)));
                Piece::units(format!("Z[{q}]"), cells.map(|(s, j)| idx(s, j)))
            })
            .collect();
        ("large-slice", pieces)
    } else {
        ("single", vec![Piece::units("all".into(), 0..n * d)])
    };
    Ok((assemble(regime, n * d, eps, c, bound, pieces, &ops, r.field()), ops))
}

/// Tiling of `K[X]/f^n` in the basis `t^i`, with `X` acting by the companion
/// matrix of `f^n`. Returns the tiling and that matrix.
pub fn tile_jordan(poly: &FieldPolynomial, n: u32, eps: &Rational, f: &FiniteField) -> Result<(Tiling, SparseMatrix), LimitError> {
    if n == 0 || !poly.is_irreducible(f).unwrap_or(false) {
        return Err(LimitError::ReducibleF);
    }
    let c = TilingConstants::for_epsilon(eps)?;
    let big = poly.pow(n, f);
    let dim = big.degree().unwrap_or(0);
    let op = SparseMatrix::from_dense(&big.companion(f));
    let k = c.k;
    let (regime, pieces) = if dim <= 2 * k * k {
        ("single", vec![Piece::units("all".into(), 0..dim)])
    } else {
        ("blocks", (0..dim / k).map(|i| Piece::units(format!("N[{}]", i + 1), i * k..(i + 1) * k)).collect())
    };
    let t = assemble(regime, dim, eps, c, 2 * k * k, pieces, std::slice::from_ref(&op), f);
    Ok((t, op))
}

/// Tiling of a sum of string and band modules, summand by summand in the
/// order of [`Decomposition::to_module`].
pub fn tile_decomposition(d: &Decomposition, eps: &Rational) -> Result<(Tiling, Vec<SparseMatrix>), LimitError> {
    let c = TilingConstants::for_epsilon(eps)?;
    let r = d.algebra();
    let mut pieces = Vec::new();
    let mut offset = 0;
    let mut bound = 0;
    let mut cache: std::collections::HashMap<&Indecomposable, Tiling> = std::collections::HashMap::new();
    for (idx, ind) in d.summands().enumerate() {
        if !cache.contains_key(ind) {
            let t = match ind {
                Indecomposable::String(w) => tile_string_module(w, eps, r)?.0,
                Indecomposable::Band(b) => tile_band_module(b, eps, r)?.0,
            };
            cache.insert(ind, t);
        }
        let t = &cache[ind];
        bound = bound.max(t.bound);
        for p in &t.pieces {
            pieces.push(Piece {
                label: format!("{idx}:{}", p.label),
                basis: p.basis.iter().map(|v| v.iter().map(|&(i, x)| (i + offset, x)).collect()).collect(),
            });
        }
        offset += t.ambient;
    }
    let module = d.to_module()?;
    let ops: Vec<SparseMatrix> = (0..r.quiver().num_arrows()).map(|a| module.sparse_action(a).clone()).collect();
    Ok((assemble("sum", offset, eps, c, bound, pieces, &ops, r.field()), ops))
}
