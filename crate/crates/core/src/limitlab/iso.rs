use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use serde::Serialize;

use super::LimitError;
use crate::algebra::StringAlgebra;
use crate::gf::Subspace;
use crate::module::{band_module, ModuleError, string_module, BandData, Letter, RModule, StringWord};
use crate::rational::{self, Rational};
use crate::strings::StringGraph;

/// Vertices `start..=end` of one component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Segment {
    pub component: usize,
    pub start: usize,
    pub end: usize,
}

impl Segment {
    fn len(&self) -> usize {
        self.end - self.start + 1
    }

    fn word(&self, g: &StringGraph, r: &StringAlgebra) -> Option<StringWord> {
        let w = g.components().get(self.component)?;
        if self.start > self.end || self.end > w.len() {
            return None;
        }
        Some(w.subword(self.start, self.end, r).canonical(r))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchedSegment {
    pub word: String,
    pub left: Segment,
    pub right: Segment,
}

/// Isomorphic induced subgraphs `J₁ ⊆ G₁`, `J₂ ⊆ G₂`, as matched segments.
///
/// Segments on one side are pairwise disjoint and never adjacent, so the
/// union of the segments is an induced subgraph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsoCertificate {
    pub pairs: Vec<MatchedSegment>,
    pub vertices_left: usize,
    pub vertices_right: usize,
    pub covered: usize,
    #[serde(serialize_with = "crate::rational::ser")]
    pub epsilon_left: Rational,
    #[serde(serialize_with = "crate::rational::ser")]
    pub epsilon_right: Rational,
    /// Same fractions counting only vertices whose `q`-neighbourhood lies in
    /// their segment; these bound the module-level closeness.
    #[serde(serialize_with = "crate::rational::ser")]
    pub module_epsilon_left: Rational,
    #[serde(serialize_with = "crate::rational::ser")]
    pub module_epsilon_right: Rational,
    /// Vertex count of the blocks used in the cutting phase, if any.
    pub block: Option<usize>,
}

impl IsoCertificate {
    pub fn epsilon(&self) -> Rational {
        self.epsilon_left.clone().max(self.epsilon_right.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum IsoOutcome {
    Certificate(IsoCertificate),
    NoCertificate {
        #[serde(serialize_with = "crate::rational::ser")]
        best_left: Rational,
        #[serde(serialize_with = "crate::rational::ser")]
        best_right: Rational,
        account: Vec<String>,
    },
}

/// `ε = 2δ`: perturbing at most a `δ` share of the dimension of `M` leaves
/// at most `δ/(1-δ) ≤ 2δ` of `N` unmatched for `δ ≤ 1/2`.
pub fn tolerance_schedule(delta: &Rational) -> Rational {
    (rational::int(2) * delta).min(rational::int(1))
}

fn inside_count(seg: &Segment, g: &StringGraph, q: usize) -> usize {
    let len = g.components()[seg.component].len();
    let reach = q.saturating_sub(1);
    (seg.start..=seg.end)
        .filter(|&i| i.saturating_sub(reach) >= seg.start && (i + reach).min(len) <= seg.end)
        .count()
}

/// Blocks of `b` vertices with single-vertex gaps, plus the tail.
fn cut(component: usize, len: usize, b: usize) -> Vec<Segment> {
    let mut out = Vec::new();
    let mut start = 0;
    while start <= len {
        let end = (start + b - 1).min(len);
        out.push(Segment { component, start, end });
        start = end + 2;
    }
    out
}

struct Attempt {
    pairs: Vec<MatchedSegment>,
    covered: usize,
}

fn match_blocks(
    left: &[usize],
    right: &[usize],
    g: &StringGraph,
    h: &StringGraph,
    b: usize,
    r: &StringAlgebra,
) -> Attempt {
    let mut pool: BTreeMap<StringWord, (Vec<Segment>, Vec<Segment>)> = BTreeMap::new();
    for &c in left {
        for s in cut(c, g.components()[c].len(), b) {
            pool.entry(s.word(g, r).expect("in range")).or_default().0.push(s);
        }
    }
    for &c in right {
        for s in cut(c, h.components()[c].len(), b) {
            pool.entry(s.word(h, r).expect("in range")).or_default().1.push(s);
        }
    }
    let mut pairs = Vec::new();
    let mut covered = 0;
    for (w, (ls, rs)) in pool {
        for (a, c) in ls.into_iter().zip(rs) {
            covered += a.len();
            pairs.push(MatchedSegment { word: w.render(r), left: a, right: c });
        }
    }
    Attempt { pairs, covered }
}

/// Places whole `pieces` components as segments of `hosts` components,
/// keeping segments inside a host disjoint and non-adjacent, and maximising
/// the covered vertices by a bounded search over placements (longest piece
/// first). Returns `(piece, host segment)` pairs.
fn embed(
    pieces: &[usize],
    hosts: &[usize],
    pg: &StringGraph,
    hg: &StringGraph,
    r: &StringAlgebra,
) -> Vec<(Segment, Segment)> {
    let mut order: Vec<usize> = pieces.to_vec();
    order.sort_by_key(|&c| std::cmp::Reverse(pg.components()[c].len()));
    // Every place each piece fits, ignoring the other pieces.
    let spots: Vec<Vec<Segment>> = order
        .iter()
        .map(|&c| {
            let k = pg.components()[c].len();
            let want = Segment { component: c, start: 0, end: k }.word(pg, r).expect("in range");
            hosts
                .iter()
                .flat_map(|&hc| {
                    let len = hg.components()[hc].len();
                    (0..(len + 1).saturating_sub(k)).map(move |a| Segment { component: hc, start: a, end: a + k })
                })
                .filter(|seg| seg.word(hg, r).as_ref() == Some(&want))
                .collect()
        })
        .collect();
    let sizes: Vec<usize> = order.iter().map(|&c| pg.components()[c].len() + 1).collect();
    let mut suffix = vec![0; sizes.len() + 1];
    for i in (0..sizes.len()).rev() {
        suffix[i] = suffix[i + 1] + sizes[i];
    }
    let mut search = Packing { spots: &spots, sizes: &sizes, suffix: &suffix, chosen: Vec::new(), best: (0, Vec::new()), nodes: 0 };
    search.run(0, 0);
    search
        .best
        .1
        .into_iter()
        .map(|(i, seg)| (Segment { component: order[i], start: 0, end: pg.components()[order[i]].len() }, seg))
        .collect()
}

const PACKING_NODES: usize = 50_000;

/// Depth-first placement of pieces into non-adjacent host segments, each
/// piece placed first-fit before alternatives and skips are tried.
struct Packing<'a> {
    spots: &'a [Vec<Segment>],
    sizes: &'a [usize],
    suffix: &'a [usize],
    chosen: Vec<(usize, Segment)>,
    best: (usize, Vec<(usize, Segment)>),
    nodes: usize,
}

impl Packing<'_> {
    fn run(&mut self, i: usize, covered: usize) {
        if covered > self.best.0 {
            self.best = (covered, self.chosen.clone());
        }
        if i == self.spots.len() || covered + self.suffix[i] <= self.best.0 || self.nodes >= PACKING_NODES {
            return;
        }
        self.nodes += 1;
        for seg in &self.spots[i] {
            let free = self
                .chosen
                .iter()
                .all(|(_, t)| t.component != seg.component || seg.end + 1 < t.start || seg.start > t.end + 1);
            if free {
                self.chosen.push((i, *seg));
                self.run(i + 1, covered + self.sizes[i]);
                self.chosen.pop();
            }
        }
        self.run(i + 1, covered);
    }
}

/// Best block cutting over every block length up to the longest component.
fn best_blocks(left: &[usize], right: &[usize], g: &StringGraph, h: &StringGraph, r: &StringAlgebra) -> Option<(usize, Attempt)> {
    let longest = left.iter().map(|&c| g.components()[c].len()).chain(right.iter().map(|&c| h.components()[c].len())).max()?;
    let mut best: Option<(usize, Attempt)> = None;
    for b in 1..=longest + 1 {
        let a = match_blocks(left, right, g, h, b, r);
        if best.as_ref().is_none_or(|(_, x)| a.covered > x.covered) {
            best = Some((b, a));
        }
    }
    best
}

/// Searches for an ε-isomorphism certificate between two string graphs.
///
/// Equal components are matched whole. The leftovers are then handled two
/// ways and the better one is kept: either whole leftover components of one
/// side are embedded as segments of leftover components of the other (in
/// both directions) before the untouched rest is cut into blocks, or
/// everything left is cut into blocks directly. Blocks are matched by
/// canonical word, trying every block length up to the longest leftover
/// component. A certificate is issued when the unmatched share is at most
/// `ε` on both sides, and it is checked by [`verify_certificate`] before it
/// is returned.
pub fn epsilon_isomorphism(g: &StringGraph, h: &StringGraph, eps: &Rational, r: &StringAlgebra) -> IsoOutcome {
    let (vg, vh) = (g.num_vertices(), h.num_vertices());
    let mut account = Vec::new();
    let mut by_word: BTreeMap<&StringWord, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for (i, w) in g.components().iter().enumerate() {
        by_word.entry(w).or_default().0.push(i);
    }
    for (i, w) in h.components().iter().enumerate() {
        by_word.entry(w).or_default().1.push(i);
    }
    let mut pairs = Vec::new();
    let mut covered = 0;
    let (mut rest_g, mut rest_h) = (Vec::new(), Vec::new());
    for (w, (a, b)) in &by_word {
        let k = a.len().min(b.len());
        for i in 0..k {
            covered += w.len() + 1;
            pairs.push(MatchedSegment {
                word: w.render(r),
                left: Segment { component: a[i], start: 0, end: w.len() },
                right: Segment { component: b[i], start: 0, end: w.len() },
            });
        }
        rest_g.extend_from_slice(&a[k..]);
        rest_h.extend_from_slice(&b[k..]);
    }
    account.push(format!("whole components matched: {} covering {covered} vertices per side", pairs.len()));

    let pair_of = |left: Segment, right: Segment| MatchedSegment { word: left.word(g, r).expect("in range").render(r), left, right };
    let mut embedded: Vec<MatchedSegment> = embed(&rest_h, &rest_g, h, g, r).into_iter().map(|(p, s)| pair_of(s, p)).collect();
    let hosts_g: HashSet<usize> = embedded.iter().map(|p| p.left.component).collect();
    let used_h: HashSet<usize> = embedded.iter().map(|p| p.right.component).collect();
    let free_g: Vec<usize> = rest_g.iter().copied().filter(|c| !hosts_g.contains(c)).collect();
    let free_h: Vec<usize> = rest_h.iter().copied().filter(|c| !used_h.contains(c)).collect();
    embedded.extend(embed(&free_g, &free_h, g, h, r).into_iter().map(|(p, s)| pair_of(p, s)));
    let touched_g: HashSet<usize> = embedded.iter().map(|p| p.left.component).collect();
    let touched_h: HashSet<usize> = embedded.iter().map(|p| p.right.component).collect();
    let untouched_g: Vec<usize> = rest_g.iter().copied().filter(|c| !touched_g.contains(c)).collect();
    let untouched_h: Vec<usize> = rest_h.iter().copied().filter(|c| !touched_h.contains(c)).collect();
    let embedded_cover: usize = embedded.iter().map(|p| p.left.len()).sum();
    let after_embed = best_blocks(&untouched_g, &untouched_h, g, h, r);
    let blocks_only = best_blocks(&rest_g, &rest_h, g, h, r);
    let with_embed = embedded_cover + after_embed.as_ref().map_or(0, |(_, a)| a.covered);
    let mut block = None;
    if !embedded.is_empty() && with_embed >= blocks_only.as_ref().map_or(0, |(_, a)| a.covered) {
        account.push(format!("embedded {} leftover components covering {embedded_cover} vertices per side", embedded.len()));
        covered += embedded_cover;
        pairs.extend(embedded);
        if let Some((b, a)) = after_embed {
            account.push(format!("block cutting with {b} vertices matched {} more vertices per side", a.covered));
            covered += a.covered;
            pairs.extend(a.pairs);
            block = Some(b);
        }
    } else if let Some((b, a)) = blocks_only {
        account.push(format!("block cutting with {b} vertices matched {} more vertices per side", a.covered));
        covered += a.covered;
        pairs.extend(a.pairs);
        block = Some(b);
    }
    let frac = |total: usize| if total == 0 { rational::zero() } else { rational::ratio(total - covered, total) };
    let (el, er) = (frac(vg), frac(vh));
    if el > *eps || er > *eps {
        account.push(format!("unmatched shares {} and {} exceed ε", rational::render(&el), rational::render(&er)));
        return IsoOutcome::NoCertificate { best_left: el, best_right: er, account };
    }
    let q = r.nilpotency_bound();
    let inside = |side: &StringGraph, segs: &mut dyn Iterator<Item = Segment>, total: usize| {
        let n: usize = segs.map(|s| inside_count(&s, side, q)).sum();
        if total == 0 {
            rational::zero()
        } else {
            rational::ratio(total - n, total)
        }
    };
    let mel = inside(g, &mut pairs.iter().map(|p| p.left), vg);
    let mer = inside(h, &mut pairs.iter().map(|p| p.right), vh);
    let cert = IsoCertificate {
        pairs,
        vertices_left: vg,
        vertices_right: vh,
        covered,
        epsilon_left: el,
        epsilon_right: er,
        module_epsilon_left: mel,
        module_epsilon_right: mer,
        block,
    };
    match verify_certificate(&cert, g, h, eps, r) {
        Ok(()) => IsoOutcome::Certificate(cert),
        Err(problems) => {
            account.extend(problems);
            IsoOutcome::NoCertificate { best_left: cert.epsilon_left, best_right: cert.epsilon_right, account }
        }
    }
}

fn check_side(segs: &[Segment], g: &StringGraph, problems: &mut Vec<String>, side: &str) {
    let mut by_comp: HashMap<usize, Vec<Segment>> = HashMap::new();
    for s in segs {
        by_comp.entry(s.component).or_default().push(*s);
    }
    for (c, mut list) in by_comp {
        list.sort();
        for w in list.windows(2) {
            if w[0].end + 1 >= w[1].start {
                problems.push(format!("{side} segments {:?} and {:?} overlap or touch", w[0], w[1]));
            }
        }
        if c >= g.components().len() {
            problems.push(format!("{side} component {c} does not exist"));
        }
    }
}

/// Independent re-check of a certificate: every matched pair spells the
/// same canonical word, segments on each side are disjoint and
/// non-adjacent, and the recorded shares are recomputed and within `ε`.
pub fn verify_certificate(
    c: &IsoCertificate,
    g: &StringGraph,
    h: &StringGraph,
    eps: &Rational,
    r: &StringAlgebra,
) -> Result<(), Vec<String>> {
    let mut problems = Vec::new();
    for p in &c.pairs {
        match (p.left.word(g, r), p.right.word(h, r)) {
            (Some(a), Some(b)) if a == b => {}
            (Some(_), Some(_)) => problems.push(format!("segments {:?} / {:?} spell different words", p.left, p.right)),
            _ => problems.push(format!("segment {:?} / {:?} out of range", p.left, p.right)),
        }
    }
    let left: Vec<Segment> = c.pairs.iter().map(|p| p.left).collect();
    let right: Vec<Segment> = c.pairs.iter().map(|p| p.right).collect();
    check_side(&left, g, &mut problems, "left");
    check_side(&right, h, &mut problems, "right");
    let cl: usize = left.iter().map(Segment::len).sum();
    let cr: usize = right.iter().map(Segment::len).sum();
    if cl != c.covered || cr != c.covered {
        problems.push("covered vertex count does not match the segments".into());
    }
    let (vg, vh) = (g.num_vertices(), h.num_vertices());
    if vg != c.vertices_left || vh != c.vertices_right {
        problems.push("vertex totals do not match the graphs".into());
    }
    let el = if vg == 0 { rational::zero() } else { rational::ratio(vg.saturating_sub(cl), vg) };
    let er = if vh == 0 { rational::zero() } else { rational::ratio(vh.saturating_sub(cr), vh) };
    if el != c.epsilon_left || er != c.epsilon_right {
        problems.push("recorded shares do not match".into());
    }
    if el > *eps || er > *eps {
        problems.push("unmatched share exceeds ε".into());
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(problems)
    }
}

/// A band unrolled into a string module of the same dimension.
#[derive(Debug, Clone, Serialize)]
pub struct BandApprox {
    pub string: String,
    #[serde(skip)]
    pub word: StringWord,
    pub dim: usize,
    /// `perm[i]` is the band basis vector matching `z_i`.
    pub perm: Vec<usize>,
    /// Dimension of the common submodule.
    pub common_dim: usize,
    #[serde(serialize_with = "crate::rational::ser")]
    pub epsilon: Rational,
}

/// Unrolls `M(S, φ)` along its basis: apart from the twist letter acting on
/// one basis vector, every arrow sends basis vectors to basis vectors, and
/// removing that one action leaves a single path spelling a string `T` with
/// `dim M(T) = dim M(S, φ)`. The vectors at distance at least `q` from both
/// ends of the path generate isomorphic submodules in both modules.
///
/// `threshold` defaults to `⌈2q/κ⌉`; smaller bands are refused.
pub fn band_to_string_approx(
    b: &BandData,
    kappa: &Rational,
    threshold: Option<usize>,
    r: &Arc<StringAlgebra>,
) -> Result<BandApprox, LimitError> {
    if *kappa <= rational::zero() {
        return Err(LimitError::BadEpsilon);
    }
    let q = r.nilpotency_bound();
    let threshold = threshold.unwrap_or_else(|| {
        use num_traits::ToPrimitive;
        (rational::int(2 * q) / kappa).ceil().to_integer().to_usize().unwrap_or(usize::MAX)
    });
    let dim = b.dim();
    if dim < threshold {
        return Err(LimitError::TooSmall { dim, threshold });
    }
    let band = band_module(b, r)?;
    let n = b.word.len();
    let d = b.slice_dim();
    let twist = if n >= 2 { 2 } else { 1 };
    let tl = b.word.letters[twist - 1];
    // The basis vector on which the twist letter does not act by φ's unit columns.
    let defect = if tl.inverse { 0 } else { (twist - 1) * d + d - 1 };
    // Undirected adjacency with letters: edge u -> w coloured a means a e_u = e_w.
    let mut next: Vec<Vec<(usize, Letter)>> = vec![Vec::new(); dim];
    for a in 0..r.quiver().num_arrows() {
        let m = band.action(a);
        for u in 0..dim {
            if a == tl.arrow && u == defect {
                continue;
            }
            let col: Vec<(usize, u32)> = (0..dim).filter_map(|i| Some((i, m.get(i, u))).filter(|x| x.1 != 0)).collect();
            if let [(w, 1)] = col[..] {
                // α e_u = e_w: walking from w to u reads α (direct letter
                // when moving right), from u to w reads α^{-1}.
                next[u].push((w, Letter::inv(a)));
                next[w].push((u, Letter::direct(a)));
            }
        }
    }
    let ends: Vec<usize> = (0..dim).filter(|&u| next[u].len() <= 1).collect();
    let start = *ends.first().ok_or(LimitError::Module(ModuleError::NotCyclic))?;
    let mut perm = vec![start];
    let mut letters = Vec::new();
    let mut prev = usize::MAX;
    let mut cur = start;
    while let Some(&(w, l)) = next[cur].iter().find(|(w, _)| *w != prev) {
        if perm.len() > dim {
            break;
        }
        // z_{i} -> z_{i+1}: letter C_{i+1}; α z_{i+1} = z_i for a direct letter.
        letters.push(l);
        perm.push(w);
        prev = cur;
        cur = w;
    }
    if perm.len() != dim {
        return Err(LimitError::Module(ModuleError::NotCyclic));
    }
    let word = if letters.is_empty() {
        StringWord::trivial(band.vertex_of_basis()[start])
    } else {
        StringWord::from_letters(letters, r).ok_or(LimitError::Module(ModuleError::NotCyclic))?
    };
    word.validate(r)?;
    let inside: Vec<usize> = (0..dim).filter(|&i| i >= q && i + q < dim).collect();
    let common_dim = common_submodule(&band.permuted(&perm), &string_module(&word, r)?, &inside)
        .ok_or_else(|| LimitError::Module(ModuleError::NotASubmodule("unrolled string differs on the inside".into())))?;
    let epsilon = rational::ratio(dim - common_dim, dim);
    Ok(BandApprox { string: word.render(r), word, dim, perm, common_dim, epsilon })
}

/// If the basis vectors `inside` generate the same subspace in both modules
/// (which share a basis) and every arrow acts on it identically, returns its
/// dimension.
pub(crate) fn common_submodule(a: &RModule, b: &RModule, inside: &[usize]) -> Option<usize> {
    let n = a.dim();
    if b.dim() != n {
        return None;
    }
    let f = a.algebra().field();
    let units: Vec<Vec<u32>> = inside
        .iter()
        .map(|&i| {
            let mut v = vec![0; n];
            v[i] = 1;
            v
        })
        .collect();
    let pa: Subspace = a.generated_submodule(&units);
    let pb: Subspace = b.generated_submodule(&units);
    if pa != pb {
        return None;
    }
    for arrow in 0..a.algebra().quiver().num_arrows() {
        for v in pa.basis() {
            if a.action(arrow).mul_vec(v, f) != b.action(arrow).mul_vec(v, f) {
                return None;
            }
        }
    }
    Some(pa.dim())
}

/// Re-derives the common submodule of a band and its unrolled string.
pub fn verify_band_approx(b: &BandData, approx: &BandApprox, r: &Arc<StringAlgebra>) -> bool {
    let Ok(band) = band_module(b, r) else { return false };
    let Ok(string) = string_module(&approx.word, r) else { return false };
    let mut seen = vec![false; band.dim()];
    if approx.perm.len() != band.dim() || approx.perm.iter().any(|&i| i >= seen.len() || std::mem::replace(&mut seen[i], true)) {
        return false;
    }
    let q = r.nilpotency_bound();
    let inside: Vec<usize> = (0..band.dim()).filter(|&i| i >= q && i + q < band.dim()).collect();
    common_submodule(&band.permuted(&approx.perm), &string, &inside) == Some(approx.common_dim)
}
