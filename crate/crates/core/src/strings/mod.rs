//! String graphs and their local statistics.
//!
//! Every component of a string graph is a path, so a component is stored as
//! the string word it spells. Vertex `x_i` of a component is the basis vector
//! `z_i` of the string module; the edge between `x_{i-1}` and `x_i` points to
//! `x_{i-1}` for a direct letter and to `x_i` for an inverse one.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::StringAlgebra;
use crate::module::{string_module, Decomposition, Indecomposable, Letter, ModuleError, RModule, StringWord};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StringsError {
    #[error(transparent)]
    InvalidString(#[from] ModuleError),
    #[error("component {component} does not decode to a string: {msg}")]
    DecodeFailure { component: usize, msg: String },
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("profiles have radii {0} and {1}")]
    RadiusMismatch(usize, usize),
    #[error("module has band summands and no string graph")]
    NotStringSum,
    #[error("empty sequence")]
    EmptySequence,
    #[error("the empty string has no right endvertices")]
    TrivialPattern,
}

/// Disjoint union of paths, one per string, each stored canonically and
/// sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StringGraph {
    components: Vec<StringWord>,
}

/// One edge between `x_{i-1}` and `x_i`: its color and whether it points to `x_{i-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathEdge {
    pub color: usize,
    pub toward_left: bool,
}

/// Explicit form of a component: the quiver vertex of `x_0` and the edges
/// in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathComponent {
    pub start: usize,
    pub edges: Vec<PathEdge>,
}

impl StringGraph {
    pub fn components(&self) -> &[StringWord] {
        &self.components
    }

    pub fn num_vertices(&self) -> usize {
        self.components.iter().map(|w| w.len() + 1).sum()
    }

    /// Disjoint union.
    pub fn union(&self, other: &StringGraph) -> StringGraph {
        let mut components = self.components.clone();
        components.extend(other.components.iter().cloned());
        components.sort();
        StringGraph { components }
    }

    /// `k` disjoint copies.
    pub fn power(&self, k: usize) -> StringGraph {
        let mut components: Vec<StringWord> =
            self.components.iter().flat_map(|w| std::iter::repeat_n(w.clone(), k)).collect();
        components.sort();
        StringGraph { components }
    }

    pub fn encode(&self, r: &StringAlgebra) -> Vec<PathComponent> {
        self.components
            .iter()
            .map(|w| PathComponent {
                start: w.vertex_at(0, r),
                edges: w.letters.iter().map(|l| PathEdge { color: l.arrow, toward_left: !l.inverse }).collect(),
            })
            .collect()
    }

    pub fn decode(parts: &[PathComponent], r: &StringAlgebra) -> Result<StringGraph, StringsError> {
        let mut words = Vec::with_capacity(parts.len());
        for (i, p) in parts.iter().enumerate() {
            let fail = |msg: String| StringsError::DecodeFailure { component: i, msg };
            if p.start >= r.quiver().num_vertices() {
                return Err(fail(format!("unknown vertex {}", p.start)));
            }
            if let Some(e) = p.edges.iter().find(|e| e.color >= r.quiver().num_arrows()) {
                return Err(fail(format!("unknown color {}", e.color)));
            }
            let letters: Vec<Letter> = p
                .edges
                .iter()
                .map(|e| if e.toward_left { Letter::direct(e.color) } else { Letter::inv(e.color) })
                .collect();
            let w = if letters.is_empty() {
                StringWord::trivial(p.start)
            } else {
                let w = StringWord::from_letters(letters, r).ok_or_else(|| fail("letters do not compose".into()))?;
                if w.vertex != p.start {
                    return Err(fail("start vertex does not match the first edge".into()));
                }
                w
            };
            w.validate(r).map_err(|e| fail(e.to_string()))?;
            words.push(w);
        }
        graph_of_strings(&words, r)
    }

    /// Components in the string list format, one per line.
    pub fn render(&self, r: &StringAlgebra) -> String {
        self.components.iter().map(|w| format!("{}\n", w.render(r))).collect()
    }
}

/// `G_S` for each word, canonicalised.
pub fn graph_of_strings(words: &[StringWord], r: &StringAlgebra) -> Result<StringGraph, StringsError> {
    let mut components = Vec::with_capacity(words.len());
    for w in words {
        w.validate(r)?;
        components.push(w.canonical(r));
    }
    components.sort();
    Ok(StringGraph { components })
}

/// `G_M` for a sum of string modules.
pub fn graph_of_decomposition(d: &Decomposition) -> Result<StringGraph, StringsError> {
    let mut words = Vec::new();
    for (ind, &mult) in d.parts() {
        match ind {
            Indecomposable::String(w) => words.extend(std::iter::repeat_n(w.clone(), mult)),
            Indecomposable::Band(_) => return Err(StringsError::NotStringSum),
        }
    }
    graph_of_strings(&words, d.algebra())
}

pub fn graph_to_module(g: &StringGraph, r: &Arc<StringAlgebra>) -> Result<RModule, StringsError> {
    let parts = g.components.iter().map(|w| string_module(w, r)).collect::<Result<Vec<_>, _>>()?;
    Ok(RModule::direct_sum_all(r.clone(), parts.iter())?)
}

/// One word per line; `#` starts a comment.
pub fn parse_string_list(text: &str, r: &StringAlgebra) -> Result<Vec<StringWord>, StringsError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let w = StringWord::parse(body, r)
            .map_err(|e| StringsError::DecodeFailure { component: i + 1, msg: e.to_string() })?;
        w.validate(r)?;
        out.push(w);
    }
    Ok(out)
}

/// Isomorphism type of a rooted `r`-ball: the segment of the path within
/// distance `radius` of the root, and the root's position in it. The segment
/// is cut short on a side only where the path ends.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BallType {
    pub radius: usize,
    pub segment: StringWord,
    pub root: usize,
}

impl BallType {
    fn reflect(&self, r: &StringAlgebra) -> BallType {
        BallType { radius: self.radius, segment: self.segment.inverse(r), root: self.segment.len() - self.root }
    }

    /// The smaller of the type and its mirror image.
    pub fn canonical(self, r: &StringAlgebra) -> BallType {
        let m = self.reflect(r);
        if m < self {
            m
        } else {
            self
        }
    }

    /// Ball of vertex `i` in the path spelled by `w`.
    pub fn of_vertex(w: &StringWord, i: usize, radius: usize, r: &StringAlgebra) -> BallType {
        let lo = i.saturating_sub(radius);
        let hi = (i + radius).min(w.len());
        BallType { radius, segment: w.subword(lo, hi, r), root: i - lo }.canonical(r)
    }

    /// The ball of smaller radius around the same root.
    pub fn coarsen(&self, radius: usize, r: &StringAlgebra) -> BallType {
        BallType::of_vertex(&self.segment, self.root, radius.min(self.radius), r)
    }

    /// Letters with `[o]` marking the root, or `@v` for a lone vertex.
    pub fn render(&self, r: &StringAlgebra) -> String {
        if self.segment.is_empty() {
            return format!("@{}", r.vertex_name(self.segment.vertex));
        }
        let mut parts: Vec<String> = self.segment.letters.iter().map(|l| l.render(r)).collect();
        parts.insert(self.root, "[o]".into());
        parts.join(" ")
    }
}

/// `p(H, G)` for every ball type `H` of one radius.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatProfile {
    pub radius: usize,
    pub freq: BTreeMap<BallType, Rational>,
}

impl StatProfile {
    pub fn get(&self, h: &BallType) -> Rational {
        self.freq.get(h).cloned().unwrap_or_else(rational::zero)
    }

    pub fn coarsen(&self, radius: usize, r: &StringAlgebra) -> StatProfile {
        let mut freq: BTreeMap<BallType, Rational> = BTreeMap::new();
        for (h, p) in &self.freq {
            *freq.entry(h.coarsen(radius, r)).or_insert_with(rational::zero) += p;
        }
        StatProfile { radius: radius.min(self.radius), freq }
    }

    /// Ball type rendering to `num/den`.
    pub fn to_json(&self, r: &StringAlgebra) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> =
            self.freq.iter().map(|(h, p)| (h.render(r), rational::render(p).into())).collect();
        serde_json::json!({ "radius": self.radius, "frequencies": map })
    }
}

fn census(g: &StringGraph, radius: usize, r: &StringAlgebra) -> HashMap<BallType, usize> {
    let mut multiplicity: BTreeMap<&StringWord, usize> = BTreeMap::new();
    for w in &g.components {
        *multiplicity.entry(w).or_default() += 1;
    }
    let mut counts: HashMap<BallType, usize> = HashMap::new();
    for (w, mult) in multiplicity {
        for i in 0..=w.len() {
            *counts.entry(BallType::of_vertex(w, i, radius, r)).or_default() += mult;
        }
    }
    counts
}

/// Exact census over all vertices.
pub fn ball_stats(g: &StringGraph, radius: usize, r: &StringAlgebra) -> Result<StatProfile, StringsError> {
    let n = g.num_vertices();
    if n == 0 {
        return Err(StringsError::EmptyGraph);
    }
    let freq = census(g, radius, r).into_iter().map(|(h, c)| (h, rational::ratio(c, n))).collect();
    Ok(StatProfile { radius, freq })
}

#[derive(Debug, Clone)]
pub struct SampledStats {
    pub profile: StatProfile,
    pub samples: usize,
    /// Additive error that each frequency respects with probability `1 - δ`.
    pub epsilon: f64,
    pub delta: f64,
}

/// `sqrt(ln(2/δ) / (2n))`.
pub fn hoeffding_epsilon(samples: usize, delta: f64) -> f64 {
    ((2.0 / delta).ln() / (2.0 * samples as f64)).sqrt()
}

/// Frequencies from `samples` uniform vertices drawn with a ChaCha8
/// generator seeded by `seed`. With `exhaustive` set every vertex is visited
/// once instead and the result is exact.
pub fn ball_stats_sampled(
    g: &StringGraph,
    radius: usize,
    samples: usize,
    seed: u64,
    delta: f64,
    exhaustive: bool,
    r: &StringAlgebra,
) -> Result<SampledStats, StringsError> {
    let n = g.num_vertices();
    if n == 0 {
        return Err(StringsError::EmptyGraph);
    }
    if exhaustive {
        return Ok(SampledStats { profile: ball_stats(g, radius, r)?, samples: n, epsilon: 0.0, delta });
    }
    let samples = samples.max(1);
    let mut offsets = Vec::with_capacity(g.components.len());
    let mut acc = 0;
    for w in &g.components {
        offsets.push(acc);
        acc += w.len() + 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: HashMap<BallType, usize> = HashMap::new();
    for _ in 0..samples {
        let v = rng.gen_range(0..n);
        let c = offsets.partition_point(|&o| o <= v) - 1;
        let h = BallType::of_vertex(&g.components[c], v - offsets[c], radius, r);
        *counts.entry(h).or_default() += 1;
    }
    let freq = counts.into_iter().map(|(h, c)| (h, rational::ratio(c, samples))).collect();
    Ok(SampledStats { profile: StatProfile { radius, freq }, samples, epsilon: hoeffding_epsilon(samples, delta), delta })
}

/// Positions `i` of `z_i` in `w` that end an occurrence of `s`, read in `w`
/// or in its inverse.
fn right_ends(s: &StringWord, w: &StringWord, r: &StringAlgebra) -> HashSet<usize> {
    let (k, m) = (s.len(), w.len());
    let mut ends = HashSet::new();
    if k > m {
        return ends;
    }
    let inv = w.inverse(r);
    for a in 0..=m - k {
        if w.letters[a..a + k] == s.letters[..] {
            ends.insert(a + k);
        }
        if inv.letters[a..a + k] == s.letters[..] {
            ends.insert(m - a - k);
        }
    }
    ends
}

/// `|R(S, G)|` and `r(S, G) = |R(S, G)| / |V(G)|`.
pub fn right_endpoint_count(s: &StringWord, g: &StringGraph, r: &StringAlgebra) -> Result<(usize, Rational), StringsError> {
    s.validate(r)?;
    if s.is_empty() {
        return Err(StringsError::TrivialPattern);
    }
    let n = g.num_vertices();
    if n == 0 {
        return Err(StringsError::EmptyGraph);
    }
    let mut cache: HashMap<&StringWord, usize> = HashMap::new();
    let mut count = 0;
    for w in &g.components {
        count += *cache.entry(w).or_insert_with(|| right_ends(s, w, r).len());
    }
    Ok((count, rational::ratio(count, n)))
}

/// Total variation `½ Σ_H |p(H) - q(H)|`.
pub fn profile_distance_bs(p: &StatProfile, q: &StatProfile) -> Result<Rational, StringsError> {
    if p.radius != q.radius {
        return Err(StringsError::RadiusMismatch(p.radius, q.radius));
    }
    let keys: std::collections::BTreeSet<&BallType> = p.freq.keys().chain(q.freq.keys()).collect();
    let total: Rational = keys.into_iter().map(|h| rational::abs_diff(&p.get(h), &q.get(h))).sum();
    Ok(total / rational::int(2))
}

/// A tracked quantity along the sequence and its tail oscillation
/// `max_{m, m' ≥ n} |x_m - x_{m'}|` for every start `n`.
#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub label: String,
    #[serde(serialize_with = "crate::rational::ser_vec")]
    pub values: Vec<Rational>,
    #[serde(serialize_with = "crate::rational::ser_vec")]
    pub modulus: Vec<Rational>,
}

impl Trajectory {
    fn new(label: String, values: Vec<Rational>) -> Self {
        let mut modulus = vec![rational::zero(); values.len()];
        let (mut lo, mut hi): (Option<Rational>, Option<Rational>) = (None, None);
        for i in (0..values.len()).rev() {
            let v = &values[i];
            if lo.as_ref().is_none_or(|l| v < l) {
                lo = Some(v.clone());
            }
            if hi.as_ref().is_none_or(|h| v > h) {
                hi = Some(v.clone());
            }
            modulus[i] = hi.clone().unwrap() - lo.clone().unwrap();
        }
        Trajectory { label, values, modulus }
    }

    /// Oscillation over the second half of the sequence.
    pub fn tail(&self) -> Rational {
        self.modulus.get(self.values.len() / 2).cloned().unwrap_or_else(rational::zero)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub radius: usize,
    pub strings: Vec<Trajectory>,
    pub balls: Vec<Trajectory>,
    #[serde(serialize_with = "crate::rational::ser")]
    pub tolerance: Rational,
    /// Every tail oscillation is within the tolerance.
    pub cauchy: bool,
}

impl ConvergenceReport {
    /// One row per graph: index, then each string and ball trajectory.
    pub fn to_csv(&self) -> String {
        let all: Vec<&Trajectory> = self.strings.iter().chain(&self.balls).collect();
        let mut out = String::from("n");
        for t in &all {
            out.push_str(&format!(",\"{}\"", t.label.replace('"', "'")));
        }
        out.push('\n');
        let len = all.first().map_or(0, |t| t.values.len());
        for i in 0..len {
            out.push_str(&i.to_string());
            for t in &all {
                out.push_str(&format!(",{}", rational::render(&t.values[i])));
            }
            out.push('\n');
        }
        out
    }
}

/// Tabulates `r(S, G_n)` for the given strings and `p(H, G_n)` for every
/// ball type of the given radius seen anywhere in the sequence.
pub fn stringconvergence_check(
    graphs: &[StringGraph],
    strings: &[StringWord],
    radius: usize,
    tolerance: Rational,
    r: &StringAlgebra,
) -> Result<ConvergenceReport, StringsError> {
    if graphs.is_empty() {
        return Err(StringsError::EmptySequence);
    }
    let mut string_traj = Vec::new();
    for s in strings {
        let values = graphs.iter().map(|g| right_endpoint_count(s, g, r).map(|x| x.1)).collect::<Result<Vec<_>, _>>()?;
        string_traj.push(Trajectory::new(format!("r({})", s.render(r)), values));
    }
    let profiles = graphs.iter().map(|g| ball_stats(g, radius, r)).collect::<Result<Vec<_>, _>>()?;
    let types: std::collections::BTreeSet<&BallType> = profiles.iter().flat_map(|p| p.freq.keys()).collect();
    let ball_traj: Vec<Trajectory> = types
        .into_iter()
        .map(|h| Trajectory::new(format!("p({})", h.render(r)), profiles.iter().map(|p| p.get(h)).collect()))
        .collect();
    let cauchy = string_traj.iter().chain(&ball_traj).all(|t| t.tail() <= tolerance);
    Ok(ConvergenceReport { radius, strings: string_traj, balls: ball_traj, tolerance, cauchy })
}
