use std::cmp::Ordering;

use super::ModuleError;
use crate::algebra::StringAlgebra;
use crate::gf::{FieldPolynomial, FiniteField};

/// An arrow or a formal inverse arrow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub arrow: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn direct(arrow: usize) -> Self {
        Letter { arrow, inverse: false }
    }

    pub fn inv(arrow: usize) -> Self {
        Letter { arrow, inverse: true }
    }

    pub fn inverted(self) -> Self {
        Letter { arrow: self.arrow, inverse: !self.inverse }
    }

    pub fn source(self, r: &StringAlgebra) -> usize {
        let a = r.quiver().arrow(self.arrow);
        if self.inverse {
            a.target
        } else {
            a.source
        }
    }

    pub fn target(self, r: &StringAlgebra) -> usize {
        let a = r.quiver().arrow(self.arrow);
        if self.inverse {
            a.source
        } else {
            a.target
        }
    }

    pub fn render(self, r: &StringAlgebra) -> String {
        if self.inverse {
            format!("{}^-1", r.arrow_label(self.arrow))
        } else {
            r.arrow_label(self.arrow).to_string()
        }
    }
}

/// A word `C_1 C_2 ... C_n` in letters, or the trivial word at a vertex.
///
/// `vertex` is where `z_0` lives: `t(C_1)` for a nonempty word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StringWord {
    pub vertex: usize,
    pub letters: Vec<Letter>,
}

impl StringWord {
    pub fn trivial(vertex: usize) -> Self {
        StringWord { vertex, letters: Vec::new() }
    }

    /// Builds a word from letters; the anchor vertex is `t(C_1)`.
    pub fn from_letters(letters: Vec<Letter>, r: &StringAlgebra) -> Option<Self> {
        let vertex = letters.first()?.target(r);
        Some(StringWord { vertex, letters })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Vertex of basis vector `z_i`.
    pub fn vertex_at(&self, i: usize, r: &StringAlgebra) -> usize {
        if i == 0 {
            self.vertex
        } else {
            self.letters[i - 1].source(r)
        }
    }

    /// `C_n^{-1} ... C_1^{-1}`.
    pub fn inverse(&self, r: &StringAlgebra) -> Self {
        if self.letters.is_empty() {
            return self.clone();
        }
        let letters: Vec<Letter> = self.letters.iter().rev().map(|l| l.inverted()).collect();
        StringWord { vertex: letters[0].target(r), letters }
    }

    /// The smaller of the word and its inverse; `M(S)` and `M(S^{-1})` are
    /// isomorphic, so this labels the isomorphism class.
    pub fn canonical(&self, r: &StringAlgebra) -> Self {
        let inv = self.inverse(r);
        if inv < *self {
            inv
        } else {
            self.clone()
        }
    }

    /// Subword `C_{a+1} ... C_b` (basis vectors `z_a..z_b`).
    pub fn subword(&self, a: usize, b: usize, r: &StringAlgebra) -> Self {
        StringWord { vertex: self.vertex_at(a, r), letters: self.letters[a..b].to_vec() }
    }

    pub fn render(&self, r: &StringAlgebra) -> String {
        if self.letters.is_empty() {
            return format!("e_{}", r.vertex_name(self.vertex));
        }
        self.letters.iter().map(|l| l.render(r)).collect::<Vec<_>>().join(" ")
    }

    /// Parses `x y^-1 z`, or `e_a` / `@a` for a trivial word.
    pub fn parse(text: &str, r: &StringAlgebra) -> Result<Self, ModuleError> {
        let text = text.trim();
        let trivial = text.strip_prefix('@').or_else(|| {
            r.quiver().arrow_index(text).is_none().then(|| text.strip_prefix("e_")).flatten()
        });
        if let Some(v) = trivial {
            let v = r.quiver().vertex_index(v.trim()).ok_or_else(|| ModuleError::Parse(format!("unknown vertex {v}")))?;
            return Ok(StringWord::trivial(v));
        }
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            let (name, inverse) = match tok.strip_suffix("^-1") {
                Some(n) => (n, true),
                None => (tok, false),
            };
            let a = r
                .quiver()
                .arrow_index(name)
                .ok_or_else(|| ModuleError::Parse(format!("unknown arrow {name}")))?;
            letters.push(Letter { arrow: a, inverse });
        }
        StringWord::from_letters(letters, r).ok_or_else(|| ModuleError::Parse("empty word".into()))
    }

    /// Checks the three string conditions. Errors carry the condition number
    /// and the 1-based letter position where it fails.
    pub fn validate(&self, r: &StringAlgebra) -> Result<(), ModuleError> {
        let n = self.letters.len();
        if n == 0 {
            if self.vertex >= r.quiver().num_vertices() {
                return Err(ModuleError::InvalidString { condition: 1, position: 0 });
            }
            return Ok(());
        }
        if self.vertex != self.letters[0].target(r) {
            return Err(ModuleError::InvalidString { condition: 1, position: 1 });
        }
        for i in 0..n - 1 {
            if self.letters[i + 1].target(r) != self.letters[i].source(r) {
                return Err(ModuleError::InvalidString { condition: 1, position: i + 1 });
            }
            if self.letters[i + 1] == self.letters[i].inverted() {
                return Err(ModuleError::InvalidString { condition: 2, position: i + 1 });
            }
        }
        if let Some(pos) = first_zero_run(&self.letters, r) {
            return Err(ModuleError::InvalidString { condition: 3, position: pos });
        }
        Ok(())
    }
}

/// Position of the first maximal same-direction run that is zero in `R`.
fn first_zero_run(letters: &[Letter], r: &StringAlgebra) -> Option<usize> {
    let mut i = 0;
    while i < letters.len() {
        let mut j = i + 1;
        while j < letters.len() && letters[j].inverse == letters[i].inverse {
            j += 1;
        }
        if j - i >= 2 {
            let mut arrows: Vec<usize> = letters[i..j].iter().map(|l| l.arrow).collect();
            if letters[i].inverse {
                arrows.reverse();
            }
            if !r.is_nonzero_path(&arrows) {
                return Some(i + 1);
            }
        }
        i = j;
    }
    None
}

impl StringWord {
    /// True if every rotation and every power of the word is a string.
    pub fn is_cyclic(&self, r: &StringAlgebra) -> bool {
        let n = self.letters.len();
        if n == 0 {
            return false;
        }
        // Repeating the word covers every rotation and every run that wraps
        // around the cycle; runs longer than q are zero anyway.
        let reps = (r.nilpotency_bound() + 1).div_ceil(n) + 1;
        let mut long = Vec::with_capacity(n * reps);
        for _ in 0..reps {
            long.extend_from_slice(&self.letters);
        }
        match StringWord::from_letters(long, r) {
            Some(w) => w.validate(r).is_ok() && self.letters[0].target(r) == self.letters[n - 1].source(r),
            None => false,
        }
    }

    /// True if the word is `U^k` for a shorter word `U` and `k >= 2`.
    pub fn is_proper_power(&self) -> bool {
        let n = self.letters.len();
        (1..n).any(|p| n.is_multiple_of(p) && (p..n).all(|i| self.letters[i] == self.letters[i - p]))
    }

    /// `C_{k+1} ... C_n C_1 ... C_k`.
    pub fn rotate(&self, k: usize, r: &StringAlgebra) -> Self {
        let n = self.letters.len();
        let mut letters = self.letters[k % n..].to_vec();
        letters.extend_from_slice(&self.letters[..k % n]);
        StringWord::from_letters(letters, r).expect("nonempty")
    }
}

/// Data of a band module `M(S, φ)` with `φ` the companion matrix of `f^power`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BandData {
    pub word: StringWord,
    pub f: FieldPolynomial,
    pub power: u32,
}

impl PartialOrd for BandData {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BandData {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.word.letters.len(), &self.word, &self.f, self.power).cmp(&(
            other.word.letters.len(),
            &other.word,
            &other.f,
            other.power,
        ))
    }
}

impl BandData {
    pub fn new(word: StringWord, f: FieldPolynomial, power: u32) -> Self {
        BandData { word, f, power }
    }

    /// Dimension of each slice, `power · deg f`.
    pub fn slice_dim(&self) -> usize {
        self.power as usize * self.f.degree().unwrap_or(0)
    }

    pub fn dim(&self) -> usize {
        self.word.len() * self.slice_dim()
    }

    pub fn validate(&self, r: &StringAlgebra) -> Result<(), ModuleError> {
        let field = r.field();
        self.f.check_in(field).map_err(|e| ModuleError::Parse(e.to_string()))?;
        if self.power == 0 {
            return Err(ModuleError::Parse("band power must be at least 1".into()));
        }
        if !self.f.is_monic() || self.f.degree().unwrap_or(0) == 0 {
            return Err(ModuleError::ReducibleF);
        }
        if self.f.coeff(0) == 0 {
            return Err(ModuleError::FVanishesAtZero);
        }
        if !self.f.is_irreducible(field).unwrap_or(false) {
            return Err(ModuleError::ReducibleF);
        }
        if !self.word.is_cyclic(r) {
            return Err(ModuleError::NotCyclic);
        }
        if self.word.is_proper_power() {
            return Err(ModuleError::ProperPower);
        }
        Ok(())
    }

    /// Canonical representative of the isomorphism class: least over the
    /// rotations of the word (with `f`) and of its inverse (with the
    /// reciprocal `f*`, since walking the band backwards inverts the
    /// monodromy).
    pub fn canonical(&self, r: &StringAlgebra) -> Self {
        let field: &FiniteField = r.field();
        let n = self.word.len();
        let fstar = self.f.reciprocal(field).unwrap_or_else(|| self.f.clone());
        let inv = self.word.inverse(r);
        let mut best: Option<BandData> = None;
        for k in 0..n {
            for cand in [
                BandData::new(self.word.rotate(k, r), self.f.clone(), self.power),
                BandData::new(inv.rotate(k, r), fstar.clone(), self.power),
            ] {
                if best.as_ref().is_none_or(|b| cand < *b) {
                    best = Some(cand);
                }
            }
        }
        best.expect("nonempty band word")
    }

    pub fn render(&self, r: &StringAlgebra) -> String {
        let cs: Vec<String> = self.f.coeffs().iter().map(|c| c.to_string()).collect();
        format!("{} ; f=[{}] ; n={}", self.word.render(r), cs.join(","), self.power)
    }
}
