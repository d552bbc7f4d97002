use std::collections::BTreeMap;
use std::sync::Arc;

use super::construct::{band_module, string_module};
use super::word::{BandData, StringWord};
use super::{ModuleError, RModule};
use crate::algebra::StringAlgebra;

/// Isomorphism class of an indecomposable module, in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Indecomposable {
    String(StringWord),
    Band(BandData),
}

impl Indecomposable {
    pub fn string(w: StringWord, r: &StringAlgebra) -> Self {
        Indecomposable::String(w.canonical(r))
    }

    pub fn band(b: BandData, r: &StringAlgebra) -> Self {
        Indecomposable::Band(b.canonical(r))
    }

    pub fn dim(&self) -> usize {
        match self {
            Indecomposable::String(w) => w.len() + 1,
            Indecomposable::Band(b) => b.dim(),
        }
    }

    pub fn is_band(&self) -> bool {
        matches!(self, Indecomposable::Band(_))
    }

    pub fn validate(&self, r: &StringAlgebra) -> Result<(), ModuleError> {
        match self {
            Indecomposable::String(w) => w.validate(r),
            Indecomposable::Band(b) => b.validate(r),
        }
    }

    pub fn to_module(&self, r: &Arc<StringAlgebra>) -> Result<RModule, ModuleError> {
        match self {
            Indecomposable::String(w) => string_module(w, r),
            Indecomposable::Band(b) => band_module(b, r),
        }
    }

    /// One line of the module spec format.
    pub fn render(&self, r: &StringAlgebra) -> String {
        match self {
            Indecomposable::String(w) => format!("string: {}", w.render(r)),
            Indecomposable::Band(b) => format!("band: {}", b.render(r)),
        }
    }
}

/// A direct sum of indecomposables with multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    algebra: Arc<StringAlgebra>,
    parts: BTreeMap<Indecomposable, usize>,
}

impl Decomposition {
    pub fn new(algebra: Arc<StringAlgebra>) -> Self {
        Decomposition { algebra, parts: BTreeMap::new() }
    }

    pub fn single(algebra: Arc<StringAlgebra>, ind: Indecomposable) -> Self {
        let mut d = Decomposition::new(algebra);
        d.add(ind, 1);
        d
    }

    pub fn algebra(&self) -> &Arc<StringAlgebra> {
        &self.algebra
    }

    /// Adds `mult` copies, canonicalising the label first.
    pub fn add(&mut self, ind: Indecomposable, mult: usize) {
        if mult == 0 {
            return;
        }
        let ind = match ind {
            Indecomposable::String(w) => Indecomposable::string(w, &self.algebra),
            Indecomposable::Band(b) => Indecomposable::band(b, &self.algebra),
        };
        *self.parts.entry(ind).or_insert(0) += mult;
    }

    pub fn merge(&mut self, other: &Decomposition) {
        for (k, &v) in &other.parts {
            self.add(k.clone(), v);
        }
    }

    pub fn parts(&self) -> &BTreeMap<Indecomposable, usize> {
        &self.parts
    }

    pub fn multiplicity(&self, ind: &Indecomposable) -> usize {
        self.parts.get(ind).copied().unwrap_or(0)
    }

    pub fn dim(&self) -> usize {
        self.parts.iter().map(|(k, &m)| k.dim() * m).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Number of indecomposable summands counted with multiplicity.
    pub fn count(&self) -> usize {
        self.parts.values().sum()
    }

    /// Summands in order, each repeated by its multiplicity.
    pub fn summands(&self) -> impl Iterator<Item = &Indecomposable> {
        self.parts.iter().flat_map(|(k, &m)| std::iter::repeat_n(k, m))
    }

    pub fn to_module(&self) -> Result<RModule, ModuleError> {
        let mut cache: Vec<(RModule, usize)> = Vec::new();
        for (k, &m) in &self.parts {
            cache.push((k.to_module(&self.algebra)?, m));
        }
        RModule::direct_sum_all(
            self.algebra.clone(),
            cache.iter().flat_map(|(m, k)| std::iter::repeat_n(m, *k)),
        )
    }

    /// Module spec text, one line per distinct summand.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, &m) in &self.parts {
            out.push_str(&k.render(&self.algebra));
            if m > 1 {
                out.push_str(&format!(" ; mult={m}"));
            }
            out.push('\n');
        }
        out
    }
}
