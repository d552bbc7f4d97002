//! Quivers with monomial relations, string-algebra validation, the path
//! basis of `R = KQ/I`, and matrices over `R`.

mod element;
mod parse;

pub use element::{AlgebraElement, RMatrix};
pub use parse::{parse_algebra_spec, rmatrix_emit, rmatrix_parse};

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::gf::{FiniteField, GfError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error("vertex {0} has more than two {1} arrows")]
    TooManyArrows(String, &'static str),
    #[error("arrow {alpha} is followed by both {beta1} and {beta2} with nonzero composites")]
    ConditionTwoViolation { alpha: String, beta1: String, beta2: String },
    #[error("arrow {alpha} is preceded by both {beta1} and {beta2} with nonzero composites")]
    ConditionThreeViolation { alpha: String, beta1: String, beta2: String },
    #[error("relations are not nilpotent: path {0} can be pumped")]
    NotNilpotent(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("unknown arrow {0}")]
    UnknownArrow(String),
    #[error("duplicate name {0}")]
    DuplicateName(String),
    #[error("forbidden path {0} must be a composable path of length at least 2")]
    InvalidForbidden(String),
    #[error("syntax error at line {line}, column {col}: {msg}")]
    SyntaxError { line: usize, col: usize, msg: String },
    #[error("unknown path {0}")]
    UnknownPath(String),
    #[error("matrices over different algebras")]
    AlgebraMismatch,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub label: String,
    pub source: usize,
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quiver {
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
}

impl Quiver {
    /// Arrows are `(label, source, target)` with vertex names.
    pub fn new(vertices: Vec<String>, arrows: &[(String, String, String)]) -> Result<Self, AlgebraError> {
        let mut seen = std::collections::HashSet::new();
        for v in &vertices {
            if !seen.insert(v.clone()) {
                return Err(AlgebraError::DuplicateName(v.clone()));
            }
        }
        let find = |name: &str| {
            vertices.iter().position(|v| v == name).ok_or_else(|| AlgebraError::UnknownVertex(name.to_string()))
        };
        let mut out = Vec::new();
        for (label, s, t) in arrows {
            if !seen.insert(label.clone()) {
                return Err(AlgebraError::DuplicateName(label.clone()));
            }
            out.push(Arrow { label: label.clone(), source: find(s)?, target: find(t)? });
        }
        Ok(Quiver { vertices, arrows: out })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn arrow_index(&self, label: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.label == label)
    }

    pub fn arrow(&self, i: usize) -> &Arrow {
        &self.arrows[i]
    }
}

/// A path in written order: `arrows[0]` is applied last. Trivial paths
/// carry their vertex and no arrows.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    pub vertex: usize,
    pub arrows: Vec<usize>,
}

impl Path {
    pub fn trivial(v: usize) -> Self {
        Path { vertex: v, arrows: Vec::new() }
    }

    /// Builds a path from arrow indices in written order, checking that
    /// consecutive arrows compose.
    pub fn from_arrows(q: &Quiver, arrows: Vec<usize>) -> Option<Self> {
        let last = *arrows.last()?;
        if arrows.windows(2).any(|w| q.arrow(w[1]).target != q.arrow(w[0]).source) {
            return None;
        }
        Some(Path { vertex: q.arrow(last).source, arrows })
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn source(&self, _q: &Quiver) -> usize {
        self.vertex
    }

    pub fn target(&self, q: &Quiver) -> usize {
        match self.arrows.first() {
            Some(&a) => q.arrow(a).target,
            None => self.vertex,
        }
    }

    pub fn render(&self, q: &Quiver) -> String {
        if self.arrows.is_empty() {
            format!("e_{}", q.vertices[self.vertex])
        } else {
            self.arrows.iter().map(|&a| q.arrow(a).label.as_str()).collect::<Vec<_>>().join(" ")
        }
    }
}

/// A string algebra `KQ/I` with `I` generated by paths.
#[derive(Debug, Clone)]
pub struct StringAlgebra {
    quiver: Quiver,
    field: FiniteField,
    forbidden: Vec<Vec<usize>>,
    q: usize,
    basis: Vec<Path>,
    index: HashMap<Path, usize>,
    /// `mul[i][j]`: basis index of `b_i · b_j`, if nonzero.
    mul: Vec<Vec<Option<usize>>>,
}

impl PartialEq for StringAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.quiver == other.quiver && self.field == other.field && self.forbidden == other.forbidden
    }
}

impl Eq for StringAlgebra {}

impl fmt::Display for StringAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", parse::algebra_emit(self))
    }
}

fn has_factor(path: &[usize], factor: &[usize]) -> bool {
    factor.len() <= path.len() && path.windows(factor.len()).any(|w| w == factor)
}

impl StringAlgebra {
    /// Checks the four string-algebra conditions and computes the path basis.
    pub fn validate(quiver: Quiver, forbidden: Vec<Vec<String>>, field: FiniteField) -> Result<Self, AlgebraError> {
        let mut forb = Vec::new();
        for f in &forbidden {
            let idx = f
                .iter()
                .map(|l| quiver.arrow_index(l).ok_or_else(|| AlgebraError::UnknownArrow(l.clone())))
                .collect::<Result<Vec<_>, _>>()?;
            if idx.len() < 2 || Path::from_arrows(&quiver, idx.clone()).is_none() {
                return Err(AlgebraError::InvalidForbidden(f.join(" ")));
            }
            if !forb.contains(&idx) {
                forb.push(idx);
            }
        }
        for (v, name) in quiver.vertices.iter().enumerate() {
            if quiver.arrows.iter().filter(|a| a.source == v).count() > 2 {
                return Err(AlgebraError::TooManyArrows(name.clone(), "outgoing"));
            }
            if quiver.arrows.iter().filter(|a| a.target == v).count() > 2 {
                return Err(AlgebraError::TooManyArrows(name.clone(), "incoming"));
            }
        }
        let nonzero2 = |later: usize, first: usize| -> bool {
            quiver.arrow(later).source == quiver.arrow(first).target && !forb.contains(&vec![later, first])
        };
        let label = |i: usize| quiver.arrow(i).label.clone();
        for a in 0..quiver.num_arrows() {
            let after: Vec<usize> = (0..quiver.num_arrows()).filter(|&b| nonzero2(b, a)).collect();
            if after.len() > 1 {
                return Err(AlgebraError::ConditionTwoViolation {
                    alpha: label(a),
                    beta1: label(after[0]),
                    beta2: label(after[1]),
                });
            }
            let before: Vec<usize> = (0..quiver.num_arrows()).filter(|&b| nonzero2(a, b)).collect();
            if before.len() > 1 {
                return Err(AlgebraError::ConditionThreeViolation {
                    alpha: label(a),
                    beta1: label(before[0]),
                    beta2: label(before[1]),
                });
            }
        }
        // Under condition (2) a nonzero path is fixed by its first arrow and
        // length, so a nonzero path longer than this repeats a window of
        // length (max relation length - 1) and can be pumped forever.
        let max_rel = forb.iter().map(|f| f.len()).max().unwrap_or(2);
        let limit = quiver.num_arrows() + max_rel;
        let mut basis: Vec<Path> = (0..quiver.num_vertices()).map(Path::trivial).collect();
        let mut layer: Vec<Path> = (0..quiver.num_arrows())
            .map(|a| Path { vertex: quiver.arrow(a).source, arrows: vec![a] })
            .collect();
        let mut len = 1;
        while !layer.is_empty() {
            if len > limit {
                return Err(AlgebraError::NotNilpotent(layer[0].render(&quiver)));
            }
            layer.sort_by(|x, y| {
                let lx: Vec<&str> = x.arrows.iter().map(|&a| quiver.arrow(a).label.as_str()).collect();
                let ly: Vec<&str> = y.arrows.iter().map(|&a| quiver.arrow(a).label.as_str()).collect();
                lx.cmp(&ly)
            });
            basis.extend(layer.iter().cloned());
            let mut next = Vec::new();
            for p in &layer {
                let t = p.target(&quiver);
                for b in 0..quiver.num_arrows() {
                    if quiver.arrow(b).source != t {
                        continue;
                    }
                    let mut arrows = vec![b];
                    arrows.extend_from_slice(&p.arrows);
                    if forb.iter().any(|f| has_factor(&arrows, f)) {
                        continue;
                    }
                    next.push(Path { vertex: p.vertex, arrows });
                }
            }
            layer = next;
            len += 1;
        }
        let q = 1 + basis.iter().map(|p| p.len()).max().unwrap_or(0);
        let index: HashMap<Path, usize> = basis.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let mul = basis
            .iter()
            .map(|a| {
                basis
                    .iter()
                    .map(|b| {
                        if a.source(&quiver) != b.target(&quiver) {
                            return None;
                        }
                        let mut arrows = a.arrows.clone();
                        arrows.extend_from_slice(&b.arrows);
                        let p = Path { vertex: b.vertex, arrows };
                        index.get(&p).copied()
                    })
                    .collect()
            })
            .collect();
        Ok(StringAlgebra { quiver, field, forbidden: forb, q, basis, index, mul })
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    /// Forbidden paths as arrow indices in written order.
    pub fn forbidden(&self) -> &[Vec<usize>] {
        &self.forbidden
    }

    /// Every path of length at least `q` lies in `I`.
    pub fn nilpotency_bound(&self) -> usize {
        self.q
    }

    pub fn path_basis(&self) -> &[Path] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_index(&self, p: &Path) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// Basis index of the product of basis elements `i · j`.
    pub fn basis_product(&self, i: usize, j: usize) -> Option<usize> {
        self.mul[i][j]
    }

    /// True if the arrow sequence (written order) is a composable path
    /// outside `I`.
    pub fn is_nonzero_path(&self, arrows: &[usize]) -> bool {
        match Path::from_arrows(&self.quiver, arrows.to_vec()) {
            Some(p) => self.index.contains_key(&p),
            None => false,
        }
    }

    pub fn arrow_label(&self, a: usize) -> &str {
        &self.quiver.arrow(a).label
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.quiver.vertices[v]
    }

    /// The example string algebra `K<x,y>/(x^m, y^n, xy, yx)` on one vertex.
    pub fn gelfand_ponomarev(field: FiniteField, m: usize, n: usize) -> Self {
        let quiver = Quiver::new(
            vec!["v".into()],
            &[("x".into(), "v".into(), "v".into()), ("y".into(), "v".into(), "v".into())],
        )
        .expect("well-formed quiver");
        let forbidden = vec![
            vec!["x".to_string(); m],
            vec!["y".to_string(); n],
            vec!["x".into(), "y".into()],
            vec!["y".into(), "x".into()],
        ];
        StringAlgebra::validate(quiver, forbidden, field).expect("string algebra")
    }

    /// Path algebra of the 2-Kronecker quiver `a ⇉ b` with arrows `x`, `y`.
    pub fn kronecker(field: FiniteField) -> Self {
        let quiver = Quiver::new(
            vec!["a".into(), "b".into()],
            &[("x".into(), "a".into(), "b".into()), ("y".into(), "a".into(), "b".into())],
        )
        .expect("well-formed quiver");
        StringAlgebra::validate(quiver, Vec::new(), field).expect("string algebra")
    }

    /// The identity `Σ_a e_a`.
    pub fn unit(&self) -> AlgebraElement {
        let mut e = AlgebraElement::zero();
        for v in 0..self.quiver.num_vertices() {
            e.add_term(v, 1, &self.field);
        }
        e
    }

    pub fn arrow_element(&self, a: usize) -> AlgebraElement {
        let p = Path { vertex: self.quiver.arrow(a).source, arrows: vec![a] };
        AlgebraElement::basis(self.index[&p])
    }

    pub fn vertex_element(&self, v: usize) -> AlgebraElement {
        AlgebraElement::basis(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf2() -> FiniteField {
        FiniteField::prime(2).unwrap()
    }

    #[test]
    fn example_algebra_basis() {
        let r = StringAlgebra::gelfand_ponomarev(gf2(), 2, 2);
        let names: Vec<String> = r.path_basis().iter().map(|p| p.render(r.quiver())).collect();
        assert_eq!(names, vec!["e_v", "x", "y"]);
        assert_eq!(r.nilpotency_bound(), 2);
    }

    #[test]
    fn kronecker_is_string_algebra() {
        let r = StringAlgebra::kronecker(gf2());
        assert_eq!(r.dim(), 4);
        assert_eq!(r.nilpotency_bound(), 2);
    }

    #[test]
    fn three_loops_rejected() {
        let q = Quiver::new(
            vec!["v".into()],
            &[
                ("x".into(), "v".into(), "v".into()),
                ("y".into(), "v".into(), "v".into()),
                ("z".into(), "v".into(), "v".into()),
            ],
        )
        .unwrap();
        assert!(matches!(StringAlgebra::validate(q, vec![], gf2()), Err(AlgebraError::TooManyArrows(..))));
    }

    #[test]
    fn condition_two_and_nilpotency() {
        let q = Quiver::new(
            vec!["v".into()],
            &[("x".into(), "v".into(), "v".into()), ("y".into(), "v".into(), "v".into())],
        )
        .unwrap();
        let forb = vec![vec!["x".to_string(), "x".to_string()]];
        assert!(matches!(
            StringAlgebra::validate(q.clone(), forb, gf2()),
            Err(AlgebraError::ConditionTwoViolation { .. })
        ));
        let forb = vec![vec!["x".to_string(), "x".to_string()], vec!["y".into(), "y".into()]];
        assert!(matches!(StringAlgebra::validate(q.clone(), forb, gf2()), Err(AlgebraError::NotNilpotent(_))));
        let forb = vec![vec!["x".to_string(), "x".to_string()], vec!["y".into(), "y".into()], vec!["x".into(), "y".into()]];
        assert_eq!(StringAlgebra::validate(q, forb, gf2()).unwrap().nilpotency_bound(), 3);
        let cyc = Quiver::new(
            vec!["a".into(), "b".into()],
            &[("x".into(), "a".into(), "b".into()), ("y".into(), "b".into(), "a".into())],
        )
        .unwrap();
        assert!(matches!(StringAlgebra::validate(cyc, vec![], gf2()), Err(AlgebraError::NotNilpotent(_))));
        // a single loop with x^3 = 0
        let q1 = Quiver::new(vec!["v".into()], &[("x".into(), "v".into(), "v".into())]).unwrap();
        let r = StringAlgebra::validate(q1.clone(), vec![vec!["x".into(); 3]], gf2()).unwrap();
        assert_eq!(r.nilpotency_bound(), 3);
        assert!(matches!(StringAlgebra::validate(q1, vec![], gf2()), Err(AlgebraError::NotNilpotent(_))));
    }

    #[test]
    fn products() {
        let r = StringAlgebra::gelfand_ponomarev(gf2(), 3, 2);
        let x = r.arrow_element(0);
        let y = r.arrow_element(1);
        let xx = x.mul(&x, &r);
        assert_eq!(xx.render(&r), "x x");
        assert!(xx.mul(&x, &r).is_zero());
        assert!(x.mul(&y, &r).is_zero());
        let e = r.vertex_element(0);
        assert_eq!(e.mul(&e, &r), e);
    }
}
