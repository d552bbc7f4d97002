//! Module spec files.
//!
//! ```text
//! string: x y^-1
//! string: @v
//! band: x y^-1 ; f=[1,1] ; n=1 ; mult=2
//! raw:
//!   basis v v
//!   x: [[0,1],[0,0]]
//! end
//! ```
//! The module described is the direct sum of all entries. Arrows missing
//! from a `raw:` block act as zero.

use std::sync::Arc;

use super::decomp::{Decomposition, Indecomposable};
use super::word::{BandData, StringWord};
use super::{ModuleError, RModule};
use crate::algebra::StringAlgebra;
use crate::gf::{FieldMatrix, FieldPolynomial};

#[derive(Debug, Clone)]
pub struct ModuleSpec {
    pub decomposition: Decomposition,
    pub raw: Vec<RModule>,
}

impl ModuleSpec {
    pub fn to_module(&self) -> Result<RModule, ModuleError> {
        let mut m = self.decomposition.to_module()?;
        for r in &self.raw {
            m = m.direct_sum(r)?;
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.decomposition.dim() + self.raw.iter().map(|m| m.dim()).sum::<usize>()
    }
}

fn err(line: usize, msg: impl Into<String>) -> ModuleError {
    ModuleError::Syntax { line, msg: msg.into() }
}

fn parse_options(parts: &[&str], line: usize) -> Result<Vec<(String, String)>, ModuleError> {
    parts
        .iter()
        .map(|p| {
            let (k, v) = p.split_once('=').ok_or_else(|| err(line, format!("expected key=value, got {p:?}")))?;
            Ok((k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

fn parse_mult(opts: &[(String, String)], line: usize) -> Result<usize, ModuleError> {
    match opts.iter().find(|(k, _)| k == "mult") {
        Some((_, v)) => v.parse().map_err(|_| err(line, format!("bad multiplicity {v}"))),
        None => Ok(1),
    }
}

fn parse_poly(text: &str, line: usize) -> Result<FieldPolynomial, ModuleError> {
    let v: Vec<u32> = serde_json::from_str(text).map_err(|e| err(line, format!("bad polynomial {text}: {e}")))?;
    Ok(FieldPolynomial::new(v))
}

pub fn parse_module_spec(text: &str, r: &Arc<StringAlgebra>) -> Result<ModuleSpec, ModuleError> {
    let mut decomposition = Decomposition::new(r.clone());
    let mut raw = Vec::new();
    let lines: Vec<&str> = text.lines().collect();
    let mut i = 0;
    while i < lines.len() {
        let line = i + 1;
        let body = lines[i].split('#').next().unwrap_or("").trim();
        i += 1;
        if body.is_empty() {
            continue;
        }
        let (kind, rest) = body.split_once(':').ok_or_else(|| err(line, "expected `string:`, `band:` or `raw:`"))?;
        let fields: Vec<&str> = rest.split(';').collect();
        match kind.trim() {
            "string" => {
                let w = StringWord::parse(fields[0], r).map_err(|e| err(line, e.to_string()))?;
                let opts = parse_options(&fields[1..], line)?;
                w.validate(r)?;
                decomposition.add(Indecomposable::String(w), parse_mult(&opts, line)?);
            }
            "band" => {
                let w = StringWord::parse(fields[0], r).map_err(|e| err(line, e.to_string()))?;
                let opts = parse_options(&fields[1..], line)?;
                let f = opts
                    .iter()
                    .find(|(k, _)| k == "f")
                    .ok_or_else(|| err(line, "band needs f=[...]"))
                    .and_then(|(_, v)| parse_poly(v, line))?;
                let n = match opts.iter().find(|(k, _)| k == "n") {
                    Some((_, v)) => v.parse().map_err(|_| err(line, format!("bad power {v}")))?,
                    None => 1,
                };
                let b = BandData::new(w, f, n);
                b.validate(r)?;
                decomposition.add(Indecomposable::Band(b), parse_mult(&opts, line)?);
            }
            "raw" => {
                let mut vob: Option<Vec<usize>> = None;
                let mut actions: Vec<Option<FieldMatrix>> = vec![None; r.quiver().num_arrows()];
                let mut closed = false;
                while i < lines.len() {
                    let line = i + 1;
                    let body = lines[i].split('#').next().unwrap_or("").trim();
                    i += 1;
                    if body.is_empty() {
                        continue;
                    }
                    if body == "end" {
                        closed = true;
                        break;
                    }
                    if let Some(names) = body.strip_prefix("basis") {
                        let v = names
                            .split_whitespace()
                            .map(|n| r.quiver().vertex_index(n).ok_or_else(|| err(line, format!("unknown vertex {n}"))))
                            .collect::<Result<Vec<_>, _>>()?;
                        vob = Some(v);
                        continue;
                    }
                    if let Some(d) = body.strip_prefix("dim") {
                        let d: usize = d.trim().parse().map_err(|_| err(line, "bad dimension"))?;
                        if r.quiver().num_vertices() != 1 {
                            return Err(err(line, "`dim` needs a one-vertex quiver; use `basis`"));
                        }
                        vob = Some(vec![0; d]);
                        continue;
                    }
                    let (label, mat) = body.split_once(':').ok_or_else(|| err(line, "expected `arrow: [[...]]`"))?;
                    let a = r
                        .quiver()
                        .arrow_index(label.trim())
                        .ok_or_else(|| err(line, format!("unknown arrow {}", label.trim())))?;
                    let rows: Vec<Vec<u32>> =
                        serde_json::from_str(mat.trim()).map_err(|e| err(line, format!("bad matrix: {e}")))?;
                    let n = rows.len();
                    let m = FieldMatrix::from_rows(&rows, n).map_err(|e| err(line, e.to_string()))?;
                    actions[a] = Some(m);
                }
                if !closed {
                    return Err(err(line, "unterminated raw block"));
                }
                let vob = vob.ok_or_else(|| err(line, "raw block needs `basis` or `dim`"))?;
                let d = vob.len();
                let actions = actions.into_iter().map(|m| m.unwrap_or_else(|| FieldMatrix::zeros(d, d))).collect();
                raw.push(RModule::new(r.clone(), vob, actions)?);
            }
            other => return Err(err(line, format!("unknown entry kind {other}"))),
        }
    }
    Ok(ModuleSpec { decomposition, raw })
}
