use std::sync::Arc;

use super::word::{BandData, StringWord};
use super::{ModuleError, RModule};
use crate::algebra::StringAlgebra;
use crate::gf::FieldMatrix;

/// The string module `M(S)` with basis `z_0, ..., z_n`.
///
/// `C_i = α` gives `α z_i = z_{i-1}`; `C_i = α^{-1}` gives `α z_{i-1} = z_i`.
pub fn string_module(s: &StringWord, r: &Arc<StringAlgebra>) -> Result<RModule, ModuleError> {
    s.validate(r)?;
    let n = s.len();
    let vob: Vec<usize> = (0..=n).map(|i| s.vertex_at(i, r)).collect();
    let mut action = vec![FieldMatrix::zeros(n + 1, n + 1); r.quiver().num_arrows()];
    for (k, l) in s.letters.iter().enumerate() {
        let i = k + 1;
        if l.inverse {
            action[l.arrow].set(i, i - 1, 1);
        } else {
            action[l.arrow].set(i - 1, i, 1);
        }
    }
    RModule::new(r.clone(), vob, action)
}

/// The band module `M(S, φ)`, `φ` the companion matrix of `f^power`.
///
/// Slices `V_1..V_n` are stored in order, each in the basis `1, x, ...`.
/// Letter `C_i` joins slice `i-1` (slice 0 meaning slice `n`) and slice
/// `i`; the twist by `φ` sits on `C_2`, or on `C_1` when `n = 1`.
pub fn band_module(b: &BandData, r: &Arc<StringAlgebra>) -> Result<RModule, ModuleError> {
    b.validate(r)?;
    let f = r.field();
    let n = b.word.len();
    let d = b.slice_dim();
    let phi = b.f.pow(b.power, f).companion(f);
    let phi_inv = phi.inverse(f).ok_or(ModuleError::FVanishesAtZero)?;
    let dim = n * d;
    let mut vob = Vec::with_capacity(dim);
    for i in 1..=n {
        vob.extend(std::iter::repeat_n(b.word.letters[i - 1].source(r), d));
    }
    let twist = if n >= 2 { 2 } else { 1 };
    let mut action = vec![FieldMatrix::zeros(dim, dim); r.quiver().num_arrows()];
    // slice index (1-based, 0 means n) to its offset
    let off = |i: usize| if i == 0 { (n - 1) * d } else { (i - 1) * d };
    for (k, l) in b.word.letters.iter().enumerate() {
        let i = k + 1;
        let (from, to) = if l.inverse { (off(i - 1), off(i)) } else { (off(i), off(i - 1)) };
        let block = match (i == twist, l.inverse) {
            (true, false) => phi.clone(),
            (true, true) => phi_inv.clone(),
            (false, _) => FieldMatrix::identity(d),
        };
        let m = &mut action[l.arrow];
        for row in 0..d {
            for col in 0..d {
                let v = block.get(row, col);
                if v != 0 {
                    m.set(to + row, from + col, v);
                }
            }
        }
    }
    RModule::new(r.clone(), vob, action)
}
