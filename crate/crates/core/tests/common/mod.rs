#![allow(dead_code)]

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use stringmod::algebra::StringAlgebra;
use stringmod::gf::{FieldMatrix, FieldPolynomial, FiniteField};
use stringmod::module::{BandData, Decomposition, Indecomposable, Letter, RModule, StringWord};

pub fn gp(p: u32) -> Arc<StringAlgebra> {
    Arc::new(StringAlgebra::gelfand_ponomarev(FiniteField::prime(p).unwrap(), 2, 2))
}

pub fn kronecker(p: u32) -> Arc<StringAlgebra> {
    Arc::new(StringAlgebra::kronecker(FiniteField::prime(p).unwrap()))
}

/// Both shipped algebras over GF(2) and GF(3).
pub fn shipped() -> Vec<(&'static str, Arc<StringAlgebra>)> {
    vec![("gp/2", gp(2)), ("gp/3", gp(3)), ("kronecker/2", kronecker(2)), ("kronecker/3", kronecker(3))]
}

fn letters(r: &StringAlgebra) -> Vec<Letter> {
    (0..r.quiver().num_arrows()).flat_map(|a| [Letter::direct(a), Letter::inv(a)]).collect()
}

/// Random walk over letters, stopping at `len` or a dead end.
pub fn random_string(r: &StringAlgebra, max_len: usize, rng: &mut impl Rng) -> StringWord {
    let len = rng.gen_range(0..=max_len);
    let mut word: Vec<Letter> = Vec::new();
    let mut all = letters(r);
    while word.len() < len {
        all.shuffle(rng);
        let next = all.iter().copied().find(|&l| {
            let mut w = word.clone();
            w.push(l);
            StringWord::from_letters(w, r).is_some_and(|s| s.validate(r).is_ok())
        });
        match next {
            Some(l) => word.push(l),
            None => break,
        }
    }
    StringWord::from_letters(word, r).unwrap_or_else(|| StringWord::trivial(rng.gen_range(0..r.quiver().num_vertices())))
}

pub fn irreducibles(f: &FiniteField, deg: usize) -> Vec<FieldPolynomial> {
    FieldPolynomial::monic_of_degree(f, deg).filter(|p| p.coeff(0) != 0 && p.is_irreducible(f).unwrap()).collect()
}

/// A band on `x y^-1` of dimension at most `max_dim`.
pub fn random_band(r: &StringAlgebra, max_dim: usize, rng: &mut impl Rng) -> Option<BandData> {
    if max_dim < 2 {
        return None;
    }
    let word = StringWord::parse("x y^-1", r).unwrap();
    let deg = rng.gen_range(1..=(max_dim / 2).min(2));
    let polys = irreducibles(r.field(), deg);
    let f = polys.choose(rng)?.clone();
    let power = rng.gen_range(1..=(max_dim / (2 * deg)).min(3)) as u32;
    Some(BandData::new(word, f, power))
}

/// Random string and band sums with total dimension at most `max_dim`.
pub fn random_decomposition(r: &Arc<StringAlgebra>, max_dim: usize, bands: bool, rng: &mut impl Rng) -> Decomposition {
    let target = rng.gen_range(1..=max_dim);
    let mut d = Decomposition::new(r.clone());
    for _ in 0..64 {
        let room = target - d.dim();
        if room == 0 {
            break;
        }
        let ind = if bands && rng.gen_bool(0.25) {
            match random_band(r, room, rng) {
                Some(b) => Indecomposable::band(b, r),
                None => continue,
            }
        } else {
            Indecomposable::string(random_string(r, (room - 1).min(24), rng), r)
        };
        let mult = rng.gen_range(1..=(room / ind.dim()).clamp(1, 3));
        if ind.dim() * mult <= room {
            d.add(ind, mult);
        }
    }
    if d.is_empty() {
        d.add(Indecomposable::string(StringWord::trivial(0), r), 1);
    }
    d
}

/// Random string words with total dimension at most `max_dim`.
pub fn random_strings(r: &StringAlgebra, max_dim: usize, max_len: usize, rng: &mut impl Rng) -> Vec<StringWord> {
    let target = rng.gen_range(1..=max_dim);
    let mut out: Vec<StringWord> = Vec::new();
    let mut dim = 0;
    while dim < target {
        let w = random_string(r, max_len.min(target - dim - 1), rng);
        dim += w.len() + 1;
        out.push(w);
    }
    out
}

/// Rank by plain Gaussian elimination over a prime field, independent of
/// the library's echelon code.
pub fn oracle_rank(m: &FieldMatrix, p: u32) -> usize {
    let p = p as u64;
    let mut a: Vec<Vec<u64>> = (0..m.rows()).map(|i| m.row(i).iter().map(|&x| x as u64 % p).collect()).collect();
    let cols = m.cols();
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..a.len()).find(|&i| a[i][c] != 0) else { continue };
        a.swap(rank, piv);
        let inv = modpow(a[rank][c], p - 2, p);
        for x in a[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..a.len() {
            if i != rank && a[i][c] != 0 {
                let k = a[i][c];
                let pivot = a[rank].clone();
                for (x, y) in a[i].iter_mut().zip(&pivot) {
                    *x = (*x + p * p - k * y) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn modpow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// Every multiset of `tiles` with total dimension in `1..=max_dim`.
pub fn multisets(tiles: &[Indecomposable], max_dim: usize) -> Vec<Vec<(usize, usize)>> {
    fn go(tiles: &[Indecomposable], start: usize, room: usize, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        for i in start..tiles.len() {
            let d = tiles[i].dim();
            let mut k = 1;
            while d * k <= room {
                cur.push((i, k));
                out.push(cur.clone());
                go(tiles, i + 1, room - d * k, cur, out);
                cur.pop();
                k += 1;
            }
        }
    }
    let mut out = Vec::new();
    go(tiles, 0, max_dim, &mut Vec::new(), &mut out);
    out
}

/// Whether every arrow maps the span of `basis` into itself, by rank.
pub fn is_invariant(m: &RModule, basis: &[Vec<u32>], p: u32) -> bool {
    if basis.is_empty() {
        return true;
    }
    let n = m.dim();
    let span = FieldMatrix::from_rows(basis, n).unwrap();
    let r0 = oracle_rank(&span, p);
    m.actions().iter().all(|a| {
        let images: Vec<Vec<u32>> = basis.iter().map(|v| a.mul_vec(v, m.algebra().field())).collect();
        let both = span.vstack(&FieldMatrix::from_rows(&images, n).unwrap());
        oracle_rank(&both, p) == r0
    })
}
