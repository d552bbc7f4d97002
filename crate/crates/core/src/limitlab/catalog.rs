use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::LimitError;
use crate::algebra::StringAlgebra;
use crate::gf::FieldPolynomial;
use crate::module::{BandData, Decomposition, Indecomposable, Letter, RModule, StringWord};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogCaps {
    /// Strings of length strictly below this.
    pub max_string_len: usize,
    /// Bands of dimension strictly below this.
    pub band_dim_cap: usize,
    /// Refuse to build catalogs with more tiles.
    pub limit: usize,
}

impl Default for CatalogCaps {
    fn default() -> Self {
        CatalogCaps { max_string_len: 4, band_dim_cap: 5, limit: 10_000 }
    }
}

/// Pairwise non-isomorphic indecomposables: strings ordered by length then
/// word, followed by bands ordered by word and `(f, power)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TileCatalog {
    pub algebra: Arc<StringAlgebra>,
    pub caps: CatalogCaps,
    pub tiles: Vec<Indecomposable>,
}

impl TileCatalog {
    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn modules(&self) -> Result<Vec<RModule>, LimitError> {
        Ok(self.tiles.iter().map(|t| t.to_module(&self.algebra)).collect::<Result<Vec<_>, _>>()?)
    }

    pub fn labels(&self) -> Vec<String> {
        self.tiles.iter().map(|t| t.render(&self.algebra)).collect()
    }

    /// Largest tile dimension.
    pub fn max_dim(&self) -> usize {
        self.tiles.iter().map(Indecomposable::dim).max().unwrap_or(0)
    }
}

/// Every string of each length `0..=max_len`, both orientations.
fn all_strings(r: &StringAlgebra, max_len: usize, limit: usize) -> Result<Vec<Vec<StringWord>>, LimitError> {
    let mut by_len: Vec<Vec<StringWord>> = vec![(0..r.quiver().num_vertices()).map(StringWord::trivial).collect()];
    let mut total = by_len[0].len();
    for len in 1..=max_len {
        let mut next = Vec::new();
        for w in &by_len[len - 1] {
            let end = if w.is_empty() { w.vertex } else { w.letters[len - 2].source(r) };
            for a in 0..r.quiver().num_arrows() {
                for l in [Letter::direct(a), Letter::inv(a)] {
                    if l.target(r) != end {
                        continue;
                    }
                    let mut letters = w.letters.clone();
                    letters.push(l);
                    if let Some(c) = StringWord::from_letters(letters, r) {
                        if c.validate(r).is_ok() {
                            next.push(c);
                        }
                    }
                }
            }
        }
        total += next.len();
        if total > 2 * limit {
            return Err(LimitError::ExplosionGuard { limit });
        }
        by_len.push(next);
    }
    Ok(by_len)
}

/// Enumerates strings of length below `max_string_len` up to inversion, and
/// bands of dimension below `band_dim_cap` up to rotation and inversion,
/// over every monic irreducible `f` with `f(0) ≠ 0` and every power that
/// fits.
pub fn build_tile_catalog(r: &Arc<StringAlgebra>, caps: CatalogCaps) -> Result<TileCatalog, LimitError> {
    let f = r.field();
    let max_word = caps.max_string_len.max(caps.band_dim_cap).saturating_sub(1);
    let words = all_strings(r, max_word, caps.limit)?;
    let mut strings: BTreeSet<(usize, StringWord)> = BTreeSet::new();
    for (len, ws) in words.iter().enumerate().take(caps.max_string_len) {
        for w in ws {
            strings.insert((len, w.canonical(r)));
        }
    }
    let mut bands: BTreeSet<BandData> = BTreeSet::new();
    for (n, ws) in words.iter().enumerate().skip(1) {
        if n >= caps.band_dim_cap {
            break;
        }
        let cyclic: Vec<&StringWord> = ws.iter().filter(|w| w.is_cyclic(r) && !w.is_proper_power()).collect();
        if cyclic.is_empty() {
            continue;
        }
        for deg in 1.. {
            if n * deg >= caps.band_dim_cap {
                break;
            }
            let polys: Vec<FieldPolynomial> = FieldPolynomial::monic_of_degree(f, deg)
                .filter(|p| p.coeff(0) != 0 && p.is_irreducible(f).unwrap_or(false))
                .collect();
            for power in 1u32.. {
                if n * deg * power as usize >= caps.band_dim_cap {
                    break;
                }
                for w in &cyclic {
                    for p in &polys {
                        bands.insert(BandData::new((*w).clone(), p.clone(), power).canonical(r));
                        if strings.len() + bands.len() > caps.limit {
                            return Err(LimitError::ExplosionGuard { limit: caps.limit });
                        }
                    }
                }
            }
        }
    }
    let mut tiles: Vec<Indecomposable> = strings.into_iter().map(|(_, w)| Indecomposable::String(w)).collect();
    tiles.extend(bands.into_iter().map(Indecomposable::Band));
    if tiles.len() > caps.limit {
        return Err(LimitError::ExplosionGuard { limit: caps.limit });
    }
    Ok(TileCatalog { algebra: r.clone(), caps, tiles })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TilingMatch {
    pub tiles: bool,
    /// Largest `k` with `A^k` a summand of `M`.
    pub k: usize,
    #[serde(serialize_with = "crate::rational::ser")]
    pub covered: Rational,
}

/// Whether `A^k` is a direct summand of `M` covering at least `(1-ε) dim M`,
/// matching summands by canonical label.
pub fn epsilon_tiles(a: &Decomposition, m: &Decomposition, eps: &Rational) -> TilingMatch {
    let k = a.parts().iter().map(|(ind, &mult)| m.multiplicity(ind) / mult).min().unwrap_or(0);
    let covered = if m.dim() == 0 { rational::zero() } else { rational::ratio(k * a.dim(), m.dim()) };
    let tiles = k >= 1 && covered >= rational::int(1) - eps;
    TilingMatch { tiles, k, covered }
}

/// Bands of dimension below `threshold` go left, everything else right.
pub fn split_band_string(d: &Decomposition, threshold: usize) -> (Decomposition, Decomposition) {
    let mut small = Decomposition::new(d.algebra().clone());
    let mut rest = Decomposition::new(d.algebra().clone());
    for (ind, &mult) in d.parts() {
        if ind.is_band() && ind.dim() < threshold {
            small.add(ind.clone(), mult);
        } else {
            rest.add(ind.clone(), mult);
        }
    }
    (small, rest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FiniteField;

    #[test]
    fn gp_catalog() {
        let r = Arc::new(StringAlgebra::gelfand_ponomarev(FiniteField::prime(2).unwrap(), 2, 2));
        let caps = CatalogCaps { max_string_len: 3, band_dim_cap: 3, limit: 100 };
        let c = build_tile_catalog(&r, caps).unwrap();
        let labels = c.labels();
        assert_eq!(&labels[..3], &["string: e_v", "string: x", "string: y"]);
        assert!(labels.contains(&"string: x y^-1".to_string()));
        assert!(!labels.contains(&"string: y x^-1".to_string()));
        let unique: BTreeSet<&String> = labels.iter().collect();
        assert_eq!(unique.len(), labels.len());
        assert!(c.tiles.iter().any(|t| t.is_band()));
        let tiny = build_tile_catalog(&r, CatalogCaps { max_string_len: 1, band_dim_cap: 0, limit: 100 }).unwrap();
        assert_eq!(tiny.len(), 1);
        assert!(matches!(
            build_tile_catalog(&r, CatalogCaps { max_string_len: 30, band_dim_cap: 3, limit: 5 }),
            Err(LimitError::ExplosionGuard { .. })
        ));
    }

    #[test]
    fn tiles_and_split() {
        let r = Arc::new(StringAlgebra::gelfand_ponomarev(FiniteField::prime(2).unwrap(), 2, 2));
        let s = Indecomposable::string(StringWord::parse("x y^-1", &r).unwrap(), &r);
        let t = Indecomposable::string(StringWord::parse("x", &r).unwrap(), &r);
        let a = Decomposition::single(r.clone(), s.clone());
        let mut m = Decomposition::new(r.clone());
        m.add(s.clone(), 5);
        m.add(t.clone(), 1);
        let got = epsilon_tiles(&a, &m, &rational::ratio(1, 5));
        assert!(got.tiles);
        assert_eq!(got.k, 5);
        assert!(epsilon_tiles(&a, &a, &rational::ratio(1, 10)).tiles);
        let absent = Decomposition::single(r.clone(), Indecomposable::string(StringWord::parse("y", &r).unwrap(), &r));
        assert!(!epsilon_tiles(&absent, &m, &rational::ratio(1, 5)).tiles);
        let band = Indecomposable::band(
            BandData::new(StringWord::parse("x y^-1", &r).unwrap(), FieldPolynomial::new(vec![1, 1]), 2),
            &r,
        );
        let mut d = m.clone();
        d.add(band.clone(), 1);
        let (small, rest) = split_band_string(&d, 4);
        assert_eq!(small.count(), 0);
        assert_eq!(rest.count(), 7);
        let (small, _) = split_band_string(&d, 5);
        assert_eq!(small.multiplicity(&band), 1);
    }
}
