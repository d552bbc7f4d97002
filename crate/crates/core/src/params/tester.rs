use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{evaluate, parse_indecomposable, ParamError, ParameterId};
use crate::algebra::{parse_algebra_spec, rmatrix_emit, rmatrix_parse, RMatrix, StringAlgebra};
use crate::limitlab::{build_tile_catalog, CatalogCaps, TileCatalog};
use crate::module::{Decomposition, RModule};
use crate::rank::{Ranker, TestSuite};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TesterConfig {
    /// Defaults to `ε/4`.
    pub kappa: Option<Rational>,
    pub caps: CatalogCaps,
    /// Largest test matrix shape.
    pub shape: usize,
    pub max_tests: usize,
    pub seed: u64,
    /// Powers `1, 2, 4, …` up to this are probed for stabilization.
    pub max_power: usize,
    /// Extra candidate matrices drawn when two tiles need separating.
    pub pool: usize,
}

impl Default for TesterConfig {
    fn default() -> Self {
        TesterConfig {
            kappa: None,
            caps: CatalogCaps::default(),
            shape: 2,
            max_tests: crate::rank::DEFAULT_MAX_TESTS,
            seed: 0,
            max_power: 4,
            pool: 200,
        }
    }
}

/// Precomputed tables for estimating `p(M)` from approximate values of
/// `rk_M` on the test matrices.
#[derive(Debug, Clone)]
pub struct Tester {
    pub parameter: ParameterId,
    pub algebra: Arc<StringAlgebra>,
    pub epsilon: Rational,
    pub kappa: Rational,
    /// Declared error of the rank estimates, `κ/2`.
    pub delta: Rational,
    /// Stabilization power: tile values are `p(Q_j^n)`.
    pub n: usize,
    pub stabilized: bool,
    pub tests: Vec<RMatrix>,
    pub catalog: TileCatalog,
    /// `profiles[j][i] = rk_{Q_j}(A_i)`.
    pub profiles: Vec<Vec<Rational>>,
    pub values: Vec<Rational>,
    /// Tile pairs whose values differ by more than `ε/2` but whose profiles
    /// stay within `2κ` of each other.
    pub ambiguous: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TesterAnswer {
    pub tile: usize,
    pub label: String,
    #[serde(serialize_with = "crate::rational::ser")]
    pub value: Rational,
    #[serde(serialize_with = "crate::rational::ser")]
    pub radius: Rational,
}

fn power_of(t: &crate::module::Indecomposable, k: usize, r: &Arc<StringAlgebra>) -> Decomposition {
    let mut d = Decomposition::new(r.clone());
    d.add(t.clone(), k);
    d
}

fn sup_distance(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| rational::abs_diff(x, y)).max().unwrap_or_else(rational::zero)
}

fn unseparated(profiles: &[Vec<Rational>], values: &[Rational], eps: &Rational, kappa: &Rational) -> Vec<(usize, usize)> {
    let far = eps / rational::int(2);
    let close = kappa * rational::int(2);
    let mut out = Vec::new();
    for j in 0..values.len() {
        for k in j + 1..values.len() {
            if rational::abs_diff(&values[j], &values[k]) > far && sup_distance(&profiles[j], &profiles[k]) <= close {
                out.push((j, k));
            }
        }
    }
    out
}

/// Builds the catalog, the test matrices and the table `p_j = p(Q_j^n)`.
///
/// `n` is the smallest probed power with `|p(Q^{2n}) - p(Q^n)| < ε/10` on
/// every tile. Tile pairs with values more than `ε/2` apart whose profiles
/// lie within `2κ` get extra test matrices from a larger seeded pool; pairs
/// that stay close are listed in [`Tester::ambiguous`].
pub fn build_tester(p: &ParameterId, eps: &Rational, r: &Arc<StringAlgebra>, cfg: &TesterConfig) -> Result<Tester, ParamError> {
    if *eps <= rational::zero() || *eps > rational::int(1) {
        return Err(ParamError::BadParameter(format!("ε = {} outside (0, 1]", rational::render(eps))));
    }
    let kappa = cfg.kappa.clone().unwrap_or_else(|| eps / rational::int(4));
    if kappa <= rational::zero() {
        return Err(ParamError::BadParameter("κ must be positive".into()));
    }
    let delta = &kappa / rational::int(2);
    let catalog = build_tile_catalog(r, cfg.caps)?;
    let h = r.field().order() - 1;
    let suite = TestSuite::new(r, cfg.shape, h, cfg.max_tests, cfg.seed);
    let mut tests: Vec<RMatrix> = suite.matrices().to_vec();
    let modules = catalog.modules()?;
    let rankers: Vec<Ranker> = modules.iter().map(Ranker::new).collect();
    let mut profiles: Vec<Vec<Rational>> = rankers
        .par_iter()
        .map(|rk| tests.iter().map(|a| rk.rk(a)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<_, _>>()?;

    let tenth = eps / rational::int(10);
    let mut n = 1;
    let mut stabilized = false;
    let mut values: Vec<Rational> = Vec::new();
    while n <= cfg.max_power.max(1) {
        let here: Vec<Rational> = catalog
            .tiles
            .par_iter()
            .map(|t| evaluate(p, &power_of(t, n, r).to_module()?, Some(&power_of(t, n, r))))
            .collect::<Result<_, _>>()?;
        let doubled: Result<Vec<Rational>, ParamError> = catalog
            .tiles
            .par_iter()
            .map(|t| evaluate(p, &power_of(t, 2 * n, r).to_module()?, Some(&power_of(t, 2 * n, r))))
            .collect();
        values = here;
        match doubled {
            Ok(d) if values.iter().zip(&d).all(|(a, b)| rational::abs_diff(a, b) < tenth) => {
                stabilized = true;
                break;
            }
            Ok(_) if 2 * n <= cfg.max_power => n *= 2,
            Ok(_) | Err(ParamError::BudgetExceeded { .. }) => break,
            Err(e) => return Err(e),
        }
    }

    let mut pending = unseparated(&profiles, &values, eps, &kappa);
    if !pending.is_empty() {
        let pool = TestSuite::new(r, cfg.shape + 1, h, cfg.max_tests + cfg.pool, cfg.seed ^ 0x9e37_79b9);
        let seen: std::collections::HashSet<String> = tests.iter().map(|a| rmatrix_emit(a, r)).collect();
        let mut candidates: Vec<RMatrix> =
            pool.matrices().iter().filter(|a| !seen.contains(&rmatrix_emit(a, r))).cloned().collect();
        let close = &kappa * rational::int(2);
        while let Some(&(j, k)) = pending.first() {
            let mut best: Option<(usize, Rational)> = None;
            for (c, a) in candidates.iter().enumerate() {
                let gap = rational::abs_diff(&rankers[j].rk(a)?, &rankers[k].rk(a)?);
                if best.as_ref().is_none_or(|(_, g)| gap > *g) {
                    best = Some((c, gap));
                }
            }
            match best {
                Some((c, gap)) if gap > close => {
                    let a = candidates.remove(c);
                    for (row, rk) in profiles.iter_mut().zip(&rankers) {
                        row.push(rk.rk(&a)?);
                    }
                    tests.push(a);
                    pending = unseparated(&profiles, &values, eps, &kappa);
                }
                _ => break,
            }
        }
    }
    let ambiguous = unseparated(&profiles, &values, eps, &kappa);
    Ok(Tester {
        parameter: p.clone(),
        algebra: r.clone(),
        epsilon: eps.clone(),
        kappa,
        delta,
        n,
        stabilized,
        tests,
        catalog,
        profiles,
        values,
        ambiguous,
    })
}

/// Picks the tile whose profile is closest to the estimates in the
/// sup-norm, ties going to the earlier tile, and returns its value.
pub fn run_tester(t: &Tester, estimates: &[Rational]) -> Result<TesterAnswer, ParamError> {
    if estimates.len() != t.tests.len() {
        return Err(ParamError::BadParameter(format!(
            "{} estimates for {} test matrices",
            estimates.len(),
            t.tests.len()
        )));
    }
    let (tile, radius) = t
        .profiles
        .iter()
        .map(|row| sup_distance(row, estimates))
        .enumerate()
        .min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)))
        .ok_or_else(|| ParamError::BadParameter("empty catalog".into()))?;
    if radius > t.kappa {
        return Err(ParamError::NoTileWithinKappa { radius: rational::render(&radius), kappa: rational::render(&t.kappa) });
    }
    Ok(TesterAnswer {
        tile,
        label: t.catalog.tiles[tile].render(&t.algebra),
        value: t.values[tile].clone(),
        radius,
    })
}

/// `rk_M(A_i)` for every test matrix, computed exactly.
pub fn exact_estimates(t: &Tester, m: &RModule) -> Result<Vec<Rational>, ParamError> {
    let rk = Ranker::new(m);
    Ok(t.tests.iter().map(|a| rk.rk(a)).collect::<Result<_, _>>()?)
}

#[derive(Serialize, Deserialize)]
struct Bundle {
    algebra: String,
    parameter: String,
    epsilon: String,
    kappa: String,
    delta: String,
    n: usize,
    stabilized: bool,
    caps: CatalogCaps,
    tests: Vec<String>,
    catalog: Vec<String>,
    values: Vec<String>,
    profiles: Vec<Vec<String>>,
    ambiguous: Vec<(usize, usize)>,
}

fn parse_rat(s: &str) -> Result<Rational, ParamError> {
    rational::parse(s).ok_or_else(|| ParamError::Bundle(format!("bad rational {s:?}")))
}

impl Tester {
    pub fn to_json(&self) -> String {
        let r = &self.algebra;
        let b = Bundle {
            algebra: r.to_string(),
            parameter: self.parameter.render(r),
            epsilon: rational::render(&self.epsilon),
            kappa: rational::render(&self.kappa),
            delta: rational::render(&self.delta),
            n: self.n,
            stabilized: self.stabilized,
            caps: self.catalog.caps,
            tests: self.tests.iter().map(|a| rmatrix_emit(a, r)).collect(),
            catalog: self.catalog.labels(),
            values: self.values.iter().map(rational::render).collect(),
            profiles: self.profiles.iter().map(|row| row.iter().map(rational::render).collect()).collect(),
            ambiguous: self.ambiguous.clone(),
        };
        serde_json::to_string_pretty(&b).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Tester, ParamError> {
        let b: Bundle = serde_json::from_str(text).map_err(|e| ParamError::Bundle(e.to_string()))?;
        let r = Arc::new(parse_algebra_spec(&b.algebra)?);
        let tiles = b.catalog.iter().map(|l| parse_indecomposable(l, &r)).collect::<Result<Vec<_>, _>>()?;
        let tests = b.tests.iter().map(|a| rmatrix_parse(a, &r)).collect::<Result<Vec<_>, _>>()?;
        let values = b.values.iter().map(|v| parse_rat(v)).collect::<Result<Vec<_>, _>>()?;
        let profiles = b
            .profiles
            .iter()
            .map(|row| row.iter().map(|v| parse_rat(v)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        if values.len() != tiles.len() || profiles.len() != tiles.len() || profiles.iter().any(|p| p.len() != tests.len()) {
            return Err(ParamError::Bundle("table sizes do not match the catalog and tests".into()));
        }
        let delta = parse_rat(&b.delta)?;
        if delta <= rational::zero() {
            return Err(ParamError::Bundle("δ must be positive".into()));
        }
        Ok(Tester {
            parameter: ParameterId::parse(&b.parameter, &r)?,
            algebra: r.clone(),
            epsilon: parse_rat(&b.epsilon)?,
            kappa: parse_rat(&b.kappa)?,
            delta,
            n: b.n,
            stabilized: b.stabilized,
            tests,
            catalog: TileCatalog { algebra: r, caps: b.caps, tiles },
            profiles,
            values,
            ambiguous: b.ambiguous,
        })
    }
}
