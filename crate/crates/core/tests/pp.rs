mod common;

use std::collections::HashSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stringmod::algebra::{rmatrix_parse, RMatrix};
use stringmod::module::StringWord;
use stringmod::pp::{
    dimension_function_audit, pair_gap, pp_dim, pp_dim_by_rank, pp_subspace, string_counting_pair, PPFormula, PPPair,
};
use stringmod::rank::{blow_up, Ranker};
use stringmod::rational;
use stringmod::strings::{graph_of_strings, graph_to_module, right_endpoint_count};

use common::{gp, kronecker, random_decomposition, random_string, random_strings, shipped};

fn vectors(len: usize, q: u32) -> impl Iterator<Item = Vec<u32>> {
    (0..(q as usize).pow(len as u32)).map(move |mut c| {
        (0..len)
            .map(|_| {
                let d = (c % q as usize) as u32;
                c /= q as usize;
                d
            })
            .collect()
    })
}

/// Every `x ∈ M^t` admitting some `y` with `A(x, y) = 0`, by enumeration.
fn brute_pp(m: &stringmod::module::RModule, phi: &PPFormula) -> HashSet<Vec<u32>> {
    let f = m.algebra().field();
    let q = f.order();
    let d = m.dim();
    let a = blow_up(m, &phi.matrix).unwrap();
    let free = phi.t * d;
    let exist = phi.vars() * d - free;
    let mut out = HashSet::new();
    for x in vectors(free, q) {
        let found = vectors(exist, q).any(|y| {
            let v: Vec<u32> = x.iter().chain(&y).copied().collect();
            a.mul_vec(&v, f).iter().all(|&e| e == 0)
        });
        if found {
            out.insert(x);
        }
    }
    out
}

#[test]
fn divisibility_on_the_regular_module() {
    let r = gp(2);
    let reg = stringmod::params::regular_module(&r);
    let divides = PPFormula::parse("t=1 [[e_v, x]]", &r).unwrap();
    assert_eq!(pp_dim(&reg, &divides).unwrap(), rational::ratio(1, 3));
    let annihilated = PPFormula::parse("t=1 [[x]]", &r).unwrap();
    assert_eq!(pp_dim(&reg, &annihilated).unwrap(), rational::ratio(2, 3));
    assert_eq!(pp_dim(&reg, &PPFormula::top(2)).unwrap(), rational::int(2));
    assert_eq!(pp_dim(&reg, &PPFormula::bottom(1, &r)).unwrap(), rational::zero());
}

#[test]
fn pairs_parse_and_measure() {
    let r = gp(2);
    let pair = PPPair::parse("phi: t=1 [[e_v, x]]\npsi: t=1 [[e_v]]\n", &r).unwrap();
    let reg = stringmod::params::regular_module(&r);
    assert_eq!(pair_gap(&reg, &pair).unwrap(), 1);
    assert!(PPPair::parse("phi: t=1 [[e_v]]\npsi: t=2 [[e_v, e_v]]\n", &r).is_err());
}

#[test]
fn counting_pair_on_a_small_graph() {
    let r = kronecker(2);
    let s = StringWord::parse("x y^-1", &r).unwrap();
    let words: Vec<StringWord> = ["x y^-1 x y^-1", "x", "y^-1 x"].iter().map(|w| StringWord::parse(w, &r).unwrap()).collect();
    let g = graph_of_strings(&words, &r).unwrap();
    let n = graph_to_module(&g, &r).unwrap();
    let (count, _) = right_endpoint_count(&s, &g, &r).unwrap();
    assert_eq!(count, 2);
    assert_eq!(pair_gap(&n, &string_counting_pair(&s, &r).unwrap()).unwrap(), count);
}

#[test]
fn dimension_function_audit_is_clean() {
    for (name, r) in shipped() {
        let mut g = ChaCha8Rng::seed_from_u64(3);
        let m = random_decomposition(&r, 40, true, &mut g).to_module().unwrap();
        let formulas: Vec<PPFormula> = (0..4)
            .map(|_| {
                let cols = g.gen_range(1..=2);
                PPFormula::new(RMatrix::random(2, cols, &r, &mut g), 1).unwrap()
            })
            .collect();
        let rep = dimension_function_audit(&m, &formulas, 10, 5).unwrap();
        assert!(rep.ok(), "{name}: {rep:?}");
    }
}

proptest! {
    #[test]
    fn pp_subspace_matches_enumeration(seed in any::<u64>(), which in 0usize..2, rows in 1usize..3, cols in 1usize..3) {
        let r = [gp(2), kronecker(2)][which].clone();
        let mut g = ChaCha8Rng::seed_from_u64(seed);
        let m = random_decomposition(&r, 4, true, &mut g).to_module().unwrap();
        let t = g.gen_range(1..=cols);
        let phi = PPFormula::new(RMatrix::random(rows, cols, &r, &mut g), t).unwrap();
        let direct = pp_subspace(&m, &phi).unwrap();
        let brute = brute_pp(&m, &phi);
        prop_assert_eq!(brute.len(), 2usize.pow(direct.dim() as u32));
        for x in &brute {
            prop_assert!(direct.contains(x, r.field()));
        }
    }

    #[test]
    fn both_routes_agree(seed in any::<u64>(), which in 0usize..4) {
        let (_, r) = shipped().swap_remove(which);
        let mut g = ChaCha8Rng::seed_from_u64(seed);
        let m = random_decomposition(&r, 40, true, &mut g).to_module().unwrap();
        let cols = g.gen_range(1..=3);
        let phi = PPFormula::new(RMatrix::random(g.gen_range(1..=3), cols, &r, &mut g), g.gen_range(1..=cols)).unwrap();
        let direct = rational::ratio(pp_subspace(&m, &phi).unwrap().dim(), m.dim());
        prop_assert_eq!(direct, pp_dim_by_rank(&Ranker::new(&m), &phi).unwrap());
    }

    #[test]
    fn lattice_operations_bound_dimensions(seed in any::<u64>()) {
        let r = gp(3);
        let mut g = ChaCha8Rng::seed_from_u64(seed);
        let m = random_decomposition(&r, 30, true, &mut g).to_module().unwrap();
        let a = PPFormula::new(RMatrix::random(1, 2, &r, &mut g), 1).unwrap();
        let b = PPFormula::new(RMatrix::random(2, 2, &r, &mut g), 1).unwrap();
        let (da, db) = (pp_dim(&m, &a).unwrap(), pp_dim(&m, &b).unwrap());
        let meet = pp_dim(&m, &a.conjunction(&b).unwrap()).unwrap();
        let join = pp_dim(&m, &a.sum(&b, &r).unwrap()).unwrap();
        prop_assert!(meet <= da.clone().min(db.clone()));
        prop_assert!(join >= da.clone().max(db.clone()));
        prop_assert_eq!(meet + join, da + db);
    }

    #[test]
    fn endpoint_counts_match_pair_gaps(seed in any::<u64>(), which in 0usize..4) {
        let (_, r) = shipped().swap_remove(which);
        let mut g = ChaCha8Rng::seed_from_u64(seed);
        let s = random_string(&r, 5, &mut g);
        prop_assume!(!s.is_empty());
        let mut words = random_strings(&r, 60, 10, &mut g);
        words.push(s.clone());
        let gr = graph_of_strings(&words, &r).unwrap();
        let n = graph_to_module(&gr, &r).unwrap();
        let (count, _) = right_endpoint_count(&s, &gr, &r).unwrap();
        prop_assert_eq!(pair_gap(&n, &string_counting_pair(&s, &r).unwrap()).unwrap(), count);
    }
}

#[test]
fn malformed_formulas_are_refused() {
    let r = gp(2);
    assert!(PPFormula::parse("t=3 [[e_v, x]]", &r).is_err());
    assert!(PPFormula::parse("[[e_v]]", &r).is_err());
    assert!(PPFormula::new(rmatrix_parse("[[x]]", &r).unwrap(), 0).is_err());
}
