mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stringmod::gf::FieldMatrix;
use stringmod::limitlab::CatalogCaps;
use stringmod::module::{hom_dim, Decomposition, Indecomposable, RModule, StringWord};
use stringmod::params::{
    build_tester, evaluate, exact_estimates, gen_number, gen_number_brute, hom_param_l, hom_param_r, indep_number,
    is_independent, random_trim, regular_module, run_tester, stability_probe, submodule_core, weight, IndepMode,
    ParamError, ParameterId, Tester, TesterConfig,
};
use stringmod::rational::{self, Rational};

use common::{gp, is_invariant, kronecker, oracle_rank, random_decomposition};

fn small(seed: u64, kron: bool, max_dim: usize) -> (Decomposition, RModule) {
    let r = if kron { kronecker(2) } else { gp(2) };
    let mut g = ChaCha8Rng::seed_from_u64(seed);
    let d = random_decomposition(&r, max_dim, true, &mut g);
    let m = d.to_module().unwrap();
    (d, m)
}

fn all_vectors(n: usize) -> Vec<Vec<u32>> {
    (0..1usize << n).map(|c| (0..n).map(|i| ((c >> i) & 1) as u32).collect()).collect()
}

/// Largest `k` with some `m_1..m_k` whose translates `b m_i` over the path
/// basis are linearly independent, searched over every tuple.
fn brute_indep(m: &RModule) -> usize {
    let actions = m.basis_actions();
    let f = m.algebra().field();
    let rd = m.algebra().dim();
    let dense: Vec<FieldMatrix> = actions.iter().map(|a| a.to_dense()).collect();
    let translates = |v: &Vec<u32>| -> Vec<Vec<u32>> { dense.iter().map(|a| a.mul_vec(v, f)).collect() };
    let vs = all_vectors(m.dim());
    let free = |tuple: &[&Vec<u32>]| {
        let rows: Vec<Vec<u32>> = tuple.iter().flat_map(|v| translates(v)).collect();
        oracle_rank(&FieldMatrix::from_rows(&rows, m.dim()).unwrap(), 2) == tuple.len() * rd
    };
    if vs.iter().any(|a| vs.iter().any(|b| free(&[a, b]))) {
        2
    } else if vs.iter().any(|a| free(&[a])) {
        1
    } else {
        0
    }
}

#[test]
fn independence_matches_tuple_search() {
    for seed in 0..12 {
        for kron in [false, true] {
            let (_, m) = small(seed, kron, 7);
            let exact = indep_number(&m, &IndepMode::Exact { cap: 1 << 10 }).unwrap();
            assert!(exact.exact);
            assert_eq!(exact.count, brute_indep(&m), "{seed} {kron}");
            assert!(is_independent(&m, &exact.witness));
        }
    }
}

#[test]
fn regular_module_values() {
    for r in [gp(2), kronecker(3)] {
        let reg = regular_module(&r);
        assert_eq!(reg.dim(), r.dim());
        assert_eq!(gen_number(&reg).count, 1);
        let i = indep_number(&reg, &IndepMode::Exact { cap: 1 << 12 }).unwrap();
        assert_eq!((i.count, i.upper), (1, 1));
    }
}

#[test]
fn budget_is_enforced() {
    let (_, m) = small(3, false, 40);
    let big = m.power(3);
    assert!(matches!(gen_number_brute(&big, 16), Err(ParamError::BudgetExceeded { .. })));
    assert!(matches!(indep_number(&big, &IndepMode::Exact { cap: 16 }), Err(ParamError::BudgetExceeded { .. })));
    let rand = indep_number(&big, &IndepMode::Randomized { trials: 20, seed: 1 }).unwrap();
    assert!(!rand.exact && rand.count <= rand.upper);
    assert!(is_independent(&big, &rand.witness));
}

#[test]
fn weights_of_a_decomposition_sum_to_one() {
    for seed in 0..20 {
        let (d, _) = small(seed, seed % 2 == 0, 60);
        let total: Rational = d.parts().keys().map(|q| weight(&d, q)).sum();
        assert_eq!(total, rational::int(1));
    }
}

#[test]
fn hom_parameters_are_normalised_hom_dimensions() {
    let r = gp(2);
    let q = Indecomposable::string(StringWord::parse("x", &r).unwrap(), &r).to_module(&r).unwrap();
    for seed in 0..10 {
        let (_, m) = small(seed, false, 40);
        assert_eq!(hom_param_l(&q, &m).unwrap(), rational::ratio(hom_dim(&q, &m).unwrap(), m.dim()));
        assert_eq!(hom_param_r(&q, &m).unwrap(), rational::ratio(hom_dim(&m, &q).unwrap(), m.dim()));
    }
    assert!(matches!(hom_param_l(&q, &regular_module(&kronecker(2))), Err(ParamError::AlgebraMismatch)));
}

#[test]
fn submodule_core_is_the_largest_submodule_in_the_kernel() {
    for seed in 0..15 {
        let (_, m) = small(seed, seed % 2 == 1, 7);
        let mut g = ChaCha8Rng::seed_from_u64(seed);
        let phi: Vec<u32> = (0..m.dim()).map(|_| rand::Rng::gen_range(&mut g, 0..2)).collect();
        let core = submodule_core(&m, std::slice::from_ref(&phi));
        let f = m.algebra().field();
        let in_kernel = |v: &[u32]| v.iter().zip(&phi).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b))) == 0;
        assert!(is_invariant(&m, core.basis(), 2));
        assert!(core.basis().iter().all(|v| in_kernel(v)));
        for v in all_vectors(m.dim()) {
            if core.contains(&v, f) {
                continue;
            }
            let mut gens: Vec<Vec<u32>> = core.basis().to_vec();
            gens.push(v);
            let bigger = m.generated_submodule(&gens);
            assert!(bigger.basis().iter().any(|w| !in_kernel(w)), "seed {seed}");
        }
    }
}

#[test]
fn probe_tabulates_trims_and_powers() {
    let (d, m) = small(11, false, 40);
    let g = ParameterId::G;
    let rep = stability_probe(&g, &m, Some(&d), &rational::ratio(1, 5), 10, 3, 4).unwrap();
    assert_eq!(rep.trims.len(), 10);
    assert!(rep.trims.iter().all(|(c, _)| *c * 5 <= m.dim()));
    assert!(rep.powers.iter().all(|p| *p == rep.value));
    assert!(rep.cauchy.iter().all(|c| *c == rational::zero()));
    let w = ParameterId::Weight(d.parts().keys().next().unwrap().clone());
    let rep = stability_probe(&w, &m, Some(&d), &rational::ratio(1, 5), 10, 3, 4).unwrap();
    assert!(rep.trims.is_empty());
}

#[test]
fn parameter_names_round_trip() {
    let r = gp(2);
    for text in ["g", "i", "weight(string: x y^-1)", "homL(string: x)", "homR(band: x y^-1 ; f=[1,1] ; n=1)", "rank([[x, y], [0, e_v]])"] {
        let p = ParameterId::parse(text, &r).unwrap();
        assert_eq!(ParameterId::parse(&p.render(&r), &r).unwrap(), p, "{text}");
    }
    assert!(ParameterId::parse("weight(x)", &r).is_err());
    assert!(ParameterId::parse("frobnicate", &r).is_err());
}

#[test]
fn tester_bundle_round_trips_and_answers() {
    let r = kronecker(2);
    let cfg = TesterConfig { caps: CatalogCaps { max_string_len: 3, band_dim_cap: 3, limit: 100 }, ..TesterConfig::default() };
    let p = ParameterId::parse("homL(string: x)", &r).unwrap();
    let t = build_tester(&p, &rational::ratio(1, 2), &r, &cfg).unwrap();
    let back = Tester::from_json(&t.to_json()).unwrap();
    assert_eq!(back.to_json(), t.to_json());
    let tiles = t.catalog.modules().unwrap();
    for (j, q) in tiles.iter().enumerate() {
        let m = q.power(4);
        let a = run_tester(&back, &exact_estimates(&back, &m).unwrap()).unwrap();
        assert_eq!(a.radius, rational::zero());
        let exact = evaluate(&p, &m, None).unwrap();
        assert!(rational::abs_diff(&a.value, &exact) <= rational::ratio(1, 2), "tile {j}");
    }
    assert!(build_tester(&p, &rational::zero(), &r, &cfg).is_err());
    assert!(Tester::from_json("{}").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generator_count_matches_brute_force(seed in any::<u64>(), kron in any::<bool>()) {
        let (_, m) = small(seed, kron, 6);
        prop_assert_eq!(gen_number(&m).count, gen_number_brute(&m, 1 << 12).unwrap());
    }

    #[test]
    fn generator_count_is_subadditive(seed in any::<u64>(), kron in any::<bool>()) {
        let (_, a) = small(seed, kron, 30);
        let (_, b) = small(seed ^ 0xabc, kron, 30);
        let s = a.direct_sum(&b).unwrap();
        let (ga, gb, gs) = (gen_number(&a).count, gen_number(&b).count, gen_number(&s).count);
        prop_assert!(gs <= ga + gb);
        prop_assert!(gs >= ga.max(gb));
    }

    #[test]
    fn independence_is_superadditive(seed in any::<u64>()) {
        let (_, a) = small(seed, false, 5);
        let (_, b) = small(seed ^ 0x55, false, 5);
        let s = a.direct_sum(&b).unwrap();
        let mode = IndepMode::Exact { cap: 1 << 10 };
        let (ia, ib, is) = (indep_number(&a, &mode).unwrap(), indep_number(&b, &mode).unwrap(), indep_number(&s, &mode).unwrap());
        prop_assert!(is.count >= ia.count + ib.count);
        prop_assert!(is.count <= is.upper);
    }

    #[test]
    fn trims_are_submodules_within_budget(seed in any::<u64>(), which in 0usize..4, num in 1usize..4) {
        let (_, r) = common::shipped().swap_remove(which);
        let mut g = ChaCha8Rng::seed_from_u64(seed);
        let m = random_decomposition(&r, 60, true, &mut g).to_module().unwrap();
        let delta = rational::ratio(num, 10);
        let n = random_trim(&m, &delta, &mut g);
        let budget = m.dim() * num / 10;
        prop_assert!(m.dim() - n.dim() <= budget);
        prop_assert!(is_invariant(&m, n.basis(), r.field().characteristic()));
    }
}
