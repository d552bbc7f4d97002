//! Acceptance suite: one PASS/FAIL line per criterion.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::{BTreeMap, HashSet};
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use stringmod::algebra::{RMatrix, StringAlgebra};
use stringmod::gf::{FieldMatrix, FieldPolynomial};
use stringmod::limitlab::{
    build_tile_catalog, epsilon_isomorphism, tile_band_module, tile_jordan, tile_string_module, tolerance_schedule,
    verify_certificate, verify_tiling, CatalogCaps, IsoOutcome,
};
use stringmod::module::{BandData, Decomposition, Indecomposable, RModule, StringWord};
use stringmod::params::{
    build_tester, evaluate, exact_estimates, gen_number, gen_number_brute, random_trim, run_tester, weight,
    weight_checked, ParamError, ParameterId, TesterConfig,
};
use stringmod::pp::{pair_gap, pp_dim_by_rank, pp_subspace, string_counting_pair, PPFormula};
use stringmod::rank::{blow_up, sylvester_audit, trim_bound_check, weight_identity_check, Ranker, TestSuite};
use stringmod::rational::{self, Rational};
use stringmod::strings::{ball_stats, ball_stats_sampled, graph_of_strings, graph_to_module, hoeffding_epsilon, right_endpoint_count};

use common::{gp, kronecker, multisets, oracle_rank, random_decomposition, random_string, random_strings, shipped};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ratio(a: usize, b: usize) -> Rational {
    rational::ratio(a, b)
}

/// 100 random modules per algebra, 50 triples each, under 60 s in total.
fn sylvester() -> Verdict {
    let start = Instant::now();
    let mut violations = 0;
    let mut checks = 0;
    let mut oracle_mismatch = 0;
    let mut max_dim = 0;
    for (ai, (_, r)) in shipped().into_iter().enumerate() {
        let suite = TestSuite::default_for(&r);
        let results: Vec<(usize, usize, usize, usize)> = (0..100u64)
            .into_par_iter()
            .map(|i| {
                let seed = 1000 * ai as u64 + i;
                let mut g = rng(seed);
                let m = random_decomposition(&r, 200, true, &mut g).to_module().unwrap();
                let audit = sylvester_audit(&m, &suite, 50, seed).unwrap();
                let mut bad = 0;
                if m.dim() <= 40 {
                    let ranker = Ranker::new(&m);
                    for _ in 0..3 {
                        let a = RMatrix::random(2, 3, &r, &mut g);
                        let dense = blow_up(&m, &a).unwrap();
                        if oracle_rank(&dense, r.field().characteristic()) != ranker.rank(&a).unwrap() {
                            bad += 1;
                        }
                    }
                }
                (audit.violations.len(), audit.checks, bad, m.dim())
            })
            .collect();
        for (v, c, b, d) in results {
            violations += v;
            checks += c;
            oracle_mismatch += b;
            max_dim = max_dim.max(d);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        violations == 0 && oracle_mismatch == 0 && secs < 60.0,
        format!("4 algebras x 100 modules (dim <= {max_dim}), {checks} checks, {violations} violations, {oracle_mismatch} oracle mismatches, {secs:.1}s"),
    )
}

fn weight_identity() -> Verdict {
    let algebras = shipped();
    let mut bad = 0;
    let mut checked = 0;
    for i in 0..100u64 {
        let mut g = rng(2000 + i);
        let r = &algebras[i as usize % algebras.len()].1;
        let d = random_decomposition(r, 120, true, &mut g);
        let suite = TestSuite::new(r, 3, 1, 40, i);
        let parts: Vec<(RModule, usize)> = d.parts().iter().map(|(q, &k)| (q.to_module(r).unwrap(), k)).collect();
        let report = weight_identity_check(&parts, &suite).unwrap();
        checked += report.checked;
        if !report.ok() {
            bad += 1;
            continue;
        }
        let m = d.to_module().unwrap();
        let whole = Ranker::full(&m);
        let pieces: Vec<(Ranker, Rational)> =
            parts.iter().map(|(q, k)| (Ranker::full(q), ratio(k * q.dim(), m.dim()))).collect();
        for a in suite.matrices() {
            let sum: Rational = pieces.iter().map(|(rk, w)| w * rk.rk(a).unwrap()).sum();
            if whole.rk(a).unwrap() != sum {
                bad += 1;
            }
        }
    }
    verdict(bad == 0, format!("100 mixtures, {checked} identities, {bad} mismatches"))
}

fn pp_agreement() -> Verdict {
    let algebras = shipped();
    let mut bad = 0;
    for i in 0..200u64 {
        let mut g = rng(3000 + i);
        let r = &algebras[i as usize % algebras.len()].1;
        let m = random_decomposition(r, 60, true, &mut g).to_module().unwrap();
        let cols = g.gen_range(1..=3);
        let rows = g.gen_range(1..=3);
        let t = g.gen_range(1..=cols);
        let phi = PPFormula::new(RMatrix::random(rows, cols, r, &mut g), t).unwrap();
        let direct = ratio(pp_subspace(&m, &phi).unwrap().dim(), m.dim());
        if direct != pp_dim_by_rank(&Ranker::new(&m), &phi).unwrap() {
            bad += 1;
        }
    }
    verdict(bad == 0, format!("200 (M, phi), {bad} mismatches"))
}

/// End vertices of occurrences of `s` in `w` read either way, by direct
/// comparison of letters.
fn naive_right_ends(s: &StringWord, w: &StringWord, r: &StringAlgebra) -> usize {
    let k = s.len();
    let m = w.len();
    let inv = w.inverse(r);
    let mut ends = HashSet::new();
    for a in 0..(m + 1).saturating_sub(k) {
        if (0..k).all(|j| w.letters[a + j] == s.letters[j]) {
            ends.insert(a + k);
        }
        if (0..k).all(|j| inv.letters[a + j] == s.letters[j]) {
            ends.insert(m - (a + k));
        }
    }
    ends.len()
}

fn string_counting() -> Verdict {
    let algebras = [gp(2), gp(3), kronecker(2), kronecker(3)];
    let mut bad = 0;
    let mut total = 0;
    for i in 0..100u64 {
        let mut g = rng(4000 + i);
        let r = &algebras[i as usize % algebras.len()];
        let s = loop {
            let s = random_string(r, 8, &mut g);
            if !s.is_empty() {
                break s;
            }
        };
        let mut words = random_strings(r, 180, 16, &mut g);
        words.push(s.clone());
        words.push(s.inverse(r));
        let gr = graph_of_strings(&words, r).unwrap();
        let n = graph_to_module(&gr, r).unwrap();
        let (count, _) = right_endpoint_count(&s, &gr, r).unwrap();
        let naive: usize = words.iter().map(|w| naive_right_ends(&s, w, r)).sum();
        let gap = pair_gap(&n, &string_counting_pair(&s, r).unwrap()).unwrap();
        total += count;
        if count != gap || count != naive || n.dim() > 200 {
            bad += 1;
        }
    }
    verdict(bad == 0, format!("100 (S, N), {total} endpoints counted, {bad} mismatches"))
}

fn pp_weight() -> Verdict {
    let algebras = [gp(2), gp(3), kronecker(2), kronecker(3)];
    let mut bad = 0;
    for i in 0..50u64 {
        let mut g = rng(5000 + i);
        let r = &algebras[i as usize % algebras.len()];
        let s = loop {
            let s = random_string(r, 6, &mut g);
            if s.len() >= 2 {
                break s;
            }
        };
        let q = Indecomposable::string(s.clone(), r);
        let mut d = Decomposition::new(r.clone());
        d.add(q.clone(), g.gen_range(1..=4));
        for _ in 0..g.gen_range(1..=6) {
            d.add(Indecomposable::string(random_string(r, s.len() - 1, &mut g), r), g.gen_range(1..=3));
        }
        let pair = string_counting_pair(&s, r).unwrap();
        match weight_checked(&d, &q, Some(&pair)) {
            Ok(w) if w == weight(&d, &q) => {}
            _ => bad += 1,
        }
    }
    verdict(bad == 0, format!("50 isolated instances, {bad} disagreements"))
}

fn decappro() -> Verdict {
    let algebras = shipped();
    let deltas = [ratio(1, 10), ratio(1, 5), ratio(1, 4)];
    let mut bad = 0;
    let mut proper = 0;
    let mut checked = 0;
    for i in 0..100u64 {
        let mut g = rng(6000 + i);
        let r = &algebras[i as usize % algebras.len()].1;
        let m = random_decomposition(r, 80, true, &mut g).to_module().unwrap();
        let delta = deltas.choose(&mut g).unwrap();
        let n = random_trim(&m, delta, &mut g);
        let suite = TestSuite::new(r, 3, 1, 40, i);
        if n.dim() < m.dim() {
            proper += 1;
        }
        let p = r.field().characteristic();
        let budget = (rational::int(m.dim()) * delta).floor();
        if !common::is_invariant(&m, n.basis(), p) || rational::int(m.dim() - n.dim()) > budget {
            bad += 1;
            continue;
        }
        match trim_bound_check(&m, &n, &suite) {
            Ok(rep) if rep.ok() => checked += rep.checked,
            _ => bad += 1,
        }
    }
    verdict(bad == 0, format!("100 trims ({proper} proper), {checked} matrix bounds, {bad} failures"))
}

fn piece_rank(t: &stringmod::limitlab::Tiling, p: u32) -> (usize, usize) {
    let rows: Vec<Vec<u32>> = t
        .pieces
        .iter()
        .flat_map(|pc| pc.basis.iter())
        .map(|v| {
            let mut d = vec![0; t.ambient];
            for &(c, x) in v {
                d[c] = x;
            }
            d
        })
        .collect();
    if rows.is_empty() {
        return (0, 0);
    }
    (oracle_rank(&FieldMatrix::from_rows(&rows, t.ambient).unwrap(), p), rows.len())
}

fn tilings() -> Verdict {
    let algebras = [gp(2), gp(3), kronecker(2), kronecker(3)];
    let epsilons = [ratio(1, 2), ratio(1, 3), ratio(1, 4), ratio(1, 5)];
    let mut bad = Vec::new();
    for i in 0..100u64 {
        let mut g = rng(7000 + i);
        let r = &algebras[i as usize % algebras.len()];
        let f = r.field();
        let eps = epsilons.choose(&mut g).unwrap();
        let (t, ops) = match i % 3 {
            0 => tile_string_module(&random_string(r, 80, &mut g), eps, r).unwrap(),
            1 => {
                let deg = g.gen_range(1..=2);
                let polys = common::irreducibles(f, deg);
                let b = BandData::new(
                    StringWord::parse("x y^-1", r).unwrap(),
                    polys.choose(&mut g).unwrap().clone(),
                    g.gen_range(1..=12),
                );
                tile_band_module(&b, eps, r).unwrap()
            }
            _ => {
                let deg = g.gen_range(1..=3);
                let polys: Vec<FieldPolynomial> = FieldPolynomial::monic_of_degree(f, deg)
                    .filter(|p| p.is_irreducible(f).unwrap())
                    .collect();
                let (t, op) = tile_jordan(polys.choose(&mut g).unwrap(), g.gen_range(1..=30), eps, f).unwrap();
                (t, vec![op])
            }
        };
        let check = verify_tiling(&t, &ops, f);
        let (rank, rows) = piece_rank(&t, f.characteristic());
        if !check.ok() || rank != rows || t.pieces.iter().any(|p| p.dim() > t.bound) {
            bad.push(format!("input {i}: {:?}", check.failures));
        }
    }
    verdict(bad.is_empty(), format!("100 tilings, {} failures {}", bad.len(), bad.join("; ")))
}

/// `N` from `M` by replacing whole components, or by deleting single
/// vertices, touching at most `⌊δ dim M⌋` vertices.
fn perturb(words: &[StringWord], delta: &Rational, delete: bool, r: &StringAlgebra, g: &mut ChaCha8Rng) -> Vec<StringWord> {
    let dim: usize = words.iter().map(|w| w.len() + 1).sum();
    let budget = (rational::int(dim) * delta).floor().to_integer().try_into().unwrap_or(0usize);
    let mut out = words.to_vec();
    if delete {
        for _ in 0..budget {
            let c = g.gen_range(0..out.len());
            let w = out.swap_remove(c);
            let v = g.gen_range(0..=w.len());
            if v > 0 {
                out.push(w.subword(0, v - 1, r));
            }
            if v < w.len() {
                out.push(w.subword(v + 1, w.len(), r));
            }
        }
    } else {
        let mut removed = 0;
        out.shuffle(g);
        while let Some(w) = out.last() {
            if removed + w.len() + 1 > budget {
                break;
            }
            removed += w.len() + 1;
            out.pop();
        }
        let mut added = 0;
        while added < removed {
            let w = random_string(r, removed - added - 1, g);
            added += w.len() + 1;
            out.push(w);
        }
    }
    out
}

fn epsiso() -> Verdict {
    let algebras = [gp(2), gp(3), kronecker(2)];
    let deltas = [ratio(1, 20), ratio(1, 10), ratio(1, 8)];
    let mut bad = Vec::new();
    let mut worst = rational::zero();
    for i in 0..100u64 {
        let mut g = rng(8000 + i);
        let r = &algebras[i as usize % algebras.len()];
        let mut words = Vec::new();
        for _ in 0..g.gen_range(3..=5) {
            let w = random_string(r, 12, &mut g);
            for _ in 0..g.gen_range(3..=8) {
                words.push(w.clone());
            }
        }
        let delta = deltas.choose(&mut g).unwrap();
        let other = perturb(&words, delta, i % 2 == 1, r, &mut g);
        let left = graph_of_strings(&words, r).unwrap();
        let right = graph_of_strings(&other, r).unwrap();
        let eps = tolerance_schedule(delta);
        match epsilon_isomorphism(&left, &right, &eps, r) {
            IsoOutcome::Certificate(c) => {
                if let Err(e) = verify_certificate(&c, &left, &right, &eps, r) {
                    bad.push(format!("pair {i}: {e:?}"));
                }
                worst = worst.max(c.epsilon() / &eps);
            }
            IsoOutcome::NoCertificate { best_left, best_right, .. } => bad.push(format!(
                "pair {i}: none at {} (best {} / {})",
                rational::render(&eps),
                rational::render(&best_left),
                rational::render(&best_right)
            )),
        }
    }
    verdict(
        bad.is_empty(),
        format!("{}/100 certificates verify, worst share of allowance {}{}", 100 - bad.len(), rational::render(&worst), if bad.is_empty() { String::new() } else { format!(": {}", bad.join("; ")) }),
    )
}

fn nakayama() -> Verdict {
    let mut bad = Vec::new();
    let mut classes = 0;
    let caps = CatalogCaps { max_string_len: 6, band_dim_cap: 7, limit: 100_000 };
    for (name, r) in [("gp", gp(2)), ("kronecker", kronecker(2))] {
        let cat = build_tile_catalog(&r, caps).unwrap();
        // Indecomposables of the 2-Kronecker quiver over GF(2) up to dim 6:
        // two simples, one preprojective and one preinjective per dimension
        // vector (n, n±1), and closed points of P^1 of degree dividing n in
        // each (n, n): 3, 3+1, 3+2.
        if name == "kronecker" && cat.len() != 2 + 3 + 2 + 4 + 2 + 5 {
            bad.push(format!("kronecker catalog has {} tiles", cat.len()));
        }
        let sums = multisets(&cat.tiles, 6);
        classes += sums.len();
        let found: Vec<String> = sums
            .par_iter()
            .filter_map(|sum| {
                let mut d = Decomposition::new(r.clone());
                for &(t, k) in sum {
                    d.add(cat.tiles[t].clone(), k);
                }
                let m = d.to_module().unwrap();
                let formula = gen_number(&m).count;
                let brute = gen_number_brute(&m, 1 << 12).unwrap();
                (formula != brute).then(|| format!("{name} {}: {formula} vs {brute}", d.render()))
            })
            .collect();
        bad.extend(found);
    }
    verdict(bad.is_empty(), format!("{classes} isomorphism classes, {} mismatches {}", bad.len(), bad.join("; ")))
}

/// Rank profile over the tester's matrices, by whole-module ranks.
fn profile_of(tests: &[RMatrix], m: &RModule) -> Vec<Rational> {
    let rk = Ranker::full(m);
    tests.iter().map(|a| rk.rk(a).unwrap()).collect()
}

fn sup_distance(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| rational::abs_diff(x, y)).max().unwrap_or_else(rational::zero)
}

fn tester() -> Verdict {
    let r = gp(2);
    let eps = ratio(1, 2);
    let cfg = TesterConfig { caps: CatalogCaps { max_string_len: 3, band_dim_cap: 3, limit: 100 }, ..TesterConfig::default() };
    let params = ["g", "weight(string: x y^-1)", "homL(string: x)", "rank([[x, y]])"];
    let mut bad = Vec::new();
    let mut flagged = 0;
    let mut controls = 0;
    let mut near = 0;
    let mut worst = rational::zero();
    for (pi, text) in params.iter().enumerate() {
        let p = ParameterId::parse(text, &r).unwrap();
        let t = build_tester(&p, &eps, &r, &cfg).unwrap();
        if !t.ambiguous.is_empty() {
            bad.push(format!("{text}: ambiguous pairs {:?}", t.ambiguous));
        }
        let tiles = &t.catalog.tiles;
        for i in 0..25u64 {
            let mut g = rng(10_000 + 100 * pi as u64 + i);
            let j = g.gen_range(0..tiles.len());
            let mut d = Decomposition::new(r.clone());
            d.add(tiles[j].clone(), g.gen_range(6..=12));
            let budget = (&t.delta * rational::int(d.dim())).floor().to_integer().try_into().unwrap_or(0usize);
            let noise = &tiles[g.gen_range(0..tiles.len())];
            if noise.dim() <= budget {
                d.add(noise.clone(), 1);
            }
            let m = d.to_module().unwrap();
            let exact = evaluate(&p, &m, Some(&d)).unwrap();
            match run_tester(&t, &exact_estimates(&t, &m).unwrap()) {
                Ok(a) => {
                    let err = rational::abs_diff(&a.value, &exact);
                    if err > eps {
                        bad.push(format!("{text} module {i}: error {}", rational::render(&err)));
                    }
                    worst = worst.max(err);
                }
                Err(e) => bad.push(format!("{text} module {i}: {e}")),
            }
        }
        let tile_profiles: Vec<Vec<Rational>> =
            t.catalog.modules().unwrap().iter().map(|q| profile_of(&t.tests, &q.power(t.n))).collect();
        for a in 0..tiles.len() {
            for b in a + 1..tiles.len() {
                let lcm = num_integer_lcm(tiles[a].dim(), tiles[b].dim());
                let mut d = Decomposition::new(r.clone());
                d.add(tiles[a].clone(), lcm / tiles[a].dim());
                d.add(tiles[b].clone(), lcm / tiles[b].dim());
                let m = d.to_module().unwrap();
                let prof = profile_of(&t.tests, &m);
                let far = tile_profiles.iter().all(|q| sup_distance(q, &prof) > t.kappa);
                if !far {
                    near += 1;
                    continue;
                }
                controls += 1;
                match run_tester(&t, &prof) {
                    Err(ParamError::NoTileWithinKappa { .. }) => flagged += 1,
                    other => bad.push(format!("{text} control {a}+{b}: {:?}", other.map(|x| x.label))),
                }
            }
        }
    }
    verdict(
        bad.is_empty(),
        format!(
            "100 tiled modules, worst error {} <= 1/2; {flagged}/{controls} adversarial mixtures flagged ({near} mixtures within kappa of a tile skipped){}",
            rational::render(&worst),
            if bad.is_empty() { String::new() } else { format!(": {}", bad.join("; ")) }
        ),
    )
}

fn num_integer_lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    a / gcd(a, b) * b
}

fn sampling() -> Verdict {
    let r = gp(2);
    let mut g = rng(11_000);
    let mut words = Vec::new();
    let mut n = 0;
    while n < 10_000 {
        let w = random_string(&r, 40.min(10_000 - n - 1), &mut g);
        n += w.len() + 1;
        words.push(w);
    }
    let graph = graph_of_strings(&words, &r).unwrap();
    let samples = 1000;
    let tol = hoeffding_epsilon(samples, 0.05);
    let mut worst: f64 = 0.0;
    let mut types = 0;
    for radius in 1..=3 {
        let exact = ball_stats(&graph, radius, &r).unwrap();
        let mut failures: BTreeMap<String, usize> = BTreeMap::new();
        for seed in 0..200u64 {
            let s = ball_stats_sampled(&graph, radius, samples, seed, 0.05, false, &r).unwrap();
            for (h, p) in &exact.freq {
                let dev = (rational::to_f64(&s.profile.get(h)) - rational::to_f64(p)).abs();
                if dev > tol {
                    *failures.entry(h.render(&r)).or_default() += 1;
                }
            }
        }
        types += exact.freq.len();
        for &k in failures.values() {
            worst = worst.max(k as f64 / 200.0);
        }
    }
    verdict(
        worst <= 0.08,
        format!("{} vertices, {types} ball types over r <= 3, 200 seeds, worst failure fraction {worst:.3} at eps {tol:.4}", graph.num_vertices()),
    )
}

fn data(rel: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data");
    root.join(rel).to_string_lossy().into_owned()
}

fn run(args: &[String]) -> (Vec<u8>, Vec<u8>, Option<i32>) {
    let out = Command::new(env!("CARGO_BIN_EXE_stringmod")).args(args).output().expect("binary runs");
    (out.stdout, out.stderr, out.status.code())
}

fn determinism() -> Verdict {
    let gp = data("algebras/gp22.alg");
    let kr = data("algebras/kronecker2.alg");
    let mixed = data("modules/gp_mixed.mod");
    let strs = data("modules/gp_strings.mod");
    let pert = data("modules/gp_strings_perturbed.mod");
    let dir = std::env::temp_dir().join(format!("stringmod-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bundle = dir.join("tester.json").to_string_lossy().into_owned();
    let mut commands: Vec<Vec<String>> = vec![
        vec!["validate".into(), gp.clone(), "--module".into(), mixed.clone()],
        vec!["rank".into(), gp.clone(), mixed.clone()],
        vec!["rank".into(), kr.clone(), data("modules/kronecker_mixed.mod"), "--format".into(), "csv".into()],
        vec!["ppdim".into(), gp.clone(), mixed.clone(), data("formulas/x_divides.pp")],
        vec!["ppdim".into(), gp.clone(), mixed.clone(), data("formulas/x_image.pp")],
        vec!["stats".into(), gp.clone(), data("strings/gp_sample.txt"), "--radius".into(), "2".into()],
        vec!["stats".into(), gp.clone(), data("strings/gp_sample.txt"), data("strings/gp_long.txt")],
        vec!["sample".into(), gp.clone(), data("strings/gp_long.txt"), "--radius".into(), "2".into()],
        vec!["tile".into(), gp.clone(), mixed.clone(), "1/3".into()],
        vec!["epsiso".into(), gp.clone(), strs.clone(), pert.clone(), "1/10".into()],
        vec!["catalog".into(), gp.clone(), "--max-string-len".into(), "3".into(), "--band-dim-cap".into(), "3".into()],
        vec!["param".into(), gp.clone(), mixed.clone(), "g".into()],
        vec!["param".into(), gp.clone(), mixed.clone(), "i".into(), "--randomized".into()],
        vec!["param".into(), gp.clone(), mixed.clone(), "homL(string: x)".into(), "--format".into(), "table".into()],
        vec!["param".into(), gp.clone(), mixed.clone(), "g".into(), "--probe".into(), "--delta".into(), "1/5".into()],
        vec!["param".into(), gp.clone(), mixed.clone(), "i".into()],
        vec![
            "build-tester".into(),
            gp.clone(),
            "g".into(),
            "1/2".into(),
            "--max-string-len".into(),
            "3".into(),
            "--band-dim-cap".into(),
            "3".into(),
        ],
        vec!["--schema".into()],
    ];
    let mut bad = Vec::new();
    let mut runs = 0;
    for c in &commands {
        let a = run(c);
        let b = run(c);
        runs += 2;
        if a != b {
            bad.push(c[0].clone());
        }
        if c[0] == "build-tester" {
            std::fs::write(&bundle, &a.0).unwrap();
        }
    }
    commands = vec![vec!["test".into(), bundle.clone(), strs.clone()], vec!["test".into(), bundle, mixed.clone()]];
    for c in &commands {
        let a = run(c);
        runs += 2;
        if a != run(c) {
            bad.push("test".into());
        }
    }
    for jobs in ["1", "4"] {
        let c: Vec<String> = vec!["rank".into(), gp.clone(), mixed.clone(), "--jobs".into(), jobs.into()];
        if run(&c) != run(&["rank".into(), gp.clone(), mixed.clone()]) {
            bad.push(format!("rank --jobs {jobs}"));
        }
        runs += 2;
    }
    let out_a = dir.join("a");
    let out_b = dir.join("b");
    for out in [&out_a, &out_b] {
        run(&["catalog".into(), gp.clone(), "--max-string-len".into(), "3".into(), "--out".into(), out.to_string_lossy().into_owned()]);
        runs += 1;
    }
    let listing = |d: &PathBuf| {
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(d)
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
            })
            .collect();
        files.sort();
        files
    };
    if listing(&out_a) != listing(&out_b) || listing(&out_a).is_empty() {
        bad.push("catalog --out".into());
    }
    let _ = std::fs::remove_dir_all(&dir);
    verdict(bad.is_empty(), format!("{runs} runs of {} invocations, differing: {:?}", commands.len() + 22, bad))
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("Sylvester axioms", sylvester),
        ("weight identity", weight_identity),
        ("pp two-method agreement", pp_agreement),
        ("string counting", string_counting),
        ("pp weight extraction", pp_weight),
        ("trim bound", decappro),
        ("tiling verifier", tilings),
        ("epsilon-isomorphism certificates", epsiso),
        ("Nakayama oracle", nakayama),
        ("tester end-to-end", tester),
        ("sampling calibration", sampling),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let v = std::panic::catch_unwind(f).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            verdict(false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        if !v.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {} [{:.1}s]: {}",
            i + 1,
            if v.pass { "PASS" } else { "FAIL" },
            name,
            start.elapsed().as_secs_f64(),
            v.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
