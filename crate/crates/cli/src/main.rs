mod schema;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use stringmod::algebra::{parse_algebra_spec, rmatrix_parse, AlgebraError, RMatrix, StringAlgebra};
use stringmod::limitlab::{
    build_tile_catalog, epsilon_isomorphism, tile_decomposition, verify_tiling, CatalogCaps, LimitError,
};
use stringmod::module::{module_check, parse_module_spec, Decomposition, ModuleError, ModuleSpec};
use stringmod::params::{
    build_tester, evaluate, exact_estimates, gen_number, indep_number, run_tester, stability_probe, weight_checked,
    IndepMode, ParamError, ParameterId, Tester, TesterConfig,
};
use stringmod::pp::{pair_gap, pair_value, pp_dim, pp_subspace, PPFormula, PPPair, PpError};
use stringmod::rank::{profile_with, RankError, Ranker, TestSuite, DEFAULT_MAX_TESTS};
use stringmod::rational::{self, Rational};
use stringmod::strings::{
    ball_stats, ball_stats_sampled, graph_of_decomposition, graph_of_strings, parse_string_list, right_endpoint_count,
    stringconvergence_check, StringGraph, StringsError,
};

const DEFAULT_SEED: u64 = 20_240_101;

#[derive(Parser)]
#[command(name = "stringmod", version, about = "String and band modules over finite fields")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Add decimal approximations to rationals in tables.
    #[arg(long, global = true)]
    float: bool,
    /// Worker threads (output does not depend on it).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Print the JSON schemas of all payloads and exit.
    #[arg(long)]
    schema: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Check an algebra spec and list its path basis.
    Validate {
        algebra: PathBuf,
        /// Also check a module spec against the algebra.
        #[arg(long)]
        module: Option<PathBuf>,
    },
    /// Normalized ranks rk_M(A) on a test suite or given matrices.
    Rank {
        algebra: PathBuf,
        module: PathBuf,
        /// A matrix in the R-matrix grammar; repeatable.
        #[arg(long = "matrix")]
        matrices: Vec<String>,
        /// File with one matrix per line.
        #[arg(long)]
        matrix_file: Option<PathBuf>,
        /// Suite shapes up to s×s.
        #[arg(long, default_value_t = 2)]
        shape: usize,
        /// Largest suite coefficient code.
        #[arg(long)]
        coeff: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_MAX_TESTS)]
        max_tests: usize,
        /// Extra matrices appended to the suite, one per line.
        #[arg(long)]
        extras: Option<PathBuf>,
    },
    /// Dimension of a pp-definable subspace, or the gap of a pp-pair.
    Ppdim { algebra: PathBuf, module: PathBuf, formula: PathBuf },
    /// Exact ball-type statistics; several files give a convergence table.
    Stats {
        algebra: PathBuf,
        #[arg(required = true)]
        strings: Vec<PathBuf>,
        #[arg(long, default_value_t = 1)]
        radius: usize,
        /// Count right endvertices of this string; repeatable.
        #[arg(long = "count")]
        counts: Vec<String>,
        #[arg(long, default_value = "1/10")]
        tolerance: String,
    },
    /// Ball-type statistics from uniformly sampled vertices.
    Sample {
        algebra: PathBuf,
        strings: PathBuf,
        #[arg(long, default_value_t = 1)]
        radius: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        /// Visit every vertex once instead of sampling.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Tiling of a string/band sum with its independent verification.
    Tile { algebra: PathBuf, module: PathBuf, epsilon: String },
    /// ε-isomorphism certificate between two string sums.
    Epsiso { algebra: PathBuf, left: PathBuf, right: PathBuf, epsilon: String },
    /// Enumerate the tile catalog.
    Catalog {
        algebra: PathBuf,
        #[arg(long, default_value_t = CatalogCaps::default().max_string_len)]
        max_string_len: usize,
        #[arg(long, default_value_t = CatalogCaps::default().band_dim_cap)]
        band_dim_cap: usize,
        #[arg(long, default_value_t = CatalogCaps::default().limit)]
        limit: usize,
        /// Write one module spec per tile plus index.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a module parameter: g, i, weight(..), homL(..), homR(..), rank(..).
    Param {
        algebra: PathBuf,
        module: PathBuf,
        parameter: String,
        /// Randomized lower bound for i instead of exhaustive search.
        #[arg(long)]
        randomized: bool,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = stringmod::params::DEFAULT_SEARCH_CAP)]
        cap: usize,
        /// pp-pair cross-checking a weight.
        #[arg(long)]
        pair: Option<PathBuf>,
        /// Tabulate the two stability conditions.
        #[arg(long)]
        probe: bool,
        #[arg(long, default_value = "1/10")]
        delta: String,
        #[arg(long, default_value_t = 4)]
        max_power: usize,
    },
    /// Precompute a parameter tester.
    BuildTester {
        algebra: PathBuf,
        parameter: String,
        epsilon: String,
        #[arg(long)]
        kappa: Option<String>,
        #[arg(long, default_value_t = CatalogCaps::default().max_string_len)]
        max_string_len: usize,
        #[arg(long, default_value_t = CatalogCaps::default().band_dim_cap)]
        band_dim_cap: usize,
        #[arg(long, default_value_t = CatalogCaps::default().limit)]
        limit: usize,
        #[arg(long, default_value_t = 2)]
        shape: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_TESTS)]
        max_tests: usize,
        #[arg(long, default_value_t = 4)]
        max_power: usize,
        #[arg(long, default_value_t = 200)]
        pool: usize,
    },
    /// Run a tester bundle on a module or on rank estimates.
    Test {
        bundle: PathBuf,
        module: Option<PathBuf>,
        /// Estimates of rk_M(A_i), one rational per line.
        #[arg(long, conflicts_with = "module")]
        estimates: Option<PathBuf>,
    },
}

struct CliError {
    code: u8,
    kind: &'static str,
    message: String,
}

impl CliError {
    fn parse(message: impl Into<String>) -> Self {
        CliError { code: 2, kind: "parse", message: message.into() }
    }

    fn precondition(message: impl Into<String>) -> Self {
        CliError { code: 3, kind: "precondition", message: message.into() }
    }

    fn budget(message: impl Into<String>) -> Self {
        CliError { code: 4, kind: "budget", message: message.into() }
    }
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        match e {
            AlgebraError::SyntaxError { .. }
            | AlgebraError::UnknownPath(_)
            | AlgebraError::UnknownVertex(_)
            | AlgebraError::UnknownArrow(_)
            | AlgebraError::DuplicateName(_) => CliError::parse(e.to_string()),
            _ => CliError::precondition(e.to_string()),
        }
    }
}

impl From<ModuleError> for CliError {
    fn from(e: ModuleError) -> Self {
        match e {
            ModuleError::Syntax { .. } | ModuleError::Parse(_) => CliError::parse(e.to_string()),
            ModuleError::Algebra(a) => a.into(),
            _ => CliError::precondition(e.to_string()),
        }
    }
}

impl From<RankError> for CliError {
    fn from(e: RankError) -> Self {
        match e {
            RankError::Module(m) => m.into(),
            _ => CliError::precondition(e.to_string()),
        }
    }
}

impl From<PpError> for CliError {
    fn from(e: PpError) -> Self {
        match e {
            PpError::Syntax(_) => CliError::parse(e.to_string()),
            PpError::Module(m) => m.into(),
            PpError::Algebra(a) => a.into(),
            _ => CliError::precondition(e.to_string()),
        }
    }
}

impl From<StringsError> for CliError {
    fn from(e: StringsError) -> Self {
        match e {
            StringsError::InvalidString(m) => match m {
                ModuleError::Syntax { .. } | ModuleError::Parse(_) => CliError::parse(m.to_string()),
                m => CliError::precondition(m.to_string()),
            },
            _ => CliError::precondition(e.to_string()),
        }
    }
}

impl From<LimitError> for CliError {
    fn from(e: LimitError) -> Self {
        match e {
            LimitError::ExplosionGuard { .. } | LimitError::BudgetExceeded { .. } => CliError::budget(e.to_string()),
            LimitError::Module(m) => m.into(),
            _ => CliError::precondition(e.to_string()),
        }
    }
}

impl From<ParamError> for CliError {
    fn from(e: ParamError) -> Self {
        match e {
            ParamError::BudgetExceeded { .. } => CliError::budget(e.to_string()),
            ParamError::Bundle(_) | ParamError::BadParameter(_) => CliError::parse(e.to_string()),
            ParamError::Module(m) => m.into(),
            ParamError::Rank(r) => r.into(),
            ParamError::Limit(l) => l.into(),
            ParamError::Pp(p) => p.into(),
            ParamError::Algebra(a) => a.into(),
            _ => CliError::precondition(e.to_string()),
        }
    }
}

type Out = Result<Payload, CliError>;

/// A JSON payload with an optional dedicated CSV rendering.
struct Payload {
    json: Value,
    csv: Option<String>,
}

impl From<Value> for Payload {
    fn from(json: Value) -> Self {
        Payload { json, csv: None }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
}

fn load_algebra(path: &Path) -> Result<Arc<StringAlgebra>, CliError> {
    Ok(Arc::new(parse_algebra_spec(&read(path)?)?))
}

fn load_module(path: &Path, r: &Arc<StringAlgebra>) -> Result<ModuleSpec, CliError> {
    Ok(parse_module_spec(&read(path)?, r)?)
}

/// The decomposition of a spec without raw blocks.
fn decomposed(spec: &ModuleSpec) -> Result<&Decomposition, CliError> {
    if spec.raw.is_empty() {
        Ok(&spec.decomposition)
    } else {
        Err(LimitError::UnsupportedRawModule.into())
    }
}

/// `a/b`, an integer, or an exact decimal such as `0.1`.
fn parse_rational(text: &str) -> Result<Rational, CliError> {
    let t = text.trim();
    if let Some((int, frac)) = t.split_once('.') {
        if !frac.is_empty() && frac.chars().all(|c| c.is_ascii_digit()) && int.chars().all(|c| c.is_ascii_digit()) {
            let num = format!("{int}{frac}");
            let den = format!("1{}", "0".repeat(frac.len()));
            if let Some(r) = rational::parse(&format!("{num}/{den}")) {
                return Ok(r);
            }
        }
        return Err(CliError::parse(format!("bad number {text:?}")));
    }
    rational::parse(t).ok_or_else(|| CliError::parse(format!("bad number {text:?}")))
}

fn lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'))
}

fn load_matrices(path: &Path, r: &StringAlgebra) -> Result<Vec<RMatrix>, CliError> {
    let text = read(path)?;
    lines(&text).map(|l| rmatrix_parse(l, r).map_err(CliError::from)).collect()
}

fn load_strings(path: &Path, r: &StringAlgebra) -> Result<StringGraph, CliError> {
    let words = parse_string_list(&read(path)?, r)?;
    Ok(graph_of_strings(&words, r)?)
}

fn cmd_validate(algebra: &Path, module: Option<&Path>) -> Out {
    let r = load_algebra(algebra)?;
    let q = r.quiver();
    let f = r.field();
    let mut out = json!({
        "ok": true,
        "field": { "p": f.characteristic(), "k": f.degree(), "order": f.order() },
        "vertices": q.vertices(),
        "arrows": q.arrows().iter().map(|a| json!({
            "label": a.label, "source": q.vertices()[a.source], "target": q.vertices()[a.target]
        })).collect::<Vec<_>>(),
        "forbidden": r.forbidden().iter().map(|p| p.iter().map(|&a| r.arrow_label(a)).collect::<Vec<_>>().join(" ")).collect::<Vec<_>>(),
        "basis": r.path_basis().iter().map(|p| p.render(q)).collect::<Vec<_>>(),
        "dim": r.dim(),
        "nilpotency_bound": r.nilpotency_bound(),
    });
    if let Some(path) = module {
        let m = load_module(path, &r)?.to_module()?;
        let rep = module_check(&m);
        out["ok"] = json!(rep.ok);
        out["module"] = json!({ "dim": m.dim(), "ok": rep.ok, "violation": rep.violation, "witness": rep.witness });
    }
    Ok(out.into())
}

#[allow(clippy::too_many_arguments)]
fn cmd_rank(
    algebra: &Path,
    module: &Path,
    matrices: &[String],
    matrix_file: Option<&Path>,
    shape: usize,
    coeff: Option<u32>,
    max_tests: usize,
    extras: Option<&Path>,
    seed: u64,
) -> Out {
    let r = load_algebra(algebra)?;
    let m = load_module(module, &r)?.to_module()?;
    let mut given: Vec<RMatrix> = matrices.iter().map(|t| rmatrix_parse(t, &r)).collect::<Result<_, _>>()?;
    if let Some(p) = matrix_file {
        given.extend(load_matrices(p, &r)?);
    }
    let suite = if given.is_empty() {
        let h = coeff.unwrap_or(r.field().order() - 1);
        let mut s = TestSuite::new(&r, shape, h, max_tests, seed);
        if let Some(p) = extras {
            s = s.with_extras(load_matrices(p, &r)?);
        }
        s
    } else {
        TestSuite::new(&r, 1, 1, 0, seed).with_extras(given)
    };
    let prof = profile_with(&Ranker::new(&m), &suite, &r)?;
    let rows: Vec<Value> = prof
        .tests
        .iter()
        .zip(&prof.values)
        .map(|(t, v)| json!({ "matrix": t, "value": rational::render(v) }))
        .collect();
    let mut csv = String::from("matrix,value\n");
    for (t, v) in prof.tests.iter().zip(&prof.values) {
        csv.push_str(&format!("\"{t}\",{}\n", rational::render(v)));
    }
    Ok(Payload { json: json!({ "dim": m.dim(), "profile": rows }), csv: Some(csv) })
}

fn cmd_ppdim(algebra: &Path, module: &Path, formula: &Path) -> Out {
    let r = load_algebra(algebra)?;
    let m = load_module(module, &r)?.to_module()?;
    let text = read(formula)?;
    if text.contains("phi:") {
        let pair = PPPair::parse(&text, &r)?;
        let gap = pair_gap(&m, &pair)?;
        return Ok(json!({
            "kind": "pair",
            "gap": gap,
            "value": rational::render(&pair_value(&m, &pair)?),
        })
        .into());
    }
    let phi = PPFormula::parse(&text, &r)?;
    let sub = pp_subspace(&m, &phi)?;
    Ok(json!({
        "kind": "formula",
        "t": phi.t,
        "dim": sub.dim(),
        "value": rational::render(&pp_dim(&m, &phi)?),
    })
    .into())
}

fn cmd_stats(algebra: &Path, files: &[PathBuf], radius: usize, counts: &[String], tolerance: &str) -> Out {
    let r = load_algebra(algebra)?;
    let graphs: Vec<StringGraph> = files.iter().map(|p| load_strings(p, &r)).collect::<Result<_, _>>()?;
    let words = counts
        .iter()
        .map(|c| stringmod::module::StringWord::parse(c, &r).map_err(CliError::from))
        .collect::<Result<Vec<_>, _>>()?;
    if graphs.len() > 1 {
        let rep = stringconvergence_check(&graphs, &words, radius, parse_rational(tolerance)?, &r)?;
        let csv = rep.to_csv();
        return Ok(Payload { json: serde_json::to_value(&rep).expect("serializable"), csv: Some(csv) });
    }
    let g = &graphs[0];
    let prof = ball_stats(g, radius, &r)?;
    let mut out = prof.to_json(&r);
    out["vertices"] = json!(g.num_vertices());
    let mut right = serde_json::Map::new();
    for w in &words {
        let (n, d) = right_endpoint_count(w, g, &r)?;
        right.insert(w.render(&r), json!({ "count": n, "density": rational::render(&d) }));
    }
    out["right_endpoints"] = Value::Object(right);
    Ok(out.into())
}

fn cmd_sample(algebra: &Path, strings: &Path, radius: usize, samples: usize, delta: f64, exhaustive: bool, seed: u64) -> Out {
    let r = load_algebra(algebra)?;
    let g = load_strings(strings, &r)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(CliError::precondition("δ must lie in (0, 1)"));
    }
    let s = ball_stats_sampled(&g, radius, samples, seed, delta, exhaustive, &r)?;
    Ok(json!({
        "samples": s.samples,
        "epsilon": s.epsilon,
        "delta": s.delta,
        "seed": seed,
        "profile": s.profile.to_json(&r),
    })
    .into())
}

fn cmd_tile(algebra: &Path, module: &Path, epsilon: &str) -> Out {
    let r = load_algebra(algebra)?;
    let spec = load_module(module, &r)?;
    let d = decomposed(&spec)?;
    let eps = parse_rational(epsilon)?;
    let (t, ops) = tile_decomposition(d, &eps)?;
    let check = verify_tiling(&t, &ops, r.field());
    Ok(json!({ "tiling": t, "check": check, "ok": check.ok() }).into())
}

fn cmd_epsiso(algebra: &Path, left: &Path, right: &Path, epsilon: &str) -> Out {
    let r = load_algebra(algebra)?;
    let graph = |p: &Path| -> Result<StringGraph, CliError> {
        let spec = load_module(p, &r)?;
        Ok(graph_of_decomposition(decomposed(&spec)?)?)
    };
    let (g, h) = (graph(left)?, graph(right)?);
    let eps = parse_rational(epsilon)?;
    if eps < rational::zero() || eps > rational::int(1) {
        return Err(LimitError::BadEpsilon.into());
    }
    Ok(serde_json::to_value(epsilon_isomorphism(&g, &h, &eps, &r)).expect("serializable").into())
}

fn cmd_catalog(algebra: &Path, caps: CatalogCaps, out: Option<&Path>) -> Out {
    let r = load_algebra(algebra)?;
    let c = build_tile_catalog(&r, caps)?;
    let tiles: Vec<Value> = c
        .tiles
        .iter()
        .enumerate()
        .map(|(i, t)| json!({ "index": i, "label": t.render(&r), "dim": t.dim(), "band": t.is_band() }))
        .collect();
    let payload = json!({ "caps": caps, "count": c.len(), "tiles": tiles });
    if let Some(dir) = out {
        let io = |e: std::io::Error| CliError::precondition(format!("{}: {e}", dir.display()));
        fs::create_dir_all(dir).map_err(io)?;
        for (i, t) in c.tiles.iter().enumerate() {
            fs::write(dir.join(format!("tile_{i:05}.mod")), format!("{}\n", t.render(&r))).map_err(io)?;
        }
        let index = serde_json::to_string_pretty(&payload).expect("serializable");
        fs::write(dir.join("index.json"), index + "\n").map_err(io)?;
    }
    Ok(payload.into())
}

#[allow(clippy::too_many_arguments)]
fn cmd_param(
    algebra: &Path,
    module: &Path,
    parameter: &str,
    randomized: bool,
    trials: usize,
    cap: usize,
    pair: Option<&Path>,
    probe: bool,
    delta: &str,
    max_power: usize,
    seed: u64,
) -> Out {
    let r = load_algebra(algebra)?;
    let spec = load_module(module, &r)?;
    let m = spec.to_module()?;
    let parts = spec.raw.is_empty().then_some(&spec.decomposition);
    let p = ParameterId::parse(parameter, &r)?;
    if probe {
        let rep = stability_probe(&p, &m, parts, &parse_rational(delta)?, trials.min(50), max_power, seed)?;
        let csv = rep.to_csv();
        return Ok(Payload { json: serde_json::to_value(&rep).expect("serializable"), csv: Some(csv) });
    }
    let name = p.render(&r);
    let out = match &p {
        ParameterId::G => {
            let g = gen_number(&m);
            json!({ "parameter": name, "value": rational::render(&g.value), "count": g.count, "top": g.top })
        }
        ParameterId::I => {
            let mode = if randomized { IndepMode::Randomized { trials, seed } } else { IndepMode::Exact { cap } };
            let i = indep_number(&m, &mode)?;
            json!({
                "parameter": name,
                "value": rational::render(&i.value),
                "count": i.count,
                "upper": i.upper,
                "exact": i.exact,
                "witness": i.witness,
            })
        }
        ParameterId::Weight(q) => {
            let d = parts.ok_or(ParamError::UnknownDecomposition)?;
            let pair = pair.map(|p| read(p).and_then(|t| PPPair::parse(&t, &r).map_err(CliError::from))).transpose()?;
            let w = weight_checked(d, q, pair.as_ref())?;
            json!({ "parameter": name, "value": rational::render(&w), "pp_checked": pair.is_some() })
        }
        _ => json!({ "parameter": name, "value": rational::render(&evaluate(&p, &m, parts)?) }),
    };
    Ok(out.into())
}

fn cmd_test(bundle: &Path, module: Option<&Path>, estimates: Option<&Path>) -> Out {
    let t = Tester::from_json(&read(bundle)?)?;
    let est = match (module, estimates) {
        (Some(p), None) => {
            let m = load_module(p, &t.algebra)?.to_module()?;
            exact_estimates(&t, &m)?
        }
        (None, Some(p)) => lines(&read(p)?).map(parse_rational).collect::<Result<_, _>>()?,
        _ => return Err(CliError::parse("give a module or --estimates")),
    };
    let ans = run_tester(&t, &est)?;
    let mut out = serde_json::to_value(&ans).expect("serializable");
    out["parameter"] = json!(t.parameter.render(&t.algebra));
    out["kappa"] = json!(rational::render(&t.kappa));
    Ok(out.into())
}

fn run(cli: Cli) -> Out {
    if cli.schema {
        return Ok(schema::all().into());
    }
    let seed = cli.seed;
    let Some(command) = cli.command else {
        return Err(CliError::parse("no subcommand given; see --help"));
    };
    match command {
        Command::Validate { algebra, module } => cmd_validate(&algebra, module.as_deref()),
        Command::Rank { algebra, module, matrices, matrix_file, shape, coeff, max_tests, extras } => cmd_rank(
            &algebra,
            &module,
            &matrices,
            matrix_file.as_deref(),
            shape,
            coeff,
            max_tests,
            extras.as_deref(),
            seed,
        ),
        Command::Ppdim { algebra, module, formula } => cmd_ppdim(&algebra, &module, &formula),
        Command::Stats { algebra, strings, radius, counts, tolerance } => {
            cmd_stats(&algebra, &strings, radius, &counts, &tolerance)
        }
        Command::Sample { algebra, strings, radius, samples, delta, exhaustive } => {
            cmd_sample(&algebra, &strings, radius, samples, delta, exhaustive, seed)
        }
        Command::Tile { algebra, module, epsilon } => cmd_tile(&algebra, &module, &epsilon),
        Command::Epsiso { algebra, left, right, epsilon } => cmd_epsiso(&algebra, &left, &right, &epsilon),
        Command::Catalog { algebra, max_string_len, band_dim_cap, limit, out } => {
            cmd_catalog(&algebra, CatalogCaps { max_string_len, band_dim_cap, limit }, out.as_deref())
        }
        Command::Param { algebra, module, parameter, randomized, trials, cap, pair, probe, delta, max_power } => cmd_param(
            &algebra,
            &module,
            &parameter,
            randomized,
            trials,
            cap,
            pair.as_deref(),
            probe,
            &delta,
            max_power,
            seed,
        ),
        Command::BuildTester {
            algebra,
            parameter,
            epsilon,
            kappa,
            max_string_len,
            band_dim_cap,
            limit,
            shape,
            max_tests,
            max_power,
            pool,
        } => {
            let r = load_algebra(&algebra)?;
            let p = ParameterId::parse(&parameter, &r)?;
            let cfg = TesterConfig {
                kappa: kappa.as_deref().map(parse_rational).transpose()?,
                caps: CatalogCaps { max_string_len, band_dim_cap, limit },
                shape,
                max_tests,
                seed,
                max_power,
                pool,
            };
            let t = build_tester(&p, &parse_rational(&epsilon)?, &r, &cfg)?;
            let json: Value = serde_json::from_str(&t.to_json()).expect("valid bundle");
            Ok(json.into())
        }
        Command::Test { bundle, module, estimates } => cmd_test(&bundle, module.as_deref(), estimates.as_deref()),
    }
}

/// `path<sep>value` for every leaf.
fn flatten(prefix: &str, v: &Value, float: bool, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, float, out);
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, float, out);
            }
        }
        Value::String(s) => {
            let shown = match rational::parse(s).filter(|_| float && s.contains('/')) {
                Some(q) => format!("{s} ({:.6})", rational::to_f64(&q)),
                None => s.clone(),
            };
            out.push((prefix.to_string(), shown));
        }
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn emit(p: &Payload, format: Format, float: bool) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(&p.json).expect("serializable") + "\n",
        Format::Csv if p.csv.is_some() => p.csv.clone().expect("checked"),
        Format::Csv | Format::Table => {
            let mut rows = Vec::new();
            flatten("", &p.json, float, &mut rows);
            let (sep, head) = if format == Format::Csv { (",", "key,value\n") } else { ("\t", "") };
            let mut s = String::from(head);
            for (k, v) in rows {
                if format == Format::Csv && (v.contains(',') || v.contains('"')) {
                    s.push_str(&format!("{k}{sep}\"{}\"\n", v.replace('"', "\"\"")));
                } else {
                    s.push_str(&format!("{k}{sep}{v}\n"));
                }
            }
            s
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs.filter(|&j| j > 0) {
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    let (format, float) = (cli.format, cli.float);
    match run(cli) {
        Ok(p) => {
            print!("{}", emit(&p, format, float));
            ExitCode::SUCCESS
        }
        Err(e) => {
            let report = json!({ "error": { "kind": e.kind, "code": e.code, "message": e.message } });
            eprintln!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
            ExitCode::from(e.code)
        }
    }
}
