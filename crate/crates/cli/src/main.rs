use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use arrvol::bounds::{dd_ap_relation_check, kobon_report, r_k_exact, BoundValue, DEFAULT_RK_BUDGET};
use arrvol::cells::count_simplicial_cells;
use arrvol::constructions::{
    corner_branches, default_ngon_sides, default_thetas, gen_cfk, gen_corner_tangents, gen_even_rotation,
    gen_ngon_edges, gen_odd_helix, CornerSurface, ShiftFamily,
};
use arrvol::io::{self, DynArrangement};
use arrvol::scalar::parse_rational;
use arrvol::search::{glue_arrangements, search_max_ties, SearchConfig};
use arrvol::spectrum::{distinct_subset_exact, distinct_subset_greedy, volume_spectrum, GreedyOrder, SpectrumConfig};
use arrvol::verify::{run_criterion, VerifyOptions, CRITERIA};
use arrvol::{AffineMap, Arrangement, FieldMode, Scalar, DEFAULT_EPS_VOL};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

const EXIT_VERIFY: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug, Serialize)]
#[command(name = "arrvol", version, about = "Volumes and cells of hyperplane arrangements")]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
struct Global {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads; output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Relative tolerance for equal float volumes.
    #[arg(long, global = true, default_value_t = DEFAULT_EPS_VOL)]
    eps: f64,

    /// Arithmetic for generated or analyzed arrangements.
    #[arg(long, global = true, value_enum)]
    field: Option<Field>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Output file; standard output when absent.
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Field {
    Rational,
    Float,
}

impl From<Field> for FieldMode {
    fn from(f: Field) -> Self {
        match f {
            Field::Rational => FieldMode::Rational,
            Field::Float => FieldMode::Float,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Build an arrangement from one of the constructions.
    #[command(subcommand)]
    Gen(Gen),
    /// Analyze an arrangement file.
    #[command(subcommand)]
    Analyze(Analyze),
    /// Closed-form and exact combinatorial bounds.
    #[command(subcommand)]
    Bounds(Bounds),
    /// Search for arrangements with many maximum-volume tetrahedra.
    #[command(subcommand)]
    Search(Search),
    /// Run the reproduction checks and print a pass/fail table.
    VerifyPaper(VerifyArgs),
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Gen {
    /// Coordinate planes plus pairwise difference planes.
    Cfk {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
    },
    /// Edge lines of a regular polygon (planar).
    Ngon {
        #[arg(long)]
        n: usize,
        /// Polygon sides; defaults to max(4n, 12).
        #[arg(long)]
        sides: Option<usize>,
    },
    /// Shift-covariant family for even d.
    Rotation {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
    },
    /// Shift-covariant family for odd d.
    Helix {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
    },
    /// Corner hyperplanes plus tangents to `prod x_i = c`.
    CornerTangents {
        #[arg(long)]
        d: usize,
        /// Number of tangent hyperplanes.
        #[arg(long)]
        n: usize,
        /// Rational constant such as `2/9`.
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        c: String,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Analyze {
    /// Volumes of all formed simplices with multiplicities.
    Spectrum {
        input: PathBuf,
        /// Witness subsets kept per volume; 0 keeps all.
        #[arg(long, default_value_t = 16)]
        witnesses: usize,
    },
    /// Simplices not crossed by any other hyperplane.
    Cells { input: PathBuf },
    /// Largest subfamily whose simplices all have distinct volumes.
    Distinct {
        input: PathBuf,
        #[arg(long, default_value_t = arrvol::spectrum::DEFAULT_NODE_BUDGET)]
        budget: u64,
        /// Report the greedy lower bound only.
        #[arg(long)]
        greedy: bool,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Bounds {
    /// Kobon bounds, optionally against the cell count of an arrangement.
    Kobon {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        n: usize,
        /// Arrangement whose simplicial cells are counted alongside.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Largest subset of 1..=n with no k-term progression.
    Rk {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_RK_BUDGET)]
        budget: u64,
    },
    /// Distinct-volume subfamily against r_{d+2}(n) on a shift-covariant family.
    DdCheck {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = arrvol::spectrum::DEFAULT_NODE_BUDGET)]
        budget: u64,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Search {
    /// Multi-start search for `m` planes with `target` tied maximum tetrahedra.
    Badge {
        #[arg(long, default_value_t = 6)]
        m: usize,
        #[arg(long, default_value_t = 5)]
        target: usize,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Place the second arrangement against the first to add tied tetrahedra.
    Glue {
        first: PathBuf,
        second: PathBuf,
        #[command(flatten)]
        tuning: Tuning,
    },
}

#[derive(Args, Debug, Clone, Serialize)]
struct Tuning {
    /// JSON search configuration; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    max_evals: Option<usize>,
    #[arg(long)]
    rel_tol: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    /// `all` or a comma-separated list of criterion numbers.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Restarts for the search criteria.
    #[arg(long)]
    restarts: Option<usize>,
}

/// Failures the user caused, as opposed to checks that did not pass.
struct Usage(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.into())
    }
}

/// A successful run's output and whether every check it performed passed.
struct Outcome {
    body: String,
    passed: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match run(&cli).and_then(|o| emit(&cli.global, &o.body).map(|_| o)) {
        Ok(o) if o.passed => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(EXIT_VERIFY),
        Err(Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn emit(global: &Global, body: &str) -> Result<(), Usage> {
    match &global.output {
        Some(path) => fs::write(path, body).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{body}"),
    }
    Ok(())
}

fn config_value(cli: &Cli) -> Value {
    json!({ "global": cli.global, "command": cli.command })
}

/// JSON reports carry the config as `run_config`; CSV reports as a leading
/// comment.
fn render(cli: &Cli, default: Format, json_body: Value, csv_body: impl FnOnce() -> String) -> String {
    match cli.global.format.unwrap_or(default) {
        Format::Json => {
            let mut v = json!({ "run_config": config_value(cli) });
            if let (Value::Object(out), Value::Object(fields)) = (&mut v, json_body) {
                out.extend(fields);
            }
            format!("{}\n", serde_json::to_string_pretty(&v).expect("json values serialize"))
        }
        Format::Csv => format!("# config {}\n{}", config_value(cli), csv_body()),
    }
}

fn run(cli: &Cli) -> Result<Outcome, Usage> {
    let ok = |body| Ok(Outcome { body, passed: true });
    match &cli.command {
        Command::Gen(g) => ok(generate(cli, g)?),
        Command::Analyze(a) => ok(analyze(cli, a)?),
        Command::Bounds(b) => bounds(cli, b),
        Command::Search(s) => search(cli, s),
        Command::VerifyPaper(v) => verify(cli, v),
    }
}

fn generate(cli: &Cli, g: &Gen) -> Result<String, Usage> {
    let seed = cli.global.seed;
    let family = |f: ShiftFamily| DynArrangement::Float(f.arrangement);
    let mut params = serde_json::to_value(g)?;
    let a = match *g {
        Gen::Cfk { d, n } => DynArrangement::Rational(gen_cfk(d, n)?),
        Gen::Ngon { n, sides } => {
            let f = gen_ngon_edges(n, sides.unwrap_or_else(|| default_ngon_sides(n)))?;
            params["shift"] = serde_json::to_value(&f.params)?;
            family(f)
        }
        Gen::Rotation { d, n } => {
            let f = gen_even_rotation(d, n, default_thetas(d, n), seed)?;
            params["shift"] = serde_json::to_value(&f.params)?;
            family(f)
        }
        Gen::Helix { d, n } => {
            let f = gen_odd_helix(d, n, default_thetas(d, n), seed)?;
            params["shift"] = serde_json::to_value(&f.params)?;
            family(f)
        }
        Gen::CornerTangents { d, n, ref c } => {
            let c = parse_rational(c)?;
            if d < 2 {
                return Err(anyhow!("corner tangents need d >= 2").into());
            }
            let branch = corner_branches(d, c.sign())
                .into_iter()
                .next()
                .ok_or_else(|| anyhow!("corner constant must be nonzero"))?;
            let cs = CornerSurface::new(AffineMap::identity(d), c, branch)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let points: Vec<_> = (0..n).map(|_| cs.sample_point(&mut rng)).collect();
            DynArrangement::Rational(gen_corner_tangents(&cs, &points)?)
        }
    };
    let a = match cli.global.field {
        Some(f) => a.into_field(f.into())?,
        None => a,
    };
    if cli.global.format == Some(Format::Csv) {
        return Err(anyhow!("gen writes arrangement JSON only").into());
    }
    let provenance = json!({ "generator": params, "run_config": config_value(cli) });
    Ok(format!("{}\n", io::dyn_to_json(&a, Some(provenance))))
}

fn load(path: &Path) -> Result<DynArrangement, Usage> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    match io::arrangement_from_json(&text) {
        Ok((a, _)) => Ok(a),
        Err(first) => {
            // Search and glue reports nest the arrangement one level down.
            let v: Value = serde_json::from_str(&text).map_err(|_| anyhow!("{}: {first}", path.display()))?;
            let inner = v.get("arrangement").ok_or_else(|| anyhow!("{}: {first}", path.display()))?;
            Ok(io::arrangement_from_json(&inner.to_string())?.0)
        }
    }
}

fn load_in_field(cli: &Cli, path: &Path) -> Result<DynArrangement, Usage> {
    let a = load(path)?;
    Ok(match cli.global.field {
        Some(f) => a.into_field(f.into())?,
        None => a,
    })
}

fn analyze(cli: &Cli, a: &Analyze) -> Result<String, Usage> {
    let eps = cli.global.eps;
    match a {
        Analyze::Spectrum { input, witnesses } => {
            let cfg = SpectrumConfig {
                eps_vol: eps,
                witness_cap: (*witnesses > 0).then_some(*witnesses),
            };
            let (j, c) = match load_in_field(cli, input)? {
                DynArrangement::Rational(a) => spectrum_report(&a, &cfg),
                DynArrangement::Float(a) => spectrum_report(&a, &cfg),
            };
            Ok(render(cli, Format::Csv, json!({ "spectrum": j }), || c))
        }
        Analyze::Cells { input } => {
            let report = match load_in_field(cli, input)? {
                DynArrangement::Rational(a) => count_simplicial_cells(&a),
                DynArrangement::Float(a) => count_simplicial_cells(&a),
            };
            let csv = || {
                let mut out = String::from("cell\n");
                for c in &report.cells {
                    out += &format!("{}\n", labels(c));
                }
                out
            };
            Ok(render(cli, Format::Json, json!({ "cells": report }), csv))
        }
        Analyze::Distinct { input, budget, greedy } => {
            let seed = cli.global.seed;
            let order = if seed == 0 { GreedyOrder::Label } else { GreedyOrder::Random(seed) };
            let r = match load_in_field(cli, input)? {
                DynArrangement::Rational(a) if *greedy => distinct_subset_greedy(&a, order, eps),
                DynArrangement::Float(a) if *greedy => distinct_subset_greedy(&a, order, eps),
                DynArrangement::Rational(a) => distinct_subset_exact(&a, eps, *budget),
                DynArrangement::Float(a) => distinct_subset_exact(&a, eps, *budget),
            };
            let csv = || format!("size,exact,nodes,subset\n{},{},{},{}\n", r.size, r.exact, r.nodes, labels(&r.subset));
            Ok(render(cli, Format::Json, json!({ "distinct": r }), csv))
        }
    }
}

fn spectrum_report<S: Scalar>(a: &Arrangement<S>, cfg: &SpectrumConfig) -> (Value, String) {
    let sp = volume_spectrum(a, cfg);
    (sp.to_json(), sp.to_csv())
}

fn labels(ls: &[u32]) -> String {
    ls.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

fn bounds(cli: &Cli, b: &Bounds) -> Result<Outcome, Usage> {
    match *b {
        Bounds::Kobon { d, n, ref input } => {
            let mut report = kobon_report(d, n)?;
            let mut passed = true;
            if let Some(path) = input {
                let a = load_in_field(cli, path)?;
                let count = match &a {
                    DynArrangement::Rational(a) => count_simplicial_cells(a).count,
                    DynArrangement::Float(a) => count_simplicial_cells(a).count,
                } as u64;
                if a.dim() != d || a.len() != n {
                    return Err(anyhow!("input has d={}, n={}; expected d={d}, n={n}", a.dim(), a.len()).into());
                }
                passed = report.values.iter().all(|v| count <= v.value);
                report.values.push(BoundValue {
                    name: "empirical".into(),
                    value: count,
                    note: format!("simplicial cells of {}", path.display()),
                });
            }
            let body = render(cli, Format::Csv, json!({ "bounds": report, "within_bounds": passed }), || report.to_csv());
            Ok(Outcome { body, passed })
        }
        Bounds::Rk { n, k, budget } => {
            let r = r_k_exact(n, k, budget)?;
            let csv = || format!("n,k,size,exact,nodes,witness\n{n},{k},{},{},{},{}\n", r.size, r.exact, r.nodes, labels(&r.witness));
            Ok(Outcome {
                body: render(cli, Format::Csv, json!({ "rk": r }), csv),
                passed: true,
            })
        }
        Bounds::DdCheck { d, n, budget } => {
            let seed = cli.global.seed;
            let f = match d {
                2 => gen_ngon_edges(n, default_ngon_sides(n))?,
                d if d % 2 == 0 => gen_even_rotation(d, n, default_thetas(d, n), seed)?,
                d => gen_odd_helix(d, n, default_thetas(d, n), seed)?,
            };
            let r = dd_ap_relation_check(&f.arrangement, cli.global.eps, budget)?;
            let csv = || {
                format!(
                    "d,n,distinct,r,holds,conclusive,distinct_subset,r_witness\n{d},{n},{},{},{},{},{},{}\n",
                    r.distinct.size,
                    r.r.size,
                    r.holds,
                    r.conclusive,
                    labels(&r.distinct.subset),
                    labels(&r.r.witness)
                )
            };
            Ok(Outcome {
                body: render(cli, Format::Csv, json!({ "dd_check": r }), csv),
                passed: r.holds,
            })
        }
    }
}

fn search_config(cli: &Cli, t: &Tuning) -> Result<SearchConfig, Usage> {
    let mut cfg: SearchConfig = match &t.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => SearchConfig::default(),
    };
    cfg.seed = cli.global.seed;
    if let Some(r) = t.restarts {
        cfg.restarts = r;
    }
    if let Some(m) = t.max_evals {
        cfg.max_evals = m;
    }
    if let Some(r) = t.rel_tol {
        cfg.rel_tol = r;
    }
    Ok(cfg)
}

fn search(cli: &Cli, s: &Search) -> Result<Outcome, Usage> {
    if cli.global.format == Some(Format::Csv) {
        return Err(anyhow!("search writes JSON only").into());
    }
    match s {
        Search::Badge { m, target, tuning } => {
            let cfg = search_config(cli, tuning)?;
            let r = search_max_ties(3, *m, *target, &cfg)?;
            Ok(Outcome {
                body: render(cli, Format::Json, r.to_json(), String::new),
                passed: r.success,
            })
        }
        Search::Glue { first, second, tuning } => {
            let cfg = search_config(cli, tuning)?;
            let as_float = |p: &Path| -> Result<Arrangement<f64>, Usage> {
                match load(p)?.into_field(FieldMode::Float)? {
                    DynArrangement::Float(a) => Ok(a),
                    DynArrangement::Rational(_) => unreachable!("converted to float"),
                }
            };
            let r = glue_arrangements(&as_float(first)?, &as_float(second)?, &cfg)?;
            Ok(Outcome {
                body: render(cli, Format::Json, r.to_json(), String::new),
                passed: r.success,
            })
        }
    }
}

fn verify(cli: &Cli, v: &VerifyArgs) -> Result<Outcome, Usage> {
    let ids: Vec<u32> = if v.suite == "all" {
        CRITERIA.iter().map(|c| c.0).collect()
    } else {
        v.suite
            .split(',')
            .map(|s| {
                let id: u32 = s.trim().parse().with_context(|| format!("bad criterion {s:?}"))?;
                if !CRITERIA.iter().any(|c| c.0 == id) {
                    bail!("no criterion {id}");
                }
                Ok(id)
            })
            .collect::<anyhow::Result<_>>()?
    };
    let mut opts = VerifyOptions {
        seed: cli.global.seed,
        ..Default::default()
    };
    opts.search.seed = cli.global.seed;
    if let Some(r) = v.restarts {
        opts.search.restarts = r;
    }
    let outcomes: Vec<_> = ids.iter().map(|&id| run_criterion(id, &opts)).collect();
    let passed = outcomes.iter().all(|o| o.passed);
    let csv = || {
        let mut out = String::from("id,name,status,blocking,seconds,detail\n");
        for o in &outcomes {
            let status = if o.passed { "PASS" } else { "FAIL" };
            out += &format!(
                "{},{},{status},{},{:.2},\"{}\"\n",
                o.id,
                o.name,
                o.blocking,
                o.seconds,
                o.detail.replace('"', "'")
            );
        }
        out
    };
    Ok(Outcome {
        body: render(cli, Format::Csv, json!({ "criteria": outcomes, "passed": passed }), csv),
        passed,
    })
}
