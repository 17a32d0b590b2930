//! `toric-ech`: ECH capacities and embedding obstructions from the command
//! line.
//!
//! Output is JSON (one object per line) or CSV. Every JSON object starts
//! with a `schema` key. Exit codes: 0 answered, 1 usage or input error,
//! 2 search budget exceeded, 3 certificate verification failed.

use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use toric_ech::bounds::{exclusion_threshold, scan_row, TargetFamily};
use toric_ech::capacities::{
    capacity_with_budget, find_minimal_generator_with_budget, is_minimal, NodeBudget, DEFAULT_NODE_BUDGET,
};
use toric_ech::domains::ToricDomain;
use toric_ech::error::Error;
use toric_ech::lattice::{enumerate_factorizations, generators_with_index, parse_product, ConvexGenerator};
use toric_ech::obstruct::{check_embedding, Certificate, SearchOptions, Verdict, DEFAULT_SEARCH_BUDGET};
use toric_ech::rational::{format_decimal, format_rational, parse_rational, Rational};

const DIGITS: usize = 6;

#[derive(Parser)]
#[command(name = "toric-ech", version, about = "ECH capacities and embedding obstructions for convex toric domains")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Worker threads for scans (default: available cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// ECH capacity c_k of a domain.
    Capacity(CapacityArgs),
    /// The unique minimal generator with L = k + 1, if there is one.
    Minimal(CapacityArgs),
    /// Index data of a generator: I, J0, L, x, y, m, h, e.
    Index(IndexArgs),
    /// Action of a generator on a domain.
    Action(ActionArgs),
    /// Decide whether the obstruction criterion excludes an embedding.
    Check(CheckArgs),
    /// Re-verify certificates from a file (or stdin with "-").
    VerifyCertificate(VerifyArgs),
    /// Smallest target scale not excluded, to within a tolerance.
    Bound(BoundArgs),
    /// Thresholds for P(a,1) (or E(a,1)) over a grid of a.
    Scan(ScanArgs),
    /// Generators with a given index, or factorizations of a generator.
    Enumerate(EnumerateArgs),
}

#[derive(Args)]
struct CapacityArgs {
    /// Domain: "P(a,b)", "E(a,b)", "B(c)" or "poly[(x0,y0),...]".
    #[arg(long)]
    domain: String,
    /// Index k, or an inclusive range "a-b".
    #[arg(long)]
    k: String,
    /// Path nodes allowed per query.
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    budget: u64,
}

#[derive(Args)]
struct IndexArgs {
    /// Formal product, e.g. "e(1,0)^2 h(1,1)".
    #[arg(long)]
    gen: String,
    /// Allow repeated h labels on an edge.
    #[arg(long)]
    extended: bool,
}

#[derive(Args)]
struct ActionArgs {
    #[arg(long)]
    domain: String,
    #[arg(long)]
    gen: String,
}

#[derive(Args)]
struct SearchArgs {
    /// Accept any all-e target, not only minimal ones; results are conditional.
    #[arg(long)]
    conjectural: bool,
    /// Largest number of factor pairs to try.
    #[arg(long)]
    max_n: Option<usize>,
    /// Search nodes allowed per target.
    #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET)]
    budget: u64,
}

impl SearchArgs {
    fn options(&self) -> SearchOptions {
        SearchOptions { conjectural_mode: self.conjectural, max_n: self.max_n, node_budget: self.budget }
    }
}

#[derive(Args)]
struct CheckArgs {
    /// Source domain.
    #[arg(long)]
    domain: String,
    /// Target domain.
    #[arg(long)]
    target: String,
    /// Target generators; repeat the flag or separate with ';'.
    #[arg(long, required = true)]
    gens: Vec<String>,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Certificate document, or a `check` output holding "certificates".
    #[arg(long, default_value = "-")]
    file: String,
    /// Accepted target-minimality budget.
    #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET)]
    budget: u64,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    domain: String,
    /// "ball", "square-polydisk", "ellipsoid:<b>" or "polydisk:<b>".
    #[arg(long)]
    family: String,
    /// Largest target size in the family recipe.
    #[arg(long, default_value_t = 5)]
    dmax: u64,
    /// Explicit targets instead of the recipe.
    #[arg(long)]
    gens: Vec<String>,
    #[arg(long, default_value = "1/1000")]
    tol: String,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Shape {
    Polydisk,
    Ellipsoid,
}

#[derive(Args)]
struct ScanArgs {
    /// Comma-separated values of a.
    #[arg(long, conflicts_with_all = ["from", "to", "step"])]
    grid: Option<String>,
    #[arg(long, requires_all = ["to", "step"])]
    from: Option<String>,
    #[arg(long)]
    to: Option<String>,
    #[arg(long)]
    step: Option<String>,
    /// Source domain shape with parameter a.
    #[arg(long, value_enum, default_value_t = Shape::Polydisk)]
    shape: Shape,
    #[arg(long, default_value = "ball")]
    family: String,
    #[arg(long, default_value_t = 5)]
    dmax: u64,
    #[arg(long, default_value = "1/1000")]
    tol: String,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Args)]
struct EnumerateArgs {
    /// List every convex generator with this ECH index.
    #[arg(long, conflicts_with_all = ["gen", "n"])]
    index: Option<u64>,
    /// Factor this generator ...
    #[arg(long, requires = "n")]
    gen: Option<String>,
    /// ... into exactly n nonempty factors.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    extended: bool,
}

/// A failed command: message plus exit code.
struct Failure(String, u8);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded { .. } => 2,
            Error::InvalidCertificate(_) => 3,
            _ => 1,
        };
        Failure(e.to_string(), code)
    }
}

type Rows = Vec<Map<String, Value>>;

fn row(schema: &str, fields: Value) -> Map<String, Value> {
    let mut out = Map::new();
    out.insert("schema".into(), json!(format!("toric-ech/{schema}/v1")));
    if let Value::Object(m) = fields {
        out.extend(m);
    }
    out
}

fn rational(r: &Rational) -> Value {
    json!(format_rational(r))
}

fn decimal(r: &Rational) -> Value {
    json!(format_decimal(r, DIGITS))
}

fn domain(text: &str) -> Result<ToricDomain, Failure> {
    Ok(text.parse()?)
}

fn generator(text: &str, extended: bool) -> Result<ConvexGenerator, Failure> {
    Ok(parse_product(text, extended)?)
}

fn generator_list(raw: &[String]) -> Result<Vec<ConvexGenerator>, Failure> {
    raw.iter()
        .flat_map(|s| s.split(';'))
        .filter(|s| !s.trim().is_empty())
        .map(|s| generator(s.trim(), false))
        .collect()
}

fn k_range(text: &str) -> Result<std::ops::RangeInclusive<u64>, Failure> {
    let bad = || Failure(format!("invalid k {text:?}: expected N or A-B"), 1);
    let number = |s: &str| s.trim().parse::<u64>().map_err(|_| bad());
    match text.split_once('-') {
        Some((a, b)) => Ok(number(a)?..=number(b)?),
        None => {
            let k = number(text)?;
            Ok(k..=k)
        }
    }
}

fn capacity_cmd(args: &CapacityArgs, minimal: bool) -> Result<Rows, Failure> {
    let dom = domain(&args.domain)?;
    let mut rows = Vec::new();
    for k in k_range(&args.k)? {
        let mut budget = NodeBudget::new(args.budget);
        if minimal {
            let found = find_minimal_generator_with_budget(&dom, k, &mut budget)?;
            let mut budget = NodeBudget::new(args.budget);
            let c = capacity_with_budget(&dom, k, &mut budget)?;
            rows.push(row(
                "minimal",
                json!({
                    "domain": dom.to_string(),
                    "k": k,
                    "c": rational(&c),
                    "generator": found.as_ref().map(ToString::to_string),
                    "unique": found.is_some(),
                }),
            ));
        } else {
            let c = capacity_with_budget(&dom, k, &mut budget)?;
            rows.push(row(
                "capacity",
                json!({ "domain": dom.to_string(), "k": k, "c": rational(&c), "decimal": decimal(&c) }),
            ));
        }
    }
    Ok(rows)
}

fn index_cmd(args: &IndexArgs) -> Result<Rows, Failure> {
    let gen = generator(&args.gen, args.extended)?;
    Ok(vec![row(
        "index",
        json!({
            "generator": gen.to_string(),
            "I": gen.ech_index(),
            "J0": gen.j_zero(),
            "L": gen.lattice_count(),
            "x": gen.x(),
            "y": gen.y(),
            "m": gen.total_multiplicity(),
            "h": gen.h_count(),
            "e": gen.e_distinct(),
        }),
    )])
}

fn action_cmd(args: &ActionArgs) -> Result<Rows, Failure> {
    let dom = domain(&args.domain)?;
    let gen = generator(&args.gen, true)?;
    let a = dom.action(&gen);
    Ok(vec![row(
        "action",
        json!({ "domain": dom.to_string(), "generator": gen.to_string(), "action": rational(&a), "decimal": decimal(&a) }),
    )])
}

fn verdict_fields(verdict: &Verdict) -> Value {
    match verdict {
        Verdict::Excluded { target, trace, conditional } => json!({
            "verdict": "excluded",
            "conditional": conditional,
            "excluded_by": target.to_string(),
            "trace": trace,
        }),
        Verdict::NotExcluded { certificates } => json!({
            "verdict": "not_excluded",
            "conditional": certificates.iter().any(Certificate::is_conditional),
            "certificates": certificates.iter().map(Certificate::to_json).collect::<Vec<_>>(),
        }),
    }
}

fn check_cmd(args: &CheckArgs) -> Result<Rows, Failure> {
    let (dom, target) = (domain(&args.domain)?, domain(&args.target)?);
    let gens = generator_list(&args.gens)?;
    let verdict = check_embedding(&dom, &target, &gens, &args.search.options())?;
    let mut fields = json!({ "domain": dom.to_string(), "target": target.to_string() });
    if let (Value::Object(m), Value::Object(v)) = (&mut fields, verdict_fields(&verdict)) {
        m.extend(v);
    }
    Ok(vec![row("check", fields)])
}

fn verify_cmd(args: &VerifyArgs) -> Result<Rows, Failure> {
    let mut text = String::new();
    if args.file == "-" {
        io::stdin().read_to_string(&mut text).map_err(|e| Failure(e.to_string(), 1))?;
    } else {
        text = std::fs::read_to_string(&args.file).map_err(|e| Failure(format!("{}: {e}", args.file), 1))?;
    }
    // One pretty-printed document, or JSON lines.
    let values: Vec<Value> = match serde_json::from_str(&text) {
        Ok(v) => vec![v],
        Err(_) => text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<Result<_, _>>()
            .map_err(|e| Failure(format!("not JSON: {e}"), 3))?,
    };
    let mut docs = Vec::new();
    for value in values {
        match value.get("certificates") {
            Some(Value::Array(list)) => docs.extend(list.iter().cloned()),
            _ => docs.push(value),
        }
    }
    if docs.is_empty() {
        return Err(Failure("no certificates found".into(), 3));
    }
    let mut rows = Vec::new();
    for doc in docs {
        let cert = Certificate::from_json(&doc.to_string())?;
        if !cert.is_conditional() {
            let mut budget = NodeBudget::new(args.budget);
            if !is_minimal(cert.target_domain(), cert.target(), &mut budget)? {
                return Err(Failure(
                    format!("target {} is not minimal for {}", cert.target(), cert.target_domain()),
                    3,
                ));
            }
        }
        rows.push(row(
            "verification",
            json!({
                "valid": true,
                "domain": cert.domain().to_string(),
                "target": cert.target_domain().to_string(),
                "target_generator": cert.target().to_string(),
                "n": cert.n(),
                "conditional": cert.is_conditional(),
            }),
        ));
    }
    Ok(rows)
}

fn bound_cmd(args: &BoundArgs) -> Result<Rows, Failure> {
    let dom = domain(&args.domain)?;
    let family: TargetFamily = args.family.parse()?;
    let targets = if args.gens.is_empty() { family.targets(args.dmax)? } else { generator_list(&args.gens)? };
    let tol = parse_rational(&args.tol)?;
    let t = exclusion_threshold(&dom, &family, &targets, &tol, &args.search.options())?;
    Ok(vec![row(
        "bound",
        json!({
            "domain": dom.to_string(),
            "family": family.to_string(),
            "targets": targets.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "tol": rational(&tol),
            "c": rational(&t.value),
            "decimal": decimal(&t.value),
            "excluded_at": rational(&t.excluded_at),
            "allowed_at": rational(&t.allowed_at),
            "evaluations": t.evaluations,
            "conditional": args.search.conjectural,
        }),
    )])
}

fn grid(args: &ScanArgs) -> Result<Vec<Rational>, Failure> {
    if let Some(list) = &args.grid {
        return list.split(',').map(|s| Ok(parse_rational(s)?)).collect();
    }
    let (Some(from), Some(to), Some(step)) = (&args.from, &args.to, &args.step) else {
        return Err(Failure("scan needs --grid or --from/--to/--step".into(), 1));
    };
    let (from, to, step) = (parse_rational(from)?, parse_rational(to)?, parse_rational(step)?);
    if step <= Rational::from_integer(0.into()) {
        return Err(Failure("--step must be positive".into(), 1));
    }
    let mut out = Vec::new();
    let mut a = from;
    while a <= to {
        out.push(a.clone());
        a += &step;
    }
    Ok(out)
}

fn scan_cmd(args: &ScanArgs) -> Result<Rows, Failure> {
    let family: TargetFamily = args.family.parse()?;
    let tol = parse_rational(&args.tol)?;
    let opts = args.search.options();
    let one = Rational::from_integer(1.into());
    let points = grid(args)?;
    let results: Vec<Result<Map<String, Value>, Failure>> = points
        .par_iter()
        .map(|a| {
            let dom = match args.shape {
                Shape::Polydisk => ToricDomain::polydisk(a.clone(), one.clone())?,
                Shape::Ellipsoid => ToricDomain::ellipsoid(a.clone(), one.clone())?,
            };
            let r = scan_row(a, &dom, &family, args.dmax, &tol, &opts)?;
            let thresholds: Vec<String> =
                r.thresholds.iter().map(|t| format!("{}={}", t.target, format_rational(&t.threshold))).collect();
            Ok(row(
                "scan",
                json!({
                    "a": rational(&r.a),
                    "a_decimal": decimal(&r.a),
                    "domain": r.domain,
                    "family": family.to_string(),
                    "bound": rational(&r.bound),
                    "bound_decimal": decimal(&r.bound),
                    "binding_target": r.binding_target,
                    "volume_bound_squared": rational(&r.volume_bound_squared),
                    "beats_volume": r.beats_volume,
                    "thresholds": thresholds.join(";"),
                }),
            ))
        })
        .collect();
    results.into_iter().collect()
}

fn enumerate_cmd(args: &EnumerateArgs) -> Result<Rows, Failure> {
    if let Some(index) = args.index {
        return Ok(generators_with_index(index)
            .iter()
            .map(|g| row("generator", json!({ "I": index, "generator": g.to_string() })))
            .collect());
    }
    let (Some(gen), Some(n)) = (&args.gen, args.n) else {
        return Err(Failure("enumerate needs --index or --gen with --n".into(), 1));
    };
    let gen = generator(gen, args.extended)?;
    Ok(enumerate_factorizations(&gen, n)
        .map(|f| {
            let factors: Vec<String> = f.iter().map(ToString::to_string).collect();
            row("factorization", json!({ "generator": gen.to_string(), "n": n, "factors": factors.join(";") }))
        })
        .collect())
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn emit(rows: &Rows, format: Format) -> io::Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match format {
        Format::Json => {
            for r in rows {
                serde_json::to_writer(&mut out, r)?;
                writeln!(out)?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            if let Some(first) = rows.first() {
                w.write_record(first.keys().filter(|k| *k != "schema"))?;
            }
            for r in rows {
                w.write_record(r.iter().filter(|(k, _)| *k != "schema").map(|(_, v)| cell(v)))?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<Rows, Failure> {
    match &cli.command {
        Command::Capacity(a) => capacity_cmd(a, false),
        Command::Minimal(a) => capacity_cmd(a, true),
        Command::Index(a) => index_cmd(a),
        Command::Action(a) => action_cmd(a),
        Command::Check(a) => check_cmd(a),
        Command::VerifyCertificate(a) => verify_cmd(a),
        Command::Bound(a) => bound_cmd(a),
        Command::Scan(a) => scan_cmd(a),
        Command::Enumerate(a) => enumerate_cmd(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(rows) => match emit(&rows, cli.format) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
        Err(Failure(msg, code)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
