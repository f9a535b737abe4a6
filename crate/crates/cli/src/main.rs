//! `btg`: command-line front end for bt-core.
//!
//! Every subcommand prints a JSON report on stdout (or to `--out`) and a short
//! summary on stderr. Exit codes: 0 pass, 1 check failure, 2 input error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bt_core::analysis::{self, GeneratorSet};
use bt_core::embedding::{self, EmbeddingSpec};
use bt_core::io;
use bt_core::limits;
use bt_core::{random_element, validate, Clopen, Element, Error, RationalPoint, Signature, WordTuple};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "btg", version, about = "Exact computations in generalized Brin-Thompson groups")]
struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Suppress the summary on stderr.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a table file describes a valid element.
    Validate { table: PathBuf },
    /// Composite `a∘b` (b applied first).
    Compose { a: PathBuf, b: PathBuf },
    Invert { table: PathBuf },
    /// Image of a rational point, e.g. `--point "[1(0),(01)]"`.
    Apply {
        table: PathBuf,
        #[arg(long)]
        point: String,
    },
    /// Reduced support as a clopen, computed from both table columns.
    Rsupp { table: PathBuf },
    Commutes { a: PathBuf, b: PathBuf },
    /// Restriction of an element to a multicylinder, e.g. `--cylinder "[0,]"`.
    Localize {
        table: PathBuf,
        #[arg(long)]
        cylinder: String,
    },
    /// Distinct elements of the word ball.
    Ball {
        #[arg(long)]
        gens: PathBuf,
        #[arg(long, default_value_t = 3)]
        radius: usize,
    },
    /// Bounded algebraic-disjointness search for `g` relative to `f`.
    Disjoint {
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        gens: PathBuf,
        #[arg(long, default_value_t = 3)]
        rh: usize,
        #[arg(long, default_value_t = 3)]
        rf: usize,
    },
    /// Cross-check of the localized subgroup against the algebraic description.
    Algsupp {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        gens: PathBuf,
        #[arg(long, default_value_t = 3)]
        radius: usize,
    },
    /// Push an element through an embedding.
    Push {
        #[arg(long)]
        spec: PathBuf,
        table: PathBuf,
    },
    /// Anchor identity and equivariance on seeded random source elements.
    AnchorCheck(AnchorArgs),
    /// Support-inclusion agreement between source and target.
    LrCheck(LrArgs),
    /// Common fixed set of the pushed generators.
    FullSupport {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        gens: PathBuf,
        #[arg(long, default_value_t = 6)]
        depth: usize,
    },
    /// A source element whose pushed support contains the point and lies in the clopen.
    DensityWitness {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        point: String,
        /// Target clopen, e.g. `"{ [0,] }"`.
        #[arg(long)]
        clopen: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        depth: usize,
    },
    /// Anchor image of a target point read off a nested chain of supports.
    Rho {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Quick built-in consistency run.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        n: usize,
    },
}

#[derive(Args)]
struct AnchorArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long)]
    seed: u64,
    /// Largest random element depth; element `i` gets depth `1 + i mod depth`.
    #[arg(long, default_value_t = 4)]
    depth: usize,
    /// Random target points per element for the equivariance check.
    #[arg(long, default_value_t = 10)]
    points: usize,
}

#[derive(Args)]
struct LrArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    gamma: PathBuf,
    /// Generator-set file of probes; random probes are used when absent.
    #[arg(long)]
    probes: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 4)]
    depth: usize,
}

enum Failure {
    Input(String, String),
    Check(String, String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NoWitness(_) | Error::NestingViolation(_) => Failure::Check(e.kind().into(), e.to_string()),
            _ => Failure::Input(e.kind().into(), e.to_string()),
        }
    }
}

type Outcome = std::result::Result<Report, Failure>;

struct Report {
    json: Value,
    passed: bool,
    summary: String,
}

impl Report {
    fn pass(json: Value, summary: impl Into<String>) -> Outcome {
        Ok(Report {
            json,
            passed: true,
            summary: summary.into(),
        })
    }

    fn checked(json: Value, passed: bool, summary: impl Into<String>) -> Outcome {
        Ok(Report {
            json,
            passed,
            summary: summary.into(),
        })
    }
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input("Io".into(), format!("{}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: bt_core::Result<T>) -> std::result::Result<T, Failure> {
    r.map_err(|e| {
        let kind = e.kind().to_string();
        Failure::Input(kind, format!("{}: {e}", path.display()))
    })
}

fn load_element(path: &Path) -> std::result::Result<Element, Failure> {
    with_path(path, io::parse_element(&read(path)?))
}

fn load_gens(path: &Path) -> std::result::Result<GeneratorSet, Failure> {
    with_path(path, io::parse_generators(&read(path)?))
}

fn load_spec(path: &Path) -> std::result::Result<EmbeddingSpec, Failure> {
    with_path(path, io::parse_embedding(&read(path)?))
}

fn table_json(e: &Element) -> Value {
    serde_json::to_value(io::element_file(e)).expect("plain data")
}

fn random_elements(sig: &Signature, n: usize, depth: usize, seed: u64) -> bt_core::Result<Vec<Element>> {
    if depth == 0 {
        return Err(Error::InvalidBound("depth must be at least 1".into()));
    }
    (0..n)
        .map(|i| {
            let s = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(i as u64);
            random_element(sig, 1 + i % depth, s)
        })
        .collect()
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Validate { table } => {
            let t = with_path(&table, io::parse_table(&read(&table)?))?;
            with_path(&table, validate(&t))?;
            let report = json!({
                "valid": true,
                "signature": t.signature().sizes(),
                "rows": t.rows().len(),
            });
            Report::pass(report, format!("valid table with {} rows", t.rows().len()))
        }
        Command::Compose { a, b } => {
            let (a, b) = (load_element(&a)?, load_element(&b)?);
            let c = a.compose(&b)?;
            Report::pass(table_json(&c), format!("composite has {} rows", c.rows().len()))
        }
        Command::Invert { table } => {
            let e = load_element(&table)?;
            Report::pass(table_json(&e.invert()), "inverted")
        }
        Command::Apply { table, point } => {
            let e = load_element(&table)?;
            let p = RationalPoint::parse(&point, e.signature())?;
            let image = e.apply(&p)?.render(e.signature());
            let summary = format!("{} -> {image}", p.render(e.signature()));
            Report::pass(json!({ "point": p.render(e.signature()), "image": image }), summary)
        }
        Command::Rsupp { table } => {
            let e = load_element(&table)?;
            let (v, u) = (e.rsupp(), e.rsupp_from_range());
            let agree = v.equals(&u)?;
            let report = json!({
                "rsupp": v.render(),
                "measure": v.measure().to_string(),
                "from_range": u.render(),
                "columns_agree": agree,
            });
            Report::checked(report, agree, format!("rsupp = {}", v.render()))
        }
        Command::Commutes { a, b } => {
            let (a, b) = (load_element(&a)?, load_element(&b)?);
            let c = a.commutes(&b)?;
            Report::pass(json!({ "commutes": c }), format!("commutes: {c}"))
        }
        Command::Localize { table, cylinder } => {
            let e = load_element(&table)?;
            let mu = WordTuple::parse(&cylinder, e.signature())?;
            let l = e.localize(&mu)?;
            Report::pass(table_json(&l), format!("localized to {}", mu.render(e.signature())))
        }
        Command::Ball { gens, radius } => {
            let g = load_gens(&gens)?;
            let b = analysis::ball(&g, radius);
            let words: Vec<&Vec<i32>> = b.entries.iter().map(|e| &e.word).collect();
            let report = json!({ "generators": g.name(), "radius": radius, "size": b.len(), "words": words });
            Report::pass(report, format!("ball of radius {radius}: {} elements", b.len()))
        }
        Command::Disjoint { g, f, gens, rh, rf } => {
            let (g_el, f_el, set) = (load_element(&g)?, load_element(&f)?, load_gens(&gens)?);
            let v = analysis::algebraically_disjoint(&g_el, &f_el, &set, rh, rf)?;
            let summary = format!("{:?}", v.verdict);
            let passed = v.is_verified();
            Report::checked(json!(v), passed, summary)
        }
        Command::Algsupp { f, gens, radius } => {
            let (f_el, set) = (load_element(&f)?, load_gens(&gens)?);
            let r = analysis::check_alg_supp(&f_el, &set, radius)?;
            let passed = r.containment_violations.is_empty();
            let summary = format!(
                "ball {}, verified {}, containment violations {}, converse gaps {}",
                r.ball_size,
                r.verified().count(),
                r.containment_violations.len(),
                r.converse_gaps.len()
            );
            Report::checked(json!(r), passed, summary)
        }
        Command::Push { spec, table } => {
            let (s, e) = (load_spec(&spec)?, load_element(&table)?);
            let p = s.push_forward(&e)?;
            Report::pass(table_json(&p), format!("pushed table has {} rows", p.rows().len()))
        }
        Command::AnchorCheck(args) => anchor_check(args),
        Command::LrCheck(args) => lr_check(args),
        Command::FullSupport { spec, gens, depth } => {
            let (s, set) = (load_spec(&spec)?, load_gens(&gens)?);
            let r = embedding::check_full_support(&s, &set, depth)?;
            let summary = format!(
                "fixed clopen {}, {} nowhere dense fixed cells",
                r.fixed_clopen,
                r.nowhere_dense_cells.len()
            );
            let passed = r.certified_full_support;
            Report::checked(json!(r), passed, summary)
        }
        Command::DensityWitness {
            spec,
            point,
            clopen,
            seed,
            depth,
        } => {
            let s = load_spec(&spec)?;
            let y = RationalPoint::parse(&point, s.target())?;
            let u = Clopen::parse(&clopen, s.target())?;
            let full = embedding::full_support_element(s.source(), seed);
            let tau = embedding::witness_local_density(&s, &y, &u, &full, depth)?;
            let pushed_support = s.push_forward(&tau)?.rsupp();
            let report = json!({
                "witness": io::element_file(&tau),
                "pushed_rsupp": pushed_support.render(),
                "contains_point": pushed_support.contains_point(&y),
                "within": pushed_support.subset(&u)?,
            });
            Report::pass(report, format!("witness with pushed rsupp {}", pushed_support.render()))
        }
        Command::Rho {
            spec,
            point,
            depth,
            seed,
        } => {
            let s = load_spec(&spec)?;
            let y = RationalPoint::parse(&point, s.target())?;
            let r = limits::rho_eval(&s, &y, depth, seed)?;
            let summary = format!("rho prefix {} (projection {})", r.prefix, r.projection_prefix);
            let passed = r.agrees_with_projection;
            Report::checked(json!(r), passed, summary)
        }
        Command::Selftest { seed, n } => selftest(seed, n),
    }
}

fn anchor_check(args: AnchorArgs) -> Outcome {
    let s = load_spec(&args.spec)?;
    let elements = random_elements(s.source(), args.n, args.depth, args.seed)?;
    let r = embedding::check_anchor(&s, &elements, args.points, args.seed)?;
    let failures: Vec<Value> = r
        .entries
        .iter()
        .filter(|e| !(e.supports_equal && e.equivariant))
        .map(|e| {
            json!({
                "entry": e,
                "table": io::element_file(&elements[e.index]),
            })
        })
        .collect();
    let summary = format!("{} elements, {} failures", r.entries.len(), failures.len());
    let report = json!({
        "elements": r.entries.len(),
        "points_per_element": args.points,
        "seed": args.seed,
        "passed": r.passed,
        "failures": failures,
    });
    Report::checked(report, r.passed, summary)
}

fn lr_check(args: LrArgs) -> Outcome {
    let s = load_spec(&args.spec)?;
    let gamma = load_element(&args.gamma)?;
    let probes = match &args.probes {
        Some(path) => load_gens(path)?.elements().to_vec(),
        None => random_elements(s.source(), args.n, args.depth, args.seed)?,
    };
    let r = embedding::check_local_regularity(&s, &gamma, &probes)?;
    let failures: Vec<Value> = r
        .entries
        .iter()
        .filter(|e| !e.consistent)
        .map(|e| json!({ "entry": e, "table": io::element_file(&probes[e.index]) }))
        .collect();
    let summary = format!("{} probes, {} inconsistent", r.entries.len(), failures.len());
    let report = json!({ "passed": r.passed, "entries": r.entries, "failures": failures });
    Report::checked(report, r.passed, summary)
}

fn selftest(seed: u64, n: usize) -> Outcome {
    let iota = EmbeddingSpec::first_coordinate(2, 1);
    let v2 = iota.source().clone();
    let elements = random_elements(&v2, n, 4, seed)?;
    let mut checks = Vec::new();
    let mut record = |name: &str, ok: bool| checks.push((name.to_string(), ok));

    let mut laws = true;
    for w in elements.windows(3) {
        let (a, b, c) = (&w[0], &w[1], &w[2]);
        laws &= a.compose(&b.compose(c)?)?.same_as(&a.compose(b)?.compose(c)?)?;
        laws &= a.compose(&a.invert())?.is_identity();
    }
    record("group laws", laws);

    let mut supports = true;
    for e in &elements {
        supports &= e.rsupp().equals(&e.rsupp_from_range())?;
        supports &= e.rsupp().equals(&e.invert().rsupp())?;
    }
    record("support columns", supports);

    let anchor = embedding::check_anchor(&iota, &elements, 3, seed)?;
    record("anchor identity", anchor.passed);

    let y = RationalPoint::parse("[(01),(1)]", iota.target())?;
    let rho = limits::rho_eval(&iota, &y, 6, seed)?;
    record("rho agrees with projection", rho.agrees_with_projection);

    let passed = checks.iter().all(|(_, ok)| *ok);
    let failed: Vec<&str> = checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.as_str()).collect();
    let report = json!({
        "seed": seed,
        "elements": n,
        "checks": checks.iter().map(|(n, ok)| json!({ "name": n, "passed": ok })).collect::<Vec<_>>(),
        "passed": passed,
    });
    let summary = if passed {
        format!("{} checks passed", checks.len())
    } else {
        format!("failed: {}", failed.join(", "))
    };
    Report::checked(report, passed, summary)
}

fn emit(out: &Option<PathBuf>, value: &Value) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(value).expect("plain data") + "\n";
    match out {
        Some(path) => fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (value, code, summary) = match run(cli.command) {
        Ok(r) => {
            let status = if r.passed { "pass" } else { "FAIL" };
            (r.json, if r.passed { 0 } else { 1 }, format!("{status}: {}", r.summary))
        }
        Err(Failure::Check(kind, message)) => (
            json!({ "error": kind, "message": message }),
            1,
            format!("FAIL: {kind}: {message}"),
        ),
        Err(Failure::Input(kind, message)) => (
            json!({ "error": kind, "message": message }),
            2,
            format!("input error: {kind}: {message}"),
        ),
    };
    if let Err(e) = emit(&cli.out, &value) {
        eprintln!("cannot write report: {e}");
        return ExitCode::from(2);
    }
    if !cli.quiet {
        eprintln!("{summary}");
    }
    ExitCode::from(code)
}
